//! Exterior-algebra kernels: Gram-determinant wedge norms computed through
//! the projection formula, frame overlaps, Haar frames via Gram-Schmidt on
//! Gaussian vectors, and the small-ball determinant-ratio experiments.
//!
//! Vectors are held as rows of a `k x n` matrix throughout. Determinants
//! are never formed in the linear domain: volumes are accumulated as sums
//! of log residual norms, and ratios as differences of such sums.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WedgeError {
    #[error("frame size k={k} exceeds ambient dimension n={n}")]
    KExceedsN { k: usize, n: usize },
    #[error("k must be at least 1")]
    EmptyFrame,
    #[error("input contains a non-finite entry")]
    NonFinite,
    #[error("frame is not orthonormal (max Gram deviation {0:.3e})")]
    NotOrthonormal(f64),
    #[error("sizes differ: theta has k={theta_k}, v has k={v_k}")]
    SizeMismatch { theta_k: usize, v_k: usize },
    #[error("degenerate draw persisted after {0} retries")]
    DegenerateDraw(usize),
    #[error("moment order p={p} outside (0, k*n] = (0, {max}]")]
    MomentRange { p: f64, max: f64 },
    #[error("need at least {min} draws, got {got}")]
    TooFewDraws { min: usize, got: usize },
}

/// Relative volume below which a system is declared linearly dependent:
/// volume < 1e-12 times its Hadamard bound.
const DEPENDENCE_TOL: f64 = 1e-12;

/// Orthonormality tolerance for frames.
const FRAME_TOL: f64 = 1e-12;

const MAX_RETRIES: usize = 3;

/// An ordered k-tuple of vectors in R^n, stored as rows. Constructed
/// through [`Frame::orthonormal`] it is checked to satisfy
/// `|<v_i, v_j> - delta_ij| <= 1e-12`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub n: usize,
    pub k: usize,
    vectors: Array2<f64>,
}

impl Frame {
    /// Wraps rows as an orthonormal frame, verifying the Gram identity.
    pub fn orthonormal(vectors: Array2<f64>) -> Result<Self, WedgeError> {
        let (k, n) = (vectors.nrows(), vectors.ncols());
        if k == 0 {
            return Err(WedgeError::EmptyFrame);
        }
        if k > n {
            return Err(WedgeError::KExceedsN { k, n });
        }
        if vectors.iter().any(|x| !x.is_finite()) {
            return Err(WedgeError::NonFinite);
        }
        let dev = max_gram_deviation(&vectors);
        if dev > FRAME_TOL {
            return Err(WedgeError::NotOrthonormal(dev));
        }
        Ok(Self { n, k, vectors })
    }

    /// The coordinate frame e_1, ..., e_k in R^n.
    pub fn standard(n: usize, k: usize) -> Result<Self, WedgeError> {
        if k == 0 {
            return Err(WedgeError::EmptyFrame);
        }
        if k > n {
            return Err(WedgeError::KExceedsN { k, n });
        }
        let mut vectors = Array2::zeros((k, n));
        for i in 0..k {
            vectors[[i, i]] = 1.0;
        }
        Ok(Self { n, k, vectors })
    }

    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        max_gram_deviation(&self.vectors)
    }
}

fn max_gram_deviation(rows: &Array2<f64>) -> f64 {
    let k = rows.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..k {
        for j in i..k {
            let dot = rows.row(i).dot(&rows.row(j));
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((dot - target).abs());
        }
    }
    dev
}

/// Log of the k-volume of the parallelepiped spanned by the rows, via the
/// projection formula: orthogonalize sequentially (with one
/// reorthogonalization pass) and sum log residual norms. Returns
/// `f64::NEG_INFINITY` when the rows are linearly dependent within
/// tolerance.
pub fn log_gram_wedge_norm(vectors: &Array2<f64>) -> Result<f64, WedgeError> {
    let (k, n) = (vectors.nrows(), vectors.ncols());
    if k == 0 {
        return Err(WedgeError::EmptyFrame);
    }
    if k > n {
        return Err(WedgeError::KExceedsN { k, n });
    }
    if vectors.iter().any(|x| !x.is_finite()) {
        return Err(WedgeError::NonFinite);
    }
    let mut w = vectors.clone();
    let mut log_volume = 0.0;
    let mut log_hadamard = 0.0;
    for j in 0..k {
        let norm_in = w.row(j).dot(&w.row(j)).sqrt();
        if norm_in == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        log_hadamard += norm_in.ln();
        // two projection passes against the already-orthogonalized rows
        for _ in 0..2 {
            for i in 0..j {
                let qi = w.row(i).to_owned();
                let qi_nrm2 = qi.dot(&qi);
                if qi_nrm2 == 0.0 {
                    continue;
                }
                let c = w.row(j).dot(&qi) / qi_nrm2;
                let mut row = w.row_mut(j);
                row.scaled_add(-c, &qi);
            }
        }
        let res = w.row(j).dot(&w.row(j)).sqrt();
        if res == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        log_volume += res.ln();
    }
    if log_volume - log_hadamard < DEPENDENCE_TOL.ln() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(log_volume)
}

/// `||x_1 ^ ... ^ x_k|| = sqrt(det(X X*))`, the k-volume spanned by the
/// rows; 0 when they are linearly dependent within tolerance.
pub fn gram_wedge_norm(vectors: &Array2<f64>) -> Result<f64, WedgeError> {
    Ok(match log_gram_wedge_norm(vectors)? {
        v if v == f64::NEG_INFINITY => 0.0,
        v => v.exp(),
    })
}

/// `|<v_1 ^ ... ^ v_k, theta_1 ^ ... ^ theta_k>|` for an orthonormal
/// frame theta: the wedge norm of the k x k coordinate matrix of V in the
/// theta basis, which equals `sqrt(det(P_Theta V V* P_Theta))`.
pub fn projected_wedge_overlap(theta: &Frame, v: &Array2<f64>) -> Result<f64, WedgeError> {
    if v.nrows() != theta.k {
        return Err(WedgeError::SizeMismatch { theta_k: theta.k, v_k: v.nrows() });
    }
    if v.ncols() != theta.n {
        return Err(WedgeError::KExceedsN { k: v.ncols(), n: theta.n });
    }
    let dev = theta.gram_deviation();
    if dev > FRAME_TOL {
        return Err(WedgeError::NotOrthonormal(dev));
    }
    // coords[j][i] = <v_j, theta_i>
    let coords = v.dot(&theta.vectors().t());
    gram_wedge_norm(&coords)
}

fn gaussian_rows<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> Array2<f64> {
    Array2::from_shape_fn((k, n), |_| StandardNormal.sample(rng))
}

/// Draws an orthonormal k-frame from the rotation-invariant (Haar)
/// distribution on flags: iid standard Gaussian rows, orthonormalized in
/// order. Retries internally on a degenerate draw.
pub fn haar_frame<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Frame, WedgeError> {
    if k == 0 {
        return Err(WedgeError::EmptyFrame);
    }
    if k > n {
        return Err(WedgeError::KExceedsN { k, n });
    }
    'retry: for _ in 0..=MAX_RETRIES {
        let mut w = gaussian_rows(k, n, rng);
        for j in 0..k {
            for _ in 0..2 {
                for i in 0..j {
                    let qi = w.row(i).to_owned();
                    let c = w.row(j).dot(&qi);
                    let mut row = w.row_mut(j);
                    row.scaled_add(-c, &qi);
                }
            }
            let res = w.row(j).dot(&w.row(j)).sqrt();
            if res < 1e-150 {
                continue 'retry;
            }
            w.row_mut(j).mapv_inplace(|x| x / res);
        }
        if max_gram_deviation(&w) > FRAME_TOL {
            continue 'retry;
        }
        return Ok(Frame { n, k, vectors: w });
    }
    Err(WedgeError::DegenerateDraw(MAX_RETRIES))
}

/// Log of `(det(G_k G_k*) / det(G G*))^{1/2}` for one draw of a k x n
/// standard Gaussian G, with `G_k` its first k columns. Always <= 0.
pub fn small_ball_log_ratio<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<f64, WedgeError> {
    if k == 0 {
        return Err(WedgeError::EmptyFrame);
    }
    if k > n {
        return Err(WedgeError::KExceedsN { k, n });
    }
    for _ in 0..=MAX_RETRIES {
        let g = gaussian_rows(k, n, rng);
        let log_den = log_gram_wedge_norm(&g)?;
        let gk = g.slice(ndarray::s![.., 0..k]).to_owned();
        let log_num = log_gram_wedge_norm(&gk)?;
        if log_den == f64::NEG_INFINITY || log_num == f64::NEG_INFINITY {
            continue;
        }
        // the sub-block volume cannot exceed the full volume
        return Ok((log_num - log_den).min(0.0));
    }
    Err(WedgeError::DegenerateDraw(MAX_RETRIES))
}

/// `(det(G_k G_k*)/det(G G*))^{1/2}` in [0, 1]; the squared-overlap
/// distribution of a Haar k-plane with the coordinate k-plane.
pub fn small_ball_ratio<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<f64, WedgeError> {
    Ok(small_ball_log_ratio(n, k, rng)?.exp())
}

/// Monte Carlo estimate of `(E[det(GG*)^{p/2k}])^{1/p}` by log-domain
/// averaging (log-sum-exp) over `draws` independent k x n Gaussians.
/// Valid for moment orders `0 < p <= k n`.
pub fn det_moment_estimate<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    p: f64,
    draws: usize,
    rng: &mut R,
) -> Result<f64, WedgeError> {
    if k == 0 {
        return Err(WedgeError::EmptyFrame);
    }
    if k > n {
        return Err(WedgeError::KExceedsN { k, n });
    }
    let max_p = (k * n) as f64;
    if p <= 0.0 || p.is_nan() || p > max_p {
        return Err(WedgeError::MomentRange { p, max: max_p });
    }
    if draws < 1000 {
        return Err(WedgeError::TooFewDraws { min: 1000, got: draws });
    }
    let mut log_dets = Vec::with_capacity(draws);
    for _ in 0..draws {
        let g = gaussian_rows(k, n, rng);
        let log_det_sqrt = log_gram_wedge_norm(&g)?;
        if log_det_sqrt == f64::NEG_INFINITY {
            continue;
        }
        // log det(GG*) = 2 * log volume
        log_dets.push(2.0 * log_det_sqrt);
    }
    moment_from_log_dets(k, p, &log_dets)
}

/// `(mean of det^{p/2k})^{1/p}` from precomputed `log det(GG*)` draws,
/// averaged through log-sum-exp.
pub fn moment_from_log_dets(k: usize, p: f64, log_dets: &[f64]) -> Result<f64, WedgeError> {
    if log_dets.is_empty() {
        return Err(WedgeError::DegenerateDraw(MAX_RETRIES));
    }
    let scale = p / (2.0 * k as f64);
    let m = log_dets.iter().map(|l| scale * l).fold(f64::NEG_INFINITY, f64::max);
    let lse = m + log_dets.iter().map(|l| (scale * l - m).exp()).sum::<f64>().ln();
    let log_mean = lse - (log_dets.len() as f64).ln();
    Ok((log_mean / p).exp())
}
