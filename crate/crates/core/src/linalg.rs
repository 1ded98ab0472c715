//! Dense kernels for the matrix-product laboratory: Ginibre sampling, a
//! positive-diagonal QR built on blocked Gram-Schmidt with
//! reorthogonalization, a one-sided Jacobi SVD, and the overflow-proof
//! log-domain product accumulator.
//!
//! The accumulator keeps `X = Q U` with Q orthogonal and U upper
//! triangular, retaining only the accumulated logs of U's diagonal. The
//! diagonal of a product of upper-triangular factors is the product of
//! their diagonals, so after any number of steps the partial sum
//! `sum_{i<=k} log_scales[i]` is exactly `log ||X e_1 ^ ... ^ e_k||`, and
//! nothing ever leaves the representable range.

use ndarray::{s, Array2, Axis};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

/// Row-major dense matrix of f64 entries.
pub type DenseMatrix = Array2<f64>;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix must be square, got {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degenerate input: zero diagonal in triangular factor at index {0}")]
    DegenerateInput(usize),
    #[error("matrix size {n} exceeds the dense SVD limit {limit}")]
    SizeLimit { n: usize, limit: usize },
    #[error("jacobi svd failed to converge after {sweeps} sweeps (off-norm {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("no factors supplied")]
    EmptyProduct,
    #[error("state has absorbed no factors yet")]
    NoSteps,
    #[error("oracle budget exceeded: N*n = {actual} > {budget}")]
    OracleBudget { actual: usize, budget: usize },
    #[error(
        "oracle validity guard tripped: estimated log-condition N*(l_max - l_min) = {spread:.2} \
         exceeds {limit:.2}; dense singular values below machine range would be garbage"
    )]
    OracleCondition { spread: f64, limit: f64 },
    #[error("oracle scale guard tripped: |N * lambda| = {mag:.2} risks overflow in dense entries")]
    OracleScale { mag: f64 },
}

fn check_square_finite(m: &DenseMatrix) -> Result<usize, LinalgError> {
    let (rows, cols) = (m.nrows(), m.ncols());
    if rows != cols {
        return Err(LinalgError::NotSquare { rows, cols });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    Ok(rows)
}

/// One n x n matrix with iid N(0, 1/n) entries.
pub fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    Array2::from_shape_fn((n, n), |_| {
        let z: f64 = StandardNormal.sample(rng);
        z * scale
    })
}

/// Panel width for the blocked Gram-Schmidt; projections against earlier
/// panels run as matrix products.
const GS_PANEL: usize = 32;

/// A residual this small relative to the incoming row norm means the row
/// is numerically dependent on its predecessors.
const RANK_TOL: f64 = 1e-13;

/// A panel keeping at least this fraction of its Frobenius norm after
/// one projection pass needs no second pass (the usual "twice is enough"
/// norm test).
const REORTH_NORM_TEST: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Orthonormalizes the rows of `w` in place (blocked classical
/// Gram-Schmidt; a second projection pass runs whenever the norm test
/// demands it, and always inside panels) and returns the residual norms.
/// When `r_out` is given it accumulates the full triangular coefficient
/// matrix: `row_j(in) = sum_{i<=j} r[i][j] row_i(out)`.
fn orthonormalize_rows(
    w: &mut Array2<f64>,
    mut r_out: Option<&mut Array2<f64>>,
) -> Result<Vec<f64>, LinalgError> {
    let k = w.nrows();
    let mut diag = vec![0.0; k];
    let input_norms: Vec<f64> = (0..k).map(|j| w.row(j).dot(&w.row(j)).sqrt()).collect();
    let mut j0 = 0;
    while j0 < k {
        let j1 = (j0 + GS_PANEL).min(k);
        if j0 > 0 {
            let mut before = 0.0;
            for pass in 0..2 {
                let (done, mut panel) = w.view_mut().split_at(Axis(0), j0);
                let q = done.slice(s![.., ..]);
                let p = panel.slice(s![0..(j1 - j0), ..]);
                if pass == 1 {
                    let after = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if after > REORTH_NORM_TEST * before {
                        break;
                    }
                } else {
                    before = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                }
                // coefficients of the panel rows on the finished basis
                let c = q.dot(&p.t());
                let update = c.t().dot(&q);
                let mut p = panel.slice_mut(s![0..(j1 - j0), ..]);
                p -= &update;
                if let Some(r) = r_out.as_deref_mut() {
                    for i in 0..j0 {
                        for j in j0..j1 {
                            r[[i, j]] += c[[i, j - j0]];
                        }
                    }
                }
            }
        }
        // within the panel: classical Gram-Schmidt per row, two passes,
        // with the projections shaped as matrix-vector products
        for j in j0..j1 {
            for _pass in 0..2 {
                if j == j0 {
                    break;
                }
                let (done, mut rest) = w.view_mut().split_at(Axis(0), j);
                let block = done.slice(s![j0..j, ..]);
                let mut row_j = rest.row_mut(0);
                let coeffs = block.dot(&row_j);
                for (i, &c) in coeffs.iter().enumerate() {
                    row_j.scaled_add(-c, &block.row(i));
                }
                if let Some(r) = r_out.as_deref_mut() {
                    for (i, &c) in coeffs.iter().enumerate() {
                        r[[j0 + i, j]] += c;
                    }
                }
            }
            let norm = w.row(j).dot(&w.row(j)).sqrt();
            if !norm.is_finite() || norm <= RANK_TOL * input_norms[j] {
                return Err(LinalgError::DegenerateInput(j));
            }
            w.row_mut(j).mapv_inplace(|x| x / norm);
            diag[j] = norm;
            if let Some(r) = r_out.as_deref_mut() {
                r[[j, j]] = norm;
            }
        }
        j0 = j1;
    }
    Ok(diag)
}

/// QR factorization with the sign convention fixed so that R's diagonal
/// is strictly positive (unique a.s. for full-rank input). Exactly zero
/// residuals are reported as degenerate input.
pub fn qr_positive(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix), LinalgError> {
    let n = check_square_finite(m)?;
    // orthogonalize the columns of m, held as rows of the transpose
    let mut w = m.t().to_owned();
    let mut r = Array2::zeros((n, n));
    orthonormalize_rows(&mut w, Some(&mut r))?;
    Ok((w.t().to_owned(), r))
}

/// Hard cap for the dense SVD path; above this the log-domain
/// accumulator is the only supported route.
pub const JACOBI_SIZE_LIMIT: usize = 128;

const JACOBI_MAX_SWEEPS: usize = 42;

/// Singular values of a square matrix by one-sided Jacobi rotations,
/// sorted descending. High relative accuracy for values down to
/// ~1e-12 of the largest.
pub fn jacobi_svd(m: &DenseMatrix) -> Result<Vec<f64>, LinalgError> {
    let n = check_square_finite(m)?;
    if n > JACOBI_SIZE_LIMIT {
        return Err(LinalgError::SizeLimit { n, limit: JACOBI_SIZE_LIMIT });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // rows of the work matrix are the columns of m
    let mut w = m.t().to_owned();
    let tol = 1e-15;
    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        let mut max_off = 0.0f64;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (top, bottom) = w.view_mut().split_at(Axis(0), q);
                let mut rp = top.row(p).to_owned();
                let mut rq = bottom.row(0).to_owned();
                let app = rp.dot(&rp);
                let aqq = rq.dot(&rq);
                let apq = rp.dot(&rq);
                if app == 0.0 || aqq == 0.0 {
                    continue;
                }
                let rel = apq.abs() / (app * aqq).sqrt();
                max_off = max_off.max(rel);
                if rel <= tol {
                    continue;
                }
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let vp = rp[i];
                    let vq = rq[i];
                    rp[i] = c * vp - s * vq;
                    rq[i] = s * vp + c * vq;
                }
                w.row_mut(p).assign(&rp);
                w.row_mut(q).assign(&rq);
                rotated = true;
            }
        }
        sweeps += 1;
        if !rotated {
            break;
        }
        if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(LinalgError::NoConvergence { sweeps, off: max_off });
        }
    }
    let mut sv: Vec<f64> = (0..n).map(|i| w.row(i).dot(&w.row(i)).sqrt()).collect();
    sv.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok(sv)
}

/// Log absolute determinant by partial-pivot elimination; an independent
/// route used to cross-check the accumulator. Returns negative infinity
/// for an exactly singular matrix.
pub fn log_abs_det_lu(m: &DenseMatrix) -> Result<f64, LinalgError> {
    let n = check_square_finite(m)?;
    let mut a = m.clone();
    let mut acc = 0.0;
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[[r, col]].abs() > a[[piv, col]].abs() {
                piv = r;
            }
        }
        let pval = a[[piv, col]];
        if pval == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        if piv != col {
            for c in 0..n {
                a.swap([piv, c], [col, c]);
            }
        }
        acc += pval.abs().ln();
        for r in col + 1..n {
            let f = a[[r, col]] / pval;
            for c in col + 1..n {
                a[[r, c]] -= f * a[[col, c]];
            }
            a[[r, col]] = 0.0;
        }
    }
    Ok(acc)
}

/// How the log singular values in a [`SpectrumEstimate`] were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    /// Coordinate-frame partial sums from the QR accumulator; pointwise
    /// quantities, not sorted.
    QrAccumulated,
    /// Dense multiply plus Jacobi SVD; exact singular values, sorted.
    DenseOracle,
}

/// Estimated Lyapunov exponents `(1/N) log s_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    pub n: usize,
    pub steps: usize,
    pub log_singular_values_over_n: Vec<f64>,
    pub method: EstimateMethod,
}

impl SpectrumEstimate {
    /// `sum_i N * lambda_i`, the accumulated log |det|.
    pub fn total_log_det(&self) -> f64 {
        self.log_singular_values_over_n.iter().sum::<f64>() * self.steps as f64
    }
}

/// Drift-check cadence for the accumulated orthogonal factor.
const DRIFT_CHECK_INTERVAL: usize = 64;
const DRIFT_TOLERANCE: f64 = 1e-12;

/// Orthogonal factor plus per-row accumulated log scales for a running
/// matrix product; the overflow-proof representation of
/// `A_N ... A_2 A_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    n: usize,
    steps_done: usize,
    /// rows are the columns of the orthogonal factor Q
    qt: Array2<f64>,
    log_scales: Vec<f64>,
}

impl ProductState {
    /// Fresh state representing the empty product (the identity).
    pub fn new(n: usize) -> Self {
        Self { n, steps_done: 0, qt: Array2::eye(n), log_scales: vec![0.0; n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn steps_done(&self) -> usize {
        self.steps_done
    }

    /// Accumulated `sum_t log R_t[i,i]`; the prefix sum over `i <= k`
    /// equals `log ||X (e_1 ^ ... ^ e_k)||`.
    pub fn log_scales(&self) -> &[f64] {
        &self.log_scales
    }

    /// The orthogonal factor Q (copied out).
    pub fn q_factor(&self) -> DenseMatrix {
        self.qt.t().to_owned()
    }

    /// Max-entry deviation of Q^T Q from the identity.
    pub fn orthogonality_drift(&self) -> f64 {
        let gram = self.qt.dot(&self.qt.t());
        let n = self.n;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((gram[[i, j]] - target).abs());
            }
        }
        dev
    }

    /// Absorbs one factor: `X <- a X`. Internally `B = a Q`, `B = Q' R`,
    /// `log_scales[i] += log R[i,i]`.
    pub fn push(&mut self, a: &DenseMatrix) -> Result<(), LinalgError> {
        let n = check_square_finite(a)?;
        if n != self.n {
            return Err(LinalgError::DimensionMismatch { expected: self.n, got: n });
        }
        // (a Q)^T = Q^T a^T, rows stay contiguous
        let mut bt = self.qt.dot(&a.t());
        let diag = orthonormalize_rows(&mut bt, None)?;
        for (ls, d) in self.log_scales.iter_mut().zip(&diag) {
            *ls += d.ln();
        }
        self.qt = bt;
        self.steps_done += 1;
        if self.steps_done.is_multiple_of(DRIFT_CHECK_INTERVAL) && self.orthogonality_drift() > DRIFT_TOLERANCE
        {
            self.reorthogonalize()?;
        }
        Ok(())
    }

    /// One extra orthogonalization pass over Q, absorbing the (near-unit)
    /// diagonal corrections into the log scales.
    fn reorthogonalize(&mut self) -> Result<(), LinalgError> {
        let diag = orthonormalize_rows(&mut self.qt, None)?;
        for (ls, d) in self.log_scales.iter_mut().zip(&diag) {
            *ls += d.ln();
        }
        Ok(())
    }

    /// Lyapunov estimates `lambda_i = log_scales[i] / N` at the
    /// coordinate frame. Pointwise quantities: not sorted.
    pub fn lyapunov(&self) -> Result<SpectrumEstimate, LinalgError> {
        if self.steps_done == 0 {
            return Err(LinalgError::NoSteps);
        }
        let n_steps = self.steps_done as f64;
        Ok(SpectrumEstimate {
            n: self.n,
            steps: self.steps_done,
            log_singular_values_over_n: self.log_scales.iter().map(|l| l / n_steps).collect(),
            method: EstimateMethod::QrAccumulated,
        })
    }
}

/// Validity limits for the brute-force dense oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleLimits {
    /// Budget on N * n.
    pub max_n_times_steps: usize,
    /// Upper bound on the estimated log-condition `N (l_max - l_min)`;
    /// double precision holds ~36 decades, this leaves margin.
    pub max_log_condition: f64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self { max_n_times_steps: 8192, max_log_condition: 25.0 }
    }
}

/// Multiplies the factors densely and takes exact singular values via
/// [`jacobi_svd`]. Refuses loudly when the estimated conditioning puts
/// the small singular values outside double-precision reach.
pub fn dense_product_log_svd_oracle(
    factors: &[DenseMatrix],
    limits: &OracleLimits,
) -> Result<SpectrumEstimate, LinalgError> {
    if factors.is_empty() {
        return Err(LinalgError::EmptyProduct);
    }
    let n = check_square_finite(&factors[0])?;
    let steps = factors.len();
    if n * steps > limits.max_n_times_steps {
        return Err(LinalgError::OracleBudget {
            actual: n * steps,
            budget: limits.max_n_times_steps,
        });
    }

    // cheap pilot run through the accumulator to estimate conditioning
    let mut pilot = ProductState::new(n);
    for a in factors {
        pilot.push(a)?;
    }
    let lo = pilot.log_scales.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = pilot.log_scales.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    if spread > limits.max_log_condition {
        return Err(LinalgError::OracleCondition { spread, limit: limits.max_log_condition });
    }
    let mag = lo.abs().max(hi.abs());
    if mag > 300.0 {
        return Err(LinalgError::OracleScale { mag });
    }

    let mut product = factors[0].clone();
    for a in &factors[1..] {
        product = a.dot(&product);
    }
    let sv = jacobi_svd(&product)?;
    let n_steps = steps as f64;
    let lambdas = sv
        .iter()
        .map(|&s| if s > 0.0 { s.ln() / n_steps } else { f64::NEG_INFINITY })
        .collect();
    Ok(SpectrumEstimate {
        n,
        steps,
        log_singular_values_over_n: lambdas,
        method: EstimateMethod::DenseOracle,
    })
}
