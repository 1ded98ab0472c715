//! Exact distributional samplers for the pointwise log-norm statistics of
//! Gaussian matrix products. One product step contributes independent
//! increments `(1/2) log(chi^2_{n-j+1}/n)` for j = 1..k, so arbitrary-N
//! statistics cost N*k chi-squared draws instead of N QR factorizations.
//! Also houses the prefix-sum transform T (and its bidiagonal inverse)
//! between partial-sum vectors and per-index exponents.

use crate::analytic::{self, AnalyticError};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SamplerError {
    #[error("degrees of freedom must be >= 1, got {0}")]
    DofTooSmall(usize),
    #[error("index k={k} out of range [1, {n}]")]
    IndexRange { k: usize, n: usize },
    #[error("need at least one product step")]
    NoSteps,
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}

/// One draw of a chi-squared variable with m degrees of freedom (exact
/// law, gamma-based sampling).
pub fn chi_sq<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<f64, SamplerError> {
    if m < 1 {
        return Err(SamplerError::DofTooSmall(m));
    }
    let dist = ChiSquared::new(m as f64).expect("m >= 1");
    Ok(dist.sample(rng))
}

fn check_nk(n: usize, k: usize) -> Result<(), SamplerError> {
    if k < 1 || k > n {
        return Err(SamplerError::IndexRange { k, n });
    }
    Ok(())
}

/// One draw of `log ||X_{N,n}(Theta)||` for a fixed orthonormal k-frame:
/// `sum_{i<=N} sum_{j<=k} (1/2) log(chi^2_{n-j+1}/n)`.
pub fn pointwise_log_norm<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    big_n: usize,
    rng: &mut R,
) -> Result<f64, SamplerError> {
    check_nk(n, k)?;
    if big_n < 1 {
        return Err(SamplerError::NoSteps);
    }
    let dists: Vec<ChiSquared<f64>> =
        (1..=k).map(|j| ChiSquared::new((n - j + 1) as f64).expect("dof >= 1")).collect();
    let nf = n as f64;
    let mut total = 0.0;
    for _ in 0..big_n {
        for dist in &dists {
            total += 0.5 * (dist.sample(rng) / nf).ln();
        }
    }
    Ok(total)
}

/// The k partial-sum coordinates `S_j = (1/N) log ||X(Theta_{<=j})||`,
/// sampled jointly: within each step, coordinate j consumes the first j
/// of the k chi-squared streams, preserving the joint law of the flag.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseVector {
    pub n: usize,
    pub k: usize,
    pub big_n: usize,
    pub s_hat: Vec<f64>,
}

/// Samples a [`PointwiseVector`].
pub fn pointwise_vector<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    big_n: usize,
    rng: &mut R,
) -> Result<PointwiseVector, SamplerError> {
    check_nk(n, k)?;
    if big_n < 1 {
        return Err(SamplerError::NoSteps);
    }
    let dists: Vec<ChiSquared<f64>> =
        (1..=k).map(|j| ChiSquared::new((n - j + 1) as f64).expect("dof >= 1")).collect();
    let nf = n as f64;
    // increment totals per stream; prefix sums give the coordinates
    let mut totals = vec![0.0; k];
    for _ in 0..big_n {
        for (t, dist) in totals.iter_mut().zip(&dists) {
            *t += 0.5 * (dist.sample(rng) / nf).ln();
        }
    }
    let inv_n = 1.0 / big_n as f64;
    let mut s_hat = Vec::with_capacity(k);
    let mut acc = 0.0;
    for t in &totals {
        acc += t;
        s_hat.push(acc * inv_n);
    }
    Ok(PointwiseVector { n, k, big_n, s_hat })
}

/// First differences of the partial sums: the exact inverse-T action,
/// giving the per-index exponent estimates.
pub fn lambda_hat(pv: &PointwiseVector) -> Vec<f64> {
    SummationMatrix::new(pv.k).inverse(&pv.s_hat)
}

/// The k x k lower-triangular all-ones matrix T and its bidiagonal
/// inverse, applied as prefix sums and first differences in O(k); no
/// general matrix inversion anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SummationMatrix {
    pub k: usize,
}

impl SummationMatrix {
    pub fn new(k: usize) -> Self {
        Self { k }
    }

    /// `T v`: prefix sums.
    pub fn forward(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.k);
        let mut acc = 0.0;
        v.iter()
            .map(|x| {
                acc += x;
                acc
            })
            .collect()
    }

    /// `T^{-1} v`: first differences.
    pub fn inverse(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.k);
        let mut prev = 0.0;
        v.iter()
            .map(|&x| {
                let d = x - prev;
                prev = x;
                d
            })
            .collect()
    }

    /// Integer prefix sums; exact.
    pub fn forward_int(&self, v: &[i64]) -> Vec<i64> {
        let mut acc = 0i64;
        v.iter()
            .map(|x| {
                acc += x;
                acc
            })
            .collect()
    }

    /// Integer first differences; exact.
    pub fn inverse_int(&self, v: &[i64]) -> Vec<i64> {
        let mut prev = 0i64;
        v.iter()
            .map(|&x| {
                let d = x - prev;
                prev = x;
                d
            })
            .collect()
    }
}

/// The tridiagonal precision matrix `(T*)^{-1} Sigma^{-1} T^{-1}` with
/// `Sigma = (1/N) diag(sigma^2_{n,<=k})`, as (diagonal, off-diagonal).
pub fn precision_tridiagonal(
    n: usize,
    k: usize,
    big_n: usize,
) -> Result<(Vec<f64>, Vec<f64>), SamplerError> {
    check_nk(n, k)?;
    if big_n < 1 {
        return Err(SamplerError::NoSteps);
    }
    let nf = big_n as f64;
    let inv_var: Vec<f64> =
        (1..=k).map(|j| analytic::var_log_chi(n, j).map(|v| 1.0 / v)).collect::<Result<_, _>>()?;
    let mut diag = Vec::with_capacity(k);
    for j in 0..k {
        let next = if j + 1 < k { inv_var[j + 1] } else { 0.0 };
        diag.push(nf * (inv_var[j] + next));
    }
    let offdiag: Vec<f64> = (1..k).map(|j| -nf * inv_var[j]).collect();
    Ok((diag, offdiag))
}

/// Square root of the Hilbert-Schmidt norm of the precision matrix, with
/// the reference scale `k^{1/4} (nN)^{1/2}` it is bounded by (up to a
/// universal constant).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CovCheck {
    pub hs_half: f64,
    pub bound: f64,
}

/// Evaluates the precision-matrix size check.
pub fn theoretical_cov_check(n: usize, k: usize, big_n: usize) -> Result<CovCheck, SamplerError> {
    let (diag, offdiag) = precision_tridiagonal(n, k, big_n)?;
    let mut hs_sq = diag.iter().map(|d| d * d).sum::<f64>();
    hs_sq += 2.0 * offdiag.iter().map(|o| o * o).sum::<f64>();
    let hs = hs_sq.sqrt();
    let bound = (k as f64).powf(0.25) * ((n * big_n) as f64).sqrt();
    Ok(CovCheck { hs_half: hs.sqrt(), bound })
}
