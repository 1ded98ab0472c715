//! Empirical-distribution machinery: exact Kolmogorov-Smirnov statistics,
//! tail-frequency curves, log-log slope fits, and the three-part
//! multivariate normality proxy (marginals, correlations, Mahalanobis).
//!
//! Everything here is deterministic given its inputs; no hidden RNG.

use ndarray::Array2;
use thiserror::Error;

pub mod dist;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("empty sample")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFiniteSample,
    #[error("reference cdf is not nondecreasing over the sample")]
    CdfNotMonotone,
    #[error("thresholds must be sorted ascending")]
    UnsortedThresholds,
    #[error("log-log fit needs at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("log-log fit requires strictly positive values")]
    NonPositiveValue,
    #[error("need at least {min} trials, got {got}")]
    TooFewTrials { min: usize, got: usize },
    #[error("degenerate sigma at coordinate {0}")]
    DegenerateSigma(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Asymptotic Kolmogorov critical coefficient at level alpha = 0.001;
/// one-sample threshold is `c / sqrt(n)`, two-sample `c sqrt((n+m)/nm)`.
pub const KOLMOGOROV_C_001: f64 = 1.949;
/// Same at alpha = 0.01.
pub const KOLMOGOROV_C_01: f64 = 1.628;

/// One-sample threshold `c / sqrt(n)` for the asymptotic Kolmogorov law.
pub fn ks_one_sample_threshold(n: usize, c: f64) -> f64 {
    c / (n as f64).sqrt()
}

/// Two-sample threshold `c sqrt((n+m)/(nm))`.
pub fn ks_two_sample_threshold(n: usize, m: usize, c: f64) -> f64 {
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

fn sorted_copy(samples: &[f64]) -> Result<Vec<f64>, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFiniteSample);
    }
    let mut v = samples.to_vec();
    v.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
    Ok(v)
}

/// Exact one-sample KS statistic `sup_t |ECDF(t) - cdf(t)|`, evaluated at
/// every jump with both one-sided gaps.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64, StatsError> {
    let sorted = sorted_copy(samples)?;
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    let mut prev_f = f64::NEG_INFINITY;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        if f < prev_f - 1e-12 {
            return Err(StatsError::CdfNotMonotone);
        }
        prev_f = prev_f.max(f);
        let lo = (f - i as f64 / n).abs();
        let hi = ((i as f64 + 1.0) / n - f).abs();
        sup = sup.max(lo).max(hi);
    }
    Ok(sup)
}

/// Exact two-sample KS statistic: sup over the merged sample of
/// `|ECDF_a - ECDF_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    let sa = sorted_copy(a)?;
    let sb = sorted_copy(b)?;
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup: f64 = 0.0;
    while i < sa.len() && j < sb.len() {
        let t = sa[i].min(sb[j]);
        // advance both ECDFs past all points equal to t
        while i < sa.len() && sa[i] <= t {
            i += 1;
        }
        while j < sb.len() && sb[j] <= t {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(sup)
}

/// Fraction of samples with `|x| >= t` for each threshold t (ascending).
pub fn tail_frequencies(samples: &[f64], thresholds: &[f64]) -> Result<Vec<f64>, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if thresholds.windows(2).any(|w| w[0] > w[1]) {
        return Err(StatsError::UnsortedThresholds);
    }
    let mut mags: Vec<f64> = samples.iter().map(|x| x.abs()).collect();
    mags.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = mags.len();
    let freqs = thresholds
        .iter()
        .map(|&t| {
            let below = mags.partition_point(|&m| m < t);
            (n - below) as f64 / n as f64
        })
        .collect();
    Ok(freqs)
}

/// Least-squares fit of `log y` against `log x`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Log-log slope of a power-law relation; exact on noiseless data.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<SlopeFit, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::DimensionMismatch(format!("{} xs vs {} ys", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(StatsError::TooFewPoints(xs.len()));
    }
    if xs.iter().chain(ys.iter()).any(|&v| v <= 0.0 || !v.is_finite()) {
        return Err(StatsError::NonPositiveValue);
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly)
}

/// Plain least-squares line fit with R^2; the abscissa/ordinate are used
/// as given (the tail-shape suites pass exponent arguments directly).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<SlopeFit, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::DimensionMismatch(format!("{} xs vs {} ys", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(StatsError::TooFewPoints(xs.len()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(StatsError::DimensionMismatch("all xs equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(SlopeFit { slope, intercept, r_squared })
}

/// ECDF, moments, and an optional KS-versus-reference statistic for one
/// batch of scalar draws.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSummary {
    pub count: usize,
    pub sorted_samples: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub ks_vs_reference: Option<f64>,
}

impl EmpiricalSummary {
    pub fn from_samples(samples: &[f64]) -> Result<Self, StatsError> {
        let sorted = sorted_copy(samples)?;
        let n = sorted.len();
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let variance = if n > 1 {
            sorted.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0)
        } else {
            0.0
        };
        Ok(Self { count: n, sorted_samples: sorted, mean, variance, ks_vs_reference: None })
    }

    pub fn with_ks<F: Fn(f64) -> f64>(mut self, cdf: F) -> Result<Self, StatsError> {
        self.ks_vs_reference = Some(ks_one_sample(&self.sorted_samples, cdf)?);
        Ok(self)
    }
}

/// Marginal, correlation, and Mahalanobis summaries of a trials-by-k draw
/// matrix standardized against a diagonal Gaussian reference.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct NormalityReport {
    pub k: usize,
    pub marginal_ks: Vec<f64>,
    pub max_abs_offdiag_corr: f64,
    pub mahalanobis_ks: f64,
}

/// Standardizes each coordinate as `(x_j - mu_j) * scale / sigma_j`, then
/// reports per-coordinate KS against the standard normal, the largest
/// off-diagonal sample correlation, and KS of the squared Mahalanobis
/// norm against the chi-squared law with k degrees of freedom.
pub fn normality_proxy(
    draws: &Array2<f64>,
    mu: &[f64],
    sigma: &[f64],
    scale: f64,
) -> Result<NormalityReport, StatsError> {
    let trials = draws.nrows();
    let k = draws.ncols();
    if trials < 100 {
        return Err(StatsError::TooFewTrials { min: 100, got: trials });
    }
    if mu.len() != k || sigma.len() != k {
        return Err(StatsError::DimensionMismatch(format!(
            "draws have k={k}, mu has {}, sigma has {}",
            mu.len(),
            sigma.len()
        )));
    }
    for (j, &s) in sigma.iter().enumerate() {
        if s <= 0.0 || !s.is_finite() {
            return Err(StatsError::DegenerateSigma(j));
        }
    }

    let mut z = Array2::<f64>::zeros((trials, k));
    for t in 0..trials {
        for j in 0..k {
            z[[t, j]] = (draws[[t, j]] - mu[j]) * scale / sigma[j];
        }
    }

    let mut marginal_ks = Vec::with_capacity(k);
    for j in 0..k {
        let col: Vec<f64> = z.column(j).to_vec();
        marginal_ks.push(ks_one_sample(&col, dist::normal_cdf)?);
    }

    // sample correlations of the standardized columns
    let means: Vec<f64> = (0..k).map(|j| z.column(j).sum() / trials as f64).collect();
    let mut max_corr: f64 = 0.0;
    for a in 0..k {
        for b in (a + 1)..k {
            let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
            for t in 0..trials {
                let da = z[[t, a]] - means[a];
                let db = z[[t, b]] - means[b];
                sab += da * db;
                saa += da * da;
                sbb += db * db;
            }
            if saa > 0.0 && sbb > 0.0 {
                max_corr = max_corr.max((sab / (saa * sbb).sqrt()).abs());
            }
        }
    }

    let maha: Vec<f64> = (0..trials).map(|t| (0..k).map(|j| z[[t, j]] * z[[t, j]]).sum()).collect();
    let kf = k as f64;
    let mahalanobis_ks = ks_one_sample(&maha, |x| dist::chi_squared_cdf(kf, x))?;

    Ok(NormalityReport { k, marginal_ks, max_abs_offdiag_corr: max_corr, mahalanobis_ks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::uniform_cdf;
    use ndarray::Array2;
    use rand::SeedableRng;
    use rand_distr::Distribution;

    fn unif(t: f64) -> f64 {
        uniform_cdf(t).unwrap()
    }

    #[test]
    fn ks_one_sample_by_hand() {
        assert!((ks_one_sample(&[0.5], unif).unwrap() - 0.5).abs() < 1e-15);
        assert!((ks_one_sample(&[0.25, 0.75], unif).unwrap() - 0.25).abs() < 1e-15);
        let grid: Vec<f64> = (1..=100).map(|i| i as f64 / 100.0).collect();
        assert!((ks_one_sample(&grid, unif).unwrap() - 0.01).abs() < 1e-12);
        assert_eq!(ks_one_sample(&[], unif), Err(StatsError::EmptySample));
    }

    #[test]
    fn ks_one_sample_probability_integral_transform() {
        // KS is invariant under a strictly increasing reparameterization
        // applied to samples and CDF alike.
        let samples = [0.11, 0.49, 0.53, 0.87, 0.93, 0.21];
        let d1 = ks_one_sample(&samples, unif).unwrap();
        let mapped: Vec<f64> = samples.iter().map(|&x| x.exp()).collect();
        let d2 = ks_one_sample(&mapped, |t: f64| unif(t.ln())).unwrap();
        assert!((d1 - d2).abs() < 1e-12);
    }

    #[test]
    fn ks_two_sample_by_hand() {
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(ks_two_sample(&[0.0], &[1.0]).unwrap(), 1.0);
        assert!((ks_two_sample(&[1.0, 2.0], &[1.5]).unwrap() - 0.5).abs() < 1e-15);
        // symmetry
        let a = [0.3, 1.2, 0.7, 2.2];
        let b = [0.1, 0.9, 1.4];
        assert_eq!(ks_two_sample(&a, &b).unwrap(), ks_two_sample(&b, &a).unwrap());
    }

    #[test]
    fn ks_two_sample_triangle_bound() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        for _ in 0..20 {
            let a: Vec<f64> = (0..40).map(|_| normal.sample(&mut rng)).collect();
            let b: Vec<f64> = (0..25).map(|_| normal.sample(&mut rng) + 0.3).collect();
            let c: Vec<f64> = (0..31).map(|_| normal.sample(&mut rng) - 0.2).collect();
            let ab = ks_two_sample(&a, &b).unwrap();
            let bc = ks_two_sample(&b, &c).unwrap();
            let ac = ks_two_sample(&a, &c).unwrap();
            assert!(ac <= ab + bc + 1e-12);
        }
    }

    #[test]
    fn tail_frequencies_by_hand() {
        let f = tail_frequencies(&[-1.0, 1.0], &[0.5, 1.5]).unwrap();
        assert_eq!(f, vec![1.0, 0.0]);
        let f = tail_frequencies(&[0.0, 0.0, 0.0], &[0.1, 0.2]).unwrap();
        assert_eq!(f, vec![0.0, 0.0]);
        assert_eq!(tail_frequencies(&[1.0], &[0.2, 0.1]), Err(StatsError::UnsortedThresholds));
        // nonincreasing on random input
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let samples: Vec<f64> = (0..500).map(|_| normal.sample(&mut rng)).collect();
        let ts: Vec<f64> = (0..10).map(|i| i as f64 * 0.3).collect();
        let f = tail_frequencies(&samples, &ts).unwrap();
        assert!(f.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn tail_frequency_normal_quantile() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let samples: Vec<f64> = (0..100_000).map(|_| normal.sample(&mut rng)).collect();
        let f = tail_frequencies(&samples, &[1.96]).unwrap();
        assert!((f[0] - 0.05).abs() < 0.005, "two-sided 1.96 tail = {}", f[0]);
    }

    #[test]
    fn loglog_slope_exact_cases() {
        let fit = loglog_slope(&[1.0, 2.0], &[2.0, 4.0]).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);
        let e = std::f64::consts::E;
        let fit = loglog_slope(&[1.0, e], &[1.0, e * e]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        // y = 3 x^{1.5} at five points: exact slope and R^2 = 1
        let xs = [0.5_f64, 1.0, 2.0, 4.0, 9.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(1.5)).collect();
        let fit = loglog_slope(&xs, &ys).unwrap();
        assert!((fit.slope - 1.5).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.intercept - 3.0_f64.ln()).abs() < 1e-12);
        assert!(loglog_slope(&[1.0], &[1.0]).is_err());
        assert!(loglog_slope(&[1.0, -1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn normality_proxy_standard_normal() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let trials = 10_000;
        let k = 3;
        let draws = Array2::from_shape_fn((trials, k), |_| normal.sample(&mut rng));
        let report = normality_proxy(&draws, &[0.0; 3], &[1.0; 3], 1.0).unwrap();
        let threshold = ks_one_sample_threshold(trials, KOLMOGOROV_C_001);
        for (j, d) in report.marginal_ks.iter().enumerate() {
            assert!(*d <= threshold, "marginal {j}: {d} > {threshold}");
        }
        assert!(report.max_abs_offdiag_corr < 0.05);
        assert!(report.mahalanobis_ks <= threshold);
    }

    #[test]
    fn normality_proxy_detects_failures() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let trials = 500;
        // perfectly correlated coordinates
        let mut draws = Array2::zeros((trials, 2));
        for t in 0..trials {
            let v: f64 = normal.sample(&mut rng);
            draws[[t, 0]] = v;
            draws[[t, 1]] = v;
        }
        let report = normality_proxy(&draws, &[0.0; 2], &[1.0; 2], 1.0).unwrap();
        assert!(report.max_abs_offdiag_corr > 0.999);

        // mean shifted by 5 sigma: marginal KS near 1
        let draws = Array2::from_shape_fn((trials, 1), |_| normal.sample(&mut rng) + 5.0);
        let report = normality_proxy(&draws, &[0.0], &[1.0], 1.0).unwrap();
        assert!(report.marginal_ks[0] > 0.9);

        // degenerate sigma
        assert_eq!(
            normality_proxy(&draws, &[0.0], &[0.0], 1.0),
            Err(StatsError::DegenerateSigma(0))
        );
        // too few trials
        let small = Array2::zeros((10, 1));
        assert!(matches!(
            normality_proxy(&small, &[0.0], &[1.0], 1.0),
            Err(StatsError::TooFewTrials { .. })
        ));
    }

    #[test]
    fn empirical_summary_moments() {
        let s = EmpiricalSummary::from_samples(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.count, 3);
        assert_eq!(s.sorted_samples, vec![1.0, 2.0, 3.0]);
        assert!((s.mean - 2.0).abs() < 1e-15);
        assert!((s.variance - 1.0).abs() < 1e-15);
        let s = s.with_ks(unif).unwrap();
        assert!(s.ks_vs_reference.unwrap() > 0.0);
    }
}
