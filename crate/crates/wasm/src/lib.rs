//! Browser bindings for the matrix-product spectral laboratory: the
//! triangle-law explorer, analytic spectral profiles, and small-ball
//! ratio sampling, exposed to a single static page.
//!
//! Heavy simulation stays out; the exact chi-squared sampler gives the
//! same laws at a browser-friendly cost.

use mplab::analytic::SpectralProfile;
use mplab::samplers;
use mplab::stats;
use mplab::wedge;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// One draw of the empirical squared-singular-value law
/// `{exp(2 lambda_i)}` plus its KS distance to the uniform limit.
#[wasm_bindgen]
pub struct TriangleSample {
    values: Vec<f64>,
    ks: f64,
}

#[wasm_bindgen]
impl TriangleSample {
    /// Sorted squared normalized singular-value estimates in [0, ~1].
    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    /// KS distance of the sample to the uniform distribution on [0,1].
    #[wasm_bindgen(getter)]
    pub fn ks(&self) -> f64 {
        self.ks
    }
}

/// Samples all n exponent estimates of an n x n product of `big_n`
/// Gaussian factors (exact in law via the chi-squared decomposition) and
/// returns the squared normalized singular values.
#[wasm_bindgen]
pub fn triangle_sample(n: usize, big_n: usize, seed: u64) -> Result<TriangleSample, JsValue> {
    if !(1..=2048).contains(&n) || !(1..=65536).contains(&big_n) {
        return Err(err("need 1 <= n <= 2048 and 1 <= N <= 65536"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pv = samplers::pointwise_vector(n, n, big_n, &mut rng).map_err(err)?;
    let lambda = samplers::lambda_hat(&pv);
    let mut values: Vec<f64> = lambda.iter().map(|l| (2.0 * l).exp()).collect();
    values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
    let ks = stats::ks_one_sample(&values, |t| t.clamp(0.0, 1.0)).map_err(err)?;
    Ok(TriangleSample { values, ks })
}

/// Analytic means and standard deviations of the per-index exponent
/// estimates at size n.
#[wasm_bindgen]
pub struct ProfileCurves {
    means: Vec<f64>,
    sigmas: Vec<f64>,
}

#[wasm_bindgen]
impl ProfileCurves {
    /// `mu_{n,k}` for k = 1..n (nats).
    #[wasm_bindgen(getter)]
    pub fn means(&self) -> Vec<f64> {
        self.means.clone()
    }

    /// `sigma_{n,k}` for k = 1..n (nats).
    #[wasm_bindgen(getter)]
    pub fn sigmas(&self) -> Vec<f64> {
        self.sigmas.clone()
    }
}

/// Closed-form exponent profile at size n.
#[wasm_bindgen]
pub fn spectral_profile(n: usize) -> Result<ProfileCurves, JsValue> {
    if !(1..=4096).contains(&n) {
        return Err(err("need 1 <= n <= 4096"));
    }
    let profile = SpectralProfile::new(n, n).map_err(err)?;
    Ok(ProfileCurves { means: profile.means.clone(), sigmas: profile.sigmas() })
}

/// Sorted draws of the normalized projection-volume ratio
/// `(det(G_k G_k*)/det(G G*))^{1/2k}`; its small-ball exponent is k/2.
#[wasm_bindgen]
pub fn small_ball_samples(
    n: usize,
    k: usize,
    draws: usize,
    seed: u64,
) -> Result<Vec<f64>, JsValue> {
    if k < 1 || k > n || n > 256 {
        return Err(err("need 1 <= k <= n <= 256"));
    }
    if !(1..=2_000_000).contains(&draws) {
        return Err(err("need 1 <= draws <= 2e6"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kf = k as f64;
    let mut out = Vec::with_capacity(draws);
    for _ in 0..draws {
        let log_ratio = wedge::small_ball_log_ratio(n, k, &mut rng).map_err(err)?;
        out.push((log_ratio / kf).exp());
    }
    out.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
    Ok(out)
}
