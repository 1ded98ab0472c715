//! A short tour: analytic predictions, the exact sampler, the log-domain
//! accumulator, and one verification suite.
//!
//!     cargo run --release --example quick_tour

use mplab::analytic::SpectralProfile;
use mplab::linalg::{ginibre, ProductState};
use mplab::runner::{self, ExperimentConfig, Suite};
use mplab::samplers;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let (n, big_n) = (8usize, 1000usize);
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    // closed-form predictions for the exponents
    let profile = SpectralProfile::new(n, n).unwrap();
    println!("analytic exponents at n = {n}:");
    for (j, (mu, sigma)) in profile.means.iter().zip(profile.sigmas()).enumerate() {
        println!("  lambda_{}: mean {mu:+.4}, sd at N={big_n}: {:.4}", j + 1, sigma / (big_n as f64).sqrt());
    }

    // simulate the product through the overflow-proof accumulator
    let mut state = ProductState::new(n);
    for _ in 0..big_n {
        state.push(&ginibre(n, &mut rng)).unwrap();
    }
    let est = state.lyapunov().unwrap();
    println!("\nsimulated estimates after N = {big_n} factors:");
    for (j, l) in est.log_singular_values_over_n.iter().enumerate() {
        println!("  lambda_{}: {l:+.4}", j + 1);
    }
    println!("orthogonality drift: {:.2e}", state.orthogonality_drift());

    // the same law, three orders of magnitude cheaper
    let pv = samplers::pointwise_vector(n, n, big_n, &mut rng).unwrap();
    let fast = samplers::lambda_hat(&pv);
    println!("\nexact-sampler draw of the same law:");
    for (j, l) in fast.iter().enumerate() {
        println!("  lambda_{}: {l:+.4}", j + 1);
    }

    // run a small verification suite end to end
    let mut config = ExperimentConfig::new(Suite::Normality, 1000, 7);
    config.n = Some(6);
    config.k = Some(3);
    config.big_n = Some(4000);
    config.threads = 2;
    let report = runner::run_suite(&config).unwrap();
    println!("\nnormality suite at n=6, k=3, N=4000:");
    print!("{}", report.console_summary());
}
