//! Spectral laboratory for products of iid Gaussian (Ginibre) matrices:
//! overflow-proof log-domain product accumulation, exact chi-squared
//! samplers for pointwise log-norm statistics, closed-form analytic
//! predictors, and a reproducible Monte Carlo verification harness.

pub mod analytic;
pub mod linalg;
pub mod samplers;
pub mod stats;
pub mod wedge;
pub mod runner;
