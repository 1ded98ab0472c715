//! Fault injection: a QR without the positive-diagonal convention breaks
//! the determinant-conservation check with non-finite logs, while the
//! shipped factorization keeps it intact.

use mplab::linalg::{self, qr_positive};
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Householder QR with no sign fixing: R's diagonal carries whatever
/// signs the reflectors produce. Deliberately faulty for this test.
fn qr_unsigned(m: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
    let n = m.nrows();
    let mut r = m.clone();
    let mut q = Array2::<f64>::eye(n);
    for col in 0..n {
        let mut v: Vec<f64> = (col..n).map(|i| r[[i, col]]).collect();
        let alpha = -v[0].signum() * v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for target_col in 0..n {
            let dot: f64 = (col..n).map(|i| v[i - col] * r[[i, target_col]]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in col..n {
                r[[i, target_col]] -= f * v[i - col];
            }
        }
        for target_row in 0..n {
            let dot: f64 = (col..n).map(|i| v[i - col] * q[[target_row, i]]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in col..n {
                q[[target_row, i]] -= f * v[i - col];
            }
        }
    }
    (q, r)
}

#[test]
fn skipping_the_sign_fix_breaks_determinant_conservation() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    // find a draw whose unsigned R has a negative diagonal entry; for a
    // random 6x6 that is the overwhelmingly common case
    let mut candidate = None;
    for _ in 0..16 {
        let a = linalg::ginibre(6, &mut rng);
        let (_, r) = qr_unsigned(&a);
        if (0..6).any(|i| r[[i, i]] < 0.0) {
            candidate = Some((a, r));
            break;
        }
    }
    let (a, r_bad) = candidate.expect("an unsigned QR with a negative diagonal");

    // the faulty path: log of a negative diagonal entry is NaN, so the
    // accumulated "log determinant" can never match the LU route
    let bad_total: f64 = (0..6).map(|i| r_bad[[i, i]].ln()).sum();
    let lu_total = linalg::log_abs_det_lu(&a).unwrap();
    assert!(bad_total.is_nan(), "expected a negative-log failure, got {bad_total}");
    let gap = (bad_total - lu_total).abs();
    assert!(gap.is_nan() || gap > 1e-7, "fault went undetected");

    // the shipped convention keeps the identity
    let (_, r_good) = qr_positive(&a).unwrap();
    let good_total: f64 = (0..6).map(|i| r_good[[i, i]].ln()).sum();
    assert!((good_total - lu_total).abs() <= 1e-9 * lu_total.abs().max(1.0));
}

#[test]
fn unsigned_qr_still_reconstructs() {
    // sanity: the injected fault is only about signs, not about being a
    // valid factorization
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    let a = linalg::ginibre(5, &mut rng);
    let (q, r) = qr_unsigned(&a);
    let back = q.dot(&r);
    let err = (&back - &a).iter().map(|x| x.abs()).fold(0.0, f64::max);
    assert!(err < 1e-12);
}
