//! Seeded random data for tests, property sweeps and experiments.
//!
//! Everything is driven by an explicit ChaCha8 stream so that any artifact
//! is reproducible from its recorded seed.

use crate::algebra::{GaugeTransform, HermitianMetric};
use crate::linalg::{cplx, re, CMatrix, CVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The stream type used everywhere; deterministic across platforms.
pub type Stream = ChaCha8Rng;

pub fn rng(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut Stream, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> num_complex::Complex64 {
    cplx(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| random_complex(rng))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| random_complex(rng))
}

/// Well-conditioned gauge transform Id + spread·G. For spread ≤ 0.5 the
/// condition number stays modest, which keeps curvature comparisons near
/// machine precision.
pub fn random_gauge(rng: &mut ChaCha8Rng, n: usize, spread: f64) -> GaugeTransform {
    loop {
        let g = CMatrix::identity(n, n) + random_matrix(rng, n) * re(spread / (n as f64).sqrt());
        if let Ok(h) = GaugeTransform::new(g) {
            return h;
        }
    }
}

/// Random positive definite metric A†A with A = Id + spread·G.
pub fn random_metric(rng: &mut ChaCha8Rng, n: usize, spread: f64) -> HermitianMetric {
    loop {
        let a = CMatrix::identity(n, n) + random_matrix(rng, n) * re(spread / (n as f64).sqrt());
        if let Ok(m) = HermitianMetric::new(a.adjoint() * &a) {
            return m;
        }
    }
}
