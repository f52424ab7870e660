//! Shared fixtures for the kernel benchmarks.

use hcf_core::families::{build_sl, mu_infinity};
use hcf_core::{ComplexLieAlgebra, HermitianMetric};

pub fn sl_with_trace(m: usize) -> (ComplexLieAlgebra, HermitianMetric) {
    build_sl(m).expect("m >= 2")
}

pub fn limit_bracket(n: usize) -> (ComplexLieAlgebra, HermitianMetric) {
    let alg = mu_infinity(n).expect("n >= 2");
    let id = HermitianMetric::identity(alg.dim());
    (alg, id)
}
