//! Shared test oracle: curvature from the quadratic-form route with an
//! eigendecomposition frame. Independent of the library's Cholesky frame
//! and adjoint-sum implementation.

use hcf_core::linalg::{re, CMatrix};
use hcf_core::{ComplexLieAlgebra, HermitianMetric};

/// P from ⟨Pu, u⟩ = Σ_{i<j} |⟨bracket(Z_i, Z_j), u⟩|² with the frame
/// Z = H^{-1/2} built from the spectral decomposition of H.
pub fn oracle_curvature(alg: &ComplexLieAlgebra, metric: &HermitianMetric) -> CMatrix {
    let h = metric.matrix();
    let n = h.nrows();
    let eig = h.clone().symmetric_eigen();
    // H^{-1/2} = U diag(1/sqrt(λ)) U†
    let mut d = CMatrix::zeros(n, n);
    for i in 0..n {
        let ev: f64 = eig.eigenvalues[i];
        assert!(ev > 0.0, "oracle needs a positive definite metric");
        d[(i, i)] = re(1.0 / ev.sqrt());
    }
    let frame = &eig.eigenvectors * d * eig.eigenvectors.adjoint();
    let mut p = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let m = alg
                .bracket(&frame.column(i).into_owned(), &frame.column(j).into_owned())
                .expect("dims agree");
            p += (&m * m.adjoint()) * h;
        }
    }
    p
}

/// Relative Frobenius deviation of two operators.
pub fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = a.norm().max(b.norm()).max(1e-300);
    (a - b).norm() / scale
}
