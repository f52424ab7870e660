//! Constructors for the example algebras: complex Heisenberg algebras,
//! sl(n+1, ℂ) with its three-parameter diagonal ansatz, the degenerate
//! limit bracket, and the perfect semidirect doubles carrying
//! non-algebraic solitons.

mod perfect;
mod sln;

pub use perfect::{
    build_perfect_double, p_nu_ab_closed_form, p_nu_ab_unhalved_variant, PerfectFamily,
    SolitonTableEntry, SOLITON_PARAMETER,
};
pub use sln::{
    asymptotic_ratio, boundary_normal_test, build_sl, mu_infinity, mu_yz, p_xyz_closed_form,
    region_d_membership, sigma_metric, sln_ansatz, xyz_rhs, yz_rhs, RegionD, SlnAnsatz, SlnBlock,
};

use crate::algebra::ComplexLieAlgebra;
use crate::linalg::{re, CMatrix};

/// Complex Heisenberg algebra h_{2m+1}: bracket(X_i, Y_i) = Z, Z central.
pub fn build_heisenberg(m: usize) -> ComplexLieAlgebra {
    assert!(m >= 1, "Heisenberg algebra needs m >= 1");
    let n = 2 * m + 1;
    let mut slices = vec![CMatrix::zeros(n, n); n];
    for i in 0..m {
        slices[2 * m][(i, m + i)] = re(1.0);
        slices[2 * m][(m + i, i)] = re(-1.0);
    }
    let mut labels: Vec<String> = (1..=m).map(|i| format!("X{i}")).collect();
    labels.extend((1..=m).map(|i| format!("Y{i}")));
    labels.push("Z".into());
    let mut alg = ComplexLieAlgebra::new(slices, None).expect("well-formed tensor");
    alg.set_labels(labels);
    alg
}
