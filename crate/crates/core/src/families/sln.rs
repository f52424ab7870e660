//! sl(n+1, ℂ): unitary basis adapted to the splitting sl_n ⊕ ℂI ⊕ s,
//! the diagonal σ_{x,y,z} metric ansatz, its curvature in closed form, the
//! reduced flow fields, the invariant region of the normalized system, and
//! the degenerate limit bracket.
//!
//! Basis layout: generalized Gell-Mann matrices for the embedded sl_n block
//! (all Hermitian, unit trace norm), then I = diag(Id_n, −n)/√(n(n+1)),
//! then r_i = E_{i,n+1} and s_i = E_{n+1,i}. The trace form ⟨X, Y⟩ =
//! tr(XY†) is the identity matrix in this basis.

use crate::algebra::{ComplexLieAlgebra, HermitianMetric};
use crate::error::{Error, Result};
use crate::linalg::{cplx, re, CMatrix};
use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlnBlock {
    /// The embedded sl_n(ℂ) block.
    Sl,
    /// The line ℂI orthogonal to sl_n inside the centralizer of sl_n.
    Center,
    /// The 2n-dimensional span of the r_i and s_i.
    S,
}

/// Basis matrices of sl(m, ℂ) in the adapted order. Unit trace norm,
/// orthonormal for tr(XY†).
pub(crate) fn sl_basis_matrices(m: usize) -> Vec<CMatrix> {
    let n = m - 1;
    let mut basis = Vec::with_capacity(m * m - 1);
    let s2 = 1.0 / 2.0f64.sqrt();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sym = CMatrix::zeros(m, m);
            sym[(i, j)] = re(s2);
            sym[(j, i)] = re(s2);
            basis.push(sym);
            let mut asym = CMatrix::zeros(m, m);
            asym[(i, j)] = cplx(0.0, s2);
            asym[(j, i)] = cplx(0.0, -s2);
            basis.push(asym);
        }
    }
    for k in 1..n {
        let norm = 1.0 / ((k * (k + 1)) as f64).sqrt();
        let mut d = CMatrix::zeros(m, m);
        for a in 0..k {
            d[(a, a)] = re(norm);
        }
        d[(k, k)] = re(-(k as f64) * norm);
        basis.push(d);
    }
    // I
    let norm = 1.0 / ((n * (n + 1)) as f64).sqrt();
    let mut i_mat = CMatrix::zeros(m, m);
    for a in 0..n {
        i_mat[(a, a)] = re(norm);
    }
    i_mat[(n, n)] = re(-(n as f64) * norm);
    basis.push(i_mat);
    // r_i, s_i
    for i in 0..n {
        let mut r = CMatrix::zeros(m, m);
        r[(i, n)] = re(1.0);
        basis.push(r);
    }
    for i in 0..n {
        let mut s = CMatrix::zeros(m, m);
        s[(n, i)] = re(1.0);
        basis.push(s);
    }
    basis
}

fn block_layout(n: usize) -> Vec<SlnBlock> {
    let nsl = n * n - 1;
    let mut blocks = vec![SlnBlock::Sl; nsl];
    blocks.push(SlnBlock::Center);
    blocks.extend(std::iter::repeat_n(SlnBlock::S, 2 * n));
    blocks
}

fn basis_labels(n: usize) -> Vec<String> {
    let nsl = n * n - 1;
    let mut labels: Vec<String> = (1..=nsl).map(|k| format!("u{k}")).collect();
    labels.push("I".into());
    labels.extend((1..=n).map(|i| format!("r{i}")));
    labels.extend((1..=n).map(|i| format!("s{i}")));
    labels
}

/// Structure constants of sl(m, ℂ) in the adapted unitary basis, together
/// with the trace-form metric (the identity matrix in this basis).
pub fn build_sl(m: usize) -> Result<(ComplexLieAlgebra, HermitianMetric)> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "sl(m) needs m >= 2, got {m}"
        )));
    }
    let basis = sl_basis_matrices(m);
    let dim = basis.len();
    let mut slices = vec![CMatrix::zeros(dim, dim); dim];
    for i in 0..dim {
        for j in (i + 1)..dim {
            let comm = &basis[i] * &basis[j] - &basis[j] * &basis[i];
            for (k, b) in basis.iter().enumerate() {
                let coeff = (b.adjoint() * &comm).trace();
                if coeff.norm() > 0.0 {
                    slices[k][(i, j)] = coeff;
                    slices[k][(j, i)] = -coeff;
                }
            }
        }
    }
    let mut alg = ComplexLieAlgebra::new(slices, None)?;
    alg.set_labels(basis_labels(m - 1));
    Ok((alg, HermitianMetric::identity(dim)))
}

/// sl(n+1, ℂ) together with a point (x, y, z) of the diagonal metric
/// ansatz on the blocks (sl_n, ℂI, s).
#[derive(Debug, Clone)]
pub struct SlnAnsatz {
    pub n: usize,
    pub algebra: ComplexLieAlgebra,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    blocks: Vec<SlnBlock>,
}

pub fn sln_ansatz(n: usize, x: f64, y: f64, z: f64) -> Result<SlnAnsatz> {
    if n < 1 {
        return Err(Error::InvalidParameter(format!(
            "ansatz needs n >= 1, got {n}"
        )));
    }
    if x <= 0.0 || y <= 0.0 || z <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "ansatz parameters must be positive, got ({x}, {y}, {z})"
        )));
    }
    let (algebra, _) = build_sl(n + 1)?;
    Ok(SlnAnsatz {
        n,
        algebra,
        x,
        y,
        z,
        blocks: block_layout(n),
    })
}

impl SlnAnsatz {
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn blocks(&self) -> &[SlnBlock] {
        &self.blocks
    }

    pub fn block_of(&self, idx: usize) -> SlnBlock {
        self.blocks[idx]
    }

    /// Matrix of ⟨σ_{x,y,z}·, ·⟩ = diag(x⁻¹ Id, y⁻¹, z⁻¹ Id).
    pub fn sigma_metric(&self) -> HermitianMetric {
        sigma_metric(self.n, self.x, self.y, self.z).expect("validated parameters")
    }
}

/// diag(x⁻¹ on sl_n, y⁻¹ on ℂI, z⁻¹ on s).
pub fn sigma_metric(n: usize, x: f64, y: f64, z: f64) -> Result<HermitianMetric> {
    if x <= 0.0 || y <= 0.0 || z <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sigma metric parameters must be positive, got ({x}, {y}, {z})"
        )));
    }
    let blocks = block_layout(n);
    let diag: Vec<f64> = blocks
        .iter()
        .map(|b| match b {
            SlnBlock::Sl => 1.0 / x,
            SlnBlock::Center => 1.0 / y,
            SlnBlock::S => 1.0 / z,
        })
        .collect();
    HermitianMetric::from_real_diagonal(&diag)
}

/// Block eigenvalues of the curvature operator of ⟨σ_{x,y,z}·, ·⟩ on
/// (sl_n, ℂI, s): (nx + z²/x, (n+1)z²/y, (n+1)((n−1)x + y)/n).
///
/// At n = 1 the sl_n block is empty and the first value is vacuous.
pub fn p_xyz_closed_form(n: usize, x: f64, y: f64, z: f64) -> Result<[f64; 3]> {
    if n < 1 {
        return Err(Error::InvalidParameter("closed form needs n >= 1".into()));
    }
    if x <= 0.0 || y <= 0.0 || z <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "closed form needs positive parameters, got ({x}, {y}, {z})"
        )));
    }
    let nf = n as f64;
    Ok([
        nf * x + z * z / x,
        (nf + 1.0) * z * z / y,
        (nf + 1.0) * ((nf - 1.0) * x + y) / nf,
    ])
}

/// Right-hand side of the metric-parameter system:
/// (ẋ, ẏ, ż) = (nx² + z², (n+1)z², (n+1)z((n−1)x + y)/n).
pub fn xyz_rhs(n: usize) -> impl Fn(&DVector<f64>) -> DVector<f64> + Clone {
    let nf = n as f64;
    move |s: &DVector<f64>| {
        let (x, y, z) = (s[0], s[1], s[2]);
        DVector::from_vec(vec![
            nf * x * x + z * z,
            (nf + 1.0) * z * z,
            z * ((nf + 1.0) * ((nf - 1.0) * x + y)) / nf,
        ])
    }
}

/// Right-hand side of the x ≡ 1 normalized system. Grouped so that both
/// fixed points (1,1) and (0,0) evaluate to exactly (0,0) in floating
/// point.
pub fn yz_rhs(n: usize) -> impl Fn(&DVector<f64>) -> DVector<f64> + Clone {
    let nf = n as f64;
    move |s: &DVector<f64>| {
        let (y, z) = (s[0], s[1]);
        let dy = z * z * (nf + 1.0 - y) - nf * y;
        let dz = z * ((nf + 1.0) * (nf - 1.0 + y) - nf * (nf + z * z)) / nf;
        DVector::from_vec(vec![dy, dz])
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RegionD {
    pub member: bool,
    /// Height of the curved boundary above z: z²(n+1)/(z² + n).
    pub curve_y: f64,
}

/// Membership in the invariant region D = {z²(n+1)/(z²+n) ≤ y < 1}.
pub fn region_d_membership(n: usize, y: f64, z: f64) -> RegionD {
    let nf = n as f64;
    let curve_y = z * z * (nf + 1.0) / (z * z + nf);
    RegionD {
        member: y >= curve_y && y < 1.0,
        curve_y,
    }
}

/// Inner product of the inward normal N = ((n+z²)², −2n(n+1)z) with the
/// field on the curved boundary point above z, returned next to its closed
/// form 2n(n+1)z²(z²−1)²/(n+z²).
pub fn boundary_normal_test(n: usize, z: f64) -> (f64, f64) {
    let nf = n as f64;
    let curve_y = z * z * (nf + 1.0) / (z * z + nf);
    let v = yz_rhs(n)(&DVector::from_vec(vec![curve_y, z]));
    let normal = ((nf + z * z) * (nf + z * z), -2.0 * nf * (nf + 1.0) * z);
    let ip = normal.0 * v[0] + normal.1 * v[1];
    let zz1 = z * z - 1.0;
    let closed = 2.0 * nf * (nf + 1.0) * z * z * zz1 * zz1 / (nf + z * z);
    (ip, closed)
}

/// Limit of z²/y along solutions converging to the origin:
/// (n² − 2)/(n(n + 1)). Needs n ≥ 2 (degenerate below).
pub fn asymptotic_ratio(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "asymptotic ratio needs n >= 2, got {n}"
        )));
    }
    let nf = n as f64;
    Ok((nf * nf - 2.0) / (nf * (nf + 1.0)))
}

fn component_coefficients(
    sl_full: &ComplexLieAlgebra,
    n: usize,
    coeff: impl Fn(SlnBlock, SlnBlock, SlnBlock) -> Complex64,
) -> ComplexLieAlgebra {
    let blocks = block_layout(n);
    let dim = sl_full.dim();
    let mut slices = vec![CMatrix::zeros(dim, dim); dim];
    for k in 0..dim {
        for i in 0..dim {
            for j in 0..dim {
                let c = sl_full.structure_constant(k, i, j);
                if c != Complex64::ZERO {
                    slices[k][(i, j)] = c * coeff(blocks[i], blocks[j], blocks[k]);
                }
            }
        }
    }
    let mut alg = ComplexLieAlgebra::new(slices, None).expect("well-formed tensor");
    alg.set_labels(basis_labels(n));
    alg
}

/// The gauged bracket μ_{y,z} = h_{y,z}·bracket with
/// h_{y,z} = diag(Id, y^{−1/2}, z^{−1/2} Id): full on sl_n∧sl_n and
/// sl_n∧s, √y on ℂI∧s, and on s∧s the sl_n part scaled by z and the ℂI
/// part by z/√y.
pub fn mu_yz(n: usize, y: f64, z: f64) -> Result<ComplexLieAlgebra> {
    if n < 1 {
        return Err(Error::InvalidParameter("mu_yz needs n >= 1".into()));
    }
    if y <= 0.0 || z <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "mu_yz needs positive (y, z), got ({y}, {z})"
        )));
    }
    let (sl_full, _) = build_sl(n + 1)?;
    let sy = y.sqrt();
    Ok(component_coefficients(&sl_full, n, |bi, bj, bk| {
        use SlnBlock::*;
        match (bi, bj) {
            (Sl, Sl) | (Sl, S) | (S, Sl) => re(1.0),
            (Center, S) | (S, Center) => re(sy),
            (S, S) => match bk {
                Sl => re(z),
                Center => re(z / sy),
                S => Complex64::ZERO,
            },
            _ => re(1.0), // brackets between these blocks vanish anyway
        }
    }))
}

/// Degenerate limit of μ_{y,z} along the attractor asymptotics: keeps the
/// sl_n∧sl_n and sl_n∧s components and rescales the ℂI part of s∧s by
/// √((n²−2)/(n(n+1))). The ideal ℂI ⊕ s becomes a Heisenberg algebra.
pub fn mu_infinity(n: usize) -> Result<ComplexLieAlgebra> {
    let ratio = asymptotic_ratio(n)?;
    let (sl_full, _) = build_sl(n + 1)?;
    let coef = ratio.sqrt();
    Ok(component_coefficients(&sl_full, n, |bi, bj, bk| {
        use SlnBlock::*;
        match (bi, bj) {
            (Sl, Sl) | (Sl, S) | (S, Sl) => re(1.0),
            (S, S) if bk == Center => re(coef),
            _ => Complex64::ZERO,
        }
    }))
}
