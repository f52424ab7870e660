//! Perfect semidirect doubles h ⋉ h_abelian built over a static base, the
//! ℝ^× ⋉ ℝ gauge orbit ν_{a,b} through the doubled bracket, and closed-form
//! curvature on that orbit.
//!
//! The base (h, μ, ⟨·,·⟩₀) must be static with λ > 0; it is rescaled and
//! gauged so that its curvature operator is the identity. On the double,
//! the orbit brackets are
//!
//! ```text
//!   ν_{a,b}(X⊕0, Y⊕0) = a⁻¹ μ(X,Y) ⊕ 0
//!   ν_{a,b}(X⊕0, 0⊕Y) = 0 ⊕ a⁻¹ μ(X,Y)
//!   ν_{a,b}(0⊕X, 0⊕Y) = −(b²/a) μ(X,Y) ⊕ −(2b/a) μ(X,Y)
//! ```
//!
//! and the curvature of (ν_{a,b}, ⟨·,·⟩) acts block-scalar as
//! a⁻²[[1 + b⁴, 2b³], [2b³, 2 + 4b²]]. Some derivations of this family
//! double every torsion term (summing the Gram series over ordered pairs
//! without the ½); `p_nu_ab_unhalved_variant` keeps that variant around so
//! reports can print both against the numerically computed operator.

use crate::algebra::{is_derivation, ComplexLieAlgebra, GaugeTransform, HermitianMetric};
use crate::curvature::{soliton_check, static_check, SolitonCertificate};
use crate::error::{Error, Result};
use crate::linalg::{re, CMatrix};
use num_complex::Complex64;

/// Orbit parameter t where ν_t := ν_{1,t} is a semi-algebraic soliton with
/// λ = 2 (besides the algebraic point t = 0): the block closed form gives
/// P − 2·Id ∈ span of the symmetrized derivation D_t exactly when
/// 1 + t⁴ = 2.
pub const SOLITON_PARAMETER: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct PerfectFamily {
    base: ComplexLieAlgebra,
    nu: ComplexLieAlgebra,
}

/// Doubles a static base (h, μ, g) into (h, μ′) ⋉ (h, 0) with the product
/// metric, after normalizing so the base curvature operator is the
/// identity. Rejects non-static bases and λ ≤ 0.
pub fn build_perfect_double(
    base: &ComplexLieAlgebra,
    metric: &HermitianMetric,
    tol: f64,
) -> Result<PerfectFamily> {
    let lambda = static_check(base, metric, tol)?.ok_or_else(|| {
        Error::InvalidParameter("perfect double needs a static base metric".into())
    })?;
    if lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "perfect double needs a shrinking static base (λ > 0), got λ = {lambda}"
        )));
    }
    // rescale so P = Id, then gauge the metric to the identity matrix
    let rescaled = metric.scaled(lambda)?;
    let gauge = GaugeTransform::new(rescaled.chol_lower().adjoint())?;
    let normalized = gauge.act_bracket(base)?;
    let check = static_check(&normalized, &HermitianMetric::identity(base.dim()), tol)?;
    match check {
        Some(l) if (l - 1.0).abs() <= 1e-6 => {}
        other => {
            return Err(Error::InvalidParameter(format!(
                "static normalization failed (λ after rescale: {other:?})"
            )))
        }
    }

    let m = normalized.dim();
    let dim = 2 * m;
    let mut slices = vec![CMatrix::zeros(dim, dim); dim];
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let c = normalized.structure_constant(k, i, j);
                if c != Complex64::ZERO {
                    slices[k][(i, j)] = c;
                    slices[m + k][(i, m + j)] = c;
                    slices[m + k][(m + i, j)] = c;
                }
            }
        }
    }
    let mut labels: Vec<String> = (1..=m).map(|i| format!("e{i}")).collect();
    labels.extend((1..=m).map(|i| format!("f{i}")));
    let mut nu = ComplexLieAlgebra::new(slices, None)?;
    nu.set_labels(labels);
    Ok(PerfectFamily {
        base: normalized,
        nu,
    })
}

impl PerfectFamily {
    pub fn base(&self) -> &ComplexLieAlgebra {
        &self.base
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn dim(&self) -> usize {
        self.nu.dim()
    }

    /// The doubled bracket ν = ν_{1,0}.
    pub fn nu(&self) -> &ComplexLieAlgebra {
        &self.nu
    }

    /// Block gauge [[a, b], [0, 1]] ⊗ Id on h ⊕ h.
    pub fn h_ab(&self, a: f64, b: f64) -> Result<GaugeTransform> {
        if a == 0.0 {
            return Err(Error::InvalidParameter("h_ab needs a ≠ 0".into()));
        }
        let m = self.base_dim();
        let dim = 2 * m;
        let mut h = CMatrix::zeros(dim, dim);
        for i in 0..m {
            h[(i, i)] = re(a);
            h[(i, m + i)] = re(b);
            h[(m + i, m + i)] = re(1.0);
        }
        GaugeTransform::new(h)
    }

    /// The flip Id ⊕ (−Id): a unitary automorphism of ν conjugating
    /// ν_{a,−b} to ν_{a,b}.
    pub fn k_flip(&self) -> GaugeTransform {
        let m = self.base_dim();
        let dim = 2 * m;
        GaugeTransform::new(CMatrix::from_fn(dim, dim, |i, j| {
            if i != j {
                Complex64::ZERO
            } else if i < m {
                re(1.0)
            } else {
                re(-1.0)
            }
        }))
        .expect("flip is invertible")
    }

    /// Closed-form orbit bracket; equals `h_ab(a,b).act_bracket(nu)`.
    pub fn nu_ab(&self, a: f64, b: f64) -> Result<ComplexLieAlgebra> {
        if a == 0.0 {
            return Err(Error::InvalidParameter("nu_ab needs a ≠ 0".into()));
        }
        let m = self.base_dim();
        let dim = 2 * m;
        let c_ff = re(1.0 / a);
        let c_ss_first = re(-b * b / a);
        let c_ss_second = re(-2.0 * b / a);
        let mut slices = vec![CMatrix::zeros(dim, dim); dim];
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let c = self.base.structure_constant(k, i, j);
                    if c != Complex64::ZERO {
                        slices[k][(i, j)] = c * c_ff;
                        slices[m + k][(i, m + j)] = c * c_ff;
                        slices[m + k][(m + i, j)] = c * c_ff;
                        slices[k][(m + i, m + j)] = c * c_ss_first;
                        slices[m + k][(m + i, m + j)] = c * c_ss_second;
                    }
                }
            }
        }
        let mut alg = ComplexLieAlgebra::new(slices, None)?;
        if let Some(l) = self.nu.labels() {
            alg.set_labels(l.to_vec());
        }
        Ok(alg)
    }

    /// The derivation D_t = [[0, t], [0, 1]] ⊗ Id of ν_t.
    pub fn d_t(&self, t: f64) -> CMatrix {
        let m = self.base_dim();
        let dim = 2 * m;
        let mut d = CMatrix::zeros(dim, dim);
        for i in 0..m {
            d[(i, m + i)] = re(t);
            d[(m + i, m + i)] = re(1.0);
        }
        d
    }

    /// ‖k·ν_{−t} − ν_t‖, the unitary-equivalence defect of the ±t pair.
    pub fn k_conjugacy_distance(&self, t: f64) -> Result<f64> {
        let k = self.k_flip();
        let moved = k.act_bracket(&self.nu_ab(1.0, -t)?)?;
        moved.distance(&self.nu_ab(1.0, t)?)
    }

    /// Certificates along the orbit at the algebraic point, the historical
    /// candidate parameters ±2^{−1/4}, and the soliton points ±1.
    pub fn soliton_table(&self, tol: f64) -> Result<Vec<SolitonTableEntry>> {
        let quarter = 2.0f64.powf(-0.25);
        let ts = [
            0.0,
            quarter,
            -quarter,
            SOLITON_PARAMETER,
            -SOLITON_PARAMETER,
        ];
        let metric = HermitianMetric::identity(self.dim());
        let mut out = Vec::new();
        for &t in &ts {
            let alg = self.nu_ab(1.0, t)?;
            let certificate = soliton_check(&alg, &metric, tol)?;
            let (_, dt_res) = is_derivation(&alg, &self.d_t(t), tol);
            let block = p_nu_ab_closed_form(1.0, t)?;
            out.push(SolitonTableEntry {
                t,
                block,
                block_trace: block[0][0] + block[1][1],
                block_det: block[0][0] * block[1][1] - block[0][1] * block[1][0],
                dt_derivation_residual: dt_res,
                k_conjugacy_distance: self.k_conjugacy_distance(t)?,
                certificate,
            });
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct SolitonTableEntry {
    pub t: f64,
    pub certificate: SolitonCertificate,
    /// Residual of the canonical derivation D_t on ν_t (zero in theory).
    pub dt_derivation_residual: f64,
    /// Closed-form block curvature at (1, t).
    pub block: [[f64; 2]; 2],
    pub block_trace: f64,
    pub block_det: f64,
    pub k_conjugacy_distance: f64,
}

/// Block curvature of (ν_{a,b}, product metric):
/// a⁻²[[1 + b⁴, 2b³], [2b³, 2 + 4b²]] acting as scalars on h ⊕ h.
pub fn p_nu_ab_closed_form(a: f64, b: f64) -> Result<[[f64; 2]; 2]> {
    if a == 0.0 {
        return Err(Error::InvalidParameter("closed form needs a ≠ 0".into()));
    }
    let s = 1.0 / (a * a);
    Ok([
        [s * (1.0 + b.powi(4)), s * 2.0 * b.powi(3)],
        [s * 2.0 * b.powi(3), s * (2.0 + 4.0 * b * b)],
    ])
}

/// Variant with every torsion term doubled, i.e. the Gram series summed
/// over ordered pairs without the ½. Kept for side-by-side reporting; it
/// does not match the numerical operator.
pub fn p_nu_ab_unhalved_variant(a: f64, b: f64) -> [[f64; 2]; 2] {
    let s = 1.0 / (a * a);
    [
        [s * (1.0 + 2.0 * b.powi(4)), s * 4.0 * b.powi(3)],
        [s * 4.0 * b.powi(3), s * (2.0 + 8.0 * b * b)],
    ]
}
