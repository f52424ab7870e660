//! The torsion-twisted Chern–Ricci operator of a left-invariant Hermitian
//! metric on a complex Lie group, and soliton certification.
//!
//! For a unitary frame {Z_i} the operator is
//!
//! ```text
//!     P = ½ Σ_i ad_{Z_i} ∘ ad_{Z_i}*       (adjoint w.r.t. the metric)
//! ```
//!
//! equivalently ⟨P u, u⟩ = Σ_{i<j} |⟨bracket(Z_i, Z_j), u⟩|². Both routes
//! are evaluated on every call and must agree; this guards the adjoint
//! plumbing against ill-conditioned metrics.

use crate::algebra::{
    derivation_space, is_derivation, ComplexLieAlgebra, GaugeTransform, HermitianMetric,
};
use crate::error::{Error, Result};
use crate::linalg::{hermitize, re, CMatrix};
use serde::{Deserialize, Serialize};

/// Relative nullspace threshold used when a derivation space is needed
/// internally.
pub const DEFAULT_NULLSPACE_TOL: f64 = 1e-9;

/// Default relative tolerance for certificate verdicts.
pub const DEFAULT_VERDICT_TOL: f64 = 1e-8;

const CROSS_CHECK_REL: f64 = 1e-10;

/// Metric-Hermitian curvature endomorphism together with the metric it is
/// Hermitian against.
#[derive(Debug, Clone)]
pub struct CurvatureOperator {
    p: CMatrix,
    metric: HermitianMetric,
}

impl CurvatureOperator {
    pub fn matrix(&self) -> &CMatrix {
        &self.p
    }

    pub fn metric(&self) -> &HermitianMetric {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    /// Matrix of the bilinear form Θ = H·P (conjugate-symmetric).
    pub fn theta(&self) -> CMatrix {
        hermitize(&(self.metric.matrix() * &self.p))
    }

    pub fn trace(&self) -> f64 {
        self.p.trace().re
    }

    /// Eigenvalues (real, since P is metric-Hermitian), ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let f = self.metric.unitary_frame();
        let lt = self.metric.chol_lower().adjoint();
        let a = lt * &self.p * f;
        crate::linalg::hermitian_eigenvalues(&a)
    }

    /// Eigenvalues divided by the trace, ascending; all-zeros when the
    /// operator vanishes. Invariant under homothety (scaling and
    /// biholomorphic pull-back).
    pub fn signature(&self) -> Vec<f64> {
        let ev = self.eigenvalues();
        let tr: f64 = ev.iter().sum();
        if tr.abs() <= 1e-14 * ev.iter().map(|e| e.abs()).fold(0.0, f64::max).max(1e-300) {
            return vec![0.0; ev.len()];
        }
        ev.into_iter().map(|e| e / tr).collect()
    }
}

/// Torsion-twisted Chern–Ricci operator of (μ, g).
pub fn ttcr_operator(alg: &ComplexLieAlgebra, g: &HermitianMetric) -> Result<CurvatureOperator> {
    let n = alg.dim();
    if g.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g.dim(),
        });
    }
    let frame = g.unitary_frame();

    // route 1: ½ Σ ad_Z ad_Z*
    let mut p = CMatrix::zeros(n, n);
    for i in 0..n {
        let a = alg.ad(&frame.column(i).into_owned())?;
        p += &a * g.adjoint_of(&a);
    }
    p *= re(0.5);

    // route 2: Gram sum Σ_{i<j} m m† H
    let mut p2 = CMatrix::zeros(n, n);
    let h = g.matrix();
    for i in 0..n {
        for j in (i + 1)..n {
            let m = alg.bracket(&frame.column(i).into_owned(), &frame.column(j).into_owned())?;
            p2 += (&m * m.adjoint()) * h;
        }
    }

    let scale = p.norm().max(1.0);
    let diff = (&p - &p2).norm();
    if diff > CROSS_CHECK_REL * scale {
        return Err(Error::CurvatureCrossCheck(diff / scale));
    }

    // project onto the metric-Hermitian part to remove roundoff asymmetry
    let p = (&p + g.adjoint_of(&p)) * re(0.5);
    Ok(CurvatureOperator {
        p,
        metric: g.clone(),
    })
}

/// Matrix of Θ(g) = H·P.
pub fn theta_form(alg: &ComplexLieAlgebra, g: &HermitianMetric) -> Result<CMatrix> {
    Ok(ttcr_operator(alg, g)?.theta())
}

/// λ with Θ(g) = λ g, when P is scalar to relative tolerance `tol`.
pub fn static_check(alg: &ComplexLieAlgebra, g: &HermitianMetric, tol: f64) -> Result<Option<f64>> {
    let op = ttcr_operator(alg, g)?;
    let n = op.dim();
    let normp = op.matrix().norm();
    if normp == 0.0 {
        return Ok(Some(0.0));
    }
    let lambda = op.trace() / n as f64;
    let dev = (op.matrix() - CMatrix::identity(n, n) * re(lambda)).norm();
    if dev / normp <= tol {
        Ok(Some(lambda))
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolitonVerdict {
    Static,
    Algebraic,
    SemiAlgebraic,
    None,
}

impl std::fmt::Display for SolitonVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolitonVerdict::Static => "static",
            SolitonVerdict::Algebraic => "algebraic",
            SolitonVerdict::SemiAlgebraic => "semi_algebraic",
            SolitonVerdict::None => "none",
        };
        f.write_str(s)
    }
}

/// Sign of λ in P = λ·Id + ½(D + D*): the self-similar solution scales by
/// (1 − λt), so λ > 0 shrinks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingClass {
    Shrinking,
    Expanding,
    Steady,
}

#[derive(Debug, Clone)]
pub struct SolitonCertificate {
    pub verdict: SolitonVerdict,
    pub lambda: f64,
    /// Minimum-norm witness derivation (zero for static certificates).
    pub d: CMatrix,
    /// Relative residual ‖P − λId − ½(D + D*)‖/‖P‖ of the decomposition.
    pub residual: f64,
    /// Derivation residual of D*/‖D*‖ (scale-free).
    pub dstar_residual: f64,
    pub dstar_is_derivation: bool,
    pub scaling: ScalingClass,
    pub tol: f64,
}

/// Decides whether P = λ·Id + ½(D + D*) for some derivation D by real-linear
/// least squares over (λ, Der-coefficients), with the minimum-norm witness.
///
/// The verdict is `semi_algebraic` when the relative residual is within
/// `tol`, upgraded to `algebraic` when D* (normalized) is itself a
/// derivation, and to `static` when the D-component is negligible.
pub fn soliton_check(
    alg: &ComplexLieAlgebra,
    g: &HermitianMetric,
    tol: f64,
) -> Result<SolitonCertificate> {
    let n = alg.dim();
    let op = ttcr_operator(alg, g)?;
    let p = op.matrix().clone();
    let normp = p.norm();

    if normp == 0.0 {
        return Ok(SolitonCertificate {
            verdict: SolitonVerdict::Static,
            lambda: 0.0,
            d: CMatrix::zeros(n, n),
            residual: 0.0,
            dstar_residual: 0.0,
            dstar_is_derivation: true,
            scaling: ScalingClass::Steady,
            tol,
        });
    }

    // static inputs need no derivation space: P = λ·Id already solves the
    // decomposition with D = 0, which is exactly what the least squares
    // would return
    let lambda0 = op.trace() / n as f64;
    let static_residual = (&p - CMatrix::identity(n, n) * re(lambda0)).norm() / normp;
    if static_residual <= tol {
        return Ok(SolitonCertificate {
            verdict: SolitonVerdict::Static,
            lambda: lambda0,
            d: CMatrix::zeros(n, n),
            residual: static_residual,
            dstar_residual: 0.0,
            dstar_is_derivation: true,
            scaling: if lambda0 > 0.0 {
                ScalingClass::Shrinking
            } else if lambda0 < 0.0 {
                ScalingClass::Expanding
            } else {
                ScalingClass::Steady
            },
            tol,
        });
    }

    let der = derivation_space(alg, DEFAULT_NULLSPACE_TOL);
    let dd = der.dim();

    // columns of the real-linear system: vec(Id), then the symmetrized
    // basis directions S(B) and S(iB) with S(X) = ½(X + X*)
    let nn = n * n;
    let mut a = nalgebra::DMatrix::<f64>::zeros(2 * nn, 1 + 2 * dd);
    let mut fill = |col: usize, m: &CMatrix| {
        for i in 0..n {
            for j in 0..n {
                let z = m[(i, j)];
                a[(i * n + j, col)] = z.re;
                a[(nn + i * n + j, col)] = z.im;
            }
        }
    };
    let id = CMatrix::identity(n, n);
    fill(0, &id);
    for (k, b) in der.basis.iter().enumerate() {
        let sb = (b + g.adjoint_of(b)) * re(0.5);
        fill(1 + k, &sb);
        let ib = b * crate::linalg::cplx(0.0, 1.0);
        let sib = (&ib + g.adjoint_of(&ib)) * re(0.5);
        fill(1 + dd + k, &sib);
    }
    let mut rhs = nalgebra::DVector::<f64>::zeros(2 * nn);
    for i in 0..n {
        for j in 0..n {
            rhs[i * n + j] = p[(i, j)].re;
            rhs[nn + i * n + j] = p[(i, j)].im;
        }
    }
    let sol = crate::linalg::lstsq_min_norm(&a, &rhs, 1e-12);
    let lambda = sol[0];
    let mut d = CMatrix::zeros(n, n);
    for (k, b) in der.basis.iter().enumerate() {
        d += b * crate::linalg::cplx(sol[1 + k], sol[1 + dd + k]);
    }

    let sym = (&d + g.adjoint_of(&d)) * re(0.5);
    let residual = (&p - &id * re(lambda) - sym).norm() / normp;
    let normd = d.norm();
    let dstar = g.adjoint_of(&d);
    let dstar_residual = if normd == 0.0 {
        0.0
    } else {
        let dstar_unit = &dstar * re(1.0 / dstar.norm());
        is_derivation(alg, &dstar_unit, tol).1
    };
    let dstar_is_derivation = dstar_residual <= tol;

    let lambda_scale = normp / (n as f64).sqrt();
    let scaling = if lambda.abs() <= tol * lambda_scale {
        ScalingClass::Steady
    } else if lambda > 0.0 {
        ScalingClass::Shrinking
    } else {
        ScalingClass::Expanding
    };

    let verdict = if residual > tol {
        SolitonVerdict::None
    } else if normd <= tol * normp {
        SolitonVerdict::Static
    } else if dstar_is_derivation {
        SolitonVerdict::Algebraic
    } else {
        SolitonVerdict::SemiAlgebraic
    };
    let d = if verdict == SolitonVerdict::Static {
        CMatrix::zeros(n, n)
    } else {
        d
    };

    Ok(SolitonCertificate {
        verdict,
        lambda,
        d,
        residual,
        dstar_residual,
        dstar_is_derivation,
        scaling,
        tol,
    })
}

/// Relative defect of h·P(μ, g)·h⁻¹ = P(h·μ, h·g).
pub fn gauge_equivariance_check(
    alg: &ComplexLieAlgebra,
    g: &HermitianMetric,
    h: &GaugeTransform,
) -> Result<f64> {
    let p = ttcr_operator(alg, g)?;
    let lhs = h.conjugate(p.matrix());
    let moved = ttcr_operator(&h.act_bracket(alg)?, &h.act_metric(g)?)?;
    let scale = p.matrix().norm();
    let diff = (lhs - moved.matrix()).norm();
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

/// Trace-normalized spectrum of P, a homothety invariant.
pub fn homothety_signature(alg: &ComplexLieAlgebra, g: &HermitianMetric) -> Result<Vec<f64>> {
    Ok(ttcr_operator(alg, g)?.signature())
}

/// Residual of the defining decomposition for a *given* derivation witness;
/// used to validate externally supplied certificates.
pub fn decomposition_residual(op: &CurvatureOperator, lambda: f64, d: &CMatrix) -> f64 {
    let n = op.dim();
    let sym = (d + op.metric().adjoint_of(d)) * re(0.5);
    let r = (op.matrix() - CMatrix::identity(n, n) * re(lambda) - sym).norm();
    let scale = op.matrix().norm();
    if scale == 0.0 {
        r
    } else {
        r / scale
    }
}
