//! Complex metric Lie algebras given by structure constants, the gauge
//! action of GL(g) on brackets and metrics, derivation algebras, and
//! unitary frames.
//!
//! Everything is complex-linear: an n-dimensional complex Lie algebra is a
//! dense tensor `c[k][i][j]` with `bracket(e_i, e_j) = Σ_k c[k][i][j] e_k`,
//! antisymmetric in (i, j). A Hermitian inner product is a positive
//! definite matrix H with ⟨u, v⟩ = v† H u.

use crate::error::{Error, Result};
use crate::linalg::{hermitize, re, CMatrix, CVector};
use num_complex::Complex64;

/// Complex Lie algebra (or candidate: antisymmetry is enforced, the Jacobi
/// identity is checked on demand) on ℂⁿ via structure constants.
#[derive(Debug, Clone)]
pub struct ComplexLieAlgebra {
    dim: usize,
    /// `slices[k][(i, j)]` is the e_k-coefficient of bracket(e_i, e_j).
    slices: Vec<CMatrix>,
    labels: Option<Vec<String>>,
}

impl ComplexLieAlgebra {
    /// Builds an algebra from per-output-coordinate slices, projecting each
    /// slice onto its antisymmetric part so that `c[k][i][j] = -c[k][j][i]`
    /// holds exactly.
    pub fn new(slices: Vec<CMatrix>, labels: Option<Vec<String>>) -> Result<Self> {
        let dim = slices.len();
        for s in &slices {
            if s.nrows() != dim || s.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.nrows().max(s.ncols()),
                });
            }
        }
        if let Some(ref l) = labels {
            if l.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: l.len(),
                });
            }
        }
        let slices = slices
            .into_iter()
            .map(|s| {
                let t = s.transpose();
                (s - t) * re(0.5)
            })
            .collect();
        Ok(Self {
            dim,
            slices,
            labels,
        })
    }

    /// The abelian algebra: zero bracket.
    pub fn abelian(dim: usize) -> Self {
        Self {
            dim,
            slices: vec![CMatrix::zeros(dim, dim); dim],
            labels: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.dim);
        self.labels = Some(labels);
    }

    pub fn structure_constant(&self, k: usize, i: usize, j: usize) -> Complex64 {
        self.slices[k][(i, j)]
    }

    /// bracket(e_i, e_j) as a coefficient vector.
    pub fn bracket_basis(&self, i: usize, j: usize) -> CVector {
        CVector::from_fn(self.dim, |k, _| self.slices[k][(i, j)])
    }

    /// Bilinear bracket of two coefficient vectors.
    pub fn bracket(&self, u: &CVector, v: &CVector) -> Result<CVector> {
        self.check_dim(u.len())?;
        self.check_dim(v.len())?;
        let mut out = CVector::zeros(self.dim);
        for k in 0..self.dim {
            // u^T S_k v (plain bilinear contraction, no conjugation)
            out[k] = self.slices[k].tr_mul(u).dot(v);
        }
        Ok(out)
    }

    /// Matrix of ad_v = bracket(v, ·).
    pub fn ad(&self, v: &CVector) -> Result<CMatrix> {
        self.check_dim(v.len())?;
        let mut a = CMatrix::zeros(self.dim, self.dim);
        for k in 0..self.dim {
            // row k of ad_v: sum_i c[k][i][j] v_i
            let row = self.slices[k].tr_mul(v);
            for j in 0..self.dim {
                a[(k, j)] = row[j];
            }
        }
        Ok(a)
    }

    /// ad of the i-th basis vector.
    pub fn ad_basis(&self, i: usize) -> CMatrix {
        CMatrix::from_fn(self.dim, self.dim, |k, j| self.slices[k][(i, j)])
    }

    /// Worst cyclic-sum norm over basis triples; zero iff Jacobi holds.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let ads: Vec<CMatrix> = (0..n).map(|i| self.ad_basis(i)).collect();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let cyc = &ads[i] * self.bracket_basis(j, k)
                        + &ads[j] * self.bracket_basis(k, i)
                        + &ads[k] * self.bracket_basis(i, j);
                    worst = worst.max(cyc.norm());
                }
            }
        }
        worst
    }

    /// Errors unless the Jacobi residual is within `tol`.
    pub fn verify(&self, tol: f64) -> Result<()> {
        let residual = self.jacobi_residual();
        if residual > tol {
            return Err(Error::NotALieBracket { residual, tol });
        }
        Ok(())
    }

    /// Frobenius norm of the structure tensor.
    pub fn norm(&self) -> f64 {
        self.slices
            .iter()
            .map(|s| s.norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius distance between structure tensors of equal dimension.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_dim(other.dim)?;
        let d2: f64 = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|(a, b)| (a - b).norm_squared())
            .sum();
        Ok(d2.sqrt())
    }

    /// Structure tensor scaled by a complex factor (s·μ, not a gauge image).
    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            slices: self.slices.iter().map(|m| m * s).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Normalized to unit Frobenius norm; `None` for the zero bracket.
    pub fn unit_normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n == 0.0 {
            None
        } else {
            Some(self.scaled(re(1.0 / n)))
        }
    }

    /// Rank of the flattened image of the bracket, i.e. dim of [g, g].
    pub fn derived_algebra_rank(&self, tol: f64) -> usize {
        let n = self.dim;
        let mut cols = CMatrix::zeros(n, n * (n - 1) / 2);
        let mut c = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                cols.set_column(c, &self.bracket_basis(i, j));
                c += 1;
            }
        }
        crate::linalg::rank(&cols, tol)
    }

    pub fn is_perfect(&self, tol: f64) -> bool {
        self.derived_algebra_rank(tol) == self.dim
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got,
            });
        }
        Ok(())
    }
}

/// π(A)μ = Aμ(·,·) − μ(A·,·) − μ(·,A·), the infinitesimal gauge action,
/// returned as tensor slices.
pub fn pi_apply(alg: &ComplexLieAlgebra, a: &CMatrix) -> Vec<CMatrix> {
    let n = alg.dim();
    let mut out = vec![CMatrix::zeros(n, n); n];
    for (k, slot) in out.iter_mut().enumerate() {
        // first term: sum_l A[k][l] S_l
        for (l, s) in alg.slices.iter().enumerate() {
            let akl = a[(k, l)];
            if akl != Complex64::ZERO {
                *slot += s * akl;
            }
        }
        // second: -S_k(A·, ·) = -A^T S_k ; third: -S_k(·, A·) = -S_k A
        *slot -= a.transpose() * &alg.slices[k];
        *slot -= &alg.slices[k] * a;
    }
    out
}

pub fn pi_apply_norm(alg: &ComplexLieAlgebra, a: &CMatrix) -> f64 {
    pi_apply(alg, a)
        .iter()
        .map(|m| m.norm_squared())
        .sum::<f64>()
        .sqrt()
}

/// Relative residual ‖π(D)μ‖/‖μ‖ and the verdict at `tol`.
pub fn is_derivation(alg: &ComplexLieAlgebra, d: &CMatrix, tol: f64) -> (bool, f64) {
    let nmu = alg.norm();
    if nmu == 0.0 {
        return (true, 0.0);
    }
    let r = pi_apply_norm(alg, d) / nmu;
    (r <= tol, r)
}

/// Invertible complex-linear change of basis acting on brackets and metrics.
#[derive(Debug, Clone)]
pub struct GaugeTransform {
    h: CMatrix,
    hinv: CMatrix,
}

impl GaugeTransform {
    pub fn new(h: CMatrix) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::DimensionMismatch {
                expected: h.nrows(),
                got: h.ncols(),
            });
        }
        let lu = h.clone().lu();
        let det = lu.determinant().norm();
        if !det.is_finite() || det < 1e-300 {
            return Err(Error::SingularGauge(det));
        }
        let hinv = lu.try_inverse().ok_or(Error::SingularGauge(det))?;
        Ok(Self { h, hinv })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            h: CMatrix::identity(dim, dim),
            hinv: CMatrix::identity(dim, dim),
        }
    }

    pub fn scaling(dim: usize, s: Complex64) -> Result<Self> {
        Self::new(CMatrix::identity(dim, dim) * s)
    }

    pub fn from_diagonal(d: &[Complex64]) -> Result<Self> {
        let n = d.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                d[i]
            } else {
                Complex64::ZERO
            }
        }))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.h
    }

    pub fn inverse_matrix(&self) -> &CMatrix {
        &self.hinv
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    /// Composition (self ∘ other) as gauge transforms.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            h: &self.h * &other.h,
            hinv: &other.hinv * &self.hinv,
        }
    }

    /// h·μ = hμ(h⁻¹·, h⁻¹·).
    pub fn act_bracket(&self, alg: &ComplexLieAlgebra) -> Result<ComplexLieAlgebra> {
        if alg.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: alg.dim(),
            });
        }
        let n = alg.dim();
        // contract input slots with h^{-1}
        let mid: Vec<CMatrix> = alg
            .slices
            .iter()
            .map(|s| self.hinv.transpose() * s * &self.hinv)
            .collect();
        // mix output coordinate with h
        let mut slices = vec![CMatrix::zeros(n, n); n];
        for (k, slice) in slices.iter_mut().enumerate() {
            for (l, m) in mid.iter().enumerate() {
                let hkl = self.h[(k, l)];
                if hkl != Complex64::ZERO {
                    *slice += m * hkl;
                }
            }
        }
        ComplexLieAlgebra::new(slices, alg.labels.clone())
    }

    /// h·k = k(h⁻¹·, h⁻¹·): H ↦ (h⁻¹)† H h⁻¹.
    pub fn act_metric(&self, g: &HermitianMetric) -> Result<HermitianMetric> {
        if g.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: g.dim(),
            });
        }
        HermitianMetric::new(self.hinv.adjoint() * g.matrix() * &self.hinv)
    }

    /// Adjoint action on endomorphisms: A ↦ h A h⁻¹.
    pub fn conjugate(&self, a: &CMatrix) -> CMatrix {
        &self.h * a * &self.hinv
    }
}

/// Positive definite Hermitian inner product, ⟨u, v⟩ = v† H u.
#[derive(Debug, Clone)]
pub struct HermitianMetric {
    h: CMatrix,
    /// Lower Cholesky factor, H = L L†.
    chol_l: CMatrix,
}

impl HermitianMetric {
    /// Accepts any matrix whose Hermitian part is positive definite; the
    /// anti-Hermitian part must be at roundoff level.
    pub fn new(h: CMatrix) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::DimensionMismatch {
                expected: h.nrows(),
                got: h.ncols(),
            });
        }
        let skew = (&h - h.adjoint()).norm();
        let scale = h.norm().max(1e-300);
        if skew > 1e-10 * scale {
            return Err(Error::NotPositiveDefinite(format!(
                "matrix is not Hermitian: ‖H − H†‖/‖H‖ = {:.3e}",
                skew / scale
            )));
        }
        let sym = hermitize(&h);
        // nalgebra's complex Cholesky does not reject indefinite input
        // (it takes square roots of negative pivots), so gate on the
        // spectrum first.
        let ev = crate::linalg::hermitian_eigenvalues(&sym);
        let min_eig = ev.first().copied().unwrap_or(f64::NAN);
        if !min_eig.is_finite() || min_eig <= 0.0 {
            return Err(Error::NotPositiveDefinite(format!(
                "minimum eigenvalue {min_eig:.3e}"
            )));
        }
        match sym.clone().cholesky() {
            Some(ch) => Ok(Self {
                h: sym,
                chol_l: ch.l(),
            }),
            None => Err(Error::NotPositiveDefinite(format!(
                "Cholesky breakdown despite minimum eigenvalue {min_eig:.3e}"
            ))),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            h: CMatrix::identity(dim, dim),
            chol_l: CMatrix::identity(dim, dim),
        }
    }

    pub fn from_real_diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                re(d[i])
            } else {
                Complex64::ZERO
            }
        }))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn chol_lower(&self) -> &CMatrix {
        &self.chol_l
    }

    /// ⟨u, v⟩ = v† H u.
    pub fn inner(&self, u: &CVector, v: &CVector) -> Complex64 {
        (v.adjoint() * &self.h * u)[(0, 0)]
    }

    pub fn norm_of(&self, u: &CVector) -> f64 {
        self.inner(u, u).re.max(0.0).sqrt()
    }

    /// Columns Z_i with ⟨Z_i, Z_j⟩ = δ_ij, the inverse adjoint of the lower
    /// Cholesky factor. Deterministic.
    pub fn unitary_frame(&self) -> CMatrix {
        let n = self.dim();
        let lt = self.chol_l.adjoint();
        lt.solve_upper_triangular(&CMatrix::identity(n, n))
            .expect("Cholesky factor is invertible")
    }

    /// The metric adjoint A* = H⁻¹ A† H.
    pub fn adjoint_of(&self, a: &CMatrix) -> CMatrix {
        let rhs = a.adjoint() * &self.h;
        let y = self
            .chol_l
            .solve_lower_triangular(&rhs)
            .expect("Cholesky factor is invertible");
        self.chol_l
            .adjoint()
            .solve_upper_triangular(&y)
            .expect("Cholesky factor is invertible")
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if c <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "metric scale must be positive, got {c}"
            )));
        }
        Self::new(&self.h * re(c))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        crate::linalg::hermitian_eigenvalues(&self.h)[0]
    }
}

/// Orthonormal basis (Frobenius inner product) of Der(g, μ).
#[derive(Debug, Clone)]
pub struct DerivationSpace {
    pub basis: Vec<CMatrix>,
    pub tol_used: f64,
}

impl DerivationSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonal projection of `m` onto the span, with relative residual.
    pub fn project(&self, m: &CMatrix) -> (CMatrix, f64) {
        let n = m.nrows();
        let mut proj = CMatrix::zeros(n, n);
        for b in &self.basis {
            // Frobenius inner product <m, b> = tr(b† m)
            let coeff = (b.adjoint() * m).trace();
            proj += b * coeff;
        }
        let scale = m.norm();
        let rel = if scale == 0.0 {
            0.0
        } else {
            (m - &proj).norm() / scale
        };
        (proj, rel)
    }

    pub fn contains(&self, m: &CMatrix, tol: f64) -> bool {
        self.project(m).1 <= tol
    }
}

/// Null space of D ↦ π(D)μ by singular-value thresholding at `tol`
/// relative to the largest singular value.
///
/// π(D)μ is antisymmetric in the two input slots, so only the i < j rows
/// of the constraint matrix are kept (this scales every singular value by
/// the same √2 and leaves the relative thresholding untouched). The cost
/// is one SVD of an (n·n(n−1)/2) × n² matrix; algebras up to a few dozen
/// dimensions are fine, beyond that this is the expensive call.
pub fn derivation_space(alg: &ComplexLieAlgebra, tol: f64) -> DerivationSpace {
    let n = alg.dim();
    // row index of the constraint (k, i, j), i < j
    let pair = |i: usize, j: usize| i * n - i * (i + 1) / 2 + (j - i - 1);
    let npairs = n * (n - 1) / 2;
    let row = |k: usize, i: usize, j: usize| k * npairs + pair(i, j);
    // columns indexed by (p, q) for D = E_{pq}:
    // [L(E_pq)]^k_{ij} = δ_{kp} c^q_{ij} − c^k_{pj} δ_{iq} − c^k_{ip} δ_{jq}
    let mut m = CMatrix::zeros(n * npairs, n * n);
    for p in 0..n {
        for q in 0..n {
            let col = p * n + q;
            for i in 0..n {
                for j in (i + 1)..n {
                    // δ_{kp} c^q_{ij}
                    m[(row(p, i, j), col)] += alg.slices[q][(i, j)];
                }
            }
            for k in 0..n {
                for j in 0..n {
                    // i = q slot: −c^k_{pj}
                    if q < j {
                        m[(row(k, q, j), col)] -= alg.slices[k][(p, j)];
                    }
                }
                for i in 0..n {
                    // j = q slot: −c^k_{ip}
                    if i < q {
                        m[(row(k, i, q), col)] -= alg.slices[k][(i, p)];
                    }
                }
            }
        }
    }
    let ns = crate::linalg::nullspace(&m, tol);
    let basis = ns
        .into_iter()
        .map(|v| CMatrix::from_fn(n, n, |i, j| v[i * n + j]))
        .collect();
    DerivationSpace {
        basis,
        tol_used: tol,
    }
}
