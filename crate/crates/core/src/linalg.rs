//! Small helpers on dense complex matrices shared by the algebra and
//! curvature layers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// ½(M + M†), exact projection onto the Hermitian part.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * re(0.5)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.norm()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let sym = hermitize(m).symmetric_eigen();
    let mut ev: Vec<f64> = sym.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Right null space of `m` at a relative singular-value threshold.
///
/// Returns an orthonormal set of vectors v with ‖Mv‖ ≤ tol·σ_max.
/// A zero matrix has a full null space.
pub fn nullspace(m: &CMatrix, tol: f64) -> Vec<CVector> {
    let ncols = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd requested v_t");
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut out = Vec::new();
    for i in 0..ncols {
        let sigma = if i < svd.singular_values.len() {
            svd.singular_values[i]
        } else {
            0.0
        };
        if smax == 0.0 || sigma <= tol * smax {
            out.push(v_t.row(i).adjoint());
        }
    }
    out
}

/// Numerical rank at a relative singular-value threshold.
pub fn rank(m: &CMatrix, tol: f64) -> usize {
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    if smax == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > tol * smax)
        .count()
}

/// Minimum-norm least-squares solution of the real system `a x = b`.
pub fn lstsq_min_norm(a: &DMatrix<f64>, b: &DVector<f64>, rcond: f64) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    svd.solve(b, rcond).expect("svd solve")
}

/// Condition number estimate from extreme singular values.
pub fn condition_number(m: &CMatrix) -> f64 {
    let svd = m.clone().svd(false, false);
    let mut smin = f64::INFINITY;
    let mut smax = 0.0f64;
    for &s in svd.singular_values.iter() {
        smin = smin.min(s);
        smax = smax.max(s);
    }
    if smin == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Row-major packing of a complex matrix as (re, im) pairs.
pub fn matrix_to_pairs(m: &CMatrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

pub fn pairs_to_matrix(dim: usize, entries: &[[f64; 2]]) -> Option<CMatrix> {
    if entries.len() != dim * dim {
        return None;
    }
    Some(CMatrix::from_fn(dim, dim, |i, j| {
        let e = entries[i * dim + j];
        cplx(e[0], e[1])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_zero_matrix_is_everything() {
        let m = CMatrix::zeros(4, 3);
        let ns = nullspace(&m, 1e-9);
        assert_eq!(ns.len(), 3);
    }

    #[test]
    fn nullspace_detects_rank_deficiency() {
        // columns: c0, c1, c0 + c1
        let m = CMatrix::from_fn(3, 3, |i, j| match j {
            0 => re((i == 0) as u8 as f64),
            1 => re((i == 1) as u8 as f64),
            _ => re((i != 2) as u8 as f64),
        });
        let ns = nullspace(&m, 1e-12);
        assert_eq!(ns.len(), 1);
        assert!((&m * &ns[0]).norm() < 1e-12);
    }

    #[test]
    fn hermitian_eigenvalues_sorted() {
        let m = CMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                re(if i == 0 { 3.0 } else { -1.0 })
            } else {
                cplx(0.0, if i < j { 1.0 } else { -1.0 })
            }
        });
        let ev = hermitian_eigenvalues(&m);
        assert!(ev[0] <= ev[1]);
        assert!((ev[0] + ev[1] - 2.0).abs() < 1e-12);
    }
}
