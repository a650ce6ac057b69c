//! Small dense complex linear algebra helpers shared by the modules.

use nalgebra::{DMatrix, DVector};
use std::f64::consts::TAU;

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn real_vector(values: &[f64]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&x| C64::new(x, 0.0)))
}

pub fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

/// Largest absolute entry of a complex vector.
pub fn max_abs(v: &CVector) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_matrix(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Singular values, largest first.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank relative to the largest singular value.
pub fn rank(m: &CMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > rel_tol * top).count(),
        _ => 0,
    }
}

/// Greedy selection of linearly independent columns, lowest index first.
pub fn independent_columns(m: &DMatrix<f64>, rel_tol: f64) -> Vec<usize> {
    let scale = (0..m.ncols())
        .map(|j| m.column(j).norm())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut picked = Vec::new();
    for j in 0..m.ncols() {
        let mut r: DVector<f64> = m.column(j).into_owned();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&r);
                r.axpy(-c, q, 1.0);
            }
        }
        let n = r.norm();
        if n > rel_tol * scale {
            basis.push(r / n);
            picked.push(j);
        }
    }
    picked
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_matrix(&(m - m.adjoint())) <= tol * max_abs_matrix(m).max(1.0)
}

/// Eigenvalues of a Hermitian matrix in ascending order. Only the Hermitian
/// part of the input is used.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    match n {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
            let mean = 0.5 * (a + d);
            let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            vec![mean - r, mean + r]
        }
        _ => {
            let h = hermitian_part(m);
            let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
            ev.sort_by(|a, b| a.total_cmp(b));
            ev
        }
    }
}

/// Eigen-decomposition of a Hermitian matrix: (eigenvalues, eigenvectors as columns).
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitian_part(m).symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Row-major d×d matrix from a coordinate vector of length d².
pub fn matrix_from_coords(v: &CVector, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

pub fn coords_from_matrix(m: &CMatrix) -> CVector {
    let d = m.nrows();
    CVector::from_fn(d * m.ncols(), |k, _| m[(k / d, k % d)])
}

/// Pauli matrices σx, σy, σz.
pub fn pauli() -> [CMatrix; 3] {
    [
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

/// Density matrix (I + r·σ)/2 for a Bloch vector r.
pub fn bloch_density(r: [f64; 3]) -> CMatrix {
    let [sx, sy, sz] = pauli();
    let id = CMatrix::identity(2, 2);
    (id + sx * C64::from(r[0]) + sy * C64::from(r[1]) + sz * C64::from(r[2])) * C64::from(0.5)
}

/// Global maximum of a smooth 2π-periodic function: uniform grid, then
/// golden-section refinement around the best local maxima. The grid always
/// contains 0 and π.
pub fn maximize_periodic<F: Fn(f64) -> f64>(f: F) -> f64 {
    const GRID: usize = 64;
    const REFINE: usize = 4;
    let step = TAU / GRID as f64;
    let values: Vec<f64> = (0..GRID).map(|k| f(k as f64 * step)).collect();
    let mut best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut peaks: Vec<usize> = (0..GRID)
        .filter(|&k| {
            let prev = values[(k + GRID - 1) % GRID];
            let next = values[(k + 1) % GRID];
            values[k] >= prev && values[k] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    peaks.truncate(REFINE);

    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for k in peaks {
        let centre = k as f64 * step;
        let (mut lo, mut hi) = (centre - step, centre + step);
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let mut f1 = f(x1);
        let mut f2 = f(x2);
        while hi - lo > 1e-12 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = f(x1);
            }
        }
        best = best.max(f1).max(f2);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_identity_and_zero() {
        assert_eq!(rank(&CMatrix::identity(3, 3), 1e-12), 3);
        assert_eq!(rank(&CMatrix::zeros(3, 3), 1e-12), 0);
    }

    #[test]
    fn greedy_columns_skip_dependent_ones() {
        let m = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0]);
        assert_eq!(independent_columns(&m, 1e-10), vec![0, 1]);
        let z = DMatrix::<f64>::zeros(2, 2);
        assert!(independent_columns(&z, 1e-10).is_empty());
    }

    #[test]
    fn closed_form_eigenvalues_match_general_route() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.3, 0.0), C64::new(0.2, -0.7), C64::new(0.2, 0.7), C64::new(-1.1, 0.0)],
        );
        let closed = hermitian_eigenvalues(&m);
        let (mut general, _) = hermitian_eigen(&m);
        general.sort_by(|a, b| a.total_cmp(b));
        for (a, b) in closed.iter().zip(&general) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_maximum_of_shifted_cosine() {
        let best = maximize_periodic(|t| (t - 1.234).cos() * 2.5 + 0.1);
        assert!((best - 2.6).abs() < 1e-12);
    }

    #[test]
    fn coords_round_trip() {
        let m = bloch_density([0.1, 0.2, 0.3]);
        let v = coords_from_matrix(&m);
        assert_eq!(matrix_from_coords(&v, 2), m);
        assert!((m.trace().re - 1.0).abs() < 1e-15);
    }
}
