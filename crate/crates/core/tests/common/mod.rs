//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use gpt_recon::linalg::{CMatrix, CVector, C64};
use rand::Rng;

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Rank of an integer matrix by Gaussian elimination over the rationals.
#[allow(clippy::needless_range_loop)]
pub fn exact_rank(rows: &[Vec<i64>]) -> usize {
    // entries as (numerator, denominator) with denominator > 0
    let mut m: Vec<Vec<(i128, i128)>> = rows.iter().map(|r| r.iter().map(|&x| (x as i128, 1)).collect()).collect();
    let (nr, nc) = (m.len(), m.first().map_or(0, Vec::len));
    let norm = |(n, d): (i128, i128)| {
        let g = gcd(n, d).max(1);
        (n / g, d / g)
    };
    let mut rank = 0;
    for col in 0..nc {
        let Some(p) = (rank..nr).find(|&r| m[r][col].0 != 0) else { continue };
        m.swap(rank, p);
        let (pn, pd) = m[rank][col];
        for r in rank + 1..nr {
            let (an, ad) = m[r][col];
            if an == 0 {
                continue;
            }
            // factor = a / p
            let f = norm((an * pd, ad * pn));
            let f = if f.1 < 0 { (-f.0, -f.1) } else { f };
            for c in col..nc {
                let (xn, xd) = m[rank][c];
                let (yn, yd) = m[r][c];
                let prod = norm((f.0 * xn, f.1 * xd));
                m[r][c] = norm((yn * prod.1 - prod.0 * yd, yd * prod.1));
            }
        }
        rank += 1;
    }
    rank
}

/// Classes of identical rows, each sorted, ordered by first member.
pub fn exact_row_classes(rows: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        match classes.iter_mut().find(|c| rows[c[0]] == *r) {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    classes
}

pub fn transpose(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let nc = rows.first().map_or(0, Vec::len);
    (0..nc).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

/// Random `m×n` table of multiples of `1/den` with `dups` planted duplicate
/// rows and columns.
pub fn planted_table<R: Rng>(rng: &mut R, m: usize, n: usize, den: i64, dups: usize) -> Vec<Vec<i64>> {
    let mut t: Vec<Vec<i64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(0..=den)).collect()).collect();
    for _ in 0..dups {
        if m > 1 {
            let (a, b) = (rng.gen_range(0..m), rng.gen_range(0..m));
            t[b] = t[a].clone();
        }
        if n > 1 {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            for row in t.iter_mut() {
                row[b] = row[a];
            }
        }
    }
    t
}

pub fn to_f64(t: &[Vec<i64>], den: i64) -> Vec<Vec<f64>> {
    t.iter().map(|r| r.iter().map(|&x| x as f64 / den as f64).collect()).collect()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

/// Largest absolute eigenvalue of a Hermitian matrix.
pub fn hermitian_spectral_radius(m: &CMatrix) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Random density matrix `A A† / tr(A A†)` for complex Gaussian-ish `A`.
pub fn random_density<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    let a = CMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let p = &a * a.adjoint();
    let tr = p.trace();
    p / tr
}

/// Random Hermitian matrix with entries in `[-1, 1]`.
pub fn random_hermitian<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    let a = CMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&a + a.adjoint()) * C64::from(0.5)
}

pub fn random_complex_matrix<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Row-major coordinates of a matrix.
pub fn vec_of(m: &CMatrix) -> CVector {
    let d = m.nrows();
    CVector::from_fn(d * d, |k, _| m[(k / d, k % d)])
}

pub fn mat_of(v: &CVector, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

/// `sup |⟨s|e⟩|` over gbit square vertices, written out by hand.
pub fn gbit_effect_norm(e: &CVector) -> f64 {
    let (a, b, c) = (e[0], e[1], e[2]);
    [a, b, c, -a + b + c].iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn real(values: &[f64]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&x| C64::new(x, 0.0)))
}
