//! Seeded random elements used by the axiom batteries.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{self, CMatrix, CVector, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Real combination of generators with coefficients uniform in `[-1, 1]`.
pub fn real_combination<R: Rng>(rng: &mut R, generators: &[CVector]) -> CVector {
    let dim = generators[0].len();
    let mut out = CVector::zeros(dim);
    for g in generators {
        let c: f64 = rng.gen_range(-1.0..=1.0);
        out.axpy(C64::from(c), g, linalg::ONE);
    }
    out
}

/// Complex combination of generators, real and imaginary parts uniform in `[-1, 1]`.
pub fn complex_combination<R: Rng>(rng: &mut R, generators: &[CVector]) -> CVector {
    let dim = generators[0].len();
    let mut out = CVector::zeros(dim);
    for g in generators {
        out.axpy(complex_scalar(rng, 1.0), g, linalg::ONE);
    }
    out
}

pub fn complex_scalar<R: Rng>(rng: &mut R, scale: f64) -> C64 {
    C64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale))
}

pub fn complex_matrix<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| complex_scalar(rng, 1.0))
}

/// Uniformly distributed point on the unit sphere in R^3.
pub fn unit_vector3<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [0; 3].map(|_| StandardNormal.sample(rng));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            return v.map(|x| x / n);
        }
    }
}

/// Qubit density matrix with Bloch vector uniform in the unit ball.
pub fn qubit_state<R: Rng>(rng: &mut R) -> CMatrix {
    let dir = unit_vector3(rng);
    let r = rng.gen::<f64>().cbrt();
    linalg::bloch_density(dir.map(|x| x * r))
}

pub fn pure_qubit_state<R: Rng>(rng: &mut R) -> CMatrix {
    linalg::bloch_density(unit_vector3(rng))
}

/// Qubit effect `0 ≤ E ≤ 1` with eigenvalues uniform in `[0, 1]`.
pub fn qubit_effect<R: Rng>(rng: &mut R) -> CMatrix {
    let (a, b): (f64, f64) = (rng.gen(), rng.gen());
    let dir = unit_vector3(rng);
    // E = (a+b)/2 · 1 + (a−b)/2 · n·σ
    let p = linalg::bloch_density(dir);
    let q = CMatrix::identity(2, 2) - &p;
    p * C64::from(a) + q * C64::from(b)
}
