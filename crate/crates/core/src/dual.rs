//! The state and effect spans, their coordinates, and the sesquilinear
//! pairing between them.
//!
//! Coordinates are always coefficients with respect to `state_basis` and
//! `effect_basis`. The pairing of coordinate vectors `a` (state) and `b`
//! (effect) is `a^† P b` with `P` the pairing matrix: conjugate-linear in
//! the state slot, linear in the effect slot.

use nalgebra::DMatrix;

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::stats::OperationalStatistics;

/// Relative threshold used when selecting independent rows and columns.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DualPair {
    state_basis: Vec<CVector>,
    effect_basis: Vec<CVector>,
    pairing_matrix: CMatrix,
}

impl DualPair {
    pub fn new(state_basis: Vec<CVector>, effect_basis: Vec<CVector>, pairing_matrix: CMatrix) -> Result<Self> {
        if pairing_matrix.nrows() != state_basis.len() {
            return Err(Error::DimensionMismatch {
                expected: state_basis.len(),
                got: pairing_matrix.nrows(),
            });
        }
        if pairing_matrix.ncols() != effect_basis.len() {
            return Err(Error::DimensionMismatch {
                expected: effect_basis.len(),
                got: pairing_matrix.ncols(),
            });
        }
        Ok(Self { state_basis, effect_basis, pairing_matrix })
    }

    /// Standard bases on both sides with the identity pairing.
    pub fn identity(n: usize) -> Self {
        let basis: Vec<CVector> = (0..n).map(|k| unit_vector(n, k)).collect();
        Self {
            state_basis: basis.clone(),
            effect_basis: basis,
            pairing_matrix: CMatrix::identity(n, n),
        }
    }

    /// Pair whose pairing matrix is the Gram matrix `s_i^† G e_j` of ambient
    /// vectors under an ambient pairing `G`.
    pub fn from_ambient(state_basis: Vec<CVector>, effect_basis: Vec<CVector>, ambient: &CMatrix) -> Result<Self> {
        let p = CMatrix::from_fn(state_basis.len(), effect_basis.len(), |i, j| {
            (state_basis[i].adjoint() * ambient * &effect_basis[j])[(0, 0)]
        });
        Self::new(state_basis, effect_basis, p)
    }

    pub fn state_dim(&self) -> usize {
        self.state_basis.len()
    }

    pub fn effect_dim(&self) -> usize {
        self.effect_basis.len()
    }

    pub fn state_basis(&self) -> &[CVector] {
        &self.state_basis
    }

    pub fn effect_basis(&self) -> &[CVector] {
        &self.effect_basis
    }

    pub fn pairing_matrix(&self) -> &CMatrix {
        &self.pairing_matrix
    }

    /// `⟨ω|E⟩ = ω^† P E`.
    pub fn pairing(&self, state: &CVector, effect: &CVector) -> Result<C64> {
        if state.len() != self.state_dim() {
            return Err(Error::DimensionMismatch { expected: self.state_dim(), got: state.len() });
        }
        if effect.len() != self.effect_dim() {
            return Err(Error::DimensionMismatch { expected: self.effect_dim(), got: effect.len() });
        }
        Ok(self.pairing_unchecked(state, effect))
    }

    pub(crate) fn pairing_unchecked(&self, state: &CVector, effect: &CVector) -> C64 {
        let pe = &self.pairing_matrix * effect;
        state.iter().zip(pe.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// The linear functional `E ↦ ⟨ω|E⟩` as a row of coefficients.
    pub fn state_functional(&self, state: &CVector) -> CVector {
        self.pairing_matrix.transpose() * state.map(|z| z.conj())
    }

    /// No singular value below `tol` times the largest one, and both spans
    /// of equal dimension.
    pub fn check_nondegenerate(&self, tol: f64) -> bool {
        let s = linalg::singular_values(&self.pairing_matrix);
        let full = self.state_dim().min(self.effect_dim());
        match s.first() {
            Some(&top) if top > 0.0 => s.len() == full && s.iter().all(|&x| x > tol * top),
            _ => false,
        }
    }

    /// Ratio of largest to smallest singular value (infinite when singular).
    pub fn condition_number(&self) -> f64 {
        let s = linalg::singular_values(&self.pairing_matrix);
        match (s.first(), s.last()) {
            (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
            _ => f64::INFINITY,
        }
    }
}

pub fn unit_vector(n: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[k] = linalg::ONE;
    v
}

/// Result of embedding a quotiented table.
#[derive(Debug, Clone)]
pub struct EmbeddedTheory {
    pub pair: DualPair,
    pub state_body: ConvexBody,
    pub effect_body: ConvexBody,
    /// Coordinates of every table row.
    pub states: Vec<CVector>,
    /// Coordinates of every table column.
    pub effects: Vec<CVector>,
    /// Table rows used as the state basis.
    pub basis_rows: Vec<usize>,
    /// Table columns used as the effect basis.
    pub basis_cols: Vec<usize>,
}

/// Embeds ensembles and effects of a (quotiented) table into their spans.
///
/// The state basis is the first maximal independent set of rows, the effect
/// basis likewise for columns, and the pairing matrix is the corresponding
/// square block of the table. Every row and column is expressed in those
/// bases, so pairing an embedded row with an embedded column returns the
/// table entry.
pub fn embed_theory(stats: &OperationalStatistics) -> Result<EmbeddedTheory> {
    embed_table(stats.table())
}

pub(crate) fn embed_table(t: &DMatrix<f64>) -> Result<EmbeddedTheory> {
    let rows = linalg::independent_columns(&t.transpose(), RANK_TOLERANCE);
    let cols = linalg::independent_columns(t, RANK_TOLERANCE);
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::RankDeficiency("table spans the zero space".into()));
    }
    if rows.len() != cols.len() {
        return Err(Error::RankDeficiency(format!(
            "row rank {} differs from column rank {}",
            rows.len(),
            cols.len()
        )));
    }
    let r = rows.len();
    let block = DMatrix::from_fn(r, r, |i, j| t[(rows[i], cols[j])]);
    let lu = block.clone().lu();
    let inv = lu
        .try_inverse()
        .ok_or_else(|| Error::RankDeficiency("basis block is singular".into()))?;

    // row k = Σ a_i row_{rows[i]}  ⇒  a = inv^T · t[k, cols]^T
    let states: Vec<CVector> = (0..t.nrows())
        .map(|k| {
            let rhs = DMatrix::from_fn(r, 1, |j, _| t[(k, cols[j])]);
            let a = inv.transpose() * rhs;
            CVector::from_fn(r, |i, _| C64::new(a[(i, 0)], 0.0))
        })
        .collect();
    // column l = Σ b_j col_{cols[j]}  ⇒  b = inv · t[rows, l]
    let effects: Vec<CVector> = (0..t.ncols())
        .map(|l| {
            let rhs = DMatrix::from_fn(r, 1, |i, _| t[(rows[i], l)]);
            let b = &inv * rhs;
            CVector::from_fn(r, |j, _| C64::new(b[(j, 0)], 0.0))
        })
        .collect();

    let state_basis = rows
        .iter()
        .map(|&i| CVector::from_fn(t.ncols(), |j, _| C64::new(t[(i, j)], 0.0)))
        .collect();
    let effect_basis = cols
        .iter()
        .map(|&j| CVector::from_fn(t.nrows(), |i, _| C64::new(t[(i, j)], 0.0)))
        .collect();
    let pair = DualPair::new(state_basis, effect_basis, linalg::complexify(&block))?;
    let state_body = ConvexBody::polytope(states.clone(), 1e-10)?;
    let effect_body = ConvexBody::polytope(effects.clone(), 1e-10)?;
    Ok(EmbeddedTheory {
        pair,
        state_body,
        effect_body,
        states,
        effects,
        basis_rows: rows,
        basis_cols: cols,
    })
}

impl EmbeddedTheory {
    /// Largest deviation between pairings of embedded points and the table.
    pub fn round_trip_residual(&self, t: &DMatrix<f64>) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, s) in self.states.iter().enumerate() {
            let functional = self.pair.state_functional(s);
            for (l, e) in self.effects.iter().enumerate() {
                let v: C64 = functional.iter().zip(e.iter()).map(|(a, b)| a * b).sum();
                worst = worst.max((v - C64::new(t[(k, l)], 0.0)).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_vector;

    fn stats(rows: &[&[f64]]) -> OperationalStatistics {
        OperationalStatistics::unlabeled(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn classical_bit_spans_two_dimensions() {
        let s = stats(&[&[1.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 1.0, 0.0]]);
        let emb = embed_theory(&s).unwrap();
        assert_eq!((emb.pair.state_dim(), emb.pair.effect_dim()), (2, 2));
        assert_eq!(emb.effects.len(), 4);
        assert_eq!(emb.effect_body.vertices().unwrap().len(), 4);
        assert!(emb.round_trip_residual(s.table()) < 1e-12);
    }

    #[test]
    fn one_by_one_table() {
        let emb = embed_theory(&stats(&[&[1.0]])).unwrap();
        assert_eq!(emb.pair.pairing_matrix(), &CMatrix::identity(1, 1));
    }

    #[test]
    fn zero_table_is_rank_deficient() {
        assert!(matches!(
            embed_theory(&stats(&[&[0.0, 0.0], &[0.0, 0.0]])),
            Err(Error::RankDeficiency(_))
        ));
    }

    #[test]
    fn embedded_pairs_reproduce_entries() {
        let s = stats(&[&[0.2, 0.5, 0.9], &[0.4, 0.1, 0.3], &[0.3, 0.3, 0.6]]);
        let emb = embed_theory(&s).unwrap();
        for k in 0..3 {
            for l in 0..3 {
                let v = emb.pair.pairing(&emb.states[k], &emb.effects[l]).unwrap();
                assert!((v.re - s.entry(k, l)).abs() < 1e-12 && v.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn pairing_is_conjugate_linear_in_state_slot() {
        let pair = DualPair::identity(2);
        let w = real_vector(&[0.3, 0.7]);
        let e = real_vector(&[1.0, 0.5]);
        let base = pair.pairing(&w, &e).unwrap();
        let scaled = pair.pairing(&(w.clone() * linalg::I), &e).unwrap();
        assert!((scaled - (-linalg::I) * base).norm() < 1e-15);
        assert_eq!(pair.pairing(&CVector::zeros(2), &e).unwrap(), linalg::ZERO);
        assert!(matches!(
            pair.pairing(&real_vector(&[1.0]), &e),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn nondegeneracy() {
        assert!(DualPair::identity(3).check_nondegenerate(1e-9));
        let mut p = CMatrix::identity(3, 3);
        p[(1, 1)] = linalg::ZERO;
        let b: Vec<CVector> = (0..3).map(|k| unit_vector(3, k)).collect();
        let pair = DualPair::new(b.clone(), b, p).unwrap();
        assert!(!pair.check_nondegenerate(1e-9));
        assert!(pair.condition_number().is_infinite());
    }
}
