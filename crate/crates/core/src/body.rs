//! Convex bodies of states and effects.
//!
//! Polytopes are kept in a minimal vertex representation. The quantum bodies
//! (the Bloch ball of qubit states and the operator interval `0 ≤ E ≤ 1`)
//! carry exact descriptors and live in row-major matrix coordinates.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::linalg::{self, CVector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BodyKind {
    Polytope,
    BlochBall,
    MatrixInterval,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    Polytope { vertices: Vec<CVector> },
    /// Density matrices `(1 + r·σ)/2` with `|r − center| ≤ radius`.
    BlochBall { center: [f64; 3], radius: f64 },
    /// Hermitian `d×d` matrices with `0 ≤ E ≤ 1`.
    MatrixInterval { d: usize },
}

impl ConvexBody {
    /// Convex hull of `points`, reduced to its extreme points.
    pub fn polytope(points: Vec<CVector>, tol: f64) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).ok_or_else(|| {
            Error::InvalidModel("polytope needs at least one point".into())
        })?;
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        let mut unique: Vec<CVector> = Vec::new();
        for p in points {
            if !unique.iter().any(|q| linalg::max_abs(&(q - &p)) <= tol) {
                unique.push(p);
            }
        }
        let mut i = 0;
        while i < unique.len() && unique.len() > 1 {
            let others: Vec<CVector> = unique
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, v)| v.clone())
                .collect();
            if hull_distance(&others, &unique[i]) <= tol {
                unique.remove(i);
            } else {
                i += 1;
            }
        }
        Ok(ConvexBody::Polytope { vertices: unique })
    }

    /// Polytope from a vertex list that is already known to be minimal.
    pub fn from_vertices(vertices: Vec<CVector>) -> Self {
        ConvexBody::Polytope { vertices }
    }

    pub fn qubit_states() -> Self {
        ConvexBody::BlochBall { center: [0.0; 3], radius: 1.0 }
    }

    pub fn kind(&self) -> BodyKind {
        match self {
            ConvexBody::Polytope { .. } => BodyKind::Polytope,
            ConvexBody::BlochBall { .. } => BodyKind::BlochBall,
            ConvexBody::MatrixInterval { .. } => BodyKind::MatrixInterval,
        }
    }

    /// Coordinate dimension of the ambient space.
    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Polytope { vertices } => vertices[0].len(),
            ConvexBody::BlochBall { .. } => 4,
            ConvexBody::MatrixInterval { d } => d * d,
        }
    }

    pub fn vertices(&self) -> Option<&[CVector]> {
        match self {
            ConvexBody::Polytope { vertices } => Some(vertices),
            _ => None,
        }
    }

    /// Matrix size for the matrix-coordinate kinds.
    pub fn matrix_size(&self) -> Option<usize> {
        match self {
            ConvexBody::Polytope { .. } => None,
            ConvexBody::BlochBall { .. } => Some(2),
            ConvexBody::MatrixInterval { d } => Some(*d),
        }
    }

    /// Real-linear generators of the body's real span: the vertices of a
    /// polytope, or a Hermitian matrix basis for the matrix kinds.
    pub fn real_generators(&self) -> Vec<CVector> {
        match self {
            ConvexBody::Polytope { vertices } => vertices.clone(),
            _ => {
                let d = self.matrix_size().unwrap_or(0);
                hermitian_basis(d)
            }
        }
    }
}

/// Basis of the real space of `d×d` Hermitian matrices in row-major coordinates.
pub fn hermitian_basis(d: usize) -> Vec<CVector> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in i..d {
            let mut v = CVector::zeros(d * d);
            if i == j {
                v[i * d + i] = linalg::ONE;
                out.push(v);
            } else {
                v[i * d + j] = linalg::ONE;
                v[j * d + i] = linalg::ONE;
                out.push(v.clone());
                v[i * d + j] = -linalg::I;
                v[j * d + i] = linalg::I;
                out.push(v);
            }
        }
    }
    out
}

/// Convex combination of `points` with `weights`.
pub fn mix(points: &[CVector], weights: &[f64]) -> Result<CVector> {
    if points.is_empty() {
        return Err(Error::Weight("no points to mix".into()));
    }
    if points.len() != weights.len() {
        return Err(Error::Weight(format!(
            "{} weights for {} points",
            weights.len(),
            points.len()
        )));
    }
    if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
        return Err(Error::Weight("weights must be finite and nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Weight(format!("weights sum to {total}")));
    }
    let dim = points[0].len();
    let mut out = CVector::zeros(dim);
    for (p, &w) in points.iter().zip(weights) {
        if p.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        out.axpy(C64::from(w), p, linalg::ONE);
    }
    Ok(out)
}

/// Whether `point` lies in `body` up to `tol`.
pub fn membership(body: &ConvexBody, point: &CVector, tol: f64) -> bool {
    if point.len() != body.dim() {
        return false;
    }
    match body {
        ConvexBody::Polytope { vertices } => hull_distance(vertices, point) <= tol,
        ConvexBody::BlochBall { center, radius } => {
            let rho = linalg::matrix_from_coords(point, 2);
            if !linalg::is_hermitian(&rho, tol) || (rho.trace() - linalg::ONE).norm() > tol {
                return false;
            }
            let r = bloch_vector(&rho);
            let dist = (0..3).map(|k| (r[k] - center[k]).powi(2)).sum::<f64>().sqrt();
            dist <= radius + tol
        }
        ConvexBody::MatrixInterval { d } => {
            let e = linalg::matrix_from_coords(point, *d);
            if !linalg::is_hermitian(&e, tol) {
                return false;
            }
            linalg::hermitian_eigenvalues(&e)
                .iter()
                .all(|&l| l >= -tol && l <= 1.0 + tol)
        }
    }
}

/// Bloch vector `r_k = tr(ρ σ_k)` (real parts).
pub fn bloch_vector(rho: &linalg::CMatrix) -> [f64; 3] {
    let s = linalg::pauli();
    [0, 1, 2].map(|k| (rho * &s[k]).trace().re)
}

/// L1 distance from `point` to the convex hull of `vertices`, solved as a
/// small linear program over real and imaginary parts.
pub fn hull_distance(vertices: &[CVector], point: &CVector) -> f64 {
    if vertices.is_empty() {
        return f64::INFINITY;
    }
    let dim = point.len();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let lambdas: Vec<_> = vertices
        .iter()
        .map(|_| problem.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    let sum: Vec<_> = lambdas.iter().map(|&v| (v, 1.0)).collect();
    problem.add_constraint(&sum, ComparisonOp::Eq, 1.0);
    let has_imag = point.iter().any(|z| z.im != 0.0)
        || vertices.iter().any(|v| v.iter().any(|z| z.im != 0.0));
    let parts: &[fn(&C64) -> f64] = if has_imag {
        &[|z| z.re, |z| z.im]
    } else {
        &[|z| z.re]
    };
    for k in 0..dim {
        for part in parts {
            let plus = problem.add_var(1.0, (0.0, f64::INFINITY));
            let minus = problem.add_var(1.0, (0.0, f64::INFINITY));
            let mut row: Vec<_> = lambdas
                .iter()
                .zip(vertices)
                .map(|(&l, v)| (l, part(&v[k])))
                .collect();
            row.push((plus, 1.0));
            row.push((minus, -1.0));
            problem.add_constraint(&row, ComparisonOp::Eq, part(&point[k]));
        }
    }
    match problem.solve() {
        Ok(sol) => sol.objective().max(0.0),
        Err(_) => f64::INFINITY,
    }
}
