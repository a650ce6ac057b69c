//! Involutions, pairing adjoints, supports and the C*-identity.

use crate::algebra::{AlgebraModel, Product, Side};
use crate::body::ConvexBody;
use crate::dual::{unit_vector, DualPair};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::report::{Stage, StageResult, Verdict, Witness, WitnessElement};
use crate::sampling;

/// Scale-relative residual accepted by the algebraic involution laws.
pub const INVOLUTION_TOLERANCE: f64 = 1e-12;

/// Antilinear map `x ↦ M·conj(x)` on effect coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Involution {
    matrix: CMatrix,
}

impl Involution {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), got: matrix.ncols() });
        }
        Ok(Self { matrix })
    }

    /// Entrywise conjugation.
    pub fn identity(n: usize) -> Self {
        Self { matrix: CMatrix::identity(n, n) }
    }

    /// `X ↦ X†` in row-major `d×d` coordinates.
    pub fn conjugate_transpose(d: usize) -> Self {
        let n = d * d;
        let mut m = CMatrix::zeros(n, n);
        for i in 0..d {
            for j in 0..d {
                m[(i * d + j, j * d + i)] = linalg::ONE;
            }
        }
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        &self.matrix * x.map(|z| z.conj())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarAlgebraModel {
    base: AlgebraModel,
    involution: Involution,
}

impl StarAlgebraModel {
    pub fn new(base: AlgebraModel, involution: Involution) -> Result<Self> {
        if involution.dim() != base.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), got: involution.dim() });
        }
        let n = base.dim();
        let residual = (0..n)
            .map(|k| {
                let e = unit_vector(n, k);
                linalg::max_abs(&(involution.apply(&involution.apply(&e)) - e))
            })
            .fold(0.0, f64::max);
        if residual > INVOLUTION_TOLERANCE {
            return Err(Error::InvalidModel(format!("involution is not of order two: {residual:.3e}")));
        }
        Ok(Self { base, involution })
    }

    pub fn base(&self) -> &AlgebraModel {
        &self.base
    }

    pub fn involution(&self) -> &Involution {
        &self.involution
    }

    pub fn with_tol(&self, tol: f64) -> Self {
        Self { base: self.base.with_tol(tol), involution: self.involution.clone() }
    }

    pub fn star(&self, x: &CVector) -> CVector {
        self.involution.apply(x)
    }

    pub fn pair(&self) -> &DualPair {
        self.base.engine().pair()
    }

    pub fn adjoint(&self, op: &PairingOperator) -> Result<PairingOperator> {
        adjoint(self.pair(), op)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    States,
    Effects,
}

/// Linear operator on state or effect coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingOperator {
    pub acts_on: Space,
    pub matrix: CMatrix,
}

impl PairingOperator {
    pub fn on_effects(matrix: CMatrix) -> Self {
        Self { acts_on: Space::Effects, matrix }
    }

    pub fn on_states(matrix: CMatrix) -> Self {
        Self { acts_on: Space::States, matrix }
    }
}

/// The operator on the other side of the pairing:
/// `⟨T†ω|E⟩ = ⟨ω|TE⟩` for effect operators, and the reverse for state
/// operators, so applying it twice returns the input.
pub fn adjoint(pair: &DualPair, op: &PairingOperator) -> Result<PairingOperator> {
    let p = pair.pairing_matrix();
    if !p.is_square() {
        return Err(Error::DegeneratePairing(format!(
            "pairing matrix is {}×{}",
            p.nrows(),
            p.ncols()
        )));
    }
    let n = p.nrows();
    if op.matrix.nrows() != n || op.matrix.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: op.matrix.nrows() });
    }
    if !pair.check_nondegenerate(1e-12) {
        return Err(Error::DegeneratePairing("pairing matrix is singular".into()));
    }
    let p_inv = p
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::DegeneratePairing("pairing matrix is singular".into()))?;
    Ok(match op.acts_on {
        // ω^† A^† P E = ω^† P T E
        Space::Effects => PairingOperator::on_states((p * &op.matrix * &p_inv).adjoint()),
        Space::States => PairingOperator::on_effects(&p_inv * op.matrix.adjoint() * p),
    })
}

fn random_elements<R: rand::Rng>(model: &StarAlgebraModel, rng: &mut R, count: usize) -> Vec<CVector> {
    let gens = model.base.engine().effect_body().real_generators();
    (0..count).map(|_| sampling::complex_combination(rng, &gens)).collect()
}

struct Residuals {
    worst: f64,
    witness: Option<Witness>,
}

impl Residuals {
    fn record(&mut self, relation: &str, residual: f64, scale: f64, elements: Vec<WitnessElement>) {
        let r = residual / scale.max(1.0);
        if r > self.worst {
            self.worst = r;
            if r > INVOLUTION_TOLERANCE {
                self.witness = Some(Witness { relation: relation.into(), elements, lhs: residual, rhs: 0.0 });
            }
        }
    }
}

/// Antilinearity, `(TS)* = S*T*` and `T** = T` on elements, the same laws
/// for the pairing adjoint on operators, and `adjoint(L_T) = L_{T*}` when
/// the pairing is the coordinate identity.
pub fn check_involution_laws(model: &StarAlgebraModel, samples: usize, seed: u64) -> Result<StageResult> {
    let mut rng = sampling::rng(seed);
    let n = model.base.dim();
    let mut res = Residuals { worst: 0.0, witness: None };
    let p = model.pair().pairing_matrix();
    let coordinate_pairing = p.is_square() && linalg::max_abs_matrix(&(p - CMatrix::identity(n, n))) == 0.0;
    let with_adjoint = adjoint(model.pair(), &PairingOperator::on_effects(CMatrix::identity(n, n))).is_ok();

    for k in 0..samples.max(1) {
        let mut els = random_elements(model, &mut rng, 2);
        let (s, mut t) = (els.pop().unwrap(), els.pop().unwrap());
        let (mut lambda, mu) = (sampling::complex_scalar(&mut rng, 2.0), sampling::complex_scalar(&mut rng, 2.0));
        if k == 0 {
            t = model.base.unit().clone();
            lambda = linalg::I;
        }
        let (ts, ss) = (model.star(&t), model.star(&s));
        let scale = linalg::max_abs(&t).max(linalg::max_abs(&s)).powi(2) * (1.0 + lambda.norm() + mu.norm());
        let pair_els = || vec![WitnessElement::new("T", &t), WitnessElement::new("S", &s)];

        let lhs = model.star(&(&t * lambda + &s * mu));
        let rhs = &ts * lambda.conj() + &ss * mu.conj();
        res.record("(λT+μS)* = λ̄T* + μ̄S*", linalg::max_abs(&(lhs - rhs)), scale, pair_els());

        let lhs = model.star(&model.base.mul(&t, &s));
        let rhs = model.base.mul(&ss, &ts);
        res.record("(TS)* = S*T*", linalg::max_abs(&(lhs - rhs)), scale, pair_els());

        res.record("T** = T", linalg::max_abs(&(model.star(&ts) - &t)), scale, pair_els());

        if with_adjoint {
            let a = model.base.mult_operator(Side::Left, &t)?.matrix;
            let b = model.base.mult_operator(Side::Right, &s)?.matrix;
            let adj = |m: &CMatrix| adjoint(model.pair(), &PairingOperator::on_effects(m.clone())).map(|o| o.matrix);
            let op_scale = linalg::max_abs_matrix(&a).max(linalg::max_abs_matrix(&b)).powi(2)
                * (1.0 + lambda.norm() + mu.norm())
                * model.pair().condition_number().min(1e6);
            let lhs = adj(&(&a * lambda + &b * mu))?;
            let rhs = adj(&a)? * lambda.conj() + adj(&b)? * mu.conj();
            res.record("adjoint antilinear", linalg::max_abs_matrix(&(lhs - rhs)), op_scale, pair_els());
            let lhs = adj(&(&a * &b))?;
            let rhs = adj(&b)? * adj(&a)?;
            res.record("adjoint(AB) = adjoint(B)·adjoint(A)", linalg::max_abs_matrix(&(lhs - rhs)), op_scale, pair_els());
            let back = adjoint(model.pair(), &PairingOperator::on_states(adj(&a)?))?.matrix;
            res.record("adjoint(adjoint(A)) = A", linalg::max_abs_matrix(&(back - &a)), op_scale, pair_els());
            if coordinate_pairing {
                let l_star = model.base.mult_operator(Side::Left, &ts)?.matrix;
                res.record("adjoint(L_T) = L_{T*}", linalg::max_abs_matrix(&(adj(&a)? - l_star)), op_scale, pair_els());
            }
        }
    }
    let mut r = StageResult::new(Stage::Involution, Verdict::from_pass(res.witness.is_none()), res.worst)
        .with_witness(res.witness);
    if !with_adjoint {
        r = r.note("pairing adjoint unavailable: operator-level laws skipped");
    } else if !coordinate_pairing {
        r = r.note("pairing is not the coordinate identity: adjoint(L_T) = L_{T*} skipped");
    }
    Ok(r)
}

/// `‖T*T‖ = ‖T‖²` on structured and random self-adjoint-span probes.
pub fn check_cstar_identity(model: &StarAlgebraModel, samples: usize, seed: u64) -> StageResult {
    let alg = &model.base;
    let tol = alg.tol();
    let mut worst: (f64, Option<Witness>) = (0.0, None);
    for t in alg.probe_elements(samples, seed) {
        let lhs = alg.effect_norm(&alg.mul(&model.star(&t), &t));
        let rhs = alg.effect_norm(&t).powi(2);
        let r = (lhs - rhs).abs() / rhs.max(1.0);
        if r > worst.0 {
            worst.0 = r;
            if r > tol {
                worst.1 = Some(Witness {
                    relation: "‖T*T‖ = ‖T‖²".into(),
                    elements: vec![WitnessElement::new("T", &t)],
                    lhs,
                    rhs,
                });
            }
        }
    }
    StageResult::new(Stage::CStarIdentity, Verdict::from_pass(worst.1.is_none()), worst.0).with_witness(worst.1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportResult {
    pub state: CVector,
    pub projection: CVector,
    pub state_norm_value: f64,
    pub effect_norm_value: f64,
}

/// Smallest projection `P` leaving the statistics of `state` unchanged,
/// `⟨ρ|P·E·P⟩ = ⟨ρ|E⟩`.
///
/// Matrix models use the range projection of the density matrix. Polytope
/// models search the projections among the effect-body vertices.
pub fn support_projection(model: &StarAlgebraModel, state: &CVector) -> Result<SupportResult> {
    let alg = &model.base;
    let engine = alg.engine();
    let pair = engine.pair();
    if state.len() != pair.state_dim() {
        return Err(Error::DimensionMismatch { expected: pair.state_dim(), got: state.len() });
    }
    let projection = match (alg.product(), engine.effect_body()) {
        (Product::Matrix { d }, ConvexBody::MatrixInterval { .. }) => range_projection(state, *d, alg.tol()),
        (_, ConvexBody::Polytope { vertices }) => lattice_support(alg, vertices, state)?,
        _ => return Err(Error::UnsupportedModel("no support construction for this model".into())),
    };
    Ok(SupportResult {
        state: state.clone(),
        state_norm_value: engine.state_norm(state)?,
        effect_norm_value: engine.effect_norm(&projection)?,
        projection,
    })
}

fn range_projection(state: &CVector, d: usize, tol: f64) -> CVector {
    let rho = linalg::hermitian_part(&linalg::matrix_from_coords(state, d));
    let (values, vectors) = linalg::hermitian_eigen(&rho);
    let top = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut p = CMatrix::zeros(d, d);
    for (k, &v) in values.iter().enumerate() {
        if v.abs() > tol * top.max(f64::MIN_POSITIVE) {
            let col = vectors.column(k);
            p += col * col.adjoint();
        }
    }
    linalg::coords_from_matrix(&p)
}

fn lattice_support(alg: &AlgebraModel, vertices: &[CVector], state: &CVector) -> Result<CVector> {
    let tol = alg.tol();
    let pair = alg.engine().pair();
    let n = alg.dim();
    let mut candidates = vec![alg.unit().clone()];
    candidates.extend(alg.detect_projections(vertices, tol));
    let keeps_statistics = |p: &CVector| {
        (0..n).all(|j| {
            let e = unit_vector(n, j);
            let corner = alg.mul(&alg.mul(p, &e), p);
            let scale = pair.pairing_unchecked(state, &e).norm().max(1.0);
            (pair.pairing_unchecked(state, &corner) - pair.pairing_unchecked(state, &e)).norm() <= tol * scale
        })
    };
    let valid: Vec<CVector> = candidates.into_iter().filter(|p| keeps_statistics(p)).collect();
    let below = |p: &CVector, q: &CVector| linalg::max_abs(&(alg.mul(p, q) - p)) <= tol;
    let minimal = valid
        .iter()
        .find(|p| valid.iter().all(|q| below(p, q)))
        .or_else(|| {
            // no least element: fall back to the valid projection with the fewest comparable elements above it
            valid.iter().min_by_key(|p| valid.iter().filter(|q| below(p, q)).count())
        })
        .cloned();
    minimal.ok_or_else(|| Error::UnsupportedModel("no projection preserves the state".into()))
}

/// `‖ρ‖ = ‖E_ρ‖` for each state.
pub fn support_stage(model: &StarAlgebraModel, states: &[CVector]) -> Result<StageResult> {
    let tol = model.base.tol();
    let mut worst = 0.0;
    let mut witness = None;
    for s in states {
        let r = support_projection(model, s)?;
        let dev = (r.state_norm_value - r.effect_norm_value).abs();
        if dev > tol * r.state_norm_value.max(1.0) && dev >= worst {
            witness = Some(Witness {
                relation: "‖ρ‖ = ‖E_ρ‖".into(),
                elements: vec![WitnessElement::new("rho", s), WitnessElement::new("E_rho", &r.projection)],
                lhs: r.state_norm_value,
                rhs: r.effect_norm_value,
            });
        }
        worst = f64::max(worst, dev);
    }
    Ok(StageResult::new(Stage::SupportNormEquality, Verdict::from_pass(witness.is_none()), worst)
        .with_witness(witness)
        .detail("states", states.len() as f64))
}

/// `dim A_* = dim A` and a nondegenerate pairing between them.
pub fn check_predual_duality(model: &StarAlgebraModel) -> StageResult {
    let pair = model.pair();
    let (sd, ad) = (pair.state_dim(), model.base.dim());
    let nondegenerate = pair.check_nondegenerate(model.base.tol());
    let residual = sd.abs_diff(ad) as f64 + if nondegenerate { 0.0 } else { 1.0 };
    StageResult::new(Stage::PredualDuality, Verdict::from_pass(sd == ad && nondegenerate), residual)
        .detail("state_dim", sd as f64)
        .detail("algebra_dim", ad as f64)
        .detail("condition_number", pair.condition_number())
}

/// Pure states along the six Bloch axes followed by `count` random states.
pub fn qubit_probe_states(count: usize, seed: u64) -> Vec<CVector> {
    let mut out: Vec<CVector> = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        .iter()
        .flat_map(|r: &[f64; 3]| [*r, r.map(|x| -x)])
        .map(|r| linalg::coords_from_matrix(&linalg::bloch_density(r)))
        .collect();
    out.push(linalg::coords_from_matrix(&(CMatrix::identity(2, 2) * C64::from(0.5))));
    let mut rng = sampling::rng(seed);
    out.extend((0..count).map(|_| linalg::coords_from_matrix(&sampling::qubit_state(&mut rng))));
    out
}
