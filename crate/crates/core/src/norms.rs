//! Sup-norms on effects and states.
//!
//! `‖E‖ = sup_{ω∈𝔖} |⟨ω|E⟩|` and `‖ω‖ = sup_{E∈𝔈} |⟨ω|E⟩|`. Each supremum
//! is of a convex function of an affine argument, so over a polytope it is
//! attained at a vertex. For the quantum bodies it has a closed form
//! reduced to a one-parameter maximization over a phase.

use crate::body::ConvexBody;
use crate::dual::DualPair;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::report::{Stage, StageResult, Verdict, Witness, WitnessElement};
use crate::sampling;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Accepted deviation of the unit effect's norm from 1.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-12;

/// `a ≤ b` up to `tol`, relative once `|b| > 1`.
pub fn leq_tol(a: f64, b: f64, tol: f64) -> bool {
    a <= b + tol * b.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEngine {
    pair: DualPair,
    state_body: ConvexBody,
    effect_body: ConvexBody,
    tol: f64,
}

impl NormEngine {
    pub fn new(pair: DualPair, state_body: ConvexBody, effect_body: ConvexBody, tol: f64) -> Result<Self> {
        if state_body.dim() != pair.state_dim() {
            return Err(Error::DimensionMismatch { expected: pair.state_dim(), got: state_body.dim() });
        }
        if effect_body.dim() != pair.effect_dim() {
            return Err(Error::DimensionMismatch { expected: pair.effect_dim(), got: effect_body.dim() });
        }
        let matrix_body = state_body.matrix_size().is_some() || effect_body.matrix_size().is_some();
        if matrix_body {
            let p = pair.pairing_matrix();
            let id = CMatrix::identity(p.nrows(), p.ncols());
            if !p.is_square() || linalg::max_abs_matrix(&(p - id)) > 1e-12 {
                return Err(Error::UnsupportedModel(
                    "matrix bodies need matrix coordinates with the trace pairing".into(),
                ));
            }
        }
        if matches!(state_body, ConvexBody::MatrixInterval { .. }) {
            return Err(Error::UnsupportedModel("operator interval as state body".into()));
        }
        if matches!(effect_body, ConvexBody::BlochBall { .. }) {
            return Err(Error::UnsupportedModel("Bloch ball as effect body".into()));
        }
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self { pair, state_body, effect_body, tol })
    }

    pub fn pair(&self) -> &DualPair {
        &self.pair
    }

    pub fn state_body(&self) -> &ConvexBody {
        &self.state_body
    }

    pub fn effect_body(&self) -> &ConvexBody {
        &self.effect_body
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(&self, tol: f64) -> Self {
        Self { tol, ..self.clone() }
    }

    /// `sup_{ω∈𝔖} |⟨ω|E⟩|`.
    pub fn effect_norm(&self, effect: &CVector) -> Result<f64> {
        if effect.len() != self.pair.effect_dim() {
            return Err(Error::DimensionMismatch { expected: self.pair.effect_dim(), got: effect.len() });
        }
        Ok(match &self.state_body {
            ConvexBody::Polytope { vertices } => vertices
                .iter()
                .map(|v| self.pair.pairing_unchecked(v, effect).norm())
                .fold(0.0, f64::max),
            ConvexBody::BlochBall { center, radius } => bloch_ball_sup(effect, *center, *radius),
            ConvexBody::MatrixInterval { .. } => unreachable!("rejected at construction"),
        })
    }

    /// `sup_{E∈𝔈} |⟨ω|E⟩|`.
    pub fn state_norm(&self, state: &CVector) -> Result<f64> {
        if state.len() != self.pair.state_dim() {
            return Err(Error::DimensionMismatch { expected: self.pair.state_dim(), got: state.len() });
        }
        Ok(match &self.effect_body {
            ConvexBody::Polytope { vertices } => {
                let f = self.pair.state_functional(state);
                vertices
                    .iter()
                    .map(|v| f.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<C64>().norm())
                    .fold(0.0, f64::max)
            }
            ConvexBody::MatrixInterval { d } => operator_interval_sup(state, *d),
            ConvexBody::BlochBall { .. } => unreachable!("rejected at construction"),
        })
    }
}

/// `sup |e0 + r·e|` over real `r` with `|r − c| ≤ R`, where
/// `E = e0·1 + Σ e_k σ_k`.
fn bloch_ball_sup(effect: &CVector, center: [f64; 3], radius: f64) -> f64 {
    let m = linalg::matrix_from_coords(effect, 2);
    let sigma = linalg::pauli();
    let e0 = m.trace() * 0.5;
    let e: [C64; 3] = [0, 1, 2].map(|k| (&m * &sigma[k]).trace() * 0.5);
    let z0 = e0 + e[0] * center[0] + e[1] * center[1] + e[2] * center[2];
    if e.iter().all(|x| x.im == 0.0) && z0.im == 0.0 {
        let len = e.iter().map(|x| x.re * x.re).sum::<f64>().sqrt();
        return z0.re.abs() + radius * len;
    }
    linalg::maximize_periodic(|t| {
        let phase = C64::from_polar(1.0, -t);
        let shifted = (phase * z0).re;
        let dir = e.map(|x| (phase * x).re);
        shifted + radius * (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt()
    })
}

/// `sup_{0≤E≤1} |tr(W† E)|` for the state matrix `W`.
fn operator_interval_sup(state: &CVector, d: usize) -> f64 {
    let w_dag = linalg::matrix_from_coords(state, d).adjoint();
    let positive_sum = |h: &CMatrix| -> f64 {
        linalg::hermitian_eigenvalues(h).iter().filter(|&&l| l > 0.0).sum()
    };
    if linalg::is_hermitian(&w_dag, 0.0) {
        let ev = linalg::hermitian_eigenvalues(&w_dag);
        let pos: f64 = ev.iter().filter(|&&l| l > 0.0).sum();
        let neg: f64 = -ev.iter().filter(|&&l| l < 0.0).sum::<f64>();
        return pos.max(neg);
    }
    linalg::maximize_periodic(|t| {
        let h = linalg::hermitian_part(&(&w_dag * C64::from_polar(1.0, t)));
        positive_sum(&h)
    })
}

struct Worst {
    excess: f64,
    witness: Option<Witness>,
}

impl Worst {
    fn new() -> Self {
        Self { excess: 0.0, witness: None }
    }

    fn offer(&mut self, excess: f64, make: impl FnOnce() -> Witness) {
        if excess > self.excess {
            self.excess = excess;
            self.witness = Some(make());
        }
    }
}

/// Triangle inequality, homogeneity, `‖1‖ = 1` and definiteness for both
/// norms on `samples` random pairs from the complex spans.
pub fn check_norm_axioms(engine: &NormEngine, samples: usize, seed: u64, unit: Option<&CVector>) -> Result<StageResult> {
    let tol = engine.tol;
    let mut rng = sampling::rng(seed);
    let effect_gens = engine.effect_body.real_generators();
    let state_gens = engine.state_body.real_generators();
    let mut worst = Worst::new();
    let mut max_triangle: f64 = f64::NEG_INFINITY;
    let mut max_homogeneity: f64 = 0.0;

    let mut run = |side: &str,
                   x: &CVector,
                   y: &CVector,
                   lambda: C64,
                   norm: &dyn Fn(&CVector) -> Result<f64>,
                   worst: &mut Worst|
     -> Result<()> {
        let (nx, ny, nxy) = (norm(x)?, norm(y)?, norm(&(x + y))?);
        max_triangle = max_triangle.max(nxy - nx - ny);
        if !leq_tol(nxy, nx + ny, tol) {
            worst.offer(nxy - nx - ny, || Witness {
                relation: format!("{side} triangle ‖x+y‖ ≤ ‖x‖+‖y‖"),
                elements: vec![WitnessElement::new("x", x), WitnessElement::new("y", y)],
                lhs: nxy,
                rhs: nx + ny,
            });
        }
        let scaled = norm(&(x * lambda))?;
        let expected = lambda.norm() * nx;
        let dev = (scaled - expected).abs();
        max_homogeneity = max_homogeneity.max(dev);
        if dev > tol * expected.max(1.0) {
            worst.offer(dev, || Witness {
                relation: format!("{side} homogeneity ‖λx‖ = |λ|‖x‖, λ = {}{:+}i", lambda.re, lambda.im),
                elements: vec![WitnessElement::new("x", x)],
                lhs: scaled,
                rhs: expected,
            });
        }
        Ok(())
    };

    let effect_norm = |v: &CVector| engine.effect_norm(v);
    let state_norm = |v: &CVector| engine.state_norm(v);
    for k in 0..samples.max(1) {
        let lambda = match k {
            0 => C64::new(0.0, 0.0),
            1 => linalg::I,
            _ => sampling::complex_scalar(&mut rng, 2.0),
        };
        let e = sampling::complex_combination(&mut rng, &effect_gens);
        let f = sampling::complex_combination(&mut rng, &effect_gens);
        run("effect", &e, &f, lambda, &effect_norm, &mut worst)?;
        let w = sampling::complex_combination(&mut rng, &state_gens);
        let s = sampling::complex_combination(&mut rng, &state_gens);
        run("state", &w, &s, lambda, &state_norm, &mut worst)?;
    }

    let mut result_notes = vec!["completeness: not applicable in finite dimension".to_string()];
    let mut unit_norm = f64::NAN;
    if let Some(u) = unit {
        unit_norm = engine.effect_norm(u)?;
        let dev = (unit_norm - 1.0).abs();
        if dev > UNIT_NORM_TOLERANCE {
            worst.offer(dev.max(f64::MIN_POSITIVE), || Witness {
                relation: "‖1‖ = 1".into(),
                elements: vec![WitnessElement::new("unit", u)],
                lhs: unit_norm,
                rhs: 1.0,
            });
        }
    } else {
        result_notes.push("unit effect unknown: ‖1‖ = 1 not checked".into());
    }

    // definiteness: the states (effects) must separate the effect (state) span
    let p = engine.pair.pairing_matrix();
    let eval_effects = CMatrix::from_fn(state_gens.len(), engine.pair.effect_dim(), |i, j| {
        engine.pair.state_functional(&state_gens[i])[j]
    });
    let eval_states = CMatrix::from_fn(effect_gens.len(), engine.pair.state_dim(), |i, j| {
        (p * &effect_gens[i])[j].conj()
    });
    let effect_rank = linalg::rank(&eval_effects, tol);
    let state_rank = linalg::rank(&eval_states, tol);
    for (side, rank, m, dim) in [
        ("effect", effect_rank, &eval_effects, engine.pair.effect_dim()),
        ("state", state_rank, &eval_states, engine.pair.state_dim()),
    ] {
        if rank < dim {
            let null = null_vector(m);
            worst.offer(1.0, || Witness {
                relation: format!("{side} norm definite: ‖x‖ = 0 ⇒ x = 0"),
                elements: vec![WitnessElement::new("x", &null)],
                lhs: 0.0,
                rhs: linalg::max_abs(&null),
            });
        }
    }

    let pass = worst.witness.is_none();
    let mut r = StageResult::new(Stage::NormAxioms, Verdict::from_pass(pass), worst.excess)
        .with_witness(worst.witness)
        .detail("triangle_max_excess", max_triangle.max(0.0))
        .detail("homogeneity_max_residual", max_homogeneity)
        .detail("effect_norm_rank", effect_rank as f64)
        .detail("state_norm_rank", state_rank as f64);
    if unit_norm.is_finite() {
        r = r.detail("unit_norm", unit_norm);
    }
    r.notes = result_notes;
    Ok(r)
}

fn null_vector(m: &CMatrix) -> CVector {
    let n = m.ncols();
    let padded = if m.nrows() < n {
        let mut p = CMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    v_t.row(k).adjoint()
}

/// Equal span dimensions and a nondegenerate pairing, the finite-dimensional
/// form of `E ≅ (A_*)*`.
pub fn check_duality(engine: &NormEngine) -> StageResult {
    let pair = &engine.pair;
    let s = linalg::singular_values(pair.pairing_matrix());
    let ratio = match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 && s.len() == pair.state_dim().min(pair.effect_dim()) => lo / hi,
        _ => 0.0,
    };
    let equal = pair.state_dim() == pair.effect_dim();
    let nondegenerate = pair.check_nondegenerate(engine.tol);
    let residual = pair.state_dim().abs_diff(pair.effect_dim()) as f64 + if nondegenerate { 0.0 } else { 1.0 };
    let mut r = StageResult::new(Stage::Tomography, Verdict::from_pass(equal && nondegenerate), residual)
        .detail("state_dim", pair.state_dim() as f64)
        .detail("effect_dim", pair.effect_dim() as f64)
        .detail("condition_number", pair.condition_number())
        .detail("min_singular_ratio", ratio);
    if !equal {
        r = r.note(format!(
            "span dimensions differ: states {} vs effects {}",
            pair.state_dim(),
            pair.effect_dim()
        ));
    }
    r
}
