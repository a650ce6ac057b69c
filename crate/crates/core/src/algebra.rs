//! Finite-dimensional unital algebras on the effect span and their regular
//! representation.

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::norms::{leq_tol, NormEngine};
use crate::report::{Stage, StageResult, Verdict, Witness, WitnessElement};
use crate::sampling;

/// Accepted residual in the unit law `1·x = x = x·1`.
pub const UNIT_LAW_TOLERANCE: f64 = 1e-9;
/// Cap on the deterministic elements added to every random battery.
pub const STRUCTURED_CAP: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub enum Product {
    /// Coordinatewise multiplication.
    Pointwise,
    /// Row-major `d×d` matrix multiplication.
    Matrix { d: usize },
    /// `tensor[i][j]` holds the coordinates of `e_i·e_j`.
    Tensor(Vec<Vec<CVector>>),
}

impl Product {
    /// Dimension forced by the product, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Product::Pointwise => None,
            Product::Matrix { d } => Some(d * d),
            Product::Tensor(t) => Some(t.len()),
        }
    }

    fn apply(&self, x: &CVector, y: &CVector) -> CVector {
        match self {
            Product::Pointwise => x.component_mul(y),
            Product::Matrix { d } => {
                let m = linalg::matrix_from_coords(x, *d) * linalg::matrix_from_coords(y, *d);
                linalg::coords_from_matrix(&m)
            }
            Product::Tensor(t) => {
                let mut out = CVector::zeros(x.len());
                for (i, row) in t.iter().enumerate() {
                    if x[i] == linalg::ZERO {
                        continue;
                    }
                    for (j, e) in row.iter().enumerate() {
                        let c = x[i] * y[j];
                        if c != linalg::ZERO {
                            out.axpy(c, e, linalg::ONE);
                        }
                    }
                }
                out
            }
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if let Some(d) = self.dim() {
            if d != n {
                return Err(Error::DimensionMismatch { expected: n, got: d });
            }
        }
        if let Product::Tensor(t) = self {
            for row in t {
                if row.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: row.len() });
                }
                if let Some(e) = row.iter().find(|e| e.len() != n) {
                    return Err(Error::DimensionMismatch { expected: n, got: e.len() });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `L_F x = F·x` or `R_F x = x·F` as a matrix on effect coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct MultOperator {
    pub side: Side,
    pub element: CVector,
    pub matrix: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraModel {
    product: Product,
    unit: CVector,
    engine: NormEngine,
}

impl AlgebraModel {
    /// Attaches a product to the effect span. Without an explicit `unit` one
    /// is derived from the product; either way the unit law is verified.
    pub fn new(product: Product, unit: Option<CVector>, engine: NormEngine) -> Result<Self> {
        let n = engine.pair().effect_dim();
        product.validate(n)?;
        let unit = match unit {
            Some(u) if u.len() != n => return Err(Error::DimensionMismatch { expected: n, got: u.len() }),
            Some(u) => u,
            None => derive_unit(&product, n)?,
        };
        let model = Self { product, unit, engine };
        let residual = model.unit_law_residual();
        if residual > UNIT_LAW_TOLERANCE {
            return Err(Error::InvalidModel(format!("unit law violated by {residual:.3e}")));
        }
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.unit.len()
    }

    pub fn unit(&self) -> &CVector {
        &self.unit
    }

    pub fn product(&self) -> &Product {
        &self.product
    }

    pub fn engine(&self) -> &NormEngine {
        &self.engine
    }

    pub fn tol(&self) -> f64 {
        self.engine.tol()
    }

    pub fn with_tol(&self, tol: f64) -> Self {
        Self { engine: self.engine.with_tol(tol), ..self.clone() }
    }

    pub fn multiply(&self, x: &CVector, y: &CVector) -> Result<CVector> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(self.product.apply(x, y))
    }

    pub(crate) fn mul(&self, x: &CVector, y: &CVector) -> CVector {
        self.product.apply(x, y)
    }

    pub fn effect_norm(&self, x: &CVector) -> f64 {
        self.engine.effect_norm(x).expect("dimension checked by caller")
    }

    fn check_dim(&self, x: &CVector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    fn unit_law_residual(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|j| {
                let e = crate::dual::unit_vector(n, j);
                let l = linalg::max_abs(&(self.mul(&self.unit, &e) - &e));
                let r = linalg::max_abs(&(self.mul(&e, &self.unit) - &e));
                l.max(r)
            })
            .fold(0.0, f64::max)
    }

    pub fn mult_operator(&self, side: Side, element: &CVector) -> Result<MultOperator> {
        self.check_dim(element)?;
        let n = self.dim();
        let mut matrix = CMatrix::zeros(n, n);
        for j in 0..n {
            let e = crate::dual::unit_vector(n, j);
            let col = match side {
                Side::Left => self.mul(element, &e),
                Side::Right => self.mul(&e, element),
            };
            matrix.set_column(j, &col);
        }
        Ok(MultOperator { side, element: element.clone(), matrix })
    }

    /// `sup_{E∈𝔈} ‖op(E)‖`.
    pub fn operator_norm(&self, op: &MultOperator) -> Result<f64> {
        self.matrix_operator_norm(&op.matrix).map(|(v, _)| v)
    }

    /// `sup_{E∈𝔈} ‖T E‖` for a coordinate matrix `T`, with a maximizing effect.
    ///
    /// Over a polytope the supremum of the convex function `E ↦ ‖TE‖` sits
    /// at a vertex. Over the qubit interval the extreme effects are `0`, `1`
    /// and the rank-one projections, searched on a sphere grid with local
    /// refinement.
    pub fn matrix_operator_norm(&self, t: &CMatrix) -> Result<(f64, CVector)> {
        let n = self.dim();
        if t.nrows() != n || t.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: t.nrows() });
        }
        match self.engine.effect_body() {
            ConvexBody::Polytope { vertices } => {
                let mut best = (0.0, vertices[0].clone());
                for v in vertices {
                    let value = self.effect_norm(&(t * v));
                    if value > best.0 {
                        best = (value, v.clone());
                    }
                }
                Ok(best)
            }
            ConvexBody::MatrixInterval { d: 2 } => Ok(self.qubit_interval_sup(t)),
            other => Err(Error::UnsupportedModel(format!(
                "operator norm over {:?} effect body",
                other.kind()
            ))),
        }
    }

    fn qubit_interval_sup(&self, t: &CMatrix) -> (f64, CVector) {
        let id = linalg::coords_from_matrix(&CMatrix::identity(2, 2));
        let sigma = linalg::pauli().map(|s| linalg::coords_from_matrix(&s));
        let t_id = t * &id;
        let t_sigma = sigma.clone().map(|s| t * s);
        let half = C64::from(0.5);
        let projection = |theta: f64, phi: f64| -> ([f64; 3], CVector) {
            let r = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let mut v = t_id.clone();
            for k in 0..3 {
                v.axpy(C64::from(r[k]), &t_sigma[k], linalg::ONE);
            }
            (r, v * half)
        };
        let value = |theta: f64, phi: f64| self.effect_norm(&projection(theta, phi).1);

        let mut best = (self.effect_norm(&t_id), id.clone());
        // the zero effect contributes 0, which `best` already dominates
        const POLAR: usize = 13;
        const AZIMUTH: usize = 24;
        let mut starts: Vec<(f64, f64, f64)> = Vec::with_capacity(POLAR * AZIMUTH);
        for a in 0..POLAR {
            let theta = std::f64::consts::PI * a as f64 / (POLAR - 1) as f64;
            let azimuths = if a == 0 || a == POLAR - 1 { 1 } else { AZIMUTH };
            for b in 0..azimuths {
                let phi = std::f64::consts::TAU * b as f64 / AZIMUTH as f64;
                starts.push((value(theta, phi), theta, phi));
            }
        }
        starts.sort_by(|x, y| y.0.total_cmp(&x.0));
        for &(mut v, mut theta, mut phi) in starts.iter().take(3) {
            let mut step = std::f64::consts::PI / (POLAR - 1) as f64;
            while step > 1e-9 {
                let mut moved = false;
                for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                    let candidate = value(theta + dt, phi + dp);
                    if candidate > v {
                        v = candidate;
                        theta += dt;
                        phi += dp;
                        moved = true;
                        break;
                    }
                }
                if !moved {
                    step *= 0.5;
                }
            }
            if v > best.0 {
                let (r, _) = projection(theta, phi);
                best = (v, linalg::coords_from_matrix(&linalg::bloch_density(r)));
            }
        }
        best
    }

    /// Deterministic probes: effect-body generators, their pairwise
    /// differences, the unit and zero, at most [`STRUCTURED_CAP`] in all.
    pub fn structured_elements(&self) -> Vec<CVector> {
        let gens = self.engine.effect_body().real_generators();
        let mut out = vec![self.unit.clone(), CVector::zeros(self.dim())];
        out.extend(gens.iter().take(STRUCTURED_CAP - 2).cloned());
        'outer: for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                if out.len() >= STRUCTURED_CAP {
                    break 'outer;
                }
                out.push(&gens[i] - &gens[j]);
            }
        }
        out
    }

    /// Structured probes followed by `samples` random self-adjoint
    /// combinations of the effect-body generators.
    pub fn probe_elements(&self, samples: usize, seed: u64) -> Vec<CVector> {
        let gens = self.engine.effect_body().real_generators();
        let mut rng = sampling::rng(seed);
        let mut out = self.structured_elements();
        out.extend((0..samples).map(|_| sampling::real_combination(&mut rng, &gens)));
        out
    }

    /// Elements `E` of the effect span with `‖E·E − E‖ ≤ tol`.
    pub fn detect_projections(&self, candidates: &[CVector], tol: f64) -> Vec<CVector> {
        candidates
            .iter()
            .filter(|e| e.len() == self.dim() && self.projection_residual(e) <= tol)
            .cloned()
            .collect()
    }

    pub fn projection_residual(&self, e: &CVector) -> f64 {
        self.effect_norm(&(self.mul(e, e) - e))
    }

    /// `1 − E`.
    pub fn complement(&self, e: &CVector) -> Result<CVector> {
        self.check_dim(e)?;
        Ok(&self.unit - e)
    }

    /// Splits `A` into the corner `M·A·M` and the remainder.
    pub fn decompose(&self, a: &CVector, m: &CVector) -> Result<(CVector, CVector)> {
        self.check_dim(a)?;
        self.check_dim(m)?;
        let residual = self.projection_residual(m);
        if residual > self.tol() {
            return Err(Error::NotAProjection { residual });
        }
        let corner = self.mul(&self.mul(m, a), m);
        let rest = a - &corner;
        Ok((corner, rest))
    }
}

fn derive_unit(product: &Product, n: usize) -> Result<CVector> {
    match product {
        Product::Pointwise => Ok(CVector::from_element(n, linalg::ONE)),
        Product::Matrix { d } => Ok(linalg::coords_from_matrix(&CMatrix::identity(*d, *d))),
        Product::Tensor(t) => {
            // Σ_i u_i (e_i·e_j) = e_j for every j
            let a = CMatrix::from_fn(n * n, n, |row, i| t[i][row / n][row % n]);
            let b = CVector::from_fn(n * n, |row, _| if row / n == row % n { linalg::ONE } else { linalg::ZERO });
            let u = a
                .clone()
                .svd(true, true)
                .solve(&b, 1e-12)
                .map_err(|e| Error::InvalidModel(format!("unit solve failed: {e}")))?;
            if linalg::max_abs(&(&a * &u - &b)) > UNIT_LAW_TOLERANCE {
                return Err(Error::InvalidModel("product has no unit".into()));
            }
            Ok(u)
        }
    }
}

fn pair_witness(relation: &str, e: &CVector, f: &CVector, lhs: f64, rhs: f64) -> Witness {
    Witness {
        relation: relation.into(),
        elements: vec![WitnessElement::new("E", e), WitnessElement::new("F", f)],
        lhs,
        rhs,
    }
}

/// `‖EF‖ ≤ ‖E‖‖F‖` over all pairs of structured probes and `samples` random pairs.
pub fn check_submultiplicative(alg: &AlgebraModel, samples: usize, seed: u64) -> StageResult {
    let tol = alg.tol();
    let structured = alg.structured_elements();
    let norms: Vec<f64> = structured.iter().map(|e| alg.effect_norm(e)).collect();
    let mut worst_excess: f64 = 0.0;
    let mut max_ratio: f64 = 0.0;
    let mut witness = None;
    let mut consider = |e: &CVector, ne: f64, f: &CVector, nf: f64| {
        let lhs = alg.effect_norm(&alg.mul(e, f));
        let rhs = ne * nf;
        if rhs > 0.0 {
            max_ratio = max_ratio.max(lhs / rhs);
        }
        if !leq_tol(lhs, rhs, tol) && lhs - rhs > worst_excess {
            worst_excess = lhs - rhs;
            witness = Some(pair_witness("‖EF‖ ≤ ‖E‖‖F‖", e, f, lhs, rhs));
        }
    };
    for (e, &ne) in structured.iter().zip(&norms) {
        for (f, &nf) in structured.iter().zip(&norms) {
            consider(e, ne, f, nf);
        }
    }
    let gens = alg.engine().effect_body().real_generators();
    let mut rng = sampling::rng(seed);
    for _ in 0..samples {
        let e = sampling::real_combination(&mut rng, &gens);
        let f = sampling::real_combination(&mut rng, &gens);
        let (ne, nf) = (alg.effect_norm(&e), alg.effect_norm(&f));
        consider(&e, ne, &f, nf);
    }
    StageResult::new(Stage::Submultiplicativity, Verdict::from_pass(witness.is_none()), worst_excess)
        .with_witness(witness)
        .detail("max_ratio", max_ratio)
}

/// `‖R_E‖ = ‖E‖ = ‖L_E‖` on structured and random probes.
pub fn check_isometry(alg: &AlgebraModel, samples: usize, seed: u64) -> Result<StageResult> {
    let tol = alg.tol();
    let mut worst: f64 = 0.0;
    let mut witness = None;
    for e in alg.probe_elements(samples, seed) {
        let n = alg.effect_norm(&e);
        for side in [Side::Right, Side::Left] {
            let op = alg.mult_operator(side, &e)?;
            let v = alg.operator_norm(&op)?;
            let dev = (v - n).abs();
            if dev > tol * n.max(1.0) && dev >= worst {
                let name = match side {
                    Side::Right => "‖R_E‖ = ‖E‖",
                    Side::Left => "‖L_E‖ = ‖E‖",
                };
                witness = Some(Witness {
                    relation: name.into(),
                    elements: vec![WitnessElement::new("E", &e)],
                    lhs: v,
                    rhs: n,
                });
            }
            worst = worst.max(dev);
        }
    }
    Ok(StageResult::new(Stage::Isometry, Verdict::from_pass(witness.is_none()), worst).with_witness(witness))
}

/// Largest sampled `‖R_F‖ / ‖F‖`, skipping `‖F‖ < tol`.
pub fn check_uniform_bound(alg: &AlgebraModel, samples: usize, seed: u64) -> Result<f64> {
    uniform_bound_search(alg, samples, seed).map(|(ratio, _)| ratio)
}

fn uniform_bound_search(alg: &AlgebraModel, samples: usize, seed: u64) -> Result<(f64, Option<Witness>)> {
    let mut best: (f64, Option<Witness>) = (0.0, None);
    for f in alg.probe_elements(samples, seed) {
        let nf = alg.effect_norm(&f);
        if nf < alg.tol() {
            continue;
        }
        let op = alg.mult_operator(Side::Right, &f)?;
        let (v, arg) = alg.matrix_operator_norm(&op.matrix)?;
        let ratio = v / nf;
        if ratio > best.0 {
            let w = Witness {
                relation: "‖R_F E‖ ≤ ‖F‖ for E ∈ 𝔈".into(),
                elements: vec![WitnessElement::new("F", &f), WitnessElement::new("E", &arg)],
                lhs: v,
                rhs: nf,
            };
            best = (ratio, Some(w));
        }
    }
    Ok(best)
}

/// Stage form of [`check_uniform_bound`]: passes when the statistic stays
/// at most `1 + tol`.
pub fn uniform_bound_stage(alg: &AlgebraModel, samples: usize, seed: u64) -> Result<StageResult> {
    let (ratio, witness) = uniform_bound_search(alg, samples, seed)?;
    let pass = ratio <= 1.0 + alg.tol();
    Ok(StageResult::new(Stage::UniformBound, Verdict::from_pass(pass), (ratio - 1.0).max(0.0))
        .with_witness(if pass { None } else { witness })
        .detail("sup_ratio", ratio))
}

/// `0` and `1` must be found among the candidates' projections.
pub fn projections_stage(alg: &AlgebraModel, candidates: &[CVector]) -> (StageResult, Vec<CVector>) {
    let tol = alg.tol();
    let mut all = vec![CVector::zeros(alg.dim()), alg.unit().clone()];
    all.extend(candidates.iter().cloned());
    let detected = alg.detect_projections(&all, tol);
    let residual = alg.projection_residual(alg.unit()).max(alg.projection_residual(&all[0]));
    let pass = detected.len() >= 2 && residual <= tol;
    let result = StageResult::new(Stage::Projections, Verdict::from_pass(pass), residual)
        .detail("candidates", candidates.len() as f64)
        .detail("detected", detected.len() as f64);
    (result, detected)
}

/// For detected projections `P`: `1 − P` is a projection, complementation
/// is an involution, and `P(1 − P) = 0 = (1 − P)P`.
pub fn complements_stage(alg: &AlgebraModel, projections: &[CVector]) -> StageResult {
    let tol = alg.tol();
    let mut worst: f64 = 0.0;
    let mut witness = None;
    for p in projections {
        let c = &alg.unit - p;
        let cc = &alg.unit - &c;
        let checks = [
            ("(1−P)² = 1−P", alg.projection_residual(&c)),
            ("1−(1−P) = P", alg.effect_norm(&(cc - p))),
            ("P(1−P) = 0", alg.effect_norm(&alg.mul(p, &c))),
            ("(1−P)P = 0", alg.effect_norm(&alg.mul(&c, p))),
        ];
        for (relation, r) in checks {
            if r > tol && r > worst {
                witness = Some(Witness {
                    relation: relation.into(),
                    elements: vec![WitnessElement::new("P", p)],
                    lhs: r,
                    rhs: 0.0,
                });
            }
            worst = worst.max(r);
        }
    }
    StageResult::new(Stage::Complements, Verdict::from_pass(witness.is_none()), worst)
        .with_witness(witness)
        .detail("projections", projections.len() as f64)
}
