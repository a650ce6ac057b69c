//! Built-in model theories, the finite-shot simulator, and conversion
//! to and from theory documents.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand_distr::{Binomial, Distribution};

use crate::algebra::{AlgebraModel, Product};
use crate::body::ConvexBody;
use crate::dual::{embed_theory, unit_vector, DualPair};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::norms::{NormEngine, DEFAULT_TOLERANCE};
use crate::report::{Stage, Verdict, Witness, WitnessElement};
use crate::sampling;
use crate::schema::{InvolutionSpec, ProductSpec, Scalar, TheoryDocument};
use crate::star::{Involution, StarAlgebraModel};
use crate::stats::{self, OperationalStatistics, DEFAULT_ENTRY_TOLERANCE};

pub const MAX_CLASSICAL: usize = 8;

#[derive(Debug, Clone)]
pub struct TheoryInstance {
    pub name: String,
    pub stats: OperationalStatistics,
    pub engine: NormEngine,
    pub algebra: Option<AlgebraModel>,
    pub star: Option<StarAlgebraModel>,
    /// Expected verdict per stage; empty for theories read from documents.
    pub expected: BTreeMap<Stage, Verdict>,
    /// Known counterexample to the C*-identity, if the model has one.
    pub expected_witness: Option<Witness>,
    /// Model coordinates of every table row.
    pub row_states: Vec<CVector>,
    /// Model coordinates of every table column.
    pub column_effects: Vec<CVector>,
    /// The table's unit column, if it has one.
    pub unit_column: Option<usize>,
}

impl TheoryInstance {
    pub fn pair(&self) -> &DualPair {
        self.engine.pair()
    }

    pub fn state_body(&self) -> &ConvexBody {
        self.engine.state_body()
    }

    pub fn effect_body(&self) -> &ConvexBody {
        self.engine.effect_body()
    }

    /// Same theory with every component using `tol`.
    pub fn with_tolerance(&self, tol: f64) -> Self {
        Self {
            engine: self.engine.with_tol(tol),
            algebra: self.algebra.as_ref().map(|a| a.with_tol(tol)),
            star: self.star.as_ref().map(|s| s.with_tol(tol)),
            ..self.clone()
        }
    }

    /// The unit effect: the algebra's, else the unit column's coordinates.
    pub fn unit_effect(&self) -> Option<CVector> {
        self.algebra
            .as_ref()
            .map(|a| a.unit().clone())
            .or_else(|| self.unit_column.map(|j| self.column_effects[j].clone()))
    }

    /// Largest deviation between model pairings and the table.
    pub fn round_trip_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, s) in self.row_states.iter().enumerate() {
            for (j, e) in self.column_effects.iter().enumerate() {
                let v = self.pair().pairing_unchecked(s, e);
                worst = worst.max((v - C64::new(self.stats.entry(i, j), 0.0)).norm());
            }
        }
        worst
    }

    /// Candidate projections: polytope vertices, or the table's effects.
    pub fn projection_candidates(&self) -> Vec<CVector> {
        match self.effect_body().vertices() {
            Some(v) => v.to_vec(),
            None => self.column_effects.clone(),
        }
    }

    pub fn noisy_sample(&self, shots: u64, seed: u64) -> Result<OperationalStatistics> {
        noisy_sample(&self.stats, shots, seed)
    }
}

fn all_pass() -> BTreeMap<Stage, Verdict> {
    Stage::ALL.iter().map(|&s| (s, Verdict::Pass)).collect()
}

fn bit_vector(bits: usize, n: usize) -> Vec<f64> {
    (0..n).map(|k| ((bits >> k) & 1) as f64).collect()
}

/// `n` perfectly distinguishable outcomes: simplex of states, hypercube of
/// effects, pointwise product.
pub fn classical(n: usize) -> Result<TheoryInstance> {
    if n == 0 || n > MAX_CLASSICAL {
        return Err(Error::Size(format!("classical(n) needs 1 ≤ n ≤ {MAX_CLASSICAL}, got {n}")));
    }
    let cols = 1usize << n;
    let rows: Vec<Vec<f64>> = (0..n).map(|k| (0..cols).map(|b| ((b >> k) & 1) as f64).collect()).collect();
    let prep = (0..n).map(|k| format!("p{k}")).collect();
    let outcomes = (0..cols)
        .map(|b| format!("e{}", bit_vector(b, n).iter().map(|&x| if x == 1.0 { '1' } else { '0' }).collect::<String>()))
        .collect();
    let stats = OperationalStatistics::new(prep, outcomes, &rows, DEFAULT_ENTRY_TOLERANCE)?;
    let states: Vec<CVector> = (0..n).map(|k| unit_vector(n, k)).collect();
    let effects: Vec<CVector> = (0..cols).map(|b| linalg::real_vector(&bit_vector(b, n))).collect();
    let engine = NormEngine::new(
        DualPair::identity(n),
        ConvexBody::from_vertices(states.clone()),
        ConvexBody::from_vertices(effects.clone()),
        DEFAULT_TOLERANCE,
    )?;
    let algebra = AlgebraModel::new(Product::Pointwise, None, engine.clone())?;
    let star = StarAlgebraModel::new(algebra.clone(), Involution::identity(n))?;
    Ok(TheoryInstance {
        name: format!("classical:{n}"),
        stats,
        engine,
        algebra: Some(algebra),
        star: Some(star),
        expected: all_pass(),
        expected_witness: None,
        row_states: states,
        column_effects: effects,
        unit_column: Some(cols - 1),
    })
}

/// Bloch vectors of the tetrahedral frame.
pub fn tetrahedral_frame() -> [[f64; 3]; 4] {
    let s = 1.0 / 3f64.sqrt();
    [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]
}

/// A qubit: density matrices, effects `0 ≤ E ≤ 1`, matrix product and
/// adjoint, with statistics on the tetrahedral frame.
pub fn qubit() -> Result<TheoryInstance> {
    let frame = tetrahedral_frame();
    let projectors: Vec<CMatrix> = frame.iter().map(|&r| linalg::bloch_density(r)).collect();
    let rows: Vec<Vec<f64>> = projectors
        .iter()
        .map(|rho| projectors.iter().map(|e| (rho * e).trace().re).collect())
        .collect();
    let stats = OperationalStatistics::new(
        (0..4).map(|k| format!("t{k}")).collect(),
        (0..4).map(|k| format!("T{k}")).collect(),
        &rows,
        DEFAULT_ENTRY_TOLERANCE,
    )?;
    let coords: Vec<CVector> = projectors.iter().map(linalg::coords_from_matrix).collect();
    let engine = NormEngine::new(
        DualPair::identity(4),
        ConvexBody::qubit_states(),
        ConvexBody::MatrixInterval { d: 2 },
        DEFAULT_TOLERANCE,
    )?;
    let algebra = AlgebraModel::new(Product::Matrix { d: 2 }, None, engine.clone())?;
    let star = StarAlgebraModel::new(algebra.clone(), Involution::conjugate_transpose(2))?;
    Ok(TheoryInstance {
        name: "qubit".into(),
        stats,
        engine,
        algebra: Some(algebra),
        star: Some(star),
        expected: all_pass(),
        expected_witness: None,
        row_states: coords.clone(),
        column_effects: coords,
        unit_column: None,
    })
}

/// Square-state-space bit. Coordinates are the statistics on three of the
/// four pure states; the fourth is `−s1 + s2 + s3`.
pub fn gbit() -> Result<TheoryInstance> {
    let v = |a: f64, b: f64, c: f64| linalg::real_vector(&[a, b, c]);
    let states = vec![v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0), v(0.0, 0.0, 1.0), v(-1.0, 1.0, 1.0)];
    let effects = vec![
        v(0.0, 0.0, 0.0),
        v(1.0, 1.0, 1.0),
        v(1.0, 1.0, 0.0),
        v(0.0, 0.0, 1.0),
        v(1.0, 0.0, 1.0),
        v(0.0, 1.0, 0.0),
    ];
    let pair = DualPair::identity(3);
    let rows: Vec<Vec<f64>> = states
        .iter()
        .map(|s| effects.iter().map(|e| pair.pairing_unchecked(s, e).re).collect())
        .collect();
    let stats = OperationalStatistics::new(
        ["s++", "s+-", "s-+", "s--"].map(String::from).to_vec(),
        ["zero", "unit", "x+", "x-", "y+", "y-"].map(String::from).to_vec(),
        &rows,
        DEFAULT_ENTRY_TOLERANCE,
    )?;
    let engine = NormEngine::new(
        pair,
        ConvexBody::from_vertices(states.clone()),
        ConvexBody::from_vertices(effects.clone()),
        DEFAULT_TOLERANCE,
    )?;
    let algebra = AlgebraModel::new(Product::Pointwise, None, engine.clone())?;
    let star = StarAlgebraModel::new(algebra.clone(), Involution::identity(3))?;

    let witness = gbit_cstar_witness(&algebra, &star, &effects);
    let mut expected = all_pass();
    for s in [Stage::Submultiplicativity, Stage::UniformBound, Stage::Isometry, Stage::CStarIdentity] {
        expected.insert(s, Verdict::Fail);
    }
    Ok(TheoryInstance {
        name: "gbit".into(),
        stats,
        engine,
        algebra: Some(algebra),
        star: Some(star),
        expected,
        expected_witness: Some(witness),
        row_states: states,
        column_effects: effects,
        unit_column: Some(1),
    })
}

/// Largest C*-identity violation over differences of effect vertices.
fn gbit_cstar_witness(alg: &AlgebraModel, star: &StarAlgebraModel, effects: &[CVector]) -> Witness {
    let mut best: Option<(f64, Witness)> = None;
    for a in effects {
        for b in effects {
            let t = a - b;
            let lhs = alg.effect_norm(&alg.mul(&star.star(&t), &t));
            let rhs = alg.effect_norm(&t).powi(2);
            let gap = (lhs - rhs).abs();
            if best.as_ref().is_none_or(|(g, _)| gap > *g) {
                let w = Witness {
                    relation: "‖T*T‖ = ‖T‖²".into(),
                    elements: vec![WitnessElement::new("T", &t)],
                    lhs,
                    rhs,
                };
                best = Some((gap, w));
            }
        }
    }
    best.expect("nonempty vertex list").1
}

/// Names accepted by [`builtin`].
pub fn builtin_names() -> Vec<String> {
    let mut names: Vec<String> = (1..=MAX_CLASSICAL).map(|n| format!("classical:{n}")).collect();
    names.push("qubit".into());
    names.push("gbit".into());
    names
}

pub fn builtin(name: &str) -> Option<Result<TheoryInstance>> {
    match name {
        "qubit" => Some(qubit()),
        "gbit" => Some(gbit()),
        _ => {
            let n = name.strip_prefix("classical:")?;
            Some(
                n.parse::<usize>()
                    .map_err(|_| Error::Size(format!("bad classical size {n:?}")))
                    .and_then(classical),
            )
        }
    }
}

/// Relative frequencies from `shots` independent trials per cell.
pub fn noisy_sample(stats: &OperationalStatistics, shots: u64, seed: u64) -> Result<OperationalStatistics> {
    if shots == 0 {
        return Err(Error::Config("shots must be at least 1".into()));
    }
    let mut rng = sampling::rng(seed);
    let t = stats.table();
    let mut out = DMatrix::zeros(t.nrows(), t.ncols());
    for i in 0..t.nrows() {
        for j in 0..t.ncols() {
            let dist = Binomial::new(shots, t[(i, j)]).map_err(|e| Error::Config(e.to_string()))?;
            out[(i, j)] = dist.sample(&mut rng) as f64 / shots as f64;
        }
    }
    OperationalStatistics::from_matrix(stats.prep_labels().to_vec(), stats.outcome_labels().to_vec(), out)
}

/// Quotient maps of a table: the class of every row and column, and the
/// reduced table.
struct Quotients {
    row_class: Vec<usize>,
    col_class: Vec<usize>,
    /// Original index of each reduced column.
    col_representatives: Vec<usize>,
    reduced: OperationalStatistics,
}

fn quotients(stats: &OperationalStatistics, tol: f64) -> Result<Quotients> {
    let rows = stats::quotient_ensembles(stats, tol);
    let row_reduced = OperationalStatistics::from_matrix(
        rows.representatives.iter().map(|&i| stats.prep_labels()[i].clone()).collect(),
        stats.outcome_labels().to_vec(),
        rows.reduced_table.clone(),
    )?;
    let cols = stats::quotient_effects(&row_reduced, tol);
    let reduced = stats::reduce(stats, tol);
    let class_map = |classes: &[Vec<usize>], n: usize| {
        let mut map = vec![0; n];
        for (c, members) in classes.iter().enumerate() {
            for &k in members {
                map[k] = c;
            }
        }
        map
    };
    Ok(Quotients {
        row_class: class_map(&rows.classes, stats.rows()),
        col_class: class_map(&cols.classes, stats.cols()),
        col_representatives: cols.representatives,
        reduced,
    })
}

fn input_error(what: &str, expected: usize, got: usize) -> Error {
    Error::Parse(format!("{what}: expected dimension {expected}, got {got}"))
}

/// Builds a theory from a document. Bodies are the hulls of the embedded
/// rows and columns; `product` and `involution` are read in the document's
/// effect coordinates.
pub fn from_document(doc: &TheoryDocument, name: &str, tol: f64) -> Result<TheoryInstance> {
    let stats = stats::statistics_from_document(doc, DEFAULT_ENTRY_TOLERANCE)?;
    let q = quotients(&stats, tol)?;
    let emb = embed_theory(&q.reduced)?;
    let r = emb.pair.effect_dim();
    let row_states: Vec<CVector> = q.row_class.iter().map(|&c| emb.states[c].clone()).collect();
    let column_effects: Vec<CVector> = q.col_class.iter().map(|&c| emb.effects[c].clone()).collect();
    let engine = NormEngine::new(emb.pair, emb.state_body, emb.effect_body, tol)?;

    if let Some(j) = doc.unit_column {
        if j >= stats.cols() {
            return Err(Error::Parse(format!("unit_column {j} out of range for {} columns", stats.cols())));
        }
    }
    let unit = doc.unit_column.map(|j| column_effects[j].clone());
    let algebra = match &doc.product {
        None => None,
        Some(kind) => {
            let product = match kind {
                ProductSpec::Pointwise => Product::Pointwise,
                ProductSpec::Matrix(m) => {
                    if m.d * m.d != r {
                        return Err(input_error("matrix product", r, m.d * m.d));
                    }
                    Product::Matrix { d: m.d }
                }
                ProductSpec::Tensor(data) => Product::Tensor(tensor_from_document(data, r)?),
            };
            Some(AlgebraModel::new(product, unit, engine.clone())?)
        }
    };
    let star = match (&doc.involution, &algebra) {
        (None, _) => None,
        (Some(_), None) => return Err(Error::Parse("an involution needs a product".into())),
        (Some(kind), Some(alg)) => {
            let inv = match kind {
                InvolutionSpec::Identity => Involution::identity(r),
                InvolutionSpec::ConjugateTranspose(m) => {
                    if m.d * m.d != r {
                        return Err(input_error("conjugate-transpose involution", r, m.d * m.d));
                    }
                    Involution::conjugate_transpose(m.d)
                }
                InvolutionSpec::Matrix(rows) => {
                    if rows.len() != r || rows.iter().any(|row| row.len() != r) {
                        return Err(input_error("involution matrix", r, rows.len()));
                    }
                    Involution::new(CMatrix::from_fn(r, r, |i, j| rows[i][j].to_complex()))?
                }
            };
            Some(StarAlgebraModel::new(alg.clone(), inv)?)
        }
    };
    Ok(TheoryInstance {
        name: name.into(),
        stats,
        engine,
        algebra,
        star,
        expected: BTreeMap::new(),
        expected_witness: None,
        row_states,
        column_effects,
        unit_column: doc.unit_column,
    })
}

fn tensor_from_document(data: &[Vec<Vec<Scalar>>], r: usize) -> Result<Vec<Vec<CVector>>> {
    if data.len() != r {
        return Err(input_error("product tensor", r, data.len()));
    }
    data.iter()
        .map(|row| {
            if row.len() != r {
                return Err(input_error("product tensor row", r, row.len()));
            }
            row.iter()
                .map(|e| {
                    if e.len() != r {
                        return Err(input_error("product tensor entry", r, e.len()));
                    }
                    Ok(CVector::from_iterator(r, e.iter().map(|s| s.to_complex())))
                })
                .collect()
        })
        .collect()
}

/// Writes an instance as a document whose product and involution are
/// expressed in the coordinates the document reader will use.
pub fn to_document(instance: &TheoryInstance, tol: f64) -> Result<TheoryDocument> {
    let stats = &instance.stats;
    let q = quotients(stats, tol)?;
    let emb = embed_theory(&q.reduced)?;
    let basis: Vec<usize> = emb.basis_cols.iter().map(|&c| q.col_representatives[c]).collect();
    let mut doc = TheoryDocument {
        preparations: stats.prep_labels().to_vec(),
        outcomes: stats.outcome_labels().to_vec(),
        statistics: stats.to_rows(),
        product: None,
        involution: None,
        unit_column: instance.unit_column,
    };
    let Some(alg) = &instance.algebra else {
        return Ok(doc);
    };
    let n = alg.dim();
    if basis.len() != n {
        return Err(Error::RankDeficiency(format!(
            "table spans {} effect dimensions, the model has {n}",
            basis.len()
        )));
    }
    // columns: model coordinates of the document's basis effects
    let c = CMatrix::from_fn(n, n, |i, k| instance.column_effects[basis[k]][i]);
    let c_inv = c
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::RankDeficiency("basis effects are dependent in the model".into()))?;
    let to_scalars = |v: CVector| v.iter().map(|&z| Scalar::from_complex(clean(z))).collect::<Vec<_>>();
    let tensor = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| to_scalars(&c_inv * alg.mul(&c.column(i).into_owned(), &c.column(j).into_owned())))
                .collect()
        })
        .collect();
    doc.product = Some(ProductSpec::Tensor(tensor));
    if let Some(star) = &instance.star {
        let m = &c_inv * star.involution().matrix() * c.map(|z| z.conj());
        let rows = (0..n).map(|i| to_scalars(m.row(i).transpose())).collect();
        doc.involution = Some(InvolutionSpec::Matrix(rows));
    }
    Ok(doc)
}

// Round-off below this is written as an exact zero or integer.
fn clean(z: C64) -> C64 {
    let snap = |x: f64| {
        let r = x.round();
        if (x - r).abs() < 1e-14 {
            r
        } else {
            x
        }
    };
    C64::new(snap(z.re), snap(z.im))
}
