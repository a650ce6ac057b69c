//! The full derivation: load, quotient, embed, norms, algebra, star, report.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::algebra;
use crate::error::{Error, Result};
use crate::instances::{self, TheoryInstance};
use crate::norms::{self, DEFAULT_TOLERANCE};
use crate::report::{render_report, AxiomReport, Format, Stage, StageResult, Verdict};
use crate::schema::TheoryDocument;
use crate::star;
use crate::stats;

pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_SEED: u64 = 0;
/// Random qubit states probed by the support stage, on top of the axis states.
pub const SUPPORT_STATES: usize = 100;
pub const TOLERANCE_ENV: &str = "GPT_RECON_TOLERANCE";

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// A file path or a built-in name.
    pub input: String,
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
    pub report_path: Option<PathBuf>,
    pub format: Format,
}

impl PipelineConfig {
    pub fn new(input: impl Into<String>) -> Self {
        Self {
            input: input.into(),
            tolerance: DEFAULT_TOLERANCE,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            report_path: None,
            format: Format::Json,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        Ok(())
    }
}

/// Tolerance default, overridable through the environment.
pub fn default_tolerance() -> Result<f64> {
    match std::env::var(TOLERANCE_ENV) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("{TOLERANCE_ENV}={v:?} is not a number"))),
        Err(_) => Ok(DEFAULT_TOLERANCE),
    }
}

/// A built-in name, or a path to a theory document.
pub fn resolve_input(input: &str, tol: f64) -> Result<TheoryInstance> {
    if let Some(inst) = instances::builtin(input) {
        return inst;
    }
    let path = Path::new(input);
    let bytes = fs::read(path)?;
    let doc: TheoryDocument = serde_json::from_slice(&bytes).map_err(|e| Error::Parse(e.to_string()))?;
    let name = path.file_stem().map_or_else(|| input.to_string(), |s| s.to_string_lossy().into_owned());
    instances::from_document(&doc, &name, tol)
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<AxiomReport> {
    config.validate()?;
    let instance = resolve_input(&config.input, config.tolerance)?;
    run_instance(&instance, config.tolerance, config.samples, config.seed)
}

fn stage_seed(seed: u64, stage: Stage) -> u64 {
    seed.wrapping_add(stage as u64)
}

/// Runs every stage on an instance.
pub fn run_instance(instance: &TheoryInstance, tol: f64, samples: usize, seed: u64) -> Result<AxiomReport> {
    let inst = instance.with_tolerance(tol);
    let mut stages = Vec::with_capacity(Stage::ALL.len());

    stages.push(separation_stage(&inst, tol));
    stages.push(tomography_stage(&inst, tol));
    stages.push(norms::check_norm_axioms(
        &inst.engine,
        samples,
        stage_seed(seed, Stage::NormAxioms),
        inst.unit_effect().as_ref(),
    )?);

    match &inst.algebra {
        None => {
            for s in [
                Stage::Submultiplicativity,
                Stage::UniformBound,
                Stage::Isometry,
                Stage::Projections,
                Stage::Complements,
            ] {
                stages.push(StageResult::not_applicable(s, "no product"));
            }
        }
        Some(alg) => {
            stages.push(algebra::check_submultiplicative(alg, samples, stage_seed(seed, Stage::Submultiplicativity)));
            stages.push(algebra::uniform_bound_stage(alg, samples, stage_seed(seed, Stage::UniformBound))?);
            stages.push(algebra::check_isometry(alg, samples, stage_seed(seed, Stage::Isometry))?);
            let (projections, detected) = algebra::projections_stage(alg, &inst.projection_candidates());
            stages.push(projections);
            stages.push(algebra::complements_stage(alg, &detected));
        }
    }

    match &inst.star {
        None => {
            let why = if inst.algebra.is_none() { "no product" } else { "no involution" };
            for s in [Stage::Involution, Stage::CStarIdentity, Stage::SupportNormEquality, Stage::PredualDuality] {
                stages.push(StageResult::not_applicable(s, why));
            }
        }
        Some(model) => {
            stages.push(star::check_involution_laws(model, samples, stage_seed(seed, Stage::Involution))?);
            stages.push(star::check_cstar_identity(model, samples, stage_seed(seed, Stage::CStarIdentity)));
            let states = match inst.state_body().vertices() {
                Some(v) => v.to_vec(),
                None => star::qubit_probe_states(SUPPORT_STATES, stage_seed(seed, Stage::SupportNormEquality)),
            };
            stages.push(match star::support_stage(model, &states) {
                Err(Error::UnsupportedModel(why)) => StageResult::not_applicable(Stage::SupportNormEquality, why),
                other => other?,
            });
            stages.push(star::check_predual_duality(model));
        }
    }

    Ok(AxiomReport { instance: inst.name.clone(), tolerance: tol, samples, seed, stages })
}

fn separation_stage(inst: &TheoryInstance, tol: f64) -> StageResult {
    let rows = stats::quotient_ensembles(&inst.stats, tol);
    let cols = stats::quotient_effects(&inst.stats, tol);
    let merged_rows = inst.stats.rows() - rows.classes.len();
    let merged_cols = inst.stats.cols() - cols.classes.len();
    let mut r = StageResult::new(
        Stage::Separation,
        Verdict::from_pass(merged_rows + merged_cols == 0),
        (merged_rows + merged_cols) as f64,
    )
    .detail("ensembles", rows.classes.len() as f64)
    .detail("effects", cols.classes.len() as f64);
    if merged_rows + merged_cols > 0 {
        r = r.note(format!(
            "input not separated: {merged_rows} preparation(s) and {merged_cols} outcome(s) merged by the quotient"
        ));
    }
    r
}

fn tomography_stage(inst: &TheoryInstance, tol: f64) -> StageResult {
    let duality = norms::check_duality(&inst.engine);
    let round_trip = inst.round_trip_residual();
    let table_rank = crate::linalg::rank(&crate::linalg::complexify(inst.stats.table()), crate::dual::RANK_TOLERANCE);
    let dims_match = table_rank == inst.pair().state_dim() && table_rank == inst.pair().effect_dim();
    let pass = duality.passed() && dims_match && round_trip <= tol;
    let mut r = StageResult::new(Stage::Tomography, Verdict::from_pass(pass), duality.residual.max(round_trip));
    r.details = duality.details;
    r.notes = duality.notes;
    r = r.detail("table_rank", table_rank as f64).detail("round_trip_residual", round_trip);
    if !dims_match {
        r = r.note(format!(
            "table rank {table_rank} does not match model dimensions {}×{}",
            inst.pair().state_dim(),
            inst.pair().effect_dim()
        ));
    }
    r
}

/// Writes the rendered report through a temporary file and a rename.
pub fn write_report(report: &AxiomReport, path: &Path, format: Format) -> Result<()> {
    let bytes = render_report(report, format);
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("report path {} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", file_name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(Error::from)
}
