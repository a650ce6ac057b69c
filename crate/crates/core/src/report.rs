//! Axiom reports and their JSON / text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CVector;

/// Report stages, in derivation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Separation,
    Tomography,
    NormAxioms,
    Submultiplicativity,
    UniformBound,
    Isometry,
    Projections,
    Complements,
    Involution,
    CStarIdentity,
    SupportNormEquality,
    PredualDuality,
}

impl Stage {
    pub const ALL: [Stage; 12] = [
        Stage::Separation,
        Stage::Tomography,
        Stage::NormAxioms,
        Stage::Submultiplicativity,
        Stage::UniformBound,
        Stage::Isometry,
        Stage::Projections,
        Stage::Complements,
        Stage::Involution,
        Stage::CStarIdentity,
        Stage::SupportNormEquality,
        Stage::PredualDuality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Separation => "separation",
            Stage::Tomography => "tomography",
            Stage::NormAxioms => "norm-axioms",
            Stage::Submultiplicativity => "submultiplicativity",
            Stage::UniformBound => "uniform-bound",
            Stage::Isometry => "isometry",
            Stage::Projections => "projections",
            Stage::Complements => "complements",
            Stage::Involution => "involution",
            Stage::CStarIdentity => "c-star-identity",
            Stage::SupportNormEquality => "support-norm-equality",
            Stage::PredualDuality => "predual-duality",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "NOT-APPLICABLE")]
    NotApplicable,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::NotApplicable => "NOT-APPLICABLE",
        }
    }

    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// A named coordinate vector, split into real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessElement {
    pub name: String,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl WitnessElement {
    pub fn new(name: impl Into<String>, v: &CVector) -> Self {
        Self {
            name: name.into(),
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_vector(&self) -> CVector {
        CVector::from_iterator(
            self.re.len(),
            self.re.iter().zip(&self.im).map(|(&re, &im)| crate::linalg::C64::new(re, im)),
        )
    }
}

/// Concrete counterexample: the elements involved and the two sides of
/// the violated relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub relation: String,
    pub elements: Vec<WitnessElement>,
    pub lhs: f64,
    pub rhs: f64,
}

impl Witness {
    pub fn element(&self, name: &str) -> Option<&WitnessElement> {
        self.elements.iter().find(|e| e.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageResult {
    pub stage: Stage,
    pub verdict: Verdict,
    pub residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl StageResult {
    pub fn new(stage: Stage, verdict: Verdict, residual: f64) -> Self {
        Self {
            stage,
            verdict,
            residual: sanitize(residual),
            witness: None,
            details: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn not_applicable(stage: Stage, why: impl Into<String>) -> Self {
        let mut r = Self::new(stage, Verdict::NotApplicable, 0.0);
        r.notes.push(why.into());
        r
    }

    pub fn with_witness(mut self, w: Option<Witness>) -> Self {
        self.witness = w;
        self
    }

    pub fn detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), sanitize(value));
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

// JSON has no infinities; report them as the largest finite double.
fn sanitize(x: f64) -> f64 {
    if x.is_nan() {
        f64::MAX
    } else {
        x.clamp(-f64::MAX, f64::MAX)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub instance: String,
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
    pub stages: Vec<StageResult>,
}

impl AxiomReport {
    pub fn stage(&self, stage: Stage) -> Option<&StageResult> {
        self.stages.iter().find(|s| s.stage == stage)
    }

    pub fn verdict(&self, stage: Stage) -> Option<Verdict> {
        self.stage(stage).map(|s| s.verdict)
    }

    /// Every stage present exactly once, in derivation order.
    pub fn is_well_formed(&self) -> bool {
        self.stages.len() == Stage::ALL.len()
            && self.stages.iter().zip(Stage::ALL).all(|(s, st)| s.stage == st && s.residual >= 0.0)
    }

    pub fn all_applicable_pass(&self) -> bool {
        self.stages.iter().all(|s| s.verdict != Verdict::Fail)
    }

    /// 0 when every applicable stage passes, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_applicable_pass() {
            0
        } else {
            2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

/// Renders a report. JSON output has object keys sorted.
pub fn render_report(report: &AxiomReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            // serde_json's Map is a BTreeMap, so going through Value sorts keys
            let value = serde_json::to_value(report).expect("report serializes");
            let mut out = serde_json::to_vec_pretty(&value).expect("value serializes");
            out.push(b'\n');
            out
        }
        Format::Text => render_text(report).into_bytes(),
    }
}

pub fn parse_report(bytes: &[u8]) -> Result<AxiomReport> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn render_text(report: &AxiomReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "instance: {}  (tolerance {:.2e}, samples {}, seed {})",
        report.instance, report.tolerance, report.samples, report.seed
    );
    let _ = writeln!(out, "{:<24} {:<15} {:>10}", "stage", "verdict", "residual");
    for s in &report.stages {
        let _ = writeln!(
            out,
            "{:<24} {:<15} {:>10.2e}",
            s.stage.name(),
            s.verdict.label(),
            s.residual
        );
        if s.verdict == Verdict::Fail {
            if let Some(w) = &s.witness {
                let _ = writeln!(out, "    witness: {}  (lhs {:.2e}, rhs {:.2e})", w.relation, w.lhs, w.rhs);
                for e in &w.elements {
                    let coords: Vec<String> = e
                        .re
                        .iter()
                        .zip(&e.im)
                        .map(|(re, im)| {
                            if *im == 0.0 {
                                format!("{re:.2e}")
                            } else {
                                format!("{re:.2e}{im:+.2e}i")
                            }
                        })
                        .collect();
                    let _ = writeln!(out, "      {} = [{}]", e.name, coords.join(", "));
                }
            }
        }
    }
    out
}
