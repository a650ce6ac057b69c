//! Reconstruct and test the algebraic structure of a finite-dimensional
//! operational theory from its table of outcome probabilities.
//!
//! The chain runs from a statistics table through operational quotients,
//! the dual pair of state and effect spans, the two sup-norms, the regular
//! representation of a product on effects, an involution, and finally the
//! C*-identity and predual checks. Every check produces a [`StageResult`]
//! with a residual and, on failure, a concrete witness.

pub mod algebra;
pub mod body;
pub mod dual;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod norms;
pub mod pipeline;
pub mod report;
pub mod sampling;
pub mod schema;
pub mod star;
pub mod stats;

pub use algebra::{AlgebraModel, MultOperator, Product, Side};
pub use body::{membership, mix, ConvexBody};
pub use dual::{embed_theory, DualPair, EmbeddedTheory};
pub use error::{Error, Result};
pub use instances::{classical, gbit, noisy_sample, qubit, TheoryInstance};
pub use norms::NormEngine;
pub use pipeline::{run_pipeline, PipelineConfig};
pub use report::{render_report, AxiomReport, Format, Stage, StageResult, Verdict, Witness};
pub use schema::TheoryDocument;
pub use star::{adjoint, Involution, PairingOperator, StarAlgebraModel, SupportResult};
pub use stats::{
    check_separation, load_statistics, quotient_effects, quotient_ensembles, OperationalStatistics, QuotientResult,
};
