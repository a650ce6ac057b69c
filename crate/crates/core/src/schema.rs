//! JSON document format for theories.
//!
//! ```json
//! {
//!   "preparations": ["p0", "p1"],
//!   "outcomes": ["e0", "e1", "unit"],
//!   "statistics": [[1, 0, 1], [0, 1, 1]],
//!   "product": {"kind": "pointwise"},
//!   "involution": {"kind": "identity"},
//!   "unit_column": 2
//! }
//! ```
//!
//! `product` and `involution` act on effect coordinates, which are the
//! coefficients of an effect in the basis of linearly independent effect
//! columns of the deduplicated table (lowest column index first).
//! Complex numbers in `data` are written as `[re, im]`.

use serde::{Deserialize, Serialize};

use crate::linalg::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryDocument {
    pub preparations: Vec<String>,
    pub outcomes: Vec<String>,
    pub statistics: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<ProductSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<InvolutionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_column: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "kebab-case")]
pub enum ProductSpec {
    Pointwise,
    Matrix(MatrixSize),
    /// `data[i][j][k]` is the coefficient of basis vector k in e_i · e_j.
    Tensor(Vec<Vec<Vec<Scalar>>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "kebab-case")]
pub enum InvolutionSpec {
    Identity,
    ConjugateTranspose(MatrixSize),
    /// x ↦ M·conj(x), `data[i][j]` = M_ij.
    Matrix(Vec<Vec<Scalar>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixSize {
    pub d: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn to_complex(self) -> C64 {
        match self {
            Scalar::Real(x) => C64::new(x, 0.0),
            Scalar::Complex([re, im]) => C64::new(re, im),
        }
    }

    pub fn from_complex(z: C64) -> Self {
        if z.im == 0.0 {
            Scalar::Real(z.re)
        } else {
            Scalar::Complex([z.re, z.im])
        }
    }
}
