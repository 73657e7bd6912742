//! Fuglede–Kadison determinant approximation for group-algebra operators.
//!
//! Words and word problems live in [`words`], sparse group-algebra
//! arithmetic in [`algebra`], exact path-counting series in [`series`],
//! upper bounds, integral estimates and Mahler measures in
//! [`determinant`], and named operators and manifold data in [`catalog`].

pub mod algebra;
pub mod catalog;
pub mod determinant;
pub mod error;
pub mod series;
pub mod words;

pub use algebra::{Element, ExactElement, FloatElement, Scalar, TraceSchedule, DEFAULT_TERM_BUDGET};
pub use catalog::{ManifoldEntry, NamedOperator};
pub use determinant::{ApproxParams, DetEstimate, LambdaPolicy, LaurentPoly};
pub use error::{Error, Result};
pub use series::{SeriesCoeffs, SeriesFamily};
pub use words::{CanonicalKey, GroupKind, GroupSpec, Letter, Mat2, MatrixRep, Word};

pub use num_complex::Complex64;
pub use num_rational::BigRational;
