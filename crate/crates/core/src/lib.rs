//! Graded connections on the algebra of differential forms over a single
//! coordinate chart.
//!
//! The layers build on each other: [`expr`] (symbolic scalars), [`forms`]
//! (the exterior algebra), [`derivations`] (the module of derivations with
//! its graded commutator), [`metric`] (the Riemannian data and the odd
//! pairing it induces), [`connections`], [`distributions`], [`lie`] and
//! [`pframe`].

pub mod closed_forms;
pub mod connections;
pub mod derivations;
pub mod distributions;
pub mod error;
pub mod expr;
pub mod forms;
pub mod frame;
pub mod lie;
pub mod linalg;
pub mod metric;
pub mod parity;
pub mod pframe;
pub mod parse;
pub mod vector;

pub use connections::{Connection, ConnectionKind, LeviCivitaLift, SemiSymmetric};
pub use derivations::{Derivation, NumDerivation};
pub use error::{GeomError, Result};
pub use expr::{EvalCache, Func, Rational, ScalarExpr};
pub use forms::{Blade, Form, NumForm};
pub use frame::Frame;
pub use metric::{GradedMetric, MetricG};
pub use parity::Parity;
pub use parse::{parse_derivation, parse_expr, parse_form, Scope};
pub use vector::VectorField;
