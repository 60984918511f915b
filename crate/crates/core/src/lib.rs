//! Exact complex-differential calculus on finite bidirected graphs.
//!
//! Every computation runs over the Gaussian rationals ℚ(i), so all identities
//! are checked with zero tolerance.

pub mod braid;
pub mod cocycles;
pub mod complex;
pub mod first_order;
pub mod forms;
pub mod graph;
pub mod holomorphic;
pub mod matrix;
pub mod polygon;
pub mod report;
pub mod scalar;

pub use cocycles::{Cochain, CocycleReport, OrientationChoice};
pub use braid::{build_sigma, Budget, SigmaInput, SigmaOperator, SigmaSpec};
pub use complex::{ComplexStructure, JInput, JSpec};
pub use forms::{Calculus, CalculusDimension, FormSpace};
pub use graph::{BidiGraph, GraphInput, PathSpace};
pub use holomorphic::{Connection, HolomorphicStructure};
pub use matrix::{ExactMatrix, MatrixError, PsdReport, PsdWitness, Rref, Vector};
pub use polygon::{golden_report, make_polygon, GoldenReport, PolygonModel};
pub use report::{run_pipeline, run_polygon, Command, InputError, PipelineOptions, RawInputs, Report, ResolvedInputs, Verdict};
pub use scalar::{gr, GaussianRational};
