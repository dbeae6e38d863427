//! Semi-Lagrangian discontinuous Galerkin solver for the Vlasov–Poisson
//! system in one space and one velocity dimension.
//!
//! The distribution function lives on a uniform phase-space grid as a
//! per-cell tensor-product Legendre expansion ([`DGField`]). Time stepping
//! is Strang splitting into two advections, each solved exactly and
//! projected back onto the grid by the operators in [`shift`].

pub mod diagnostics;
pub mod error;
pub mod field;
pub mod legendre;
pub mod poly;
pub mod problems;
pub mod projection;
pub mod shift;
pub mod splitting;

pub use diagnostics::{ConvergenceReport, TimeSeries};
pub use error::{Error, Result};
pub use field::PiecewisePoly1D;
pub use legendre::{gauss_rule, QuadratureRule};
pub use problems::{Dynamics, ProblemSpec};
pub use projection::{project, DGField, GridSpec, Norm};
pub use shift::{Boundary, ShiftTable};
pub use splitting::{RunOutput, Stepper, StepperState};
