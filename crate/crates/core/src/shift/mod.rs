//! One-dimensional translate-then-project operators.
//!
//! Translating a piecewise polynomial by a fraction of a cell and projecting
//! back touches only the cell itself and one upwind neighbor. The overlap
//! integrals are exact polynomials in the fractional shift ([`ShiftTable`]);
//! the remaining dependence on the transverse coordinate is integrated with
//! a Gauss rule that is exact for the resulting polynomial integrand.

mod line;
pub mod rational;
mod table;

pub use line::{shift_1d, Boundary, LineOperator};
pub use rational::RationalPoly;
pub use table::ShiftTable;
