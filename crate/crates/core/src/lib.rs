//! Numerical abstract convexity on boxes: conjugation with respect to
//! elementary function classes, sampled subdifferentials, the intersection
//! property, Lagrangians built from perturbation functions, and duality
//! certification by exhaustive grid computation.

pub mod acceptance;
pub mod catalog;
pub mod conjugation;
pub mod domain;
pub mod duality;
pub mod elementary;
pub mod error;
pub mod expr;
pub mod extended;
pub mod lagrangian;
pub mod minimax;
pub mod objective;
pub mod parameters;
pub mod registry;
pub mod sampled;
pub mod subdifferential;
pub mod tolerances;

pub use domain::{BoxDomain, Grid};
pub use elementary::{ElementaryClass, ElementaryFunction};
pub use error::{Error, Result};
pub use extended::ExtendedValue;
pub use objective::{grid_extremum, ExtendedFunction, Extremum, ExtremumMode, ObjectiveFunction};
pub use sampled::GridFunction;
pub use parameters::ParameterGrid;
