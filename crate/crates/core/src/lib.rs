//! Exact torus-equivariant de Rham theory on finite invariant models.
//!
//! A model is a finite graded complex with a differential and contraction
//! operators. From it the crate computes the Cartan complex and its
//! equivariant cohomology, the Poincaré pairing and duality diagnostics,
//! Gysin morphisms, Thom and Euler classes, and localization formulas. All
//! arithmetic is exact over ℚ and its polynomial extensions.

pub mod algebra;
pub mod duality;
pub mod error;
pub mod euler;
pub mod gcomplex;
pub mod gysin;
pub mod models;

pub use algebra::{Matrix, Polynomial, Rational, RationalFunction};
pub use duality::{DualityReport, ExtRank1, ModuleClassification, ModulePresentation};
pub use error::{Error, Result};
pub use euler::{FixedPointDatum, LinearRepresentation, Weight};
pub use gcomplex::{CohomologyReport, EquivariantElement, Generator, InvariantModel, ValidationReport};
pub use gysin::{GysinMatrix, ModelMap};
pub use models::{builtin, load_model, save_model};
