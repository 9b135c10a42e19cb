//! Set-invariance analysis for Gause-Lotka-Volterra population models.
//!
//! The crate decides whether a rectangle of populations is positively
//! invariant under the GLV dynamics (sustainability over a set, SOS), whether
//! bounded self-competition controls can make it so (sustainizability, SIZOS),
//! synthesizes a saturating feedback law when they can, and cross-checks
//! every closed-form verdict with sampling oracles and ODE simulation.

pub mod cli;
pub mod config;
pub mod error;
pub mod feedback;
pub mod field;
pub mod glv;
pub mod ode;
pub mod report;
pub mod sets;
pub mod sizos;
pub mod sos;
pub mod sweep;

pub use error::{Error, Result};
pub use field::{ControlledField, FnControlledField, FnField, VectorField};
pub use glv::{GlvParameters, IndexSets, MayLeonardParams};
pub use sets::{ActiveSet, Face, RectangularSet, Side, SmoothConstraint, SmoothSet, StateSet};
