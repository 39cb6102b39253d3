//! Flocculation chemostat model: one microbial species in planktonic and
//! attached form competing for a single substrate under dilution.
//!
//! The crate computes steady states and their local stability, traces the
//! bifurcation structure against the two operating parameters (inflow
//! substrate concentration `S_in` and dilution rate `D`), assembles operating
//! diagrams, and simulates trajectories including limit-cycle and
//! homoclinic-proximity probing.
//!
//! Modules mirror the analysis pipeline:
//!
//! - [`model`]: parameters, kinetics, vector field, Jacobian
//! - [`equilibria`]: break-even concentrations, steady-state roots, folds
//! - [`stability`]: eigenvalues, Routh–Hurwitz coefficients, classification
//! - [`dynamics`]: adaptive integration, attractor and period probing
//! - [`diagrams`]: curves, region classification, operating diagrams
//! - [`export`]: CSV/SVG/JSON artifact encoding

// `!(x > 0.0)` style comparisons are deliberate: they reject NaN along with
// the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagrams;
pub mod dual;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod export;
pub mod model;
mod roots;
pub mod stability;
mod svg;

pub use error::{CoreError, Result};
pub use model::{BioParams, OperatingPoint, State};
