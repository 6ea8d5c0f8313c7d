//! Range-renewal statistics of continued-fraction partial quotients.
//!
//! The crate is organised bottom-up:
//!
//! * [`cf_core`] exact continued-fraction arithmetic: digits, convergents,
//!   cylinders and their Gauss measures.
//! * [`sampling`] exact samplers for the digit process under the Gauss
//!   measure and under the i.i.d. product of its one-digit marginal.
//! * [`stats`] streaming occupancy counters (`R_n`, `R_{n,k}`, `R_{n,k+}`).
//! * [`theory`] closed-form limit constants and i.i.d. expectation series.
//! * [`identities`] brute-force inclusion-exclusion checks on finite spaces.
//! * [`measure_bounds`] quasi-independence, comparison and mixing checks.
//! * [`constructions`] the special digit sequences and dimension machinery.
//! * [`experiments`] Monte Carlo driver, configuration and CLI plumbing.

pub mod cf_core;
pub mod constructions;
mod error;
pub mod experiments;
pub mod identities;
pub mod measure_bounds;
pub mod sampling;
pub mod stats;
pub mod theory;

pub use cf_core::{ConvergentState, Cylinder, Digit, Rational};
pub use error::{Error, Result};
