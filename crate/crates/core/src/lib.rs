//! Exact and stochastic verification of the SLE / SU(2) WZW coupling
//! through the coset construction at finite grade truncation.

pub mod affine;
pub mod coset;
pub mod error;
pub mod internal;
pub mod linalg;
pub mod loewner;
pub mod martingale;
pub mod montecarlo;
pub mod report;
pub mod scalar;
pub mod series;
pub mod sl2;
pub mod stats;
pub mod virasoro;

pub use error::{Error, Result};
pub use linalg::{LinComb, QMatrix};
pub use report::{Status, VerificationReport, Witness, SCHEMA_VERSION};
pub use scalar::{format_rational, parse_rational, Rational};
