//! Secrecy performance of an AN-aided decode-and-forward relay link
//! overheard by randomly located multi-antenna eavesdroppers.
//!
//! The crate evaluates transmission and secrecy outage probabilities in
//! closed/quadrature form, their large-source-array limits, an independent
//! Monte Carlo simulator of the same link, and a constrained maximizer of
//! the secrecy throughput over wiretap code rates and AN power splits.

pub mod config;
pub mod eaves;
pub mod error;
mod exec;
pub mod mc;
pub mod outage;
pub mod quad;
pub mod special;
pub mod throughput;
pub mod wishart;

pub use config::{derive, CodePoint, DerivedScalars, SystemConfig};
pub use error::{Error, Result};
pub use exec::{parallel_map, with_thread_limit};
pub use outage::{
    clear_j_cache, j1_closed, j1_inf_closed, p_so, p_so_asymptotic, p_to, p_to_asymptotic,
    EstimateKind, OutageEstimate,
};
pub use quad::{PolarPoint, QuadEstimate, QuadratureSettings};
