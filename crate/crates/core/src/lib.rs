//! Calculators and a simulator for randomized distributed function computation
//! under local differential privacy.
//!
//! * [`gaussian`]: the clipped-Gaussian mechanism, its WCI lower bound and I(X;Y).
//! * [`discrete`]: BSC-mixture random response, maxitrace and the Witsenhausen bound.
//! * [`fbl`]: alpha-mutual information, the optimal rho* and finite-blocklength delta_n.
//! * [`synth`]: exact small-n channel synthesis with random codebooks.
//! * [`tables`]: recomputation of the published reference tables.
//!
//! Every information quantity is in nats. The `examples/` directory has one
//! runnable program per capability, e.g. `cargo run --example truncated_gaussian`.

pub mod discrete;
pub mod error;
pub mod fbl;
pub mod gaussian;
pub mod info;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod special;
pub mod synth;
pub mod tables;

pub use error::{Error, Result};
