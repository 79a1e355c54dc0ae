//! Exact arithmetic for restricted Oppenheim expansions: digit extraction,
//! cylinder geometry, the digit Markov chain, seeded samplers and
//! finite-depth singularity diagnostics.

pub mod cli;
pub mod cylinder;
pub mod error;
pub mod expansion;
pub mod experiments;
pub mod rational;
pub mod sampling;
pub mod stats;
pub mod system;

pub use cylinder::{cylinder, Cylinder};
pub use error::{Result, RoeError};
pub use expansion::{expand, DiffDigitSeq, DigitSeq};
pub use system::{RoeSystem, SystemKind};
