//! Mismatched multiterminal distortion-rate functions and optimal sum-rate
//! allocation for remote sensing of Gaussian and binary sources.
//!
//! * [`gaussian`]: AWGN observations under quadratic distortion, with the
//!   water-filling allocator and its numeric fallback.
//! * [`binary`]: bit-flipping observations under Hamming distortion, with the
//!   exact likelihood-ratio enumeration and the greedy allocator.
//! * [`oracles`]: grid search and Monte Carlo simulation used to check the
//!   closed forms.
//! * [`cli`]: the `mdrf` command-line front end.

// Guards are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod binary;
pub mod cli;
pub mod error;
pub mod gaussian;
pub mod info;
pub mod model;
pub mod oracles;
mod search;

pub use allocation::{Feasibility, Method, RateAllocation};
pub use error::{Error, Result};
pub use model::Model;
