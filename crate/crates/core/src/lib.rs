//! WAX decomposition of massive MIMO channels.
//!
//! A channel `H` (`M x K`) is factored as `H = W̃·Ã·X`, where `W̃` is block
//! diagonal with `L x L` blocks (per-antenna weights), `Ã` is a fixed
//! combining network with `T` outputs, and `X` is applied at the central
//! unit. When such factors exist the decentralized receive chain
//! `Xᴴ·Ãᴴ·W̃ᴴ·y` equals the matched filter `Hᴴ·y` exactly.

pub mod cli;
pub mod combiner;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod rng;
pub mod sim;
pub mod tradeoff;
pub mod wax;

pub use error::{Result, WaxError};
pub use linalg::ComplexMatrix;
pub use wax::{SolverOptions, SystemDims, WaxFactors};
