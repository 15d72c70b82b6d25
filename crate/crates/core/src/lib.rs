//! Simulation and verification toolkit for k-party number-in-hand
//! collision finding and the bit pigeonhole principle.
//!
//! The crate is organised bottom-up:
//!
//! * [`gf2`]: bit-packed matrices over GF(2).
//! * [`gadget`]: the gadget matrices `M0_k`, `M1_k` and their exhaustive checks.
//! * [`collision`]: collision instances, a brute-force oracle and the greedy
//!   subset-announcement protocol.
//! * [`reduction`]: the randomized reduction from disjointness to collision
//!   finding, with Monte Carlo estimation of its success probability.
//! * [`bphp`]: bit pigeonhole CNF formulas, DIMACS output and the
//!   clause-to-inequality translation.
//! * [`proofsim`]: threshold decision trees, tree-like refutations and the
//!   compilation of trees into simulated protocols.
//! * [`cli`]: the `nihcoll` command line front end.

pub mod bphp;
pub mod cli;
pub mod collision;
pub mod error;
pub mod gadget;
pub mod gf2;
pub mod proofsim;
pub mod reduction;
pub mod rng;
pub mod transcript;

pub use error::{Error, Result};
pub use gf2::Gf2Matrix;
pub use transcript::Transcript;
