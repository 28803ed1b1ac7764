//! Connectivity-aware synthesis of Toffoli and Fredkin gates, CNOT-SWAP qubit
//! rerouting, a biased-CNOT coherent-noise model, diamond-distance numerics and
//! equivalent-circuit averaging experiments.
//!
//! The crate is `no_std` and only needs an allocator. Qubit 0 is the most
//! significant wire in every matrix and bitstring.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod apps;
pub mod chan;
pub mod circuit;
pub mod decomp;
pub mod error;
pub mod linalg;
pub mod noise;
pub mod qasm;
pub mod rng;
pub mod route;
pub mod sdp;
pub mod sim;

pub use circuit::{Circuit, CircuitMetrics, CouplingMap, Gate, StructureSignature, Violation};
pub use error::{Error, Result};
