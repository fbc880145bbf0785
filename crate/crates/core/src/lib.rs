//! Clifford noise reduction (CliNR) and CZ noise reduction (CZNR).
//!
//! The crate builds the gate-teleportation protocols that implement a
//! Clifford circuit through checked resource states, simulates them under
//! circuit-level Pauli noise with a Pauli-frame Monte-Carlo engine, and
//! evaluates the closed-form error-rate and overhead bounds.

pub mod analytics;
pub mod circuit;
pub mod cznr;
pub mod clifford;
pub mod clinr;
pub mod error;
pub mod experiments;
pub mod f2;
pub mod frame;
pub mod noise;
pub mod oracle;
pub mod pauli;
pub mod schedule;
pub mod seed;
pub mod segment;
pub mod stats;
pub mod tableau;
pub mod text;

pub use circuit::{conjugate_through, propagate, Circuit, Operation};
pub use error::{Error, Result};
pub use frame::{run_direct, run_protocol, DirectProtocol, Executor, FrameExecutor, Outcomes, Protocol, ShotRecord};
pub use noise::{NoiseConfig, NoiseMode, NoiseModel};
pub use pauli::{commutes, pauli_mul, Letter, PauliString};
pub use schedule::{schedule_layers, split_circuit, Layering};
pub use segment::{Expectation, Segment};
pub use stats::{wilson_interval, RunStats};
pub use tableau::StabilizerTableau;
pub use text::{parse_circuit, serialize_circuit};
