//! Cavity-magnon quantum repeater simulator.
//!
//! * [`qcore`]: dense complex matrices, density matrices, concurrence and fidelity.
//! * [`dynamics`]: cavity-magnon Hamiltonians and the Lindblad integrator that
//!   produces the heralded Bell pair.
//! * [`swap`]: beam-splitter optics, Bell-state measurement with feed-forward
//!   corrections and the two-stage swapping procedure.
//! * [`network`]: the analytic link-budget and multiplexing model for repeater
//!   chains, plus the built-in deployment scenarios.
//!
//! Batch workloads (parameter sweeps, random-state checks) go through
//! [`exec::Execution`], which uses rayon when the `parallel` feature is on and
//! falls back to a plain loop otherwise.

pub mod dynamics;
pub mod error;
pub mod exec;
pub mod network;
pub mod qcore;
pub mod swap;

pub use error::{Error, Result};
pub use exec::Execution;
