//! QAOA with chaotic parameter schedules for MAX K-SAT.
//!
//! The crate simulates depth-p QAOA circuits on dense statevectors and
//! replaces the usual 2p free angles with short parameter vectors that are
//! unrolled through iterates of the fully chaotic (r = 4) logistic map.
//! Around that core sit an SPSA optimizer, a set of trainability
//! diagnostics built on Lyapunov exponents of the map and of the cost
//! landscape, and an experiment runner that sweeps instances, schedules,
//! depths, and map speeds into reproducible CSV/JSON artifacts.
//!
//! Module map:
//! - [`sat`]: random MAX K-SAT instances, DIMACS I/O, cost diagonals.
//! - [`chaos`]: logistic-map orbits, derivative products, Lyapunov
//!   exponents, eta bounds, invariant-density checks.
//! - [`schemes`]: parameterization schemes mapping theta vectors to
//!   per-layer angle schedules and their Jacobians.
//! - [`simulator`]: dense statevector evaluation, layer-angle gradients,
//!   approximation ratios, misassignment rates, landscape scans.
//! - [`spsa`]: gain-scheduled SPSA with calibration and full traces.
//! - [`diagnostics`]: cost-landscape Lyapunov spectra, eta sweeps,
//!   control-noise moments, differential CDFs, landscape mixing.
//! - [`runner`]: experiment sweeps, aggregation, comparison, presets.

pub mod chaos;
pub mod diagnostics;
mod error;
pub mod runner;
pub mod sat;
pub mod schemes;
pub mod simulator;
pub mod spsa;

pub use error::{Error, Result};

/// Logistic-map parameter used throughout; r = 4 is the fully chaotic point.
pub const LOGISTIC_R: f64 = 4.0;

/// Largest variable count the dense simulator accepts (2^20 amplitudes).
pub const MAX_QUBITS: usize = 20;
