//! Counterdiabatic driving restricted to the Kibble-Zurek impulse regime.
//!
//! Two models are provided: a Landau-Zener two-level system ([`lz`]) and the
//! periodic transverse-field Ising chain ([`tfim`]), the latter both as
//! decoupled momentum modes and as a dense spin chain with range-truncated
//! control. [`protocol`] runs either under no control, full control, or
//! control switched on only inside the impulse window.

pub mod cli;
pub mod error;
pub mod kzm;
pub mod lz;
pub mod numerics;
pub mod protocol;
pub mod tfim;

pub use error::{Error, Result};
pub use kzm::{ImpulseWindow, RampSchedule, SwitchingFunction};
pub use lz::LzParams;
pub use protocol::{
    run_protocol, simulate, ControlMode, ControlledModel, CostReport, Protocol, RunResult, SimulationTrace,
};
pub use tfim::{MomentumModel, SpinModel, TfimParams, TruncationRange};
