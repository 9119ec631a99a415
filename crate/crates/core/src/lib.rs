//! Transient simulation of spin-valve logic gates driven by spin-transfer
//! torque, with domain-wall automotion carrying the result down
//! ferromagnetic interconnects.
//!
//! The crate is organised bottom-up:
//!
//! * [`spincircuit`] builds 4x4 (charge + three spin components) conductance
//!   blocks, assembles and solves the nodal system and extracts the
//!   transverse spin current absorbed under each contact cell.
//! * [`magnetodynamics`] evolves each ferromagnetic wire as a chain of
//!   exchange-coupled macrospins under the stochastic LLG equation.
//! * [`devices`] turns a [`devices::DeviceConfig`] into a complete device:
//!   circuit graph plus wires, with contact cells bound to circuit ports.
//! * [`transient`] runs the self-consistent circuit/LLG loop and records a
//!   [`transient::Trace`].
//! * [`analysis`] reduces traces to wall positions, delays, energies and
//!   logic verdicts.

pub mod analysis;
pub mod consts;
pub mod devices;
pub mod linalg;
pub mod magnetodynamics;
pub mod spincircuit;
pub mod transient;
pub mod vec3;

pub use analysis::SwitchReport;
pub use devices::{Device, DeviceConfig, DeviceKind};
pub use transient::{run_transient, Trace, TransientParams};
