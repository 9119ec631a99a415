//! Four-component (charge + spin) nodal analysis.
//!
//! Every element is a 4x4 conductance block acting on (charge, sx, sy, sz)
//! voltages. Ferromagnet and interface blocks depend on the local
//! magnetization and are rotated into the global frame before stamping.

mod conductance;
mod graph;
mod reduced;

pub use conductance::{
    fm_conductances, interface_conductances, local_frame, nm_conductances, Conductance4, FmBulk,
    InterfaceBlocks, InterfaceParams, PiModel, BASIS,
};
pub use graph::{
    describe_nodes, stt_at_contact, Branch, BranchKind, CellRef, CircuitGraph, CurrentSource,
    NodalSystem, NodeId, SolveResult, Terminal,
};
pub use reduced::ReducedCircuit;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("invalid geometry: {what} = {value:e} must be positive")]
    InvalidGeometry { what: &'static str, value: f64 },
    #[error("conductivity polarization {0} outside [0, 1)")]
    UnphysicalPolarization(f64),
    #[error("interface conductances must be positive (g_up={g_up:e}, g_down={g_down:e}, g_mix={g_mix:e})")]
    InvalidInterface { g_up: f64, g_down: f64, g_mix: f64 },
    #[error("magnetization is not a unit vector (|m| = {norm})")]
    NonUnitMagnetization { norm: f64 },
    #[error("invalid circuit graph: {0}")]
    InvalidGraph(String),
    #[error("singular nodal system; floating node set {floating:?}")]
    Singular { floating: Vec<NodeId> },
}
