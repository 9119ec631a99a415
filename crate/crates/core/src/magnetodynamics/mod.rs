//! Micromagnetic LLG dynamics of a 1-D ferromagnet wire with spin torque.

mod field;
mod llg;
mod material;
mod wire;

pub use field::{effective_field, thermal_sigma};
pub use llg::{llg_rhs, moment_count, Integrator, TorqueField};
pub use material::{prism_demag_factors, strip_demag_factors, MaterialFm};
pub use wire::{DomainWall, WireState};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LlgError {
    #[error("time step {0:e} s exceeds the 1 ps stability limit")]
    TimestepTooLarge(f64),
    #[error("non-finite magnetization in cell {cell}")]
    NonFinite { cell: usize },
    #[error("damping must be positive, got {0}")]
    InvalidDamping(f64),
    #[error("wire geometry must be positive")]
    InvalidGeometry,
    #[error("{0}")]
    OutOfRange(String),
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("torque field has {got} cells, wire has {expected}")]
    TorqueSize { got: usize, expected: usize },
}
