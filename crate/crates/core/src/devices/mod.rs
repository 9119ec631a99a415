//! Device templates: lateral spin valve, three-input majority gate and a
//! non-local spin valve, built from a [`DeviceConfig`].

mod build;
mod config;
mod file;

pub use build::{
    build_majority3, build_nlsv, build_sv, drive_polarity_semantics, Contact, ContactRole, Device,
};
pub use config::{
    ChannelConfig, ConfigError, ContactConfig, DemagModel, DeviceConfig, DeviceKind, DriveConfig, FmConfig,
    InterfaceConfig, LogicConfig, SimConfig, TorqueMode, ALL_KEYS, REQUIRED_KEYS,
};
pub use file::{load_config, parse_config};

use thiserror::Error;

use crate::magnetodynamics::LlgError;
use crate::spincircuit::CircuitError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeviceError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Llg(#[from] LlgError),
}
