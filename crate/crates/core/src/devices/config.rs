use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::magnetodynamics::{prism_demag_factors, strip_demag_factors, MaterialFm};

/// Device topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviceKind {
    /// Lateral spin valve: buffer or inverter depending on drive polarity.
    Sv,
    /// Three inputs sharing one output through a star-shaped channel.
    Majority3,
    /// Non-local spin valve with a grounded drive arm.
    Nlsv,
}

impl DeviceKind {
    pub fn name(self) -> &'static str {
        match self {
            DeviceKind::Sv => "sv",
            DeviceKind::Majority3 => "majority3",
            DeviceKind::Nlsv => "nlsv",
        }
    }

    pub fn n_inputs(self) -> usize {
        match self {
            DeviceKind::Majority3 => 3,
            _ => 1,
        }
    }
}

impl FromStr for DeviceKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "sv" => Ok(DeviceKind::Sv),
            "majority3" | "majority" => Ok(DeviceKind::Majority3),
            "nlsv" => Ok(DeviceKind::Nlsv),
            _ => Err(format!("unknown device kind `{s}` (sv, majority3, nlsv)")),
        }
    }
}

impl fmt::Display for DeviceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemagModel {
    Strip,
    Prism,
}

/// How the absorbed spin current is distributed over a contact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorqueMode {
    /// Each cell takes the spin current of its own interface.
    PerCell,
    /// Every cell of a contact takes the contact mean.
    ContactAveraged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FmConfig {
    /// Resistivity, ohm m.
    pub rho: f64,
    pub beta: f64,
    pub l_sf_parallel: f64,
    pub l_sf_perp: f64,
    pub ms: f64,
    pub a_ex: f64,
    pub k_u: f64,
    /// Bulk Gilbert damping.
    pub alpha: f64,
    pub l_fm: f64,
    pub w_fm: f64,
    pub t_fm: f64,
    pub mesh: f64,
    pub demag_model: DemagModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    /// Input-to-output channel span.
    pub l_nm: f64,
    pub w_nm: f64,
    pub t_nm: f64,
    pub rho_n: f64,
    pub lambda_n: f64,
    /// Node pitch between contacts.
    pub pitch: f64,
    /// Ground arm of the non-local geometry.
    pub shunt_length: f64,
    /// Majority gate: input arm to junction. The output arm takes the rest
    /// of `l_nm`.
    pub arm_length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceConfig {
    /// Conductances per area, S/m^2.
    pub g_upup: f64,
    pub g_downdown: f64,
    pub g_updown: f64,
    /// Multiplier on the real mixing conductance.
    pub mix_factor: f64,
    pub g_updown_imag: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactConfig {
    pub l_input: f64,
    pub l_output: f64,
    pub alpha_end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveConfig {
    /// Per-input current, A. Negative draws current out of the input
    /// contact.
    pub current: f64,
    pub pulse: f64,
    /// Turn the drive off once the output contact region has reversed.
    pub early_cutoff: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub duration: f64,
    pub temperature: f64,
    pub seed: u64,
    pub refresh_stride: usize,
    pub sample_stride: usize,
    pub torque_mode: TorqueMode,
    /// Initial in-plane tilt of the output wire, rad.
    pub tilt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogicConfig {
    pub kind: DeviceKind,
    /// Input bits (one for sv/nlsv, three for majority3).
    pub inputs: Vec<bool>,
    /// Initial output bit; `None` starts from the complement of the
    /// expected result.
    pub output: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceConfig {
    pub fm: FmConfig,
    pub channel: ChannelConfig,
    pub interface: InterfaceConfig,
    pub contacts: ContactConfig,
    pub drive: DriveConfig,
    pub sim: SimConfig,
    pub device: LogicConfig,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        Self {
            fm: FmConfig {
                rho: 1.4e-7,
                beta: 0.6,
                l_sf_parallel: 5e-9,
                l_sf_perp: 0.8e-9,
                ms: 8e5,
                a_ex: 1.3e-11,
                k_u: 0.0,
                alpha: 0.007,
                l_fm: 300e-9,
                w_fm: 20e-9,
                t_fm: 2e-9,
                mesh: 2e-9,
                demag_model: DemagModel::Strip,
            },
            channel: ChannelConfig {
                l_nm: 70e-9,
                w_nm: 20e-9,
                t_nm: 20e-9,
                rho_n: 3e-8,
                lambda_n: 100e-9,
                pitch: 10e-9,
                shunt_length: 30e-9,
                arm_length: 35e-9,
            },
            interface: InterfaceConfig {
                g_upup: 0.9e15,
                g_downdown: 0.1e15,
                g_updown: 0.39e15,
                mix_factor: 1.0,
                g_updown_imag: 0.0,
            },
            contacts: ContactConfig {
                l_input: 40e-9,
                l_output: 20e-9,
                alpha_end: 0.18,
            },
            drive: DriveConfig {
                current: 200e-6,
                pulse: 1.5e-9,
                early_cutoff: false,
            },
            sim: SimConfig {
                dt: 0.05e-12,
                duration: 3e-9,
                temperature: 300.0,
                seed: 0,
                refresh_stride: 1,
                sample_stride: 10,
                torque_mode: TorqueMode::PerCell,
                tilt: 0.02,
            },
            device: LogicConfig {
                kind: DeviceKind::Sv,
                inputs: vec![true],
                output: Some(true),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("{}bad value `{value}` for `{key}`: {msg}", location(*line, *col))]
    BadValue {
        key: String,
        value: String,
        msg: String,
        line: Option<usize>,
        col: Option<usize>,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

fn location(line: Option<usize>, col: Option<usize>) -> String {
    match (line, col) {
        (Some(l), Some(c)) => format!("line {l}, column {c}: "),
        (Some(l), None) => format!("line {l}: "),
        _ => String::new(),
    }
}

/// Physical dimension of a numeric key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Dim {
    Plain,
    Length,
    Time,
    Current,
    Temperature,
}

/// Unit suffixes as powers of ten.
const UNITS: &[(&str, Dim, i32)] = &[
    ("nm", Dim::Length, -9),
    ("um", Dim::Length, -6),
    ("mm", Dim::Length, -3),
    ("m", Dim::Length, 0),
    ("fs", Dim::Time, -15),
    ("ps", Dim::Time, -12),
    ("ns", Dim::Time, -9),
    ("us", Dim::Time, -6),
    ("s", Dim::Time, 0),
    ("nA", Dim::Current, -9),
    ("uA", Dim::Current, -6),
    ("mA", Dim::Current, -3),
    ("A", Dim::Current, 0),
    ("K", Dim::Temperature, 0),
];

/// Parse a number with an optional unit suffix into SI. The suffix shifts
/// the decimal exponent, so `300nm` parses to the same double as `3e-7`.
pub(crate) fn parse_quantity(text: &str, dim: Dim) -> Result<f64, String> {
    let t = text.trim();
    let split = t
        .char_indices()
        .find(|&(i, c)| c.is_ascii_alphabetic() && !is_exponent(t, i))
        .map(|(i, _)| i)
        .unwrap_or(t.len());
    let (num, unit) = (t[..split].trim(), t[split..].trim());
    let check = |v: f64| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err("value must be finite".to_string())
        }
    };
    let value: f64 = num.parse().map_err(|_| format!("`{num}` is not a number"))?;
    check(value)?;
    if unit.is_empty() {
        return Ok(value);
    }
    match UNITS.iter().find(|(u, _, _)| *u == unit) {
        Some(&(_, d, shift)) if d == dim => {
            let (mantissa, exp) = match num.find(['e', 'E']) {
                Some(i) => (&num[..i], num[i + 1..].parse::<i32>().map_err(|e| e.to_string())?),
                None => (num, 0),
            };
            let scaled: f64 = format!("{mantissa}e{}", exp + shift)
                .parse()
                .map_err(|_| format!("`{num}` is not a number"))?;
            check(scaled)
        }
        Some(_) => Err(format!("unit `{unit}` does not fit this key")),
        None => Err(format!("unknown unit `{unit}`")),
    }
}

fn is_exponent(t: &str, i: usize) -> bool {
    let b = t.as_bytes();
    (b[i] == b'e' || b[i] == b'E')
        && i > 0
        && (b[i - 1].is_ascii_digit() || b[i - 1] == b'.')
        && b.get(i + 1).is_some_and(|c| c.is_ascii_digit() || *c == b'-' || *c == b'+')
}

fn parse_bool(text: &str) -> Result<bool, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => Err(format!("`{other}` is not a boolean")),
    }
}

fn parse_bits(text: &str) -> Result<Vec<bool>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| match s {
            "1" => Ok(true),
            "0" => Ok(false),
            _ => Err(format!("`{s}` is not a bit")),
        })
        .collect()
}

/// Keys that a configuration file must spell out: the material and
/// geometry parameters of the reference device.
pub const REQUIRED_KEYS: &[&str] = &[
    "fm.rho",
    "fm.beta",
    "fm.l_sf_parallel",
    "fm.l_sf_perp",
    "fm.M_s",
    "fm.A",
    "fm.alpha",
    "fm.l_FM",
    "fm.w_FM",
    "fm.t_FM",
    "channel.l_NM",
    "channel.w_NM",
    "channel.t_NM",
    "interface.G_upup",
    "interface.G_downdown",
    "interface.G_updown",
];

/// Every accepted `section.key`.
pub const ALL_KEYS: &[&str] = &[
    "fm.rho",
    "fm.beta",
    "fm.l_sf_parallel",
    "fm.l_sf_perp",
    "fm.M_s",
    "fm.A",
    "fm.K_u",
    "fm.alpha",
    "fm.l_FM",
    "fm.w_FM",
    "fm.t_FM",
    "fm.mesh",
    "fm.demag_model",
    "channel.l_NM",
    "channel.w_NM",
    "channel.t_NM",
    "channel.rho_N",
    "channel.lambda_N",
    "channel.pitch",
    "channel.shunt_length",
    "channel.arm_length",
    "interface.G_upup",
    "interface.G_downdown",
    "interface.G_updown",
    "interface.mix_factor",
    "interface.G_updown_imag",
    "contacts.L_input",
    "contacts.L_output",
    "contacts.alpha_end",
    "drive.current",
    "drive.pulse",
    "drive.early_cutoff",
    "sim.dt",
    "sim.duration",
    "sim.temperature",
    "sim.seed",
    "sim.refresh_stride",
    "sim.sample_stride",
    "sim.torque_mode",
    "sim.tilt",
    "device.kind",
    "device.inputs",
    "device.output",
];

impl DeviceConfig {
    /// Reference defaults with the given topology and logic inputs.
    pub fn for_kind(kind: DeviceKind) -> Self {
        let mut c = Self::default();
        c.device.kind = kind;
        c.device.inputs = vec![true; kind.n_inputs()];
        c.device.output = None;
        if kind == DeviceKind::Majority3 {
            c.drive.current = -100e-6;
        }
        if kind == DeviceKind::Nlsv {
            c.contacts.l_input = 10e-9;
            c.contacts.l_output = 10e-9;
        }
        c
    }

    /// Set one `section.key` from its textual value. Used by the file
    /// loader and for command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        self.set_inner(key, value).map_err(|msg| match msg {
            SetError::Unknown => ConfigError::UnknownKey(key.to_string()),
            SetError::Value(msg) => ConfigError::BadValue {
                key: key.to_string(),
                value: value.to_string(),
                msg,
                line: None,
                col: None,
            },
        })
    }

    fn set_inner(&mut self, key: &str, v: &str) -> Result<(), SetError> {
        use Dim::*;
        let q = |dim| parse_quantity(v, dim).map_err(SetError::Value);
        let int = || v.trim().parse::<u64>().map_err(|e| SetError::Value(e.to_string()));
        match key {
            "fm.rho" => self.fm.rho = q(Plain)?,
            "fm.beta" => self.fm.beta = q(Plain)?,
            "fm.l_sf_parallel" => self.fm.l_sf_parallel = q(Length)?,
            "fm.l_sf_perp" => self.fm.l_sf_perp = q(Length)?,
            "fm.M_s" => self.fm.ms = q(Plain)?,
            "fm.A" => self.fm.a_ex = q(Plain)?,
            "fm.K_u" => self.fm.k_u = q(Plain)?,
            "fm.alpha" => self.fm.alpha = q(Plain)?,
            "fm.l_FM" => self.fm.l_fm = q(Length)?,
            "fm.w_FM" => self.fm.w_fm = q(Length)?,
            "fm.t_FM" => self.fm.t_fm = q(Length)?,
            "fm.mesh" => self.fm.mesh = q(Length)?,
            "fm.demag_model" => {
                self.fm.demag_model = match v.trim() {
                    "strip" => DemagModel::Strip,
                    "prism" => DemagModel::Prism,
                    o => return Err(SetError::Value(format!("`{o}` is not strip or prism"))),
                }
            }
            "channel.l_NM" => self.channel.l_nm = q(Length)?,
            "channel.w_NM" => self.channel.w_nm = q(Length)?,
            "channel.t_NM" => self.channel.t_nm = q(Length)?,
            "channel.rho_N" => self.channel.rho_n = q(Plain)?,
            "channel.lambda_N" => self.channel.lambda_n = q(Length)?,
            "channel.pitch" => self.channel.pitch = q(Length)?,
            "channel.shunt_length" => self.channel.shunt_length = q(Length)?,
            "channel.arm_length" => self.channel.arm_length = q(Length)?,
            "interface.G_upup" => self.interface.g_upup = q(Plain)?,
            "interface.G_downdown" => self.interface.g_downdown = q(Plain)?,
            "interface.G_updown" => self.interface.g_updown = q(Plain)?,
            "interface.mix_factor" => self.interface.mix_factor = q(Plain)?,
            "interface.G_updown_imag" => self.interface.g_updown_imag = q(Plain)?,
            "contacts.L_input" => self.contacts.l_input = q(Length)?,
            "contacts.L_output" => self.contacts.l_output = q(Length)?,
            "contacts.alpha_end" => self.contacts.alpha_end = q(Plain)?,
            "drive.current" => self.drive.current = q(Current)?,
            "drive.pulse" => self.drive.pulse = q(Time)?,
            "drive.early_cutoff" => self.drive.early_cutoff = parse_bool(v).map_err(SetError::Value)?,
            "sim.dt" => self.sim.dt = q(Time)?,
            "sim.duration" => self.sim.duration = q(Time)?,
            "sim.temperature" => self.sim.temperature = q(Temperature)?,
            "sim.seed" => self.sim.seed = int()?,
            "sim.refresh_stride" => self.sim.refresh_stride = int()? as usize,
            "sim.sample_stride" => self.sim.sample_stride = int()? as usize,
            "sim.torque_mode" => {
                self.sim.torque_mode = match v.trim() {
                    "per_cell" => TorqueMode::PerCell,
                    "contact_averaged" => TorqueMode::ContactAveraged,
                    o => return Err(SetError::Value(format!("`{o}` is not per_cell or contact_averaged"))),
                }
            }
            "sim.tilt" => self.sim.tilt = q(Plain)?,
            "device.kind" => {
                let kind: DeviceKind = v.parse().map_err(SetError::Value)?;
                if kind.n_inputs() != self.device.inputs.len() {
                    self.device.inputs = vec![true; kind.n_inputs()];
                }
                self.device.kind = kind;
            }
            "device.inputs" => self.device.inputs = parse_bits(v).map_err(SetError::Value)?,
            "device.output" => {
                self.device.output = match v.trim() {
                    "auto" => None,
                    other => Some(parse_bool(other).map_err(SetError::Value)?),
                }
            }
            _ => return Err(SetError::Unknown),
        }
        Ok(())
    }

    /// Ferromagnet material for the wires.
    pub fn material(&self) -> MaterialFm {
        let demag = match self.fm.demag_model {
            DemagModel::Strip => strip_demag_factors(self.fm.w_fm, self.fm.t_fm),
            DemagModel::Prism => prism_demag_factors(self.fm.l_fm, self.fm.w_fm, self.fm.t_fm),
        };
        MaterialFm {
            ms: self.fm.ms,
            a_ex: self.fm.a_ex,
            k_u: self.fm.k_u,
            demag,
            gamma: crate::consts::GAMMA_E,
            temperature: self.sim.temperature,
            h_applied: [0.0; 3],
        }
    }

    /// Cells per wire.
    pub fn wire_cells(&self) -> usize {
        (self.fm.l_fm / self.fm.mesh).round() as usize
    }

    pub fn input_cells(&self) -> usize {
        (self.contacts.l_input / self.fm.mesh).round() as usize
    }

    pub fn output_cells(&self) -> usize {
        (self.contacts.l_output / self.fm.mesh).round() as usize
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |s: String| Err(ConfigError::Invalid(s));
        let positive = [
            ("fm.rho", self.fm.rho),
            ("fm.l_sf_parallel", self.fm.l_sf_parallel),
            ("fm.l_sf_perp", self.fm.l_sf_perp),
            ("fm.M_s", self.fm.ms),
            ("fm.A", self.fm.a_ex),
            ("fm.alpha", self.fm.alpha),
            ("fm.l_FM", self.fm.l_fm),
            ("fm.w_FM", self.fm.w_fm),
            ("fm.t_FM", self.fm.t_fm),
            ("fm.mesh", self.fm.mesh),
            ("channel.l_NM", self.channel.l_nm),
            ("channel.w_NM", self.channel.w_nm),
            ("channel.t_NM", self.channel.t_nm),
            ("channel.rho_N", self.channel.rho_n),
            ("channel.lambda_N", self.channel.lambda_n),
            ("channel.pitch", self.channel.pitch),
            ("channel.shunt_length", self.channel.shunt_length),
            ("channel.arm_length", self.channel.arm_length),
            ("interface.G_upup", self.interface.g_upup),
            ("interface.G_downdown", self.interface.g_downdown),
            ("contacts.L_input", self.contacts.l_input),
            ("contacts.L_output", self.contacts.l_output),
            ("contacts.alpha_end", self.contacts.alpha_end),
            ("drive.pulse", self.drive.pulse),
            ("sim.dt", self.sim.dt),
            ("sim.duration", self.sim.duration),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{k} = {v:e} must be positive"));
            }
        }
        if !(0.0..1.0).contains(&self.fm.beta) {
            return bad(format!("fm.beta = {} outside [0, 1)", self.fm.beta));
        }
        if self.interface.g_updown < 0.0 || self.interface.mix_factor < 0.0 {
            return bad("mixing conductance must be non-negative".into());
        }
        if self.sim.temperature < 0.0 {
            return bad("sim.temperature must be non-negative".into());
        }
        if self.sim.refresh_stride == 0 || self.sim.sample_stride == 0 {
            return bad("strides must be at least 1".into());
        }
        if self.sim.dt > 1e-12 {
            return bad(format!("sim.dt = {:e} s exceeds 1 ps", self.sim.dt));
        }
        if self.sim.duration / self.sim.dt > 1e7 {
            return bad("more than 1e7 steps".into());
        }
        let mesh = self.fm.mesh;
        for (k, l) in [
            ("fm.l_FM", self.fm.l_fm),
            ("contacts.L_input", self.contacts.l_input),
            ("contacts.L_output", self.contacts.l_output),
        ] {
            let n = l / mesh;
            if (n - n.round()).abs() > 1e-6 {
                return bad(format!("{k} = {l:e} m is not a multiple of the mesh {mesh:e} m"));
            }
        }
        if self.contacts.l_input > self.fm.l_fm || self.contacts.l_output > self.fm.l_fm {
            return bad("contact longer than the wire".into());
        }
        if self.device.kind == DeviceKind::Majority3 && self.channel.arm_length >= self.channel.l_nm {
            return bad("channel.arm_length must be shorter than channel.l_NM".into());
        }
        if self.device.inputs.len() != self.device.kind.n_inputs() {
            return bad(format!(
                "device.inputs has {} bits, {} needs {}",
                self.device.inputs.len(),
                self.device.kind,
                self.device.kind.n_inputs()
            ));
        }
        self.material()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }
}

enum SetError {
    Unknown,
    Value(String),
}
