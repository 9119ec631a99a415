use std::path::Path;

use ini::Ini;

use super::config::{ConfigError, DemagModel, DeviceConfig, TorqueMode, ALL_KEYS, REQUIRED_KEYS};

/// Parse an INI-style configuration. Sections are `[fm]`, `[channel]`,
/// `[interface]`, `[contacts]`, `[drive]`, `[sim]` and `[device]`; every
/// key in [`REQUIRED_KEYS`] must be present, the rest fall back to the
/// defaults.
pub fn parse_config(text: &str) -> Result<DeviceConfig, ConfigError> {
    let ini = Ini::load_from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.line,
        col: e.col,
        msg: e.msg.to_string(),
    })?;
    let mut cfg = DeviceConfig::default();
    let mut seen = Vec::new();
    for (section, props) in ini.iter() {
        for (k, v) in props.iter() {
            let (line, col) = locate(text, section, k);
            let Some(section) = section else {
                return Err(ConfigError::Syntax {
                    line,
                    col,
                    msg: format!("key `{k}` outside any section"),
                });
            };
            let key = format!("{section}.{k}");
            match cfg.set(&key, v) {
                Ok(()) => seen.push(key),
                Err(ConfigError::UnknownKey(key)) => {
                    return Err(ConfigError::Syntax {
                        line,
                        col,
                        msg: format!("unknown key `{key}`"),
                    })
                }
                Err(ConfigError::BadValue { key, value, msg, .. }) => {
                    return Err(ConfigError::BadValue {
                        key,
                        value,
                        msg,
                        line: Some(line),
                        col: Some(col + k.len()),
                    })
                }
                Err(e) => return Err(e),
            }
        }
    }
    if let Some(missing) = REQUIRED_KEYS.iter().find(|k| !seen.iter().any(|s| s == *k)) {
        return Err(ConfigError::MissingKey(missing.to_string()));
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<DeviceConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// 1-based line and column of `key` inside `section`.
fn locate(text: &str, section: Option<&str>, key: &str) -> (usize, usize) {
    let mut current: Option<String> = None;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim_start();
        if let Some(rest) = line.strip_prefix('[') {
            current = rest.split(']').next().map(|s| s.trim().to_string());
            continue;
        }
        if current.as_deref() != section {
            continue;
        }
        if let Some((k, _)) = line.split_once(['=', ':']) {
            if k.trim() == key {
                return (n + 1, raw.len() - line.len() + 1);
            }
        }
    }
    (0, 0)
}

impl DeviceConfig {
    /// Value of `section.key` in SI units, as accepted by [`DeviceConfig::set`].
    pub fn get(&self, key: &str) -> Option<String> {
        let f = |v: f64| Some(format!("{v:e}"));
        match key {
            "fm.rho" => f(self.fm.rho),
            "fm.beta" => f(self.fm.beta),
            "fm.l_sf_parallel" => f(self.fm.l_sf_parallel),
            "fm.l_sf_perp" => f(self.fm.l_sf_perp),
            "fm.M_s" => f(self.fm.ms),
            "fm.A" => f(self.fm.a_ex),
            "fm.K_u" => f(self.fm.k_u),
            "fm.alpha" => f(self.fm.alpha),
            "fm.l_FM" => f(self.fm.l_fm),
            "fm.w_FM" => f(self.fm.w_fm),
            "fm.t_FM" => f(self.fm.t_fm),
            "fm.mesh" => f(self.fm.mesh),
            "fm.demag_model" => Some(
                match self.fm.demag_model {
                    DemagModel::Strip => "strip",
                    DemagModel::Prism => "prism",
                }
                .into(),
            ),
            "channel.l_NM" => f(self.channel.l_nm),
            "channel.w_NM" => f(self.channel.w_nm),
            "channel.t_NM" => f(self.channel.t_nm),
            "channel.rho_N" => f(self.channel.rho_n),
            "channel.lambda_N" => f(self.channel.lambda_n),
            "channel.pitch" => f(self.channel.pitch),
            "channel.shunt_length" => f(self.channel.shunt_length),
            "channel.arm_length" => f(self.channel.arm_length),
            "interface.G_upup" => f(self.interface.g_upup),
            "interface.G_downdown" => f(self.interface.g_downdown),
            "interface.G_updown" => f(self.interface.g_updown),
            "interface.mix_factor" => f(self.interface.mix_factor),
            "interface.G_updown_imag" => f(self.interface.g_updown_imag),
            "contacts.L_input" => f(self.contacts.l_input),
            "contacts.L_output" => f(self.contacts.l_output),
            "contacts.alpha_end" => f(self.contacts.alpha_end),
            "drive.current" => f(self.drive.current),
            "drive.pulse" => f(self.drive.pulse),
            "drive.early_cutoff" => Some(self.drive.early_cutoff.to_string()),
            "sim.dt" => f(self.sim.dt),
            "sim.duration" => f(self.sim.duration),
            "sim.temperature" => f(self.sim.temperature),
            "sim.seed" => Some(self.sim.seed.to_string()),
            "sim.refresh_stride" => Some(self.sim.refresh_stride.to_string()),
            "sim.sample_stride" => Some(self.sim.sample_stride.to_string()),
            "sim.torque_mode" => Some(
                match self.sim.torque_mode {
                    TorqueMode::PerCell => "per_cell",
                    TorqueMode::ContactAveraged => "contact_averaged",
                }
                .into(),
            ),
            "sim.tilt" => f(self.sim.tilt),
            "device.kind" => Some(self.device.kind.name().into()),
            "device.inputs" => Some(
                self.device
                    .inputs
                    .iter()
                    .map(|&b| if b { "1" } else { "0" })
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            "device.output" => Some(match self.device.output {
                None => "auto".into(),
                Some(b) => u8::from(b).to_string(),
            }),
            _ => None,
        }
    }

    /// The full configuration as an INI document that [`parse_config`]
    /// reads back to an equal value.
    pub fn to_ini_string(&self) -> String {
        let mut out = String::new();
        let mut section = "";
        for key in ALL_KEYS {
            let (s, k) = key.split_once('.').expect("dotted key");
            if s != section {
                if !section.is_empty() {
                    out.push('\n');
                }
                out.push_str(&format!("[{s}]\n"));
                section = s;
            }
            out.push_str(&format!("{k} = {}\n", self.get(key).expect("listed key")));
        }
        out
    }
}
