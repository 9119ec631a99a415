//! Post-processing: wall positions, delays, energies and logic verdicts.

use std::io::{self, Write};

use crate::devices::{Device, DeviceKind};
use crate::magnetodynamics::WireState;
use crate::transient::Trace;

/// Located wall: interpolated zero crossing of m_x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DwPosition {
    /// Distance from the start of the wire, m.
    pub position: f64,
    /// Number of sign changes found along the wire.
    pub count: usize,
}

/// Position of the domain wall furthest along the wire, or `None` for a
/// wire without a sign change in m_x.
pub fn dw_position(wire: &WireState) -> Option<DwPosition> {
    let mut count = 0;
    let mut last = None;
    for (i, pair) in wire.m.windows(2).enumerate() {
        let (a, b) = (pair[0][0], pair[1][0]);
        if (a > 0.0) != (b > 0.0) {
            count += 1;
            let frac = if a == b { 0.5 } else { a / (a - b) };
            last = Some(wire.cell_center(i) + frac * wire.mesh);
        }
    }
    last.map(|position| DwPosition { position, count })
}

/// First time the wire's mean m_x passes `threshold` with the sign opposite
/// to its initial value and stays there until the end of the trace.
/// Linearly interpolated between samples.
pub fn switching_delay(trace: &Trace, wire: usize, threshold: f64) -> Option<f64> {
    let mx = trace.mx(wire);
    let t = trace.times();
    let s0 = mx.first()?.signum();
    let beyond = |v: f64| v * s0 <= -threshold;
    let mut k = mx.len();
    while k > 0 && beyond(mx[k - 1]) {
        k -= 1;
    }
    if k == mx.len() {
        return None;
    }
    if k == 0 {
        return Some(t[0]);
    }
    // Crossing between samples k-1 and k.
    let target = -threshold * s0;
    let (a, b) = (mx[k - 1], mx[k]);
    let frac = if a == b { 1.0 } else { ((target - a) / (b - a)).clamp(0.0, 1.0) };
    Some(t[k - 1] + frac * (t[k] - t[k - 1]))
}

/// Wiring resistance seen by the drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WiringModel {
    /// `r_ref` at a contact of length `l_ref`, scaling inversely with
    /// length, averaged over the input and output contacts.
    Averaged { r_ref: f64, l_ref: f64 },
    /// A fixed resistance.
    Fixed(f64),
}

impl Default for WiringModel {
    fn default() -> Self {
        WiringModel::Averaged {
            r_ref: 300.0,
            l_ref: 10e-9,
        }
    }
}

impl WiringModel {
    pub fn resistance(&self, l_input: f64, l_output: f64) -> f64 {
        match *self {
            WiringModel::Averaged { r_ref, l_ref } => r_ref * (l_ref / l_input + l_ref / l_output) / 2.0,
            WiringModel::Fixed(r) => r,
        }
    }
}

/// `E = I^2 R tau`.
pub fn switching_energy(current: f64, pulse: f64, contact_lengths: (f64, f64), model: &WiringModel) -> f64 {
    current * current * model.resistance(contact_lengths.0, contact_lengths.1) * pulse
}

/// Expected output bit. Negative drive copies the input (or the majority of
/// three inputs), positive drive inverts it.
pub fn truth_table(kind: DeviceKind, drive_sign: f64, inputs: &[bool]) -> bool {
    let value = match kind {
        DeviceKind::Majority3 => {
            let ones = inputs.iter().filter(|&&b| b).count();
            ones * 2 > inputs.len()
        }
        DeviceKind::Sv | DeviceKind::Nlsv => inputs[0],
    };
    if drive_sign < 0.0 {
        value
    } else {
        !value
    }
}

/// Outcome of one switching run.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchReport {
    pub switched: bool,
    /// Time to full reversal of the output wire; equals `dw_arrival_at`.
    pub delay: Option<f64>,
    pub dw_created_at: Option<f64>,
    pub dw_arrival_at: Option<f64>,
    /// Wiring energy of the drive pulse, J.
    pub energy: f64,
    pub final_state: bool,
    pub expected_state: bool,
}

impl SwitchReport {
    /// Summarize a finished run. `device` holds the final wire states.
    pub fn from_run(device: &Device, trace: &Trace, threshold: f64, wiring: &WiringModel) -> Self {
        let cfg = &device.config;
        let out = device.output;
        let delay = switching_delay(trace, out, threshold);
        let created = device
            .contacts
            .iter()
            .position(|c| c.role == crate::devices::ContactRole::Output)
            .and_then(|j| trace.contact_flip_at[j]);
        let final_state = device.bit(out);
        let drive_sign = if cfg.drive.current < 0.0 { -1.0 } else { 1.0 };
        // Total current drawn from the supply: one drive per input.
        let current = cfg.drive.current.abs() * device.inputs.len() as f64;
        SwitchReport {
            switched: delay.is_some(),
            delay,
            dw_created_at: created,
            dw_arrival_at: delay,
            energy: switching_energy(
                current,
                trace.drive_off_at,
                (cfg.contacts.l_input, cfg.contacts.l_output),
                wiring,
            ),
            final_state,
            expected_state: device.expected_output(drive_sign),
        }
    }

    pub fn correct(&self) -> bool {
        self.final_state == self.expected_state
    }

    pub const CSV_HEADER: &'static str =
        "switched,delay_s,dw_created_at_s,dw_arrival_at_s,energy_J,final_state,expected_state";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        format!(
            "{},{},{},{},{:e},{},{}",
            self.switched,
            opt(self.delay),
            opt(self.dw_created_at),
            opt(self.dw_arrival_at),
            self.energy,
            u8::from(self.final_state),
            u8::from(self.expected_state)
        )
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        writeln!(w, "{}", self.csv_row())
    }

    /// One-line human-readable summary.
    pub fn summary(&self) -> String {
        let ns = |v: Option<f64>| v.map(|x| format!("{:.3} ns", x * 1e9)).unwrap_or_else(|| "-".into());
        format!(
            "switched={} delay={} created={} energy={:.2} fJ final={} expected={}",
            self.switched,
            ns(self.delay),
            ns(self.dw_created_at),
            self.energy * 1e15,
            u8::from(self.final_state),
            u8::from(self.expected_state)
        )
    }
}
