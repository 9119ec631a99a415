//! Self-consistent circuit / LLG time loop.

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analysis::dw_position;
use crate::devices::{Device, DeviceConfig, TorqueMode};
use crate::magnetodynamics::{Integrator, LlgError, TorqueField};
use crate::spincircuit::{CircuitError, ReducedCircuit};
use crate::vec3::{scale, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct TransientParams {
    pub duration: f64,
    pub dt: f64,
    /// Re-solve the circuit every this many steps.
    pub refresh_stride: usize,
    /// Record a sample every this many steps.
    pub sample_stride: usize,
    /// Drive amplitude per input, A.
    pub current: f64,
    pub pulse: f64,
    pub early_cutoff: bool,
    pub torque_mode: TorqueMode,
    pub seed: u64,
}

impl TransientParams {
    pub fn from_config(cfg: &DeviceConfig) -> Self {
        Self {
            duration: cfg.sim.duration,
            dt: cfg.sim.dt,
            refresh_stride: cfg.sim.refresh_stride,
            sample_stride: cfg.sim.sample_stride,
            current: cfg.drive.current,
            pulse: cfg.drive.pulse,
            early_cutoff: cfg.drive.early_cutoff,
            torque_mode: cfg.sim.torque_mode,
            seed: cfg.sim.seed,
        }
    }
}

/// Rectangular pulse: `amplitude` for `0 <= t < duration`, else 0.
pub fn pulse_waveform(t: f64, amplitude: f64, duration: f64) -> f64 {
    if (0.0..duration).contains(&t) {
        amplitude
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    /// Average magnetization of each wire.
    pub m: Vec<Vec3>,
    pub dw: Vec<Option<f64>>,
    /// Spin current absorbed by each contact, summed over its cells, A.
    pub contact_spin: Vec<Vec3>,
    pub drive: f64,
    /// Total micromagnetic energy of all wires, J.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub samples: Vec<Sample>,
    pub n_wires: usize,
    pub n_contacts: usize,
    pub dt: f64,
    /// Time the drive went to zero for good.
    pub drive_off_at: f64,
    /// Per contact: first time the region's mean m_x changed sign.
    pub contact_flip_at: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransientError {
    #[error("invalid transient parameters: {0}")]
    InvalidParams(String),
    #[error("circuit solve failed at step {step}: {source}")]
    Circuit { step: usize, source: CircuitError },
    #[error("LLG step failed at step {step} on wire {wire}: {source}")]
    Llg { step: usize, wire: usize, source: LlgError },
}

/// Run the coupled simulation. `device.wires` holds the final state on
/// return.
pub fn run_transient(device: &mut Device, params: &TransientParams) -> Result<Trace, TransientError> {
    let p = params;
    if !(p.dt > 0.0 && p.duration > 0.0) || p.refresh_stride == 0 || p.sample_stride == 0 {
        return Err(TransientError::InvalidParams(format!("{p:?}")));
    }
    let n_steps = (p.duration / p.dt).round() as usize;
    if n_steps > 10_000_000 {
        return Err(TransientError::InvalidParams(format!("{n_steps} steps exceeds 1e7")));
    }
    let mut circuit = ReducedCircuit::new(&device.graph).map_err(|source| TransientError::Circuit { step: 0, source })?;
    let mat = device.material;
    let mut torques: Vec<TorqueField> = device.wires.iter().map(|w| TorqueField::new(w, &mat)).collect();
    let mut integrators: Vec<Integrator> = device.wires.iter().map(|w| Integrator::new(w.n_cells())).collect();
    let mut rngs: Vec<ChaCha8Rng> = (0..device.wires.len())
        .map(|k| {
            let mut r = ChaCha8Rng::seed_from_u64(p.seed);
            r.set_stream(k as u64);
            r
        })
        .collect();

    let n_contacts = device.contacts.len();
    let initial_sign: Vec<f64> = device
        .contacts
        .iter()
        .map(|c| device.wires[c.wire].average_over(c.cells.clone())[0].signum())
        .collect();
    let output_contact = device
        .contacts
        .iter()
        .position(|c| c.role == crate::devices::ContactRole::Output);
    let mut flip_at: Vec<Option<f64>> = vec![None; n_contacts];
    let mut contact_spin = vec![[0.0; 3]; n_contacts];
    let mut cut_off_at: Option<f64> = None;
    let mut samples = Vec::with_capacity(n_steps / p.sample_stride + 2);

    for step in 0..=n_steps {
        let t = step as f64 * p.dt;
        for (j, c) in device.contacts.iter().enumerate() {
            if flip_at[j].is_none() {
                let mx = device.wires[c.wire].average_over(c.cells.clone())[0];
                if mx * initial_sign[j] < 0.0 {
                    flip_at[j] = Some(t);
                    if p.early_cutoff && Some(j) == output_contact && cut_off_at.is_none() && t < p.pulse {
                        cut_off_at = Some(t);
                    }
                }
            }
        }
        let drive = if cut_off_at.is_some() {
            0.0
        } else {
            pulse_waveform(t, p.current, p.pulse)
        };

        if drive == 0.0 {
            torques.iter_mut().for_each(TorqueField::clear);
            contact_spin.iter_mut().for_each(|s| *s = [0.0; 3]);
        } else if step % p.refresh_stride == 0 {
            let wires = &device.wires;
            circuit
                .solve(|c| wires[c.wire].m[c.cell], drive)
                .map_err(|source| TransientError::Circuit { step, source })?;
            for (j, c) in device.contacts.iter().enumerate() {
                let tf = &mut torques[c.wire];
                let mut total = [0.0; 3];
                for cell in c.cells.clone() {
                    // Moment delivered to the magnet is opposite to the
                    // circuit-convention shunt current.
                    let i = circuit
                        .absorbed_spin_current(crate::spincircuit::CellRef { wire: c.wire, cell })
                        .expect("contact cell is in the circuit");
                    let is = scale(i, -1.0);
                    tf.spin_current[cell] = is;
                    for k in 0..3 {
                        total[k] += is[k];
                    }
                }
                if p.torque_mode == TorqueMode::ContactAveraged {
                    let mean = scale(total, 1.0 / c.n_cells() as f64);
                    for cell in c.cells.clone() {
                        tf.spin_current[cell] = mean;
                    }
                }
                contact_spin[j] = total;
            }
        }

        if step % p.sample_stride == 0 || step == n_steps {
            samples.push(Sample {
                t,
                m: device.wires.iter().map(|w| w.average()).collect(),
                dw: device.wires.iter().map(|w| dw_position(w).map(|d| d.position)).collect(),
                contact_spin: contact_spin.clone(),
                drive,
                energy: device.wires.iter().map(|w| w.energy(&mat)).sum(),
            });
        }
        if step == n_steps {
            break;
        }
        for (k, w) in device.wires.iter_mut().enumerate() {
            integrators[k]
                .step(w, &mat, &torques[k], p.dt, &mut rngs[k])
                .map_err(|source| TransientError::Llg { step, wire: k, source })?;
        }
    }

    Ok(Trace {
        samples,
        n_wires: device.wires.len(),
        n_contacts,
        dt: p.dt,
        drive_off_at: cut_off_at.unwrap_or(p.pulse.min(n_steps as f64 * p.dt)),
        contact_flip_at: flip_at,
    })
}

impl Trace {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// Time series of a wire's mean m_x.
    pub fn mx(&self, wire: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.m[wire][0]).collect()
    }

    pub fn final_sample(&self) -> &Sample {
        self.samples.last().expect("trace has at least one sample")
    }

    pub fn csv_header(&self) -> String {
        let mut cols = vec!["t_s".to_string()];
        for i in 0..self.n_wires {
            cols.extend([
                format!("w{i}_mx"),
                format!("w{i}_my"),
                format!("w{i}_mz"),
                format!("w{i}_dw_pos_m"),
            ]);
        }
        for j in 0..self.n_contacts {
            cols.extend([format!("c{j}_isx_A"), format!("c{j}_isy_A"), format!("c{j}_isz_A")]);
        }
        cols.push("drive_A".into());
        cols.join(",")
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.csv_header())?;
        let mut line = String::new();
        for s in &self.samples {
            use std::fmt::Write as _;
            line.clear();
            let _ = write!(line, "{:e}", s.t);
            for (m, dw) in s.m.iter().zip(&s.dw) {
                let _ = write!(line, ",{:e},{:e},{:e},", m[0], m[1], m[2]);
                if let Some(x) = dw {
                    let _ = write!(line, "{x:e}");
                }
            }
            for is in &s.contact_spin {
                let _ = write!(line, ",{:e},{:e},{:e}", is[0], is[1], is[2]);
            }
            let _ = write!(line, ",{:e}", s.drive);
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}
