//! 4x4 conductance blocks for normal-metal segments, ferromagnet segments
//! and ferromagnet/normal-metal interfaces.
//!
//! Basis order is (charge, sx, sy, sz). Ferromagnet and interface blocks
//! are built in the local frame (charge, m, t1, t2) of the magnetization
//! and rotated into the global frame with [`Conductance4::rotate_to_global`].
//! Spin voltages and currents are carried in charge units: a spin current
//! along `u` is the charge current of electrons with moment along `u` minus
//! that of electrons with moment against `u`.

use std::io::{self, Write};

use super::CircuitError;
use crate::vec3::{cross, dot, norm, Vec3};

pub const BASIS: [&str; 4] = ["charge", "sx", "sy", "sz"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conductance4(pub [[f64; 4]; 4]);

impl Default for Conductance4 {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Conductance4 {
    pub const ZERO: Conductance4 = Conductance4([[0.0; 4]; 4]);

    pub fn from_diag(d: [f64; 4]) -> Self {
        let mut c = Self::ZERO;
        for (k, v) in d.into_iter().enumerate() {
            c.0[k][k] = v;
        }
        c
    }

    /// Charge entry `charge`, all three spin entries `spin`.
    pub fn charge_spin_diag(charge: f64, spin: f64) -> Self {
        Self::from_diag([charge, spin, spin, spin])
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.0[r][c]
    }

    pub fn charge(&self) -> f64 {
        self.0[0][0]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..4).all(|r| (0..4).all(|c| r == c || self.0[r][c] == 0.0))
    }

    pub fn scaled(&self, k: f64) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|v| *v *= k);
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = *self;
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] += other.0[r][c];
            }
        }
        out
    }

    #[inline]
    pub fn apply(&self, v: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.0[r].iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// `R C R^T` with `R = diag(1, R3)`, where the columns of `R3` are the
    /// local axes (m, t1, t2) expressed in global coordinates.
    pub fn rotate_to_global(&self, m_hat: Vec3) -> Result<Self, CircuitError> {
        let frame = local_frame(m_hat)?;
        Ok(self.rotate_with(&frame))
    }

    /// Rotation with a precomputed frame, see [`local_frame`].
    pub fn rotate_with(&self, frame: &[Vec3; 3]) -> Self {
        let r = rotation4(frame);
        // out = R C R^T
        let mut rc = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                rc[i][j] = (0..4).map(|k| r[i][k] * self.0[k][j]).sum();
            }
        }
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = (0..4).map(|k| rc[i][k] * r[j][k]).sum();
            }
        }
        Conductance4(out)
    }

    /// Row-major CSV with a header naming the basis components.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "row,{}", BASIS.join(","))?;
        for (name, row) in BASIS.iter().zip(&self.0) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{name},{}", cells.join(","))?;
        }
        Ok(())
    }
}

fn rotation4(frame: &[Vec3; 3]) -> [[f64; 4]; 4] {
    let mut r = [[0.0; 4]; 4];
    r[0][0] = 1.0;
    for (col, axis) in frame.iter().enumerate() {
        for row in 0..3 {
            r[row + 1][col + 1] = axis[row];
        }
    }
    r
}

/// Right-handed orthonormal frame (m, t1, t2) for a unit magnetization.
///
/// For `m = +x` the frame is the global (x, y, z) axes.
pub fn local_frame(m_hat: Vec3) -> Result<[Vec3; 3], CircuitError> {
    let n = norm(m_hat);
    if !n.is_finite() || (n - 1.0).abs() > 1e-9 {
        return Err(CircuitError::NonUnitMagnetization { norm: n });
    }
    let reference = if m_hat[2].abs() < 0.9 {
        [0.0, 0.0, 1.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let t1 = cross(reference, m_hat);
    let t1_len = norm(t1);
    let t1 = [t1[0] / t1_len, t1[1] / t1_len, t1[2] / t1_len];
    let t2 = cross(m_hat, t1);
    debug_assert!(dot(t1, m_hat).abs() < 1e-12);
    Ok([m_hat, t1, t2])
}

/// Series element plus one of its two identical end shunts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiModel {
    pub series: Conductance4,
    pub shunt_per_side: Conductance4,
}

/// `x / sinh(x)`, continuous at 0 and vanishing for large `x`.
fn x_csch(x: f64) -> f64 {
    if x < 1e-6 {
        1.0 - x * x / 6.0
    } else if x > 700.0 {
        0.0
    } else {
        x / x.sinh()
    }
}

fn check_positive(what: &'static str, value: f64) -> Result<(), CircuitError> {
    if value > 0.0 && !value.is_nan() {
        Ok(())
    } else {
        Err(CircuitError::InvalidGeometry { what, value })
    }
}

/// Normal-metal segment as a pi network.
///
/// Series charge `A/(rho L)`, series spin `(A/(rho lambda)) / sinh(L/lambda)`,
/// shunt spin `(A/(rho lambda)) tanh(L/(2 lambda))` at each end. An infinite
/// `spin_diffusion_length` gives the relaxation-free limit.
pub fn nm_conductances(
    length: f64,
    area: f64,
    resistivity: f64,
    spin_diffusion_length: f64,
) -> Result<PiModel, CircuitError> {
    check_positive("length", length)?;
    check_positive("area", area)?;
    check_positive("resistivity", resistivity)?;
    check_positive("spin_diffusion_length", spin_diffusion_length)?;
    let g = area / (resistivity * length);
    let x = length / spin_diffusion_length;
    let series_spin = g * x_csch(x);
    let shunt_spin = g * x * (x / 2.0).tanh();
    Ok(PiModel {
        series: Conductance4::charge_spin_diag(g, series_spin),
        shunt_per_side: Conductance4::charge_spin_diag(0.0, shunt_spin),
    })
}

/// Bulk ferromagnet parameters for one through-thickness element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FmBulk {
    pub length: f64,
    pub area: f64,
    pub resistivity: f64,
    pub beta: f64,
    pub lsf_parallel: f64,
    pub lsf_perp: f64,
}

/// Ferromagnet segment in the local frame (charge, m, t1, t2).
///
/// The (charge, m) block is the two-current pi model with conductivity
/// polarization `beta`:
/// series `G [[1, b], [b, b^2 + (1 - b^2) x csch x]]`,
/// shunt `G (1 - b^2) x tanh(x/2)` on the longitudinal spin, `x = L/lsf_parallel`.
/// Transverse spin does not propagate through the bulk (series 0); its
/// shunt is the pi-model shunt with `lsf_perp`.
pub fn fm_conductances(p: &FmBulk) -> Result<PiModel, CircuitError> {
    check_positive("length", p.length)?;
    check_positive("area", p.area)?;
    check_positive("resistivity", p.resistivity)?;
    check_positive("lsf_parallel", p.lsf_parallel)?;
    check_positive("lsf_perp", p.lsf_perp)?;
    if !(0.0..1.0).contains(&p.beta) {
        return Err(CircuitError::UnphysicalPolarization(p.beta));
    }
    let g = p.area / (p.resistivity * p.length);
    let b = p.beta;
    let x = p.length / p.lsf_parallel;
    let xt = p.length / p.lsf_perp;
    let mut series = Conductance4::ZERO;
    series.0[0][0] = g;
    series.0[0][1] = b * g;
    series.0[1][0] = b * g;
    series.0[1][1] = g * (b * b + (1.0 - b * b) * x_csch(x));
    let transverse_shunt = g * xt * (xt / 2.0).tanh();
    let shunt = Conductance4::from_diag([
        0.0,
        g * (1.0 - b * b) * x * (x / 2.0).tanh(),
        transverse_shunt,
        transverse_shunt,
    ]);
    Ok(PiModel {
        series,
        shunt_per_side: shunt,
    })
}

/// Interface conductances per unit area, S/m^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceParams {
    pub g_up: f64,
    pub g_down: f64,
    pub g_mix: f64,
    /// Multiplier on the real mixing conductance (1 or 2 depending on
    /// convention).
    pub mix_factor: f64,
    /// Imaginary mixing conductance (field-like torque), S/m^2.
    pub g_mix_imag: f64,
}

impl InterfaceParams {
    pub fn polarization(&self) -> f64 {
        (self.g_up - self.g_down) / (self.g_up + self.g_down)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceBlocks {
    pub series: Conductance4,
    /// Transverse absorption on the normal-metal side; the current through
    /// it is the spin-transfer torque current.
    pub shunt_nm_side: Conductance4,
}

/// FM/NM interface in the local frame.
pub fn interface_conductances(
    area: f64,
    p: &InterfaceParams,
) -> Result<InterfaceBlocks, CircuitError> {
    check_positive("area", area)?;
    if !(p.g_up > 0.0 && p.g_down > 0.0) || p.g_mix < 0.0 || p.mix_factor < 0.0 {
        return Err(CircuitError::InvalidInterface {
            g_up: p.g_up,
            g_down: p.g_down,
            g_mix: p.g_mix,
        });
    }
    let g = (p.g_up + p.g_down) * area;
    let pol = p.polarization();
    let mut series = Conductance4::ZERO;
    series.0[0][0] = g;
    series.0[0][1] = pol * g;
    series.0[1][0] = pol * g;
    series.0[1][1] = g;
    let a = p.mix_factor * p.g_mix * area;
    let b = p.g_mix_imag * area;
    let mut shunt = Conductance4::ZERO;
    shunt.0[2][2] = a;
    shunt.0[3][3] = a;
    shunt.0[2][3] = b;
    shunt.0[3][2] = -b;
    Ok(InterfaceBlocks {
        series,
        shunt_nm_side: shunt,
    })
}
