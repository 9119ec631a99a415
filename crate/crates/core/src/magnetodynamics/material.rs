use super::LlgError;
use crate::consts::{GAMMA_E, MU0};

/// Ferromagnet material and shape parameters for one wire.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialFm {
    /// Saturation magnetization, A/m.
    pub ms: f64,
    /// Exchange stiffness, J/m.
    pub a_ex: f64,
    /// Uniaxial anisotropy along x, J/m^3.
    pub k_u: f64,
    /// Demagnetizing factors (Nx, Ny, Nz).
    pub demag: [f64; 3],
    /// Gyromagnetic ratio, rad/(s·T).
    pub gamma: f64,
    /// Temperature, K.
    pub temperature: f64,
    /// Uniform applied field, A/m.
    pub h_applied: [f64; 3],
}

impl MaterialFm {
    /// Permalloy in a 20 nm x 2 nm strip at 300 K.
    pub fn permalloy() -> Self {
        Self {
            ms: 8e5,
            a_ex: 1.3e-11,
            k_u: 0.0,
            demag: strip_demag_factors(20e-9, 2e-9),
            gamma: GAMMA_E,
            temperature: 300.0,
            h_applied: [0.0; 3],
        }
    }

    pub fn validate(&self) -> Result<(), LlgError> {
        let sum: f64 = self.demag.iter().sum();
        let ok = self.ms > 0.0
            && self.a_ex >= 0.0
            && self.gamma > 0.0
            && self.temperature >= 0.0
            && self.demag.iter().all(|n| (0.0..=1.0).contains(n))
            && (sum - 1.0).abs() <= 1e-6
            && self.k_u.is_finite()
            && self.h_applied.iter().all(|h| h.is_finite());
        if ok {
            Ok(())
        } else {
            Err(LlgError::InvalidMaterial(format!("{self:?}")))
        }
    }

    /// `2A / (mu0 Ms)`, multiplies the discrete Laplacian of m.
    pub fn exchange_prefactor(&self) -> f64 {
        2.0 * self.a_ex / (MU0 * self.ms)
    }

    /// Bloch wall parameter for a wall rotating through the y axis.
    pub fn wall_width(&self) -> f64 {
        let stiffness = MU0 * self.ms * self.ms * (self.demag[1] - self.demag[0]) + 2.0 * self.k_u;
        (2.0 * self.a_ex / stiffness).sqrt()
    }
}

/// Infinite-strip factors for a wire along x with the given cross-section:
/// `(0, t/(w+t), w/(w+t))`.
pub fn strip_demag_factors(width: f64, thickness: f64) -> [f64; 3] {
    let s = width + thickness;
    [0.0, thickness / s, width / s]
}

/// Demagnetizing factors of a uniformly magnetized rectangular prism with
/// edge lengths `(lx, ly, lz)` (Aharoni, J. Appl. Phys. 83, 3432 (1998)).
pub fn prism_demag_factors(lx: f64, ly: f64, lz: f64) -> [f64; 3] {
    let (a, b, c) = (lx / 2.0, ly / 2.0, lz / 2.0);
    [
        aharoni_dz(b, c, a),
        aharoni_dz(c, a, b),
        aharoni_dz(a, b, c),
    ]
}

/// Factor along the axis of half-length `c`, the other half-lengths being
/// `a` and `b`.
fn aharoni_dz(a: f64, b: f64, c: f64) -> f64 {
    use std::f64::consts::PI;
    let abc = (a * a + b * b + c * c).sqrt();
    let ab = (a * a + b * b).sqrt();
    let bc = (b * b + c * c).sqrt();
    let ac = (a * a + c * c).sqrt();
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let t1 = (b2 - c2) / (2.0 * b * c) * ((abc - a) / (abc + a)).ln();
    let t2 = (a2 - c2) / (2.0 * a * c) * ((abc - b) / (abc + b)).ln();
    let t3 = b / (2.0 * c) * ((ab + a) / (ab - a)).ln();
    let t4 = a / (2.0 * c) * ((ab + b) / (ab - b)).ln();
    let t5 = c / (2.0 * a) * ((bc - b) / (bc + b)).ln();
    let t6 = c / (2.0 * b) * ((ac - a) / (ac + a)).ln();
    let t7 = 2.0 * (a * b / (c * abc)).atan();
    let t8 = (a2 * a + b2 * b - 2.0 * c2 * c) / (3.0 * a * b * c);
    let t9 = (a2 + b2 - 2.0 * c2) / (3.0 * a * b * c) * abc;
    let t10 = c / (a * b) * (ac + bc);
    let t11 = -(ab.powi(3) + bc.powi(3) + ac.powi(3)) / (3.0 * a * b * c);
    (t1 + t2 + t3 + t4 + t5 + t6 + t7 + t8 + t9 + t10 + t11) / PI
}
