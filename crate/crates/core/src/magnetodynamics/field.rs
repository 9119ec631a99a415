use super::{MaterialFm, WireState};
use crate::consts::{K_B, MU0};
use crate::vec3::Vec3;

/// Anisotropy + demagnetizing + exchange field for magnetization `m`, A/m.
/// The wire ends use mirror (free) boundaries.
pub fn effective_field(m: &[Vec3], mat: &MaterialFm, mesh: f64, out: &mut [Vec3]) {
    let n = m.len();
    let hk = 2.0 * mat.k_u / (MU0 * mat.ms);
    let ex = mat.exchange_prefactor() / (mesh * mesh);
    let [nx, ny, nz] = mat.demag;
    let ha = mat.h_applied;
    for i in 0..n {
        let mi = m[i];
        let l = if i == 0 { mi } else { m[i - 1] };
        let r = if i + 1 == n { mi } else { m[i + 1] };
        out[i] = [
            ha[0] + hk * mi[0] - mat.ms * nx * mi[0] + ex * (l[0] - 2.0 * mi[0] + r[0]),
            ha[1] - mat.ms * ny * mi[1] + ex * (l[1] - 2.0 * mi[1] + r[1]),
            ha[2] - mat.ms * nz * mi[2] + ex * (l[2] - 2.0 * mi[2] + r[2]),
        ];
    }
}

/// Standard deviation of each Cartesian component of the thermal field, A/m.
pub fn thermal_sigma(mat: &MaterialFm, alpha: f64, volume: f64, dt: f64) -> f64 {
    (2.0 * alpha * K_B * mat.temperature / (mat.gamma * MU0 * MU0 * mat.ms * volume * dt)).sqrt()
}

impl WireState {
    /// Effective field of the current state.
    pub fn effective_field(&self, mat: &MaterialFm) -> Vec<Vec3> {
        let mut h = vec![[0.0; 3]; self.n_cells()];
        effective_field(&self.m, mat, self.mesh, &mut h);
        h
    }
}
