use rand::Rng;
use rand_distr::StandardNormal;

use super::{effective_field, thermal_sigma, LlgError, MaterialFm, WireState};
use crate::consts::{E_CHARGE, HBAR, MU0};
use crate::vec3::{add, cross, normalize, scale, Vec3};

/// Largest accepted time step.
pub const DT_MAX: f64 = 1e-12;

/// Number of spins `2 Ms V / (gamma hbar)` in a volume `volume`.
pub fn moment_count(mat: &MaterialFm, volume: f64) -> f64 {
    2.0 * mat.ms * volume / (mat.gamma * HBAR)
}

/// Spin current absorbed by each cell, in charge units (A), with the
/// direction of the magnetic moment it delivers.
#[derive(Debug, Clone, PartialEq)]
pub struct TorqueField {
    pub spin_current: Vec<Vec3>,
    /// `1 / (e N_s)` per cell.
    rate: Vec<f64>,
}

impl TorqueField {
    /// No torque; cells sized for `state`.
    pub fn new(state: &WireState, mat: &MaterialFm) -> Self {
        let ns = moment_count(mat, state.cell_volume());
        Self {
            spin_current: vec![[0.0; 3]; state.n_cells()],
            rate: vec![1.0 / (E_CHARGE * ns); state.n_cells()],
        }
    }

    pub fn n_cells(&self) -> usize {
        self.spin_current.len()
    }

    pub fn clear(&mut self) {
        self.spin_current.iter_mut().for_each(|s| *s = [0.0; 3]);
    }

    /// Rate coefficient `1/(e N_s)` of one cell.
    pub fn rate(&self, cell: usize) -> f64 {
        self.rate[cell]
    }
}

/// Landau-Lifshitz form of the LLG right-hand side for one cell.
///
/// `h` is the total field (A/m), `is` the absorbed spin current (A) and
/// `rate` the cell's `1/(e N_s)`.
#[inline]
pub fn llg_rhs(m: Vec3, h: Vec3, alpha: f64, gamma: f64, is: Vec3, rate: f64) -> Vec3 {
    let precession = scale(cross(m, h), -gamma * MU0);
    let stt = scale(cross(m, cross(is, m)), rate);
    let t0 = add(precession, stt);
    scale(add(t0, scale(cross(m, t0), alpha)), 1.0 / (1.0 + alpha * alpha))
}

/// Stochastic Heun integrator with preallocated work buffers.
#[derive(Debug, Clone, Default)]
pub struct Integrator {
    h: Vec<Vec3>,
    k1: Vec<Vec3>,
    m_pred: Vec<Vec3>,
    h_th: Vec<Vec3>,
}

impl Integrator {
    pub fn new(n_cells: usize) -> Self {
        Self {
            h: vec![[0.0; 3]; n_cells],
            k1: vec![[0.0; 3]; n_cells],
            m_pred: vec![[0.0; 3]; n_cells],
            h_th: vec![[0.0; 3]; n_cells],
        }
    }

    /// Advance `state` by `dt`. The thermal field is drawn once and used in
    /// both the predictor and the corrector; only the corrected state is
    /// renormalized.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        state: &mut WireState,
        mat: &MaterialFm,
        torque: &TorqueField,
        dt: f64,
        rng: &mut R,
    ) -> Result<(), LlgError> {
        if !(dt > 0.0 && dt <= DT_MAX * (1.0 + 1e-9)) {
            return Err(LlgError::TimestepTooLarge(dt));
        }
        let n = state.n_cells();
        if torque.n_cells() != n {
            return Err(LlgError::TorqueSize {
                got: torque.n_cells(),
                expected: n,
            });
        }
        if self.h.len() != n {
            *self = Self::new(n);
        }
        if mat.temperature > 0.0 {
            let v = state.cell_volume();
            for (hth, &a) in self.h_th.iter_mut().zip(&state.alpha) {
                let s = thermal_sigma(mat, a, v, dt);
                *hth = [
                    s * rng.sample::<f64, _>(StandardNormal),
                    s * rng.sample::<f64, _>(StandardNormal),
                    s * rng.sample::<f64, _>(StandardNormal),
                ];
            }
        } else {
            self.h_th.iter_mut().for_each(|h| *h = [0.0; 3]);
        }

        effective_field(&state.m, mat, state.mesh, &mut self.h);
        for i in 0..n {
            let k = llg_rhs(
                state.m[i],
                add(self.h[i], self.h_th[i]),
                state.alpha[i],
                mat.gamma,
                torque.spin_current[i],
                torque.rate[i],
            );
            self.k1[i] = k;
            self.m_pred[i] = add(state.m[i], scale(k, dt));
        }

        effective_field(&self.m_pred, mat, state.mesh, &mut self.h);
        for i in 0..n {
            let k2 = llg_rhs(
                self.m_pred[i],
                add(self.h[i], self.h_th[i]),
                state.alpha[i],
                mat.gamma,
                torque.spin_current[i],
                torque.rate[i],
            );
            let m = add(state.m[i], scale(add(self.k1[i], k2), 0.5 * dt));
            if !m.iter().all(|c| c.is_finite()) {
                return Err(LlgError::NonFinite { cell: i });
            }
            state.m[i] = normalize(m);
        }
        Ok(())
    }
}
