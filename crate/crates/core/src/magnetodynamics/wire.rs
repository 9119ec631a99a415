use std::io::{self, Write};
use std::ops::Range;

use super::{LlgError, MaterialFm};
use crate::consts::MU0;
use crate::vec3::{dot, norm, sub, Vec3};

/// One ferromagnet wire discretized into cells along x.
#[derive(Debug, Clone, PartialEq)]
pub struct WireState {
    pub m: Vec<Vec3>,
    pub alpha: Vec<f64>,
    /// Cell length along the wire, m.
    pub mesh: f64,
    pub width: f64,
    pub thickness: f64,
}

/// Initial transverse wall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainWall {
    /// Wall center measured from the start of the wire, m.
    pub center: f64,
    /// Sign of m_y at the center.
    pub chirality: f64,
    /// Sign of m_x left of the wall.
    pub left: f64,
    /// Out-of-plane canting of the wall moment, rad.
    pub cant: f64,
}

impl WireState {
    pub fn uniform(
        n_cells: usize,
        mesh: f64,
        width: f64,
        thickness: f64,
        direction: f64,
        alpha: f64,
    ) -> Result<Self, LlgError> {
        if n_cells == 0 || mesh <= 0.0 || width <= 0.0 || thickness <= 0.0 {
            return Err(LlgError::InvalidGeometry);
        }
        if alpha <= 0.0 {
            return Err(LlgError::InvalidDamping(alpha));
        }
        let s = if direction < 0.0 { -1.0 } else { 1.0 };
        Ok(Self {
            m: vec![[s, 0.0, 0.0]; n_cells],
            alpha: vec![alpha; n_cells],
            mesh,
            width,
            thickness,
        })
    }

    /// Uniform wire with a tanh transverse wall of width parameter
    /// `mat.wall_width()` centered at `wall.center`.
    pub fn with_domain_wall(
        n_cells: usize,
        mesh: f64,
        width: f64,
        thickness: f64,
        alpha: f64,
        mat: &MaterialFm,
        wall: &DomainWall,
    ) -> Result<Self, LlgError> {
        let mut w = Self::uniform(n_cells, mesh, width, thickness, 1.0, alpha)?;
        let length = w.length();
        if !(0.0..=length).contains(&wall.center) {
            return Err(LlgError::OutOfRange(format!(
                "wall center {:e} m outside wire of length {length:e} m",
                wall.center
            )));
        }
        let delta = mat.wall_width();
        let left = wall.left.signum();
        let chir = if wall.chirality < 0.0 { -1.0 } else { 1.0 };
        let (sc, cc) = wall.cant.sin_cos();
        for (i, m) in w.m.iter_mut().enumerate() {
            let u = (w.mesh * (i as f64 + 0.5) - wall.center) / delta;
            let sech = 1.0 / u.cosh();
            *m = [-left * u.tanh(), chir * sech * cc, chir * sech * sc];
        }
        Ok(w)
    }

    pub fn n_cells(&self) -> usize {
        self.m.len()
    }

    pub fn length(&self) -> f64 {
        self.mesh * self.m.len() as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.mesh * self.width * self.thickness
    }

    /// Center of cell `i` measured from the start of the wire.
    pub fn cell_center(&self, i: usize) -> f64 {
        self.mesh * (i as f64 + 0.5)
    }

    /// Rotate every cell by `angle` about z (small in-plane tilt).
    pub fn tilt_in_plane(&mut self, angle: f64) {
        let (s, c) = angle.sin_cos();
        for m in &mut self.m {
            *m = [c * m[0] - s * m[1], s * m[0] + c * m[1], m[2]];
        }
    }

    /// Give the cells in `region` damping `alpha_end`.
    pub fn set_damping_profile(&mut self, region: Range<usize>, alpha_end: f64) -> Result<(), LlgError> {
        if alpha_end <= 0.0 || !alpha_end.is_finite() {
            return Err(LlgError::InvalidDamping(alpha_end));
        }
        if region.end > self.n_cells() || region.start > region.end {
            return Err(LlgError::OutOfRange(format!(
                "damping region {region:?} outside {} cells",
                self.n_cells()
            )));
        }
        self.alpha[region].iter_mut().for_each(|a| *a = alpha_end);
        Ok(())
    }

    pub fn average(&self) -> Vec3 {
        self.average_over(0..self.n_cells())
    }

    pub fn average_over(&self, cells: Range<usize>) -> Vec3 {
        let n = cells.len() as f64;
        let mut acc = [0.0; 3];
        for m in &self.m[cells] {
            for k in 0..3 {
                acc[k] += m[k];
            }
        }
        [acc[0] / n, acc[1] / n, acc[2] / n]
    }

    /// Largest deviation of |m_i| from one.
    pub fn max_norm_error(&self) -> f64 {
        self.m.iter().map(|m| (norm(*m) - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Exchange + demagnetizing + anisotropy energy, J.
    pub fn energy(&self, mat: &MaterialFm) -> f64 {
        let v = self.cell_volume();
        let [nx, ny, nz] = mat.demag;
        let local: f64 = self
            .m
            .iter()
            .map(|m| {
                mat.k_u * (1.0 - m[0] * m[0]) - MU0 * mat.ms * dot(*m, mat.h_applied)
                    + 0.5 * MU0 * mat.ms * mat.ms * (nx * m[0] * m[0] + ny * m[1] * m[1] + nz * m[2] * m[2])
            })
            .sum();
        let exch: f64 = self
            .m
            .windows(2)
            .map(|p| {
                let d = sub(p[1], p[0]);
                dot(d, d)
            })
            .sum();
        local * v + mat.a_ex * self.width * self.thickness * exch / self.mesh
    }

    /// Snapshot CSV: cell index, x position, m_x, m_y, m_z, alpha.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "cell,x_m,mx,my,mz,alpha")?;
        for (i, (m, a)) in self.m.iter().zip(&self.alpha).enumerate() {
            writeln!(w, "{i},{:e},{},{},{},{}", self.cell_center(i), m[0], m[1], m[2], a)?;
        }
        Ok(())
    }
}
