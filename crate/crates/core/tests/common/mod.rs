//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use rand::Rng;
use svlogic::devices::{Device, DeviceConfig, DeviceKind};
use svlogic::spincircuit::{CircuitGraph, SolveResult, Terminal};
use svlogic::vec3::{normalize, Vec3};

/// A random but valid device configuration of any kind.
pub fn random_config<R: Rng>(rng: &mut R) -> DeviceConfig {
    let kind = [DeviceKind::Sv, DeviceKind::Majority3, DeviceKind::Nlsv][rng.random_range(0..3)];
    let mut c = DeviceConfig::for_kind(kind);
    let nm = |rng: &mut R, lo: u32, hi: u32| rng.random_range(lo..=hi) as f64 * 1e-9;
    c.channel.l_nm = nm(rng, 40, 150);
    let l = (c.channel.l_nm * 1e9) as u32;
    c.channel.arm_length = nm(rng, 10, l - 10);
    c.channel.shunt_length = nm(rng, 10, 60);
    c.channel.pitch = nm(rng, 4, 20);
    c.channel.w_nm = nm(rng, 10, 40);
    c.channel.t_nm = nm(rng, 5, 30);
    c.channel.rho_n = rng.random_range(1e-8..1e-7);
    c.channel.lambda_n = rng.random_range(20e-9..500e-9);
    c.contacts.l_input = 2e-9 * rng.random_range(2..=20) as f64;
    c.contacts.l_output = 2e-9 * rng.random_range(2..=20) as f64;
    c.fm.beta = rng.random_range(0.0..0.9);
    c.fm.rho = rng.random_range(5e-8..3e-7);
    c.fm.l_sf_parallel = rng.random_range(1e-9..20e-9);
    c.fm.l_sf_perp = rng.random_range(0.3e-9..3e-9);
    c.interface.g_upup = rng.random_range(0.2e15..2e15);
    c.interface.g_downdown = rng.random_range(0.05e15..0.5e15);
    c.interface.g_updown = rng.random_range(0.0..1e15);
    c.interface.mix_factor = if rng.random_bool(0.5) { 1.0 } else { 2.0 };
    let n = kind.n_inputs();
    c.device.inputs = (0..n).map(|_| rng.random_bool(0.5)).collect();
    c.device.output = Some(rng.random_bool(0.5));
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    c.drive.current = sign * rng.random_range(50e-6..300e-6);
    c
}

pub fn random_unit<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-2 && n2 <= 1.0 {
            return normalize(v);
        }
    }
}

/// Build `cfg`, orient every contact cell at random and scale the sources
/// to the configured drive.
pub fn random_device<R: Rng>(rng: &mut R, cfg: &DeviceConfig) -> Device {
    let mut d = Device::build(cfg).expect("valid config builds");
    let cells: Vec<_> = d.contacts.iter().flat_map(|c| c.cells.clone().map(move |k| (c.wire, k))).collect();
    let dirs: Vec<Vec3> = cells.iter().map(|_| random_unit(rng)).collect();
    d.graph
        .orient(|c| {
            let k = cells.iter().position(|&(w, i)| w == c.wire && i == c.cell).unwrap();
            dirs[k]
        })
        .unwrap();
    d.graph.scale_sources(cfg.drive.current);
    d
}

/// Total injected charge current magnitude.
pub fn injected(graph: &CircuitGraph) -> f64 {
    graph
        .sources()
        .iter()
        .filter(|s| matches!(s.node, Terminal::Node(_)))
        .map(|s| s.amps.abs())
        .sum()
}

/// Worst KCL residual relative to the injected current.
pub fn kcl_relative(graph: &CircuitGraph, r: &SolveResult) -> f64 {
    let worst = r.kcl_residuals(graph).into_iter().fold(0.0, f64::max);
    worst / injected(graph)
}

/// Charge node voltages of the network built from each branch's
/// charge-charge conductance, by plain Gaussian elimination.
pub fn scalar_oracle(graph: &CircuitGraph) -> Vec<f64> {
    let n = graph.node_count();
    let mut a = vec![vec![0.0f64; n + 1]; n];
    for b in graph.branches() {
        let g = b.conductance().get(0, 0);
        let i = b.node_i;
        a[i][i] += g;
        if let Terminal::Node(j) = b.node_j {
            a[j][j] += g;
            a[i][j] -= g;
            a[j][i] -= g;
        }
    }
    for s in graph.sources() {
        if let Terminal::Node(k) = s.node {
            a[k][n] += s.amps;
        }
    }
    for col in 0..n {
        let p = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, p);
        let piv = a[col][col];
        assert!(piv.abs() > 0.0, "oracle matrix singular");
        for r in col + 1..n {
            let f = a[r][col] / piv;
            if f != 0.0 {
                for k in col..=n {
                    a[r][k] -= f * a[col][k];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (a[r][n] - s) / a[r][r];
    }
    x
}

/// Copy of `cfg` with every spin-dependent parameter switched off.
pub fn charge_only(cfg: &DeviceConfig) -> DeviceConfig {
    let mut c = cfg.clone();
    c.fm.beta = 0.0;
    c.interface.g_downdown = c.interface.g_upup;
    c.interface.g_updown = 0.0;
    c
}

/// Largest relative deviation between two voltage vectors, scaled by the
/// largest magnitude in `reference`.
pub fn max_rel(a: &[f64], reference: &[f64]) -> f64 {
    let scale = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter()
        .zip(reference)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale
}

pub mod dynamics {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use svlogic::analysis::dw_position;
    use svlogic::consts::{GAMMA_E, K_B, MU0};
    use svlogic::magnetodynamics::{DomainWall, Integrator, MaterialFm, TorqueField, WireState};

    /// Isolated spin with no internal field, `h` applied along z.
    fn free_spin(h: f64, temperature: f64) -> MaterialFm {
        MaterialFm {
            ms: 8e5,
            a_ex: 0.0,
            k_u: 0.0,
            demag: [1.0 / 3.0; 3],
            gamma: GAMMA_E,
            temperature,
            h_applied: [0.0, 0.0, h],
        }
    }

    pub fn larmor_analytic(h: f64) -> f64 {
        2.0 * std::f64::consts::PI / (GAMMA_E * MU0 * h)
    }

    /// Precession period of an undamped spin starting in-plane, from the
    /// unwrapped azimuth accumulated over `periods` turns.
    pub fn larmor_period(h: f64, dt: f64, periods: f64) -> f64 {
        let mat = free_spin(h, 0.0);
        let mut w = WireState::uniform(1, 2e-9, 20e-9, 2e-9, 1.0, 0.01).unwrap();
        w.alpha[0] = 0.0;
        let torque = TorqueField::new(&w, &mat);
        let mut integ = Integrator::new(1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let steps = (periods * larmor_analytic(h) / dt).round() as usize;
        let mut phase = 0.0;
        let mut last = w.m[0][1].atan2(w.m[0][0]);
        for _ in 0..steps {
            integ.step(&mut w, &mat, &torque, dt, &mut rng).unwrap();
            let now = w.m[0][1].atan2(w.m[0][0]);
            let mut d = now - last;
            if d > std::f64::consts::PI {
                d -= 2.0 * std::f64::consts::PI;
            } else if d < -std::f64::consts::PI {
                d += 2.0 * std::f64::consts::PI;
            }
            phase += d;
            last = now;
        }
        2.0 * std::f64::consts::PI * steps as f64 * dt / phase.abs()
    }

    /// Measured over predicted `<m_t^2>` (mean of y and z) for a uniaxial
    /// macrospin with barrier `2 K_u V = barrier_kt * k_B T` at 300 K.
    pub fn equipartition_ratio(steps: usize, seed: u64) -> f64 {
        let t = 300.0;
        let mut w = WireState::uniform(1, 2e-9, 20e-9, 2e-9, 1.0, 0.2).unwrap();
        let v = w.cell_volume();
        let barrier_kt = 100.0;
        let k_u = barrier_kt * K_B * t / (2.0 * v);
        let mat = MaterialFm {
            ms: 8e5,
            a_ex: 0.0,
            k_u,
            demag: [1.0 / 3.0; 3],
            gamma: GAMMA_E,
            temperature: t,
            h_applied: [0.0; 3],
        };
        let hk = 2.0 * k_u / (MU0 * mat.ms);
        let predicted = K_B * t / (MU0 * mat.ms * hk * v);
        let torque = TorqueField::new(&w, &mat);
        let mut integ = Integrator::new(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let burn = steps / 20;
        let mut acc = 0.0;
        for step in 0..steps {
            integ.step(&mut w, &mat, &torque, 0.05e-12, &mut rng).unwrap();
            if step >= burn {
                let m = w.m[0];
                acc += 0.5 * (m[1] * m[1] + m[2] * m[2]);
            }
        }
        acc / (steps - burn) as f64 / predicted
    }

    pub struct Automotion {
        /// (t, wall position) while a wall exists.
        pub track: Vec<(f64, f64)>,
        pub final_mx: f64,
        pub final_state: WireState,
    }

    /// Canted wall at `center` in the 300 nm wire with `alpha_end` on the
    /// last 40 nm, T = 0.
    pub fn automotion(center: f64, cant: f64, alpha_end: f64, duration: f64) -> Automotion {
        let mut mat = MaterialFm::permalloy();
        mat.temperature = 0.0;
        let wall = DomainWall {
            center,
            chirality: 1.0,
            left: 1.0,
            cant,
        };
        let mut w = WireState::with_domain_wall(150, 2e-9, 20e-9, 2e-9, 0.007, &mat, &wall).unwrap();
        w.set_damping_profile(130..150, alpha_end).unwrap();
        let torque = TorqueField::new(&w, &mat);
        let mut integ = Integrator::new(150);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let dt = 0.05e-12;
        let steps = (duration / dt).round() as usize;
        let mut track = Vec::new();
        for step in 0..steps {
            if step % 200 == 0 {
                if let Some(p) = dw_position(&w) {
                    track.push((step as f64 * dt, p.position));
                }
            }
            integ.step(&mut w, &mat, &torque, dt, &mut rng).unwrap();
        }
        Automotion {
            track,
            final_mx: w.average()[0],
            final_state: w,
        }
    }
}
