mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use svlogic::devices::{Device, DeviceConfig};
use svlogic::spincircuit::{stt_at_contact, CellRef, ReducedCircuit};
use svlogic::vec3::{dot, norm, Vec3};

use common::*;

fn orientation_of(d: &Device) -> impl Fn(CellRef) -> Vec3 + '_ {
    move |c| {
        d.graph
            .branches()
            .iter()
            .find(|b| b.magnetization_ref == Some(c))
            .map(|b| b.m_hat)
            .expect("cell has a branch")
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn kcl_holds_on_random_devices(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_config(&mut rng);
        let d = random_device(&mut rng, &cfg);
        let r = d.graph.solve().unwrap();
        prop_assert!(kcl_relative(&d.graph, &r) < 1e-10);
    }

    #[test]
    fn reduced_solve_matches_full_solve(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_config(&mut rng);
        let d = random_device(&mut rng, &cfg);
        let full = d.graph.solve().unwrap();
        let mut rc = ReducedCircuit::new(&d.graph).unwrap();
        rc.solve(orientation_of(&d), 1.0).unwrap();
        let scale = full.node_voltages.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        for &p in rc.port_nodes() {
            let v = rc.port_voltage(p).unwrap();
            for k in 0..4 {
                prop_assert!((v[k] - full.node_voltages[p][k]).abs() <= 1e-9 * scale);
            }
        }
        for c in &d.contacts {
            let direct = stt_at_contact(&full, &d.graph, &c.torque_shunts);
            let i_scale = direct.iter().map(|v| norm(*v)).fold(1e-30, f64::max);
            for (k, cell) in c.cells.clone().enumerate() {
                let r = rc.absorbed_spin_current(CellRef { wire: c.wire, cell }).unwrap();
                for a in 0..3 {
                    prop_assert!((r[a] - direct[k][a]).abs() <= 1e-8 * i_scale.max(1e-9 * injected(&d.graph)));
                }
            }
        }
    }

    #[test]
    fn charge_only_network_matches_scalar_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = charge_only(&random_config(&mut rng));
        let d = random_device(&mut rng, &cfg);
        let r = d.graph.solve().unwrap();
        let charge: Vec<f64> = r.node_voltages.iter().map(|v| v[0]).collect();
        let oracle = scalar_oracle(&d.graph);
        prop_assert!(max_rel(&charge, &oracle) < 1e-9);
        let spin = r.node_voltages.iter().flat_map(|v| v[1..].to_vec()).fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert_eq!(spin, 0.0);
    }

    #[test]
    fn solution_is_linear_in_the_sources(seed in any::<u64>(), k in -3.0f64..3.0) {
        prop_assume!(k.abs() > 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_config(&mut rng);
        let d = random_device(&mut rng, &cfg);
        let base = d.graph.solve().unwrap();
        let mut g = d.graph.clone();
        g.scale_sources(k);
        let scaled = g.solve().unwrap();
        let scale = base.branch_currents.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in base.branch_currents.iter().zip(&scaled.branch_currents) {
            for c in 0..4 {
                prop_assert!((k * a[c] - b[c]).abs() <= 1e-12 * scale * k.abs() * 10.0);
            }
        }
    }

    #[test]
    fn absorbed_current_is_transverse(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_config(&mut rng);
        let d = random_device(&mut rng, &cfg);
        let mut rc = ReducedCircuit::new(&d.graph).unwrap();
        let orient = orientation_of(&d);
        rc.solve(&orient, 1.0).unwrap();
        for cell in rc.cells().collect::<Vec<_>>() {
            let i = rc.absorbed_spin_current(cell).unwrap();
            prop_assert!(dot(i, orient(cell)).abs() <= 1e-9 * norm(i).max(1e-30));
        }
    }
}

#[test]
fn collinear_state_absorbs_no_transverse_current() {
    for kind in ["sv", "majority", "nlsv"] {
        let mut cfg = DeviceConfig::for_kind(kind.parse().unwrap());
        cfg.device.output = Some(false);
        let d = Device::build(&cfg).unwrap();
        let mut rc = ReducedCircuit::new(&d.graph).unwrap();
        rc.solve(|c| if c.wire == d.output { [-1.0, 0.0, 0.0] } else { [1.0, 0.0, 0.0] }, 200e-6)
            .unwrap();
        for cell in rc.cells().collect::<Vec<_>>() {
            assert!(norm(rc.absorbed_spin_current(cell).unwrap()) < 1e-18, "{kind} {cell:?}");
        }
    }
}

#[test]
fn unpolarized_drive_gives_no_spin() {
    let mut cfg = charge_only(&DeviceConfig::default());
    cfg.interface.g_updown = 0.39e15;
    let d = Device::build(&cfg).unwrap();
    let mut rc = ReducedCircuit::new(&d.graph).unwrap();
    rc.solve(|c| if c.wire == d.output { [0.0, 1.0, 0.0] } else { [1.0, 0.0, 0.0] }, 200e-6)
        .unwrap();
    for cell in rc.cells().collect::<Vec<_>>() {
        assert!(norm(rc.absorbed_spin_current(cell).unwrap()) < 1e-20);
    }
}

#[test]
fn reversing_the_drive_negates_every_current() {
    let d = Device::build(&DeviceConfig::default()).unwrap();
    let mut g = d.graph.clone();
    g.orient(|c| if c.wire == d.output { [0.6, 0.8, 0.0] } else { [1.0, 0.0, 0.0] })
        .unwrap();
    let a = g.solve().unwrap();
    g.scale_sources(-1.0);
    let b = g.solve().unwrap();
    for (x, y) in a.branch_currents.iter().zip(&b.branch_currents) {
        for k in 0..4 {
            assert!((x[k] + y[k]).abs() <= 1e-15 * x[k].abs().max(1e-12));
        }
    }
}

/// Transverse current summed over the output contact for an output wire
/// tilted by `tilt` away from `base`.
fn output_torque(base: f64, tilt: f64) -> f64 {
    let d = Device::build(&DeviceConfig::default()).unwrap();
    let mut rc = ReducedCircuit::new(&d.graph).unwrap();
    let m_out = [base * tilt.cos(), tilt.sin(), 0.0];
    rc.solve(|c| if c.wire == d.output { m_out } else { [1.0, 0.0, 0.0] }, 200e-6)
        .unwrap();
    let c = d.output_contact();
    let mut total = [0.0; 3];
    for cell in c.cells.clone() {
        let i = rc.absorbed_spin_current(CellRef { wire: c.wire, cell }).unwrap();
        for k in 0..3 {
            total[k] += i[k];
        }
    }
    norm(total)
}

#[test]
fn antiparallel_torque_exceeds_parallel() {
    for tilt in [0.02, 0.1, 0.3] {
        let p = output_torque(1.0, tilt);
        let ap = output_torque(-1.0, tilt);
        assert!(ap > p, "tilt {tilt}: AP {ap:e} vs P {p:e}");
    }
}
