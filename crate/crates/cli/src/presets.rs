//! Named parameter sweeps.
//!
//! Each axis value is a small list of `key=value` overrides, so one axis
//! can move several keys together (the device kind and its contact
//! lengths, for example). Drive values for the current sweeps are
//! reconstructions and can be overridden from the command line.

/// One value along a sweep axis.
#[derive(Debug, Clone)]
pub struct AxisValue {
    pub label: String,
    pub overrides: Vec<(String, String)>,
}

#[derive(Debug, Clone)]
pub struct Axis {
    pub name: String,
    pub values: Vec<AxisValue>,
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    /// Figure or table the sweep regenerates.
    pub anchor: &'static str,
    pub description: &'static str,
    pub fixed: Vec<(String, String)>,
    pub axes: Vec<Axis>,
}

impl Preset {
    /// Cartesian product of all axes, first axis slowest.
    pub fn points(&self) -> Vec<Vec<&AxisValue>> {
        let mut out: Vec<Vec<&AxisValue>> = vec![Vec::new()];
        for axis in &self.axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    axis.values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

fn kv(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

/// Axis over one key.
fn axis(key: &str, values: &[&str]) -> Axis {
    Axis {
        name: key.to_string(),
        values: values
            .iter()
            .map(|v| AxisValue {
                label: v.to_string(),
                overrides: kv(&[(key, v)]),
            })
            .collect(),
    }
}

fn sv_inverter() -> Vec<(String, String)> {
    kv(&[
        ("device.kind", "sv"),
        ("device.inputs", "1"),
        ("device.output", "1"),
        ("drive.current", "200uA"),
    ])
}

fn nlsv_inverter() -> Vec<(String, String)> {
    kv(&[
        ("device.kind", "nlsv"),
        ("device.inputs", "1"),
        ("device.output", "1"),
        ("drive.current", "200uA"),
        ("contacts.L_input", "10nm"),
        ("contacts.L_output", "10nm"),
    ])
}

const CURRENTS: &[&str] = &["100uA", "140uA", "200uA", "260uA"];

pub fn all() -> Vec<Preset> {
    let patterns: Vec<String> = (0..8u8)
        .map(|p| format!("{},{},{}", p >> 2 & 1, p >> 1 & 1, p & 1))
        .collect();
    let pattern_axis = Axis {
        name: "device.inputs".into(),
        values: patterns
            .iter()
            .map(|p| AxisValue {
                label: p.replace(',', ""),
                overrides: kv(&[("device.inputs", p)]),
            })
            .collect(),
    };
    let majority = kv(&[
        ("device.kind", "majority3"),
        ("device.output", "auto"),
        ("drive.current", "-100uA"),
    ]);
    vec![
        Preset {
            name: "fig4-damping",
            anchor: "Fig. 4",
            description: "SV inverter, end-region damping 0.18 vs 0.5",
            fixed: sv_inverter(),
            axes: vec![axis("contacts.alpha_end", &["0.18", "0.5"])],
        },
        Preset {
            name: "fig5-input-length",
            anchor: "Fig. 5",
            description: "SV inverter, input contact length",
            fixed: sv_inverter(),
            axes: vec![axis("contacts.L_input", &["20nm", "40nm", "60nm", "100nm"])],
        },
        Preset {
            name: "fig6-output-length",
            anchor: "Fig. 6",
            description: "SV inverter, output contact length",
            fixed: sv_inverter(),
            axes: vec![axis("contacts.L_output", &["10nm", "20nm", "40nm", "100nm"])],
        },
        Preset {
            name: "fig7-current",
            anchor: "Fig. 7",
            description: "SV inverter, drive current",
            fixed: sv_inverter(),
            axes: vec![axis("drive.current", CURRENTS)],
        },
        Preset {
            name: "fig8",
            anchor: "Fig. 8",
            description: "SV from parallel alignment, drive +-200 uA",
            fixed: sv_inverter(),
            axes: vec![axis("drive.current", &["200uA", "-200uA"])],
        },
        Preset {
            name: "fig8-inverter",
            anchor: "Fig. 8",
            description: "SV inverter from parallel alignment, +200 uA",
            fixed: sv_inverter(),
            axes: vec![],
        },
        Preset {
            name: "fig9",
            anchor: "Fig. 9",
            description: "SV from anti-parallel alignment, drive +-200 uA",
            fixed: kv(&[("device.kind", "sv"), ("device.inputs", "1"), ("device.output", "0")]),
            axes: vec![axis("drive.current", &["200uA", "-200uA"])],
        },
        Preset {
            name: "fig10-majority",
            anchor: "Fig. 10",
            description: "3-input majority gate, -100 uA per input, all 8 input patterns",
            fixed: majority.clone(),
            axes: vec![pattern_axis.clone()],
        },
        Preset {
            name: "fig11-nlsv-output-length",
            anchor: "Fig. 11",
            description: "NLSV inverter, output contact length",
            fixed: nlsv_inverter(),
            axes: vec![axis("contacts.L_output", &["10nm", "20nm", "40nm", "100nm"])],
        },
        Preset {
            name: "fig12-nlsv-input-length",
            anchor: "Fig. 12",
            description: "NLSV inverter, input contact length",
            fixed: nlsv_inverter(),
            axes: vec![axis("contacts.L_input", &["10nm", "20nm", "40nm", "100nm"])],
        },
        Preset {
            name: "fig13-nlsv-current",
            anchor: "Fig. 13",
            description: "NLSV inverter, drive current",
            fixed: nlsv_inverter(),
            axes: vec![axis("drive.current", CURRENTS)],
        },
        Preset {
            name: "table2",
            anchor: "Table 2",
            description: "SV (40 nm, 20 nm) and NLSV (10 nm, 10 nm) inverters at 200 uA",
            fixed: kv(&[("device.inputs", "1"), ("device.output", "1"), ("drive.current", "200uA")]),
            axes: vec![Axis {
                name: "device".into(),
                values: vec![
                    AxisValue {
                        label: "SV (40nm, 20nm)".into(),
                        overrides: kv(&[
                            ("device.kind", "sv"),
                            ("device.inputs", "1"),
                            ("contacts.L_input", "40nm"),
                            ("contacts.L_output", "20nm"),
                        ]),
                    },
                    AxisValue {
                        label: "NLSV (10nm, 10nm)".into(),
                        overrides: kv(&[
                            ("device.kind", "nlsv"),
                            ("device.inputs", "1"),
                            ("contacts.L_input", "10nm"),
                            ("contacts.L_output", "10nm"),
                        ]),
                    },
                ],
            }],
        },
        Preset {
            name: "table3",
            anchor: "Table 3",
            description: "3-input majority gate switching delay and energy, all 8 input patterns",
            fixed: majority,
            axes: vec![pattern_axis],
        },
    ]
}

pub fn find(name: &str) -> Option<Preset> {
    all().into_iter().find(|p| p.name == name)
}
