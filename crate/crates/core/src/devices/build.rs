use std::ops::Range;

use super::config::{DeviceConfig, DeviceKind};
use super::DeviceError;
use crate::analysis::truth_table;
use crate::magnetodynamics::{MaterialFm, WireState};
use crate::spincircuit::{
    fm_conductances, interface_conductances, nm_conductances, CellRef, CircuitGraph, Conductance4, FmBulk,
    InterfaceBlocks, InterfaceParams, NodeId, PiModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactRole {
    Input,
    Output,
}

/// A run of wire cells sharing one contact to the channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Contact {
    pub role: ContactRole,
    pub wire: usize,
    pub cells: Range<usize>,
    /// Channel node under each cell.
    pub ports: Vec<NodeId>,
    /// Interface shunt branch of each cell; its transverse current is the
    /// absorbed spin current.
    pub torque_shunts: Vec<usize>,
}

impl Contact {
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }
}

/// A built device: circuit, wires and the bindings between them.
///
/// Sources in `graph` are normalized to 1 A per input; the transient loop
/// scales them by the instantaneous drive current.
#[derive(Debug, Clone)]
pub struct Device {
    pub config: DeviceConfig,
    pub material: MaterialFm,
    pub graph: CircuitGraph,
    pub wires: Vec<WireState>,
    pub contacts: Vec<Contact>,
    /// Wire index of each logic input.
    pub inputs: Vec<usize>,
    /// Wire index of the output.
    pub output: usize,
    /// Number of channel (normal-metal) nodes.
    pub channel_nodes: usize,
}

impl Device {
    pub fn build(config: &DeviceConfig) -> Result<Self, DeviceError> {
        match config.device.kind {
            DeviceKind::Sv => build_sv(config),
            DeviceKind::Majority3 => build_majority3(config),
            DeviceKind::Nlsv => build_nlsv(config),
        }
    }

    pub fn kind(&self) -> DeviceKind {
        self.config.device.kind
    }

    /// Logic value of a wire: m_x > 0 is 1.
    pub fn bit(&self, wire: usize) -> bool {
        self.wires[wire].average()[0] > 0.0
    }

    pub fn output_contact(&self) -> &Contact {
        self.contacts
            .iter()
            .find(|c| c.role == ContactRole::Output)
            .expect("every device has an output contact")
    }

    /// Expected output for the configured inputs under a drive of the
    /// given sign.
    pub fn expected_output(&self, drive_sign: f64) -> bool {
        drive_polarity_semantics(self, drive_sign)
    }
}

/// Final output bit the device should settle to: negative drive copies the
/// (majority of the) inputs, positive drive inverts them.
pub fn drive_polarity_semantics(device: &Device, sign: f64) -> bool {
    truth_table(device.kind(), sign, &device.config.device.inputs)
}

struct Builder<'a> {
    cfg: &'a DeviceConfig,
    g: CircuitGraph,
    interface: InterfaceBlocks,
    fm: PiModel,
    contacts: Vec<Contact>,
    channel_nodes: usize,
}

impl<'a> Builder<'a> {
    fn new(cfg: &'a DeviceConfig) -> Result<Self, DeviceError> {
        cfg.validate()?;
        let cell_area = cfg.fm.mesh * cfg.fm.w_fm;
        let interface = interface_conductances(
            cell_area,
            &InterfaceParams {
                g_up: cfg.interface.g_upup,
                g_down: cfg.interface.g_downdown,
                g_mix: cfg.interface.g_updown,
                mix_factor: cfg.interface.mix_factor,
                g_mix_imag: cfg.interface.g_updown_imag,
            },
        )?;
        let fm = fm_conductances(&FmBulk {
            length: cfg.fm.t_fm,
            area: cell_area,
            resistivity: cfg.fm.rho,
            beta: cfg.fm.beta,
            lsf_parallel: cfg.fm.l_sf_parallel,
            lsf_perp: cfg.fm.l_sf_perp,
        })?;
        Ok(Self {
            cfg,
            g: CircuitGraph::new(),
            interface,
            fm,
            contacts: Vec::new(),
            channel_nodes: 0,
        })
    }

    fn channel_node(&mut self, label: String) -> NodeId {
        self.channel_nodes += 1;
        self.g.add_node(label)
    }

    /// Normal-metal segment between two channel nodes.
    fn segment(&mut self, a: NodeId, b: NodeId, length: f64) -> Result<(), DeviceError> {
        let ch = &self.cfg.channel;
        let pi = nm_conductances(length, ch.w_nm * ch.t_nm, ch.rho_n, ch.lambda_n)?;
        self.g.add_series(a, b, pi.series);
        self.g.add_shunt(a, pi.shunt_per_side);
        self.g.add_shunt(b, pi.shunt_per_side);
        Ok(())
    }

    /// Straight channel run of `length` from `from`, split at the configured
    /// pitch. Returns the far node, reusing `to` if given.
    fn run(&mut self, from: NodeId, length: f64, to: Option<NodeId>, label: &str) -> Result<NodeId, DeviceError> {
        let n = ((length / self.cfg.channel.pitch).round() as usize).max(1);
        let step = length / n as f64;
        let mut prev = from;
        for k in 1..=n {
            let next = match (k == n, to) {
                (true, Some(t)) => t,
                _ => self.channel_node(format!("{label}[{k}]")),
            };
            self.segment(prev, next, step)?;
            prev = next;
        }
        Ok(prev)
    }

    /// Contact over `cells` of `wire`. The first port sits half a mesh from
    /// `from`; `reversed` walks the cells from the highest index. Each cell
    /// receives `amps_per_contact / n` at its ferromagnet top node. Returns
    /// the channel node half a mesh past the last cell.
    fn contact(
        &mut self,
        role: ContactRole,
        wire: usize,
        cells: Range<usize>,
        from: NodeId,
        amps_per_contact: f64,
        tag: &str,
    ) -> Result<NodeId, DeviceError> {
        let mesh = self.cfg.fm.mesh;
        let n = cells.len();
        let mut ports = Vec::with_capacity(n);
        let mut shunts = Vec::with_capacity(n);
        let mut prev = from;
        for (k, cell) in cells.clone().enumerate() {
            let port = self.channel_node(format!("{tag}.port[{cell}]"));
            self.segment(prev, port, if k == 0 { mesh / 2.0 } else { mesh })?;
            let c = CellRef { wire, cell };
            let fm_if = self.g.add_node(format!("{tag}.fm_if[{cell}]"));
            let top = self.g.add_node(format!("{tag}.fm_top[{cell}]"));
            self.g.add_magnetic_series(port, fm_if, self.interface.series, c);
            shunts.push(self.g.add_magnetic_shunt(port, self.interface.shunt_nm_side, c));
            self.g.add_magnetic_series(fm_if, top, self.fm.series, c);
            self.g.add_magnetic_shunt(fm_if, self.fm.shunt_per_side, c);
            self.g.add_magnetic_shunt(top, self.fm.shunt_per_side, c);
            if amps_per_contact != 0.0 {
                self.g.add_current_source(top, amps_per_contact / n as f64);
            }
            ports.push(port);
            prev = port;
        }
        let edge = self.channel_node(format!("{tag}.edge"));
        self.segment(prev, edge, mesh / 2.0)?;
        self.contacts.push(Contact {
            role,
            wire,
            cells,
            ports,
            torque_shunts: shunts,
        });
        Ok(edge)
    }

    fn ground_reference(&mut self, node: NodeId) {
        self.g
            .add_series_to_ground(node, Conductance4::from_diag([1.0, 0.0, 0.0, 0.0]));
    }

    fn finish(self, inputs: Vec<usize>, output: usize) -> Result<Device, DeviceError> {
        self.g.validate()?;
        let cfg = self.cfg;
        let material = cfg.material();
        let n_cells = cfg.wire_cells();
        let end = n_cells - cfg.input_cells()..n_cells;
        let drive_sign = if cfg.drive.current < 0.0 { -1.0 } else { 1.0 };
        let out_bit = cfg
            .device
            .output
            .unwrap_or_else(|| !truth_table(cfg.device.kind, drive_sign, &cfg.device.inputs));
        let bits: Vec<bool> = cfg.device.inputs.iter().copied().chain([out_bit]).collect();
        let mut wires = Vec::with_capacity(bits.len());
        let n_wires = bits.len();
        for (k, b) in bits.into_iter().enumerate() {
            let mut w = WireState::uniform(
                n_cells,
                cfg.fm.mesh,
                cfg.fm.w_fm,
                cfg.fm.t_fm,
                if b { 1.0 } else { -1.0 },
                cfg.fm.alpha,
            )?;
            w.set_damping_profile(end.clone(), cfg.contacts.alpha_end)?;
            if k == n_wires - 1 {
                // Seed misalignment between output and inputs; collinear
                // states carry no torque at zero temperature.
                w.tilt_in_plane(cfg.sim.tilt);
            }
            wires.push(w);
        }
        Ok(Device {
            config: cfg.clone(),
            material,
            graph: self.g,
            wires,
            contacts: self.contacts,
            inputs,
            output,
            channel_nodes: self.channel_nodes,
        })
    }
}

/// Lateral spin valve: the end of the input wire and the start of the
/// output wire sit under one channel, `l_NM` apart.
pub fn build_sv(cfg: &DeviceConfig) -> Result<Device, DeviceError> {
    let mut b = Builder::new(cfg)?;
    let n = cfg.wire_cells();
    let (n_in, n_out) = (cfg.input_cells(), cfg.output_cells());
    let start = b.channel_node("start".into());
    let gap = b.contact(ContactRole::Input, 0, n - n_in..n, start, 1.0, "in")?;
    let far = b.run(gap, cfg.channel.l_nm, None, "gap")?;
    let end = b.contact(ContactRole::Output, 1, 0..n_out, far, -1.0, "out")?;
    b.ground_reference(end);
    b.finish(vec![0], 1)
}

/// Three input arms of `arm_length` meet at a junction; a single arm of
/// `l_NM - arm_length` leads to the output contact.
pub fn build_majority3(cfg: &DeviceConfig) -> Result<Device, DeviceError> {
    let mut b = Builder::new(cfg)?;
    let n = cfg.wire_cells();
    let (n_in, n_out) = (cfg.input_cells(), cfg.output_cells());
    let junction = b.channel_node("junction".into());
    for k in 0..3 {
        let start = b.channel_node(format!("arm{k}.start"));
        let edge = b.contact(ContactRole::Input, k, n - n_in..n, start, 1.0, &format!("in{k}"))?;
        b.run(edge, cfg.channel.arm_length, Some(junction), &format!("arm{k}"))?;
    }
    let far = b.run(junction, cfg.channel.l_nm - cfg.channel.arm_length, None, "stem")?;
    let end = b.contact(ContactRole::Output, 3, 0..n_out, far, -3.0, "out")?;
    b.ground_reference(end);
    b.finish(vec![0, 1, 2], 3)
}

/// Non-local spin valve: the drive returns through a ground arm of
/// `shunt_length` ending in a lead, while the output contact hangs off a
/// detector arm of `l_NM` that carries no charge current.
pub fn build_nlsv(cfg: &DeviceConfig) -> Result<Device, DeviceError> {
    let mut b = Builder::new(cfg)?;
    let n = cfg.wire_cells();
    let (n_in, n_out) = (cfg.input_cells(), cfg.output_cells());
    let start = b.channel_node("start".into());
    let junction = b.contact(ContactRole::Input, 0, n - n_in..n, start, 1.0, "in")?;
    let terminal = b.run(junction, cfg.channel.shunt_length, None, "ground_arm")?;
    b.g.add_current_source(terminal, -1.0);
    // Semi-infinite lead: input conductance A/(rho lambda) for every
    // component.
    let ch = &cfg.channel;
    let g_lead = ch.w_nm * ch.t_nm / (ch.rho_n * ch.lambda_n);
    b.g.add_series_to_ground(terminal, Conductance4::charge_spin_diag(g_lead, g_lead));
    let far = b.run(junction, cfg.channel.l_nm, None, "detector")?;
    b.contact(ContactRole::Output, 1, 0..n_out, far, 0.0, "out")?;
    b.finish(vec![0], 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sv_contact_accounting() {
        let d = build_sv(&DeviceConfig::default()).unwrap();
        assert_eq!(d.contacts[0].n_cells(), 20);
        assert_eq!(d.contacts[1].n_cells(), 10);
        assert_eq!(d.contacts[0].cells, 130..150);
        assert_eq!(d.contacts[1].cells, 0..10);
        // start + 20 ports + edge + 7 gap nodes + 10 ports + edge
        assert_eq!(d.channel_nodes, 1 + 20 + 1 + 7 + 10 + 1);
        assert_eq!(d.graph.node_count(), d.channel_nodes + 2 * (20 + 10));
    }

    #[test]
    fn majority_topology() {
        let d = build_majority3(&DeviceConfig::for_kind(DeviceKind::Majority3)).unwrap();
        assert_eq!(d.wires.len(), 4);
        assert_eq!(d.contacts.len(), 4);
        let total: f64 = d.graph.sources().iter().map(|s| s.amps).sum();
        assert!(total.abs() < 1e-12);
    }

    #[test]
    fn initial_output_is_complement_of_expectation() {
        let mut cfg = DeviceConfig::for_kind(DeviceKind::Majority3);
        cfg.device.inputs = vec![true, true, false];
        let d = Device::build(&cfg).unwrap();
        assert!(d.bit(0) && d.bit(1) && !d.bit(2));
        assert!(!d.bit(3));
        assert!(d.expected_output(-1.0));
    }

    #[test]
    fn damping_under_input_contact() {
        let d = build_sv(&DeviceConfig::default()).unwrap();
        let w = &d.wires[0];
        assert!(w.alpha[130..].iter().all(|&a| a == 0.18));
        assert!(w.alpha[..130].iter().all(|&a| a == 0.007));
    }

    #[test]
    fn construction_is_deterministic() {
        let cfg = DeviceConfig::for_kind(DeviceKind::Nlsv);
        let a = build_nlsv(&cfg).unwrap();
        let b = build_nlsv(&cfg).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.wires, b.wires);
    }
}
