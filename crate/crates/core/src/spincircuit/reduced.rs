//! Port-reduced form of a circuit graph for repeated solves while the
//! magnetization evolves.
//!
//! Nodes whose every incident branch is oriented by one ferromagnet cell
//! (the ferromagnet-side nodes under a contact) form that cell's cluster.
//! In the cell's local frame the cluster is constant, so it is eliminated
//! once into a 4x4 admittance and a 4-current injection at the cell's port
//! (the normal-metal node it touches). All remaining magnetization-free
//! nodes are condensed onto the ports once as well. A solve then only
//! rotates the per-cell blocks into the global frame, adds them to the
//! static port matrix and solves a system of size 4 x (number of ports).

use std::collections::{BTreeMap, HashMap};

use super::conductance::{local_frame, Conductance4};
use super::graph::{BranchKind, CellRef, CircuitGraph, NodeId, Terminal};
use super::CircuitError;
use crate::linalg::{DenseMatrix, RefinedSolver};
use crate::vec3::{perpendicular, Vec3};

#[derive(Debug, Clone)]
struct CellBlock {
    cell: CellRef,
    port: usize,
    admittance: Conductance4,
    injection: [f64; 4],
    torque_shunt: Conductance4,
}

#[derive(Debug, Clone)]
pub struct ReducedCircuit {
    ports: Vec<NodeId>,
    base_matrix: DenseMatrix,
    base_rhs: Vec<f64>,
    cells: Vec<CellBlock>,
    cell_index: HashMap<CellRef, usize>,
    matrix: DenseMatrix,
    rhs: Vec<f64>,
    solver: RefinedSolver,
    port_voltages: Vec<f64>,
    frames: Vec<[Vec3; 3]>,
}

impl ReducedCircuit {
    pub fn new(graph: &CircuitGraph) -> Result<Self, CircuitError> {
        graph.validate()?;
        let n = graph.node_count();
        let branches = graph.branches();

        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (k, b) in branches.iter().enumerate() {
            incident[b.node_i].push(k);
            if let Terminal::Node(j) = b.node_j {
                if j != b.node_i {
                    incident[j].push(k);
                }
            }
        }
        // Cluster membership.
        let owner: Vec<Option<CellRef>> = incident
            .iter()
            .map(|inc| {
                let first = branches[*inc.first()?].magnetization_ref?;
                inc.iter()
                    .all(|&k| branches[k].magnetization_ref == Some(first))
                    .then_some(first)
            })
            .collect();

        // Group magnetic branches per cell and find each cell's port.
        let mut per_cell: BTreeMap<CellRef, Vec<usize>> = BTreeMap::new();
        for (k, b) in branches.iter().enumerate() {
            if let Some(c) = b.magnetization_ref {
                per_cell.entry(c).or_default().push(k);
            }
        }
        let mut port_of_cell: BTreeMap<CellRef, NodeId> = BTreeMap::new();
        for (&c, ks) in &per_cell {
            for &k in ks {
                let b = &branches[k];
                let ends = [Terminal::Node(b.node_i), b.node_j];
                let mut network_ends = Vec::new();
                for t in ends {
                    if let Terminal::Node(x) = t {
                        if owner[x] != Some(c) {
                            network_ends.push(x);
                        }
                    }
                }
                if network_ends.len() > 1 && network_ends[0] != network_ends[1] {
                    return Err(CircuitError::InvalidGraph(format!(
                        "magnetic branch {k} joins two network nodes; cannot reduce"
                    )));
                }
                if let Some(&p) = network_ends.first() {
                    match port_of_cell.get(&c) {
                        Some(&q) if q != p => {
                            return Err(CircuitError::InvalidGraph(format!(
                                "cell {c:?} touches more than one network node"
                            )))
                        }
                        _ => {
                            port_of_cell.insert(c, p);
                        }
                    }
                }
            }
            if !port_of_cell.contains_key(&c) {
                return Err(CircuitError::InvalidGraph(format!("cell {c:?} has no port")));
            }
        }

        let mut ports: Vec<NodeId> = Vec::new();
        let mut port_pos: HashMap<NodeId, usize> = HashMap::new();
        for &p in port_of_cell.values() {
            port_pos.entry(p).or_insert_with(|| {
                ports.push(p);
                ports.len() - 1
            });
        }

        // Per-cell local elimination.
        let mut cells = Vec::with_capacity(per_cell.len());
        for (&c, ks) in &per_cell {
            let port_node = port_of_cell[&c];
            let cluster: Vec<NodeId> = (0..n).filter(|&x| owner[x] == Some(c)).collect();
            let local_idx: HashMap<NodeId, usize> =
                cluster.iter().enumerate().map(|(i, &x)| (x, i)).collect();
            let kc = cluster.len();
            let idx = |x: NodeId| -> usize {
                if x == port_node {
                    kc
                } else {
                    local_idx[&x]
                }
            };
            let size = 4 * (kc + 1);
            let mut a = DenseMatrix::zeros(size);
            let mut torque_shunt = Conductance4::ZERO;
            for &k in ks {
                let b = &branches[k];
                let i = idx(b.node_i);
                stamp_local(&mut a, i, i, &b.local, 1.0);
                match (b.kind, b.node_j) {
                    (BranchKind::Series, Terminal::Node(j)) => {
                        let j = idx(j);
                        stamp_local(&mut a, j, j, &b.local, 1.0);
                        stamp_local(&mut a, i, j, &b.local, -1.0);
                        stamp_local(&mut a, j, i, &b.local, -1.0);
                    }
                    (BranchKind::Shunt, _) if b.node_i == port_node => {
                        torque_shunt = torque_shunt.plus(&b.local);
                    }
                    _ => {}
                }
            }
            let mut b_vec = vec![0.0; size];
            for s in graph.sources() {
                if let Terminal::Node(x) = s.node {
                    if let Some(&li) = local_idx.get(&x) {
                        b_vec[4 * li] += s.amps;
                    }
                }
            }
            let (y, j) = schur_onto_tail(&a, &b_vec, 4 * kc)?;
            let mut admittance = Conductance4::ZERO;
            for r in 0..4 {
                for q in 0..4 {
                    admittance.0[r][q] = y.get(r, q);
                }
            }
            cells.push(CellBlock {
                cell: c,
                port: port_pos[&port_node],
                admittance,
                injection: [j[0], j[1], j[2], j[3]],
                torque_shunt,
            });
        }

        // Static network condensed onto the ports: ports first, then interior.
        let network: Vec<NodeId> = (0..n).filter(|&x| owner[x].is_none()).collect();
        let mut order: Vec<NodeId> = ports.clone();
        order.extend(network.iter().copied().filter(|x| !port_pos.contains_key(x)));
        let pos: HashMap<NodeId, usize> = order.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let size = 4 * order.len();
        let mut a = DenseMatrix::zeros(size);
        for b in branches.iter().filter(|b| b.magnetization_ref.is_none()) {
            let i = pos[&b.node_i];
            stamp_local(&mut a, i, i, &b.local, 1.0);
            if let (BranchKind::Series, Terminal::Node(j)) = (b.kind, b.node_j) {
                let j = pos[&j];
                stamp_local(&mut a, j, j, &b.local, 1.0);
                stamp_local(&mut a, i, j, &b.local, -1.0);
                stamp_local(&mut a, j, i, &b.local, -1.0);
            }
        }
        let mut b_vec = vec![0.0; size];
        for s in graph.sources() {
            if let Terminal::Node(x) = s.node {
                if let Some(&p) = pos.get(&x) {
                    b_vec[4 * p] += s.amps;
                }
            }
        }
        // Interior block first for `schur_onto_tail`: rotate the ordering.
        let np = 4 * ports.len();
        let rotated = rotate_blocks(&a, np);
        let mut rotated_b = b_vec[np..].to_vec();
        rotated_b.extend_from_slice(&b_vec[..np]);
        let (base_matrix, base_rhs) = schur_onto_tail(&rotated, &rotated_b, size - np)?;

        let cell_index = cells.iter().enumerate().map(|(i, c)| (c.cell, i)).collect();
        let frames = vec![[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]; cells.len()];
        Ok(Self {
            matrix: base_matrix.clone(),
            rhs: base_rhs.clone(),
            ports,
            base_matrix,
            base_rhs,
            cells,
            cell_index,
            solver: RefinedSolver::default(),
            port_voltages: vec![0.0; np],
            frames,
        })
    }

    pub fn port_nodes(&self) -> &[NodeId] {
        &self.ports
    }

    pub fn cells(&self) -> impl Iterator<Item = CellRef> + '_ {
        self.cells.iter().map(|c| c.cell)
    }

    /// Solve with every source scaled by `source_scale` and cells oriented
    /// by `orientation`. Returns the port voltages, 4 per port.
    pub fn solve<F: Fn(CellRef) -> Vec3>(
        &mut self,
        orientation: F,
        source_scale: f64,
    ) -> Result<&[f64], CircuitError> {
        self.matrix.copy_from(&self.base_matrix);
        for (r, b) in self.rhs.iter_mut().zip(&self.base_rhs) {
            *r = b * source_scale;
        }
        for (k, c) in self.cells.iter().enumerate() {
            let frame = local_frame(orientation(c.cell))?;
            self.frames[k] = frame;
            let y = c.admittance.rotate_with(&frame);
            stamp_local(&mut self.matrix, c.port, c.port, &y, 1.0);
            let j = &c.injection;
            let base = 4 * c.port;
            self.rhs[base] += source_scale * j[0];
            for (axis, &jl) in frame.iter().zip(&j[1..]) {
                for d in 0..3 {
                    self.rhs[base + 1 + d] += source_scale * jl * axis[d];
                }
            }
        }
        let x = self.solver.solve(&self.matrix, &self.rhs).map_err(|p| CircuitError::Singular {
            floating: vec![self.ports[(p.row / 4).min(self.ports.len() - 1)]],
        })?;
        self.port_voltages = x;
        Ok(&self.port_voltages)
    }

    /// Voltages at a port node after the last solve.
    pub fn port_voltage(&self, node: NodeId) -> Option<[f64; 4]> {
        let p = self.ports.iter().position(|&x| x == node)?;
        let v = &self.port_voltages[4 * p..4 * p + 4];
        Some([v[0], v[1], v[2], v[3]])
    }

    /// Transverse spin current absorbed by `cell` after the last solve,
    /// circuit convention, projected perpendicular to the cell's orientation.
    pub fn absorbed_spin_current(&self, cell: CellRef) -> Option<Vec3> {
        let k = *self.cell_index.get(&cell)?;
        let c = &self.cells[k];
        let frame = &self.frames[k];
        let g = c.torque_shunt.rotate_with(frame);
        let v = &self.port_voltages[4 * c.port..4 * c.port + 4];
        let i = g.apply(&[v[0], v[1], v[2], v[3]]);
        Some(perpendicular([i[1], i[2], i[3]], frame[0]))
    }

    /// Number of LU factorizations performed so far.
    pub fn factorizations(&self) -> usize {
        self.solver.factorizations
    }

    /// Number of iterative refinement sweeps performed so far.
    pub fn refinement_sweeps(&self) -> usize {
        self.solver.refinement_sweeps
    }
}

fn stamp_local(a: &mut DenseMatrix, bi: usize, bj: usize, c: &Conductance4, sign: f64) {
    for r in 0..4 {
        for k in 0..4 {
            let v = c.0[r][k];
            if v != 0.0 {
                a.add(4 * bi + r, 4 * bj + k, sign * v);
            }
        }
    }
}

/// Move the leading `head` rows/columns to the end.
fn rotate_blocks(a: &DenseMatrix, head: usize) -> DenseMatrix {
    let n = a.dim();
    let map = |i: usize| if i < head { n - head + i } else { i - head };
    let mut out = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out.set(map(i), map(j), a.get(i, j));
        }
    }
    out
}

/// Eliminate the leading `inner` unknowns, returning the Schur complement
/// on the trailing block and the condensed right-hand side.
fn schur_onto_tail(
    a: &DenseMatrix,
    b: &[f64],
    inner: usize,
) -> Result<(DenseMatrix, Vec<f64>), CircuitError> {
    let n = a.dim();
    let outer = n - inner;
    let mut s = DenseMatrix::zeros(outer);
    for i in 0..outer {
        for j in 0..outer {
            s.set(i, j, a.get(inner + i, inner + j));
        }
    }
    let mut rhs: Vec<f64> = b[inner..].to_vec();
    if inner == 0 {
        return Ok((s, rhs));
    }
    let mut a_ii = DenseMatrix::zeros(inner);
    for i in 0..inner {
        for j in 0..inner {
            a_ii.set(i, j, a.get(i, j));
        }
    }
    let lu = a_ii
        .lu()
        .map_err(|p| CircuitError::Singular { floating: vec![p.row / 4] })?;
    // A_oi A_ii^-1 applied column by column of A_io.
    let mut col = vec![0.0; inner];
    for j in 0..outer {
        for (i, c) in col.iter_mut().enumerate() {
            *c = a.get(i, inner + j);
        }
        if col.iter().all(|v| *v == 0.0) {
            continue;
        }
        let x = lu.solve(&col);
        for i in 0..outer {
            let row = &a.row(inner + i)[..inner];
            let dot: f64 = row.iter().zip(&x).map(|(p, q)| p * q).sum();
            s.add(i, j, -dot);
        }
    }
    let y = lu.solve(&b[..inner]);
    for (i, r) in rhs.iter_mut().enumerate() {
        let row = &a.row(inner + i)[..inner];
        *r -= row.iter().zip(&y).map(|(p, q)| p * q).sum::<f64>();
    }
    Ok((s, rhs))
}
