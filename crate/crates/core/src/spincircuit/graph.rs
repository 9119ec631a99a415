//! Circuit graph of 4x4 branches, nodal assembly and solve.

use std::collections::BTreeSet;
use std::io::{self, Write};

use super::conductance::{local_frame, Conductance4, BASIS};
use super::CircuitError;
use crate::linalg::DenseMatrix;
use crate::vec3::{perpendicular, Vec3};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Terminal {
    Node(NodeId),
    Ground,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchKind {
    Series,
    Shunt,
}

/// A ferromagnet cell whose magnetization orients a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellRef {
    pub wire: usize,
    pub cell: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub node_i: NodeId,
    pub node_j: Terminal,
    pub kind: BranchKind,
    /// Conductance in the local frame for magnetic elements, global otherwise.
    pub local: Conductance4,
    pub magnetization_ref: Option<CellRef>,
    /// Current orientation of the referenced cell (unit vector).
    pub m_hat: Vec3,
}

impl Branch {
    /// Conductance in the global (charge, sx, sy, sz) frame.
    pub fn conductance(&self) -> Conductance4 {
        match self.magnetization_ref {
            None => self.local,
            Some(_) => {
                let frame = local_frame(self.m_hat).expect("branch orientation is kept unit");
                self.local.rotate_with(&frame)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentSource {
    /// Injection point; a ground entry is the return side of a source pair.
    pub node: Terminal,
    /// Charge current injected, A.
    pub amps: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CircuitGraph {
    labels: Vec<String>,
    branches: Vec<Branch>,
    sources: Vec<CurrentSource>,
}

impl CircuitGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, label: impl Into<String>) -> NodeId {
        self.labels.push(label.into());
        self.labels.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node]
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn sources(&self) -> &[CurrentSource] {
        &self.sources
    }

    fn push(&mut self, b: Branch) -> usize {
        self.branches.push(b);
        self.branches.len() - 1
    }

    pub fn add_series(&mut self, i: NodeId, j: NodeId, g: Conductance4) -> usize {
        self.push(Branch {
            node_i: i,
            node_j: Terminal::Node(j),
            kind: BranchKind::Series,
            local: g,
            magnetization_ref: None,
            m_hat: [1.0, 0.0, 0.0],
        })
    }

    /// Series element from `i` to the ground reference.
    pub fn add_series_to_ground(&mut self, i: NodeId, g: Conductance4) -> usize {
        self.push(Branch {
            node_i: i,
            node_j: Terminal::Ground,
            kind: BranchKind::Series,
            local: g,
            magnetization_ref: None,
            m_hat: [1.0, 0.0, 0.0],
        })
    }

    pub fn add_shunt(&mut self, i: NodeId, g: Conductance4) -> usize {
        self.push(Branch {
            node_i: i,
            node_j: Terminal::Ground,
            kind: BranchKind::Shunt,
            local: g,
            magnetization_ref: None,
            m_hat: [1.0, 0.0, 0.0],
        })
    }

    pub fn add_magnetic_series(
        &mut self,
        i: NodeId,
        j: NodeId,
        local: Conductance4,
        cell: CellRef,
    ) -> usize {
        self.push(Branch {
            node_i: i,
            node_j: Terminal::Node(j),
            kind: BranchKind::Series,
            local,
            magnetization_ref: Some(cell),
            m_hat: [1.0, 0.0, 0.0],
        })
    }

    pub fn add_magnetic_shunt(&mut self, i: NodeId, local: Conductance4, cell: CellRef) -> usize {
        self.push(Branch {
            node_i: i,
            node_j: Terminal::Ground,
            kind: BranchKind::Shunt,
            local,
            magnetization_ref: Some(cell),
            m_hat: [1.0, 0.0, 0.0],
        })
    }

    pub fn add_current_source(&mut self, node: NodeId, amps: f64) {
        self.sources.push(CurrentSource {
            node: Terminal::Node(node),
            amps,
        });
    }

    /// Voltage drive as its Norton equivalent: charge-only source
    /// conductance `g_source` from `node` to ground plus an injected current
    /// `volts * g_source`.
    pub fn add_voltage_source(&mut self, node: NodeId, volts: f64, g_source: f64) -> usize {
        self.add_current_source(node, volts * g_source);
        self.sources.push(CurrentSource {
            node: Terminal::Ground,
            amps: -volts * g_source,
        });
        self.add_series_to_ground(node, Conductance4::from_diag([g_source, 0.0, 0.0, 0.0]))
    }

    /// Multiply every source amplitude by `k`.
    pub fn scale_sources(&mut self, k: f64) {
        self.sources.iter_mut().for_each(|s| s.amps *= k);
    }

    /// Point every branch referencing `cell` along `m_hat`.
    pub fn set_magnetization(&mut self, cell: CellRef, m_hat: Vec3) -> Result<(), CircuitError> {
        local_frame(m_hat)?;
        for b in &mut self.branches {
            if b.magnetization_ref == Some(cell) {
                b.m_hat = m_hat;
            }
        }
        Ok(())
    }

    /// Re-orient all magnetic branches from a lookup.
    pub fn orient<F: FnMut(CellRef) -> Vec3>(&mut self, mut lookup: F) -> Result<(), CircuitError> {
        for b in &mut self.branches {
            if let Some(c) = b.magnetization_ref {
                let m = lookup(c);
                local_frame(m)?;
                b.m_hat = m;
            }
        }
        Ok(())
    }

    /// Checks the structural invariants: every node reaches every other
    /// through series branches, a charge-carrying path to ground exists,
    /// shunts end at ground, sources sum to zero and all entries are finite.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let n = self.node_count();
        if n == 0 {
            return Err(CircuitError::InvalidGraph("graph has no nodes".into()));
        }
        for (k, b) in self.branches.iter().enumerate() {
            if b.node_i >= n {
                return Err(CircuitError::InvalidGraph(format!("branch {k} references node {}", b.node_i)));
            }
            if let Terminal::Node(j) = b.node_j {
                if j >= n {
                    return Err(CircuitError::InvalidGraph(format!("branch {k} references node {j}")));
                }
                if b.kind == BranchKind::Shunt {
                    return Err(CircuitError::InvalidGraph(format!("shunt branch {k} does not end at ground")));
                }
            }
            if !b.local.is_finite() {
                return Err(CircuitError::InvalidGraph(format!("branch {k} has non-finite entries")));
            }
        }
        for s in &self.sources {
            let in_range = match s.node {
                Terminal::Node(k) => k < n,
                Terminal::Ground => true,
            };
            if !in_range || !s.amps.is_finite() {
                return Err(CircuitError::InvalidGraph(format!("bad source at {:?}", s.node)));
            }
        }
        let floating = self.floating_nodes();
        if !floating.is_empty() {
            return Err(CircuitError::Singular { floating });
        }
        let total: f64 = self.sources.iter().map(|s| s.amps).sum();
        let scale: f64 = self.sources.iter().map(|s| s.amps.abs()).sum();
        if total.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(CircuitError::InvalidGraph(format!(
                "source currents sum to {total:e} A, expected zero"
            )));
        }
        Ok(())
    }

    /// Nodes with no charge-carrying series path to ground, by label order.
    pub fn floating_nodes(&self) -> Vec<NodeId> {
        let n = self.node_count();
        let mut parent: Vec<usize> = (0..=n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let ground = n;
        for b in &self.branches {
            if b.kind != BranchKind::Series || b.local.charge() == 0.0 {
                continue;
            }
            let j = match b.node_j {
                Terminal::Node(j) => j,
                Terminal::Ground => ground,
            };
            let (ri, rj) = (find(&mut parent, b.node_i), find(&mut parent, j));
            if ri != rj {
                parent[ri] = rj;
            }
        }
        let g_root = find(&mut parent, ground);
        (0..n).filter(|&k| find(&mut parent, k) != g_root).collect()
    }

    /// Stamp the nodal system `[G][V] = [I]` of size 4N.
    pub fn assemble(&self) -> Result<NodalSystem, CircuitError> {
        self.validate()?;
        let n = self.node_count();
        let mut g = DenseMatrix::zeros(4 * n);
        for b in &self.branches {
            let c = b.conductance();
            let i = b.node_i;
            stamp(&mut g, i, i, &c, 1.0);
            if let (BranchKind::Series, Terminal::Node(j)) = (b.kind, b.node_j) {
                stamp(&mut g, j, j, &c, 1.0);
                stamp(&mut g, i, j, &c, -1.0);
                stamp(&mut g, j, i, &c, -1.0);
            }
        }
        let mut rhs = vec![0.0; 4 * n];
        for s in &self.sources {
            if let Terminal::Node(k) = s.node {
                rhs[4 * k] += s.amps;
            }
        }
        Ok(NodalSystem { matrix: g, rhs })
    }

    /// Assemble and solve in one call.
    pub fn solve(&self) -> Result<SolveResult, CircuitError> {
        self.assemble()?.solve(self)
    }
}

fn stamp(g: &mut DenseMatrix, bi: usize, bj: usize, c: &Conductance4, sign: f64) {
    for r in 0..4 {
        for k in 0..4 {
            let v = c.0[r][k];
            if v != 0.0 {
                g.add(4 * bi + r, 4 * bj + k, sign * v);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct NodalSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
}

impl NodalSystem {
    pub fn solve(&self, graph: &CircuitGraph) -> Result<SolveResult, CircuitError> {
        let lu = self.matrix.lu().map_err(|p| {
            let floating = graph.floating_nodes();
            CircuitError::Singular {
                floating: if floating.is_empty() { vec![p.row / 4] } else { floating },
            }
        })?;
        let v = lu.solve(&self.rhs);
        Ok(SolveResult::from_voltages(graph, &v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Per node: (charge, sx, sy, sz) voltages, V.
    pub node_voltages: Vec<[f64; 4]>,
    /// Per branch: current flowing from `node_i` to `node_j`, A.
    pub branch_currents: Vec<[f64; 4]>,
}

impl SolveResult {
    /// Branch currents from node voltages, `I_ij = G_ij (V_i - V_j)`.
    pub fn from_voltages(graph: &CircuitGraph, v: &[f64]) -> Self {
        let node_voltages: Vec<[f64; 4]> =
            v.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]]).collect();
        let branch_currents = graph
            .branches()
            .iter()
            .map(|b| {
                let vi = node_voltages[b.node_i];
                let vj = match b.node_j {
                    Terminal::Node(j) => node_voltages[j],
                    Terminal::Ground => [0.0; 4],
                };
                let dv = [vi[0] - vj[0], vi[1] - vj[1], vi[2] - vj[2], vi[3] - vj[3]];
                b.conductance().apply(&dv)
            })
            .collect();
        Self {
            node_voltages,
            branch_currents,
        }
    }

    /// Per node: norm of (net 4-current leaving through branches minus the
    /// injected source current).
    pub fn kcl_residuals(&self, graph: &CircuitGraph) -> Vec<f64> {
        let mut net = vec![[0.0; 4]; graph.node_count()];
        for (b, i) in graph.branches().iter().zip(&self.branch_currents) {
            for k in 0..4 {
                net[b.node_i][k] += i[k];
            }
            if let Terminal::Node(j) = b.node_j {
                for k in 0..4 {
                    net[j][k] -= i[k];
                }
            }
        }
        for s in graph.sources() {
            if let Terminal::Node(k) = s.node {
                net[k][0] -= s.amps;
            }
        }
        net.iter()
            .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    }

    pub fn write_csv<W: Write>(&self, graph: &CircuitGraph, mut w: W) -> io::Result<()> {
        writeln!(w, "kind,index,label,{}", BASIS.join(","))?;
        for (k, v) in self.node_voltages.iter().enumerate() {
            writeln!(w, "voltage,{k},{},{:e},{:e},{:e},{:e}", graph.label(k), v[0], v[1], v[2], v[3])?;
        }
        for (k, i) in self.branch_currents.iter().enumerate() {
            let b = &graph.branches()[k];
            let to = match b.node_j {
                Terminal::Node(j) => graph.label(j).to_string(),
                Terminal::Ground => "ground".to_string(),
            };
            writeln!(
                w,
                "current,{k},{}->{},{:e},{:e},{:e},{:e}",
                graph.label(b.node_i),
                to,
                i[0],
                i[1],
                i[2],
                i[3]
            )?;
        }
        Ok(())
    }
}

/// Transverse spin current through each listed transverse-shunt branch,
/// projected perpendicular to that branch's magnetization. Returned in the
/// circuit convention (current flowing from the normal-metal node into the
/// absorbing magnet).
pub fn stt_at_contact(result: &SolveResult, graph: &CircuitGraph, shunt_branches: &[usize]) -> Vec<Vec3> {
    shunt_branches
        .iter()
        .map(|&k| {
            let i = result.branch_currents[k];
            perpendicular([i[1], i[2], i[3]], graph.branches()[k].m_hat)
        })
        .collect()
}

/// Distinct labels of a node set, for error reporting.
pub fn describe_nodes(graph: &CircuitGraph, nodes: &[NodeId]) -> String {
    let set: BTreeSet<&str> = nodes.iter().map(|&n| graph.label(n)).collect();
    set.into_iter().collect::<Vec<_>>().join(", ")
}
