use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use petgraph::algo::toposort;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qstate::QubitSet;
use crate::stages::InformationContent;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeNode {
    pub time: u64,
    pub block: usize,
    pub qubits: QubitSet,
}

impl LatticeNode {
    /// Stable identifier `t{time}b{block}`.
    pub fn id(&self) -> String {
        format!("t{}b{}", self.time, self.block)
    }
}

/// Factor blocks over time, linked parent to child by ancestry.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorLattice {
    nodes: Vec<LatticeNode>,
    /// `(parent, child)` as indices into `nodes`.
    edges: Vec<(usize, usize)>,
}

impl FactorLattice {
    /// Builds the lattice from the retained snapshots and ancestry. Needs at
    /// least two snapshots at consecutive times.
    pub fn from_info(info: &InformationContent) -> Result<Self> {
        let snapshots = info.partitions();
        if snapshots.len() < 2 {
            return Err(Error::Graph(format!(
                "need at least two partition snapshots, have {}",
                snapshots.len()
            )));
        }
        for w in snapshots.windows(2) {
            if w[1].time != w[0].time + 1 {
                return Err(Error::Graph(format!(
                    "missing partition snapshot between times {} and {}",
                    w[0].time, w[1].time
                )));
            }
        }
        let mut nodes = Vec::new();
        let mut index = HashMap::new();
        for snap in snapshots {
            for (block, qubits) in snap.blocks.iter().enumerate() {
                index.insert((snap.time, block), nodes.len());
                nodes.push(LatticeNode {
                    time: snap.time,
                    block,
                    qubits: qubits.clone(),
                });
            }
        }
        let mut edges = Vec::with_capacity(info.ancestry().len());
        for e in info.ancestry() {
            let parent = index.get(&(e.time, e.parent));
            let child = index.get(&(e.time + 1, e.child));
            match (parent, child) {
                (Some(&p), Some(&c)) => edges.push((p, c)),
                _ => {
                    return Err(Error::Graph(format!(
                        "ancestry edge t{}b{} -> t{}b{} has no snapshot",
                        e.time,
                        e.parent,
                        e.time + 1,
                        e.child
                    )))
                }
            }
        }
        let lattice = Self { nodes, edges };
        lattice.check_acyclic()?;
        Ok(lattice)
    }

    pub fn nodes(&self) -> &[LatticeNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|(p, _)| *p == node).count()
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|(_, c)| *c == node).count()
    }

    pub fn node_index(&self, time: u64, block: usize) -> Option<usize> {
        self.nodes.iter().position(|n| n.time == time && n.block == block)
    }

    /// Every edge points one step forward in time and the graph has no
    /// directed cycle.
    pub fn check_acyclic(&self) -> Result<()> {
        for &(p, c) in &self.edges {
            if self.nodes[c].time != self.nodes[p].time + 1 {
                return Err(Error::Graph(format!(
                    "edge {} -> {} does not advance time by one",
                    self.nodes[p].id(),
                    self.nodes[c].id()
                )));
            }
        }
        let mut g = DiGraph::<(), ()>::with_capacity(self.nodes.len(), self.edges.len());
        let ids: Vec<_> = self.nodes.iter().map(|_| g.add_node(())).collect();
        for &(p, c) in &self.edges {
            g.add_edge(ids[p], ids[c], ());
        }
        toposort(&g, None)
            .map(|_| ())
            .map_err(|cycle| Error::Graph(format!("cycle through {}", self.nodes[cycle.node_id().index()].id())))
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph factor_lattice {\n  rankdir=LR;\n");
        for node in &self.nodes {
            let _ = writeln!(out, "  {} [label=\"{}:{}\"];", node.id(), node.time, node.qubits);
        }
        for &(p, c) in &self.edges {
            let _ = writeln!(out, "  {} -> {};", self.nodes[p].id(), self.nodes[c].id());
        }
        out.push_str("}\n");
        out
    }

    /// `{"nodes": [...], "adjacency": {id: [child ids]}}` with sorted keys.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Export<'a> {
            nodes: Vec<NodeExport<'a>>,
            adjacency: BTreeMap<String, Vec<String>>,
        }
        #[derive(Serialize)]
        struct NodeExport<'a> {
            id: String,
            time: u64,
            block: usize,
            qubits: &'a QubitSet,
        }
        let mut adjacency: BTreeMap<String, Vec<String>> =
            self.nodes.iter().map(|n| (n.id(), Vec::new())).collect();
        for &(p, c) in &self.edges {
            adjacency.entry(self.nodes[p].id()).or_default().push(self.nodes[c].id());
        }
        let export = Export {
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeExport {
                    id: n.id(),
                    time: n.time,
                    block: n.block,
                    qubits: &n.qubits,
                })
                .collect(),
            adjacency,
        };
        serde_json::to_string_pretty(&export).expect("lattice export is plain data")
    }
}
