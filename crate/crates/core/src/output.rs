//! Node, edge and instrumentation records shared by every planner, plus the
//! JSON shape they are exported in.

use serde::{Deserialize, Serialize};

use crate::geometry::Configuration;
use crate::nn_index::{NodeId, TreeId};

/// A tree vertex. Node `i` for `i < n` is the root of tree `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub tree: TreeId,
    pub config: Configuration,
    pub parent: Option<NodeId>,
    pub cost: f64,
    /// The node whose expansion created this one; `None` for roots.
    pub source: Option<NodeId>,
    pub(crate) children: Vec<NodeId>,
}

impl Node {
    pub(crate) fn root(id: NodeId, tree: TreeId, config: Configuration) -> Self {
        Self {
            id,
            tree,
            config,
            parent: None,
            cost: 0.0,
            source: None,
            children: Vec::new(),
        }
    }

    pub fn is_root(&self) -> bool {
        self.parent.is_none()
    }

    pub fn children(&self) -> &[NodeId] {
        &self.children
    }
}

/// Validated straight connection between nodes of two different trees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VirtualEdge {
    pub a: NodeId,
    pub b: NodeId,
    pub length: f64,
}

/// Point collision checks spent in one iteration, split by purpose.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationCounters {
    pub expansion: u32,
    pub connection: u32,
    pub rewire: u32,
}

impl IterationCounters {
    /// Expansion plus connection checks; rewiring is reported separately.
    pub fn edge_validation(&self) -> u32 {
        self.expansion + self.connection
    }

    pub fn total(&self) -> u64 {
        self.expansion as u64 + self.connection as u64 + self.rewire as u64
    }
}

/// Read access common to every planner result, used to build roadmaps and to
/// render and export results.
pub trait PlannerOutput {
    fn targets(&self) -> &[Configuration];
    fn nodes(&self) -> &[Node];
    /// Inter-tree connections (virtual edges or merge edges).
    fn connections(&self) -> &[VirtualEdge];
    fn counters(&self) -> &[IterationCounters];
    fn iterations_used(&self) -> usize;
    /// First iteration after which all targets were connected.
    fn connected_at(&self) -> Option<usize>;

    fn node(&self, id: NodeId) -> &Node {
        &self.nodes()[id.index()]
    }

    fn root_of(&self, target: usize) -> NodeId {
        NodeId(target as u32)
    }

    fn total_point_checks(&self) -> u64 {
        self.counters().iter().map(IterationCounters::total).sum()
    }

    fn to_record(&self, planner: &str) -> PlanRecord {
        let counters = self.counters();
        PlanRecord {
            version: 1,
            planner: planner.to_string(),
            targets: self.targets().to_vec(),
            nodes: self
                .nodes()
                .iter()
                .map(|n| NodeRecord {
                    id: n.id,
                    tree: n.tree,
                    x: n.config.x,
                    y: n.config.y,
                    parent: n.parent,
                    cost: n.cost,
                    source: n.source,
                })
                .collect(),
            virtual_edges: self.connections().to_vec(),
            iterations_used: self.iterations_used(),
            connected_at: self.connected_at(),
            counters: CounterColumns {
                expansion: counters.iter().map(|c| c.expansion).collect(),
                connection: counters.iter().map(|c| c.connection).collect(),
                rewire: counters.iter().map(|c| c.rewire).collect(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: NodeId,
    pub tree: TreeId,
    pub x: f64,
    pub y: f64,
    pub parent: Option<NodeId>,
    pub cost: f64,
    pub source: Option<NodeId>,
}

/// Per-iteration counters stored column-wise.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CounterColumns {
    pub expansion: Vec<u32>,
    pub connection: Vec<u32>,
    pub rewire: Vec<u32>,
}

/// JSON export of a planner run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub version: u32,
    pub planner: String,
    pub targets: Vec<Configuration>,
    pub nodes: Vec<NodeRecord>,
    pub virtual_edges: Vec<VirtualEdge>,
    pub iterations_used: usize,
    pub connected_at: Option<usize>,
    pub counters: CounterColumns,
}
