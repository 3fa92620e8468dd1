//! The space-filling forest planner.
//!
//! One tree grows from every target. Nodes are picked for expansion from an
//! open list, either uniformly or through per-target priority queues, and are
//! expanded by sampling a circle of radius `l` around them. A sample is
//! rejected when it collides or when some other node of the same tree is at
//! least as close to it as the expanded node. Accepted nodes are rewired in
//! the RRT* manner and then tested for straight connections (virtual edges)
//! to every other tree. Trees are never merged; connectivity is tracked with
//! disjoint sets over tree ids.
//!
//! Random draws come from a single ChaCha8 stream seeded by
//! [`PlannerParams::rng_seed`], consumed in this order within an iteration:
//!
//! 1. open list non-empty and queues enabled with `n >= 2`: one `f64` coin;
//!    if it is below `p_q`, a tree index then a queue index;
//! 2. a list index when selecting from the open or close list;
//! 3. one `f64` angle per expansion sample, at most `k` of them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, Configuration, Workspace};
use crate::nn_index::{NodeId, SpatialIndex, TargetQueue, TreeId};
use crate::output::{IterationCounters, Node, PlannerOutput, VirtualEdge};
use crate::tree;
use crate::union_find::DisjointSets;

/// Planner configuration. Field names follow the usual symbols: `l` is the
/// sampling distance, `d` the tree-connection distance, `k` the number of
/// samples per expansion (also the rewiring neighborhood size) and `p_q` the
/// probability of selecting through the priority queues.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerParams {
    pub l: f64,
    pub d: f64,
    pub k: usize,
    pub p_q: f64,
    pub i_max: usize,
    pub rewiring_enabled: bool,
    pub queues_enabled: bool,
    pub check_points: usize,
    pub rng_seed: u64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self {
            l: 40.0,
            d: 50.0,
            k: 12,
            p_q: 0.95,
            i_max: 100_000,
            rewiring_enabled: true,
            queues_enabled: true,
            check_points: 3,
            rng_seed: 0,
        }
    }
}

impl PlannerParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.l > 0.0 && self.l.is_finite()) {
            return bad(format!("l must be positive, got {}", self.l));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return bad(format!("d must be positive, got {}", self.d));
        }
        if self.k < 1 {
            return bad("k must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.p_q) {
            return bad(format!("p_q must lie in [0, 1], got {}", self.p_q));
        }
        if self.i_max < 1 {
            return bad("i_max must be at least 1".into());
        }
        if self.check_points < 2 {
            return bad("check_points must be at least 2".into());
        }
        Ok(())
    }

    /// Full planner: queues and rewiring.
    pub fn sff_star(self) -> Self {
        Self {
            rewiring_enabled: true,
            queues_enabled: true,
            ..self
        }
    }

    /// Queues without rewiring.
    pub fn nr_sff_star(self) -> Self {
        Self {
            rewiring_enabled: false,
            queues_enabled: true,
            ..self
        }
    }

    /// Neither queues nor rewiring.
    pub fn simple_sff(self) -> Self {
        Self {
            rewiring_enabled: false,
            queues_enabled: false,
            ..self
        }
    }

    pub fn with_seed(self, rng_seed: u64) -> Self {
        Self { rng_seed, ..self }
    }
}

/// Checks the shared preconditions on targets.
pub(crate) fn validate_targets(ws: &Workspace, targets: &[Configuration]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::TooFewTargets {
            required: 1,
            actual: 0,
        });
    }
    for (i, t) in targets.iter().enumerate() {
        if !ws.point_free(*t) {
            return Err(Error::TargetInCollision {
                index: i,
                x: t.x,
                y: t.y,
            });
        }
        if let Some(j) = targets[..i].iter().position(|o| o == t) {
            return Err(Error::DuplicateTargets { first: j, second: i });
        }
    }
    Ok(())
}

/// Vector of ids with O(1) membership, removal and uniform indexing.
#[derive(Clone, Debug, Default)]
pub(crate) struct IdList {
    items: Vec<NodeId>,
    pos: Vec<u32>,
}

impl IdList {
    const ABSENT: u32 = u32::MAX;

    pub(crate) fn insert(&mut self, id: NodeId) {
        if self.pos.len() <= id.index() {
            self.pos.resize(id.index() + 1, Self::ABSENT);
        }
        debug_assert_eq!(self.pos[id.index()], Self::ABSENT);
        self.pos[id.index()] = self.items.len() as u32;
        self.items.push(id);
    }

    pub(crate) fn remove(&mut self, id: NodeId) -> bool {
        let Some(&p) = self.pos.get(id.index()) else {
            return false;
        };
        if p == Self::ABSENT {
            return false;
        }
        self.items.swap_remove(p as usize);
        if let Some(&moved) = self.items.get(p as usize) {
            self.pos[moved.index()] = p;
        }
        self.pos[id.index()] = Self::ABSENT;
        true
    }

    pub(crate) fn contains(&self, id: NodeId) -> bool {
        self.pos
            .get(id.index())
            .is_some_and(|&p| p != Self::ABSENT)
    }

    pub(crate) fn len(&self) -> usize {
        self.items.len()
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub(crate) fn get(&self, i: usize) -> NodeId {
        self.items[i]
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.items.iter().copied()
    }
}

/// Planner state and result.
#[derive(Clone, Debug)]
pub struct Forest {
    params: PlannerParams,
    targets: Vec<Configuration>,
    nodes: Vec<Node>,
    indices: Vec<SpatialIndex>,
    open: IdList,
    closed: IdList,
    /// `queues[i][q]` targets `j = q` for `q < i`, `j = q + 1` otherwise.
    queues: Vec<Vec<TargetQueue>>,
    virtual_edges: Vec<VirtualEdge>,
    components: DisjointSets,
    iterations_used: usize,
    connected_at: Option<usize>,
    counters: Vec<IterationCounters>,
}

impl Forest {
    fn new(targets: &[Configuration], params: PlannerParams) -> Self {
        let n = targets.len();
        let mut forest = Forest {
            params,
            targets: targets.to_vec(),
            nodes: Vec::new(),
            indices: vec![SpatialIndex::new(); n],
            open: IdList::default(),
            closed: IdList::default(),
            queues: (0..n)
                .map(|i| {
                    (0..n)
                        .filter(|&j| j != i)
                        .map(|j| TargetQueue::new(TreeId(i as u32), j))
                        .collect()
                })
                .collect(),
            virtual_edges: Vec::new(),
            components: DisjointSets::new(n),
            iterations_used: 0,
            connected_at: None,
            counters: Vec::new(),
        };
        for (i, t) in targets.iter().enumerate() {
            let id = NodeId(i as u32);
            let tree = TreeId(i as u32);
            forest.nodes.push(Node::root(id, tree, *t));
            forest.indices[i]
                .insert(id, *t)
                .expect("fresh index");
            forest.open.insert(id);
            forest.enqueue(id, tree);
        }
        if forest.is_single_component() {
            forest.connected_at = Some(0);
        }
        forest
    }

    fn enqueue(&mut self, id: NodeId, tree: TreeId) {
        if !self.params.queues_enabled {
            return;
        }
        let config = self.nodes[id.index()].config;
        for q in &mut self.queues[tree.index()] {
            let key = distance(config, self.targets[q.target()]);
            q.push(id, key);
        }
    }

    pub fn params(&self) -> &PlannerParams {
        &self.params
    }

    pub fn tree_count(&self) -> usize {
        self.targets.len()
    }

    pub fn tree_index(&self, tree: TreeId) -> &SpatialIndex {
        &self.indices[tree.index()]
    }

    pub fn virtual_edges(&self) -> &[VirtualEdge] {
        &self.virtual_edges
    }

    pub fn open_list(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.open.iter()
    }

    pub fn close_list(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.closed.iter()
    }

    pub fn is_open(&self, id: NodeId) -> bool {
        self.open.contains(id)
    }

    pub fn is_closed(&self, id: NodeId) -> bool {
        self.closed.contains(id)
    }

    /// Queue of tree `tree` keyed towards `target`.
    pub fn queue(&self, tree: TreeId, target: usize) -> Option<&TargetQueue> {
        let i = tree.index();
        if target == i || target >= self.tree_count() {
            return None;
        }
        let q = if target < i { target } else { target - 1 };
        self.queues[i].get(q)
    }

    pub fn queues(&self) -> impl Iterator<Item = &TargetQueue> {
        self.queues.iter().flatten()
    }

    pub fn is_single_component(&self) -> bool {
        self.components.set_count() <= 1
    }

    /// Number of virtual edges between every unordered pair of trees.
    pub fn tree_pair_edge_counts(&self) -> std::collections::BTreeMap<(TreeId, TreeId), usize> {
        let mut counts = std::collections::BTreeMap::new();
        for e in &self.virtual_edges {
            let ta = self.nodes[e.a.index()].tree;
            let tb = self.nodes[e.b.index()].tree;
            *counts.entry((ta.min(tb), ta.max(tb))).or_insert(0) += 1;
        }
        counts
    }
}

impl PlannerOutput for Forest {
    fn targets(&self) -> &[Configuration] {
        &self.targets
    }

    fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    fn connections(&self) -> &[VirtualEdge] {
        &self.virtual_edges
    }

    fn counters(&self) -> &[IterationCounters] {
        &self.counters
    }

    fn iterations_used(&self) -> usize {
        self.iterations_used
    }

    fn connected_at(&self) -> Option<usize> {
        self.connected_at
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expansion {
    Success(NodeId),
    Failure,
}

/// What happened in one iteration of [`SffPlanner::step`].
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub selected: NodeId,
    pub tree: TreeId,
    pub expansion: Expansion,
    /// Whether the selected node moved from the open to the close list.
    pub closed: bool,
    pub new_virtual_edges: usize,
    pub counters: IterationCounters,
}

/// Step-wise driver of the forest planner.
pub struct SffPlanner<'a> {
    ws: &'a Workspace,
    forest: Forest,
    rng: ChaCha8Rng,
    current: IterationCounters,
    finished: bool,
}

impl<'a> SffPlanner<'a> {
    pub fn new(ws: &'a Workspace, targets: &[Configuration], params: PlannerParams) -> Result<Self> {
        params.validate()?;
        validate_targets(ws, targets)?;
        let rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
        Ok(Self {
            ws,
            forest: Forest::new(targets, params),
            rng,
            current: IterationCounters::default(),
            finished: false,
        })
    }

    pub fn forest(&self) -> &Forest {
        &self.forest
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    pub fn into_forest(self) -> Forest {
        self.forest
    }

    /// Runs until termination.
    pub fn run(mut self) -> Forest {
        while self.step().is_some() {}
        self.forest
    }

    /// Performs one iteration; `None` once the planner has terminated.
    pub fn step(&mut self) -> Option<IterationRecord> {
        if self.finished {
            return None;
        }
        let iteration = self.forest.iterations_used + 1;
        self.current = IterationCounters::default();
        let edges_before = self.forest.virtual_edges.len();

        let (e, tree) = self.select_node();
        let expansion = self.expand_node(e);
        let mut closed = false;
        if expansion == Expansion::Failure && !self.forest.closed.contains(e) {
            self.close(e, tree);
            closed = true;
        }

        let f = &mut self.forest;
        f.iterations_used = iteration;
        f.counters.push(self.current);
        if f.connected_at.is_none() && f.is_single_component() {
            f.connected_at = Some(iteration);
        }
        if (f.open.is_empty() && f.is_single_component()) || iteration >= f.params.i_max {
            self.finished = true;
        }
        Some(IterationRecord {
            iteration,
            selected: e,
            tree,
            expansion,
            closed,
            new_virtual_edges: f.virtual_edges.len() - edges_before,
            counters: self.current,
        })
    }

    fn close(&mut self, e: NodeId, tree: TreeId) {
        let f = &mut self.forest;
        f.open.remove(e);
        f.closed.insert(e);
        if f.params.queues_enabled {
            for q in &mut f.queues[tree.index()] {
                q.tombstone(e);
            }
        }
    }

    /// Picks the node to expand next.
    pub fn select_node(&mut self) -> (NodeId, TreeId) {
        let f = &mut self.forest;
        let n = f.tree_count();
        let id = if f.open.is_empty() {
            assert!(!f.closed.is_empty(), "forest has no nodes to select");
            f.closed.get(self.rng.random_range(0..f.closed.len()))
        } else {
            let mut from_queue = None;
            if f.params.queues_enabled && n >= 2 {
                let coin: f64 = self.rng.random();
                if coin < f.params.p_q {
                    let i = self.rng.random_range(0..n);
                    let q = self.rng.random_range(0..n - 1);
                    from_queue = f.queues[i][q].peek_best();
                }
            }
            match from_queue {
                Some(id) => id,
                None => f.open.get(self.rng.random_range(0..f.open.len())),
            }
        };
        (id, f.nodes[id.index()].tree)
    }

    /// Tries up to `k` samples on the circle of radius `l` around `e`. On
    /// success the new node is inserted, rewired and connected to other
    /// trees.
    pub fn expand_node(&mut self, e: NodeId) -> Expansion {
        let f = &self.forest;
        let origin = f.nodes[e.index()].config;
        let tree = f.nodes[e.index()].tree;
        let (l, k, cp) = (f.params.l, f.params.k, f.params.check_points);

        let mut accepted = None;
        for _ in 0..k {
            let angle = self.rng.random::<f64>() * std::f64::consts::TAU;
            let sample = origin.offset_polar(l, angle);
            if !self.grows_away_from_own_tree(tree, e, sample) {
                continue;
            }
            let mut checks = 0;
            let free = self.ws.segment_free_counted(origin, sample, cp, &mut checks);
            self.current.expansion += checks as u32;
            if free {
                accepted = Some(sample);
                break;
            }
        }
        let Some(sample) = accepted else {
            return Expansion::Failure;
        };

        let f = &mut self.forest;
        let id = NodeId(f.nodes.len() as u32);
        let mut node = Node::root(id, tree, sample);
        node.source = Some(e);
        tree::add_child(&mut f.nodes, node, e);
        f.indices[tree.index()]
            .insert(id, sample)
            .expect("fresh node id");
        f.open.insert(id);
        f.enqueue(id, tree);

        if f.params.rewiring_enabled {
            self.try_rewire(id);
        }
        self.try_connect_trees(id);
        Expansion::Success(id)
    }

    /// Every other node of the tree must be strictly farther from `sample`
    /// than `e` is.
    fn grows_away_from_own_tree(&self, tree: TreeId, e: NodeId, sample: Configuration) -> bool {
        let f = &self.forest;
        let to_e = distance(sample, f.nodes[e.index()].config);
        match f.indices[tree.index()]
            .k_nearest(sample, 2)
            .into_iter()
            .find(|(id, _)| *id != e)
        {
            Some((_, nearest_other)) => nearest_other > to_e,
            None => true,
        }
    }

    /// RRT*-style rewiring of a freshly inserted node against its `k`
    /// nearest same-tree neighbors.
    pub fn try_rewire(&mut self, r_new: NodeId) {
        let f = &mut self.forest;
        let tree = f.nodes[r_new.index()].tree;
        let config = f.nodes[r_new.index()].config;
        let cp = f.params.check_points;
        let near: Vec<NodeId> = f.indices[tree.index()]
            .k_nearest(config, f.params.k + 1)
            .into_iter()
            .map(|(id, _)| id)
            .filter(|&id| id != r_new)
            .take(f.params.k)
            .collect();

        for h in near {
            let h_config = f.nodes[h.index()].config;
            let dist = distance(config, h_config);
            let cost_new = f.nodes[r_new.index()].cost;
            let cost_h = f.nodes[h.index()].cost;
            let adopt_h = cost_new > cost_h + dist;
            let adopt_new = cost_h > cost_new + dist;
            if !adopt_h && !adopt_new {
                continue;
            }
            let mut checks = 0;
            let free = self.ws.segment_free_counted(config, h_config, cp, &mut checks);
            self.current.rewire += checks as u32;
            if !free {
                continue;
            }
            if adopt_h {
                tree::reparent(&mut f.nodes, r_new, h);
            } else {
                tree::reparent(&mut f.nodes, h, r_new);
            }
        }
    }

    /// Adds a virtual edge from `r_new` to the nearest node of every other
    /// tree that is closer than `d` and reachable by a free segment.
    pub fn try_connect_trees(&mut self, r_new: NodeId) -> Vec<VirtualEdge> {
        let f = &mut self.forest;
        let tree = f.nodes[r_new.index()].tree;
        let config = f.nodes[r_new.index()].config;
        let cp = f.params.check_points;
        let mut added = Vec::new();
        for other in 0..f.tree_count() {
            if other == tree.index() {
                continue;
            }
            let (nearest, dist) = f.indices[other]
                .nearest(config)
                .expect("every tree holds its root");
            if dist >= f.params.d {
                continue;
            }
            let mut checks = 0;
            let free = self
                .ws
                .segment_free_counted(f.nodes[nearest.index()].config, config, cp, &mut checks);
            self.current.connection += checks as u32;
            if free {
                let edge = VirtualEdge {
                    a: nearest,
                    b: r_new,
                    length: dist,
                };
                f.virtual_edges.push(edge);
                f.components.union(tree.index(), other);
                added.push(edge);
            }
        }
        added
    }

    #[cfg(test)]
    pub(crate) fn forest_mut(&mut self) -> &mut Forest {
        &mut self.forest
    }
}

/// Runs the planner to termination.
pub fn plan(ws: &Workspace, targets: &[Configuration], params: PlannerParams) -> Result<Forest> {
    Ok(SffPlanner::new(ws, targets, params)?.run())
}
