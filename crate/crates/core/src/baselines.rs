//! Reference planners: a round-robin multi-tree RRT that merges trees on
//! first contact, a single-query RRT*, and Lazy-TSP, which plans only the
//! pairs used by successive tours over an optimistic cost matrix.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::{validate_targets, PlannerParams};
use crate::geometry::{distance, Configuration, Rect, Workspace};
use crate::nn_index::{NodeId, SpatialIndex, TreeId};
use crate::output::{IterationCounters, Node, PlannerOutput, VirtualEdge};
use crate::tree;
use crate::tsp::{canonical_cycle, held_karp_unchecked, two_opt, CostMatrix, Tour, MAX_EXACT_TARGETS};

/// Mixes `salt` into `seed` (splitmix64 finalizer).
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn uniform_in(rng: &mut ChaCha8Rng, b: &Rect) -> Configuration {
    Configuration::new(
        rng.random_range(b.min_x..b.max_x),
        rng.random_range(b.min_y..b.max_y),
    )
}

/// Moves from `from` toward `to` by at most `step`.
fn steer(from: Configuration, to: Configuration, step: f64) -> Configuration {
    let dist = distance(from, to);
    if dist <= step {
        to
    } else {
        from.lerp(&to, step / dist)
    }
}

/// Result of the multi-tree RRT. Trees merge on first contact; the merged
/// tree keeps the smaller id. Node costs stay relative to each node's own
/// original root.
#[derive(Clone, Debug)]
pub struct MergeForest {
    params: PlannerParams,
    targets: Vec<Configuration>,
    nodes: Vec<Node>,
    /// Current (merged) tree of every original tree.
    owner: Vec<usize>,
    indices: Vec<SpatialIndex>,
    live: Vec<usize>,
    merges: Vec<VirtualEdge>,
    root_paths: BTreeMap<(usize, usize), Vec<NodeId>>,
    duplicate_paths: usize,
    iterations_used: usize,
    connected_at: Option<usize>,
    counters: Vec<IterationCounters>,
}

impl MergeForest {
    pub fn params(&self) -> &PlannerParams {
        &self.params
    }

    /// Ids of the trees that have not been absorbed, ascending.
    pub fn live_trees(&self) -> &[usize] {
        &self.live
    }

    /// The merged tree that original tree `t` belongs to.
    pub fn owner_of(&self, t: usize) -> usize {
        self.owner[t]
    }

    /// Node sequence between the roots of each target pair `(i, j)`, `i < j`,
    /// recorded when their trees merged.
    pub fn root_paths(&self) -> &BTreeMap<(usize, usize), Vec<NodeId>> {
        &self.root_paths
    }

    /// Times a merge tried to record a pair that already had a path. Always
    /// zero unless merge bookkeeping is broken.
    pub fn duplicate_path_count(&self) -> usize {
        self.duplicate_paths
    }

    fn members(&self, tree: usize) -> Vec<usize> {
        (0..self.owner.len()).filter(|&t| self.owner[t] == tree).collect()
    }

    /// Breadth-first predecessors from `from` over tree and merge edges.
    fn bfs(&self, from: NodeId) -> Vec<u32> {
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); self.nodes.len()];
        for n in &self.nodes {
            if let Some(p) = n.parent {
                adjacency[p.index()].push(n.id.0);
                adjacency[n.id.index()].push(p.0);
            }
        }
        for e in &self.merges {
            adjacency[e.a.index()].push(e.b.0);
            adjacency[e.b.index()].push(e.a.0);
        }
        let mut pred = vec![u32::MAX; self.nodes.len()];
        pred[from.index()] = from.0;
        let mut queue = VecDeque::from([from.0]);
        while let Some(v) = queue.pop_front() {
            for &u in &adjacency[v as usize] {
                if pred[u as usize] == u32::MAX {
                    pred[u as usize] = v;
                    queue.push_back(u);
                }
            }
        }
        pred
    }

    /// Joins the trees of `a` and `b` through the new edge `a`–`b` and
    /// freezes the root-to-root paths of every pair the merge connects.
    fn merge(&mut self, a: NodeId, b: NodeId) {
        let (ta, tb) = (
            self.owner[self.nodes[a.index()].tree.index()],
            self.owner[self.nodes[b.index()].tree.index()],
        );
        let (side_a, side_b) = (self.members(ta), self.members(tb));
        let (pred_a, pred_b) = (self.bfs(a), self.bfs(b));
        let walk = |pred: &[u32], root: usize| {
            let mut path = vec![NodeId(root as u32)];
            let mut cur = root as u32;
            while pred[cur as usize] != cur {
                cur = pred[cur as usize];
                path.push(NodeId(cur));
            }
            path
        };
        for &sa in &side_a {
            // root(sa) .. a
            let to_a = walk(&pred_a, sa);
            for &sb in &side_b {
                let mut to_b = walk(&pred_b, sb);
                to_b.reverse();
                let mut path: Vec<NodeId> = to_a.iter().copied().chain(to_b).collect();
                let key = if sa < sb {
                    (sa, sb)
                } else {
                    path.reverse();
                    (sb, sa)
                };
                if self.root_paths.insert(key, path).is_some() {
                    self.duplicate_paths += 1;
                }
            }
        }

        let length = distance(self.nodes[a.index()].config, self.nodes[b.index()].config);
        self.merges.push(VirtualEdge { a, b, length });
        let (keep, gone) = (ta.min(tb), ta.max(tb));
        for o in &mut self.owner {
            if *o == gone {
                *o = keep;
            }
        }
        let mut absorbed = std::mem::take(&mut self.indices[gone]);
        if absorbed.len() > self.indices[keep].len() {
            std::mem::swap(&mut absorbed, &mut self.indices[keep]);
        }
        for (id, p) in absorbed.entries() {
            self.indices[keep].insert(id, p).expect("trees are disjoint");
        }
        self.live.retain(|&t| t != gone);
    }
}

impl PlannerOutput for MergeForest {
    fn targets(&self) -> &[Configuration] {
        &self.targets
    }

    fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    fn connections(&self) -> &[VirtualEdge] {
        &self.merges
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

/// Multi-tree RRT with round-robin tree selection, single-step extension and
/// merging on the first free connection closer than `d`.
pub fn multi_t_rrt(ws: &Workspace, targets: &[Configuration], params: PlannerParams) -> Result<MergeForest> {
    params.validate()?;
    validate_targets(ws, targets)?;
    let n = targets.len();
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut f = MergeForest {
        params: params.clone(),
        targets: targets.to_vec(),
        nodes: Vec::new(),
        owner: (0..n).collect(),
        indices: vec![SpatialIndex::new(); n],
        live: (0..n).collect(),
        merges: Vec::new(),
        root_paths: BTreeMap::new(),
        duplicate_paths: 0,
        iterations_used: 0,
        connected_at: None,
        counters: Vec::new(),
    };
    for (i, &t) in targets.iter().enumerate() {
        f.nodes.push(Node::root(NodeId(i as u32), TreeId(i as u32), t));
        f.indices[i].insert(NodeId(i as u32), t).expect("fresh index");
    }
    if n == 1 {
        f.connected_at = Some(0);
        return Ok(f);
    }

    let (l, d, cp) = (params.l, params.d, params.check_points);
    let mut cursor: Option<usize> = None;
    for iteration in 1..=params.i_max {
        let mut counters = IterationCounters::default();
        let tree = match cursor {
            Some(c) => f.live.iter().copied().find(|&t| t > c).unwrap_or(f.live[0]),
            None => f.live[0],
        };
        cursor = Some(tree);

        let sample = uniform_in(&mut rng, ws.bounds());
        let (near, _) = f.indices[tree].nearest(sample).expect("live trees are non-empty");
        let from = f.nodes[near.index()].config;
        let to = steer(from, sample, l);
        let mut checks = 0;
        let free = to != from && ws.segment_free_counted(from, to, cp, &mut checks);
        counters.expansion += checks as u32;
        if free {
            let id = NodeId(f.nodes.len() as u32);
            let mut node = Node::root(id, f.nodes[near.index()].tree, to);
            node.source = Some(near);
            tree::add_child(&mut f.nodes, node, near);
            f.indices[tree].insert(id, to).expect("fresh node id");

            let others: Vec<usize> = f.live.iter().copied().filter(|&t| t != tree).collect();
            for other in others {
                let (m, dist) = f.indices[other].nearest(to).expect("live trees are non-empty");
                if dist >= d {
                    continue;
                }
                let mut checks = 0;
                let free = ws.segment_free_counted(f.nodes[m.index()].config, to, cp, &mut checks);
                counters.connection += checks as u32;
                if free {
                    f.merge(m, id);
                }
            }
        }

        f.counters.push(counters);
        f.iterations_used = iteration;
        if f.live.len() == 1 {
            f.connected_at = Some(iteration);
            break;
        }
    }
    Ok(f)
}

/// A start-to-goal path found by [`rrt_star`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RrtPath {
    pub path: Vec<Configuration>,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RrtStarOutcome {
    pub path: Option<RrtPath>,
    pub iterations: usize,
    pub point_checks: u64,
}

/// Single-query RRT* from `start` to `goal`. The goal is reached by a free
/// segment shorter than `d` from a tree node. Stops at the first goal
/// connection.
pub fn rrt_star(ws: &Workspace, start: Configuration, goal: Configuration, params: &PlannerParams) -> Result<RrtStarOutcome> {
    rrt_star_refined(ws, start, goal, params, 0)
}

/// [`rrt_star`] that keeps growing for `refine` more iterations after the
/// first goal connection (bounded by `i_max`) and returns the cheapest one.
pub fn rrt_star_refined(
    ws: &Workspace,
    start: Configuration,
    goal: Configuration,
    params: &PlannerParams,
    refine: usize,
) -> Result<RrtStarOutcome> {
    params.validate()?;
    validate_targets(ws, &[start])?;
    if !ws.point_free(goal) {
        return Err(Error::TargetInCollision {
            index: 1,
            x: goal.x,
            y: goal.y,
        });
    }
    let (l, d, k, cp) = (params.l, params.d, params.k, params.check_points);
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut nodes = vec![Node::root(NodeId(0), TreeId(0), start)];
    let mut index = SpatialIndex::new();
    index.insert(NodeId(0), start).expect("fresh index");
    let mut checks = 0u64;
    let mut goal_links: Vec<NodeId> = Vec::new();

    let try_goal = |id: NodeId, nodes: &[Node], checks: &mut u64| {
        let p = nodes[id.index()].config;
        distance(p, goal) < d && ws.segment_free_counted(p, goal, cp, checks)
    };
    if start == goal {
        return Ok(RrtStarOutcome {
            path: Some(RrtPath {
                path: vec![start],
                cost: 0.0,
            }),
            iterations: 0,
            point_checks: 0,
        });
    }
    if try_goal(NodeId(0), &nodes, &mut checks) {
        goal_links.push(NodeId(0));
    }

    let mut iterations = 0;
    let mut stop_at = if goal_links.is_empty() { params.i_max } else { refine.min(params.i_max) };
    while iterations < stop_at {
        iterations += 1;
        let sample = uniform_in(&mut rng, ws.bounds());
        let (near, _) = index.nearest(sample).expect("tree holds its root");
        let from = nodes[near.index()].config;
        let to = steer(from, sample, l);
        if to == from || !ws.segment_free_counted(from, to, cp, &mut checks) {
            continue;
        }
        let neighbors: Vec<NodeId> = index.k_nearest(to, k).into_iter().map(|(id, _)| id).collect();

        // cheapest free parent among the neighbors; `near` is known free
        let mut candidates: Vec<(f64, NodeId)> = neighbors
            .iter()
            .map(|&h| (nodes[h.index()].cost + distance(nodes[h.index()].config, to), h))
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let near_cost = nodes[near.index()].cost + distance(from, to);
        let mut parent = near;
        for &(c, h) in &candidates {
            if c >= near_cost || h == near {
                break;
            }
            if ws.segment_free_counted(nodes[h.index()].config, to, cp, &mut checks) {
                parent = h;
                break;
            }
        }

        let id = NodeId(nodes.len() as u32);
        let mut node = Node::root(id, TreeId(0), to);
        node.source = Some(near);
        tree::add_child(&mut nodes, node, parent);
        index.insert(id, to).expect("fresh node id");

        for &h in &neighbors {
            if h == parent || tree::is_ancestor(&nodes, h, id) {
                continue;
            }
            let via = nodes[id.index()].cost + distance(to, nodes[h.index()].config);
            if via < nodes[h.index()].cost && ws.segment_free_counted(to, nodes[h.index()].config, cp, &mut checks) {
                tree::reparent(&mut nodes, h, id);
            }
        }

        if try_goal(id, &nodes, &mut checks) {
            if goal_links.is_empty() {
                stop_at = (iterations + refine).min(params.i_max);
            }
            goal_links.push(id);
        }
    }

    let best = goal_links
        .iter()
        .map(|&g| (nodes[g.index()].cost + distance(nodes[g.index()].config, goal), g))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let path = best.map(|(cost, last)| {
        let mut path = vec![goal];
        let mut cur = Some(last);
        while let Some(id) = cur {
            path.push(nodes[id.index()].config);
            cur = nodes[id.index()].parent;
        }
        path.reverse();
        RrtPath { path, cost }
    });
    Ok(RrtStarOutcome {
        path,
        iterations,
        point_checks: checks,
    })
}

/// Tour solver used inside [`lazy_tsp`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LazySolver {
    /// Exact up to the subset-DP limit, heuristic above it.
    #[default]
    Auto,
    Exact,
    Heuristic,
}

/// Outcome of [`lazy_tsp`].
#[derive(Clone, Debug)]
pub struct LazyTspResult {
    pub tour: Tour,
    /// Euclidean estimates, replaced by planned costs (or `+inf`) for every
    /// pair that was planned.
    pub matrix: CostMatrix,
    /// Planned paths, keyed `(i, j)` with `i < j`, oriented from `i` to `j`.
    pub paths: BTreeMap<(usize, usize), Vec<Configuration>>,
    pub total_iterations: usize,
    pub point_checks: u64,
    pub rounds: usize,
}

impl LazyTspResult {
    /// Configurations along the tour edge from target `i` to target `j`.
    pub fn path(&self, i: usize, j: usize) -> Option<Vec<Configuration>> {
        let p = self.paths.get(&(i.min(j), i.max(j)))?;
        let mut p = p.clone();
        if i > j {
            p.reverse();
        }
        Some(p)
    }
}

fn solve_lazy(matrix: &CostMatrix, solver: LazySolver) -> Tour {
    let n = matrix.len();
    let exact = match solver {
        LazySolver::Auto => n <= MAX_EXACT_TARGETS,
        LazySolver::Exact => true,
        LazySolver::Heuristic => false,
    };
    if exact || n <= 3 {
        return held_karp_unchecked(matrix);
    }
    // unplannable pairs get a prohibitive finite cost so 2-opt can avoid them
    let worst = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| matrix.get(i, j))
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let penalty = (worst * n as f64 + 1.0) * 1e3;
    let finite = CostMatrix::from_fn_symmetric(n, |i, j| {
        let v = matrix.get(i, j);
        if v.is_finite() { v } else { penalty }
    });
    let mut tour: Vec<usize> = (0..n).collect();
    let mut used = vec![false; n];
    used[0] = true;
    for pos in 1..n {
        let cur = tour[pos - 1];
        let next = (0..n)
            .filter(|&j| !used[j])
            .min_by(|&a, &b| finite.get(cur, a).total_cmp(&finite.get(cur, b)).then(a.cmp(&b)))
            .expect("unvisited vertex remains");
        used[next] = true;
        tour[pos] = next;
    }
    two_opt(&finite, &mut tour);
    let sequence = canonical_cycle(&tour);
    let total_cost = crate::tsp::tour_cost(matrix, &sequence).expect("permutation");
    Tour { sequence, total_cost }
}

fn tour_edges(seq: &[usize]) -> Vec<(usize, usize)> {
    let n = seq.len();
    let mut edges: Vec<(usize, usize)> = (0..n)
        .map(|i| {
            let (a, b) = (seq[i], seq[(i + 1) % n]);
            (a.min(b), a.max(b))
        })
        .collect();
    edges.dedup();
    if n == 2 {
        edges.truncate(1);
    }
    edges
}

/// Attempts per pair before it is declared unplannable.
const LAZY_ATTEMPTS: u64 = 2;

/// Lazy-TSP: start from straight-line costs, solve the tour, plan every tour
/// edge that has not been planned yet with [`rrt_star`] and write the
/// planned cost back, until the tour only uses planned edges.
pub fn lazy_tsp(
    ws: &Workspace,
    targets: &[Configuration],
    params: &PlannerParams,
    solver: LazySolver,
) -> Result<LazyTspResult> {
    params.validate()?;
    validate_targets(ws, targets)?;
    let n = targets.len();
    if n < 2 {
        return Err(Error::TooFewTargets {
            required: 2,
            actual: n,
        });
    }
    let mut matrix = CostMatrix::from_fn_symmetric(n, |i, j| distance(targets[i], targets[j]));
    let mut planned = vec![false; n * n];
    let mut paths = BTreeMap::new();
    let mut total_iterations = 0;
    let mut point_checks = 0;
    let mut rounds = 0;

    loop {
        let tour = solve_lazy(&matrix, solver);
        if !tour.total_cost.is_finite() {
            return Err(Error::NoPlannableTour(format!(
                "every closed tour uses a pair that could not be planned in {} iterations",
                params.i_max
            )));
        }
        let pending: Vec<(usize, usize)> = tour_edges(&tour.sequence)
            .into_iter()
            .filter(|&(i, j)| !planned[i * n + j])
            .collect();
        if pending.is_empty() {
            return Ok(LazyTspResult {
                tour,
                matrix,
                paths,
                total_iterations,
                point_checks,
                rounds,
            });
        }
        rounds += 1;
        for (i, j) in pending {
            let mut cost = f64::INFINITY;
            for attempt in 0..LAZY_ATTEMPTS {
                let salt = ((i * n + j) as u64) << 8 | attempt;
                let sub = params.clone().with_seed(mix_seed(params.rng_seed, salt));
                let out = rrt_star(ws, targets[i], targets[j], &sub)?;
                total_iterations += out.iterations;
                point_checks += out.point_checks;
                if let Some(found) = out.path {
                    cost = found.cost;
                    paths.insert((i, j), found.path);
                    break;
                }
            }
            planned[i * n + j] = true;
            matrix.set_symmetric(i, j, cost);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polygon;
    use crate::roadmap::{all_target_distances, build_graph};
    use crate::tree::chain_cost;

    fn c(x: f64, y: f64) -> Configuration {
        Configuration::new(x, y)
    }

    fn params() -> PlannerParams {
        PlannerParams {
            l: 10.0,
            d: 15.0,
            k: 10,
            i_max: 20_000,
            ..PlannerParams::default()
        }
    }

    fn empty(size: f64) -> Workspace {
        Workspace::empty(Rect::square(size), 0.0).unwrap()
    }

    #[test]
    fn seed_mixing_spreads() {
        assert_ne!(mix_seed(0, 1), mix_seed(0, 2));
        assert_ne!(mix_seed(1, 1), mix_seed(0, 1));
        assert_eq!(mix_seed(7, 3), mix_seed(7, 3));
    }

    #[test]
    fn single_target_needs_no_merge() {
        let f = multi_t_rrt(&empty(100.0), &[c(50.0, 50.0)], params()).unwrap();
        assert_eq!(f.iterations_used(), 0);
        assert_eq!(f.connected_at(), Some(0));
        assert_eq!(f.nodes().len(), 1);
    }

    #[test]
    fn two_trees_merge_once() {
        let ws = empty(200.0);
        let f = multi_t_rrt(&ws, &[c(20.0, 20.0), c(180.0, 170.0)], params()).unwrap();
        assert_eq!(f.live_trees(), &[0]);
        assert_eq!(f.connections().len(), 1);
        assert_eq!(f.root_paths().len(), 1);
        assert_eq!(f.duplicate_path_count(), 0);
        let path = &f.root_paths()[&(0, 1)];
        assert_eq!((path[0], *path.last().unwrap()), (NodeId(0), NodeId(1)));
        for w in path.windows(2) {
            let (a, b) = (f.node(w[0]), f.node(w[1]));
            let tree_edge = a.parent == Some(b.id) || b.parent == Some(a.id);
            let merge_edge = f.connections().iter().any(|e| {
                (e.a, e.b) == (a.id, b.id) || (e.a, e.b) == (b.id, a.id)
            });
            assert!(tree_edge || merge_edge);
        }
        // the roadmap is a tree, so the recorded path is the only one
        let g = build_graph(&f);
        assert_eq!(g.edge_count(), g.vertex_count() - 1);
        let m = all_target_distances(&g);
        let len: f64 = path.windows(2).map(|w| distance(f.node(w[0]).config, f.node(w[1]).config)).sum();
        assert!((m.get(0, 1) - len).abs() < 1e-9);
        for n in f.nodes() {
            assert!((n.cost - chain_cost(f.nodes(), n.id)).abs() < 1e-9);
        }
    }

    #[test]
    fn many_trees_merge_into_smallest_id() {
        let ws = empty(300.0);
        let targets = [c(20.0, 20.0), c(280.0, 30.0), c(150.0, 280.0), c(150.0, 150.0)];
        let f = multi_t_rrt(&ws, &targets, params()).unwrap();
        assert_eq!(f.live_trees(), &[0]);
        assert!((0..4).all(|t| f.owner_of(t) == 0));
        assert_eq!(f.root_paths().len(), 6);
        assert_eq!(f.connections().len(), 3);
        assert_eq!(f.duplicate_path_count(), 0);
    }

    #[test]
    fn multi_t_rrt_is_deterministic() {
        let ws = empty(200.0);
        let t = [c(20.0, 20.0), c(180.0, 170.0), c(20.0, 180.0)];
        let a = multi_t_rrt(&ws, &t, params().with_seed(4)).unwrap();
        let b = multi_t_rrt(&ws, &t, params().with_seed(4)).unwrap();
        assert_eq!(a.to_record("m"), b.to_record("m"));
    }

    #[test]
    fn rrt_star_close_goal_is_immediate() {
        let out = rrt_star(&empty(100.0), c(10.0, 10.0), c(15.0, 10.0), &params()).unwrap();
        let p = out.path.unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(p.path, vec![c(10.0, 10.0), c(15.0, 10.0)]);
        assert_eq!(p.cost, 5.0);
    }

    #[test]
    fn rrt_star_path_is_valid() {
        let ws = Workspace::new(
            Rect::square(200.0),
            vec![Polygon::rectangle(90.0, 0.0, 110.0, 150.0).unwrap()],
            1.0,
        )
        .unwrap();
        let out = rrt_star_refined(&ws, c(20.0, 20.0), c(180.0, 20.0), &params(), 500).unwrap();
        let p = out.path.unwrap();
        assert_eq!((p.path[0], *p.path.last().unwrap()), (c(20.0, 20.0), c(180.0, 20.0)));
        let len: f64 = p.path.windows(2).map(|w| distance(w[0], w[1])).sum();
        assert!((len - p.cost).abs() < 1e-9);
        assert!(p.cost > 160.0);
        for w in p.path.windows(2) {
            assert!(ws.segment_free(w[0], w[1], params().check_points));
        }
    }

    #[test]
    fn rrt_star_empty_workspace_is_near_straight() {
        let (s, g) = (c(20.0, 20.0), c(170.0, 150.0));
        let straight = distance(s, g);
        let mut total = 0.0;
        for seed in 0..20 {
            let out = rrt_star_refined(&empty(200.0), s, g, &params().with_seed(seed), 3000).unwrap();
            total += out.path.unwrap().cost;
        }
        let mean = total / 20.0;
        assert!(mean <= 1.05 * straight, "{mean} vs {straight}");
    }

    #[test]
    fn rrt_star_sealed_goal_is_not_found() {
        let walls = vec![
            Polygon::rectangle(60.0, 60.0, 90.0, 65.0).unwrap(),
            Polygon::rectangle(60.0, 85.0, 90.0, 90.0).unwrap(),
            Polygon::rectangle(60.0, 65.0, 65.0, 85.0).unwrap(),
            Polygon::rectangle(85.0, 65.0, 90.0, 85.0).unwrap(),
        ];
        let ws = Workspace::new(Rect::square(100.0), walls, 0.5).unwrap();
        let p = PlannerParams { i_max: 2000, check_points: 10, ..params() };
        let out = rrt_star(&ws, c(10.0, 10.0), c(75.0, 75.0), &p).unwrap();
        assert!(out.path.is_none());
        assert_eq!(out.iterations, 2000);
        assert!(rrt_star(&ws, c(62.0, 62.0), c(10.0, 10.0), &p).is_err());
    }

    #[test]
    fn lazy_tsp_two_targets() {
        let ws = Workspace::new(
            Rect::square(200.0),
            vec![Polygon::rectangle(90.0, 0.0, 110.0, 150.0).unwrap()],
            1.0,
        )
        .unwrap();
        let r = lazy_tsp(&ws, &[c(20.0, 20.0), c(180.0, 20.0)], &params(), LazySolver::Auto).unwrap();
        assert_eq!(r.rounds, 1);
        assert_eq!(r.tour.total_cost, 2.0 * r.matrix.get(0, 1));
        assert!(r.matrix.get(0, 1) > 160.0);
        assert!(r.total_iterations > 0);
    }

    #[test]
    fn lazy_tsp_three_targets_converge_in_one_round() {
        let t = [c(20.0, 20.0), c(150.0, 40.0), c(60.0, 170.0)];
        let r = lazy_tsp(&empty(200.0), &t, &params(), LazySolver::Auto).unwrap();
        assert_eq!(r.rounds, 1);
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            assert!(r.matrix.get(i, j) >= distance(t[i], t[j]));
            assert!(r.path(j, i).is_some());
        }
    }

    #[test]
    fn lazy_tsp_resolves_when_a_cheap_pair_is_walled_off() {
        // target 0 sits in a cup that opens away from its nearest neighbor 1
        let cup = vec![
            Polygon::rectangle(220.0, 150.0, 225.0, 250.0).unwrap(),
            Polygon::rectangle(150.0, 250.0, 225.0, 255.0).unwrap(),
            Polygon::rectangle(150.0, 145.0, 225.0, 150.0).unwrap(),
        ];
        let ws = Workspace::new(Rect::square(400.0), cup, 1.0).unwrap();
        let t = [c(200.0, 200.0), c(260.0, 200.0), c(100.0, 120.0), c(100.0, 290.0)];
        let euclid = CostMatrix::from_fn_symmetric(4, |i, j| distance(t[i], t[j]));
        let initial = solve_lazy(&euclid, LazySolver::Exact);
        assert!(tour_edges(&initial.sequence).contains(&(0, 1)));
        let r = lazy_tsp(&ws, &t, &params(), LazySolver::Exact).unwrap();
        assert!(r.rounds >= 2);
        assert_ne!(r.tour.sequence, initial.sequence);
        assert!(!tour_edges(&r.tour.sequence).contains(&(0, 1)));
        assert!(r.matrix.get(0, 1) > 190.0);
        for i in 0..4 {
            for j in 0..4 {
                assert!(r.matrix.get(i, j) >= euclid.get(i, j) - 1e-9);
            }
        }
        let heur = lazy_tsp(&ws, &t, &params(), LazySolver::Heuristic).unwrap();
        assert!(heur.tour.total_cost.is_finite());
    }

    #[test]
    fn lazy_tsp_fails_on_unreachable_target() {
        let walls = vec![
            Polygon::rectangle(60.0, 60.0, 90.0, 65.0).unwrap(),
            Polygon::rectangle(60.0, 85.0, 90.0, 90.0).unwrap(),
            Polygon::rectangle(60.0, 65.0, 65.0, 85.0).unwrap(),
            Polygon::rectangle(85.0, 65.0, 90.0, 85.0).unwrap(),
        ];
        let ws = Workspace::new(Rect::square(100.0), walls, 0.5).unwrap();
        let p = PlannerParams { i_max: 300, check_points: 10, ..params() };
        let r = lazy_tsp(&ws, &[c(10.0, 10.0), c(75.0, 75.0), c(20.0, 40.0)], &p, LazySolver::Auto);
        assert!(matches!(r, Err(Error::NoPlannableTour(_))));
    }
}
