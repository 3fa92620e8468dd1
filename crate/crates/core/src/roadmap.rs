//! Weighted roadmap over planner output and all-target shortest paths.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{distance, Configuration};
use crate::output::PlannerOutput;
use crate::tsp::CostMatrix;

const NO_PRED: u32 = u32::MAX;

/// Undirected graph of tree edges plus inter-tree connections.
#[derive(Clone, Debug)]
pub struct RoadmapGraph {
    positions: Vec<Configuration>,
    adjacency: Vec<Vec<(u32, f64)>>,
    edge_count: usize,
    roots: Vec<u32>,
}

impl RoadmapGraph {
    /// Graph over explicit weighted edges. Duplicate and self edges are dropped.
    pub fn from_weighted_edges(
        positions: Vec<Configuration>,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
        roots: Vec<usize>,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); positions.len()];
        let mut seen = HashSet::new();
        for (a, b, w) in edges {
            if a == b || !seen.insert((a.min(b), a.max(b))) {
                continue;
            }
            debug_assert!(w > 0.0, "roadmap edge weight must be positive");
            adjacency[a].push((b as u32, w));
            adjacency[b].push((a as u32, w));
        }
        Self {
            positions,
            adjacency,
            edge_count: seen.len(),
            roots: roots.into_iter().map(|r| r as u32).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn position(&self, v: usize) -> Configuration {
        self.positions[v]
    }

    pub fn neighbors(&self, v: usize) -> &[(u32, f64)] {
        &self.adjacency[v]
    }

    /// Vertex of target `i`.
    pub fn root(&self, i: usize) -> usize {
        self.roots[i] as usize
    }

    pub fn target_count(&self) -> usize {
        self.roots.len()
    }

    pub fn edge_weight(&self, a: usize, b: usize) -> Option<f64> {
        self.adjacency[a]
            .iter()
            .find(|&&(v, _)| v as usize == b)
            .map(|&(_, w)| w)
    }

    pub fn is_connected(&self) -> bool {
        if self.positions.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.positions.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(u, _) in &self.adjacency[v] {
                if !std::mem::replace(&mut seen[u as usize], true) {
                    count += 1;
                    stack.push(u as usize);
                }
            }
        }
        count == self.positions.len()
    }
}

/// Roadmap of a planner result: every parent edge and every connection,
/// weighted by straight-line length.
pub fn build_graph<P: PlannerOutput + ?Sized>(out: &P) -> RoadmapGraph {
    let nodes = out.nodes();
    let positions: Vec<Configuration> = nodes.iter().map(|n| n.config).collect();
    let tree_edges = nodes
        .iter()
        .filter_map(|n| n.parent.map(|p| (p.index(), n.id.index())));
    let links = out.connections().iter().map(|e| (e.a.index(), e.b.index()));
    let edges: Vec<(usize, usize, f64)> = tree_edges
        .chain(links)
        .map(|(a, b)| (a, b, distance(positions[a], positions[b])))
        .collect();
    let roots = (0..out.targets().len()).map(|i| out.root_of(i).index()).collect();
    RoadmapGraph::from_weighted_edges(positions, edges, roots)
}

#[derive(Clone, Copy, PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Single-source shortest paths from `source`: distances and predecessors.
pub fn dijkstra(g: &RoadmapGraph, source: usize) -> (Vec<f64>, Vec<u32>) {
    let n = g.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NO_PRED; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((Dist(0.0), source as u32)));
    while let Some(Reverse((Dist(d), v))) = heap.pop() {
        let v = v as usize;
        if d > dist[v] {
            continue;
        }
        for &(u, w) in g.neighbors(v) {
            let cand = d + w;
            if cand < dist[u as usize] {
                dist[u as usize] = cand;
                pred[u as usize] = v as u32;
                heap.push(Reverse((Dist(cand), u)));
            }
        }
    }
    (dist, pred)
}

#[derive(Clone, Debug)]
struct SourceTree {
    pred: Vec<u32>,
}

/// Target-to-target shortest-path costs plus the predecessor trees needed to
/// rebuild each path.
#[derive(Clone, Debug, Serialize)]
pub struct DistanceMatrix {
    costs: CostMatrix,
    #[serde(skip)]
    trees: Vec<SourceTree>,
}

impl DistanceMatrix {
    pub fn costs(&self) -> &CostMatrix {
        &self.costs
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.costs.get(i, j)
    }

    pub fn is_finite(&self) -> bool {
        self.costs.check_finite().is_ok()
    }

    /// Vertex sequence from root `i` to root `j`.
    pub fn vertex_path(&self, g: &RoadmapGraph, i: usize, j: usize) -> Result<Vec<usize>> {
        if !self.get(i, j).is_finite() {
            return Err(Error::InfiniteEntry(i, j));
        }
        // the lower index is the source whose tree defines the entry
        let (s, t) = (i.min(j), i.max(j));
        let pred = &self.trees[s].pred;
        let mut path = vec![g.root(t)];
        let mut cur = g.root(t);
        while cur != g.root(s) {
            cur = pred[cur] as usize;
            path.push(cur);
        }
        if s == i {
            path.reverse();
        }
        Ok(path)
    }
}

/// Shortest-path distances between all pairs of targets. Entry `(i, j)` with
/// `i < j` comes from the search rooted at `i` and is mirrored to `(j, i)`.
pub fn all_target_distances(g: &RoadmapGraph) -> DistanceMatrix {
    let n = g.target_count();
    let runs: Vec<(Vec<f64>, Vec<u32>)> = (0..n).into_par_iter().map(|i| dijkstra(g, g.root(i))).collect();
    let mut costs = CostMatrix::zeros(n);
    for (i, (dist, _)) in runs.iter().enumerate() {
        for j in (i + 1)..n {
            costs.set_symmetric(i, j, dist[g.root(j)]);
        }
    }
    let trees = runs.into_iter().map(|(_, pred)| SourceTree { pred }).collect();
    DistanceMatrix { costs, trees }
}

/// Configurations along the shortest path from target `i` to target `j`.
pub fn extract_path(g: &RoadmapGraph, m: &DistanceMatrix, i: usize, j: usize) -> Result<Vec<Configuration>> {
    Ok(m.vertex_path(g, i, j)?.into_iter().map(|v| g.position(v)).collect())
}

/// Sum of all pairwise target distances.
pub fn cumulative_cost(m: &CostMatrix) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..m.len() {
        for j in (i + 1)..m.len() {
            let v = m.get(i, j);
            if !v.is_finite() {
                return Err(Error::InfiniteEntry(i, j));
            }
            total += v;
        }
    }
    Ok(total)
}

/// Length of a configuration sequence.
pub fn path_length(path: &[Configuration]) -> f64 {
    path.windows(2).map(|w| distance(w[0], w[1])).sum()
}
