//! Exact nearest-neighbor search and the per-tree, per-target priority queues.
//!
//! All orderings compare squared Euclidean distance first and node id second,
//! so every query has a unique, platform-independent answer.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Configuration;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Index of a tree; tree `i` is rooted at target `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TreeId(pub u32);

impl TreeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TreeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct KdNode {
    id: NodeId,
    point: Configuration,
    left: u32,
    right: u32,
}

#[inline]
fn coord(p: &Configuration, axis: usize) -> f64 {
    if axis == 0 {
        p.x
    } else {
        p.y
    }
}

#[inline]
fn closer(a_sq: f64, a_id: NodeId, b_sq: f64, b_id: NodeId) -> bool {
    a_sq < b_sq || (a_sq == b_sq && a_id < b_id)
}

/// Incrementally built 2-d tree. Inserts descend to a leaf; when a leaf lands
/// deeper than a logarithmic bound the whole tree is rebuilt around medians.
#[derive(Clone, Debug, Default)]
pub struct SpatialIndex {
    nodes: Vec<KdNode>,
    ids: HashSet<NodeId>,
    root: u32,
    since_rebuild: usize,
}

fn depth_limit(len: usize) -> usize {
    4 * (usize::BITS - len.leading_zeros()) as usize + 8
}

impl SpatialIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.ids.contains(&id)
    }

    /// Entries in unspecified order.
    pub fn entries(&self) -> impl Iterator<Item = (NodeId, Configuration)> + '_ {
        self.nodes.iter().map(|n| (n.id, n.point))
    }

    pub fn insert(&mut self, id: NodeId, point: Configuration) -> Result<()> {
        if !self.ids.insert(id) {
            return Err(Error::DuplicateNode(id));
        }
        let new_idx = self.nodes.len() as u32;
        self.nodes.push(KdNode {
            id,
            point,
            left: NIL,
            right: NIL,
        });
        if new_idx == 0 {
            self.root = 0;
            return Ok(());
        }
        let mut cur = self.root as usize;
        let mut axis = 0usize;
        let mut depth = 1;
        loop {
            let node = &self.nodes[cur];
            let go_left = coord(&point, axis) < coord(&node.point, axis);
            let next = if go_left { node.left } else { node.right };
            if next == NIL {
                let node = &mut self.nodes[cur];
                if go_left {
                    node.left = new_idx;
                } else {
                    node.right = new_idx;
                }
                break;
            }
            cur = next as usize;
            axis ^= 1;
            depth += 1;
        }
        self.since_rebuild += 1;
        // coincident points cannot be separated, so rebuilds are rate limited
        if depth > depth_limit(self.nodes.len()) && self.since_rebuild >= 32 {
            self.rebuild();
        }
        Ok(())
    }

    fn rebuild(&mut self) {
        self.since_rebuild = 0;
        let mut order: Vec<u32> = (0..self.nodes.len() as u32).collect();
        for n in &mut self.nodes {
            n.left = NIL;
            n.right = NIL;
        }
        self.root = self.build_balanced(&mut order, 0);
    }

    // left subtree coordinates <= node <= right subtree coordinates
    fn build_balanced(&mut self, slice: &mut [u32], axis: usize) -> u32 {
        if slice.is_empty() {
            return NIL;
        }
        let nodes = &self.nodes;
        slice.sort_unstable_by(|&a, &b| {
            let (pa, pb) = (&nodes[a as usize], &nodes[b as usize]);
            coord(&pa.point, axis)
                .total_cmp(&coord(&pb.point, axis))
                .then(pa.id.cmp(&pb.id))
        });
        let mid = slice.len() / 2;
        // entries equal to the median on its left would break the insert rule
        let median = coord(&self.nodes[slice[mid] as usize].point, axis);
        let mut m = mid;
        while m > 0 && coord(&self.nodes[slice[m - 1] as usize].point, axis) == median {
            m -= 1;
        }
        let node = slice[m];
        let (left, rest) = slice.split_at_mut(m);
        let right = &mut rest[1..];
        let l = self.build_balanced(left, axis ^ 1);
        let r = self.build_balanced(right, axis ^ 1);
        let n = &mut self.nodes[node as usize];
        n.left = l;
        n.right = r;
        node
    }

    /// Closest entry and its distance.
    pub fn nearest(&self, q: Configuration) -> Result<(NodeId, f64)> {
        if self.nodes.is_empty() {
            return Err(Error::EmptyIndex);
        }
        let mut best = (f64::INFINITY, NodeId(u32::MAX));
        self.nearest_rec(self.root, 0, &q, &mut best);
        Ok((best.1, best.0.sqrt()))
    }

    fn nearest_rec(&self, idx: u32, axis: usize, q: &Configuration, best: &mut (f64, NodeId)) {
        let node = &self.nodes[idx as usize];
        let d_sq = node.point.distance_sq(q);
        if closer(d_sq, node.id, best.0, best.1) {
            *best = (d_sq, node.id);
        }
        let diff = coord(q, axis) - coord(&node.point, axis);
        let (near, far) = if diff < 0.0 {
            (node.left, node.right)
        } else {
            (node.right, node.left)
        };
        if near != NIL {
            self.nearest_rec(near, axis ^ 1, q, best);
        }
        // equal distance to the plane can still hide a smaller id
        if far != NIL && diff * diff <= best.0 {
            self.nearest_rec(far, axis ^ 1, q, best);
        }
    }

    /// Up to `k` closest entries, ascending by distance then id.
    pub fn k_nearest(&self, q: Configuration, k: usize) -> Vec<(NodeId, f64)> {
        let mut found: Vec<(f64, NodeId)> = Vec::with_capacity(k + 1);
        if k > 0 && !self.nodes.is_empty() {
            self.k_nearest_rec(self.root, 0, &q, k, &mut found);
        }
        found.into_iter().map(|(sq, id)| (id, sq.sqrt())).collect()
    }

    fn k_nearest_rec(
        &self,
        idx: u32,
        axis: usize,
        q: &Configuration,
        k: usize,
        found: &mut Vec<(f64, NodeId)>,
    ) {
        let node = &self.nodes[idx as usize];
        let d_sq = node.point.distance_sq(q);
        let full = found.len() == k;
        if !full || closer(d_sq, node.id, found[k - 1].0, found[k - 1].1) {
            let pos = found
                .iter()
                .position(|&(s, id)| closer(d_sq, node.id, s, id))
                .unwrap_or(found.len());
            found.insert(pos, (d_sq, node.id));
            found.truncate(k);
        }
        let diff = coord(q, axis) - coord(&node.point, axis);
        let (near, far) = if diff < 0.0 {
            (node.left, node.right)
        } else {
            (node.right, node.left)
        };
        if near != NIL {
            self.k_nearest_rec(near, axis ^ 1, q, k, found);
        }
        if far != NIL && (found.len() < k || diff * diff <= found[k - 1].0) {
            self.k_nearest_rec(far, axis ^ 1, q, k, found);
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct QueueEntry {
    key: f64,
    id: NodeId,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QueueEntry {}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then_with(|| self.id.cmp(&other.id))
    }
}

/// Nodes of one tree ordered by straight-line distance to one target.
///
/// Removal is lazy: tombstoned ids stay in the heap until they surface at the
/// top or until tombstones outnumber half of the heap, at which point the heap
/// is rebuilt.
#[derive(Clone, Debug)]
pub struct TargetQueue {
    owner: TreeId,
    target: usize,
    heap: BinaryHeap<Reverse<QueueEntry>>,
    tombstones: HashSet<NodeId>,
}

impl TargetQueue {
    pub fn new(owner: TreeId, target: usize) -> Self {
        Self {
            owner,
            target,
            heap: BinaryHeap::new(),
            tombstones: HashSet::new(),
        }
    }

    pub fn owner(&self) -> TreeId {
        self.owner
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn push(&mut self, id: NodeId, key: f64) {
        self.heap.push(Reverse(QueueEntry { key, id }));
    }

    /// Marks a queued id as removed. The id must currently be live in this
    /// queue.
    pub fn tombstone(&mut self, id: NodeId) {
        self.tombstones.insert(id);
        if self.tombstones.len() * 2 > self.heap.len() {
            self.purge();
        }
    }

    fn purge(&mut self) {
        let tombstones = std::mem::take(&mut self.tombstones);
        let live: Vec<_> = self
            .heap
            .drain()
            .filter(|Reverse(e)| !tombstones.contains(&e.id))
            .collect();
        self.heap = BinaryHeap::from(live);
    }

    /// Live entry with the smallest key, without removing it.
    pub fn peek_best(&mut self) -> Option<NodeId> {
        while let Some(Reverse(top)) = self.heap.peek() {
            if self.tombstones.remove(&top.id) {
                self.heap.pop();
            } else {
                return Some(top.id);
            }
        }
        None
    }

    pub fn live_len(&self) -> usize {
        self.heap.len() - self.tombstones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live_len() == 0
    }

    /// Live ids, unordered.
    pub fn live_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.heap
            .iter()
            .map(|Reverse(e)| e.id)
            .filter(|id| !self.tombstones.contains(id))
    }
}
