//! Parent-pointer tree maintenance shared by the rewiring planners.

use crate::geometry::distance;
use crate::nn_index::NodeId;
use crate::output::Node;

pub(crate) fn add_child(nodes: &mut Vec<Node>, mut node: Node, parent: NodeId) -> NodeId {
    let id = NodeId(nodes.len() as u32);
    debug_assert_eq!(node.id, id);
    node.parent = Some(parent);
    node.cost = nodes[parent.index()].cost + distance(nodes[parent.index()].config, node.config);
    nodes.push(node);
    nodes[parent.index()].children.push(id);
    id
}

pub(crate) fn is_ancestor(nodes: &[Node], ancestor: NodeId, mut of: NodeId) -> bool {
    loop {
        if of == ancestor {
            return true;
        }
        match nodes[of.index()].parent {
            Some(p) => of = p,
            None => return false,
        }
    }
}

/// Moves `child` under `new_parent` and refreshes the costs of the moved
/// subtree.
pub(crate) fn reparent(nodes: &mut [Node], child: NodeId, new_parent: NodeId) {
    debug_assert!(!is_ancestor(nodes, child, new_parent), "rewire would create a cycle");
    if let Some(old) = nodes[child.index()].parent {
        let siblings = &mut nodes[old.index()].children;
        if let Some(pos) = siblings.iter().position(|&c| c == child) {
            siblings.swap_remove(pos);
        }
    }
    nodes[child.index()].parent = Some(new_parent);
    nodes[new_parent.index()].children.push(child);

    let mut stack = vec![child];
    while let Some(id) = stack.pop() {
        let parent = nodes[id.index()].parent.expect("moved subtree has parents");
        let cost = nodes[parent.index()].cost
            + distance(nodes[parent.index()].config, nodes[id.index()].config);
        nodes[id.index()].cost = cost;
        stack.extend(nodes[id.index()].children.iter().copied());
    }
}

/// Cost of `id` recomputed from its parent chain, summed root first.
pub fn chain_cost(nodes: &[Node], id: NodeId) -> f64 {
    let mut chain = vec![id];
    let mut cur = id;
    while let Some(p) = nodes[cur.index()].parent {
        chain.push(p);
        cur = p;
        assert!(chain.len() <= nodes.len(), "parent chain has a cycle");
    }
    chain
        .windows(2)
        .rev()
        .fold(0.0, |acc, w| acc + distance(nodes[w[1].index()].config, nodes[w[0].index()].config))
}
