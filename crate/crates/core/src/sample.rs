//! Neighborhood extraction: exact k-hop balls and MFinder-style weighted growth.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;

use crate::graph::{Graph, NodeId};

/// An anchored subgraph cut out of a larger graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neighborhood {
    /// Anchored at local node 0.
    pub graph: Graph,
    /// `nodes[i]` is the id in the source graph of local node `i`.
    pub nodes: Vec<NodeId>,
}

impl Neighborhood {
    fn from_nodes(source: &Graph, nodes: Vec<NodeId>) -> Self {
        let mut graph = source.induced_subgraph(&nodes);
        graph.set_anchor(Some(0)).expect("non-empty");
        Neighborhood { graph, nodes }
    }
}

/// All nodes within BFS distance `k` of `center`, anchored at `center`.
/// Local ids follow BFS discovery order.
pub fn k_hop_neighborhood(target: &Graph, center: NodeId, k: u32) -> Neighborhood {
    let dist = target.bfs_distances(center);
    let mut nodes: Vec<NodeId> = target.nodes().filter(|&u| dist[u as usize] <= k).collect();
    nodes.sort_by_key(|&u| (dist[u as usize], u));
    Neighborhood::from_nodes(target, nodes)
}

/// Grows a connected node set from `anchor`: each step adds a frontier node
/// with probability proportional to its number of edges into the grown set.
/// Stops at `size` nodes or when the frontier empties.
pub fn grow_from<R: Rng + ?Sized>(target: &Graph, anchor: NodeId, size: usize, rng: &mut R) -> Neighborhood {
    let mut nodes = Vec::with_capacity(size);
    let mut frontier: BTreeMap<NodeId, u32> = BTreeMap::new();
    let mut in_set = alloc::collections::BTreeSet::new();
    let mut add = |u: NodeId, nodes: &mut Vec<NodeId>, frontier: &mut BTreeMap<NodeId, u32>| {
        nodes.push(u);
        in_set.insert(u);
        frontier.remove(&u);
        for &v in target.neighbors(u) {
            if !in_set.contains(&v) {
                *frontier.entry(v).or_insert(0) += 1;
            }
        }
    };
    if size > 0 {
        add(anchor, &mut nodes, &mut frontier);
    }
    while nodes.len() < size && !frontier.is_empty() {
        let total: u32 = frontier.values().sum();
        let mut pick = rng.random_range(0..total);
        let mut chosen = *frontier.keys().next().expect("non-empty frontier");
        for (&v, &w) in &frontier {
            if pick < w {
                chosen = v;
                break;
            }
            pick -= w;
        }
        add(chosen, &mut nodes, &mut frontier);
    }
    Neighborhood::from_nodes(target, nodes)
}

/// Weighted growth from a uniformly random anchor, up to `max_size` nodes.
pub fn sample_weighted_neighborhood<R: Rng + ?Sized>(target: &Graph, rng: &mut R, max_size: usize) -> Neighborhood {
    let anchor = rng.random_range(0..target.node_count() as NodeId);
    grow_from(target, anchor, max_size.max(1), rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::exact_isomorphic;
    use crate::rng::seeded;

    #[test]
    fn k_hop_on_path() {
        let g = Graph::path(3);
        let one = k_hop_neighborhood(&g, 0, 1);
        assert_eq!(one.nodes, vec![0, 1]);
        assert!(exact_isomorphic(&one.graph, &Graph::path(2).with_anchor(0).unwrap()));
        let two = k_hop_neighborhood(&g, 0, 2);
        assert_eq!(two.graph, Graph::path(3).with_anchor(0).unwrap());
        let zero = k_hop_neighborhood(&Graph::complete(5), 3, 0);
        assert_eq!(zero.nodes, vec![3]);
        assert_eq!(zero.graph.node_count(), 1);
        assert_eq!(zero.graph.anchor(), Some(0));
    }

    #[test]
    fn weighted_growth_sizes() {
        let mut rng = seeded(1);
        let g = Graph::cycle(5);
        for _ in 0..50 {
            let one = sample_weighted_neighborhood(&g, &mut rng, 1);
            assert_eq!(one.graph.node_count(), 1);
            let all = sample_weighted_neighborhood(&g, &mut rng, 5);
            assert_eq!(all.graph.node_count(), 5);
            assert!(all.graph.is_connected());
            let tri = sample_weighted_neighborhood(&Graph::complete(3), &mut rng, 3);
            assert!(exact_isomorphic(&tri.graph, &Graph::complete(3).with_anchor(0).unwrap()));
        }
    }

    #[test]
    fn growth_stops_at_component_boundary() {
        let (g, _) = Graph::disjoint_union(&[Graph::path(3), Graph::complete(4)]);
        let mut rng = seeded(2);
        let n = grow_from(&g, 0, 10, &mut rng);
        assert_eq!(n.nodes.len(), 3);
        assert_eq!(n.nodes[0], 0);
    }

    #[test]
    fn equal_weights_split_evenly() {
        let g = Graph::star(2);
        let mut rng = seeded(9);
        let mut ones = 0;
        for _ in 0..4000 {
            let n = grow_from(&g, 0, 2, &mut rng);
            if n.nodes[1] == 1 {
                ones += 1;
            }
        }
        assert!((1800..2200).contains(&ones), "{ones}");
    }
}
