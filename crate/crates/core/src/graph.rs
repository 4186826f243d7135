//! Undirected simple graphs with an optional anchor node.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

pub type NodeId = u32;

/// Undirected simple graph over nodes `0..node_count` with sorted adjacency
/// lists and an optional anchor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    edge_count: usize,
    anchor: Option<NodeId>,
}

impl Graph {
    pub fn empty(node_count: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); node_count],
            edge_count: 0,
            anchor: None,
        }
    }

    /// Builds a graph from an edge list. Duplicate edges are merged; self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = Graph::empty(node_count);
        for (u, v) in edges {
            for x in [u, v] {
                if x as usize >= node_count {
                    return Err(Error::NodeOutOfRange {
                        node: x as usize,
                        node_count,
                    });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u as usize));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Inserts `{u, v}`; returns false for self-loops and existing edges.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> bool {
        if u == v {
            return false;
        }
        let (ui, vi) = (u as usize, v as usize);
        match self.adj[ui].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[ui].insert(pos, v);
                let pos = self.adj[vi].binary_search(&u).unwrap_err();
                self.adj[vi].insert(pos, u);
                self.edge_count += 1;
                true
            }
        }
    }

    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> bool {
        let (ui, vi) = (u as usize, v as usize);
        match self.adj[ui].binary_search(&v) {
            Ok(pos) => {
                self.adj[ui].remove(pos);
                let pos = self.adj[vi].binary_search(&u).expect("symmetric adjacency");
                self.adj[vi].remove(pos);
                self.edge_count -= 1;
                true
            }
            Err(_) => false,
        }
    }

    /// Appends an isolated node and returns its id.
    pub fn add_node(&mut self) -> NodeId {
        self.adj.push(Vec::new());
        (self.adj.len() - 1) as NodeId
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn anchor(&self) -> Option<NodeId> {
        self.anchor
    }

    pub fn set_anchor(&mut self, anchor: Option<NodeId>) -> Result<()> {
        if let Some(a) = anchor {
            if a as usize >= self.node_count() {
                return Err(Error::NodeOutOfRange {
                    node: a as usize,
                    node_count: self.node_count(),
                });
            }
        }
        self.anchor = anchor;
        Ok(())
    }

    pub fn with_anchor(mut self, anchor: NodeId) -> Result<Self> {
        self.set_anchor(Some(anchor))?;
        Ok(self)
    }

    pub fn without_anchor(mut self) -> Self {
        self.anchor = None;
        self
    }

    pub fn require_anchor(&self) -> Result<NodeId> {
        self.anchor.ok_or(Error::MissingAnchor)
    }

    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u as usize]
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u as usize].len()
    }

    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        0..self.node_count() as NodeId
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, ns)| {
            let u = u as NodeId;
            ns.iter().copied().filter(move |&v| v > u).map(move |v| (u, v))
        })
    }

    /// Node-induced subgraph on `nodes`; node `i` of the result is `nodes[i]`.
    /// The anchor is carried over when it lies inside `nodes`.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Graph {
        let mut local = alloc::collections::BTreeMap::new();
        for (i, &v) in nodes.iter().enumerate() {
            local.insert(v, i as NodeId);
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        let mut edge_count = 0;
        for (i, &v) in nodes.iter().enumerate() {
            for w in self.neighbors(v) {
                if let Some(&j) = local.get(w) {
                    adj[i].push(j);
                    if (i as NodeId) < j {
                        edge_count += 1;
                    }
                }
            }
            adj[i].sort_unstable();
        }
        let anchor = self.anchor.and_then(|a| local.get(&a).copied());
        Graph {
            adj,
            edge_count,
            anchor,
        }
    }

    /// Relabels node `u` as `perm[u]`.
    pub fn permuted(&self, perm: &[NodeId]) -> Graph {
        assert_eq!(perm.len(), self.node_count());
        let mut g = Graph::empty(self.node_count());
        for (u, v) in self.edges() {
            g.add_edge(perm[u as usize], perm[v as usize]);
        }
        g.anchor = self.anchor.map(|a| perm[a as usize]);
        g
    }

    /// BFS distances from `source`; `u32::MAX` marks unreachable nodes.
    pub fn bfs_distances(&self, source: NodeId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source as usize] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u as usize];
            for &v in self.neighbors(u) {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = d + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Component label per node, labels numbered in order of first node.
    pub fn components(&self) -> (Vec<u32>, usize) {
        let n = self.node_count();
        let mut label = vec![u32::MAX; n];
        let mut count = 0u32;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != u32::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s as NodeId);
            while let Some(u) = stack.pop() {
                for &v in self.neighbors(u) {
                    if label[v as usize] == u32::MAX {
                        label[v as usize] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (label, count as usize)
    }

    /// Size of the component containing each node.
    pub fn component_sizes(&self) -> Vec<usize> {
        let (label, count) = self.components();
        let mut sizes = vec![0usize; count];
        for &l in &label {
            sizes[l as usize] += 1;
        }
        label.iter().map(|&l| sizes[l as usize]).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() <= 1 || self.components().1 == 1
    }

    /// Disjoint union; the result is unanchored and graph `i` occupies a
    /// contiguous id block starting at the returned offset `i`.
    pub fn disjoint_union(graphs: &[Graph]) -> (Graph, Vec<usize>) {
        let total = graphs.iter().map(Graph::node_count).sum();
        let mut out = Graph::empty(total);
        let mut offsets = Vec::with_capacity(graphs.len());
        let mut offset = 0usize;
        for g in graphs {
            offsets.push(offset);
            for (u, v) in g.edges() {
                out.add_edge(u + offset as NodeId, v + offset as NodeId);
            }
            offset += g.node_count();
        }
        (out, offsets)
    }

    /// All edges as sorted `(u, v)` pairs with `u < v`.
    pub fn edge_list(&self) -> Vec<(NodeId, NodeId)> {
        self.edges().collect()
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for u in 0..n as NodeId {
            for v in u + 1..n as NodeId {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for u in 1..n as NodeId {
            g.add_edge(u - 1, u);
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::path(n);
        if n >= 3 {
            g.add_edge(n as NodeId - 1, 0);
        }
        g
    }

    /// Star with hub `0` and `leaves` leaves.
    pub fn star(leaves: usize) -> Graph {
        let mut g = Graph::empty(leaves + 1);
        for v in 1..=leaves as NodeId {
            g.add_edge(0, v);
        }
        g
    }
}
