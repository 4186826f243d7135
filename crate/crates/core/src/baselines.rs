//! Exact ESU enumeration, a naive subset enumerator, MFinder, Rand-ESU and
//! the perfect count-vector order embedding.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::encoder::{Embedder, OrderEmbedding};
use crate::graph::{Graph, NodeId};
use crate::iso::{exact_isomorphic, isomorphism};
use crate::sample::grow_from;
use crate::wl::{canonical_key, CanonicalKey};
use crate::{Error, Result};

/// Largest motif size [`enumerate_exact`] accepts by default.
pub const DEFAULT_SIZE_LIMIT: usize = 7;
/// Largest reference size of the perfect embedding.
pub const PERFECT_SIZE_LIMIT: usize = 5;

/// Definition-1 frequency of one anchor orbit of a motif.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorCount {
    /// Smallest node of the orbit in the representative graph.
    pub anchor: NodeId,
    pub orbit_size: usize,
    pub frequency: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MotifEntry {
    pub graph: Graph,
    pub key: CanonicalKey,
    /// Leaves (subsets or samples) recorded for this class.
    pub count: u64,
    /// Sum of the leaves' weights; equals `count` for unweighted methods.
    pub weight: f64,
    /// Per anchor orbit, filled by anchored exact enumeration.
    pub anchored_counts: Vec<AnchorCount>,
}

impl MotifEntry {
    pub fn max_anchored_frequency(&self) -> Option<u64> {
        self.anchored_counts.iter().map(|a| a.frequency).max()
    }
}

/// Motif classes of one size, grouped by canonical key and confirmed by
/// exact isomorphism.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MotifTable {
    pub size: usize,
    entries: BTreeMap<CanonicalKey, Vec<MotifEntry>>,
    /// Samples that did not reach the motif size.
    pub failed_samples: u64,
}

impl MotifTable {
    pub fn new(size: usize) -> Self {
        MotifTable { size, ..Default::default() }
    }

    /// Adds one leaf; returns the entry's position and the mapping from the
    /// representative onto `graph`.
    fn record(&mut self, graph: Graph, weight: f64, want_mapping: bool) -> ((CanonicalKey, usize), Option<Vec<NodeId>>) {
        let key = canonical_key(&graph);
        let list = self.entries.entry(key).or_default();
        for (i, e) in list.iter_mut().enumerate() {
            let mapping = if want_mapping {
                isomorphism(&e.graph, &graph).map(|m| m.assignment().to_vec())
            } else {
                exact_isomorphic(&e.graph, &graph).then(Vec::new)
            };
            if let Some(m) = mapping {
                e.count += 1;
                e.weight += weight;
                return ((key, i), want_mapping.then_some(m));
            }
        }
        let identity = want_mapping.then(|| graph.nodes().collect());
        list.push(MotifEntry { graph, key, count: 1, weight, anchored_counts: Vec::new() });
        ((key, list.len() - 1), identity)
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &MotifEntry> {
        self.entries.values().flatten()
    }

    pub fn total_count(&self) -> u64 {
        self.entries().map(|e| e.count).sum()
    }

    /// The entry isomorphic to `graph`, if any.
    pub fn get(&self, graph: &Graph) -> Option<&MotifEntry> {
        self.entries.get(&canonical_key(graph))?.iter().find(|e| exact_isomorphic(&e.graph, graph))
    }

    /// Entries by weight, then count, descending; ties by key.
    pub fn ranked(&self) -> Vec<&MotifEntry> {
        let mut v: Vec<&MotifEntry> = self.entries().collect();
        v.sort_by(|a, b| b.weight.total_cmp(&a.weight).then(b.count.cmp(&a.count)).then(a.key.cmp(&b.key)));
        v
    }

    /// Every (motif, anchor orbit) class as an anchored graph with its
    /// Definition-1 frequency, descending; ties by anchored key.
    pub fn anchored_ranking(&self) -> Vec<(Graph, u64)> {
        let mut v: Vec<(CanonicalKey, Graph, u64)> = self
            .entries()
            .flat_map(|e| {
                e.anchored_counts.iter().map(move |a| {
                    let g = e.graph.clone().with_anchor(a.anchor).expect("orbit node in range");
                    (canonical_key(&g), g, a.frequency)
                })
            })
            .collect();
        v.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)));
        v.into_iter().map(|(_, g, f)| (g, f)).collect()
    }

    /// Same classes, counts, weights and per-orbit frequencies, compared up
    /// to isomorphism.
    pub fn agrees_with(&self, other: &MotifTable) -> bool {
        if self.size != other.size || self.len() != other.len() {
            return false;
        }
        self.entries().all(|a| {
            let Some(b) = other.get(&a.graph) else { return false };
            a.count == b.count
                && a.weight == b.weight
                && a.anchored_counts.len() == b.anchored_counts.len()
                && a.anchored_counts.iter().all(|x| {
                    let ga = a.graph.clone().with_anchor(x.anchor).expect("in range");
                    b.anchored_counts.iter().any(|y| {
                        let gb = b.graph.clone().with_anchor(y.anchor).expect("in range");
                        x.frequency == y.frequency && x.orbit_size == y.orbit_size && exact_isomorphic(&ga, &gb)
                    })
                })
        })
    }
}

/// Automorphism orbits of `g` (anchor ignored), each sorted, ordered by
/// smallest member.
pub fn anchor_orbits(g: &Graph) -> Vec<Vec<NodeId>> {
    let plain = g.clone().without_anchor();
    let mut orbits: Vec<(Graph, Vec<NodeId>)> = Vec::new();
    for u in plain.nodes() {
        let anchored = plain.clone().with_anchor(u).expect("in range");
        match orbits.iter_mut().find(|(rep, _)| exact_isomorphic(rep, &anchored)) {
            Some((_, members)) => members.push(u),
            None => orbits.push((anchored, vec![u])),
        }
    }
    orbits.into_iter().map(|(_, m)| m).collect()
}

/// Node-set walker shared by ESU, Rand-ESU and the perfect embedding.
///
/// `sub` holds the current set, `ext` its extension set. Child `j` adds
/// `ext[j]` and inherits `ext[j+1..]` plus the new node's exclusive
/// neighbours above `floor` (all of them when `floor` is unset).
/// `select(depth, n)` picks which of the `n` children at the next depth are
/// expanded.
struct Esu<'a, S, V> {
    target: &'a Graph,
    k: usize,
    floor: Option<NodeId>,
    select: S,
    visit: V,
    in_closed: Vec<u32>,
}

impl<S, V> Esu<'_, S, V>
where
    S: FnMut(usize, usize) -> Vec<usize>,
    V: FnMut(&[NodeId]) -> Result<()>,
{
    fn admits(&self, u: NodeId) -> bool {
        self.floor.is_none_or(|f| u > f)
    }

    fn mark(&mut self, u: NodeId, delta: i32) {
        let slot = &mut self.in_closed[u as usize];
        *slot = slot.wrapping_add_signed(delta);
        for &v in self.target.neighbors(u) {
            let slot = &mut self.in_closed[v as usize];
            *slot = slot.wrapping_add_signed(delta);
        }
    }

    fn extend(&mut self, sub: &mut Vec<NodeId>, ext: &[NodeId]) -> Result<()> {
        (self.visit)(sub)?;
        if sub.len() == self.k || ext.is_empty() {
            return Ok(());
        }
        let chosen = (self.select)(sub.len() + 1, ext.len());
        for j in chosen {
            let w = ext[j];
            let mut next: Vec<NodeId> = ext[j + 1..].to_vec();
            for &u in self.target.neighbors(w) {
                if self.admits(u) && self.in_closed[u as usize] == 0 {
                    next.push(u);
                }
            }
            self.mark(w, 1);
            sub.push(w);
            let r = self.extend(sub, &next);
            sub.pop();
            self.mark(w, -1);
            r?;
        }
        Ok(())
    }

    /// All sets whose smallest node is `root`.
    fn from_root(&mut self, root: NodeId) -> Result<()> {
        self.floor = Some(root);
        self.from_anchor(root)
    }

    /// All sets containing `root`, with `floor` already set.
    fn from_anchor(&mut self, root: NodeId) -> Result<()> {
        let ext: Vec<NodeId> = self.target.neighbors(root).iter().copied().filter(|&u| self.admits(u)).collect();
        self.mark(root, 1);
        let mut sub = vec![root];
        let r = self.extend(&mut sub, &ext);
        self.mark(root, -1);
        r
    }
}

fn check_size(k: usize, limit: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("motif size must be at least 1".into()));
    }
    if k > limit {
        return Err(Error::SizeGuard { size: k, limit });
    }
    Ok(())
}

struct OrbitTracker {
    orbits: Vec<Vec<NodeId>>,
    hits: Vec<BTreeSet<NodeId>>,
}

/// Adds one leaf to `table`, and its anchor images to `tracker` if present.
fn record_subset(
    table: &mut MotifTable,
    tracker: Option<&mut BTreeMap<(CanonicalKey, usize), OrbitTracker>>,
    target: &Graph,
    nodes: &[NodeId],
    weight: f64,
) {
    let sub = target.induced_subgraph(nodes);
    let want = tracker.is_some();
    let (pos, mapping) = table.record(sub, weight, want);
    if let (Some(tracker), Some(mapping)) = (tracker, mapping) {
        let t = tracker.entry(pos).or_insert_with(|| {
            let orbits = anchor_orbits(&table.entries[&pos.0][pos.1].graph);
            let hits = vec![BTreeSet::new(); orbits.len()];
            OrbitTracker { orbits, hits }
        });
        for (orbit, hits) in t.orbits.iter().zip(&mut t.hits) {
            hits.extend(orbit.iter().map(|&x| nodes[mapping[x as usize] as usize]));
        }
    }
}

fn finish_orbits(table: &mut MotifTable, tracker: BTreeMap<(CanonicalKey, usize), OrbitTracker>) {
    for ((key, i), t) in tracker {
        let e = &mut table.entries.get_mut(&key).expect("recorded")[i];
        e.anchored_counts = t
            .orbits
            .iter()
            .zip(&t.hits)
            .map(|(o, h)| AnchorCount { anchor: o[0], orbit_size: o.len(), frequency: h.len() as u64 })
            .collect();
    }
}

/// Full ESU enumeration of the connected `k`-node subsets of `target`.
/// With `anchored`, each class also carries its per-orbit Definition-1
/// frequencies.
pub fn enumerate_exact(target: &Graph, k: usize, anchored: bool) -> Result<MotifTable> {
    enumerate_exact_with_limit(target, k, anchored, DEFAULT_SIZE_LIMIT)
}

pub fn enumerate_exact_with_limit(target: &Graph, k: usize, anchored: bool, size_limit: usize) -> Result<MotifTable> {
    check_size(k, size_limit)?;
    let mut table = MotifTable::new(k);
    let mut tracker = BTreeMap::new();
    let mut esu = Esu {
        target,
        k,
        floor: None,
        select: |_, n| (0..n).collect(),
        visit: |s: &[NodeId]| {
            if s.len() == k {
                record_subset(&mut table, anchored.then_some(&mut tracker), target, s, 1.0);
            }
            Ok(())
        },
        in_closed: vec![0; target.node_count()],
    };
    for root in target.nodes() {
        esu.from_root(root)?;
    }
    if anchored {
        finish_orbits(&mut table, tracker);
    }
    Ok(table)
}

/// Brute force over all `k`-subsets; independent of the ESU walker and of
/// the orbit machinery.
pub fn enumerate_naive(target: &Graph, k: usize) -> Result<MotifTable> {
    check_size(k, DEFAULT_SIZE_LIMIT)?;
    let n = target.node_count();
    let mut table = MotifTable::new(k);
    let mut classes: Vec<(Graph, BTreeSet<NodeId>)> = Vec::new();
    if k > n {
        return Ok(table);
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let nodes: Vec<NodeId> = idx.iter().map(|&i| i as NodeId).collect();
        let sub = target.induced_subgraph(&nodes);
        if sub.is_connected() {
            for local in sub.nodes() {
                let anchored = sub.clone().with_anchor(local).expect("in range");
                match classes.iter_mut().find(|(g, _)| exact_isomorphic(g, &anchored)) {
                    Some((_, hits)) => {
                        hits.insert(nodes[local as usize]);
                    }
                    None => classes.push((anchored, BTreeSet::from([nodes[local as usize]]))),
                }
            }
            table.record(sub, 1.0, false);
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else { break };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    for list in table.entries.values_mut() {
        for e in list {
            for x in e.graph.nodes() {
                let anchored = e.graph.clone().with_anchor(x).expect("in range");
                if e.anchored_counts.iter().any(|a| {
                    exact_isomorphic(&e.graph.clone().with_anchor(a.anchor).expect("in range"), &anchored)
                }) {
                    continue;
                }
                let orbit_size = e
                    .graph
                    .nodes()
                    .filter(|&y| exact_isomorphic(&e.graph.clone().with_anchor(y).expect("in range"), &anchored))
                    .count();
                let frequency = classes
                    .iter()
                    .find(|(g, _)| exact_isomorphic(g, &anchored))
                    .map_or(0, |(_, h)| h.len() as u64);
                e.anchored_counts.push(AnchorCount { anchor: x, orbit_size, frequency });
            }
        }
    }
    Ok(table)
}

/// Weighted-growth sampling to exactly `k` nodes, each sample weighted 1.
/// With `anchored`, classes are anchored at the first sampled node.
pub fn mine_mfinder<R: Rng + ?Sized>(
    target: &Graph,
    k: usize,
    samples: usize,
    anchored: bool,
    rng: &mut R,
) -> Result<MotifTable> {
    if k == 0 || samples == 0 {
        return Err(Error::InvalidArgument("k and samples must be positive".into()));
    }
    let mut table = MotifTable::new(k);
    let n = target.node_count() as NodeId;
    if n == 0 {
        table.failed_samples = samples as u64;
        return Ok(table);
    }
    for _ in 0..samples {
        let anchor = rng.random_range(0..n);
        let grown = grow_from(target, anchor, k, rng);
        if grown.nodes.len() < k {
            table.failed_samples += 1;
            continue;
        }
        let g = if anchored { grown.graph } else { grown.graph.without_anchor() };
        table.record(g, 1.0, false);
    }
    Ok(table)
}

/// Level expansion probabilities `p_i = (1 - i/(k+1))^tau`, `i = 1..=k`.
pub fn rand_esu_probabilities(k: usize, tau: f64) -> Vec<f64> {
    (1..=k).map(|i| libm::pow(1.0 - i as f64 / (k + 1) as f64, tau)).collect()
}

/// Rand-ESU: each tree level keeps a `p_i` share of its children (stochastic
/// rounding, uniform choice), and every leaf carries weight `1 / prod p_i`.
pub fn mine_rand_esu<R: Rng + ?Sized>(target: &Graph, k: usize, tau: f64, rng: &mut R) -> Result<MotifTable> {
    check_size(k, DEFAULT_SIZE_LIMIT)?;
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument("tau must be positive".into()));
    }
    let p = rand_esu_probabilities(k, tau);
    let weight = 1.0 / p.iter().product::<f64>();
    let mut table = MotifTable::new(k);
    let rng = core::cell::RefCell::new(rng);
    let select = |depth: usize, n: usize| -> Vec<usize> {
        let mut rng = rng.borrow_mut();
        let share = n as f64 * p[depth - 1];
        let m = (libm::floor(share + rng.random::<f64>()) as usize).min(n);
        let mut chosen = rand::seq::index::sample(&mut **rng, n, m).into_vec();
        chosen.sort_unstable();
        chosen
    };
    let roots: Vec<usize> = select(1, target.node_count());
    let mut esu = Esu {
        target,
        k,
        floor: None,
        select,
        visit: |s: &[NodeId]| {
            if s.len() == k {
                record_subset(&mut table, None, target, s, weight);
            }
            Ok(())
        },
        in_closed: vec![0; target.node_count()],
    };
    for root in roots {
        esu.from_root(root as NodeId)?;
    }
    Ok(table)
}

/// Exact order embedding: coordinate `i` counts the connected node subsets
/// containing the graph's anchor that induce reference graph `i` (anchored
/// at that anchor).
#[derive(Clone, Debug)]
pub struct PerfectEmbedding {
    max_size: usize,
    reference: Vec<Graph>,
    by_key: BTreeMap<CanonicalKey, Vec<usize>>,
}

impl PerfectEmbedding {
    /// Enumerates the non-isomorphic connected anchored graphs with at most
    /// `max_size` nodes, ordered by size.
    pub fn build(max_size: usize) -> Result<Self> {
        check_size(max_size, PERFECT_SIZE_LIMIT)?;
        let mut reference: Vec<Graph> = Vec::new();
        let mut by_key: BTreeMap<CanonicalKey, Vec<usize>> = BTreeMap::new();
        for n in 1..=max_size {
            let pairs: Vec<(NodeId, NodeId)> =
                (0..n as NodeId).flat_map(|u| (u + 1..n as NodeId).map(move |v| (u, v))).collect();
            for mask in 0u32..1 << pairs.len() {
                let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
                let g = Graph::from_edges(n, edges)?;
                if !g.is_connected() {
                    continue;
                }
                for a in g.nodes() {
                    let anchored = g.clone().with_anchor(a)?;
                    let key = canonical_key(&anchored);
                    let ids = by_key.entry(key).or_default();
                    if !ids.iter().any(|&i| exact_isomorphic(&reference[i], &anchored)) {
                        ids.push(reference.len());
                        reference.push(anchored);
                    }
                }
            }
        }
        Ok(PerfectEmbedding { max_size, reference, by_key })
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn reference(&self) -> &[Graph] {
        &self.reference
    }

    fn lookup(&self, g: &Graph) -> usize {
        self.by_key[&canonical_key(g)]
            .iter()
            .copied()
            .find(|&i| exact_isomorphic(&self.reference[i], g))
            .expect("reference set is closed")
    }

    pub fn counts(&self, g: &Graph) -> Result<Vec<u64>> {
        let anchor = g.require_anchor()?;
        let mut z = vec![0u64; self.reference.len()];
        let mut esu = Esu {
            target: g,
            k: self.max_size,
            floor: None,
            select: |_, n| (0..n).collect(),
            visit: |s: &[NodeId]| {
                let pos = s.iter().position(|&u| u == anchor).expect("root in set") as NodeId;
                let sub = g.induced_subgraph(s).with_anchor(pos)?;
                z[self.lookup(&sub)] += 1;
                Ok(())
            },
            in_closed: vec![0; g.node_count()],
        };
        esu.from_anchor(anchor)?;
        Ok(z)
    }
}

impl Embedder for PerfectEmbedding {
    fn dim(&self) -> usize {
        self.reference.len()
    }

    fn embed_batch(&self, graphs: &[Graph]) -> Result<Vec<OrderEmbedding>> {
        graphs.iter().map(|g| Ok(self.counts(g)?.into_iter().map(|c| c as f64).collect())).collect()
    }
}

/// Elementwise minimum, which dominates the embedding of every common
/// anchored subgraph.
pub fn intersection_lower_bound(a: &[f64], b: &[f64]) -> Result<OrderEmbedding> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch { op: "intersection_lower_bound", left: (1, a.len()), right: (1, b.len()) });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x.min(*y)).collect())
}

/// `a ⪯ b` elementwise.
pub fn dominated(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x <= y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::{anchored_frequency, graph_level_frequency};
    use crate::iso::is_anchored_subgraph;
    use crate::rng::seeded;

    fn only_count(t: &MotifTable) -> u64 {
        assert_eq!(t.len(), 1);
        t.entries().next().unwrap().count
    }

    #[test]
    fn small_enumeration_examples() {
        assert_eq!(only_count(&enumerate_exact(&Graph::complete(3), 3, false).unwrap()), 1);
        assert_eq!(only_count(&enumerate_exact(&Graph::path(4), 3, false).unwrap()), 2);
        assert_eq!(only_count(&enumerate_exact(&Graph::complete(4), 3, false).unwrap()), 4);
        assert_eq!(
            enumerate_exact(&Graph::path(3), 8, false),
            Err(Error::SizeGuard { size: 8, limit: DEFAULT_SIZE_LIMIT })
        );
    }

    #[test]
    fn path_orbits() {
        let t = enumerate_exact(&Graph::path(5), 3, true).unwrap();
        let e = t.entries().next().unwrap();
        assert_eq!(anchor_orbits(&e.graph).len(), 2);
        let mut f: Vec<(usize, u64)> = e.anchored_counts.iter().map(|a| (a.orbit_size, a.frequency)).collect();
        f.sort();
        // ends of a 3-path land anywhere; its centre only on the 3 inner nodes
        assert_eq!(f, vec![(1, 3), (2, 5)]);
    }

    fn corpus() -> Vec<Graph> {
        let cfg = crate::synth::GeneratorConfig::new(crate::synth::Family::Mixed, (4, 11), 21).unwrap();
        cfg.dataset(12).unwrap()
    }

    #[test]
    fn esu_matches_naive_and_counters() {
        for g in corpus() {
            for k in 1..=4 {
                let esu = enumerate_exact(&g, k, true).unwrap();
                let naive = enumerate_naive(&g, k).unwrap();
                assert!(esu.agrees_with(&naive), "k={k}");
                for e in esu.entries() {
                    assert_eq!(graph_level_frequency(&e.graph, &g).unwrap(), u128::from(e.count));
                }
                for (a, f) in esu.anchored_ranking() {
                    assert_eq!(anchored_frequency(&a, &g).unwrap(), f);
                }
            }
        }
    }

    #[test]
    fn mfinder_on_clique_and_accounting() {
        let t = mine_mfinder(&Graph::complete(5), 5, 50, true, &mut seeded(1)).unwrap();
        assert_eq!(only_count(&t), 50);
        let (g, _) = Graph::disjoint_union(&[Graph::path(2), Graph::cycle(6)]);
        let t = mine_mfinder(&g, 4, 200, false, &mut seeded(2)).unwrap();
        assert_eq!(t.total_count() + t.failed_samples, 200);
        assert!(t.failed_samples > 0);
    }

    #[test]
    fn rand_esu_limits() {
        let g = &corpus()[3];
        let exact = enumerate_exact(g, 4, false).unwrap();
        let tiny = mine_rand_esu(g, 4, 1e-300, &mut seeded(3)).unwrap();
        assert!(tiny.agrees_with(&exact));
        let sampled = mine_rand_esu(g, 4, 1.0, &mut seeded(4)).unwrap();
        for e in sampled.entries() {
            assert_eq!(e.graph.node_count(), 4);
            assert!(e.graph.is_connected());
        }
        assert!(mine_rand_esu(g, 4, 0.0, &mut seeded(4)).is_err());
    }

    #[test]
    fn perfect_embedding_basics() {
        let pe = PerfectEmbedding::build(4).unwrap();
        // anchored connected graphs: 1 + 1 + 3 + 11
        assert_eq!(pe.dim(), 16);
        let z = pe.counts(&Graph::empty(1).with_anchor(0).unwrap()).unwrap();
        assert_eq!(z[0], 1);
        assert!(z[1..].iter().all(|&c| c == 0));
        assert_eq!(PerfectEmbedding::build(6).unwrap_err(), Error::SizeGuard { size: 6, limit: 5 });
        assert!(pe.counts(&Graph::path(3)).is_err());
    }

    #[test]
    fn perfect_embedding_order_equivalence() {
        let pe = PerfectEmbedding::build(4).unwrap();
        let refs = pe.reference().to_vec();
        let z = pe.embed_batch(&refs).unwrap();
        for (i, q) in refs.iter().enumerate() {
            for (j, g) in refs.iter().enumerate() {
                let sub = is_anchored_subgraph(q, g).unwrap().is_some();
                assert_eq!(dominated(&z[i], &z[j]), sub, "{i} vs {j}");
            }
        }
    }

    #[test]
    fn intersection_bound() {
        let x = [1.0, 0.0, 3.0];
        assert_eq!(intersection_lower_bound(&x, &x).unwrap(), x.to_vec());
        let y = [2.0, 1.0, 0.5];
        let m = intersection_lower_bound(&x, &y).unwrap();
        assert!(dominated(&m, &x) && dominated(&m, &y));
        assert!(intersection_lower_bound(&x, &y[..2]).is_err());
    }
}
