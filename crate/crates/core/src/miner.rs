//! Neighborhood index, total-penalty objective and the greedy, beam and
//! MCTS monotonic walks.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::count::{anchored_frequency, graph_level_frequency_with_limit};
use crate::encoder::{penalty, Embedder, OrderEmbedding};
use crate::graph::{Graph, NodeId};
use crate::iso::exact_isomorphic;
use crate::sample::{k_hop_neighborhood, sample_weighted_neighborhood};
use crate::wl::{canonical_key, CanonicalKey};
use crate::{Error, Result};

/// Groups of at most this many nodes are confirmed by exact isomorphism.
pub const CONFIRM_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct IndexEntry {
    /// Anchored at local node 0.
    pub graph: Graph,
    pub origin: NodeId,
}

/// Embedded neighborhoods of a target; immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborhoodIndex {
    entries: Vec<IndexEntry>,
    embeddings: Vec<OrderEmbedding>,
    /// Set when the target has fewer nodes than the smallest requested
    /// neighborhood size.
    pub undersized_target: bool,
}

impl NeighborhoodIndex {
    pub fn from_parts(entries: Vec<IndexEntry>, embeddings: Vec<OrderEmbedding>) -> Result<Self> {
        if entries.len() != embeddings.len() {
            return Err(Error::InvalidArgument("one embedding per index entry required".into()));
        }
        Ok(NeighborhoodIndex { entries, embeddings, undersized_target: false })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[IndexEntry] {
        &self.entries
    }

    pub fn embeddings(&self) -> &[OrderEmbedding] {
        &self.embeddings
    }

    /// `m(G) = sum over the index of E(G, N)`.
    pub fn total_penalty(&self, motif: &[f64]) -> f64 {
        self.embeddings.iter().map(|e| penalty(motif, e)).sum()
    }

    /// Number of neighborhoods with `E(G, N) < t`.
    pub fn hard_frequency_estimate(&self, motif: &[f64], t: f64) -> usize {
        self.embeddings.iter().filter(|e| penalty(motif, e) < t).count()
    }
}

/// Samples `count` weighted-growth neighborhoods with sizes drawn from
/// `size_range` (inclusive) and embeds them.
pub fn build_index<E: Embedder + ?Sized, R: Rng + ?Sized>(
    target: &Graph,
    embedder: &E,
    count: usize,
    size_range: (usize, usize),
    rng: &mut R,
) -> Result<NeighborhoodIndex> {
    let (lo, hi) = size_range;
    if lo == 0 || hi < lo {
        return Err(Error::InvalidArgument("neighborhood size range must satisfy 1 <= lo <= hi".into()));
    }
    if count > 0 && target.node_count() == 0 {
        return Err(Error::InvalidArgument("empty target".into()));
    }
    let entries: Vec<IndexEntry> = (0..count)
        .map(|_| {
            let size = rng.random_range(lo..=hi);
            let n = sample_weighted_neighborhood(target, rng, size);
            IndexEntry { graph: n.graph, origin: n.nodes[0] }
        })
        .collect();
    let graphs: Vec<Graph> = entries.iter().map(|e| e.graph.clone()).collect();
    let embeddings = embedder.embed_batch(&graphs)?;
    let mut index = NeighborhoodIndex::from_parts(entries, embeddings)?;
    index.undersized_target = target.node_count() < lo;
    Ok(index)
}

/// One `hops`-hop neighborhood per target node.
pub fn build_exhaustive_index<E: Embedder + ?Sized>(target: &Graph, embedder: &E, hops: u32) -> Result<NeighborhoodIndex> {
    let entries: Vec<IndexEntry> = target
        .nodes()
        .map(|u| IndexEntry { graph: k_hop_neighborhood(target, u, hops).graph, origin: u })
        .collect();
    let graphs: Vec<Graph> = entries.iter().map(|e| e.graph.clone()).collect();
    let embeddings = embedder.embed_batch(&graphs)?;
    NeighborhoodIndex::from_parts(entries, embeddings)
}

/// A connected motif embedded in the target, anchored at its seed.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchState {
    /// Target node ids; `nodes[0]` is the seed and motif anchor.
    pub nodes: Vec<NodeId>,
    /// Induced on `nodes`, local node `i` = `nodes[i]`, anchored at 0.
    pub motif: Graph,
    pub key: CanonicalKey,
    pub embedding: OrderEmbedding,
    pub total_penalty: f64,
}

impl SearchState {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// The target node added last.
    pub fn last(&self) -> NodeId {
        *self.nodes.last().expect("non-empty")
    }
}

/// Deterministic preference between candidate states: lower total penalty,
/// then lower key digest, then the lexicographically smaller node sequence.
fn better(a: &SearchState, b: &SearchState) -> core::cmp::Ordering {
    a.total_penalty
        .total_cmp(&b.total_penalty)
        .then(a.key.digest.cmp(&b.key.digest))
        .then(a.last().cmp(&b.last()))
        .then_with(|| a.nodes.cmp(&b.nodes))
}

fn motif_graph(target: &Graph, nodes: &[NodeId]) -> Graph {
    let mut g = target.induced_subgraph(nodes);
    g.set_anchor(Some(0)).expect("non-empty");
    g
}

/// Frontier of a node set, ascending.
fn frontier(target: &Graph, nodes: &[NodeId]) -> Vec<NodeId> {
    let inside: BTreeSet<NodeId> = nodes.iter().copied().collect();
    let out: BTreeSet<NodeId> = nodes
        .iter()
        .flat_map(|&u| target.neighbors(u).iter().copied())
        .filter(|v| !inside.contains(v))
        .collect();
    out.into_iter().collect()
}

/// Target, embedder and index bundled for the search strategies.
pub struct Miner<'a, E: Embedder + ?Sized> {
    pub target: &'a Graph,
    pub embedder: &'a E,
    pub index: &'a NeighborhoodIndex,
}

impl<E: Embedder + ?Sized> Clone for Miner<'_, E> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<E: Embedder + ?Sized> Copy for Miner<'_, E> {}

impl<'a, E: Embedder + ?Sized> Miner<'a, E> {
    pub fn new(target: &'a Graph, embedder: &'a E, index: &'a NeighborhoodIndex) -> Self {
        Miner { target, embedder, index }
    }

    fn states(&self, node_sets: Vec<Vec<NodeId>>) -> Result<Vec<SearchState>> {
        let motifs: Vec<Graph> = node_sets.iter().map(|n| motif_graph(self.target, n)).collect();
        let embeddings = self.embedder.embed_batch(&motifs)?;
        Ok(node_sets
            .into_iter()
            .zip(motifs)
            .zip(embeddings)
            .map(|((nodes, motif), embedding)| SearchState {
                key: canonical_key(&motif),
                total_penalty: self.index.total_penalty(&embedding),
                nodes,
                motif,
                embedding,
            })
            .collect())
    }

    pub fn seed_state(&self, seed: NodeId) -> Result<SearchState> {
        if seed as usize >= self.target.node_count() {
            return Err(Error::NodeOutOfRange { node: seed as usize, node_count: self.target.node_count() });
        }
        Ok(self.states(vec![vec![seed]])?.pop().expect("one state"))
    }

    /// One successor per frontier node, in ascending node order.
    pub fn grow_candidates(&self, state: &SearchState) -> Result<Vec<SearchState>> {
        let sets = frontier(self.target, &state.nodes)
            .into_iter()
            .map(|v| {
                let mut n = state.nodes.clone();
                n.push(v);
                n
            })
            .collect();
        self.states(sets)
    }

    /// Greedy walk from `seed` to size `k`; returns the states of sizes
    /// 1..=k, or `None` if the seed's component is smaller than `k`.
    pub fn greedy_walk(&self, seed: NodeId, k: usize) -> Result<Option<Vec<SearchState>>> {
        let mut walk = vec![self.seed_state(seed)?];
        while walk.len() < k {
            let next = self.grow_candidates(walk.last().expect("non-empty"))?.into_iter().min_by(better);
            match next {
                Some(s) => walk.push(s),
                None => return Ok(None),
            }
        }
        Ok(Some(walk))
    }

    /// Beam search from `seed`: the best state per level, sizes 1..=k.
    pub fn beam_walk(&self, seed: NodeId, k: usize, width: usize) -> Result<Option<Vec<SearchState>>> {
        if width == 0 {
            return Err(Error::InvalidArgument("beam width must be at least 1".into()));
        }
        let first = self.seed_state(seed)?;
        let mut best = vec![first.clone()];
        let mut beam = vec![first];
        while best.len() < k {
            let mut next: Vec<SearchState> = Vec::new();
            for s in &beam {
                next.extend(self.grow_candidates(s)?);
            }
            next.sort_by(better);
            let mut kept: Vec<SearchState> = Vec::new();
            for cand in next {
                if kept.len() == width {
                    break;
                }
                if !kept.iter().any(|s| same_motif(s, &cand)) {
                    kept.push(cand);
                }
            }
            if kept.is_empty() {
                return Ok(None);
            }
            best.push(kept[0].clone());
            beam = kept;
        }
        Ok(Some(best))
    }
}

fn same_motif(a: &SearchState, b: &SearchState) -> bool {
    a.key == b.key && (a.size() > CONFIRM_LIMIT || exact_isomorphic(&a.motif, &b.motif))
}

/// A de-duplicated motif class with its ranking statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct MinedMotif {
    /// Anchored at local node 0.
    pub graph: Graph,
    /// Target nodes of the representative occurrence.
    pub nodes: Vec<NodeId>,
    pub key: CanonicalKey,
    /// Walks ending in this class (greedy, beam) or visit count (MCTS).
    pub occurrences: u64,
    pub mean_penalty: f64,
}

/// Ranked motif classes per size.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MiningResult {
    pub by_size: BTreeMap<usize, Vec<MinedMotif>>,
}

impl MiningResult {
    pub fn ranked(&self, size: usize) -> &[MinedMotif] {
        self.by_size.get(&size).map_or(&[], Vec::as_slice)
    }
}

fn rank(list: &mut [MinedMotif]) {
    list.sort_by(|a, b| {
        b.occurrences
            .cmp(&a.occurrences)
            .then(a.mean_penalty.total_cmp(&b.mean_penalty))
            .then(a.key.digest.cmp(&b.key.digest))
    });
}

/// Accumulates candidates into anchored classes (key + exact confirmation).
#[derive(Default)]
struct Grouper {
    groups: Vec<(MinedMotif, f64)>,
    by_key: BTreeMap<CanonicalKey, Vec<usize>>,
}

impl Grouper {
    fn add(&mut self, graph: &Graph, nodes: &[NodeId], key: CanonicalKey, weight: u64, penalty: f64) {
        let ids = self.by_key.entry(key).or_default();
        let found = ids.iter().copied().find(|&i| {
            graph.node_count() > CONFIRM_LIMIT || exact_isomorphic(&self.groups[i].0.graph, graph)
        });
        let i = match found {
            Some(i) => i,
            None => {
                self.groups.push((
                    MinedMotif {
                        graph: graph.clone(),
                        nodes: nodes.to_vec(),
                        key,
                        occurrences: 0,
                        mean_penalty: 0.0,
                    },
                    0.0,
                ));
                ids.push(self.groups.len() - 1);
                self.groups.len() - 1
            }
        };
        let (m, sum) = &mut self.groups[i];
        m.occurrences += weight;
        *sum += penalty * weight as f64;
    }

    fn finish(self) -> Vec<MinedMotif> {
        let mut list: Vec<MinedMotif> = self
            .groups
            .into_iter()
            .map(|(mut m, sum)| {
                m.mean_penalty = if m.occurrences == 0 { 0.0 } else { sum / m.occurrences as f64 };
                m
            })
            .collect();
        rank(&mut list);
        list
    }
}

/// Groups walks (each a state sequence of sizes 1..=k) per size >= 2.
pub fn aggregate_walks(walks: &[Vec<SearchState>]) -> MiningResult {
    let mut grouped: BTreeMap<usize, Grouper> = BTreeMap::new();
    for walk in walks {
        for s in walk.iter().skip(1) {
            grouped.entry(s.size()).or_default().add(&s.motif, &s.nodes, s.key, 1, s.total_penalty);
        }
    }
    MiningResult { by_size: grouped.into_iter().map(|(k, g)| (k, g.finish())).collect() }
}

/// Draws `count` uniform seed nodes (with replacement).
pub fn draw_seeds<R: Rng + ?Sized>(target: &Graph, count: usize, rng: &mut R) -> Vec<NodeId> {
    let n = target.node_count() as NodeId;
    if n == 0 {
        return Vec::new();
    }
    (0..count).map(|_| rng.random_range(0..n)).collect()
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidArgument("motif size must be at least 2".into()));
    }
    Ok(())
}

/// Seeds in components of at least `k` nodes; errors if none qualify.
pub fn usable_seeds(target: &Graph, seeds: &[NodeId], k: usize) -> Result<Vec<NodeId>> {
    let sizes = target.component_sizes();
    let ok: Vec<NodeId> = seeds.iter().copied().filter(|&s| sizes[s as usize] >= k).collect();
    if ok.is_empty() {
        return Err(Error::NoUsableSeed(k));
    }
    Ok(ok)
}

pub fn mine_greedy<E: Embedder + ?Sized, R: Rng + ?Sized>(
    miner: Miner<'_, E>,
    k: usize,
    seeds: usize,
    rng: &mut R,
) -> Result<MiningResult> {
    check_k(k)?;
    let seeds = usable_seeds(miner.target, &draw_seeds(miner.target, seeds, rng), k)?;
    let mut walks = Vec::with_capacity(seeds.len());
    for s in seeds {
        walks.extend(miner.greedy_walk(s, k)?);
    }
    Ok(aggregate_walks(&walks))
}

pub fn mine_beam<E: Embedder + ?Sized, R: Rng + ?Sized>(
    miner: Miner<'_, E>,
    k: usize,
    width: usize,
    seeds: usize,
    rng: &mut R,
) -> Result<MiningResult> {
    check_k(k)?;
    let seeds = usable_seeds(miner.target, &draw_seeds(miner.target, seeds, rng), k)?;
    let mut walks = Vec::with_capacity(seeds.len());
    for s in seeds {
        walks.extend(miner.beam_walk(s, k, width)?);
    }
    Ok(aggregate_walks(&walks))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => libm::log(x),
            LogBase::Two => libm::log2(x),
            LogBase::Ten => libm::log10(x),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MctsConfig {
    pub simulations: usize,
    pub c: f64,
    /// Seeds drawn once, up front; UCT chooses among them.
    pub seed_pool: usize,
    #[serde(default)]
    pub log_base: LogBase,
}

impl Default for MctsConfig {
    fn default() -> Self {
        MctsConfig { simulations: 1000, c: 0.7, seed_pool: 100, log_base: LogBase::Natural }
    }
}

/// Value of a terminal motif: `1 - log(m / |N| + 1)`, and 1 for an empty index.
pub fn mcts_value(total_penalty: f64, index_len: usize, base: LogBase) -> f64 {
    if index_len == 0 {
        return 1.0;
    }
    1.0 - base.log(total_penalty / index_len as f64 + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum StatKey {
    Seed(NodeId),
    Motif(CanonicalKey),
}

#[derive(Clone, Debug)]
struct Stat {
    visits: u64,
    value: f64,
    size: usize,
    graph: Graph,
    nodes: Vec<NodeId>,
    penalty: Option<f64>,
}

/// Visit bookkeeping of an MCTS run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MctsAccounting {
    /// Simulations whose walk ends at each size.
    pub allotted: BTreeMap<usize, u64>,
    /// Sum of visit counts over all states of each size (seeds are size 1).
    pub visits_by_size: BTreeMap<usize, u64>,
    /// Terminal visits recorded in each phase.
    pub terminal_by_phase: BTreeMap<usize, u64>,
}

/// Splits `simulations` over sizes `2..=k`; the remainder goes to the
/// largest sizes.
pub fn allot_simulations(simulations: usize, k: usize) -> BTreeMap<usize, u64> {
    let levels = k - 1;
    let base = simulations / levels;
    let extra = simulations % levels;
    (2..=k).map(|s| (s, (base + usize::from(s > k - extra)) as u64)).collect()
}

pub fn mine_mcts<E: Embedder + ?Sized, R: Rng + ?Sized>(
    miner: Miner<'_, E>,
    k: usize,
    config: &MctsConfig,
    rng: &mut R,
) -> Result<(MiningResult, MctsAccounting)> {
    check_k(k)?;
    if config.simulations == 0 || !(config.c > 0.0) || config.seed_pool == 0 {
        return Err(Error::InvalidArgument("simulations, c and seed_pool must be positive".into()));
    }
    let pool = usable_seeds(miner.target, &draw_seeds(miner.target, config.seed_pool, rng), k)?;
    let pool: Vec<NodeId> = pool.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    let mut stats: BTreeMap<StatKey, Stat> = BTreeMap::new();
    let mut accounting = MctsAccounting { allotted: allot_simulations(config.simulations, k), ..Default::default() };
    let mut root_visits = 0u64;
    let phases: Vec<(usize, u64)> = accounting.allotted.iter().map(|(&s, &n)| (s, n)).collect();
    for (size, sims) in phases {
        for _ in 0..sims {
            let seed_keys: Vec<StatKey> = pool.iter().map(|&s| StatKey::Seed(s)).collect();
            let pick = uct_select(&stats, &seed_keys, root_visits, config.c, rng);
            let seed = pool[pick];
            let mut nodes = vec![seed];
            let mut path = vec![StatKey::Seed(seed)];
            stats.entry(StatKey::Seed(seed)).or_insert_with(|| Stat {
                visits: 0,
                value: 0.0,
                size: 1,
                graph: motif_graph(miner.target, &[seed]),
                nodes: vec![seed],
                penalty: None,
            });
            while nodes.len() < size {
                let parent_visits = stats[path.last().expect("non-empty")].visits;
                let children: Vec<(Vec<NodeId>, Graph, CanonicalKey)> = frontier(miner.target, &nodes)
                    .into_iter()
                    .map(|v| {
                        let mut n = nodes.clone();
                        n.push(v);
                        let g = motif_graph(miner.target, &n);
                        let key = canonical_key(&g);
                        (n, g, key)
                    })
                    .collect();
                let keys: Vec<StatKey> = children.iter().map(|c| StatKey::Motif(c.2)).collect();
                let pick = uct_select(&stats, &keys, parent_visits, config.c, rng);
                let (n, g, key) = children.into_iter().nth(pick).expect("usable seed component");
                stats.entry(StatKey::Motif(key)).or_insert_with(|| Stat {
                    visits: 0,
                    value: 0.0,
                    size: n.len(),
                    graph: g,
                    nodes: n.clone(),
                    penalty: None,
                });
                path.push(StatKey::Motif(key));
                nodes = n;
            }
            let terminal = stats.get_mut(path.last().expect("non-empty")).expect("inserted");
            let m = match terminal.penalty {
                Some(m) => m,
                None => {
                    let m = miner.index.total_penalty(&miner.embedder.embed(&terminal.graph)?);
                    terminal.penalty = Some(m);
                    m
                }
            };
            let value = mcts_value(m, miner.index.len(), config.log_base);
            for key in &path {
                let s = stats.get_mut(key).expect("on path");
                s.visits += 1;
                s.value += value;
            }
            root_visits += 1;
            *accounting.terminal_by_phase.entry(size).or_default() += 1;
        }
    }
    for s in stats.values() {
        *accounting.visits_by_size.entry(s.size).or_default() += s.visits;
    }
    let missing: Vec<StatKey> = stats.iter().filter(|(_, s)| s.size >= 2 && s.penalty.is_none()).map(|(k, _)| *k).collect();
    let graphs: Vec<Graph> = missing.iter().map(|k| stats[k].graph.clone()).collect();
    for (k, e) in missing.iter().zip(miner.embedder.embed_batch(&graphs)?) {
        stats.get_mut(k).expect("present").penalty = Some(miner.index.total_penalty(&e));
    }
    let mut by_size: BTreeMap<usize, Vec<MinedMotif>> = BTreeMap::new();
    for (key, s) in &stats {
        if let StatKey::Motif(key) = key {
            by_size.entry(s.size).or_default().push(MinedMotif {
                graph: s.graph.clone(),
                nodes: s.nodes.clone(),
                key: *key,
                occurrences: s.visits,
                mean_penalty: s.penalty.expect("filled"),
            });
        }
    }
    for list in by_size.values_mut() {
        rank(list);
    }
    Ok((MiningResult { by_size }, accounting))
}

/// UCT choice among `children`: unvisited ones first (uniformly), otherwise
/// the maximum of `f/n + c sqrt(ln N / n)`, ties to the earlier child.
fn uct_select<R: Rng + ?Sized>(
    stats: &BTreeMap<StatKey, Stat>,
    children: &[StatKey],
    parent_visits: u64,
    c: f64,
    rng: &mut R,
) -> usize {
    let visits = |k: &StatKey| stats.get(k).map_or(0, |s| s.visits);
    let unvisited: Vec<usize> = (0..children.len()).filter(|&i| visits(&children[i]) == 0).collect();
    if !unvisited.is_empty() {
        return unvisited[rng.random_range(0..unvisited.len())];
    }
    let ln_parent = libm::log(parent_visits.max(1) as f64);
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, k) in children.iter().enumerate() {
        let s = &stats[k];
        let n = s.visits as f64;
        let score = s.value / n + c * libm::sqrt(ln_parent / n);
        if score > best.0 {
            best = (score, i);
        }
    }
    best.1
}

/// A motif class merged across anchors.
#[derive(Clone, Debug, PartialEq)]
pub struct UnanchoredMotif {
    pub graph: Graph,
    pub key: CanonicalKey,
    pub occurrences: u64,
    pub mean_penalty: f64,
    /// `(anchored key, occurrences)` of the merged anchored classes.
    pub per_anchor: Vec<(CanonicalKey, u64)>,
}

/// Merges anchored classes whose underlying graphs are isomorphic.
pub fn unanchored_view(list: &[MinedMotif]) -> Vec<UnanchoredMotif> {
    let mut out: Vec<(UnanchoredMotif, f64)> = Vec::new();
    for m in list {
        let g = m.graph.clone().without_anchor();
        let key = canonical_key(&g);
        let found = out
            .iter()
            .position(|(u, _)| u.key == key && (g.node_count() > CONFIRM_LIMIT || exact_isomorphic(&u.graph, &g)));
        let i = found.unwrap_or_else(|| {
            out.push((
                UnanchoredMotif { graph: g, key, occurrences: 0, mean_penalty: 0.0, per_anchor: Vec::new() },
                0.0,
            ));
            out.len() - 1
        });
        let (u, sum) = &mut out[i];
        u.occurrences += m.occurrences;
        *sum += m.mean_penalty * m.occurrences as f64;
        u.per_anchor.push((m.key, m.occurrences));
    }
    let mut list: Vec<UnanchoredMotif> = out
        .into_iter()
        .map(|(mut u, sum)| {
            u.mean_penalty = if u.occurrences == 0 { 0.0 } else { sum / u.occurrences as f64 };
            u
        })
        .collect();
    list.sort_by(|a, b| {
        b.occurrences
            .cmp(&a.occurrences)
            .then(a.mean_penalty.total_cmp(&b.mean_penalty))
            .then(a.key.digest.cmp(&b.key.digest))
    });
    list
}

/// One row of the mining report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub rank: usize,
    pub size: usize,
    pub canonical_key: CanonicalKey,
    pub occurrences: u64,
    pub total_penalty: f64,
    pub exact_anchored_freq: Option<u64>,
    pub exact_graph_freq: Option<u128>,
    /// Set when exact counting was skipped and `hard_estimate` stands in.
    pub estimated: bool,
    pub hard_estimate: Option<usize>,
}

/// Verifies up to `top` motifs per size: exact counts up to `verify_limit`
/// nodes (graph-level counting gives up after `graph_budget` search steps),
/// hard estimates beyond.
pub fn report<E: Embedder + ?Sized>(
    result: &MiningResult,
    miner: Miner<'_, E>,
    top: usize,
    verify_limit: usize,
    graph_budget: u64,
    threshold: f64,
) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for (&size, list) in &result.by_size {
        for (i, m) in list.iter().take(top).enumerate() {
            let mut row = ReportRow {
                rank: i + 1,
                size,
                canonical_key: m.key,
                occurrences: m.occurrences,
                total_penalty: m.mean_penalty,
                exact_anchored_freq: None,
                exact_graph_freq: None,
                estimated: false,
                hard_estimate: None,
            };
            if size <= verify_limit {
                row.exact_anchored_freq = Some(anchored_frequency(&m.graph, miner.target)?);
                let plain = m.graph.clone().without_anchor();
                row.exact_graph_freq = graph_level_frequency_with_limit(&plain, miner.target, graph_budget).ok();
            } else {
                row.estimated = true;
                let e = miner.embedder.embed(&m.graph)?;
                row.hard_estimate = Some(miner.index.hard_frequency_estimate(&e, threshold));
            }
            rows.push(row);
        }
    }
    Ok(rows)
}
