//! Synthetic graphs: four random families with fixed parameter priors,
//! balanced training pairs, planted-motif benchmarks and coverage statistics.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Beta, Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, NodeId};
use crate::iso::AnchoredMatcher;
use crate::rng::{stream, SeededRng};
use crate::sample::grow_from;
use crate::{Error, Result};

/// Random graph family. `Mixed` picks one of the other four uniformly per graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    #[serde(alias = "er")]
    ErdosRenyi,
    #[serde(alias = "ba")]
    ExtendedBarabasiAlbert,
    #[serde(alias = "plc")]
    PowerLawCluster,
    #[serde(alias = "ws")]
    WattsStrogatz,
    Mixed,
}

impl Family {
    pub const CONCRETE: [Family; 4] = [
        Family::ErdosRenyi,
        Family::ExtendedBarabasiAlbert,
        Family::PowerLawCluster,
        Family::WattsStrogatz,
    ];

    /// Accepts the long snake-case names and the short forms `er`, `ba`, `plc`, `ws`.
    pub fn parse(s: &str) -> Option<Family> {
        Some(match s {
            "er" | "erdos_renyi" => Family::ErdosRenyi,
            "ba" | "extended_barabasi_albert" => Family::ExtendedBarabasiAlbert,
            "plc" | "power_law_cluster" => Family::PowerLawCluster,
            "ws" | "watts_strogatz" => Family::WattsStrogatz,
            "mixed" => Family::Mixed,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::ErdosRenyi => "erdos_renyi",
            Family::ExtendedBarabasiAlbert => "extended_barabasi_albert",
            Family::PowerLawCluster => "power_law_cluster",
            Family::WattsStrogatz => "watts_strogatz",
            Family::Mixed => "mixed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub family: Family,
    /// Inclusive node-count interval.
    pub size_range: (usize, usize),
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(family: Family, size_range: (usize, usize), seed: u64) -> Result<Self> {
        let (lo, hi) = size_range;
        if lo < 2 || hi < lo {
            return Err(Error::InvalidArgument(alloc::format!(
                "size range {lo}..{hi} must satisfy 2 <= lo <= hi"
            )));
        }
        Ok(GeneratorConfig { family, size_range, seed })
    }

    /// Deterministic dataset: graph `i` comes from its own seed stream.
    pub fn dataset(&self, count: usize) -> Result<Vec<Graph>> {
        (0..count)
            .map(|i| {
                let mut rng = stream(self.seed, i as u64);
                let n = rng.random_range(self.size_range.0..=self.size_range.1);
                generate(self, n, &mut rng)
            })
            .collect()
    }
}

/// Concrete generator parameters, either drawn from the priors or forced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeneratorParams {
    ErdosRenyi { p: f64 },
    ExtendedBarabasiAlbert { m: usize, p: f64, q: f64 },
    PowerLawCluster { m: usize, p: f64 },
    WattsStrogatz { k: usize, p: f64 },
}

fn log2(x: f64) -> f64 {
    libm::log2(x)
}

/// The Beta(1.3, 1.3 n / log2 n - 1.3) density prior shared by ER and WS.
pub fn density_prior(n: usize) -> Beta<f64> {
    let n = n as f64;
    Beta::new(1.3, 1.3 * n / log2(n) - 1.3).expect("positive shape for n >= 2")
}

/// Exp(rate 20) capped at 0.2.
fn capped_exp<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let d = Exp::new(20.0).expect("positive rate");
    let x: f64 = d.sample(rng);
    x.min(0.2)
}

fn attachment_count<R: Rng + ?Sized>(n: usize, rng: &mut R) -> usize {
    let hi = (libm::floor(2.0 * log2(n as f64)) as usize).clamp(1, n - 1);
    rng.random_range(1..=hi)
}

/// Draws parameters for `family` at size `n` from the priors.
pub fn sample_params<R: Rng + ?Sized>(family: Family, n: usize, rng: &mut R) -> GeneratorParams {
    match family {
        Family::Mixed => {
            let f = *Family::CONCRETE.choose(rng).expect("non-empty");
            sample_params(f, n, rng)
        }
        Family::ErdosRenyi => GeneratorParams::ErdosRenyi { p: density_prior(n).sample(rng) },
        Family::ExtendedBarabasiAlbert => {
            let m = attachment_count(n, rng);
            let p = capped_exp(rng);
            let q = capped_exp(rng);
            GeneratorParams::ExtendedBarabasiAlbert { m, p, q }
        }
        Family::PowerLawCluster => {
            let m = attachment_count(n, rng);
            GeneratorParams::PowerLawCluster { m, p: rng.random_range(0.0..0.5) }
        }
        Family::WattsStrogatz => {
            let frac: f64 = density_prior(n).sample(rng);
            let k = (libm::round(n as f64 * frac) as usize).max(2).min(n - 1);
            let p = Beta::new(2.0, 2.0).expect("valid").sample(rng);
            GeneratorParams::WattsStrogatz { k, p }
        }
    }
}

/// One graph of `n` nodes from `config.family` with prior-drawn parameters.
pub fn generate<R: Rng + ?Sized>(config: &GeneratorConfig, n: usize, rng: &mut R) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidArgument(alloc::format!("graph size {n} < 2")));
    }
    let params = sample_params(config.family, n, rng);
    Ok(generate_with(params, n, rng))
}

/// One graph of `n >= 2` nodes with the given parameters.
pub fn generate_with<R: Rng + ?Sized>(params: GeneratorParams, n: usize, rng: &mut R) -> Graph {
    match params {
        GeneratorParams::ErdosRenyi { p } => erdos_renyi(n, p, rng),
        GeneratorParams::ExtendedBarabasiAlbert { m, p, q } => extended_barabasi_albert(n, m, p, q, rng),
        GeneratorParams::PowerLawCluster { m, p } => power_law_cluster(n, m, p, rng),
        GeneratorParams::WattsStrogatz { k, p } => watts_strogatz(n, k, p, rng),
    }
}

fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut g = Graph::empty(n);
    for u in 0..n as NodeId {
        for v in u + 1..n as NodeId {
            if rng.random::<f64>() < p {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Picks from `pool` uniformly, skipping entries rejected by `allowed`.
/// Returns `None` when no entry is allowed.
fn pick_from<R: Rng + ?Sized>(pool: &[NodeId], rng: &mut R, allowed: impl Fn(NodeId) -> bool) -> Option<NodeId> {
    let ok: Vec<NodeId> = pool.iter().copied().filter(|&v| allowed(v)).collect();
    ok.choose(rng).copied()
}

/// Albert–Barabási extended model: each step adds `m` edges (prob `p`),
/// rewires `m` edges (prob `q`) or adds a node with `m` preferential links.
/// The preference pool holds each node once plus once per incident edge end.
fn extended_barabasi_albert<R: Rng + ?Sized>(n: usize, m: usize, p: f64, q: f64, rng: &mut R) -> Graph {
    let m = m.clamp(1, n - 1);
    let mut g = Graph::empty(m);
    let mut pool: Vec<NodeId> = (0..m as NodeId).collect();
    let max_edges = n * (n - 1) / 2;
    while g.node_count() < n {
        let a: f64 = rng.random();
        if a < p && g.edge_count() + m <= max_edges {
            for _ in 0..m {
                let cur = g.node_count() as NodeId;
                let open: Vec<NodeId> = (0..cur).filter(|&u| g.degree(u) + 1 < cur as usize).collect();
                let Some(&src) = open.choose(rng) else { break };
                let Some(dst) = pick_from(&pool, rng, |v| v != src && !g.has_edge(src, v)) else { break };
                g.add_edge(src, dst);
                pool.push(src);
                pool.push(dst);
            }
        } else if a < p + q && g.edge_count() > 0 {
            for _ in 0..m {
                let cur = g.node_count() as NodeId;
                let open: Vec<NodeId> = (0..cur)
                    .filter(|&u| g.degree(u) > 0 && g.degree(u) + 1 < cur as usize)
                    .collect();
                let Some(&src) = open.choose(rng) else { break };
                let old = *g.neighbors(src).choose(rng).expect("degree > 0");
                let Some(new) = pick_from(&pool, rng, |v| v != src && !g.has_edge(src, v)) else { break };
                g.remove_edge(src, old);
                g.add_edge(src, new);
                if let Some(i) = pool.iter().position(|&v| v == old) {
                    pool.swap_remove(i);
                }
                pool.push(new);
            }
        } else {
            let new = g.add_node();
            let mut targets = Vec::with_capacity(m);
            while targets.len() < m.min(new as usize) {
                let t = *pool.choose(rng).expect("non-empty pool");
                if !targets.contains(&t) {
                    targets.push(t);
                }
            }
            for &t in &targets {
                g.add_edge(new, t);
            }
            pool.extend_from_slice(&targets);
            pool.extend(core::iter::repeat_n(new, targets.len() + 1));
        }
    }
    g
}

/// Holme–Kim growth: preferential attachment where each further link closes
/// a triangle with probability `p`.
fn power_law_cluster<R: Rng + ?Sized>(n: usize, m: usize, p: f64, rng: &mut R) -> Graph {
    let m = m.clamp(1, n - 1);
    let mut g = Graph::empty(n);
    let mut pool: Vec<NodeId> = (0..m as NodeId).collect();
    let first = m as NodeId;
    for t in 0..m as NodeId {
        g.add_edge(first, t);
    }
    pool.extend(0..m as NodeId);
    pool.extend(core::iter::repeat_n(first, m));
    for src in first + 1..n as NodeId {
        let mut target = *pool.choose(rng).expect("non-empty pool");
        g.add_edge(src, target);
        let mut added = vec![target];
        while added.len() < m {
            if rng.random::<f64>() < p {
                let closing: Vec<NodeId> = g
                    .neighbors(target)
                    .iter()
                    .copied()
                    .filter(|&v| v != src && !g.has_edge(src, v))
                    .collect();
                if let Some(&v) = closing.choose(rng) {
                    g.add_edge(src, v);
                    added.push(v);
                    continue;
                }
            }
            let t = *pool.choose(rng).expect("non-empty pool");
            if t != src && !g.has_edge(src, t) {
                g.add_edge(src, t);
                added.push(t);
                target = t;
            } else if pool.iter().all(|&v| v == src || g.has_edge(src, v)) {
                break;
            }
        }
        pool.extend_from_slice(&added);
        pool.extend(core::iter::repeat_n(src, added.len()));
    }
    g
}

/// Ring lattice with `k / 2` neighbours per side, each lattice edge rewired
/// to a uniform endpoint with probability `p`.
fn watts_strogatz<R: Rng + ?Sized>(n: usize, k: usize, p: f64, rng: &mut R) -> Graph {
    let mut g = Graph::empty(n);
    let half = (k / 2).max(1);
    let nn = n as NodeId;
    for j in 1..=half as NodeId {
        for u in 0..nn {
            g.add_edge(u, (u + j) % nn);
        }
    }
    for j in 1..=half as NodeId {
        for u in 0..nn {
            if rng.random::<f64>() < p {
                let v = (u + j) % nn;
                if !g.has_edge(u, v) || g.degree(u) + 1 >= n {
                    continue;
                }
                let w = loop {
                    let w = rng.random_range(0..nn);
                    if w != u && !g.has_edge(u, w) {
                        break w;
                    }
                };
                g.remove_edge(u, v);
                g.add_edge(u, w);
            }
        }
    }
    g
}

/// A connected anchored graph of exactly `n` nodes: generate a graph of that
/// size and grow from a random node until the grown set covers it.
pub fn connected_graph<R: Rng + ?Sized>(family: Family, n: usize, rng: &mut R) -> Result<Graph> {
    const RETRIES: usize = 1000;
    let config = GeneratorConfig { family, size_range: (n, n), seed: 0 };
    for _ in 0..RETRIES {
        let g = generate(&config, n, rng)?;
        if !g.is_connected() {
            continue;
        }
        let anchor = rng.random_range(0..n as NodeId);
        return Ok(grow_from(&g, anchor, n, rng).graph);
    }
    Err(Error::RetriesExhausted(RETRIES))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainingPair {
    pub big: Graph,
    pub small: Graph,
    pub label: Label,
}

/// Size bounds of training pairs.
pub const BIG_SIZE: (usize, usize) = (6, 29);
pub const SMALL_MIN: usize = 5;
pub const MAX_ADDED_EDGES: usize = 5;
/// Search-step budget when confirming that a negative is not a subgraph.
pub const NEGATIVE_CHECK_LIMIT: u64 = 200_000;

/// Emits training pairs with strictly alternating labels, positive first.
///
/// Negatives are confirmed with the exact matcher; a candidate that turns out
/// to be a subgraph, or cannot be decided within [`NEGATIVE_CHECK_LIMIT`]
/// steps, is discarded and redrawn.
#[derive(Clone, Debug)]
pub struct PairSampler {
    family: Family,
    next_positive: bool,
}

impl Default for PairSampler {
    fn default() -> Self {
        PairSampler::new(Family::Mixed)
    }
}

impl PairSampler {
    pub fn new(family: Family) -> Self {
        PairSampler { family, next_positive: true }
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<TrainingPair> {
        let positive = self.next_positive;
        self.next_positive = !positive;
        if positive {
            let big = connected_graph(self.family, rng.random_range(BIG_SIZE.0..=BIG_SIZE.1), rng)?;
            let small = grown_subgraph(&big, rng);
            return Ok(TrainingPair { big, small, label: Label::Positive });
        }
        loop {
            let big = connected_graph(self.family, rng.random_range(BIG_SIZE.0..=BIG_SIZE.1), rng)?;
            let small = if rng.random::<bool>() {
                let mut small = grown_subgraph(&big, rng);
                if add_random_edges(&mut small, rng) == 0 {
                    continue;
                }
                small
            } else {
                connected_graph(self.family, rng.random_range(SMALL_MIN..big.node_count()), rng)?
            };
            let matcher = AnchoredMatcher::new(&small)?;
            let anchor = big.require_anchor()?;
            if let Ok(None) = matcher.find_with_limit(&big, anchor, NEGATIVE_CHECK_LIMIT) {
                return Ok(TrainingPair { big, small, label: Label::Negative });
            }
        }
    }

    pub fn batch<R: Rng + ?Sized>(&mut self, size: usize, rng: &mut R) -> Result<Vec<TrainingPair>> {
        (0..size).map(|_| self.sample(rng)).collect()
    }
}

/// Weighted-growth subgraph of `big` from its anchor, size Unif{5..|big|-1}.
fn grown_subgraph<R: Rng + ?Sized>(big: &Graph, rng: &mut R) -> Graph {
    let size = rng.random_range(SMALL_MIN..big.node_count());
    let anchor = big.anchor().expect("anchored");
    grow_from(big, anchor, size, rng).graph
}

/// Turns Unif{1..5} random non-edges into edges; returns how many were added.
fn add_random_edges<R: Rng + ?Sized>(g: &mut Graph, rng: &mut R) -> usize {
    let want = rng.random_range(1..=MAX_ADDED_EDGES);
    let n = g.node_count() as NodeId;
    let mut non_edges: Vec<(NodeId, NodeId)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !g.has_edge(u, v))
        .collect();
    let mut added = 0;
    while added < want && !non_edges.is_empty() {
        let i = rng.random_range(0..non_edges.len());
        let (u, v) = non_edges.swap_remove(i);
        g.add_edge(u, v);
        added += 1;
    }
    added
}

/// Reserved stream for the frozen held-out pair set.
pub const HOLDOUT_STREAM: u64 = u64::MAX;
/// Reserved stream for the threshold-calibration pair set.
pub const VALIDATION_STREAM: u64 = u64::MAX - 1;

/// Training batch `index` of a run seeded with `seed`: balanced, positive first.
pub fn training_batch(seed: u64, index: u64, size: usize, family: Family) -> Result<Vec<TrainingPair>> {
    let mut rng: SeededRng = stream(seed, index);
    PairSampler::new(family).batch(size, &mut rng)
}

/// The held-out pair set, drawn from a stream never used for training.
pub fn holdout_pairs(seed: u64, count: usize, family: Family) -> Result<Vec<TrainingPair>> {
    let mut rng: SeededRng = stream(seed, HOLDOUT_STREAM);
    PairSampler::new(family).batch(count, &mut rng)
}

/// The calibration pair set, disjoint in stream from training and holdout.
pub fn validation_pairs(seed: u64, count: usize, family: Family) -> Result<Vec<TrainingPair>> {
    let mut rng: SeededRng = stream(seed, VALIDATION_STREAM);
    PairSampler::new(family).batch(count, &mut rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlantConfig {
    pub motif_size: usize,
    pub base_size: usize,
    pub graph_count: usize,
    /// Edges joining the motif copy to the base graph.
    pub attach_edges: usize,
    pub family: Family,
}

impl Default for PlantConfig {
    fn default() -> Self {
        PlantConfig {
            motif_size: 10,
            base_size: 10,
            graph_count: 1000,
            attach_edges: 1,
            family: Family::Mixed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedDataset {
    pub graphs: Vec<Graph>,
    /// The planted motif (unanchored).
    pub motif: Graph,
}

/// Base graphs of `base_size` nodes, each with a copy of one random connected
/// motif attached by `attach_edges` random motif-to-base edges. Base nodes
/// come first, motif nodes occupy ids `base_size..`.
pub fn plant_motif_dataset<R: Rng + ?Sized>(config: &PlantConfig, rng: &mut R) -> Result<PlantedDataset> {
    const RETRIES: usize = 100;
    if config.motif_size < 3 || config.base_size < 3 {
        return Err(Error::InvalidArgument("motif and base sizes must be at least 3".into()));
    }
    if config.attach_edges == 0 || config.attach_edges > config.motif_size * config.base_size {
        return Err(Error::InvalidArgument("attach_edges out of range".into()));
    }
    let gen = GeneratorConfig { family: config.family, size_range: (config.motif_size, config.motif_size), seed: 0 };
    let mut motif = None;
    for _ in 0..RETRIES {
        let q = generate(&gen, config.motif_size, rng)?;
        if q.is_connected() {
            motif = Some(q);
            break;
        }
    }
    let motif = motif.ok_or(Error::RetriesExhausted(RETRIES))?;
    let base_gen = GeneratorConfig { size_range: (config.base_size, config.base_size), ..gen };
    let mut graphs = Vec::with_capacity(config.graph_count);
    for _ in 0..config.graph_count {
        let base = generate(&base_gen, config.base_size, rng)?;
        let (mut g, offsets) = Graph::disjoint_union(&[base, motif.clone()]);
        let mut attached = 0;
        while attached < config.attach_edges {
            let m = (offsets[1] + rng.random_range(0..config.motif_size)) as NodeId;
            let b = rng.random_range(0..config.base_size) as NodeId;
            if g.add_edge(m, b) {
                attached += 1;
            }
        }
        graphs.push(g);
    }
    Ok(PlantedDataset { graphs, motif })
}

/// Coverage statistics of one graph. Diameter and mean path length refer to
/// the largest connected component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub density: f64,
    pub diameter: u32,
    pub avg_path: f64,
    pub clustering: f64,
}

pub fn graph_statistics(g: &Graph) -> GraphStats {
    let n = g.node_count();
    let density = if n < 2 {
        0.0
    } else {
        2.0 * g.edge_count() as f64 / (n * (n - 1)) as f64
    };
    let (comp, count) = g.components();
    let mut sizes = vec![0usize; count];
    for &c in &comp {
        sizes[c as usize] += 1;
    }
    let largest = (0..count).max_by_key(|&c| (sizes[c], core::cmp::Reverse(c))).unwrap_or(0);
    let members: Vec<NodeId> = g.nodes().filter(|&u| comp[u as usize] as usize == largest).collect();
    let mut diameter = 0;
    let mut total = 0u64;
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for &s in &members {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        dist[s as usize] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = dist[u as usize] + 1;
                    diameter = diameter.max(dist[v as usize]);
                    total += dist[v as usize] as u64;
                    queue.push_back(v);
                }
            }
        }
    }
    let pairs = members.len() * members.len().saturating_sub(1);
    let avg_path = if pairs == 0 { 0.0 } else { total as f64 / pairs as f64 };
    let clustering = if n == 0 {
        0.0
    } else {
        g.nodes().map(|u| local_clustering(g, u)).sum::<f64>() / n as f64
    };
    GraphStats { density, diameter, avg_path, clustering }
}

fn local_clustering(g: &Graph, u: NodeId) -> f64 {
    let nb = g.neighbors(u);
    let d = nb.len();
    if d < 2 {
        return 0.0;
    }
    let mut links = 0;
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if g.has_edge(a, b) {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (d * (d - 1)) as f64
}

pub fn dataset_statistics(graphs: &[Graph]) -> Vec<GraphStats> {
    graphs.iter().map(graph_statistics).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::graph_level_frequency;
    use crate::iso::is_anchored_subgraph;
    use crate::rng::seeded;

    #[test]
    fn forced_er_extremes() {
        let mut rng = seeded(0);
        let empty = generate_with(GeneratorParams::ErdosRenyi { p: 0.0 }, 7, &mut rng);
        assert_eq!(empty.edge_count(), 0);
        let k4 = generate_with(GeneratorParams::ErdosRenyi { p: 1.0 }, 4, &mut rng);
        assert_eq!(k4, Graph::complete(4));
    }

    #[test]
    fn rejects_tiny_graphs() {
        let cfg = GeneratorConfig { family: Family::ErdosRenyi, size_range: (2, 5), seed: 0 };
        assert!(generate(&cfg, 1, &mut seeded(0)).is_err());
        assert!(GeneratorConfig::new(Family::Mixed, (1, 4), 0).is_err());
    }

    #[test]
    fn every_family_emits_simple_graphs_of_requested_size() {
        let mut rng = seeded(3);
        for family in Family::CONCRETE {
            let cfg = GeneratorConfig { family, size_range: (2, 40), seed: 0 };
            for n in 2..40 {
                for _ in 0..5 {
                    let g = generate(&cfg, n, &mut rng).unwrap();
                    assert_eq!(g.node_count(), n);
                    for u in g.nodes() {
                        assert!(!g.neighbors(u).contains(&u));
                        for &v in g.neighbors(u) {
                            assert!(g.has_edge(v, u));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn families_have_their_character() {
        let mut rng = seeded(11);
        let ws = generate_with(GeneratorParams::WattsStrogatz { k: 4, p: 0.0 }, 10, &mut rng);
        assert!(ws.nodes().all(|u| ws.degree(u) == 4));
        let ba = generate_with(GeneratorParams::ExtendedBarabasiAlbert { m: 2, p: 0.0, q: 0.0 }, 30, &mut rng);
        assert_eq!(ba.edge_count(), 2 * 28 - 1 + 1);
        let plc = generate_with(GeneratorParams::PowerLawCluster { m: 3, p: 1.0 }, 30, &mut rng);
        assert_eq!(plc.edge_count(), 3 * 27);
        assert!(graph_statistics(&plc).clustering > 0.3);
    }

    #[test]
    fn dataset_is_deterministic() {
        let cfg = GeneratorConfig::new(Family::Mixed, (5, 20), 42).unwrap();
        assert_eq!(cfg.dataset(30).unwrap(), cfg.dataset(30).unwrap());
        let other = GeneratorConfig { seed: 43, ..cfg };
        assert_ne!(cfg.dataset(30).unwrap(), other.dataset(30).unwrap());
    }

    fn mean_within_3se(samples: &[f64], mean: f64) -> bool {
        let n = samples.len() as f64;
        let m = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m - mean).abs() <= 3.0 * libm::sqrt(var / n)
    }

    #[test]
    fn prior_means_match_beta() {
        let mut rng = seeded(5);
        let n = 20;
        let mut er = Vec::new();
        let mut ws = Vec::new();
        for _ in 0..100_000 {
            if let GeneratorParams::ErdosRenyi { p } = sample_params(Family::ErdosRenyi, n, &mut rng) {
                er.push(p);
            }
            if let GeneratorParams::WattsStrogatz { p, .. } = sample_params(Family::WattsStrogatz, n, &mut rng) {
                ws.push(p);
            }
        }
        let b = 1.3 * n as f64 / libm::log2(n as f64) - 1.3;
        assert!(mean_within_3se(&er, 1.3 / (1.3 + b)));
        assert!(mean_within_3se(&ws, 0.5));
    }

    #[test]
    fn exp_prior_is_capped() {
        let mut rng = seeded(6);
        for _ in 0..10_000 {
            if let GeneratorParams::ExtendedBarabasiAlbert { p, q, m } =
                sample_params(Family::ExtendedBarabasiAlbert, 16, &mut rng)
            {
                assert!((0.0..=0.2).contains(&p) && (0.0..=0.2).contains(&q));
                assert!((1..=8).contains(&m));
            }
        }
    }

    #[test]
    fn pairs_alternate_and_respect_sizes() {
        let mut rng = seeded(8);
        let mut sampler = PairSampler::default();
        let pairs = sampler.batch(400, &mut rng).unwrap();
        let positives = pairs.iter().filter(|p| p.label == Label::Positive).count();
        assert_eq!(positives, 200);
        for (i, p) in pairs.iter().enumerate() {
            assert_eq!(p.label == Label::Positive, i % 2 == 0);
            let (a, b) = (p.big.node_count(), p.small.node_count());
            assert!(5 <= b && b < a && a <= 29, "{b} {a}");
            assert!(p.big.is_connected() && p.small.is_connected());
            let sub = is_anchored_subgraph(&p.small, &p.big).unwrap();
            assert_eq!(sub.is_some(), p.label == Label::Positive);
        }
    }

    #[test]
    fn batches_are_reproducible() {
        let a = training_batch(1, 7, 16, Family::Mixed).unwrap();
        let b = training_batch(1, 7, 16, Family::Mixed).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, training_batch(1, 8, 16, Family::Mixed).unwrap());
    }

    #[test]
    fn planted_dataset_arithmetic() {
        let mut rng = seeded(10);
        let cfg = PlantConfig { motif_size: 5, base_size: 7, graph_count: 20, ..PlantConfig::default() };
        let data = plant_motif_dataset(&cfg, &mut rng).unwrap();
        assert!(data.motif.is_connected());
        assert_eq!(data.motif.node_count(), 5);
        for g in &data.graphs {
            assert_eq!(g.node_count(), 12);
            let base_edges = g.edges().filter(|&(u, v)| u < 7 && v < 7).count();
            assert_eq!(g.edge_count(), base_edges + data.motif.edge_count() + 1);
        }
        let (union, _) = Graph::disjoint_union(&data.graphs);
        assert!(graph_level_frequency(&data.motif, &union).unwrap() >= 20);
    }

    #[test]
    fn statistics_examples() {
        let tri = graph_statistics(&Graph::complete(3));
        assert_eq!((tri.density, tri.diameter, tri.clustering), (1.0, 1, 1.0));
        let p4 = graph_statistics(&Graph::path(4));
        assert_eq!((p4.diameter, p4.clustering), (3, 0.0));
        assert_eq!(graph_statistics(&Graph::complete(4)).avg_path, 1.0);
    }
}
