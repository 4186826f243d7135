//! Experiment drivers: mining runs, small-motif hit rates, planted-motif
//! recovery, frequency comparisons and encoder validation. Every driver
//! writes its artifacts under one run directory with a `manifest.json`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use motif_forge_core::baselines::{enumerate_exact, mine_mfinder, MotifTable};
use motif_forge_core::count::{anchored_frequency, graph_level_frequency_with_limit};
use motif_forge_core::encoder::{train, validate, CurvePoint, EncoderModel, EvalSets, TrainConfig};
use motif_forge_core::iso::exact_isomorphic;
use motif_forge_core::metrics::{hit_rate, mean, median};
use motif_forge_core::miner::{
    build_index, mine_mcts, report, unanchored_view, LogBase, MctsAccounting, MctsConfig, Miner, MiningResult,
    NeighborhoodIndex, ReportRow,
};
use motif_forge_core::rng::{mix64, stream};
use motif_forge_core::synth::{
    holdout_pairs, plant_motif_dataset, training_batch, validation_pairs, Family, GeneratorConfig, PlantConfig,
};
use motif_forge_core::Graph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{write_file, write_graph};
use crate::parallel::{self, ParallelEmbedder};
use crate::report::{mining_csv, motif_table_csv, num, write_json, Csv};

/// Step budget for each graph-level count in reports.
pub const GRAPH_COUNT_BUDGET: u64 = 20_000_000;

/// Trains a fresh model: batches, validation and holdout pairs all derive
/// from `cfg.seed`.
pub fn train_model(cfg: &TrainConfig, on_row: impl FnMut(&CurvePoint)) -> Result<(EncoderModel, Vec<CurvePoint>)> {
    let validation = validation_pairs(cfg.seed, cfg.validation_size, cfg.family)?;
    let holdout = holdout_pairs(cfg.seed, cfg.holdout_size, cfg.family)?;
    let mut model = EncoderModel::new(cfg.encoder, cfg.seed)?;
    let eval = EvalSets { validation: &validation, holdout: &holdout };
    let curve = train(&mut model, cfg, |i| training_batch(cfg.seed, i, cfg.batch_size, cfg.family), &eval, on_row)?;
    Ok((model, curve))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    Greedy,
    Beam,
    Mcts,
}

impl Strategy {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "greedy" => Some(Strategy::Greedy),
            "beam" => Some(Strategy::Beam),
            "mcts" => Some(Strategy::Mcts),
            _ => None,
        }
    }
}

/// Parameters of one SPMiner search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MineConfig {
    pub strategy: Strategy,
    pub k: usize,
    pub seeds: usize,
    pub simulations: usize,
    pub beam_width: usize,
    pub c: f64,
    pub seed_pool: usize,
    pub log_base: LogBase,
    pub index_count: usize,
    pub size_range: (usize, usize),
    pub rng_seed: u64,
    pub verify_limit: usize,
    pub top: usize,
}

impl Default for MineConfig {
    fn default() -> Self {
        let mcts = MctsConfig::default();
        MineConfig {
            strategy: Strategy::Greedy,
            k: 5,
            seeds: 1000,
            simulations: mcts.simulations,
            beam_width: 5,
            c: mcts.c,
            seed_pool: mcts.seed_pool,
            log_base: mcts.log_base,
            index_count: 10_000,
            size_range: (20, 29),
            rng_seed: 0,
            verify_limit: 6,
            top: 10,
        }
    }
}

impl MineConfig {
    pub fn mcts(&self) -> MctsConfig {
        MctsConfig { simulations: self.simulations, c: self.c, seed_pool: self.seed_pool, log_base: self.log_base }
    }
}

pub struct SearchOutcome {
    pub index: NeighborhoodIndex,
    pub result: MiningResult,
    pub accounting: Option<MctsAccounting>,
}

/// Builds the index (stream 0 of `rng_seed`) and runs the configured
/// strategy (stream 1).
pub fn spminer(target: &Graph, model: &EncoderModel, cfg: &MineConfig) -> Result<SearchOutcome> {
    if target.node_count() == 0 {
        return Err(Error::Usage("target graph is empty".into()));
    }
    let embedder = ParallelEmbedder(model);
    let index = build_index(target, &embedder, cfg.index_count, cfg.size_range, &mut stream(cfg.rng_seed, 0))?;
    if index.undersized_target {
        eprintln!("warning: target has fewer nodes than the smallest neighborhood size {}", cfg.size_range.0);
    }
    let miner = Miner::new(target, &embedder, &index);
    let mut rng = stream(cfg.rng_seed, 1);
    let (result, accounting) = match cfg.strategy {
        Strategy::Greedy => (parallel::mine_greedy(miner, cfg.k, cfg.seeds, &mut rng)?, None),
        Strategy::Beam => (parallel::mine_beam(miner, cfg.k, cfg.beam_width, cfg.seeds, &mut rng)?, None),
        Strategy::Mcts => {
            let (r, a) = mine_mcts(miner, cfg.k, &cfg.mcts(), &mut rng)?;
            (r, Some(a))
        }
    };
    Ok(SearchOutcome { index, result, accounting })
}

#[derive(Serialize)]
struct StageRecord {
    name: String,
    status: &'static str,
    outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    config: &'a C,
    stages: &'a [StageRecord],
    timings: Option<&'static str>,
}

/// A run directory under construction.
pub struct Run {
    out: PathBuf,
    command: String,
    seed: u64,
    stages: Vec<StageRecord>,
    timings: Option<Vec<(String, f64)>>,
}

impl Run {
    /// With `record_timings`, wall-clock seconds per stage go to
    /// `timings.json`; everything else is deterministic.
    pub fn new(out: &Path, command: &str, seed: u64, record_timings: bool) -> Result<Self> {
        std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        Ok(Run {
            out: out.to_path_buf(),
            command: command.into(),
            seed,
            stages: Vec::new(),
            timings: record_timings.then(Vec::new),
        })
    }

    pub fn out(&self) -> &Path {
        &self.out
    }

    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce(&mut Outputs) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let mut outputs = Outputs { root: self.out.clone(), files: Vec::new() };
        let r = f(&mut outputs);
        if let Some(t) = &mut self.timings {
            t.push((name.into(), start.elapsed().as_secs_f64()));
        }
        self.stages.push(StageRecord {
            name: name.into(),
            status: if r.is_ok() { "ok" } else { "failed" },
            outputs: outputs.files,
            error: r.as_ref().err().map(ToString::to_string),
        });
        r
    }

    pub fn finish<C: Serialize>(self, config: &C) -> Result<()> {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: &self.command,
            seed: self.seed,
            config,
            stages: &self.stages,
            timings: self.timings.as_ref().map(|_| "timings.json"),
        };
        write_json(&self.out.join("manifest.json"), &manifest)?;
        if let Some(t) = &self.timings {
            let map: serde_json::Map<String, serde_json::Value> =
                t.iter().map(|(k, v)| (k.clone(), serde_json::json!(v))).collect();
            write_json(&self.out.join("timings.json"), &map)?;
        }
        Ok(())
    }

    /// Finishes the manifest, then returns `r`.
    pub fn conclude<C: Serialize, T>(self, config: &C, r: Result<T>) -> Result<T> {
        self.finish(config)?;
        r
    }
}

/// Files written by a stage, recorded relative to the run directory.
pub struct Outputs {
    root: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    pub fn path(&mut self, rel: &str) -> PathBuf {
        self.files.push(rel.into());
        self.root.join(rel)
    }

    pub fn csv(&mut self, rel: &str, csv: Csv) -> Result<()> {
        let p = self.path(rel);
        csv.write(&p)
    }

    pub fn graph(&mut self, rel: &str, g: &Graph) -> Result<()> {
        let p = self.path(rel);
        write_graph(&p, g)
    }

    pub fn text(&mut self, rel: &str, text: &str) -> Result<()> {
        let p = self.path(rel);
        write_file(&p, text)
    }
}

/// Mines `target`, verifies the top motifs and writes `report.csv` and
/// `motifs/`.
pub fn mine_into(run: &mut Run, target: &Graph, model: &EncoderModel, cfg: &MineConfig) -> Result<Vec<ReportRow>> {
    let outcome = run.stage("search", |_| spminer(target, model, cfg))?;
    run.stage("report", |out| {
        let embedder = ParallelEmbedder(model);
        let miner = Miner::new(target, &embedder, &outcome.index);
        let rows = report(&outcome.result, miner, cfg.top, cfg.verify_limit, GRAPH_COUNT_BUDGET, model.threshold)?;
        out.csv("report.csv", mining_csv(&rows))?;
        for (size, list) in &outcome.result.by_size {
            for (i, m) in list.iter().take(cfg.top).enumerate() {
                out.graph(&format!("motifs/size{size:02}_rank{:02}.edgelist", i + 1), &m.graph)?;
            }
        }
        if let Some(acc) = &outcome.accounting {
            write_json(&out.path("mcts_accounting.json"), &accounting_json(acc))?;
        }
        Ok(rows)
    })
}

fn accounting_json(acc: &MctsAccounting) -> serde_json::Value {
    serde_json::json!({
        "allotted": acc.allotted,
        "visits_by_size": acc.visits_by_size,
        "terminal_by_phase": acc.terminal_by_phase,
    })
}

/// A generated target: the disjoint union of `graphs` family graphs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub family: Family,
    pub graphs: usize,
    pub size_range: (usize, usize),
    pub seed: u64,
}

impl TargetSpec {
    pub fn build(&self) -> Result<Graph> {
        let graphs = GeneratorConfig::new(self.family, self.size_range, self.seed)?.dataset(self.graphs)?;
        Ok(Graph::disjoint_union(&graphs).0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmallMotifsConfig {
    pub target: TargetSpec,
    pub sizes: Vec<usize>,
    pub mine: MineConfig,
    /// MFinder samples; defaults to the SPMiner seed count.
    pub mfinder_samples: Option<usize>,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodScore {
    pub method: String,
    pub size: usize,
    pub hit_rate: f64,
    /// Exact anchored frequencies of the top-ranked motifs.
    pub frequencies: Vec<u64>,
    pub truth_max: u64,
}

impl MethodScore {
    pub fn median(&self) -> f64 {
        median(&self.frequencies.iter().map(|&f| f as f64).collect::<Vec<_>>())
    }

    pub fn mean(&self) -> f64 {
        mean(&self.frequencies.iter().map(|&f| f as f64).collect::<Vec<_>>())
    }
}

fn frequencies(graphs: &[Graph], target: &Graph) -> Result<Vec<u64>> {
    graphs.iter().map(|g| Ok(anchored_frequency(g, target)?)).collect()
}

fn score(method: &str, k: usize, predicted: &[Graph], truth: &[(Graph, u64)], r: usize, target: &Graph) -> Result<MethodScore> {
    let r = r.min(truth.len());
    let top: Vec<Graph> = predicted.iter().take(r).cloned().collect();
    Ok(MethodScore {
        method: method.into(),
        size: k,
        hit_rate: hit_rate(&top, truth, r, |p, t| exact_isomorphic(p, t))?,
        frequencies: frequencies(&top, target)?,
        truth_max: truth.first().map_or(0, |t| t.1),
    })
}

fn scores_csv(scores: &[MethodScore]) -> Csv {
    let mut csv = Csv::new(&["method", "size", "top", "hit_rate", "median_freq", "mean_freq", "truth_max"]);
    for s in scores {
        csv.row([
            s.method.clone(),
            s.size.to_string(),
            s.frequencies.len().to_string(),
            num(s.hit_rate),
            num(s.median()),
            num(s.mean()),
            s.truth_max.to_string(),
        ]);
    }
    csv
}

fn mfinder_ranking(table: &MotifTable) -> Vec<Graph> {
    table.ranked().into_iter().map(|e| e.graph.clone()).collect()
}

/// Hit rates and top-`rank` frequencies of SPMiner and MFinder against
/// exact enumeration, anchored classes throughout.
pub fn small_motifs(run: &mut Run, model: &EncoderModel, cfg: &SmallMotifsConfig) -> Result<Vec<MethodScore>> {
    let target = run.stage("target", |_| cfg.target.build())?;
    let mut scores = Vec::new();
    for &k in &cfg.sizes {
        let truth = run.stage(&format!("exact_k{k}"), |out| {
            let table = enumerate_exact(&target, k, true)?;
            out.csv(&format!("truth_k{k}.csv"), motif_table_csv(&table))?;
            Ok(table.anchored_ranking())
        })?;
        let mine = MineConfig { k, rng_seed: mix64(cfg.mine.rng_seed ^ k as u64), ..cfg.mine.clone() };
        let spm = run.stage(&format!("spminer_k{k}"), |out| {
            let outcome = spminer(&target, model, &mine)?;
            let ranked: Vec<Graph> = outcome.result.ranked(k).iter().map(|m| m.graph.clone()).collect();
            for (i, g) in ranked.iter().take(cfg.rank).enumerate() {
                out.graph(&format!("motifs/spminer_k{k}_rank{:02}.edgelist", i + 1), g)?;
            }
            Ok(ranked)
        })?;
        let mf = run.stage(&format!("mfinder_k{k}"), |out| {
            let samples = cfg.mfinder_samples.unwrap_or(cfg.mine.seeds);
            let table = mine_mfinder(&target, k, samples, true, &mut stream(mine.rng_seed, 2))?;
            out.csv(&format!("mfinder_k{k}.csv"), motif_table_csv(&table))?;
            Ok(mfinder_ranking(&table))
        })?;
        scores.push(score("spminer", k, &spm, &truth, cfg.rank, &target)?);
        scores.push(score("mfinder", k, &mf, &truth, cfg.rank, &target)?);
    }
    run.stage("summary", |out| out.csv("hit_rate.csv", scores_csv(&scores)))?;
    Ok(scores)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantedConfig {
    pub plant: PlantConfig,
    pub seed: u64,
    pub runs: usize,
    pub mine: MineConfig,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedRun {
    pub run: usize,
    pub rng_seed: u64,
    pub recovered: bool,
    /// 1-based rank in the de-duplicated (unanchored) list.
    pub rank: Option<usize>,
    pub graph_freq: Option<u128>,
}

/// Plants one motif across a dataset and checks, per independent search
/// seed, whether a motif isomorphic to it reaches the top `rank`.
pub fn planted(run: &mut Run, model: &EncoderModel, cfg: &PlantedConfig) -> Result<Vec<PlantedRun>> {
    let (target, motif) = run.stage("plant", |out| {
        let ds = plant_motif_dataset(&cfg.plant, &mut stream(cfg.seed, 0))?;
        out.graph("planted.edgelist", &ds.motif)?;
        Ok((Graph::disjoint_union(&ds.graphs).0, ds.motif))
    })?;
    let k = motif.node_count();
    let graph_freq = graph_level_frequency_with_limit(&motif, &target, GRAPH_COUNT_BUDGET).ok();
    let mut runs = Vec::new();
    for r in 0..cfg.runs {
        let rng_seed = mix64(cfg.seed.wrapping_add(r as u64 + 1));
        let mine = MineConfig { k, rng_seed, ..cfg.mine.clone() };
        let result = run.stage(&format!("spminer_run{r}"), |out| {
            let outcome = spminer(&target, model, &mine)?;
            let merged = unanchored_view(outcome.result.ranked(k));
            for (i, m) in merged.iter().take(cfg.rank).enumerate() {
                out.graph(&format!("motifs/run{r}_rank{:02}.edgelist", i + 1), &m.graph)?;
            }
            Ok(merged)
        })?;
        let rank = result.iter().take(cfg.rank).position(|m| exact_isomorphic(&m.graph, &motif)).map(|i| i + 1);
        runs.push(PlantedRun { run: r, rng_seed, recovered: rank.is_some(), rank, graph_freq });
    }
    run.stage("summary", |out| {
        let mut csv = Csv::new(&["run", "rng_seed", "recovered", "rank", "planted_graph_freq"]);
        for r in &runs {
            csv.row([
                r.run.to_string(),
                r.rng_seed.to_string(),
                r.recovered.to_string(),
                r.rank.map_or_else(String::new, |x| x.to_string()),
                r.graph_freq.map_or_else(String::new, |x| x.to_string()),
            ]);
        }
        out.csv("planted.csv", csv)
    })?;
    Ok(runs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LargeMotifsConfig {
    pub target: TargetSpec,
    pub sizes: Vec<usize>,
    pub mine: MineConfig,
    pub mfinder_samples: Option<usize>,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub method: String,
    pub size: usize,
    /// Exact anchored frequencies; `None` beyond the verification limit.
    pub frequencies: Option<Vec<u64>>,
}

/// Exact frequencies of SPMiner's and MFinder's top motifs per size.
pub fn large_motifs(run: &mut Run, model: &EncoderModel, cfg: &LargeMotifsConfig) -> Result<Vec<FrequencyRow>> {
    let target = run.stage("target", |_| cfg.target.build())?;
    let mut rows = Vec::new();
    for &k in &cfg.sizes {
        let mine = MineConfig { k, rng_seed: mix64(cfg.mine.rng_seed ^ k as u64), ..cfg.mine.clone() };
        let verify = k <= cfg.mine.verify_limit;
        let spm = run.stage(&format!("spminer_k{k}"), |out| {
            let outcome = spminer(&target, model, &mine)?;
            let top: Vec<Graph> = outcome.result.ranked(k).iter().take(cfg.rank).map(|m| m.graph.clone()).collect();
            for (i, g) in top.iter().enumerate() {
                out.graph(&format!("motifs/spminer_k{k}_rank{:02}.edgelist", i + 1), g)?;
            }
            Ok(top)
        })?;
        let mf = run.stage(&format!("mfinder_k{k}"), |_| {
            let samples = cfg.mfinder_samples.unwrap_or(cfg.mine.seeds);
            let table = mine_mfinder(&target, k, samples, true, &mut stream(mine.rng_seed, 2))?;
            Ok(mfinder_ranking(&table).into_iter().take(cfg.rank).collect::<Vec<_>>())
        })?;
        for (method, top) in [("spminer", &spm), ("mfinder", &mf)] {
            let frequencies = if verify { Some(frequencies(top, &target)?) } else { None };
            rows.push(FrequencyRow { method: method.into(), size: k, frequencies });
        }
    }
    run.stage("summary", |out| {
        let mut csv = Csv::new(&["method", "size", "top", "median_freq", "mean_freq", "verified"]);
        for r in &rows {
            let f: Vec<f64> = r.frequencies.iter().flatten().map(|&x| x as f64).collect();
            let verified = r.frequencies.is_some();
            let stat = |v: f64| if verified { num(v) } else { String::new() };
            csv.row([
                r.method.clone(),
                r.size.to_string(),
                f.len().to_string(),
                stat(median(&f)),
                stat(mean(&f)),
                verified.to_string(),
            ]);
        }
        out.csv("frequency.csv", csv)
    })?;
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncoderEvalConfig {
    pub seed: u64,
    pub holdout_size: usize,
    pub families: Vec<Family>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncoderRow {
    pub dataset: String,
    pub accuracy: f64,
    pub aupr: f64,
}

/// Accuracy at the calibrated threshold and AUPR on held-out balanced pairs
/// per generator family.
pub fn encoder_validation(run: &mut Run, model: &EncoderModel, cfg: &EncoderEvalConfig) -> Result<Vec<EncoderRow>> {
    let mut rows = Vec::new();
    for &family in &cfg.families {
        let v = run.stage(&format!("holdout_{}", family.name()), |_| {
            let pairs = holdout_pairs(cfg.seed, cfg.holdout_size, family)?;
            Ok(validate(model, &pairs)?)
        })?;
        rows.push(EncoderRow { dataset: family.name().into(), accuracy: v.accuracy, aupr: v.aupr });
    }
    run.stage("summary", |out| {
        let mut csv = Csv::new(&["method", "dataset", "accuracy", "aupr"]);
        for r in &rows {
            csv.row(["order".to_string(), r.dataset.clone(), num(r.accuracy), num(r.aupr)]);
        }
        out.csv("encoder_metrics.csv", csv)
    })?;
    Ok(rows)
}

/// Every experiment's parameters; `configs/desk.json` ships the desk-scale
/// values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeskConfig {
    pub train: TrainConfig,
    pub small_motifs: SmallMotifsConfig,
    pub planted: PlantedConfig,
    pub large_motifs: LargeMotifsConfig,
    pub encoder: EncoderEvalConfig,
}

impl DeskConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json { path: path.into(), source })
    }
}
