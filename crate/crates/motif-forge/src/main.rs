use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use motif_forge::checkpoint;
use motif_forge::core::baselines::{enumerate_exact, mine_mfinder, mine_rand_esu};
use motif_forge::core::encoder::TrainConfig;
use motif_forge::core::miner::LogBase;
use motif_forge::core::rng::stream;
use motif_forge::core::synth::{dataset_statistics, plant_motif_dataset, Family, GeneratorConfig, PlantConfig};
use motif_forge::experiment::{self, DeskConfig, MineConfig, Run, Strategy};
use motif_forge::io::{read_target, write_dataset};
use motif_forge::report::{curve_csv, motif_table_csv, num, statistics_csv};
use motif_forge::{Error, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

const DESK_NOTE: &str = "note: desk-scale defaults (20k training batches, 10k-neighborhood index); full scale trains for 1M batches";

/// Frequent motif mining with order embeddings.
#[derive(Parser)]
#[command(name = "motif-forge", version)]
struct Cli {
    /// Worker threads; defaults to all available cores.
    #[arg(long, global = true, env = "MOTIF_FORGE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset, one edge-list file per graph.
    Gen(GenArgs),
    /// Train the order-embedding encoder.
    Train(TrainArgs),
    /// Mine frequent motifs from a target graph or dataset directory.
    Mine(MineArgs),
    /// Count or estimate all size-k motifs with a baseline method.
    Count(CountArgs),
    /// Reproduce one of the desk-scale experiments.
    Repro(ReproArgs),
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo: usize = lo.parse().map_err(|e| format!("{e}"))?;
    let hi: usize = hi.trim_start_matches('=').parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err("empty range".into());
    }
    Ok((lo, hi))
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    Family::parse(s).ok_or_else(|| format!("unknown family {s:?} (er, ba, plc, ws, mixed)"))
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            serde_json::from_str(&text).map_err(|source| Error::Json { path: p.into(), source })
        }
    }
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct GenArgs {
    #[command(subcommand)]
    plant: Option<GenCommand>,
    /// JSON file with any of the fields below; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// er, ba, plc, ws or mixed.
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    #[arg(long)]
    n_graphs: Option<usize>,
    /// Node-count range LO..HI, inclusive.
    #[arg(long, value_parser = parse_range)]
    size: Option<(usize, usize)>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Plant one random motif into every graph of a generated dataset.
    Plant(PlantArgs),
}

#[derive(Args)]
struct PlantArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    motif_size: Option<usize>,
    #[arg(long)]
    base_size: Option<usize>,
    /// Number of graphs.
    #[arg(long)]
    count: Option<usize>,
    /// Edges joining each motif copy to its base graph.
    #[arg(long)]
    attach_edges: Option<usize>,
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GenConfig {
    family: Family,
    n_graphs: usize,
    size: (usize, usize),
    seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { family: Family::Mixed, n_graphs: 100, size: (6, 29), seed: 0 }
    }
}

#[derive(Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct PlantFile {
    #[serde(flatten)]
    plant: PlantConfig,
    seed: u64,
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    if let Some(GenCommand::Plant(p)) = args.plant {
        return cmd_plant(p);
    }
    let out = args.out.ok_or_else(|| Error::Usage("gen requires --out".into()))?;
    let mut cfg: GenConfig = load_config(args.config.as_deref())?;
    set(&mut cfg.family, args.family);
    set(&mut cfg.n_graphs, args.n_graphs);
    set(&mut cfg.size, args.size);
    set(&mut cfg.seed, args.seed);
    let mut run = Run::new(&out, "gen", cfg.seed, false)?;
    let r = run.stage("generate", |o| {
        let graphs = GeneratorConfig::new(cfg.family, cfg.size, cfg.seed)?.dataset(cfg.n_graphs)?;
        write_dataset(&out, &graphs)?;
        o.path("graph_*.edgelist");
        o.csv("statistics.csv", statistics_csv(&dataset_statistics(&graphs)))?;
        println!("wrote {} graphs to {}", graphs.len(), out.display());
        Ok(())
    });
    run.conclude(&cfg, r)
}

fn cmd_plant(args: PlantArgs) -> Result<()> {
    let mut cfg: PlantFile = load_config(args.config.as_deref())?;
    set(&mut cfg.plant.motif_size, args.motif_size);
    set(&mut cfg.plant.base_size, args.base_size);
    set(&mut cfg.plant.graph_count, args.count);
    set(&mut cfg.plant.attach_edges, args.attach_edges);
    set(&mut cfg.plant.family, args.family);
    set(&mut cfg.seed, args.seed);
    let mut run = Run::new(&args.out, "gen plant", cfg.seed, false)?;
    let r = run.stage("plant", |o| {
        let ds = plant_motif_dataset(&cfg.plant, &mut stream(cfg.seed, 0))?;
        write_dataset(&o.path("graphs"), &ds.graphs)?;
        o.graph("planted.edgelist", &ds.motif)?;
        println!("wrote {} graphs and the planted motif to {}", ds.graphs.len(), args.out.display());
        Ok(())
    });
    run.conclude(&cfg, r)
}

#[derive(Args)]
struct TrainArgs {
    /// JSON training config; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    batches: Option<u64>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Hinge margin on negative pairs.
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    /// Curve rows are recorded every this many batches.
    #[arg(long)]
    eval_every: Option<u64>,
    #[arg(long)]
    holdout_size: Option<usize>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    #[arg(long)]
    seed: Option<u64>,
    /// Checkpoint path; the sidecar goes to `<out>.json`, the curve to
    /// `<out>.curve.csv`.
    #[arg(long)]
    out: PathBuf,
}

fn curve_path(ckpt: &Path) -> PathBuf {
    let mut s = ckpt.as_os_str().to_owned();
    s.push(".curve.csv");
    PathBuf::from(s)
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let mut cfg: TrainConfig = load_config(args.config.as_deref())?;
    set(&mut cfg.batches, args.batches);
    set(&mut cfg.batch_size, args.batch_size);
    set(&mut cfg.margin, args.margin);
    set(&mut cfg.lr, args.lr);
    set(&mut cfg.eval_every, args.eval_every);
    set(&mut cfg.holdout_size, args.holdout_size);
    set(&mut cfg.encoder.hidden, args.hidden);
    set(&mut cfg.family, args.family);
    set(&mut cfg.seed, args.seed);
    eprintln!("{DESK_NOTE}");
    eprintln!("seed {}", cfg.seed);
    let (model, curve) = experiment::train_model(&cfg, |p| {
        eprintln!("batch {} loss {} holdout accuracy {} aupr {}", p.batch, num(p.loss), num(p.holdout_acc), num(p.holdout_aupr))
    })?;
    checkpoint::save(&args.out, &model, Some(&cfg))?;
    curve_csv(&curve).with_comment(&format!("seed={}", cfg.seed)).write(&curve_path(&args.out))?;
    let last = curve.last().expect("curve has a row for batch 0");
    println!("held-out accuracy {} aupr {}", num(last.holdout_acc), num(last.holdout_aupr));
    Ok(())
}

#[derive(Args)]
struct MineArgs {
    /// JSON mining config; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Edge-list file or directory of edge-list files.
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    ckpt: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Greedy and beam seed nodes.
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    simulations: Option<usize>,
    /// Beam width.
    #[arg(long)]
    beam: Option<usize>,
    /// UCT exploration constant.
    #[arg(long)]
    c: Option<f64>,
    /// Seed nodes MCTS chooses among.
    #[arg(long)]
    seed_pool: Option<usize>,
    #[arg(long, value_enum)]
    log_base: Option<LogBaseArg>,
    /// Number of indexed neighborhoods.
    #[arg(long)]
    index: Option<usize>,
    /// Neighborhood size range LO..HI.
    #[arg(long, value_parser = parse_range)]
    nbr_size: Option<(usize, usize)>,
    /// Largest size verified with exact counts.
    #[arg(long)]
    verify_limit: Option<usize>,
    /// Motifs reported per size.
    #[arg(long)]
    top: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Also write wall-clock seconds per stage to timings.json.
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Greedy,
    Beam,
    Mcts,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogBaseArg {
    E,
    Two,
    Ten,
}

#[derive(Serialize)]
struct MineManifest<'a> {
    target: &'a Path,
    ckpt: &'a Path,
    mine: &'a MineConfig,
}

fn load_model(path: &Path) -> Result<motif_forge::core::encoder::EncoderModel> {
    if !path.is_file() {
        return Err(Error::Usage(format!("checkpoint {} not found", path.display())));
    }
    Ok(checkpoint::load(path)?.0)
}

fn cmd_mine(args: MineArgs) -> Result<()> {
    let mut cfg: MineConfig = load_config(args.config.as_deref())?;
    set(&mut cfg.k, args.k);
    set(
        &mut cfg.strategy,
        args.strategy.map(|s| match s {
            StrategyArg::Greedy => Strategy::Greedy,
            StrategyArg::Beam => Strategy::Beam,
            StrategyArg::Mcts => Strategy::Mcts,
        }),
    );
    set(&mut cfg.seeds, args.seeds);
    set(&mut cfg.simulations, args.simulations);
    set(&mut cfg.beam_width, args.beam);
    set(&mut cfg.c, args.c);
    set(&mut cfg.seed_pool, args.seed_pool);
    set(
        &mut cfg.log_base,
        args.log_base.map(|b| match b {
            LogBaseArg::E => LogBase::Natural,
            LogBaseArg::Two => LogBase::Two,
            LogBaseArg::Ten => LogBase::Ten,
        }),
    );
    set(&mut cfg.index_count, args.index);
    set(&mut cfg.size_range, args.nbr_size);
    set(&mut cfg.verify_limit, args.verify_limit);
    set(&mut cfg.top, args.top);
    set(&mut cfg.rng_seed, args.seed);
    eprintln!("{DESK_NOTE}");
    let model = load_model(&args.ckpt)?;
    let target = read_target(&args.target)?;
    let mut run = Run::new(&args.out, "mine", cfg.rng_seed, args.timings)?;
    let r = experiment::mine_into(&mut run, &target, &model, &cfg);
    let manifest = MineManifest { target: &args.target, ckpt: &args.ckpt, mine: &cfg };
    let rows = run.conclude(&manifest, r)?;
    for row in &rows {
        println!(
            "size {} rank {} occurrences {} exact {}",
            row.size,
            row.rank,
            row.occurrences,
            row.exact_anchored_freq.map_or_else(|| "-".into(), |f| f.to_string())
        );
    }
    Ok(())
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum)]
    method: Option<CountMethod>,
    /// MFinder samples.
    #[arg(long)]
    samples: Option<usize>,
    /// Rand-ESU child-probability exponent.
    #[arg(long)]
    tau: Option<f64>,
    /// Count anchored motif classes (exact and mfinder only).
    #[arg(long)]
    anchored: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for `counts.csv` and `motifs/`; the CSV goes to
    /// stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
enum CountMethod {
    #[default]
    Exact,
    Mfinder,
    Randesu,
}

#[derive(Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CountConfig {
    k: usize,
    method: CountMethod,
    samples: usize,
    tau: f64,
    anchored: bool,
    seed: u64,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig { k: 4, method: CountMethod::Exact, samples: 10_000, tau: 0.5, anchored: false, seed: 0 }
    }
}

fn cmd_count(args: CountArgs) -> Result<()> {
    let mut cfg: CountConfig = load_config(args.config.as_deref())?;
    set(&mut cfg.k, args.k);
    set(&mut cfg.method, args.method);
    set(&mut cfg.samples, args.samples);
    set(&mut cfg.tau, args.tau);
    cfg.anchored |= args.anchored;
    set(&mut cfg.seed, args.seed);
    let target = read_target(&args.target)?;
    let mut rng = stream(cfg.seed, 0);
    let table = match cfg.method {
        CountMethod::Exact => enumerate_exact(&target, cfg.k, cfg.anchored)?,
        CountMethod::Mfinder => mine_mfinder(&target, cfg.k, cfg.samples, cfg.anchored, &mut rng)?,
        CountMethod::Randesu => {
            if cfg.anchored {
                return Err(Error::Usage("randesu counts unanchored classes only".into()));
            }
            mine_rand_esu(&target, cfg.k, cfg.tau, &mut rng)?
        }
    };
    let mut comment = format!("seed={} method={:?} k={}", cfg.seed, cfg.method, cfg.k).to_lowercase();
    match cfg.method {
        CountMethod::Mfinder => comment += &format!(" samples={}", cfg.samples),
        CountMethod::Randesu => comment += &format!(" tau={} failed_samples={}", num(cfg.tau), table.failed_samples),
        CountMethod::Exact => {}
    }
    let csv = motif_table_csv(&table).with_comment(&comment);
    let Some(out) = &args.out else {
        print!("{}", csv.into_string());
        return Ok(());
    };
    let mut run = Run::new(out, "count", cfg.seed, false)?;
    let r = run.stage("count", |o| {
        o.csv("counts.csv", csv)?;
        for (i, e) in table.ranked().into_iter().enumerate() {
            o.graph(&format!("motifs/motif_{:04}.edgelist", i + 1), &e.graph)?;
        }
        Ok(())
    });
    run.conclude(&cfg, r)
}

#[derive(Args)]
struct ReproArgs {
    #[arg(value_enum)]
    experiment: Experiment,
    /// Experiment config, e.g. configs/desk.json.
    #[arg(long)]
    config: PathBuf,
    /// Use this checkpoint instead of training one.
    #[arg(long)]
    ckpt: Option<PathBuf>,
    /// Overrides every search and evaluation seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    SmallMotifs,
    Planted,
    LargeMotifs,
    Encoder,
}

impl Experiment {
    fn name(self) -> &'static str {
        match self {
            Experiment::SmallMotifs => "small-motifs",
            Experiment::Planted => "planted",
            Experiment::LargeMotifs => "large-motifs",
            Experiment::Encoder => "encoder",
        }
    }
}

#[derive(Serialize)]
struct ReproManifest<'a> {
    experiment: &'static str,
    ckpt: Option<&'a Path>,
    config: &'a DeskConfig,
}

fn cmd_repro(args: ReproArgs) -> Result<()> {
    let mut cfg = DeskConfig::load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.small_motifs.mine.rng_seed = s;
        cfg.large_motifs.mine.rng_seed = s;
        cfg.planted.seed = s;
        cfg.encoder.seed = s;
    }
    eprintln!("{DESK_NOTE}");
    let name = args.experiment.name();
    let mut run = Run::new(&args.out, &format!("repro {name}"), args.seed.unwrap_or(cfg.train.seed), args.timings)?;
    let r = repro_stages(&mut run, &args, &cfg);
    let manifest = ReproManifest { experiment: name, ckpt: args.ckpt.as_deref(), config: &cfg };
    let summary = run.conclude(&manifest, r).inspect_err(|_| {
        eprintln!("stage failure recorded in {}", args.out.join("manifest.json").display());
    })?;
    print!("{summary}");
    motif_forge::io::write_file(&args.out.join("summary.txt"), summary)
}

fn repro_stages(run: &mut Run, args: &ReproArgs, cfg: &DeskConfig) -> Result<String> {
    let model = match &args.ckpt {
        Some(p) => load_model(p)?,
        None => run.stage("train", |o| {
            let (model, curve) = experiment::train_model(&cfg.train, |_| {})?;
            checkpoint::save(&o.path("model.ckpt"), &model, Some(&cfg.train))?;
            o.path("model.ckpt.json");
            o.csv("curve.csv", curve_csv(&curve))?;
            Ok(model)
        })?,
    };
    let mut s = String::new();
    match args.experiment {
        Experiment::SmallMotifs => {
            for m in experiment::small_motifs(run, &model, &cfg.small_motifs)? {
                s += &format!(
                    "{} k={} hit_rate={} median_freq={} truth_max={}\n",
                    m.method,
                    m.size,
                    num(m.hit_rate),
                    num(m.median()),
                    m.truth_max
                );
            }
        }
        Experiment::Planted => {
            for r in experiment::planted(run, &model, &cfg.planted)? {
                let rank = r.rank.map_or_else(|| "-".into(), |x| x.to_string());
                s += &format!("run {} recovered={} rank={rank}\n", r.run, r.recovered);
            }
        }
        Experiment::LargeMotifs => {
            for r in experiment::large_motifs(run, &model, &cfg.large_motifs)? {
                let med = r.frequencies.as_ref().map_or_else(
                    || "unverified".into(),
                    |f| num(motif_forge::core::metrics::median(&f.iter().map(|&x| x as f64).collect::<Vec<_>>())),
                );
                s += &format!("{} k={} median_freq={med}\n", r.method, r.size);
            }
        }
        Experiment::Encoder => {
            s += "method,dataset,accuracy,aupr\n";
            for r in experiment::encoder_validation(run, &model, &cfg.encoder)? {
                s += &format!("order,{},{},{}\n", r.dataset, num(r.accuracy), num(r.aupr));
            }
        }
    }
    Ok(s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("global pool is set once");
    }
    let r = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Train(a) => cmd_train(a),
        Command::Mine(a) => cmd_mine(a),
        Command::Count(a) => cmd_count(a),
        Command::Repro(a) => cmd_repro(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

