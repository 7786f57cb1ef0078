//! `preyrl` command-line interface.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 numeric
//! failure during training, 4 I/O or checkpoint failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use preyrl::env::trajectory::{self, EntityKind};
use preyrl::eval::{self, stats, EvalOptions, RunRecord};
use preyrl::io::{self, Manifest, SCHEMA_VERSION};
use preyrl::nn::Checkpoint;
use preyrl::ppo::ActionMode;
use preyrl::train::{Trainer, CHECKPOINT_FILE};
use preyrl::{Error, Result};

const BUILD_ID: &str = env!("PREYRL_BUILD_ID");

#[derive(Parser)]
#[command(name = "preyrl", version, about = "Predator-prey PPO training and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train prey for one scenario.
    Train(TrainArgs),
    /// Run a trained policy for repeated fixed-duration test runs.
    Eval(EvalArgs),
    /// Summaries and between-condition statistics from evaluation runs.
    Stats(StatsArgs),
    /// Occupancy density grid from a trajectory log.
    Heatmap(HeatmapArgs),
    /// Frame-by-frame text dump of part of a trajectory log.
    ReplayExport(ReplayArgs),
}

#[derive(Args)]
struct Common {
    /// Output directory; defaults to a subdirectory of $PPRL_OUTPUT_ROOT
    /// (or ./runs).
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, env = "PPRL_OUTPUT_ROOT", default_value = "runs", hide_env_values = true)]
    output_root: PathBuf,
}

impl Common {
    fn dir(&self, name: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| self.output_root.join(name))
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Flat `key = value` config file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Scenario preset (1, 2 or 3); overrides the file.
    #[arg(long)]
    scenario: Option<u8>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_steps: Option<u64>,
    /// Extra `key=value` overrides.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Continue the run stored in the output directory.
    #[arg(long)]
    resume: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Checkpoint file or training output directory.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    condition: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_runs: Option<usize>,
    #[arg(long)]
    duration: Option<u64>,
    /// Argmax actions instead of sampling.
    #[arg(long)]
    greedy: bool,
    /// Predator presence at test time.
    #[arg(long)]
    predator: Option<bool>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct StatsArgs {
    /// `CONDITION=PATH` of a runs.csv file or eval output directory; two or
    /// more.
    #[arg(long = "runs", value_name = "ID=PATH", required = true, num_args = 1..)]
    runs: Vec<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum Entity {
    Prey,
    Predator,
}

#[derive(Args)]
struct HeatmapArgs {
    #[arg(long)]
    trajectories: PathBuf,
    #[arg(long, value_enum, default_value = "prey")]
    entity: Entity,
    /// Kernel bandwidth in arena units; Scott's rule when omitted.
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[arg(long, default_value_t = 10.22)]
    arena_side: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    trajectories: PathBuf,
    #[arg(long, default_value_t = 0)]
    run_id: u64,
    #[arg(long)]
    from: u64,
    #[arg(long)]
    to: u64,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Input(_) | Error::Structural(_) | Error::Contract(_) => 2,
        Error::Numeric(_) => 3,
        Error::Io { .. } | Error::Checkpoint(_) => 4,
    }
}

fn overrides(set: &[String]) -> Result<Vec<(String, String)>> {
    set.iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {s:?}")))
        })
        .collect()
}

fn read_text(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::io(p.display().to_string(), e)),
        None => Ok(String::new()),
    }
}

fn manifest(command: &str, seed: u64) -> Manifest {
    Manifest {
        schema_version: SCHEMA_VERSION,
        command: command.into(),
        seed,
        build_id: BUILD_ID.into(),
    }
}

fn train(a: &TrainArgs) -> Result<()> {
    if a.resume {
        let dir = a
            .common
            .out
            .clone()
            .ok_or_else(|| Error::Config("--resume needs --out pointing at the run directory".into()))?;
        let mut t = Trainer::resume(&dir)?;
        log::info!("resuming at step {}", t.global_step());
        t.run()?;
        println!("{}", dir.display());
        return Ok(());
    }
    let mut o = overrides(&a.set)?;
    if let Some(s) = a.seed {
        o.push(("seed".into(), s.to_string()));
    }
    if let Some(m) = a.max_steps {
        o.push(("max_steps".into(), m.to_string()));
    }
    let text = read_text(a.config.as_deref())?;
    let r = io::parse_train_config(&text, a.scenario, &o)?;
    let cfg = r.value.clone();
    let dir = a.common.dir(&format!("train-s{}-seed{}", cfg.scenario_id, cfg.seed));
    io::write_artifact_meta(&dir, &io::write_train_config(&cfg, Some(&r.provenance)), &manifest("train", cfg.seed))?;
    let mut t = Trainer::new(cfg, Some(&dir))?;
    t.run()?;
    println!("{}", dir.display());
    Ok(())
}

fn resolve_checkpoint(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join(CHECKPOINT_FILE)
    } else {
        p.to_path_buf()
    }
}

fn evaluate(a: &EvalArgs) -> Result<()> {
    let mut o = overrides(&a.set)?;
    let mut push = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            o.push((k.into(), v));
        }
    };
    push("checkpoint", a.checkpoint.as_ref().map(|p| p.display().to_string()));
    push("condition_id", a.condition.clone());
    push("seed", a.seed.map(|v| v.to_string()));
    push("n_runs", a.n_runs.map(|v| v.to_string()));
    push("duration", a.duration.map(|v| v.to_string()));
    push("predator_present", a.predator.map(|v| v.to_string()));
    push("greedy", a.greedy.then(|| "true".to_string()));
    let text = read_text(a.config.as_deref())?;
    let r = io::parse_eval_config(&text, &o)?;
    let cfg = r.value.clone();
    let ck = Checkpoint::load(&resolve_checkpoint(&cfg.checkpoint))?;
    let opts = EvalOptions {
        n_runs: cfg.n_runs,
        duration: cfg.duration,
        mode: if cfg.greedy { ActionMode::Greedy } else { ActionMode::Sample },
        seed: cfg.seed,
        trajectory_runs: cfg.trajectory_runs,
        trajectory_stride: cfg.trajectory_stride,
    };
    let dir = a.common.dir(&format!("eval-c{}-seed{}", cfg.condition_id, cfg.seed));
    io::write_artifact_meta(&dir, &io::write_eval_config(&cfg, Some(&r.provenance)), &manifest("eval", cfg.seed))?;
    let out = eval::evaluate_condition(&ck.net, &cfg.world, &opts)?;
    stats::write_runs(&dir.join("runs.csv"), &out.records)?;
    stats::write_summary(&dir.join("summary.csv"), &[eval::summarize(&cfg.condition_id, &out.records)?])?;
    if !out.trajectories.is_empty() {
        trajectory::write_file(&dir.join("trajectories.csv"), &out.trajectories)?;
    }
    println!("{}", dir.display());
    Ok(())
}

fn load_runs(spec: &str) -> Result<(String, Vec<RunRecord>)> {
    let (id, path) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("--runs expects ID=PATH, got {spec:?}")))?;
    let path = Path::new(path);
    let file = if path.is_dir() { path.join("runs.csv") } else { path.to_path_buf() };
    Ok((id.to_string(), stats::read_runs(&file)?))
}

fn run_stats(a: &StatsArgs) -> Result<()> {
    if a.runs.len() < 2 {
        return Err(Error::Config("stats needs at least two --runs entries".into()));
    }
    let groups = a.runs.iter().map(|s| load_runs(s)).collect::<Result<Vec<_>>>()?;
    let summaries = groups.iter().map(|(id, r)| eval::summarize(id, r)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            rows.extend(eval::compare(&groups[i].0, &groups[i].1, &groups[j].0, &groups[j].1)?);
        }
    }
    let dir = a.common.dir("stats");
    let resolved: String = a.runs.iter().map(|r| format!("runs = {r}\n")).collect();
    io::write_artifact_meta(&dir, &resolved, &manifest("stats", 0))?;
    stats::write_summary(&dir.join("summary.csv"), &summaries)?;
    stats::write_comparisons(&dir.join("stats.csv"), &rows)?;
    println!("{}", dir.display());
    Ok(())
}

fn heatmap(a: &HeatmapArgs) -> Result<()> {
    let rows = trajectory::read_file(&a.trajectories)?;
    let (kind, name) = match a.entity {
        Entity::Prey => (EntityKind::Prey, "prey"),
        Entity::Predator => (EntityKind::Predator, "predator"),
    };
    let h = a.arena_side / 2.0;
    let grid = eval::kde_occupancy(&eval::positions_of(&rows, kind), kind, a.bandwidth, a.grid, a.grid, [-h, -h, h, h])?;
    let dir = a.common.dir("heatmap");
    let resolved = format!(
        "trajectories = {}\nentity = {name}\nbandwidth = {}\ngrid = {}\narena_side = {}\n",
        a.trajectories.display(),
        grid.bandwidth,
        a.grid,
        a.arena_side
    );
    io::write_artifact_meta(&dir, &resolved, &manifest("heatmap", 0))?;
    grid.write_matrix(&dir.join(format!("kde_{name}.txt")))?;
    grid.write_pgm(&dir.join(format!("kde_{name}.pgm")))?;
    println!("{}", dir.display());
    Ok(())
}

fn replay(a: &ReplayArgs) -> Result<()> {
    let rows = trajectory::read_file(&a.trajectories)?;
    let text = io::replay_export(&rows, a.run_id, a.from, a.to)?;
    match &a.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p.display().to_string(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(a) => train(a),
        Command::Eval(a) => evaluate(a),
        Command::Stats(a) => run_stats(a),
        Command::Heatmap(a) => heatmap(a),
        Command::ReplayExport(a) => replay(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
