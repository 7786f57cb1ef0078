//! Flat `key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored, keys may appear once, and
//! unknown keys are errors. Values are resolved from defaults, then the
//! file, then command-line overrides; the winning source of every key is
//! kept as its [`Provenance`].

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::env::{Rect, WorldConfig};
use crate::ppo::PpoHyperparams;
use crate::train::ScenarioConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Default,
    File,
    Flag,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Default => "default",
            Provenance::File => "file",
            Provenance::Flag => "flag",
        }
    }
}

/// A parsed config together with where each key's value came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved<T> {
    pub value: T,
    pub provenance: BTreeMap<String, Provenance>,
}

/// Settings of one evaluation condition.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub condition_id: String,
    pub checkpoint: PathBuf,
    pub n_runs: usize,
    pub duration: u64,
    pub greedy: bool,
    pub seed: u64,
    pub trajectory_runs: usize,
    pub trajectory_stride: u64,
    /// Test-time world; predator presence is independent of training.
    pub world: WorldConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            condition_id: "1".into(),
            checkpoint: PathBuf::from("checkpoint.ckpt"),
            n_runs: 50,
            duration: 5_000,
            greedy: false,
            seed: 0,
            trajectory_runs: 1,
            trajectory_stride: 1,
            world: WorldConfig::default(),
        }
    }
}

/// `(key, value, line)` triples of a config text.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String, usize)>> {
    let mut out: Vec<(String, String, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {line_no}: expected `key = value`, got {line:?}")))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Config(format!("line {line_no}: missing key")));
        }
        if let Some((_, _, first)) = out.iter().find(|(key, _, _)| key == k) {
            return Err(Error::Config(format!("line {line_no}: key `{k}` already set on line {first}")));
        }
        out.push((k.to_string(), v.to_string(), line_no));
    }
    Ok(out)
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse {v:?} as {}", std::any::type_name::<T>())))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("`{key}`: expected true or false, got {v:?}"))),
    }
}

fn parse_barriers(key: &str, v: &str) -> Result<Vec<Rect>> {
    if v == "none" {
        return Ok(Vec::new());
    }
    v.split(';')
        .map(|r| {
            let nums = r.split(',').map(|x| parse_value::<f64>(key, x.trim())).collect::<Result<Vec<_>>>()?;
            match nums[..] {
                [a, b, c, d] => Ok(Rect::new(a, b, c, d)),
                _ => Err(Error::Config(format!("`{key}`: each barrier needs x_min,y_min,x_max,y_max, got {r:?}"))),
            }
        })
        .collect()
}

fn format_barriers(rects: &[Rect]) -> String {
    if rects.is_empty() {
        return "none".into();
    }
    rects
        .iter()
        .map(|r| format!("{},{},{},{}", r.x_min, r.y_min, r.x_max, r.y_max))
        .collect::<Vec<_>>()
        .join(";")
}

/// World keys shared by train and eval configs. `predator_present` is
/// handled by the callers.
const WORLD_KEYS: [&str; 20] = [
    "arena_side",
    "barrier_layout",
    "n_prey",
    "n_positive_points",
    "n_negative_points",
    "prey_move_speed",
    "prey_turn_speed",
    "predator_move_speed",
    "predator_view_radius",
    "predator_view_angle",
    "tick_dt",
    "episode_length",
    "prey_radius",
    "predator_radius",
    "point_radius",
    "ray_count",
    "ray_fan_angle",
    "ray_length",
    "world_seed",
    "predator_present",
];

fn set_world(w: &mut WorldConfig, key: &str, v: &str) -> Result<bool> {
    match key {
        "arena_side" => w.arena_side = parse_value(key, v)?,
        "barrier_layout" => w.barrier_layout = parse_barriers(key, v)?,
        "n_prey" => w.n_prey = parse_value(key, v)?,
        "n_positive_points" => w.n_positive_points = parse_value(key, v)?,
        "n_negative_points" => w.n_negative_points = parse_value(key, v)?,
        "prey_move_speed" => w.prey_move_speed = parse_value(key, v)?,
        "prey_turn_speed" => w.prey_turn_speed = parse_value(key, v)?,
        "predator_move_speed" => w.predator_move_speed = parse_value(key, v)?,
        "predator_view_radius" => w.predator_view_radius = parse_value(key, v)?,
        "predator_view_angle" => w.predator_view_angle = parse_value(key, v)?,
        "tick_dt" => w.tick_dt = parse_value(key, v)?,
        "episode_length" => w.episode_length = parse_value(key, v)?,
        "prey_radius" => w.prey_radius = parse_value(key, v)?,
        "predator_radius" => w.predator_radius = parse_value(key, v)?,
        "point_radius" => w.point_radius = parse_value(key, v)?,
        "ray_count" => w.ray_count = parse_value(key, v)?,
        "ray_fan_angle" => w.ray_fan_angle = parse_value(key, v)?,
        "ray_length" => w.ray_length = parse_value(key, v)?,
        "world_seed" => w.seed = parse_value(key, v)?,
        "predator_present" => w.predator_present = parse_bool(key, v)?,
        _ => return Ok(false),
    }
    Ok(true)
}

fn world_entries(w: &WorldConfig, out: &mut Vec<(&'static str, String)>) {
    let s = |v: &dyn Display| v.to_string();
    out.extend([
        ("arena_side", s(&w.arena_side)),
        ("barrier_layout", format_barriers(&w.barrier_layout)),
        ("n_prey", s(&w.n_prey)),
        ("n_positive_points", s(&w.n_positive_points)),
        ("n_negative_points", s(&w.n_negative_points)),
        ("prey_move_speed", s(&w.prey_move_speed)),
        ("prey_turn_speed", s(&w.prey_turn_speed)),
        ("predator_move_speed", s(&w.predator_move_speed)),
        ("predator_view_radius", s(&w.predator_view_radius)),
        ("predator_view_angle", s(&w.predator_view_angle)),
        ("tick_dt", s(&w.tick_dt)),
        ("episode_length", s(&w.episode_length)),
        ("prey_radius", s(&w.prey_radius)),
        ("predator_radius", s(&w.predator_radius)),
        ("point_radius", s(&w.point_radius)),
        ("ray_count", s(&w.ray_count)),
        ("ray_fan_angle", s(&w.ray_fan_angle)),
        ("ray_length", s(&w.ray_length)),
        ("world_seed", s(&w.seed)),
    ]);
}

const HYPER_KEYS: [&str; 14] = [
    "batch_size",
    "buffer_size",
    "epsilon",
    "beta",
    "gamma",
    "lambda",
    "num_epoch",
    "time_horizon",
    "learning_rate",
    "max_steps",
    "value_loss_coeff",
    "summary_freq",
    "hidden_units",
    "num_layers",
];

fn set_hyper(h: &mut PpoHyperparams, key: &str, v: &str) -> Result<bool> {
    match key {
        "batch_size" => h.batch_size = parse_value(key, v)?,
        "buffer_size" => h.buffer_size = parse_value(key, v)?,
        "epsilon" => h.epsilon = parse_value(key, v)?,
        "beta" => h.beta = parse_value(key, v)?,
        "gamma" => h.gamma = parse_value(key, v)?,
        "lambda" => h.lambda = parse_value(key, v)?,
        "num_epoch" => h.num_epoch = parse_value(key, v)?,
        "time_horizon" => h.time_horizon = parse_value(key, v)?,
        "learning_rate" => h.learning_rate = parse_value(key, v)?,
        "max_steps" => h.max_steps = parse_value(key, v)?,
        "value_loss_coeff" => h.value_loss_coeff = parse_value(key, v)?,
        "summary_freq" => h.summary_freq = parse_value(key, v)?,
        "hidden_units" => h.hidden_units = parse_value(key, v)?,
        "num_layers" => h.num_layers = parse_value(key, v)?,
        _ => return Ok(false),
    }
    Ok(true)
}

fn hyper_entries(h: &PpoHyperparams, out: &mut Vec<(&'static str, String)>) {
    let s = |v: &dyn Display| v.to_string();
    out.extend([
        ("batch_size", s(&h.batch_size)),
        ("buffer_size", s(&h.buffer_size)),
        ("epsilon", s(&h.epsilon)),
        ("beta", s(&h.beta)),
        ("gamma", s(&h.gamma)),
        ("lambda", s(&h.lambda)),
        ("num_epoch", s(&h.num_epoch)),
        ("time_horizon", s(&h.time_horizon)),
        ("learning_rate", s(&h.learning_rate)),
        ("max_steps", s(&h.max_steps)),
        ("value_loss_coeff", s(&h.value_loss_coeff)),
        ("summary_freq", s(&h.summary_freq)),
        ("hidden_units", s(&h.hidden_units)),
        ("num_layers", s(&h.num_layers)),
    ]);
}

const TRAIN_KEYS: [&str; 5] = ["scenario_id", "predator_in_training", "seed", "n_worlds", "checkpoint_interval"];
const EVAL_KEYS: [&str; 8] = [
    "condition_id",
    "checkpoint",
    "n_runs",
    "duration",
    "greedy",
    "seed",
    "trajectory_runs",
    "trajectory_stride",
];

fn unknown(key: &str, known: &[&[&str]]) -> Error {
    let close = known
        .iter()
        .flat_map(|k| k.iter())
        .find(|k| k.starts_with(&key[..key.len().min(4)]))
        .map(|k| format!(" (did you mean `{k}`?)"))
        .unwrap_or_default();
    Error::Config(format!("unknown key `{key}`{close}"))
}

fn with_line(e: Error, source: &str) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!("{source}: {m}")),
        other => other,
    }
}

/// Resolve a training config. The scenario is chosen by `scenario_flag`,
/// else by the file's `scenario_id`, else scenario 1; its preset supplies
/// the defaults. `overrides` are applied last as flags.
pub fn parse_train_config(text: &str, scenario_flag: Option<u8>, overrides: &[(String, String)]) -> Result<Resolved<ScenarioConfig>> {
    let pairs = parse_pairs(text)?;
    let file_id = pairs
        .iter()
        .find(|(k, _, _)| k == "scenario_id")
        .map(|(k, v, l)| parse_value::<u8>(k, v).map_err(|e| with_line(e, &format!("line {l}"))))
        .transpose()?;
    let flag_id = overrides
        .iter()
        .find(|(k, _)| k == "scenario_id")
        .map(|(k, v)| parse_value::<u8>(k, v))
        .transpose()?
        .or(scenario_flag);
    let mut cfg = ScenarioConfig::for_scenario(flag_id.or(file_id).unwrap_or(1))?;
    let mut provenance: BTreeMap<String, Provenance> = TRAIN_KEYS
        .iter()
        .chain(HYPER_KEYS.iter())
        .chain(WORLD_KEYS.iter().filter(|k| **k != "predator_present"))
        .map(|k| (k.to_string(), Provenance::Default))
        .collect();

    let apply = |cfg: &mut ScenarioConfig, key: &str, v: &str| -> Result<()> {
        match key {
            "scenario_id" => {}
            "predator_in_training" => cfg.predator_in_training = parse_bool(key, v)?,
            "seed" => cfg.seed = parse_value(key, v)?,
            "n_worlds" => cfg.n_worlds = parse_value(key, v)?,
            "checkpoint_interval" => cfg.checkpoint_interval = parse_value(key, v)?,
            "predator_present" => {
                return Err(Error::Config(
                    "`predator_present` is not a training key; use `predator_in_training`".into(),
                ))
            }
            _ => {
                if !set_hyper(&mut cfg.hyperparams, key, v)? && !set_world(&mut cfg.world, key, v)? {
                    return Err(unknown(key, &[&TRAIN_KEYS, &HYPER_KEYS, &WORLD_KEYS]));
                }
            }
        }
        Ok(())
    };
    for (k, v, line) in &pairs {
        apply(&mut cfg, k, v).map_err(|e| with_line(e, &format!("line {line}")))?;
        provenance.insert(k.clone(), Provenance::File);
    }
    if scenario_flag.is_some() {
        provenance.insert("scenario_id".into(), Provenance::Flag);
    }
    for (k, v) in overrides {
        apply(&mut cfg, k, v).map_err(|e| with_line(e, &format!("override {k}")))?;
        provenance.insert(k.clone(), Provenance::Flag);
    }
    cfg.validate()?;
    Ok(Resolved { value: cfg, provenance })
}

pub fn read_train_config(path: &Path, scenario_flag: Option<u8>, overrides: &[(String, String)]) -> Result<Resolved<ScenarioConfig>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_train_config(&text, scenario_flag, overrides).map_err(|e| with_line(e, &path.display().to_string()))
}

fn render(entries: &[(&'static str, String)], provenance: Option<&BTreeMap<String, Provenance>>) -> String {
    let mut out = String::new();
    for (k, v) in entries {
        match provenance.and_then(|p| p.get(*k)) {
            Some(p) => out.push_str(&format!("{k} = {v}  # {}\n", p.as_str())),
            None => out.push_str(&format!("{k} = {v}\n")),
        }
    }
    out
}

/// Every key of `cfg`, one per line, annotated with its provenance when
/// given. Parsing the output reproduces `cfg`.
pub fn write_train_config(cfg: &ScenarioConfig, provenance: Option<&BTreeMap<String, Provenance>>) -> String {
    let s = |v: &dyn Display| v.to_string();
    let mut e = vec![
        ("scenario_id", s(&cfg.scenario_id)),
        ("predator_in_training", s(&cfg.predator_in_training)),
        ("seed", s(&cfg.seed)),
        ("n_worlds", s(&cfg.n_worlds)),
        ("checkpoint_interval", s(&cfg.checkpoint_interval)),
    ];
    hyper_entries(&cfg.hyperparams, &mut e);
    world_entries(&cfg.world, &mut e);
    render(&e, provenance)
}

/// Resolve an evaluation config; `overrides` are applied last as flags.
pub fn parse_eval_config(text: &str, overrides: &[(String, String)]) -> Result<Resolved<EvalConfig>> {
    let pairs = parse_pairs(text)?;
    let mut cfg = EvalConfig::default();
    let mut provenance: BTreeMap<String, Provenance> = EVAL_KEYS
        .iter()
        .chain(WORLD_KEYS.iter())
        .map(|k| (k.to_string(), Provenance::Default))
        .collect();
    let apply = |cfg: &mut EvalConfig, key: &str, v: &str| -> Result<()> {
        match key {
            "condition_id" => cfg.condition_id = v.to_string(),
            "checkpoint" => cfg.checkpoint = PathBuf::from(v),
            "n_runs" => cfg.n_runs = parse_value(key, v)?,
            "duration" => cfg.duration = parse_value(key, v)?,
            "greedy" => cfg.greedy = parse_bool(key, v)?,
            "seed" => cfg.seed = parse_value(key, v)?,
            "trajectory_runs" => cfg.trajectory_runs = parse_value(key, v)?,
            "trajectory_stride" => cfg.trajectory_stride = parse_value(key, v)?,
            _ => {
                if !set_world(&mut cfg.world, key, v)? {
                    return Err(unknown(key, &[&EVAL_KEYS, &WORLD_KEYS]));
                }
            }
        }
        Ok(())
    };
    for (k, v, line) in &pairs {
        apply(&mut cfg, k, v).map_err(|e| with_line(e, &format!("line {line}")))?;
        provenance.insert(k.clone(), Provenance::File);
    }
    for (k, v) in overrides {
        apply(&mut cfg, k, v).map_err(|e| with_line(e, &format!("override {k}")))?;
        provenance.insert(k.clone(), Provenance::Flag);
    }
    cfg.world.validate()?;
    if cfg.n_runs == 0 || cfg.duration == 0 || cfg.trajectory_stride == 0 {
        return Err(Error::Config("n_runs, duration and trajectory_stride must be positive".into()));
    }
    if cfg.condition_id.is_empty() || cfg.condition_id.contains(|c: char| c == ',' || c.is_whitespace()) {
        return Err(Error::Config(format!("condition_id {:?} must be non-empty without commas or spaces", cfg.condition_id)));
    }
    Ok(Resolved { value: cfg, provenance })
}

pub fn read_eval_config(path: &Path, overrides: &[(String, String)]) -> Result<Resolved<EvalConfig>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_eval_config(&text, overrides).map_err(|e| with_line(e, &path.display().to_string()))
}

pub fn write_eval_config(cfg: &EvalConfig, provenance: Option<&BTreeMap<String, Provenance>>) -> String {
    let s = |v: &dyn Display| v.to_string();
    let mut e = vec![
        ("condition_id", cfg.condition_id.clone()),
        ("checkpoint", cfg.checkpoint.display().to_string()),
        ("n_runs", s(&cfg.n_runs)),
        ("duration", s(&cfg.duration)),
        ("greedy", s(&cfg.greedy)),
        ("seed", s(&cfg.seed)),
        ("trajectory_runs", s(&cfg.trajectory_runs)),
        ("trajectory_stride", s(&cfg.trajectory_stride)),
        ("predator_present", s(&cfg.world.predator_present)),
    ];
    world_entries(&cfg.world, &mut e);
    render(&e, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scenario_key_selects_preset() {
        let r = parse_train_config("scenario_id = 1\n", None, &[]).unwrap();
        assert_eq!(r.value.max_steps(), 580_000);
        assert_eq!(r.provenance["scenario_id"], Provenance::File);
        assert_eq!(r.provenance["max_steps"], Provenance::Default);
    }

    #[test]
    fn scenario_flag_on_empty_file() {
        let r = parse_train_config("", Some(3), &[]).unwrap();
        assert!(!r.value.predator_in_training);
        assert_eq!(r.value.max_steps(), 1_000_000);
        assert_eq!(r.provenance["scenario_id"], Provenance::Flag);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_train_config("epsilonn = 0.2\n", None, &[]).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("epsilonn"), "{err}");
    }

    #[test]
    fn comments_duplicates_and_bad_values() {
        let r = parse_train_config("# header\nbeta = 0.005  # weaker\n\n", None, &[]).unwrap();
        assert_eq!(r.value.hyperparams.beta, 0.005);
        assert!(parse_train_config("beta = 1\nbeta = 2\n", None, &[]).is_err());
        assert!(parse_train_config("beta = lots\n", None, &[]).is_err());
        assert!(parse_train_config("just words\n", None, &[]).is_err());
        assert!(parse_train_config("predator_present = true\n", None, &[]).is_err());
        assert!(parse_train_config("batch_size = 1000\n", None, &[]).is_err());
    }

    #[test]
    fn flags_override_file() {
        let o = vec![("seed".to_string(), "9".to_string())];
        let r = parse_train_config("seed = 4\nmax_steps = 2000\n", Some(2), &o).unwrap();
        assert_eq!(r.value.seed, 9);
        assert_eq!(r.value.max_steps(), 2000);
        assert_eq!(r.provenance["seed"], Provenance::Flag);
        assert_eq!(r.provenance["max_steps"], Provenance::File);
    }

    #[test]
    fn eval_config_accepts_predator_presence() {
        let r = parse_eval_config("predator_present = false\nn_runs = 20\ncondition_id = 3\n", &[]).unwrap();
        assert!(!r.value.world.predator_present);
        assert_eq!(r.value.n_runs, 20);
        assert!(parse_eval_config("predator_in_training = true\n", &[]).is_err());
        assert!(parse_eval_config("condition_id = a b\n", &[]).is_err());
    }

    #[test]
    fn eval_roundtrip() {
        let cfg = EvalConfig {
            condition_id: "c3".into(),
            greedy: true,
            duration: 123,
            world: WorldConfig {
                barrier_layout: Vec::new(),
                arena_side: 12.5,
                ..WorldConfig::default()
            },
            ..EvalConfig::default()
        };
        let text = write_eval_config(&cfg, None);
        assert_eq!(parse_eval_config(&text, &[]).unwrap().value, cfg);
    }

    #[test]
    fn annotated_output_still_parses() {
        let r = parse_train_config("", Some(3), &[]).unwrap();
        let text = write_train_config(&r.value, Some(&r.provenance));
        assert!(text.contains("scenario_id = 3  # flag"));
        assert_eq!(parse_train_config(&text, None, &[]).unwrap().value, r.value);
    }

    fn arb_config() -> impl Strategy<Value = ScenarioConfig> {
        (
            1u8..=3,
            any::<bool>(),
            any::<u64>(),
            1usize..4,
            (1u64..8, 1usize..6),
            (0.1f64..0.3, 1e-5f64..1e-2, 0.8f64..0.995, 0.9f64..0.95, 1e-5f64..1e-3),
            (1usize..10, 2usize..20, 0.05f64..0.5),
            proptest::collection::vec((-4.0f64..0.0, -4.0f64..0.0, 0.1f64..2.0, 0.1f64..2.0), 0..3),
        )
            .prop_map(|(id, pit, seed, nw, (bs, mult), (eps, beta, gamma, lambda, lr), (np, nn, dt), rects)| {
                let mut c = ScenarioConfig::for_scenario(id).unwrap();
                c.predator_in_training = pit;
                c.seed = seed;
                c.n_worlds = nw;
                c.hyperparams.batch_size = bs as usize * 32;
                c.hyperparams.buffer_size = c.hyperparams.batch_size * mult;
                c.hyperparams.epsilon = eps;
                c.hyperparams.beta = beta;
                c.hyperparams.gamma = gamma;
                c.hyperparams.lambda = lambda;
                c.hyperparams.learning_rate = lr;
                c.world.n_prey = np;
                c.world.n_positive_points = nn;
                c.world.tick_dt = dt;
                c.world.barrier_layout = rects.into_iter().map(|(x, y, w, h)| Rect::new(x, y, x + w, y + h)).collect();
                c
            })
    }

    proptest! {
        #[test]
        fn train_config_roundtrip(cfg in arb_config()) {
            let text = write_train_config(&cfg, None);
            prop_assert_eq!(parse_train_config(&text, None, &[]).unwrap().value, cfg);
        }
    }
}
