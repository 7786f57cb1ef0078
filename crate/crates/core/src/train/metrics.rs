use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::trajectory::csv_err_in;
use crate::{Error, Result};

pub const METRICS_HEADER: [&str; 7] = [
    "global_step",
    "mean_cumulative_episode_reward",
    "policy_loss",
    "value_loss",
    "entropy",
    "extrinsic_reward_mean",
    "mean_value_estimate",
];

/// One summary row. Quantities with nothing to report yet are NaN.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MetricsRow {
    pub global_step: u64,
    /// Mean per-prey return of episodes completed so far in this period,
    /// or the latest earlier value.
    #[serde(with = "nan_as_null")]
    pub mean_cumulative_episode_reward: f64,
    #[serde(with = "nan_as_null")]
    pub policy_loss: f64,
    #[serde(with = "nan_as_null")]
    pub value_loss: f64,
    #[serde(with = "nan_as_null")]
    pub entropy: f64,
    /// Mean reward per transition in this period.
    #[serde(with = "nan_as_null")]
    pub extrinsic_reward_mean: f64,
    #[serde(with = "nan_as_null")]
    pub mean_value_estimate: f64,
}

impl MetricsRow {
    fn values(&self) -> [f64; 6] {
        [
            self.mean_cumulative_episode_reward,
            self.policy_loss,
            self.value_loss,
            self.entropy,
            self.extrinsic_reward_mean,
            self.mean_value_estimate,
        ]
    }
}

/// Bitwise equality, so NaN placeholders compare equal.
impl PartialEq for MetricsRow {
    fn eq(&self, other: &Self) -> bool {
        self.global_step == other.global_step
            && self.values().iter().zip(other.values()).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// One finished training episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    /// Global step at the end of the sweep in which the episode finished.
    pub global_step: u64,
    pub world: usize,
    pub mean_return: f64,
    pub positive: u64,
    pub negative: u64,
    pub caught: u64,
}

mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() { None } else { Some(*v) }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

pub fn write_metrics(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err_in(path.display(), e))?;
    w.write_record(METRICS_HEADER).map_err(|e| csv_err_in(path.display(), e))?;
    for r in rows {
        let mut rec = vec![r.global_step.to_string()];
        rec.extend(r.values().iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(|e| csv_err_in(path.display(), e))?;
    }
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err_in(path.display(), e))?;
    let header = r.headers().map_err(|e| csv_err_in(path.display(), e))?.clone();
    if header.iter().ne(METRICS_HEADER) {
        return Err(Error::Input(format!("{}: unexpected metrics header", path.display())));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_err_in(path.display(), e))?;
        let bad = |i: usize| Error::Input(format!("{}: bad value {:?} in column {}", path.display(), &rec[i], METRICS_HEADER[i]));
        let f = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(i));
        rows.push(MetricsRow {
            global_step: rec[0].parse().map_err(|_| bad(0))?,
            mean_cumulative_episode_reward: f(1)?,
            policy_loss: f(2)?,
            value_loss: f(3)?,
            entropy: f(4)?,
            extrinsic_reward_mean: f(5)?,
            mean_value_estimate: f(6)?,
        });
    }
    Ok(rows)
}

pub fn write_episodes(path: &Path, rows: &[EpisodeRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err_in(path.display(), e))?;
    if rows.is_empty() {
        w.write_record(["global_step", "world", "mean_return", "positive", "negative", "caught"])
            .map_err(|e| csv_err_in(path.display(), e))?;
    }
    for r in rows {
        w.serialize(r).map_err(|e| csv_err_in(path.display(), e))?;
    }
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_episodes(path: &Path) -> Result<Vec<EpisodeRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err_in(path.display(), e))?;
    r.deserialize().map(|row| row.map_err(|e| csv_err_in(path.display(), e))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metrics_csv_roundtrip_keeps_nan() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        let rows = vec![
            MetricsRow {
                global_step: 10_000,
                mean_cumulative_episode_reward: f64::NAN,
                policy_loss: 0.1,
                value_loss: 1.0 / 3.0,
                entropy: 1.79,
                extrinsic_reward_mean: -0.002,
                mean_value_estimate: 0.25,
            },
            MetricsRow {
                global_step: 20_000,
                mean_cumulative_episode_reward: 3.5,
                ..MetricsRow {
                    global_step: 0,
                    mean_cumulative_episode_reward: 0.0,
                    policy_loss: 0.2,
                    value_loss: 0.1,
                    entropy: 1.7,
                    extrinsic_reward_mean: 0.01,
                    mean_value_estimate: 0.3,
                }
            },
        ];
        write_metrics(&p, &rows).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with(&METRICS_HEADER.join(",")));
        assert_eq!(read_metrics(&p).unwrap(), rows);
        let json = serde_json::to_string(&rows).unwrap();
        assert_eq!(serde_json::from_str::<Vec<MetricsRow>>(&json).unwrap(), rows);
    }

    #[test]
    fn episodes_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        let rows = vec![EpisodeRecord {
            global_step: 12_288,
            world: 0,
            mean_return: 1.8,
            positive: 20,
            negative: 6,
            caught: 0,
        }];
        write_episodes(&p, &rows).unwrap();
        assert_eq!(read_episodes(&p).unwrap(), rows);
        write_episodes(&p, &[]).unwrap();
        assert!(read_episodes(&p).unwrap().is_empty());
    }
}
