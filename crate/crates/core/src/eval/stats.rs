//! Task efficiency and the between-condition statistics.

use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use super::RunRecord;
use crate::env::trajectory::csv_err_in;
use crate::env::{CAUGHT_REWARD, NEGATIVE_REWARD, POSITIVE_REWARD};
use crate::{Error, Result};

/// Reward-weighted event totals of one run.
pub fn task_efficiency(rec: &RunRecord) -> f64 {
    task_efficiency_from_totals(rec.pos_total as f64, rec.neg_total as f64, rec.caught_total as f64)
}

pub fn task_efficiency_from_totals(pos: f64, neg: f64, caught: f64) -> f64 {
    pos * POSITIVE_REWARD + neg * NEGATIVE_REWARD + caught * CAUGHT_REWARD
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 denominator); NaN below two samples.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

fn check_groups(groups: &[&[f64]]) -> Result<()> {
    if groups.len() < 2 {
        return Err(Error::Input(format!("need at least two groups, got {}", groups.len())));
    }
    for (i, g) in groups.iter().enumerate() {
        if g.len() < 2 {
            return Err(Error::Input(format!("group {i} has {} samples, need at least two", g.len())));
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input(format!("group {i} contains non-finite values")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    /// Infinite when every group is constant but the means differ.
    pub f_score: f64,
    pub p_value: f64,
    pub df_between: usize,
    pub df_within: usize,
}

pub fn one_way_anova(groups: &[&[f64]]) -> Result<AnovaResult> {
    check_groups(groups)?;
    let n: usize = groups.iter().map(|g| g.len()).sum();
    let grand = groups.iter().flat_map(|g| g.iter()).sum::<f64>() / n as f64;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for g in groups {
        let m = mean(g);
        ss_between += g.len() as f64 * (m - grand).powi(2);
        ss_within += g.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    }
    let df_between = groups.len() - 1;
    let df_within = n - groups.len();
    let ms_between = ss_between / df_between as f64;
    let ms_within = ss_within / df_within as f64;
    let all_means_equal = groups.iter().all(|g| mean(g) == mean(groups[0]));
    let (f_score, p_value) = if ms_within == 0.0 {
        if all_means_equal {
            (0.0, 1.0)
        } else {
            (f64::INFINITY, 0.0)
        }
    } else {
        let f = ms_between / ms_within;
        let dist = FisherSnedecor::new(df_between as f64, df_within as f64).map_err(|e| Error::Numeric(e.to_string()))?;
        (f, dist.sf(f))
    };
    Ok(AnovaResult {
        f_score,
        p_value,
        df_between,
        df_within,
    })
}

/// Standardised mean difference `(mean1 - mean2) / pooled_sd`.
pub fn cohens_d(g1: &[f64], g2: &[f64]) -> Result<f64> {
    check_groups(&[g1, g2])?;
    let (n1, n2) = (g1.len() as f64, g2.len() as f64);
    let (s1, s2) = (sample_std(g1), sample_std(g2));
    let pooled = (((n1 - 1.0) * s1 * s1 + (n2 - 1.0) * s2 * s2) / (n1 + n2 - 2.0)).sqrt();
    if pooled == 0.0 {
        return Err(Error::Numeric("Cohen's d is undefined for zero pooled standard deviation".into()));
    }
    Ok((mean(g1) - mean(g2)) / pooled)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchResult {
    pub t: f64,
    pub df: f64,
    /// One-sided p-value for `mean(g1) > mean(g2)`.
    pub p_greater: f64,
}

/// Welch's unequal-variance t-test of `mean(g1) > mean(g2)`.
pub fn welch_greater(g1: &[f64], g2: &[f64]) -> Result<WelchResult> {
    check_groups(&[g1, g2])?;
    let (n1, n2) = (g1.len() as f64, g2.len() as f64);
    let (v1, v2) = (sample_std(g1).powi(2) / n1, sample_std(g2).powi(2) / n2);
    let diff = mean(g1) - mean(g2);
    let se2 = v1 + v2;
    if se2 == 0.0 {
        let p = match diff.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => 0.0,
            Some(std::cmp::Ordering::Less) => 1.0,
            _ => 0.5,
        };
        let t = if diff == 0.0 { 0.0 } else { diff.signum() * f64::INFINITY };
        return Ok(WelchResult { t, df: n1 + n2 - 2.0, p_greater: p });
    }
    let t = diff / se2.sqrt();
    let df = se2 * se2 / (v1 * v1 / (n1 - 1.0) + v2 * v2 / (n2 - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Numeric(e.to_string()))?;
    Ok(WelchResult { t, df, p_greater: dist.sf(t) })
}

/// Mean and sample standard deviation of each run variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub condition_id: String,
    pub n_runs: usize,
    pub pos_mean: f64,
    pub pos_std: f64,
    pub neg_mean: f64,
    pub neg_std: f64,
    pub caught_mean: f64,
    pub caught_std: f64,
    pub task_efficiency_mean: f64,
    pub task_efficiency_std: f64,
}

/// Per-variable columns of a record set: positive, negative, caught,
/// task efficiency.
pub fn columns(records: &[RunRecord]) -> [Vec<f64>; 4] {
    [
        records.iter().map(|r| r.pos_total as f64).collect(),
        records.iter().map(|r| r.neg_total as f64).collect(),
        records.iter().map(|r| r.caught_total as f64).collect(),
        records.iter().map(task_efficiency).collect(),
    ]
}

pub const VARIABLES: [&str; 4] = ["positive_points", "negative_points", "caught_by_predator", "task_efficiency"];

pub fn summarize(condition_id: &str, records: &[RunRecord]) -> Result<ConditionSummary> {
    if records.is_empty() {
        return Err(Error::Input(format!("condition {condition_id} has no runs")));
    }
    let [pos, neg, caught, eff] = columns(records);
    Ok(ConditionSummary {
        condition_id: condition_id.to_string(),
        n_runs: records.len(),
        pos_mean: mean(&pos),
        pos_std: sample_std(&pos),
        neg_mean: mean(&neg),
        neg_std: sample_std(&neg),
        caught_mean: mean(&caught),
        caught_std: sample_std(&caught),
        task_efficiency_mean: mean(&eff),
        task_efficiency_std: sample_std(&eff),
    })
}

/// One row of the between-condition table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairComparison {
    pub variable: String,
    pub condition_a: String,
    pub condition_b: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub f_score: f64,
    pub p_value: f64,
    /// Empty (NaN) when both groups are constant.
    pub cohens_d: f64,
}

/// Compare every variable between two conditions.
pub fn compare(id_a: &str, a: &[RunRecord], id_b: &str, b: &[RunRecord]) -> Result<Vec<PairComparison>> {
    let (ca, cb) = (columns(a), columns(b));
    VARIABLES
        .iter()
        .zip(ca.iter().zip(cb.iter()))
        .map(|(name, (xa, xb))| {
            let anova = one_way_anova(&[xa, xb])?;
            let d = match cohens_d(xa, xb) {
                Ok(d) => d,
                Err(Error::Numeric(_)) => f64::NAN,
                Err(e) => return Err(e),
            };
            Ok(PairComparison {
                variable: name.to_string(),
                condition_a: id_a.to_string(),
                condition_b: id_b.to_string(),
                mean_a: mean(xa),
                mean_b: mean(xb),
                f_score: anova.f_score,
                p_value: anova.p_value,
                cohens_d: d,
            })
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err_in(path.display(), e))?;
    for r in rows {
        w.serialize(r).map_err(|e| csv_err_in(path.display(), e))?;
    }
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err_in(path.display(), e))?;
    r.deserialize().map(|row| row.map_err(|e| csv_err_in(path.display(), e))).collect()
}

pub fn write_runs(path: &Path, records: &[RunRecord]) -> Result<()> {
    write_csv(path, records)
}

pub fn read_runs(path: &Path) -> Result<Vec<RunRecord>> {
    read_csv(path)
}

pub fn write_summary(path: &Path, rows: &[ConditionSummary]) -> Result<()> {
    write_csv(path, rows)
}

pub fn write_comparisons(path: &Path, rows: &[PairComparison]) -> Result<()> {
    write_csv(path, rows)
}
