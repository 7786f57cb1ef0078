use std::collections::BTreeMap;
use std::fmt::Write;

use crate::env::trajectory::{EntityKind, TrajectoryRow};
use crate::{Error, Result};

fn kind_name(k: EntityKind) -> &'static str {
    match k {
        EntityKind::Prey => "prey",
        EntityKind::Predator => "predator",
        EntityKind::PointPositive => "point_positive",
        EntityKind::PointNegative => "point_negative",
    }
}

/// Plain-text frames for ticks `from..=to` of one run: a header per tick,
/// one line per entity, and one line per event.
///
/// Every tick in the range must be present in the log.
pub fn replay_export(rows: &[TrajectoryRow], run_id: u64, from: u64, to: u64) -> Result<String> {
    let mut ticks: BTreeMap<u64, Vec<&TrajectoryRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.run_id == run_id) {
        ticks.entry(r.tick).or_default().push(r);
    }
    let (Some(&first), Some(&last)) = (ticks.keys().next(), ticks.keys().next_back()) else {
        return Err(Error::Input(format!("run {run_id} is not in the trajectory log")));
    };
    if from > to || from < first || to > last {
        return Err(Error::Input(format!(
            "tick range {from}..={to} is outside run {run_id}, which covers {first}..={last}"
        )));
    }
    let mut out = String::new();
    for tick in from..=to {
        let frame = ticks
            .get(&tick)
            .ok_or_else(|| Error::Input(format!("tick {tick} of run {run_id} was not logged")))?;
        writeln!(out, "=== run {run_id} tick {tick} ===").unwrap();
        for r in frame {
            writeln!(
                out,
                "{} {} x={:.3} y={:.3} heading={:.1}",
                kind_name(r.entity_kind),
                r.entity_id,
                r.x,
                r.y,
                r.heading
            )
            .unwrap();
        }
        for r in frame.iter().filter(|r| !r.event.is_empty()) {
            for ev in r.event.split('|') {
                writeln!(out, "event {ev} prey {}", r.entity_id).unwrap();
            }
        }
    }
    Ok(out)
}
