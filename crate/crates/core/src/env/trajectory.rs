//! Per-tick entity log: one CSV row per entity per tick.
//!
//! Columns: `run_id,tick,entity_kind,entity_id,x,y,heading,event`. The event
//! column is empty or holds the event kinds of that prey on that tick,
//! joined by `|`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Polarity, WorldState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Prey,
    Predator,
    PointPositive,
    PointNegative,
}

impl EntityKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "prey" => Some(EntityKind::Prey),
            "predator" => Some(EntityKind::Predator),
            "point_positive" => Some(EntityKind::PointPositive),
            "point_negative" => Some(EntityKind::PointNegative),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub run_id: u64,
    pub tick: u64,
    pub entity_kind: EntityKind,
    pub entity_id: usize,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub event: String,
}

/// Rows describing the current state, including the events of the last step.
pub fn snapshot(state: &WorldState, run_id: u64) -> Vec<TrajectoryRow> {
    let mut rows = Vec::with_capacity(state.prey.len() + 1 + state.points.len());
    for p in &state.prey {
        let event = state
            .events
            .iter()
            .filter(|e| e.prey_id == p.id)
            .map(|e| e.kind.as_str())
            .collect::<Vec<_>>()
            .join("|");
        rows.push(TrajectoryRow {
            run_id,
            tick: state.tick,
            entity_kind: EntityKind::Prey,
            entity_id: p.id,
            x: p.position.x,
            y: p.position.y,
            heading: p.heading,
            event,
        });
    }
    if let Some(pred) = &state.predator {
        rows.push(TrajectoryRow {
            run_id,
            tick: state.tick,
            entity_kind: EntityKind::Predator,
            entity_id: 0,
            x: pred.body.position.x,
            y: pred.body.position.y,
            heading: pred.body.heading,
            event: String::new(),
        });
    }
    for (i, pt) in state.points.iter().enumerate() {
        rows.push(TrajectoryRow {
            run_id,
            tick: state.tick,
            entity_kind: match pt.polarity {
                Polarity::Positive => EntityKind::PointPositive,
                Polarity::Negative => EntityKind::PointNegative,
            },
            entity_id: i,
            x: pt.position.x,
            y: pt.position.y,
            heading: 0.0,
            event: String::new(),
        });
    }
    rows
}

pub fn write_rows<W: Write>(out: W, rows: &[TrajectoryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("trajectory", e))
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<TrajectoryRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

pub fn write_file(path: &Path, rows: &[TrajectoryRow]) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    write_rows(std::io::BufWriter::new(f), rows)
}

pub fn read_file(path: &Path) -> Result<Vec<TrajectoryRow>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    read_rows(std::io::BufReader::new(f))
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    csv_err_in("csv", e)
}

/// Map a CSV failure to an I/O or input error naming `context`.
pub(crate) fn csv_err_in(context: impl std::fmt::Display, e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::io(context.to_string(), std::io::Error::other(e.to_string())),
        _ => Error::Input(format!("{context}: malformed CSV: {e}")),
    }
}
