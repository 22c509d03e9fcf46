//! Reading events and posets from disk.

use crate::error::{CliError, CliResult};
use causet_core::bitmatrix::{BitMatrix, SparseMatrix};
use causet_core::causal::{
    build_link_matrix, causal_matrix_from_events, transitive_closure, CausalMatrix, LinkMatrix,
};
use causet_core::geometry::{read_events_csv, Event};
use causet_core::sprinkle::Sprinkle;
use std::cmp::Ordering;
use std::fs;
use std::path::{Path, PathBuf};

pub struct Poset {
    pub causal: CausalMatrix,
    pub links: LinkMatrix,
}

impl Poset {
    pub fn n(&self) -> usize {
        self.causal.n()
    }
}

pub fn canonical_path(path: &Path) -> CliResult<PathBuf> {
    fs::canonicalize(path).map_err(|e| CliError::io(path, e))
}

/// Events must already be in canonical `(t, x)` order so that indices in
/// the output refer to the rows of the input.
///
/// `first_line` is the line of the first event for CSV input; JSON input
/// reports the event index instead.
fn check_sorted(path: &Path, events: &[Event], first_line: Option<usize>) -> CliResult<()> {
    for (k, w) in events.windows(2).enumerate() {
        if w[0].canonical_cmp(&w[1]) == Ordering::Greater {
            let at = match first_line {
                Some(line) => format!("line {}", line + k + 1),
                None => format!("event {}", k + 1),
            };
            return Err(CliError::validation(format!(
                "{}: {at}: events are not sorted by (t, x)",
                path.display()
            )));
        }
    }
    Ok(())
}

fn parse_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::validation(format!("{}: {e}", path.display()))
}

pub fn read_events(path: &Path) -> CliResult<Vec<Event>> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let events = read_events_csv(file).map_err(|e| parse_error(path, e))?;
    // header on line 1, first event on line 2
    check_sorted(path, &events, Some(2))?;
    Ok(events)
}

/// Reads an events CSV, a sprinkle JSON (`{"config","events"}`), or a
/// sparse relation JSON (`{"n","edges"}`) whose transitive closure is taken.
pub fn read_poset(path: &Path) -> CliResult<Poset> {
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if !is_json {
        return Ok(from_events(read_events(path)?));
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| parse_error(path, e))?;
    if value.get("events").is_some() {
        let s: Sprinkle = serde_json::from_value(value).map_err(|e| parse_error(path, e))?;
        if s.events.is_empty() {
            return Err(parse_error(path, "no events"));
        }
        check_sorted(path, &s.events, None)?;
        Ok(from_events(s.events))
    } else if value.get("edges").is_some() {
        let sparse: SparseMatrix =
            serde_json::from_value(value).map_err(|e| parse_error(path, e))?;
        let bits = BitMatrix::from_sparse(&sparse).map_err(|e| parse_error(path, e))?;
        if bits.n() == 0 {
            return Err(parse_error(path, "empty relation"));
        }
        let dag = LinkMatrix::try_from_bits(bits).map_err(|e| parse_error(path, e))?;
        let causal = transitive_closure(&dag);
        let links = build_link_matrix(&causal).map_err(|e| parse_error(path, e))?;
        Ok(Poset { causal, links })
    } else {
        Err(parse_error(
            path,
            "expected an object with `events` or `edges`",
        ))
    }
}

fn from_events(events: Vec<Event>) -> Poset {
    let causal = causal_matrix_from_events(&events);
    let links = build_link_matrix(&causal).expect("events in canonical order give a strict order");
    Poset { causal, links }
}
