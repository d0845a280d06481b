use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::DataError;

/// One district's state on one turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistrictState {
    #[serde(rename = "id")]
    pub district_id: u32,
    pub population: u64,
    pub favorability: f64,
    pub unregistered: f64,
    pub undecided: f64,
    #[serde(rename = "for")]
    pub for_share: f64,
    #[serde(rename = "against")]
    pub against_share: f64,
    /// Action name to taken-this-turn flag (0 or 1).
    #[serde(default)]
    pub actions: BTreeMap<String, u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    #[serde(rename = "turn")]
    pub turn_index: u32,
    pub total_votes: u64,
    pub budget: f64,
    pub duration_s: f64,
    pub districts: Vec<DistrictState>,
}

impl TurnRecord {
    /// Districts are stored with contiguous ids starting at 1.
    pub fn district(&self, id: u32) -> Option<&DistrictState> {
        let idx = (id as usize).checked_sub(1)?;
        self.districts.get(idx).filter(|d| d.district_id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Playthrough {
    pub player_id: String,
    pub level: u32,
    pub turns: Vec<TurnRecord>,
}

impl Playthrough {
    pub fn turn(&self, turn_index: u32) -> Option<&TurnRecord> {
        self.turns
            .binary_search_by_key(&turn_index, |t| t.turn_index)
            .ok()
            .map(|i| &self.turns[i])
    }
}

/// A data point receiving a color: one turn of one playthrough.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TurnPoint {
    pub playthrough: usize,
    pub turn_index: u32,
}

/// Validated collection of playthroughs from a single game level.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    level: u32,
    playthroughs: Vec<Playthrough>,
    action_vocabulary: Vec<String>,
    district_count: u32,
    point_count: usize,
}

impl Dataset {
    /// Validate and assemble. Errors carry the 1-based record number of the
    /// offending playthrough.
    pub fn new(playthroughs: Vec<Playthrough>) -> Result<Self, DataError> {
        let lines: Vec<usize> = (1..=playthroughs.len()).collect();
        Self::with_line_numbers(playthroughs, &lines)
    }

    pub(crate) fn with_line_numbers(
        mut playthroughs: Vec<Playthrough>,
        lines: &[usize],
    ) -> Result<Self, DataError> {
        debug_assert_eq!(playthroughs.len(), lines.len());
        let Some(first) = playthroughs.first() else {
            return Err(DataError::Empty);
        };
        let level = first.level;
        let mut district_count = None;
        let mut vocab = BTreeSet::new();
        for (p, &line) in playthroughs.iter_mut().zip(lines) {
            if p.level != level {
                return Err(DataError::MixedLevels { line, expected: level, found: p.level });
            }
            let n = validate_playthrough(p, line)?;
            match district_count {
                None => district_count = Some(n),
                Some(m) if m != n => {
                    return Err(DataError::Districts {
                        line,
                        message: format!("{n} districts, dataset has {m}"),
                    })
                }
                _ => {}
            }
            for t in &p.turns {
                for d in &t.districts {
                    vocab.extend(d.actions.keys().cloned());
                }
            }
        }
        let point_count = playthroughs.iter().map(|p| p.turns.len()).sum();
        Ok(Dataset {
            level,
            playthroughs,
            action_vocabulary: vocab.into_iter().collect(),
            district_count: district_count.unwrap_or(0),
            point_count,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn playthroughs(&self) -> &[Playthrough] {
        &self.playthroughs
    }

    /// Sorted union of every action name in the dataset.
    pub fn action_vocabulary(&self) -> &[String] {
        &self.action_vocabulary
    }

    pub fn district_count(&self) -> u32 {
        self.district_count
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn max_turn_index(&self) -> u32 {
        self.playthroughs
            .iter()
            .filter_map(|p| p.turns.last())
            .map(|t| t.turn_index)
            .max()
            .unwrap_or(0)
    }

    /// All points in canonical (playthrough, turn) order.
    pub fn points(&self) -> Vec<TurnPoint> {
        self.iter_points().map(|(pt, _)| pt).collect()
    }

    pub fn iter_points(&self) -> impl Iterator<Item = (TurnPoint, &TurnRecord)> + '_ {
        self.playthroughs.iter().enumerate().flat_map(|(i, p)| {
            p.turns.iter().map(move |t| {
                (TurnPoint { playthrough: i, turn_index: t.turn_index }, t)
            })
        })
    }

    pub fn turn(&self, point: TurnPoint) -> Option<&TurnRecord> {
        self.playthroughs.get(point.playthrough)?.turn(point.turn_index)
    }

    /// Position of `point` in canonical order.
    pub fn point_position(&self, point: TurnPoint) -> Option<usize> {
        let p = self.playthroughs.get(point.playthrough)?;
        let within = p
            .turns
            .binary_search_by_key(&point.turn_index, |t| t.turn_index)
            .ok()?;
        let before: usize = self.playthroughs[..point.playthrough]
            .iter()
            .map(|p| p.turns.len())
            .sum();
        Some(before + within)
    }
}

fn check_fraction(v: f64, line: usize, path: impl FnOnce() -> String) -> Result<(), DataError> {
    if v.is_finite() && (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(DataError::Field {
            line,
            path: path(),
            message: format!("{v} outside [0, 1]"),
        })
    }
}

fn check_nonneg(v: f64, line: usize, path: impl FnOnce() -> String) -> Result<(), DataError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(DataError::Field { line, path: path(), message: format!("{v} must be >= 0") })
    }
}

/// Check one playthrough; returns its district count.
fn validate_playthrough(p: &Playthrough, line: usize) -> Result<u32, DataError> {
    if p.level < 1 {
        return Err(DataError::Field { line, path: "level".into(), message: "must be >= 1".into() });
    }
    let Some(first) = p.turns.first() else {
        return Err(DataError::Field { line, path: "turns".into(), message: "no turns".into() });
    };
    let n = first.districts.len() as u32;
    let actions_of = |d: &DistrictState| d.actions.keys().cloned().collect::<Vec<_>>();
    let vocab = first.districts.first().map(actions_of).unwrap_or_default();

    let mut prev_turn: Option<u32> = None;
    for (ti, t) in p.turns.iter().enumerate() {
        if prev_turn.is_some_and(|prev| t.turn_index <= prev) {
            return Err(DataError::Field {
                line,
                path: format!("turns[{ti}].turn"),
                message: format!("turn {} not strictly increasing", t.turn_index),
            });
        }
        prev_turn = Some(t.turn_index);
        check_nonneg(t.budget, line, || format!("turns[{ti}].budget"))?;
        check_nonneg(t.duration_s, line, || format!("turns[{ti}].duration_s"))?;
        if t.districts.is_empty() {
            return Err(DataError::Districts { line, message: format!("turn {} has no districts", t.turn_index) });
        }
        if t.districts.len() as u32 != n {
            return Err(DataError::Districts {
                line,
                message: format!("turn {} has {} districts, expected {n}", t.turn_index, t.districts.len()),
            });
        }
        for (di, d) in t.districts.iter().enumerate() {
            if d.district_id != di as u32 + 1 {
                return Err(DataError::Districts {
                    line,
                    message: format!(
                        "turn {}: district ids must be 1..={n} in order, found {} at position {di}",
                        t.turn_index, d.district_id
                    ),
                });
            }
            let at = |field: &str| format!("turns[{ti}].districts[{di}].{field}");
            check_fraction(d.unregistered, line, || at("unregistered"))?;
            check_fraction(d.undecided, line, || at("undecided"))?;
            check_fraction(d.for_share, line, || at("for"))?;
            check_fraction(d.against_share, line, || at("against"))?;
            if !d.favorability.is_finite() {
                return Err(DataError::Field { line, path: at("favorability"), message: "not finite".into() });
            }
            for (name, &flag) in &d.actions {
                if flag > 1 {
                    return Err(DataError::Field {
                        line,
                        path: at(&format!("actions.{name}")),
                        message: format!("action flag {flag} must be 0 or 1"),
                    });
                }
            }
            if actions_of(d) != vocab {
                return Err(DataError::Field {
                    line,
                    path: at("actions"),
                    message: "action names differ from the playthrough's first district".into(),
                });
            }
        }
    }
    Ok(n)
}
