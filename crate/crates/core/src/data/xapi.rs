//! Ingestion of xAPI-style statements.
//!
//! The accepted profile is minimal:
//!
//! * `actor.account.name` identifies the player.
//! * `timestamp` (RFC 3339) orders a player's statements.
//! * A statement whose verb id ends in `turn-completed` closes a turn; its
//!   `result.extensions` carry a `state` object with `total_votes`, `budget`,
//!   `duration_s` and a `districts` array shaped like the JSONL district
//!   objects.
//! * Action statements carry a `district` extension and are attached to the
//!   next turn the same player completes. Verbs are mapped through
//!   [`ACTION_VERBS`]; the generic verb `acted` names its action in an
//!   `action` extension.
//! * The level comes from a `level` extension in `context.extensions` or
//!   `result.extensions` and defaults to 1.
//!
//! Extension keys match either exactly or as the last path segment of an
//! IRI, so `https://example.org/xapi/district` and `district` are equivalent.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, FixedOffset};
use serde::Deserialize;
use serde_json::Value;

use super::{DataError, Dataset, DistrictState, Playthrough, TurnRecord};

pub const TURN_VERB: &str = "turn-completed";
pub const GENERIC_ACTION_VERB: &str = "acted";

/// Verb (last IRI segment) to action name.
pub const ACTION_VERBS: &[(&str, &str)] = &[
    ("rallied", "rally"),
    ("held-fundraiser", "fundraiser"),
    ("fundraised", "fundraiser"),
    ("canvassed", "grassroots"),
    ("ran-grassroots", "grassroots"),
    ("ran-voter-drive", "voter_drive"),
    ("registered-voters", "voter_drive"),
];

#[derive(Debug)]
pub struct XapiIngest {
    pub dataset: Dataset,
    /// One entry per skipped statement or dropped action.
    pub warnings: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct TurnState {
    total_votes: u64,
    budget: f64,
    duration_s: f64,
    districts: Vec<DistrictState>,
}

enum Kind {
    Turn(Box<TurnState>),
    Action { action: String, district: u32 },
}

struct Usable {
    at: DateTime<FixedOffset>,
    seq: usize,
    level: Option<u32>,
    kind: Kind,
}

fn last_segment(s: &str) -> &str {
    s.rsplit(['/', '#']).next().unwrap_or(s)
}

fn extension<'a>(exts: Option<&'a Value>, name: &str) -> Option<&'a Value> {
    exts?.as_object()?.iter().find_map(|(k, v)| (k == name || last_segment(k) == name).then_some(v))
}

pub fn ingest_xapi(text: &str) -> Result<XapiIngest, DataError> {
    let statements: Vec<Value> =
        serde_json::from_str(text).map_err(|e| DataError::Xapi(format!("expected a JSON array of statements: {e}")))?;
    let mut warnings = Vec::new();
    let mut by_actor: BTreeMap<String, Vec<Usable>> = BTreeMap::new();

    for (i, st) in statements.iter().enumerate() {
        let mut skip = |why: &str| warnings.push(format!("statement {i}: {why}; skipped"));
        let Some(actor) = st.pointer("/actor/account/name").and_then(Value::as_str) else {
            skip("missing actor.account.name");
            continue;
        };
        let Some(ts) = st.get("timestamp").and_then(Value::as_str) else {
            skip("missing timestamp");
            continue;
        };
        let Ok(at) = DateTime::parse_from_rfc3339(ts) else {
            skip(&format!("unparsable timestamp {ts:?}"));
            continue;
        };
        let verb = st.pointer("/verb/id").and_then(Value::as_str).map(last_segment).unwrap_or("");
        let result_ext = st.pointer("/result/extensions");
        let context_ext = st.pointer("/context/extensions");
        let level = extension(context_ext, "level")
            .or_else(|| extension(result_ext, "level"))
            .and_then(Value::as_u64)
            .map(|l| l as u32);

        let kind = if verb == TURN_VERB {
            let Some(state) = extension(result_ext, "state") else {
                skip("turn statement without a state extension");
                continue;
            };
            match TurnState::deserialize(state) {
                Ok(s) => Kind::Turn(Box::new(s)),
                Err(e) => {
                    skip(&format!("malformed state: {e}"));
                    continue;
                }
            }
        } else {
            let action = if verb == GENERIC_ACTION_VERB {
                extension(result_ext, "action").and_then(Value::as_str).map(str::to_string)
            } else {
                ACTION_VERBS.iter().find(|(v, _)| *v == verb).map(|(_, a)| a.to_string())
            };
            let Some(action) = action else {
                skip(&format!("unrecognized verb {verb:?}"));
                continue;
            };
            let Some(district) = extension(result_ext, "district").and_then(Value::as_u64) else {
                skip("action statement without a district extension");
                continue;
            };
            Kind::Action { action, district: district as u32 }
        };
        by_actor.entry(actor.to_string()).or_default().push(Usable { at, seq: i, level, kind });
    }

    let mut playthroughs = Vec::new();
    let mut vocab = BTreeSet::new();
    for (player_id, mut items) in by_actor {
        items.sort_by(|a, b| a.at.cmp(&b.at).then(a.seq.cmp(&b.seq)));
        let mut level = None;
        let mut pending: Vec<(String, u32)> = Vec::new();
        let mut turns = Vec::new();
        for item in items {
            level = level.or(item.level);
            match item.kind {
                Kind::Action { action, district } => pending.push((action, district)),
                Kind::Turn(state) => {
                    let mut rec = TurnRecord {
                        turn_index: turns.len() as u32,
                        total_votes: state.total_votes,
                        budget: state.budget,
                        duration_s: state.duration_s,
                        districts: state.districts,
                    };
                    rec.districts.sort_by_key(|d| d.district_id);
                    for (action, district) in pending.drain(..) {
                        match rec.districts.iter_mut().find(|d| d.district_id == district) {
                            Some(d) => {
                                d.actions.insert(action, 1);
                            }
                            None => warnings.push(format!(
                                "{player_id}: {action} in unknown district {district} on turn {}; dropped",
                                rec.turn_index
                            )),
                        }
                    }
                    turns.push(rec);
                }
            }
        }
        if !pending.is_empty() {
            warnings.push(format!(
                "{player_id}: {} action(s) after the last completed turn; dropped",
                pending.len()
            ));
        }
        if turns.is_empty() {
            warnings.push(format!("{player_id}: no completed turns; player skipped"));
            continue;
        }
        for t in &turns {
            for d in &t.districts {
                vocab.extend(d.actions.keys().cloned());
            }
        }
        playthroughs.push(Playthrough { player_id, level: level.unwrap_or(1), turns });
    }

    if playthroughs.is_empty() {
        return Err(DataError::Xapi("no usable statements".into()));
    }
    // Every district lists every action so playthroughs share one vocabulary.
    for p in &mut playthroughs {
        for t in &mut p.turns {
            for d in &mut t.districts {
                for a in &vocab {
                    d.actions.entry(a.clone()).or_insert(0);
                }
            }
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(XapiIngest { dataset: Dataset::new(playthroughs)?, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn state(votes: u64) -> Value {
        let d = |id: u32| {
            json!({"id": id, "population": 1000, "favorability": 5.0, "unregistered": 0.1,
                   "undecided": 0.2, "for": 0.3, "against": 0.4})
        };
        json!({"total_votes": votes, "budget": 500.0, "duration_s": 20.0,
               "districts": (1..=5).map(d).collect::<Vec<_>>()})
    }

    fn turn(actor: &str, ts: &str, votes: u64) -> Value {
        json!({
            "actor": {"account": {"name": actor}},
            "verb": {"id": "https://example.org/xapi/verbs/turn-completed"},
            "timestamp": ts,
            "context": {"extensions": {"https://example.org/xapi/level": 2}},
            "result": {"extensions": {"https://example.org/xapi/state": state(votes)}}
        })
    }

    fn action(actor: &str, ts: &str, verb: &str, district: u32) -> Value {
        json!({
            "actor": {"account": {"name": actor}},
            "verb": {"id": format!("https://example.org/xapi/verbs/{verb}")},
            "timestamp": ts,
            "result": {"extensions": {"district": district}}
        })
    }

    fn ingest(v: Value) -> XapiIngest {
        ingest_xapi(&v.to_string()).unwrap()
    }

    #[test]
    fn groups_turns_by_actor() {
        let out = ingest(json!([
            turn("p1", "2024-03-01T10:00:00Z", 10),
            turn("p1", "2024-03-01T10:01:00Z", 20),
        ]));
        let ds = out.dataset;
        assert_eq!(ds.playthroughs().len(), 1);
        let p = &ds.playthroughs()[0];
        assert_eq!(p.turns.len(), 2);
        assert_eq!(p.turns[1].turn_index, 1);
        assert_eq!(p.level, 2);
    }

    #[test]
    fn rally_sets_flag_on_its_turn() {
        let out = ingest(json!([
            turn("p1", "2024-03-01T10:00:00Z", 10),
            action("p1", "2024-03-01T10:00:30Z", "rallied", 5),
            turn("p1", "2024-03-01T10:01:00Z", 20),
        ]));
        let p = &out.dataset.playthroughs()[0];
        assert_eq!(p.turns[1].district(5).unwrap().actions["rally"], 1);
        assert_eq!(p.turns[0].district(5).unwrap().actions["rally"], 0);
        assert_eq!(p.turns[1].district(4).unwrap().actions["rally"], 0);
        assert_eq!(out.dataset.action_vocabulary(), ["rally"]);
    }

    #[test]
    fn sorts_by_timestamp() {
        let out = ingest(json!([
            turn("p1", "2024-03-01T10:05:00Z", 30),
            turn("p1", "2024-03-01T10:00:00+00:00", 10),
            turn("p1", "2024-03-01T11:01:00+01:00", 20),
        ]));
        let votes: Vec<u64> = out.dataset.playthroughs()[0].turns.iter().map(|t| t.total_votes).collect();
        assert_eq!(votes, [10, 20, 30]);
    }

    #[test]
    fn skips_unusable_statements_with_warnings() {
        let mut no_actor = turn("p1", "2024-03-01T10:00:00Z", 1);
        no_actor.as_object_mut().unwrap().remove("actor");
        let mut no_ts = turn("p1", "2024-03-01T10:00:00Z", 1);
        no_ts.as_object_mut().unwrap().remove("timestamp");
        let out = ingest(json!([no_actor, no_ts, turn("p2", "2024-03-01T10:00:00Z", 5)]));
        assert_eq!(out.dataset.playthroughs().len(), 1);
        assert_eq!(out.warnings.len(), 2);
        assert!(out.warnings[0].contains("actor"));
        assert!(out.warnings[1].contains("timestamp"));
    }

    #[test]
    fn zero_usable_is_fatal() {
        let mut st = turn("p1", "2024-03-01T10:00:00Z", 1);
        st.as_object_mut().unwrap().remove("actor");
        assert!(matches!(ingest_xapi(&json!([st]).to_string()), Err(DataError::Xapi(_))));
        assert!(ingest_xapi("[]").is_err());
        assert!(ingest_xapi("{}").is_err());
    }

    #[test]
    fn generic_verb_names_action() {
        let mut a = action("p1", "2024-03-01T10:00:01Z", GENERIC_ACTION_VERB, 2);
        a["result"]["extensions"]["action"] = json!("poll");
        let out = ingest(json!([a, turn("p1", "2024-03-01T10:00:02Z", 1)]));
        assert_eq!(out.dataset.playthroughs()[0].turns[0].district(2).unwrap().actions["poll"], 1);
    }
}
