//! Build a dataset from xAPI statements instead of JSONL.

use kinetiq::data::ingest_xapi;
use serde_json::{json, Value};

fn state(votes: u64, duration: f64) -> Value {
    let district = |id: u32| {
        json!({"id": id, "population": 1000 * id, "favorability": 2.0, "unregistered": 0.1,
               "undecided": 0.2, "for": 0.3, "against": 0.4})
    };
    json!({"total_votes": votes, "budget": 400.0, "duration_s": duration,
           "districts": (1..=4).map(district).collect::<Vec<_>>()})
}

fn statement(actor: &str, ts: &str, verb: &str, result: Value) -> Value {
    json!({
        "actor": {"account": {"name": actor}},
        "verb": {"id": format!("https://example.org/xapi/verbs/{verb}")},
        "timestamp": ts,
        "context": {"extensions": {"https://example.org/xapi/level": 1}},
        "result": {"extensions": result}
    })
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let statements = json!([
        statement("ana", "2024-05-02T09:00:00Z", "turn-completed", json!({"state": state(120, 31.0)})),
        statement("ana", "2024-05-02T09:00:20Z", "held-fundraiser", json!({"district": 4})),
        statement("ana", "2024-05-02T09:00:40Z", "rallied", json!({"district": 2})),
        statement("ana", "2024-05-02T09:01:00Z", "turn-completed", json!({"state": state(180, 42.5)})),
        statement("ben", "2024-05-02T10:00:00Z", "turn-completed", json!({"state": state(90, 8.0)})),
        statement("ben", "2024-05-02T10:00:05Z", "danced", json!({"district": 1})),
        statement("ben", "2024-05-02T10:00:10Z", "turn-completed", json!({"state": state(95, 6.5)})),
    ]);

    let ingest = ingest_xapi(&statements.to_string())?;
    for w in &ingest.warnings {
        println!("warning: {w}");
    }
    let ds = &ingest.dataset;
    println!("actions: {:?}", ds.action_vocabulary());
    for p in ds.playthroughs() {
        for t in &p.turns {
            let acted: Vec<String> = t
                .districts
                .iter()
                .flat_map(|d| d.actions.iter().filter(|a| *a.1 == 1).map(move |(a, _)| format!("{a}@{}", d.district_id)))
                .collect();
            println!("{} turn {} votes {} duration {}s {:?}", p.player_id, t.turn_index, t.total_votes, t.duration_s, acted);
        }
    }
    Ok(())
}
