//! Generate a seeded synthetic dataset and summarize each player archetype.

use std::collections::BTreeMap;

use kinetiq::data::{generate_synthetic, parse_mix, serialize_dataset, SimConfig, Strategy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut config = SimConfig::new(42, 100, 20, 4);
    config.strategy_mix = parse_mix("deliberate=0.5,hurried=0.3,scattered=0.2")?;
    let ds = generate_synthetic(&config)?;

    let mut stats: BTreeMap<Strategy, (usize, f64, u64, usize)> = BTreeMap::new();
    for p in ds.playthroughs() {
        let s = stats.entry(Strategy::from_player_id(&p.player_id).unwrap()).or_default();
        s.0 += 1;
        for t in &p.turns {
            s.1 += t.duration_s;
            s.3 += 1;
        }
        s.2 += p.turns.last().map_or(0, |t| t.total_votes);
    }
    println!("{:<11} {:>7} {:>14} {:>12}", "strategy", "players", "mean duration", "final votes");
    for (s, (n, dur, votes, turns)) in stats {
        println!("{:<11} {n:>7} {:>13.1}s {:>12}", s.name(), dur / turns as f64, votes / n as u64);
    }

    let text = serialize_dataset(&ds);
    println!("\nfirst record ({} bytes of JSONL total):", text.len());
    println!("{}...", &text[..text.find('\n').unwrap().min(240)]);
    Ok(())
}
