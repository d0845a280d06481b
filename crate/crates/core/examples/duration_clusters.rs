//! Encode normalized turn duration as opacity. Hurried players' lines come
//! out visibly fainter than deliberate players'.

use kinetiq::data::{build_registry, generate_synthetic, parse_mix, DomainOverrides, SimConfig, Strategy};
use kinetiq::query::{evaluate_document, parse_query};

const DOC: &str = r#"{"layers": [{
  "curve": {"preset": {"name": "flat", "value": 1}},
  "scale": {"stops": [[0, [0.1, 0.3, 0.9, 0]], [1, [0.1, 0.3, 0.9, 1]]]},
  "parameter": "duration", "blend": "add"
}]}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut config = SimConfig::new(42, 100, 20, 4);
    config.strategy_mix = parse_mix("deliberate=0.7,hurried=0.3")?;
    let ds = generate_synthetic(&config)?;
    let registry = build_registry(&ds, &DomainOverrides::new())?;
    let (doc, _) = parse_query(DOC)?;
    let frame = &evaluate_document(&doc, &ds, &registry, 1)?.output.buffers[0];

    let mut sums = [(0.0, 0); 3];
    for (color, pt) in frame.colors.iter().zip(ds.points()) {
        let s = Strategy::from_player_id(&ds.playthroughs()[pt.playthrough].player_id).unwrap();
        let slot = &mut sums[Strategy::ALL.iter().position(|x| *x == s).unwrap()];
        slot.0 += color.a;
        slot.1 += 1;
    }
    for (s, (sum, n)) in Strategy::ALL.iter().zip(sums) {
        if n > 0 {
            println!("{:<10} mean alpha {:.4} over {n} points", s.name(), sum / n as f64);
        }
    }
    Ok(())
}
