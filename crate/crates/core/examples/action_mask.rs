//! Highlight turns with a fundraiser in district 4: an opaque baseline
//! layer masked by the action flag, so only those turns stay visible at
//! the pulse's peak.

use kinetiq::data::{build_registry, generate_synthetic, DomainOverrides, SimConfig};
use kinetiq::query::{evaluate_document, parse_query};

const DOC: &str = r#"{"layers": [
  {"curve": {"preset": {"name": "flat", "value": 1}},
   "scale": {"stops": [[0, [0.9, 0.4, 0.1, 1]]]},
   "parameter": "baseline", "blend": "add"},
  {"curve": {"preset": {"name": "pulse", "center": 0.5, "width": 0.5}},
   "scale": {"stops": [[0, [0, 0, 0, 0]], [1, [1, 1, 1, 1]]]},
   "parameter": "action.fundraiser.district.4", "blend": "mask"}
]}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = generate_synthetic(&SimConfig::new(42, 20, 12, 4))?;
    let registry = build_registry(&ds, &DomainOverrides::new())?;
    let (doc, _) = parse_query(DOC)?;
    let frames = evaluate_document(&doc, &ds, &registry, 4)?.output;

    let peak = &frames.buffers[2];
    println!("t = {}", peak.t);
    for (i, (pt, rec)) in ds.iter_points().enumerate().take(24) {
        let flag = rec.district(4).map_or(0, |d| d.actions.get("fundraiser").copied().unwrap_or(0));
        println!("{}/{:>2} fundraiser={flag} alpha={:.3}", ds.playthroughs()[pt.playthrough].player_id, pt.turn_index, peak.colors[i].a);
    }
    Ok(())
}
