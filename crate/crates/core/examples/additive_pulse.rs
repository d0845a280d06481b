//! A faint baseline plus an additive pulse on rallies in district 2. At the
//! pulse's peak, rally turns are brighter by exactly the pulse layer's alpha.

use kinetiq::data::{build_registry, generate_synthetic, DomainOverrides, SimConfig};
use kinetiq::pipeline::{evaluate_point_traced, EvalContext};
use kinetiq::query::parse_query;

const DOC: &str = r#"{"layers": [
  {"curve": {"preset": {"name": "flat", "value": 1}},
   "scale": {"stops": [[0, [0.5, 0.5, 0.5, 0.15]]]},
   "parameter": "baseline", "blend": "add"},
  {"curve": {"preset": {"name": "pulse", "center": 0.25, "width": 0.3}},
   "scale": {"stops": [[0, [0, 0, 0, 0]], [1, [1, 0.8, 0, 0.6]]]},
   "parameter": "action.rally.district.2", "blend": "add"}
]}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = generate_synthetic(&SimConfig::new(9, 6, 10, 4))?;
    let registry = build_registry(&ds, &DomainOverrides::new())?;
    let (doc, _) = parse_query(DOC)?;
    let query = doc.query()?;
    let ctx = EvalContext::new(&ds, &registry);

    for t in [0.0, 0.15, 0.25, 0.35] {
        let mut on = None;
        let mut off = None;
        for (pt, rec) in ds.iter_points() {
            let rally = rec.district(2).and_then(|d| d.actions.get("rally")).copied() == Some(1);
            let (color, traces) = evaluate_point_traced(&query, t, pt, &ctx);
            let slot = if rally { &mut on } else { &mut off };
            slot.get_or_insert((color.a, traces[1].sampled.a));
        }
        let (on, off) = (on.unwrap_or_default(), off.unwrap_or_default());
        println!("t={t:<5} rally alpha {:.3} (pulse {:.3})  other alpha {:.3}", on.0, on.1, off.0);
    }
    Ok(())
}
