//! Parse, validate and canonicalize a query document.

use kinetiq::data::{build_registry, generate_synthetic, DomainOverrides, SimConfig};
use kinetiq::query::{parse_query, serialize_query, validate_against};

const DOC: &str = r#"{
  "layers": [
    {"curve": {"preset": "ramp"},
     "scale": {"stops": [[0, [0, 0, 0, 0]], [1, [0.2, 0.6, 1, 1]]]},
     "parameter": "district.3.favorability", "blend": "add", "comment": "ignored"},
    {"curve": {"keyframes": [[0, 1], [0.5, 0.2]]},
     "scale": {"stops": [[0, [1, 1, 1, 0.3]], [1, [1, 1, 1, 1]]]},
     "parameter": "district.7.undecided", "blend": "mask"}
  ],
  "render": {"width": 640, "height": 360}
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (doc, warnings) = parse_query(DOC)?;
    for w in &warnings {
        println!("{w}");
    }

    let ds = generate_synthetic(&SimConfig::new(1, 5, 5, 4))?;
    let registry = build_registry(&ds, &DomainOverrides::new())?;
    for d in validate_against(&doc, &registry) {
        println!("{d}");
    }

    match parse_query(r#"{"layers": [{"curve": {"keyframes": []}, "scale": {"stops": []}, "parameter": "x", "blend": "screen"}]}"#) {
        Ok(_) => unreachable!(),
        Err(e) => {
            for d in e.errors() {
                println!("{d}");
            }
        }
    }

    println!("\ncanonical form:\n{}", serialize_query(&doc));
    Ok(())
}
