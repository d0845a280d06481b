//! Render a looping animation of a synthetic dataset and write it as APNG,
//! GIF and a PNG sequence.
//!
//! ```text
//! cargo run --release -p kinetiq --example render_apng -- out_dir
//! ```

use std::path::PathBuf;

use kinetiq::data::{build_registry, generate_synthetic, DomainOverrides, SimConfig};
use kinetiq::query::{parse_query, render_document};
use kinetiq::render::{write_animation, AnimationFormat};

const DOC: &str = r#"{
  "layers": [
    {"curve": {"preset": {"name": "flat", "value": 1}},
     "scale": {"stops": [[0, [0.35, 0.35, 0.4, 0.25]]]},
     "parameter": "baseline", "blend": "add"},
    {"curve": {"preset": {"name": "pulse", "center": 0.5, "width": 0.6}},
     "scale": {"stops": [[0, [0, 0, 0, 0]], [1, [1, 0.45, 0.1, 0.75]]]},
     "parameter": "action.grassroots.district.1", "blend": "add"}
  ],
  "render": {"width": 480, "height": 270, "n_frames": 24, "fps": 24, "axes": true}
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&dir)?;

    let ds = generate_synthetic(&SimConfig::new(42, 40, 15, 4))?;
    let registry = build_registry(&ds, &DomainOverrides::new())?;
    let (doc, _) = parse_query(DOC)?;
    let frames = render_document(&doc, &ds, &registry)?.output;

    for (format, name) in [
        (AnimationFormat::Apng, "loop.png"),
        (AnimationFormat::Gif, "loop.gif"),
        (AnimationFormat::PngSequence, "frames"),
    ] {
        let written = write_animation(&frames, format, doc.render.fps, &dir.join(name))?;
        println!("{format}: {} file(s), first {}", written.len(), written[0].display());
    }
    Ok(())
}
