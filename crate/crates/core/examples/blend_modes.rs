//! How the three blend modes combine a running color with a layer's color.

use kinetiq::kinetics::Color;
use kinetiq::pipeline::{blend, BlendMode};

fn main() {
    let prev = Color::new(0.6, 0.2, 0.1, 0.7);
    let cur = Color::new(0.5, 0.5, 0.5, 0.4);
    println!("prev     {:?}", prev.to_array());
    println!("cur      {:?}", cur.to_array());
    for mode in BlendMode::ALL {
        println!("{:<8} {:?}", mode.name(), blend(mode, prev, cur).to_array());
    }

    // The fold starts from transparent black, so a first layer that
    // multiplies or masks leaves nothing visible.
    let first = blend(BlendMode::Multiply, Color::TRANSPARENT, cur);
    println!("multiply onto the seed: {:?}", first.to_array());
}
