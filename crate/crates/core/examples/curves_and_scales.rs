//! Sample the built-in curves over one loop and map values through a scale.

use kinetiq::kinetics::{AnimationCurve, Color, ColorScale};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let curves = [
        ("flat 0.5", AnimationCurve::flat(0.5)?),
        ("pulse", AnimationCurve::pulse(0.25, 0.5)?),
        ("ramp", AnimationCurve::ramp()),
        ("keys", AnimationCurve::from_pairs(&[(0.1, 0.0), (0.4, 1.0), (0.7, 0.3)])?),
    ];
    print!("{:>9}", "t");
    for (name, _) in &curves {
        print!("{name:>10}");
    }
    println!();
    for k in 0..=8 {
        let t = k as f64 / 8.0;
        print!("{t:>9.3}");
        for (_, c) in &curves {
            print!("{:>10.4}", c.eval(t));
        }
        println!();
    }

    // Two stops at 0.5 make a hard step; the later one wins at 0.5 itself.
    let scale = ColorScale::from_pairs(&[
        (0.0, Color::new(0.0, 0.0, 1.0, 0.0)),
        (0.5, Color::new(0.0, 0.0, 1.0, 1.0)),
        (0.5, Color::new(1.0, 0.0, 0.0, 1.0)),
        (1.0, Color::new(1.0, 1.0, 0.0, 1.0)),
    ])?;
    for c in [0.0, 0.25, 0.4999, 0.5, 0.75, 1.0] {
        println!("scale({c}) = {:?}", scale.sample(c).to_rgba8());
    }
    Ok(())
}
