use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::kinetics::Color;

/// How a layer's sampled color combines with the color flowing in from the
/// layer above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlendMode {
    /// Channel-wise sum, saturating at 1. Applies to alpha too.
    Add,
    /// Channel-wise product. Applies to alpha too.
    Multiply,
    /// Keeps the previous color channels; alpha becomes the smaller of the two.
    Mask,
}

impl BlendMode {
    pub const ALL: [BlendMode; 3] = [BlendMode::Add, BlendMode::Multiply, BlendMode::Mask];

    pub fn name(self) -> &'static str {
        match self {
            BlendMode::Add => "add",
            BlendMode::Multiply => "multiply",
            BlendMode::Mask => "mask",
        }
    }
}

impl fmt::Display for BlendMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BlendMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BlendMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown blend mode {s:?}; allowed: add, multiply, mask"))
    }
}

pub fn blend(mode: BlendMode, prev: Color, cur: Color) -> Color {
    match mode {
        BlendMode::Add => Color::new(
            (prev.r + cur.r).min(1.0),
            (prev.g + cur.g).min(1.0),
            (prev.b + cur.b).min(1.0),
            (prev.a + cur.a).min(1.0),
        ),
        BlendMode::Multiply => Color::new(prev.r * cur.r, prev.g * cur.g, prev.b * cur.b, prev.a * cur.a),
        BlendMode::Mask => Color::new(prev.r, prev.g, prev.b, prev.a.min(cur.a)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_sums_channels() {
        let out = blend(BlendMode::Add, Color::new(0.2, 0.1, 0.0, 0.3), Color::new(0.3, 0.2, 0.5, 0.4));
        let want = [0.5, 0.3, 0.5, 0.7];
        for (o, w) in out.to_array().iter().zip(want) {
            assert!((o - w).abs() < 1e-15);
        }
        assert_eq!(blend(BlendMode::Add, Color::WHITE, Color::WHITE), Color::WHITE);
    }

    #[test]
    fn multiply_identity() {
        let x = Color::new(0.3, 0.6, 0.9, 0.42);
        assert_eq!(blend(BlendMode::Multiply, Color::WHITE, x), x);
    }

    #[test]
    fn mask_copies_prev_color_and_takes_min_alpha() {
        let out = blend(BlendMode::Mask, Color::new(0.2, 0.4, 0.6, 0.8), Color::new(0.9, 0.9, 0.9, 0.3));
        assert_eq!(out, Color::new(0.2, 0.4, 0.6, 0.3));
    }

    #[test]
    fn mode_names() {
        assert_eq!("mask".parse::<BlendMode>().unwrap(), BlendMode::Mask);
        let err = "screen".parse::<BlendMode>().unwrap_err();
        assert!(err.contains("add, multiply, mask"));
        assert_eq!(serde_json::to_string(&BlendMode::Multiply).unwrap(), "\"multiply\"");
    }
}
