use serde::{Deserialize, Serialize};

use super::{Color, KineticsError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColorStop {
    pub position: f64,
    pub color: Color,
}

/// Piecewise-linear RGBA gradient over `[0, 1]`.
///
/// Stops at the same position form a hard step; the later stop owns the
/// shared position.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorScale {
    stops: Vec<ColorStop>,
}

impl ColorScale {
    pub fn new(stops: Vec<ColorStop>) -> Result<Self, KineticsError> {
        if stops.is_empty() {
            return Err(KineticsError::EmptyScale);
        }
        for (i, s) in stops.iter().enumerate() {
            if !(s.position.is_finite() && (0.0..=1.0).contains(&s.position)) {
                return Err(KineticsError::StopPosition { index: i, position: s.position });
            }
            if !s.color.is_valid() {
                return Err(KineticsError::StopColor { index: i });
            }
            if i > 0 && stops[i - 1].position > s.position {
                return Err(KineticsError::StopOrder { index: i });
            }
        }
        Ok(ColorScale { stops })
    }

    pub fn from_pairs(pairs: &[(f64, Color)]) -> Result<Self, KineticsError> {
        Self::new(
            pairs
                .iter()
                .map(|&(position, color)| ColorStop { position, color })
                .collect(),
        )
    }

    /// Two-stop gradient from `lo` at 0 to `hi` at 1.
    pub fn linear(lo: Color, hi: Color) -> Self {
        Self::from_pairs(&[(0.0, lo), (1.0, hi)]).expect("valid two-stop scale")
    }

    pub fn constant(color: Color) -> Self {
        Self::from_pairs(&[(0.0, color)]).expect("valid one-stop scale")
    }

    pub fn stops(&self) -> &[ColorStop] {
        &self.stops
    }

    /// Color at interpolation parameter `c` (clamped to `[0, 1]`).
    pub fn sample(&self, c: f64) -> Color {
        let c = if c.is_nan() { 0.0 } else { c.clamp(0.0, 1.0) };
        let stops = &self.stops;
        // Index of the first stop strictly after `c`.
        let next = stops.partition_point(|s| s.position <= c);
        if next == 0 {
            return stops[0].color;
        }
        if next == stops.len() {
            return stops[stops.len() - 1].color;
        }
        let (lo, hi) = (stops[next - 1], stops[next]);
        let w = (c - lo.position) / (hi.position - lo.position);
        lo.color.lerp(hi.color, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const RED: Color = Color::new(1.0, 0.0, 0.0, 1.0);
    const BLUE: Color = Color::new(0.0, 0.0, 1.0, 1.0);

    #[test]
    fn midpoint() {
        let s = ColorScale::linear(Color::TRANSPARENT, Color::WHITE);
        assert_eq!(s.sample(0.5), Color::new(0.5, 0.5, 0.5, 0.5));
    }

    #[test]
    fn single_stop_is_constant() {
        let s = ColorScale::from_pairs(&[(0.3, RED)]).unwrap();
        for c in [-1.0, 0.0, 0.3, 0.7, 1.0, 2.0] {
            assert_eq!(s.sample(c), RED);
        }
    }

    #[test]
    fn clamps_beyond_last_stop() {
        let s = ColorScale::linear(Color::TRANSPARENT, Color::WHITE);
        assert_eq!(s.sample(1.2), Color::WHITE);
        assert_eq!(s.sample(-0.2), Color::TRANSPARENT);
    }

    #[test]
    fn coincident_stops_form_step() {
        let s = ColorScale::from_pairs(&[(0.0, RED), (0.5, RED), (0.5, BLUE), (1.0, BLUE)]).unwrap();
        assert_eq!(s.sample(0.5 - 1e-12), RED);
        assert_eq!(s.sample(0.5), BLUE);
        assert_eq!(s.sample(0.75), BLUE);
    }

    #[test]
    fn invalid_scales_rejected() {
        assert!(matches!(ColorScale::new(vec![]), Err(KineticsError::EmptyScale)));
        assert!(ColorScale::from_pairs(&[(0.6, RED), (0.4, BLUE)]).is_err());
        assert!(ColorScale::from_pairs(&[(1.5, RED)]).is_err());
        assert!(ColorScale::from_pairs(&[(0.0, Color::new(0.0, 2.0, 0.0, 1.0))]).is_err());
    }

    fn color() -> impl Strategy<Value = Color> {
        (0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0)
            .prop_map(|(r, g, b, a)| Color::new(r, g, b, a))
    }

    fn scale() -> impl Strategy<Value = ColorScale> {
        prop::collection::vec((0.0f64..=1.0, color()), 1..6).prop_map(|mut v| {
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            ColorScale::from_pairs(&v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn channels_in_unit_interval(s in scale(), c in -2.0f64..2.0) {
            prop_assert!(s.sample(c).is_valid());
        }

        #[test]
        fn monotone_between_adjacent_stops(a in color(), b in color(), steps in 2usize..50) {
            let s = ColorScale::linear(a, b);
            let samples: Vec<[f64; 4]> =
                (0..=steps).map(|i| s.sample(i as f64 / steps as f64).to_array()).collect();
            for ch in 0..4 {
                let rising = b.to_array()[ch] >= a.to_array()[ch];
                for w in samples.windows(2) {
                    if rising {
                        prop_assert!(w[1][ch] >= w[0][ch]);
                    } else {
                        prop_assert!(w[1][ch] <= w[0][ch]);
                    }
                }
            }
        }
    }
}
