use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::kinetics::Color;

use super::AnimationFormat;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub left: f64,
    pub right: f64,
    pub top: f64,
    pub bottom: f64,
}

impl Margins {
    pub const fn uniform(m: f64) -> Self {
        Margins { left: m, right: m, top: m, bottom: m }
    }
}

impl Default for Margins {
    fn default() -> Self {
        Margins { left: 60.0, right: 20.0, top: 20.0, bottom: 40.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderConfig {
    pub width: u32,
    pub height: u32,
    pub margins: Margins,
    pub line_width: f64,
    pub background: Color,
    /// Samples per pixel along each axis: 1, 2 or 4.
    pub supersample: u32,
    pub n_frames: usize,
    pub fps: u32,
    pub y_domain: Option<[f64; 2]>,
    pub format: AnimationFormat,
    /// Draw axis lines and tick marks.
    pub axes: bool,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            width: 960,
            height: 540,
            margins: Margins::default(),
            line_width: 1.5,
            background: Color::new(0.06, 0.06, 0.08, 1.0),
            supersample: 2,
            n_frames: 60,
            fps: 30,
            y_domain: None,
            format: AnimationFormat::Apng,
            axes: false,
        }
    }
}

impl RenderConfig {
    /// Problems with this configuration, as `(field, message)` pairs.
    pub fn problems(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if self.width < 64 || self.height < 64 {
            out.push(("width", format!("image must be at least 64x64, got {}x{}", self.width, self.height)));
        }
        if self.width > 8192 || self.height > 8192 {
            out.push(("width", format!("image must be at most 8192x8192, got {}x{}", self.width, self.height)));
        }
        if !(self.line_width.is_finite() && self.line_width >= 1.0) {
            out.push(("line_width", format!("must be >= 1, got {}", self.line_width)));
        }
        if !matches!(self.supersample, 1 | 2 | 4) {
            out.push(("supersample", format!("must be 1, 2 or 4, got {}", self.supersample)));
        }
        if self.n_frames < 1 {
            out.push(("n_frames", "must be >= 1".into()));
        }
        if self.fps < 1 || self.fps > u16::MAX as u32 {
            out.push(("fps", format!("must be in 1..=65535, got {}", self.fps)));
        }
        if !self.background.is_valid() {
            out.push(("background", "channels must lie in [0, 1]".into()));
        }
        let m = self.margins;
        let ms = [m.left, m.right, m.top, m.bottom];
        if ms.iter().any(|v| !v.is_finite() || *v < 0.0) {
            out.push(("margins", "must be finite and >= 0".into()));
        } else if m.left + m.right >= self.width as f64 || m.top + m.bottom >= self.height as f64 {
            out.push(("margins", "leave no plot area".into()));
        }
        if let Some([lo, hi]) = self.y_domain {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                out.push(("y_domain", format!("needs finite lo < hi, got [{lo}, {hi}]")));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlotArea {
    pub left: f64,
    pub right: f64,
    pub top: f64,
    pub bottom: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tick {
    pub position: f64,
    pub label: String,
}

/// Pixel-space chart: one polyline per playthrough, one vertex per turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartGeometry {
    pub width: u32,
    pub height: u32,
    pub plot: PlotArea,
    pub polylines: Vec<Vec<[f64; 2]>>,
    pub x_ticks: Vec<Tick>,
    pub y_ticks: Vec<Tick>,
}

/// Total votes against turn index. The y range is `[0, max votes]` unless
/// `config.y_domain` overrides it.
pub fn layout(dataset: &Dataset, config: &RenderConfig) -> ChartGeometry {
    let m = config.margins;
    let plot = PlotArea {
        left: m.left,
        right: config.width as f64 - m.right,
        top: m.top,
        bottom: config.height as f64 - m.bottom,
    };
    let max_turn = dataset.max_turn_index();
    let max_votes = dataset
        .iter_points()
        .map(|(_, t)| t.total_votes)
        .max()
        .unwrap_or(0);
    let [y_lo, y_hi] = config
        .y_domain
        .unwrap_or(if max_votes > 0 { [0.0, max_votes as f64] } else { [0.0, 1.0] });

    let x_of = |turn: u32| {
        if max_turn == 0 {
            plot.left
        } else {
            plot.left + (plot.right - plot.left) * (turn as f64 / max_turn as f64)
        }
    };
    let y_of = |votes: f64| plot.bottom - (plot.bottom - plot.top) * ((votes - y_lo) / (y_hi - y_lo));

    let polylines = dataset
        .playthroughs()
        .iter()
        .map(|p| {
            p.turns
                .iter()
                .map(|t| [x_of(t.turn_index), y_of(t.total_votes as f64)])
                .collect()
        })
        .collect();

    let stride = (max_turn / 10).max(1);
    let x_ticks = (0..=max_turn)
        .step_by(stride as usize)
        .map(|turn| Tick { position: x_of(turn), label: turn.to_string() })
        .collect();
    let y_ticks = (0..=4)
        .map(|k| {
            let v = y_lo + (y_hi - y_lo) * k as f64 / 4.0;
            Tick { position: y_of(v), label: format!("{}", v.round()) }
        })
        .collect();

    ChartGeometry { width: config.width, height: config.height, plot, polylines, x_ticks, y_ticks }
}
