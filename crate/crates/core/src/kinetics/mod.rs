//! Per-layer lookup primitives: animation curves and color scales.

mod color;
mod curve;
mod scale;

pub use color::Color;
pub use curve::{wrap_phase, AnimationCurve, CurvePreset, Keyframe, RAMP_EPSILON};
pub use scale::{ColorScale, ColorStop};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KineticsError {
    #[error("curve has no keyframes")]
    EmptyCurve,
    #[error("keyframe {index}: phase {phase} outside [0, 1)")]
    KeyframePhase { index: usize, phase: f64 },
    #[error("keyframe {index}: value {value} outside [0, 1]")]
    KeyframeValue { index: usize, value: f64 },
    #[error("keyframe {index}: phase not strictly increasing")]
    KeyframeOrder { index: usize },
    #[error("{0}")]
    PresetParam(String),
    #[error("color scale has no stops")]
    EmptyScale,
    #[error("stop {index}: position {position} outside [0, 1]")]
    StopPosition { index: usize, position: f64 },
    #[error("stop {index}: color channel outside [0, 1]")]
    StopColor { index: usize },
    #[error("stop {index}: position decreases")]
    StopOrder { index: usize },
}
