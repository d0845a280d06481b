//! Periodic animation curves.
//!
//! A curve is a list of `(phase, value)` keyframes over one loop of the
//! animation. Evaluation reduces time to its phase in `[0, 1)` and linearly
//! interpolates between neighbouring keyframes; the segment between the last
//! keyframe and the first wraps across the loop seam.

use serde::{Deserialize, Serialize};

use super::KineticsError;

/// Denominator of the gap left by [`AnimationCurve::ramp`] before the seam.
pub const RAMP_EPSILON: f64 = 1.0 / 1024.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keyframe {
    pub phase: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnimationCurve {
    keyframes: Vec<Keyframe>,
}

/// Named curve shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvePreset {
    /// Constant value.
    Flat { value: f64 },
    /// Triangle peaking at `center`, zero outside `center ± width / 2`.
    Pulse { center: f64, width: f64 },
    /// Linear rise from 0 at phase 0 to 1 just before the seam.
    Ramp,
}

impl AnimationCurve {
    pub fn new(keyframes: Vec<Keyframe>) -> Result<Self, KineticsError> {
        if keyframes.is_empty() {
            return Err(KineticsError::EmptyCurve);
        }
        for (i, k) in keyframes.iter().enumerate() {
            if !(k.phase.is_finite() && (0.0..1.0).contains(&k.phase)) {
                return Err(KineticsError::KeyframePhase { index: i, phase: k.phase });
            }
            if !(k.value.is_finite() && (0.0..=1.0).contains(&k.value)) {
                return Err(KineticsError::KeyframeValue { index: i, value: k.value });
            }
            if i > 0 && keyframes[i - 1].phase >= k.phase {
                return Err(KineticsError::KeyframeOrder { index: i });
            }
        }
        Ok(AnimationCurve { keyframes })
    }

    /// Build from `(phase, value)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self, KineticsError> {
        Self::new(
            pairs
                .iter()
                .map(|&(phase, value)| Keyframe { phase, value })
                .collect(),
        )
    }

    pub fn keyframes(&self) -> &[Keyframe] {
        &self.keyframes
    }

    pub fn flat(value: f64) -> Result<Self, KineticsError> {
        if !(value.is_finite() && (0.0..=1.0).contains(&value)) {
            return Err(KineticsError::PresetParam(format!(
                "flat value {value} outside [0, 1]"
            )));
        }
        Self::from_pairs(&[(0.0, value)])
    }

    pub fn pulse(center: f64, width: f64) -> Result<Self, KineticsError> {
        if !(center.is_finite() && (0.0..1.0).contains(&center)) {
            return Err(KineticsError::PresetParam(format!(
                "pulse center {center} outside [0, 1)"
            )));
        }
        if !(width.is_finite() && width > 0.0 && width <= 1.0) {
            return Err(KineticsError::PresetParam(format!(
                "pulse width {width} outside (0, 1]"
            )));
        }
        let half = width / 2.0;
        let mut pairs = vec![(center, 1.0), (wrap_phase(center - half), 0.0)];
        // A full-width pulse has coincident rise and fall feet.
        if width < 1.0 {
            pairs.push((wrap_phase(center + half), 0.0));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self::from_pairs(&pairs)
    }

    pub fn ramp() -> Self {
        Self::from_pairs(&[(0.0, 0.0), (1.0 - RAMP_EPSILON, 1.0)]).expect("valid ramp")
    }

    pub fn from_preset(preset: CurvePreset) -> Result<Self, KineticsError> {
        match preset {
            CurvePreset::Flat { value } => Self::flat(value),
            CurvePreset::Pulse { center, width } => Self::pulse(center, width),
            CurvePreset::Ramp => Ok(Self::ramp()),
        }
    }

    /// Curve value at time `t`; periodic with period 1.
    pub fn eval(&self, t: f64) -> f64 {
        let keys = &self.keyframes;
        if keys.len() == 1 {
            return keys[0].value;
        }
        let phase = wrap_phase(t);
        let first = keys[0];
        let last = keys[keys.len() - 1];

        // Index of the first keyframe strictly after `phase`.
        let next = keys.partition_point(|k| k.phase <= phase);
        let (from, to) = if next == 0 {
            // Before the first keyframe: the seam segment, shifted back one period.
            (
                Keyframe { phase: last.phase - 1.0, value: last.value },
                first,
            )
        } else if next == keys.len() {
            (last, Keyframe { phase: first.phase + 1.0, value: first.value })
        } else {
            (keys[next - 1], keys[next])
        };
        let w = (phase - from.phase) / (to.phase - from.phase);
        (from.value + (to.value - from.value) * w).clamp(0.0, 1.0)
    }
}

/// Reduce `t` to its loop phase in `[0, 1)`.
pub fn wrap_phase(t: f64) -> f64 {
    let p = t.rem_euclid(1.0);
    // rem_euclid can round up to exactly 1.0 for tiny negative inputs.
    if p >= 1.0 {
        0.0
    } else {
        p
    }
}
