use crate::data::ParameterRef;
use crate::kinetics::{AnimationCurve, Color, ColorScale};

use super::{blend, BlendMode, PipelineError};

/// One kinetic query unit: binds a parameter to a time-varying color effect.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingLayer {
    pub curve: AnimationCurve,
    pub scale: ColorScale,
    pub parameter: ParameterRef,
    pub mode: BlendMode,
    /// Any finite real; the interpolation parameter is clamped afterwards.
    pub multiplier: f64,
}

impl EncodingLayer {
    pub fn new(curve: AnimationCurve, scale: ColorScale, parameter: ParameterRef, mode: BlendMode) -> Self {
        EncodingLayer { curve, scale, parameter, mode, multiplier: 1.0 }
    }

    pub fn with_multiplier(mut self, multiplier: f64) -> Self {
        self.multiplier = multiplier;
        self
    }

    /// Apply this layer given the curve value and the normalized parameter.
    #[inline]
    pub fn apply(&self, prev: Color, curve_value: f64, param: f64) -> (Color, LayerTrace) {
        let c = (curve_value * param * self.multiplier).clamp(0.0, 1.0);
        let sampled = self.scale.sample(c);
        let blended = blend(self.mode, prev, sampled);
        (blended, LayerTrace { p: param, a_t: curve_value, c, sampled, blended })
    }
}

/// Intermediate values of one layer evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerTrace {
    /// Normalized parameter value.
    pub p: f64,
    /// Curve value at the frame time.
    pub a_t: f64,
    /// Interpolation parameter, `clamp(a_t * p * multiplier, 0, 1)`.
    pub c: f64,
    pub sampled: Color,
    pub blended: Color,
}

/// Ordered, nonempty layer stack. Index 0 is the top layer, evaluated first.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticQuery {
    layers: Vec<EncodingLayer>,
}

impl KineticQuery {
    pub fn new(layers: Vec<EncodingLayer>) -> Result<Self, PipelineError> {
        if layers.is_empty() {
            return Err(PipelineError::NoLayers);
        }
        if let Some(i) = layers.iter().position(|l| !l.multiplier.is_finite()) {
            return Err(PipelineError::Multiplier { layer: i });
        }
        Ok(KineticQuery { layers })
    }

    pub fn layers(&self) -> &[EncodingLayer] {
        &self.layers
    }
}
