use serde_json::{json, Map, Value};

use crate::data::ParameterRef;
use crate::kinetics::{AnimationCurve, ColorScale, CurvePreset, KineticsError};
use crate::pipeline::{BlendMode, EncodingLayer, KineticQuery, PipelineError};
use crate::render::RenderConfig;

use super::{Diagnostic, QueryError};

/// A curve as written: a named preset or explicit keyframes. Kept in this
/// form so documents serialize back the way they were written.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveSpec {
    Preset(CurvePreset),
    Keyframes(Vec<[f64; 2]>),
}

impl CurveSpec {
    pub fn build(&self) -> Result<AnimationCurve, KineticsError> {
        match self {
            CurveSpec::Preset(p) => AnimationCurve::from_preset(*p),
            CurveSpec::Keyframes(k) => {
                let pairs: Vec<(f64, f64)> = k.iter().map(|[t, v]| (*t, *v)).collect();
                AnimationCurve::from_pairs(&pairs)
            }
        }
    }

    fn to_json(&self) -> Value {
        match self {
            CurveSpec::Preset(CurvePreset::Flat { value }) => json!({"preset": {"name": "flat", "value": value}}),
            CurveSpec::Preset(CurvePreset::Pulse { center, width }) => {
                json!({"preset": {"name": "pulse", "center": center, "width": width}})
            }
            CurveSpec::Preset(CurvePreset::Ramp) => json!({"preset": {"name": "ramp"}}),
            CurveSpec::Keyframes(k) => json!({ "keyframes": k }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerSpec {
    pub curve: CurveSpec,
    pub scale: ColorScale,
    pub parameter: ParameterRef,
    pub blend: BlendMode,
    pub multiplier: f64,
}

impl LayerSpec {
    pub fn new(curve: CurveSpec, scale: ColorScale, parameter: ParameterRef, blend: BlendMode) -> Self {
        LayerSpec { curve, scale, parameter, blend, multiplier: 1.0 }
    }

    pub fn with_multiplier(mut self, multiplier: f64) -> Self {
        self.multiplier = multiplier;
        self
    }

    pub fn to_layer(&self) -> Result<EncodingLayer, KineticsError> {
        Ok(EncodingLayer::new(self.curve.build()?, self.scale.clone(), self.parameter.clone(), self.blend)
            .with_multiplier(self.multiplier))
    }

    fn to_json(&self) -> Value {
        let stops: Vec<Value> = self
            .scale
            .stops()
            .iter()
            .map(|s| json!([s.position, s.color.to_array()]))
            .collect();
        json!({
            "curve": self.curve.to_json(),
            "scale": {"stops": stops},
            "parameter": self.parameter.to_string(),
            "blend": self.blend.name(),
            "multiplier": self.multiplier,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryDocument {
    /// Dataset path or service id.
    pub dataset: Option<String>,
    /// Free-form metadata, carried through untouched.
    pub meta: Map<String, Value>,
    pub render: RenderConfig,
    pub layers: Vec<LayerSpec>,
}

impl QueryDocument {
    pub fn new(layers: Vec<LayerSpec>) -> Self {
        QueryDocument { dataset: None, meta: Map::new(), render: RenderConfig::default(), layers }
    }

    /// The executable layer stack.
    ///
    /// # Errors
    ///
    /// Only for documents assembled by hand; parsed documents always build.
    pub fn query(&self) -> Result<KineticQuery, QueryError> {
        let mut diagnostics = Vec::new();
        let mut layers = Vec::with_capacity(self.layers.len());
        for (i, l) in self.layers.iter().enumerate() {
            match l.to_layer() {
                Ok(layer) => layers.push(layer),
                Err(e) => diagnostics.push(Diagnostic::error(format!("/layers/{i}/curve"), e.to_string())),
            }
        }
        if diagnostics.is_empty() {
            match KineticQuery::new(layers) {
                Ok(q) => return Ok(q),
                Err(PipelineError::NoLayers) => diagnostics.push(Diagnostic::error("/layers", "query needs at least one layer")),
                Err(PipelineError::Multiplier { layer }) => {
                    diagnostics.push(Diagnostic::error(format!("/layers/{layer}/multiplier"), "multiplier must be finite"))
                }
            }
        }
        Err(QueryError { diagnostics })
    }

    pub fn to_json(&self) -> Value {
        let r = &self.render;
        let m = r.margins;
        let mut render = json!({
            "width": r.width,
            "height": r.height,
            "margins": {"left": m.left, "right": m.right, "top": m.top, "bottom": m.bottom},
            "line_width": r.line_width,
            "background": r.background.to_array(),
            "supersample": r.supersample,
            "n_frames": r.n_frames,
            "fps": r.fps,
            "format": r.format.name(),
            "axes": r.axes,
        });
        if let Some(d) = r.y_domain {
            render["y_domain"] = json!(d);
        }
        let mut doc = json!({
            "layers": self.layers.iter().map(LayerSpec::to_json).collect::<Vec<_>>(),
            "render": render,
        });
        if let Some(d) = &self.dataset {
            doc["dataset"] = json!(d);
        }
        if !self.meta.is_empty() {
            doc["meta"] = Value::Object(self.meta.clone());
        }
        doc
    }
}

/// Canonical text: sorted keys, every default spelled out, shortest
/// round-trip numbers, two-space indent, trailing newline.
pub fn serialize_query(doc: &QueryDocument) -> String {
    let mut s = serde_json::to_string_pretty(&doc.to_json()).expect("JSON values always serialize");
    s.push('\n');
    s
}
