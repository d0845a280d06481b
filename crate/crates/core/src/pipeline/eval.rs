//! Evaluation of a query over points, frames, and whole loops.
//!
//! Every entry point folds the same [`EncodingLayer::apply`] over the layer
//! stack, seeded with transparent black, so results agree bit for bit no
//! matter how the work is split up.

use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::Serialize;

use crate::data::{parameter_value, Dataset, ParameterRegistry, TurnPoint};
use crate::kinetics::Color;
use crate::warnings::WarningLog;

use super::{EncodingLayer, KineticQuery, LayerTrace};

/// Dataset, registry and warning sink shared by one evaluation run.
#[derive(Debug)]
pub struct EvalContext<'a> {
    pub dataset: &'a Dataset,
    pub registry: &'a ParameterRegistry,
    pub warnings: WarningLog,
}

impl<'a> EvalContext<'a> {
    pub fn new(dataset: &'a Dataset, registry: &'a ParameterRegistry) -> Self {
        EvalContext { dataset, registry, warnings: WarningLog::new() }
    }

    pub fn parameter(&self, point: TurnPoint, layer: &EncodingLayer) -> f64 {
        parameter_value(point, &layer.parameter, self.dataset, self.registry, &self.warnings)
    }

    /// Normalized parameter per layer per point, in canonical point order.
    fn parameter_table(&self, query: &KineticQuery, points: &[TurnPoint]) -> Vec<Vec<f64>> {
        query
            .layers()
            .iter()
            .map(|layer| points.par_iter().map(|&pt| self.parameter(pt, layer)).collect())
            .collect()
    }
}

pub fn evaluate_layer(
    prev: Color,
    layer: &EncodingLayer,
    t: f64,
    point: TurnPoint,
    ctx: &EvalContext<'_>,
) -> (Color, LayerTrace) {
    layer.apply(prev, layer.curve.eval(t), ctx.parameter(point, layer))
}

pub fn evaluate_point(query: &KineticQuery, t: f64, point: TurnPoint, ctx: &EvalContext<'_>) -> Color {
    query
        .layers()
        .iter()
        .fold(Color::TRANSPARENT, |prev, layer| evaluate_layer(prev, layer, t, point, ctx).0)
}

/// Like [`evaluate_point`], also returning every layer's trace.
pub fn evaluate_point_traced(
    query: &KineticQuery,
    t: f64,
    point: TurnPoint,
    ctx: &EvalContext<'_>,
) -> (Color, Vec<LayerTrace>) {
    let mut traces = Vec::with_capacity(query.layers().len());
    let mut color = Color::TRANSPARENT;
    for layer in query.layers() {
        let (next, trace) = evaluate_layer(color, layer, t, point, ctx);
        traces.push(trace);
        color = next;
    }
    (color, traces)
}

/// Evaluated colors of every point at one frame time, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorBuffer {
    pub t: f64,
    pub colors: Vec<Color>,
}

impl ColorBuffer {
    pub fn get(&self, dataset: &Dataset, point: TurnPoint) -> Option<Color> {
        dataset.point_position(point).and_then(|i| self.colors.get(i).copied())
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }
}

/// Serializes as a flat array of `[r, g, b, a]` quadruples.
impl Serialize for ColorBuffer {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.colors.len()))?;
        for c in &self.colors {
            seq.serialize_element(&c.to_array())?;
        }
        seq.end()
    }
}

/// One full loop of frames at times `k / n_frames`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSet {
    pub buffers: Vec<ColorBuffer>,
}

impl FrameSet {
    pub fn n_frames(&self) -> usize {
        self.buffers.len()
    }

    pub fn times(&self) -> Vec<f64> {
        self.buffers.iter().map(|b| b.t).collect()
    }
}

/// Time of frame `k` in an `n`-frame loop.
pub fn frame_time(k: usize, n: usize) -> f64 {
    k as f64 / n as f64
}

fn fold_frame(query: &KineticQuery, t: f64, params: &[Vec<f64>], n_points: usize) -> ColorBuffer {
    let curve_values: Vec<f64> = query.layers().iter().map(|l| l.curve.eval(t)).collect();
    let colors = (0..n_points)
        .into_par_iter()
        .map(|i| {
            query
                .layers()
                .iter()
                .zip(&curve_values)
                .zip(params)
                .fold(Color::TRANSPARENT, |prev, ((layer, &a_t), p)| layer.apply(prev, a_t, p[i]).0)
        })
        .collect();
    ColorBuffer { t, colors }
}

pub fn evaluate_frame(query: &KineticQuery, t: f64, ctx: &EvalContext<'_>) -> ColorBuffer {
    let points = ctx.dataset.points();
    let params = ctx.parameter_table(query, &points);
    fold_frame(query, t, &params, points.len())
}

/// Evaluate `n_frames` uniformly spaced frames (`n_frames` is raised to 1
/// if zero).
pub fn evaluate_loop(query: &KineticQuery, ctx: &EvalContext<'_>, n_frames: usize) -> FrameSet {
    let n = n_frames.max(1);
    let points = ctx.dataset.points();
    let params = ctx.parameter_table(query, &points);
    let buffers = (0..n)
        .into_par_iter()
        .map(|k| fold_frame(query, frame_time(k, n), &params, points.len()))
        .collect();
    FrameSet { buffers }
}
