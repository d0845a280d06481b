use rayon::prelude::*;

use crate::pipeline::{evaluate_frame, evaluate_loop, EvalContext, KineticQuery};

use super::{layout, rasterize_frame, Image, RenderConfig, RenderError};

fn checked(config: &RenderConfig) -> Result<(), RenderError> {
    match config.problems().first() {
        Some((field, msg)) => Err(RenderError::Config(format!("{field}: {msg}"))),
        None => Ok(()),
    }
}

/// Evaluate `config.n_frames` evenly spaced times over one loop and
/// rasterize each. Frames are rendered in parallel and returned in order.
pub fn render_loop(query: &KineticQuery, ctx: &EvalContext<'_>, config: &RenderConfig) -> Result<Vec<Image>, RenderError> {
    checked(config)?;
    let geometry = layout(ctx.dataset, config);
    let frames = evaluate_loop(query, ctx, config.n_frames);
    Ok(frames
        .buffers
        .par_iter()
        .map(|b| rasterize_frame(&geometry, b, config))
        .collect())
}

/// A single frame at loop time `t`.
pub fn render_still(query: &KineticQuery, ctx: &EvalContext<'_>, config: &RenderConfig, t: f64) -> Result<Image, RenderError> {
    checked(config)?;
    let geometry = layout(ctx.dataset, config);
    Ok(rasterize_frame(&geometry, &evaluate_frame(query, t, ctx), config))
}
