use crate::data::{Dataset, ParameterRegistry};
use crate::pipeline::{evaluate_loop, EvalContext, FrameSet, KineticQuery};
use crate::render::{render_loop, render_still, Image, RenderError};

use super::{validate_against, QueryDocument, QueryError};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Invalid(QueryError),
    #[error(transparent)]
    Render(#[from] RenderError),
}

/// Output of a document run plus any evaluation warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct Run<T> {
    pub output: T,
    pub warnings: Vec<String>,
}

fn prepare(doc: &QueryDocument, registry: &ParameterRegistry) -> Result<KineticQuery, RunError> {
    let diagnostics = validate_against(doc, registry);
    if !diagnostics.is_empty() {
        return Err(RunError::Invalid(QueryError { diagnostics }));
    }
    doc.query().map_err(RunError::Invalid)
}

fn run<T>(
    doc: &QueryDocument,
    dataset: &Dataset,
    registry: &ParameterRegistry,
    f: impl FnOnce(&KineticQuery, &EvalContext<'_>) -> Result<T, RenderError>,
) -> Result<Run<T>, RunError> {
    let q = prepare(doc, registry)?;
    let ctx = EvalContext::new(dataset, registry);
    let output = f(&q, &ctx)?;
    Ok(Run { output, warnings: ctx.warnings.messages() })
}

/// Colors for `n_frames` evenly spaced loop times.
pub fn evaluate_document(
    doc: &QueryDocument,
    dataset: &Dataset,
    registry: &ParameterRegistry,
    n_frames: usize,
) -> Result<Run<FrameSet>, RunError> {
    run(doc, dataset, registry, |q, ctx| Ok(evaluate_loop(q, ctx, n_frames)))
}

/// Every frame of the document's animation, per its render block.
pub fn render_document(doc: &QueryDocument, dataset: &Dataset, registry: &ParameterRegistry) -> Result<Run<Vec<Image>>, RunError> {
    run(doc, dataset, registry, |q, ctx| render_loop(q, ctx, &doc.render))
}

pub fn render_document_still(
    doc: &QueryDocument,
    dataset: &Dataset,
    registry: &ParameterRegistry,
    t: f64,
) -> Result<Run<Image>, RunError> {
    run(doc, dataset, registry, |q, ctx| render_still(q, ctx, &doc.render, t))
}
