//! The layer pipeline: for each point and time, fold the encoding layers
//! top to bottom, each one sampling its color scale at
//! `clamp(curve(t) * parameter * multiplier, 0, 1)` and blending the result
//! onto the color handed down from the layer above.

mod blend;
mod eval;
mod layer;

pub use blend::{blend, BlendMode};
pub use eval::{
    evaluate_frame, evaluate_layer, evaluate_loop, evaluate_point, evaluate_point_traced,
    frame_time, ColorBuffer, EvalContext, FrameSet,
};
pub use layer::{EncodingLayer, KineticQuery, LayerTrace};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error("query has no layers")]
    NoLayers,
    #[error("layer {layer}: multiplier must be finite")]
    Multiplier { layer: usize },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{build_registry, Dataset, DomainOverrides, ParameterRef, TurnPoint};
    use crate::data::{generate_synthetic, SimConfig};
    use crate::kinetics::{AnimationCurve, Color, ColorScale};

    const RED: Color = Color::new(1.0, 0.0, 0.0, 1.0);
    const GREEN: Color = Color::new(0.0, 1.0, 0.0, 1.0);

    fn dataset(players: usize, turns: usize) -> Dataset {
        generate_synthetic(&SimConfig::new(5, players, turns, 4)).unwrap()
    }

    fn layer(curve: AnimationCurve, scale: ColorScale, parameter: &str, mode: BlendMode) -> EncodingLayer {
        EncodingLayer::new(curve, scale, parameter.parse().unwrap(), mode)
    }

    fn white_ramp() -> ColorScale {
        ColorScale::linear(Color::TRANSPARENT, Color::WHITE)
    }

    #[test]
    fn apply_matches_worked_example() {
        let l = layer(AnimationCurve::flat(0.5).unwrap(), white_ramp(), "baseline", BlendMode::Add);
        let (out, trace) = l.apply(Color::TRANSPARENT, 0.5, 0.8);
        assert_eq!(trace.c, 0.4);
        for ch in out.to_array() {
            assert!((ch - 0.4).abs() < 1e-15);
        }
    }

    #[test]
    fn c_clamps_above_one() {
        let l = layer(AnimationCurve::flat(1.0).unwrap(), white_ramp(), "baseline", BlendMode::Add).with_multiplier(2.0);
        assert_eq!(l.apply(Color::TRANSPARENT, 1.0, 0.9).1.c, 1.0);
        let l = l.with_multiplier(-3.0);
        assert_eq!(l.apply(Color::TRANSPARENT, 1.0, 0.9).1.c, 0.0);
    }

    #[test]
    fn mask_over_zero_seed_is_transparent() {
        let l = layer(AnimationCurve::flat(1.0).unwrap(), ColorScale::constant(Color::WHITE), "baseline", BlendMode::Mask);
        assert_eq!(l.apply(Color::TRANSPARENT, 1.0, 1.0).0.a, 0.0);
    }

    #[test]
    fn point_fold() {
        let ds = dataset(2, 3);
        let reg = build_registry(&ds, &DomainOverrides::new()).unwrap();
        let ctx = EvalContext::new(&ds, &reg);
        let pt = TurnPoint { playthrough: 1, turn_index: 2 };

        let single = KineticQuery::new(vec![layer(AnimationCurve::flat(0.3).unwrap(), white_ramp(), "baseline", BlendMode::Add)]).unwrap();
        let (_, traces) = evaluate_point_traced(&single, 0.0, pt, &ctx);
        assert_eq!(evaluate_point(&single, 0.0, pt, &ctx), traces[0].sampled);

        let flat = || AnimationCurve::flat(1.0).unwrap();
        let yellow = KineticQuery::new(vec![
            layer(flat(), ColorScale::linear(Color::TRANSPARENT, RED), "baseline", BlendMode::Add),
            layer(flat(), ColorScale::linear(Color::TRANSPARENT, GREEN), "baseline", BlendMode::Add),
        ])
        .unwrap();
        assert_eq!(evaluate_point(&yellow, 0.4, pt, &ctx), Color::new(1.0, 1.0, 0.0, 1.0));
    }

    #[test]
    fn identity_layer_leaves_prev_unchanged() {
        let l = layer(AnimationCurve::flat(0.0).unwrap(), white_ramp(), "duration", BlendMode::Add);
        let prev = Color::new(0.1, 0.2, 0.3, 0.4);
        assert_eq!(l.apply(prev, 0.0, 0.77).0, prev);
    }

    #[test]
    fn frames_and_loops() {
        let ds = dataset(2, 3);
        let reg = build_registry(&ds, &DomainOverrides::new()).unwrap();
        let ctx = EvalContext::new(&ds, &reg);
        let q = KineticQuery::new(vec![
            layer(AnimationCurve::pulse(0.25, 0.5).unwrap(), white_ramp(), "duration", BlendMode::Add),
            layer(AnimationCurve::ramp(), ColorScale::linear(Color::WHITE, RED), "district.2.for", BlendMode::Multiply),
        ])
        .unwrap();

        let f0 = evaluate_frame(&q, 0.0, &ctx);
        assert_eq!(f0.len(), 6);
        assert_eq!(f0.colors, evaluate_frame(&q, 1.0, &ctx).colors);
        let mid = evaluate_frame(&q, 0.375, &ctx);
        assert_eq!(mid.colors, evaluate_frame(&q, 1.375, &ctx).colors);
        assert!(mid.colors.iter().any(|c| c.a > 0.0));
        for (pt, c) in ds.points().into_iter().zip(&f0.colors) {
            assert_eq!(evaluate_point(&q, 0.0, pt, &ctx).to_array().map(f64::to_bits), c.to_array().map(f64::to_bits));
            assert_eq!(f0.get(&ds, pt), Some(*c));
        }

        let loop4 = evaluate_loop(&q, &ctx, 4);
        assert_eq!(loop4.times(), [0.0, 0.25, 0.5, 0.75]);
        let loop8 = evaluate_loop(&q, &ctx, 8);
        for k in 0..4 {
            assert_eq!(loop8.buffers[2 * k], loop4.buffers[k]);
        }
        assert_eq!(evaluate_loop(&q, &ctx, 1).n_frames(), 1);
    }

    #[test]
    fn permuting_playthroughs_permutes_colors() {
        let ds = dataset(3, 4);
        let mut swapped = ds.playthroughs().to_vec();
        swapped.swap(0, 2);
        let ds2 = Dataset::new(swapped).unwrap();
        let reg = build_registry(&ds, &DomainOverrides::new()).unwrap();
        let q = KineticQuery::new(vec![layer(AnimationCurve::ramp(), white_ramp(), "budget", BlendMode::Add)]).unwrap();
        let a = evaluate_frame(&q, 0.6, &EvalContext::new(&ds, &reg));
        let b = evaluate_frame(&q, 0.6, &EvalContext::new(&ds2, &reg));
        for (i, j) in [(0usize, 2usize), (1, 1), (2, 0)] {
            for turn in 0..4 {
                let pa = TurnPoint { playthrough: i, turn_index: turn };
                let pb = TurnPoint { playthrough: j, turn_index: turn };
                assert_eq!(a.get(&ds, pa), b.get(&ds2, pb));
            }
        }
    }

    #[test]
    fn missing_parameter_is_inert_and_warned() {
        let ds = dataset(1, 2);
        let reg = build_registry(&ds, &DomainOverrides::new()).unwrap();
        let ctx = EvalContext::new(&ds, &reg);
        let q = KineticQuery::new(vec![EncodingLayer::new(
            AnimationCurve::flat(1.0).unwrap(),
            white_ramp(),
            ParameterRef::Action { action: "dance".into(), district: 1 },
            BlendMode::Add,
        )])
        .unwrap();
        let f = evaluate_frame(&q, 0.0, &ctx);
        assert!(f.colors.iter().all(|c| *c == Color::TRANSPARENT));
        assert_eq!(ctx.warnings.messages().len(), 1);
    }

    #[test]
    fn empty_query_rejected() {
        assert_eq!(KineticQuery::new(vec![]), Err(PipelineError::NoLayers));
        let l = layer(AnimationCurve::ramp(), white_ramp(), "baseline", BlendMode::Add).with_multiplier(f64::NAN);
        assert!(KineticQuery::new(vec![l]).is_err());
    }

    #[test]
    fn buffer_serializes_flat() {
        let b = ColorBuffer { t: 0.0, colors: vec![RED, GREEN] };
        assert_eq!(serde_json::to_string(&b).unwrap(), "[[1.0,0.0,0.0,1.0],[0.0,1.0,0.0,1.0]]");
    }
}
