//! Reference rasterizer for axis-aligned strokes, walking subsample
//! scanlines and filling the span where each crosses the stroke rectangle.

type Rgba = [f64; 4];

/// Straight-alpha "over".
pub fn over(src: Rgba, dst: Rgba) -> Rgba {
    let a = src[3] + dst[3] * (1.0 - src[3]);
    if a == 0.0 {
        return [0.0; 4];
    }
    let ch = |i: usize| (src[i] * src[3] + dst[i] * dst[3] * (1.0 - src[3])) / a;
    [ch(0), ch(1), ch(2), a]
}

/// A horizontal stroke from `x0` to `x1` at height `y`, `line_width` thick,
/// drawn over `background` at `ss`×`ss` subsamples per pixel. Subsample
/// centers on the rectangle's left or top edge count as inside, on its
/// bottom edge as outside; the right edge is included so that a stroke
/// ending on a subsample center still reaches it.
pub fn horizontal_stroke(
    width: usize,
    height: usize,
    ss: usize,
    (x0, x1, y): (f64, f64, f64),
    line_width: f64,
    color: Rgba,
    background: Rgba,
) -> Vec<u8> {
    let s = ss as f64;
    let (top, bottom) = ((y - line_width / 2.0) * s, (y + line_width / 2.0) * s);
    let (left, right) = (x0 * s, x1 * s);
    let (sw, sh) = (width * ss, height * ss);
    let mut samples = vec![background; sw * sh];
    for row in 0..sh {
        let cy = row as f64 + 0.5;
        if cy < top || cy >= bottom {
            continue;
        }
        for col in 0..sw {
            let cx = col as f64 + 0.5;
            if cx >= left && cx <= right {
                samples[row * sw + col] = over(color, samples[row * sw + col]);
            }
        }
    }
    let mut out = Vec::with_capacity(width * height * 4);
    for py in 0..height {
        for px in 0..width {
            let mut acc = [0.0; 4];
            for sy in 0..ss {
                for sx in 0..ss {
                    let v = samples[(py * ss + sy) * sw + px * ss + sx];
                    for i in 0..3 {
                        acc[i] += v[i] * v[3];
                    }
                    acc[3] += v[3];
                }
            }
            let a = acc[3] / (ss * ss) as f64;
            let q = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
            if a == 0.0 {
                out.extend([0, 0, 0, 0]);
            } else {
                out.extend([q(acc[0] / acc[3]), q(acc[1] / acc[3]), q(acc[2] / acc[3]), q(a)]);
            }
        }
    }
    out
}

/// Exact area of pixel (`px`, `py`) covered by the rectangle.
pub fn pixel_coverage(px: usize, py: usize, (x0, x1, y0, y1): (f64, f64, f64, f64)) -> f64 {
    let span = |lo: f64, hi: f64, p: f64| (hi.min(p + 1.0) - lo.max(p)).max(0.0);
    span(x0, x1, px as f64) * span(y0, y1, py as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_stroke_matches_area_coverage() {
        let red = [1.0, 0.0, 0.0, 1.0];
        let white = [1.0; 4];
        let img = horizontal_stroke(16, 16, 2, (2.0, 12.0, 8.0), 1.0, red, white);
        for py in 0..16 {
            for px in 0..16 {
                let cov = pixel_coverage(px, py, (2.0, 12.0, 7.5, 8.5));
                let g = (255.0 * (1.0 - cov)).round() as u8;
                let i = (py * 16 + px) * 4;
                assert_eq!(&img[i..i + 4], &[255, g, g, 255], "({px}, {py})");
            }
        }
    }
}
