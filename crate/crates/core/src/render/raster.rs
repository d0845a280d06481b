//! Supersampled polyline rasterizer.
//!
//! Each playthrough is an x-monotone polyline. Supersample columns are
//! partitioned among its segments by column center, so a polyline covers
//! every sample at most once and translucent lines do not double up at
//! their joints. Within a column the line covers the samples whose centers
//! lie within half the line width of the segment's infinite line. The color
//! at a column is the linear gradient between the segment's endpoint colors.
//!
//! Polylines composite in dataset order with the "over" operator on a
//! premultiplied buffer, then each output pixel is the box average of its
//! samples converted back to straight alpha.

use crate::kinetics::Color;
use crate::pipeline::ColorBuffer;

use super::{ChartGeometry, RenderConfig};

/// Row-major straight-alpha RGBA8 image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl Image {
    pub fn filled(width: u32, height: u32, rgba: [u8; 4]) -> Self {
        let pixels = rgba.repeat(width as usize * height as usize);
        Image { width, height, pixels }
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 4] {
        let i = (y as usize * self.width as usize + x as usize) * 4;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2], self.pixels[i + 3]]
    }
}

type Premul = [f32; 4];

fn premultiply(c: Color) -> Premul {
    let a = c.a as f32;
    [c.r as f32 * a, c.g as f32 * a, c.b as f32 * a, a]
}

struct Canvas {
    width: usize,
    height: usize,
    samples: Vec<Premul>,
}

impl Canvas {
    fn new(width: usize, height: usize, fill: Premul) -> Self {
        Canvas { width, height, samples: vec![fill; width * height] }
    }

    #[inline]
    fn over(&mut self, x: usize, y: usize, src: Premul) {
        let dst = &mut self.samples[y * self.width + x];
        let k = 1.0 - src[3];
        for ch in 0..4 {
            dst[ch] = src[ch] + dst[ch] * k;
        }
    }

    /// Composite `src` over the samples of column `x` whose row centers lie
    /// in `[y_lo, y_hi)`.
    fn column_span(&mut self, x: usize, y_lo: f64, y_hi: f64, src: Premul) {
        let r0 = (y_lo - 0.5).ceil().max(0.0);
        let r1 = ((y_hi - 0.5).ceil()).min(self.height as f64);
        if r1 <= r0 {
            return;
        }
        for y in r0 as usize..r1 as usize {
            self.over(x, y, src);
        }
    }

    fn downsample(&self, factor: usize) -> Image {
        let (w, h) = (self.width / factor, self.height / factor);
        let inv = 1.0 / (factor * factor) as f32;
        let mut pixels = Vec::with_capacity(w * h * 4);
        for oy in 0..h {
            for ox in 0..w {
                let mut acc = [0f32; 4];
                for sy in 0..factor {
                    let row = (oy * factor + sy) * self.width + ox * factor;
                    for s in &self.samples[row..row + factor] {
                        for ch in 0..4 {
                            acc[ch] += s[ch];
                        }
                    }
                }
                let a = acc[3] * inv;
                if a <= 0.0 {
                    pixels.extend_from_slice(&[0, 0, 0, 0]);
                    continue;
                }
                let q = |v: f32| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
                let un = inv / a;
                pixels.extend_from_slice(&[q(acc[0] * un), q(acc[1] * un), q(acc[2] * un), q(a)]);
            }
        }
        Image { width: w as u32, height: h as u32, pixels }
    }
}

/// Rasterize one frame. `buffer` holds one color per geometry vertex in
/// canonical point order.
///
/// # Panics
///
/// If `buffer` has fewer colors than the geometry has vertices.
pub fn rasterize_frame(geometry: &ChartGeometry, buffer: &ColorBuffer, config: &RenderConfig) -> Image {
    let s = config.supersample.max(1) as usize;
    let sf = s as f64;
    let (w, h) = (geometry.width as usize * s, geometry.height as usize * s);
    let mut canvas = Canvas::new(w, h, premultiply(config.background));
    if config.axes {
        draw_axes(&mut canvas, geometry, sf);
    }

    let half = config.line_width * sf / 2.0;
    let mut offset = 0;
    for line in &geometry.polylines {
        let colors = &buffer.colors[offset..offset + line.len()];
        offset += line.len();
        let verts: Vec<[f64; 2]> = line.iter().map(|v| [v[0] * sf, v[1] * sf]).collect();
        if verts.len() == 1 {
            draw_dot(&mut canvas, verts[0], half.max(0.5), premultiply(colors[0]));
            continue;
        }
        let last = verts.len() - 2;
        for (j, seg) in verts.windows(2).enumerate() {
            let ([x0, y0], [x1, y1]) = (seg[0], seg[1]);
            let (c0, c1) = (colors[j], colors[j + 1]);
            // Columns whose centers lie in [x0, x1); the final segment also
            // takes a center landing exactly on its end vertex.
            let first = (x0 - 0.5).ceil().max(0.0);
            let end = if j == last { (x1 - 0.5).floor() + 1.0 } else { (x1 - 0.5).ceil() };
            let end = end.min(w as f64);
            if end <= first {
                continue;
            }
            let dx = x1 - x0;
            let slope = (y1 - y0) / dx;
            let reach = half * (1.0 + slope * slope).sqrt();
            for x in first as usize..end as usize {
                let u = ((x as f64 + 0.5 - x0) / dx).clamp(0.0, 1.0);
                let yc = y0 + (y1 - y0) * u;
                let src = premultiply(c0.lerp(c1, u));
                if src[3] <= 0.0 {
                    continue;
                }
                canvas.column_span(x, yc - reach, yc + reach, src);
            }
        }
    }
    canvas.downsample(s)
}

fn draw_dot(canvas: &mut Canvas, [cx, cy]: [f64; 2], radius: f64, src: Premul) {
    if src[3] <= 0.0 {
        return;
    }
    let x0 = (cx - radius - 0.5).ceil().max(0.0) as usize;
    let x1 = ((cx + radius - 0.5).floor() + 1.0).clamp(0.0, canvas.width as f64) as usize;
    for x in x0..x1 {
        let dx = x as f64 + 0.5 - cx;
        let dy = (radius * radius - dx * dx).max(0.0).sqrt();
        canvas.column_span(x, cy - dy, cy + dy, src);
    }
}

const AXIS_COLOR: Color = Color::new(0.55, 0.55, 0.6, 1.0);
const TICK_LEN: f64 = 5.0;

fn draw_axes(canvas: &mut Canvas, g: &ChartGeometry, sf: f64) {
    let src = premultiply(AXIS_COLOR);
    let p = g.plot;
    let hline = |canvas: &mut Canvas, y: f64, x_lo: f64, x_hi: f64| {
        let x0 = (x_lo * sf).max(0.0) as usize;
        let x1 = ((x_hi * sf) as usize).min(canvas.width);
        for x in x0..x1 {
            canvas.column_span(x, y * sf - sf / 2.0, y * sf + sf / 2.0, src);
        }
    };
    hline(canvas, p.bottom, p.left, p.right);
    for t in &g.y_ticks {
        hline(canvas, t.position, p.left - TICK_LEN, p.left);
    }
    let vline = |canvas: &mut Canvas, x: f64, y_lo: f64, y_hi: f64| {
        let cx = x * sf;
        let x0 = (cx - sf / 2.0 - 0.5).ceil().max(0.0) as usize;
        let x1 = ((cx + sf / 2.0 - 0.5).ceil() as usize).min(canvas.width);
        for col in x0..x1 {
            canvas.column_span(col, y_lo * sf, y_hi * sf, src);
        }
    };
    vline(canvas, p.left, p.top, p.bottom);
    for t in &g.x_ticks {
        vline(canvas, t.position, p.bottom, p.bottom + TICK_LEN);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::{Margins, PlotArea};

    fn geometry(width: u32, height: u32, polylines: Vec<Vec<[f64; 2]>>) -> ChartGeometry {
        ChartGeometry {
            width,
            height,
            plot: PlotArea { left: 0.0, right: width as f64, top: 0.0, bottom: height as f64 },
            polylines,
            x_ticks: vec![],
            y_ticks: vec![],
        }
    }

    fn config(background: Color) -> RenderConfig {
        RenderConfig { width: 64, height: 64, margins: Margins::uniform(0.0), line_width: 1.0, background, ..Default::default() }
    }

    #[test]
    fn transparent_colors_leave_background() {
        let bg = Color::new(0.2, 0.4, 0.6, 1.0);
        let g = geometry(64, 64, vec![vec![[4.0, 10.0], [30.0, 50.0], [60.0, 5.0]], vec![[10.0, 10.0]]]);
        let buf = ColorBuffer { t: 0.0, colors: vec![Color::TRANSPARENT; 4] };
        let img = rasterize_frame(&g, &buf, &config(bg));
        assert_eq!(img, Image::filled(64, 64, bg.to_rgba8()));
        let img = rasterize_frame(&g, &buf, &config(Color::TRANSPARENT));
        assert_eq!(img, Image::filled(64, 64, [0, 0, 0, 0]));
    }

    #[test]
    fn opaque_segment_covers_its_footprint() {
        let red = Color::new(1.0, 0.0, 0.0, 1.0);
        let g = geometry(64, 64, vec![vec![[8.0, 20.5], [40.0, 20.5]]]);
        let buf = ColorBuffer { t: 0.0, colors: vec![red, red] };
        let img = rasterize_frame(&g, &buf, &config(Color::WHITE));
        assert_eq!(img.pixel(8, 20), [255, 0, 0, 255]);
        assert_eq!(img.pixel(39, 20), [255, 0, 0, 255]);
        assert_eq!(img.pixel(7, 20), [255, 255, 255, 255]);
        assert_eq!(img.pixel(40, 20), [255, 255, 255, 255]);
        assert_eq!(img.pixel(20, 19), [255, 255, 255, 255]);
        assert_eq!(img.pixel(20, 21), [255, 255, 255, 255]);
    }

    #[test]
    fn translucent_polyline_composites_once_per_sample() {
        let c = Color::new(0.0, 0.0, 0.0, 0.5);
        let g = geometry(64, 64, vec![vec![[0.0, 32.0], [32.0, 32.0], [64.0, 32.0]]]);
        let buf = ColorBuffer { t: 0.0, colors: vec![c, c, c] };
        let img = rasterize_frame(&g, &buf, &config(Color::WHITE));
        // Line centered on a pixel boundary with width 1 half-covers rows 31 and 32.
        for x in [0, 31, 32, 33, 63] {
            assert_eq!(img.pixel(x, 31), img.pixel(0, 31), "column {x}");
        }
    }

    #[test]
    fn deterministic() {
        let g = geometry(64, 64, vec![vec![[1.0, 3.0], [33.3, 60.1], [62.0, 17.7]]]);
        let buf = ColorBuffer {
            t: 0.0,
            colors: vec![Color::new(0.1, 0.9, 0.3, 0.6), Color::new(1.0, 0.2, 0.3, 0.9), Color::new(0.5, 0.5, 0.5, 0.2)],
        };
        let cfg = RenderConfig { supersample: 4, ..config(Color::BLACK) };
        assert_eq!(rasterize_frame(&g, &buf, &cfg), rasterize_frame(&g, &buf, &cfg));
    }

    #[test]
    fn axes_draw_when_enabled() {
        let g = crate::render::ChartGeometry { x_ticks: vec![], y_ticks: vec![], ..geometry(64, 64, vec![]) };
        let g = ChartGeometry { plot: PlotArea { left: 10.0, right: 60.0, top: 4.0, bottom: 50.0 }, ..g };
        let cfg = RenderConfig { axes: true, ..config(Color::BLACK) };
        let img = rasterize_frame(&g, &ColorBuffer { t: 0.0, colors: vec![] }, &cfg);
        assert_ne!(img, Image::filled(64, 64, Color::BLACK.to_rgba8()));
    }
}
