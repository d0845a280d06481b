use std::io::Cursor;
use std::path::{Path, PathBuf};

use png::{BitDepth, BlendOp, ColorType, Compression, DisposeOp};

use super::{AnimationFormat, Image, RenderError};

/// Encoder output: one byte stream, or one PNG per frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Encoded {
    Single(Vec<u8>),
    Sequence(Vec<(String, Vec<u8>)>),
}

fn check_frames(frames: &[Image]) -> Result<(u32, u32), RenderError> {
    let first = frames.first().ok_or(RenderError::NoFrames)?;
    let expected = (first.width, first.height);
    for (index, f) in frames.iter().enumerate() {
        if (f.width, f.height) != expected {
            return Err(RenderError::MixedSizes { index, expected, found: (f.width, f.height) });
        }
        if f.pixels.len() != f.width as usize * f.height as usize * 4 {
            return Err(RenderError::Encode(format!("frame {index} has {} bytes for {}x{}", f.pixels.len(), f.width, f.height)));
        }
    }
    Ok(expected)
}

fn png_err(e: png::EncodingError) -> RenderError {
    RenderError::Encode(e.to_string())
}

fn fps_u16(fps: u32) -> Result<u16, RenderError> {
    u16::try_from(fps)
        .ok()
        .filter(|&f| f > 0)
        .ok_or_else(|| RenderError::Config(format!("fps must be in 1..=65535, got {fps}")))
}

/// Looping APNG; every frame is full-size, replaces its predecessor and lasts
/// `1/fps` seconds.
pub fn encode_apng(frames: &[Image], fps: u32) -> Result<Vec<u8>, RenderError> {
    let (w, h) = check_frames(frames)?;
    let fps = fps_u16(fps)?;
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, w, h);
        enc.set_color(ColorType::Rgba);
        enc.set_depth(BitDepth::Eight);
        enc.set_compression(Compression::Fast);
        enc.set_animated(frames.len() as u32, 0).map_err(png_err)?;
        enc.set_frame_delay(1, fps).map_err(png_err)?;
        enc.set_blend_op(BlendOp::Source).map_err(png_err)?;
        enc.set_dispose_op(DisposeOp::None).map_err(png_err)?;
        let mut writer = enc.write_header().map_err(png_err)?;
        for f in frames {
            writer.write_image_data(&f.pixels).map_err(png_err)?;
        }
        writer.finish().map_err(png_err)?;
    }
    Ok(out)
}

pub fn encode_png(image: &Image) -> Result<Vec<u8>, RenderError> {
    check_frames(std::slice::from_ref(image))?;
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, image.width, image.height);
        enc.set_color(ColorType::Rgba);
        enc.set_depth(BitDepth::Eight);
        enc.set_compression(Compression::Fast);
        let mut writer = enc.write_header().map_err(png_err)?;
        writer.write_image_data(&image.pixels).map_err(png_err)?;
        writer.finish().map_err(png_err)?;
    }
    Ok(out)
}

/// Looping GIF with a 256-color palette quantized per frame. Lossy.
pub fn encode_gif(frames: &[Image], fps: u32) -> Result<Vec<u8>, RenderError> {
    let (w, h) = check_frames(frames)?;
    fps_u16(fps)?;
    let (gw, gh) = match (u16::try_from(w), u16::try_from(h)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return Err(RenderError::TooLarge { format: AnimationFormat::Gif, width: w, height: h }),
    };
    let delay = ((100.0 / fps as f64).round() as u16).max(1);
    let gif_err = |e: gif::EncodingError| RenderError::Encode(e.to_string());
    let mut out = Vec::new();
    {
        let mut enc = gif::Encoder::new(&mut out, gw, gh, &[]).map_err(gif_err)?;
        enc.set_repeat(gif::Repeat::Infinite).map_err(gif_err)?;
        for f in frames {
            let mut px = f.pixels.clone();
            let mut frame = gif::Frame::from_rgba_speed(gw, gh, &mut px, 10);
            frame.delay = delay;
            enc.write_frame(&frame).map_err(gif_err)?;
        }
    }
    Ok(out)
}

pub fn sequence_file_name(index: usize) -> String {
    format!("frame_{index:04}.png")
}

pub fn encode_animation(frames: &[Image], format: AnimationFormat, fps: u32) -> Result<Encoded, RenderError> {
    Ok(match format {
        AnimationFormat::Apng => Encoded::Single(encode_apng(frames, fps)?),
        AnimationFormat::Gif => Encoded::Single(encode_gif(frames, fps)?),
        AnimationFormat::PngSequence => {
            check_frames(frames)?;
            Encoded::Sequence(
                frames
                    .iter()
                    .enumerate()
                    .map(|(i, f)| Ok((sequence_file_name(i), encode_png(f)?)))
                    .collect::<Result<_, RenderError>>()?,
            )
        }
    })
}

/// Encode and write. A sequence goes into the directory `out` (created if
/// needed); other formats write the file `out`. Returns the paths written.
pub fn write_animation(frames: &[Image], format: AnimationFormat, fps: u32, out: &Path) -> Result<Vec<PathBuf>, RenderError> {
    match encode_animation(frames, format, fps)? {
        Encoded::Single(bytes) => {
            std::fs::write(out, bytes)?;
            Ok(vec![out.to_path_buf()])
        }
        Encoded::Sequence(files) => {
            std::fs::create_dir_all(out)?;
            files
                .into_iter()
                .map(|(name, bytes)| {
                    let p = out.join(name);
                    std::fs::write(&p, bytes)?;
                    Ok(p)
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedAnimation {
    pub frames: Vec<Image>,
    /// Per-frame delay as (numerator, denominator) seconds.
    pub delays: Vec<(u16, u16)>,
    /// 0 means loop forever.
    pub num_plays: u32,
}

/// Decode an RGBA8 APNG written by [`encode_apng`]. Assumes full-size frames.
pub fn decode_apng(bytes: &[u8]) -> Result<DecodedAnimation, RenderError> {
    let dec_err = |e: png::DecodingError| RenderError::Encode(e.to_string());
    let mut reader = png::Decoder::new(Cursor::new(bytes)).read_info().map_err(dec_err)?;
    let (w, h) = reader.info().size();
    let actl = reader
        .info()
        .animation_control
        .ok_or_else(|| RenderError::Encode("not an animated PNG".into()))?;
    let size = reader.output_buffer_size().ok_or_else(|| RenderError::Encode("image too large".into()))?;
    let mut frames = Vec::new();
    let mut delays = Vec::new();
    for _ in 0..actl.num_frames {
        let mut buf = vec![0; size];
        let info = reader.next_frame(&mut buf).map_err(dec_err)?;
        if info.color_type != ColorType::Rgba || info.bit_depth != BitDepth::Eight {
            return Err(RenderError::Encode("expected 8-bit RGBA".into()));
        }
        let fc = reader.info().frame_control.ok_or_else(|| RenderError::Encode("frame without fcTL".into()))?;
        buf.truncate(info.buffer_size());
        delays.push((fc.delay_num, fc.delay_den));
        frames.push(Image { width: w, height: h, pixels: buf });
    }
    Ok(DecodedAnimation { frames, delays, num_plays: actl.num_plays })
}
