//! Line-chart rendering: layout, rasterization and animation encoding.

mod animate;
mod encode;
mod layout;
mod raster;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use animate::{render_loop, render_still};
pub use encode::{
    decode_apng, encode_animation, encode_apng, encode_gif, encode_png, sequence_file_name,
    write_animation, DecodedAnimation, Encoded,
};
pub use layout::{layout, ChartGeometry, Margins, PlotArea, RenderConfig, Tick};
pub use raster::{rasterize_frame, Image};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnimationFormat {
    Apng,
    Gif,
    PngSequence,
}

impl AnimationFormat {
    pub const ALL: [AnimationFormat; 3] = [AnimationFormat::Apng, AnimationFormat::Gif, AnimationFormat::PngSequence];

    pub fn name(self) -> &'static str {
        match self {
            AnimationFormat::Apng => "apng",
            AnimationFormat::Gif => "gif",
            AnimationFormat::PngSequence => "png_sequence",
        }
    }
}

impl fmt::Display for AnimationFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnimationFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown format \"{s}\"; allowed: apng, gif, png_sequence"))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("no frames to encode")]
    NoFrames,
    #[error("frame {index} is {found:?}, expected {expected:?}")]
    MixedSizes { index: usize, expected: (u32, u32), found: (u32, u32) },
    #[error("image too large for {format}: {width}x{height}")]
    TooLarge { format: AnimationFormat, width: u32, height: u32 },
    #[error("invalid render config: {0}")]
    Config(String),
    #[error("encoding failed: {0}")]
    Encode(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_names() {
        for f in AnimationFormat::ALL {
            assert_eq!(f.name().parse::<AnimationFormat>().unwrap(), f);
            assert_eq!(serde_json::to_string(&f).unwrap(), format!("\"{}\"", f.name()));
        }
        assert!("webm".parse::<AnimationFormat>().is_err());
    }
}
