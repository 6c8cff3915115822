//! Deterministic 2-D rasterization of scenes and trajectories.
//!
//! Rasterization samples pixel centers against exact geometry, with no
//! anti-aliasing. Only IEEE basic arithmetic (`+ - * /`, `sqrt`) is used on
//! the raster path, so output bytes do not depend on the platform libm.

mod anim;
pub mod codec;
pub mod detmath;
mod font;
mod raster;
mod scene;

pub use anim::{render_trajectory, Animation, ElementTrack, TrackAnimation};
pub use codec::{decode_video, encode_video, read_png, write_png, CodecConfig, VideoOutput};
pub use font::{glyph_size, GLYPH_H, GLYPH_W};
pub use raster::render_scene;
pub use scene::{BBox, Element, SceneSpec, Shape};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Canvas edge length used for all benchmark output.
pub const CANVAS: u32 = 512;
/// Ground-truth video frame rate.
pub const FPS: u32 = 24;
pub const DEFAULT_FRAMES_PER_STEP: u32 = 4;
pub const DEFAULT_HOLD: u32 = 12;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("element `{id}` lies outside the {width}x{height} canvas")]
    OutOfBounds { id: String, width: u32, height: u32 },
    #[error("duplicate element id `{0}`")]
    DuplicateId(String),
    #[error("unknown element id `{0}`")]
    UnknownElement(String),
    #[error("glyph `{0}` is not in the bitmap font")]
    UnknownGlyph(char),
    #[error("invalid animation: {0}")]
    Animation(String),
    #[error("frame size mismatch: expected {expected:?}, got {got:?}")]
    SizeMismatch { expected: (u32, u32), got: (u32, u32) },
    #[error("codec unavailable: {0}")]
    CodecUnavailable(String),
    #[error("image decode failed: {0}")]
    Decode(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub const WHITE: Rgb = Rgb(255, 255, 255);
    pub const BLACK: Rgb = Rgb(20, 20, 20);

    /// Largest per-channel absolute difference.
    pub fn max_diff(self, other: Rgb) -> u8 {
        let d = |a: u8, b: u8| a.abs_diff(b);
        d(self.0, other.0).max(d(self.1, other.1)).max(d(self.2, other.2))
    }

    pub fn matches(self, other: Rgb, tolerance: u8) -> bool {
        self.max_diff(other) <= tolerance
    }
}

/// Row-major RGB raster, 8 bits per channel.
#[derive(Clone, PartialEq, Eq)]
pub struct Frame {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl std::fmt::Debug for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Frame({}x{})", self.width, self.height)
    }
}

impl Frame {
    pub fn filled(width: u32, height: u32, color: Rgb) -> Self {
        let mut pixels = Vec::with_capacity((width * height * 3) as usize);
        for _ in 0..width * height {
            pixels.extend_from_slice(&[color.0, color.1, color.2]);
        }
        Self { width, height, pixels }
    }

    pub fn from_raw(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, RenderError> {
        if pixels.len() != (width as usize) * (height as usize) * 3 {
            return Err(RenderError::Decode(format!(
                "{} bytes cannot hold a {width}x{height} RGB frame",
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn bytes(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Rgb {
        let i = ((y * self.width + x) * 3) as usize;
        Rgb(self.pixels[i], self.pixels[i + 1], self.pixels[i + 2])
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, c: Rgb) {
        let i = ((y * self.width + x) * 3) as usize;
        self.pixels[i] = c.0;
        self.pixels[i + 1] = c.1;
        self.pixels[i + 2] = c.2;
    }

    /// Sub-rectangle copy. Caller guarantees the rectangle is inside the frame.
    pub fn crop(&self, x0: u32, y0: u32, w: u32, h: u32) -> Frame {
        let mut out = Vec::with_capacity((w * h * 3) as usize);
        for y in y0..y0 + h {
            let start = ((y * self.width + x0) * 3) as usize;
            out.extend_from_slice(&self.pixels[start..start + (w * 3) as usize]);
        }
        Frame { width: w, height: h, pixels: out }
    }

    /// Nearest-neighbour resample.
    pub fn resize_nearest(&self, w: u32, h: u32) -> Frame {
        let mut out = Frame::filled(w, h, Rgb::WHITE);
        for y in 0..h {
            let sy = (y as u64 * self.height as u64 / h as u64) as u32;
            for x in 0..w {
                let sx = (x as u64 * self.width as u64 / w as u64) as u32;
                out.set(x, y, self.get(sx, sy));
            }
        }
        out
    }
}

/// Ordered frames sharing one size, played back at [`FPS`].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FrameSequence {
    frames: Vec<Frame>,
}

impl FrameSequence {
    pub fn new(frames: Vec<Frame>) -> Result<Self, RenderError> {
        if let Some(first) = frames.first() {
            for f in &frames[1..] {
                if f.dims() != first.dims() {
                    return Err(RenderError::SizeMismatch {
                        expected: first.dims(),
                        got: f.dims(),
                    });
                }
            }
        }
        Ok(Self { frames })
    }

    pub fn fps(&self) -> u32 {
        FPS
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn first(&self) -> Option<&Frame> {
        self.frames.first()
    }

    pub fn last(&self) -> Option<&Frame> {
        self.frames.last()
    }
}
