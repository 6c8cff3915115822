//! PNG frame I/O and the external video codec hooks.
//!
//! The encoder and decoder are external programs that accept ffmpeg-style
//! arguments. When no encoder is configured, videos are written as a
//! `frames/%05d.png` directory next to the requested output path.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicU64, Ordering};

use super::{Frame, FrameSequence, RenderError, FPS};

pub const ENCODER_ENV: &str = "VBVR_ENCODER";
pub const DECODER_ENV: &str = "VBVR_DECODER";
pub const FRAMES_DIR: &str = "frames";

/// External codec tool paths.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CodecConfig {
    pub encoder: Option<PathBuf>,
    pub decoder: Option<PathBuf>,
}

impl CodecConfig {
    pub fn from_env() -> Self {
        let var = |k| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
        Self { encoder: var(ENCODER_ENV), decoder: var(DECODER_ENV) }
    }

    pub fn none() -> Self {
        Self::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VideoOutput {
    Mp4(PathBuf),
    FramesDir(PathBuf),
}

impl VideoOutput {
    pub fn path(&self) -> &Path {
        match self {
            VideoOutput::Mp4(p) | VideoOutput::FramesDir(p) => p,
        }
    }
}

pub fn encode_png(frame: &Frame) -> Result<Vec<u8>, RenderError> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, frame.width(), frame.height());
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_compression(png::Compression::Fast);
        let mut w = enc.write_header().map_err(|e| RenderError::Decode(e.to_string()))?;
        w.write_image_data(frame.bytes()).map_err(|e| RenderError::Decode(e.to_string()))?;
    }
    Ok(out)
}

pub fn write_png(frame: &Frame, path: &Path) -> Result<(), RenderError> {
    let bytes = encode_png(frame)?;
    fs::write(path, bytes)?;
    Ok(())
}

pub fn decode_png(bytes: &[u8]) -> Result<Frame, RenderError> {
    let mut dec = png::Decoder::new(bytes);
    dec.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
    let mut reader = dec.read_info().map_err(|e| RenderError::Decode(e.to_string()))?;
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf).map_err(|e| RenderError::Decode(e.to_string()))?;
    buf.truncate(info.buffer_size());
    let (w, h) = (info.width, info.height);
    let rgb = match info.color_type {
        png::ColorType::Rgb => buf,
        png::ColorType::Rgba => buf.chunks_exact(4).flat_map(|p| [p[0], p[1], p[2]]).collect(),
        png::ColorType::Grayscale => buf.iter().flat_map(|&g| [g, g, g]).collect(),
        png::ColorType::GrayscaleAlpha => buf.chunks_exact(2).flat_map(|p| [p[0], p[0], p[0]]).collect(),
        other => return Err(RenderError::Decode(format!("unsupported PNG color type {other:?}"))),
    };
    Frame::from_raw(w, h, rgb)
}

pub fn read_png(path: &Path) -> Result<Frame, RenderError> {
    decode_png(&fs::read(path)?)
}

pub fn frame_file_name(i: usize) -> String {
    format!("{i:05}.png")
}

/// Writes `frames/%05d.png` into `dir` (created if missing).
pub fn write_frames_dir(seq: &FrameSequence, dir: &Path) -> Result<(), RenderError> {
    fs::create_dir_all(dir)?;
    for (i, f) in seq.frames().iter().enumerate() {
        write_png(f, &dir.join(frame_file_name(i)))?;
    }
    Ok(())
}

pub fn read_frames_dir(dir: &Path) -> Result<FrameSequence, RenderError> {
    let mut names: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("png")))
        .collect();
    names.sort();
    let frames = names.iter().map(|p| read_png(p)).collect::<Result<Vec<_>, _>>()?;
    FrameSequence::new(frames)
}

fn scratch_dir(tag: &str) -> Result<PathBuf, RenderError> {
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    let n = COUNTER.fetch_add(1, Ordering::Relaxed);
    let dir = std::env::temp_dir().join(format!("vrsuite-{tag}-{}-{n}", std::process::id()));
    if dir.exists() {
        fs::remove_dir_all(&dir)?;
    }
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn run_tool(tool: &Path, args: &[&std::ffi::OsStr]) -> Result<(), RenderError> {
    let out = Command::new(tool)
        .args(args)
        .output()
        .map_err(|e| RenderError::CodecUnavailable(format!("{}: {e}", tool.display())))?;
    if !out.status.success() {
        return Err(RenderError::CodecUnavailable(format!(
            "{} exited with {}: {}",
            tool.display(),
            out.status,
            String::from_utf8_lossy(&out.stderr).trim()
        )));
    }
    Ok(())
}

/// Encodes `seq` to `out` as H.264 MP4 at 24 fps, or falls back to a
/// `frames/` directory beside `out` when no encoder is configured.
pub fn encode_video(seq: &FrameSequence, out: &Path, codec: &CodecConfig) -> Result<VideoOutput, RenderError> {
    let Some(encoder) = &codec.encoder else {
        let dir = out.parent().unwrap_or(Path::new(".")).join(FRAMES_DIR);
        write_frames_dir(seq, &dir)?;
        return Ok(VideoOutput::FramesDir(dir));
    };
    let scratch = scratch_dir("enc")?;
    let result = (|| {
        write_frames_dir(seq, &scratch)?;
        let pattern = scratch.join("%05d.png");
        let fps = FPS.to_string();
        run_tool(
            encoder,
            &[
                "-y".as_ref(),
                "-loglevel".as_ref(),
                "error".as_ref(),
                "-framerate".as_ref(),
                fps.as_ref(),
                "-i".as_ref(),
                pattern.as_os_str(),
                "-c:v".as_ref(),
                "libx264".as_ref(),
                "-pix_fmt".as_ref(),
                "yuv444p".as_ref(),
                "-r".as_ref(),
                fps.as_ref(),
                out.as_os_str(),
            ],
        )
    })();
    let _ = fs::remove_dir_all(&scratch);
    result?;
    Ok(VideoOutput::Mp4(out.to_path_buf()))
}

/// Decodes a video file, or reads a frames directory directly.
pub fn decode_video(input: &Path, codec: &CodecConfig) -> Result<FrameSequence, RenderError> {
    if input.is_dir() {
        return read_frames_dir(input);
    }
    let Some(decoder) = &codec.decoder else {
        return Err(RenderError::CodecUnavailable(format!(
            "no decoder configured ({DECODER_ENV}) for {}",
            input.display()
        )));
    };
    let scratch = scratch_dir("dec")?;
    let result = (|| {
        let pattern = scratch.join("%05d.png");
        run_tool(
            decoder,
            &["-loglevel".as_ref(), "error".as_ref(), "-i".as_ref(), input.as_os_str(), pattern.as_os_str()],
        )?;
        read_frames_dir(&scratch)
    })();
    let _ = fs::remove_dir_all(&scratch);
    result
}
