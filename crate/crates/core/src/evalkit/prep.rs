//! Candidate normalization before scoring.

use crate::render::{Frame, Rgb};

fn uniform_row(f: &Frame, y: u32, c: Rgb) -> bool {
    (0..f.width()).all(|x| f.get(x, y) == c)
}

fn uniform_col(f: &Frame, x: u32, c: Rgb) -> bool {
    (0..f.height()).all(|y| f.get(x, y) == c)
}

/// Strips uniform border bands shared by every frame, but only along the
/// longer axis and never past square. Letterboxing is the only padding the
/// pipeline produces; stripping square content would eat scene margins.
pub fn strip_padding(frames: &[Frame]) -> Vec<Frame> {
    let Some(first) = frames.first() else { return Vec::new() };
    let (w, h) = first.dims();
    if w == h || frames.iter().any(|f| f.dims() != (w, h)) {
        return frames.to_vec();
    }
    let pad = first.get(0, 0);
    let (mut x0, mut x1, mut y0, mut y1) = (0, w, 0, h);
    if w > h {
        while x1 - x0 > h && frames.iter().all(|f| uniform_col(f, x0, pad)) {
            x0 += 1;
        }
        while x1 - x0 > h && frames.iter().all(|f| uniform_col(f, x1 - 1, pad)) {
            x1 -= 1;
        }
    } else {
        while y1 - y0 > w && frames.iter().all(|f| uniform_row(f, y0, pad)) {
            y0 += 1;
        }
        while y1 - y0 > w && frames.iter().all(|f| uniform_row(f, y1 - 1, pad)) {
            y1 -= 1;
        }
    }
    frames.iter().map(|f| f.crop(x0, y0, x1 - x0, y1 - y0)).collect()
}

/// Padding removal, then a centre crop to square and a nearest-neighbour
/// resize to the reference size. Frames already at `size` pass through.
pub fn normalize_frames(frames: &[Frame], size: (u32, u32)) -> Vec<Frame> {
    if frames.iter().all(|f| f.dims() == size) {
        return frames.to_vec();
    }
    strip_padding(frames)
        .into_iter()
        .map(|f| {
            let (w, h) = f.dims();
            let s = w.min(h);
            let sq = if w == h { f } else { f.crop((w - s) / 2, (h - s) / 2, s, s) };
            if sq.dims() == size {
                sq
            } else {
                sq.resize_nearest(size.0, size.1)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letterbox_is_removed() {
        let mut inner = Frame::filled(64, 64, Rgb::WHITE);
        inner.set(10, 10, Rgb(200, 0, 0));
        let mut padded = Frame::filled(100, 64, Rgb::BLACK);
        for y in 0..64 {
            for x in 0..64 {
                padded.set(x + 18, y, inner.get(x, y));
            }
        }
        let out = normalize_frames(&[padded], (64, 64));
        assert_eq!(out[0], inner);
    }

    #[test]
    fn reference_sized_frames_pass_through() {
        let f = Frame::filled(32, 32, Rgb::BLACK);
        assert_eq!(normalize_frames(&[f.clone()], (32, 32)), vec![f]);
    }
}
