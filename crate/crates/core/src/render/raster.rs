use super::scene::{Element, SceneSpec, Shape};
use super::{font, Frame, RenderError};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Cover {
    None,
    Fill,
    Outline,
}

fn seg_dist2(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (abx, aby) = (b[0] - a[0], b[1] - a[1]);
    let (apx, apy) = (p[0] - a[0], p[1] - a[1]);
    let len2 = abx * abx + aby * aby;
    let t = if len2 == 0.0 { 0.0 } else { ((apx * abx + apy * aby) / len2).clamp(0.0, 1.0) };
    let (dx, dy) = (apx - t * abx, apy - t * aby);
    dx * dx + dy * dy
}

fn in_polygon(p: [f64; 2], pts: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = pts.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (pts[i], pts[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn polygon_cover(p: [f64; 2], pts: &[[f64; 2]], outline: Option<f64>) -> Cover {
    if pts.len() < 3 || !in_polygon(p, pts) {
        return Cover::None;
    }
    if let Some(w) = outline {
        let n = pts.len();
        for i in 0..n {
            if seg_dist2(p, pts[i], pts[(i + 1) % n]) <= w * w {
                return Cover::Outline;
            }
        }
    }
    Cover::Fill
}

fn arrow_parts(from: [f64; 2], to: [f64; 2], head: f64) -> ([f64; 2], [[f64; 2]; 3]) {
    let (dx, dy) = (to[0] - from[0], to[1] - from[1]);
    let len = (dx * dx + dy * dy).sqrt();
    if len == 0.0 {
        return (to, [to, to, to]);
    }
    let (ux, uy) = (dx / len, dy / len);
    let h = head.min(len);
    let base = [to[0] - ux * h, to[1] - uy * h];
    let half = head / 2.0;
    let left = [base[0] - uy * half, base[1] + ux * half];
    let right = [base[0] + uy * half, base[1] - ux * half];
    (base, [to, left, right])
}

fn cover(shape: &Shape, p: [f64; 2], outline: Option<f64>) -> Cover {
    match shape {
        Shape::Circle { cx, cy, r } => {
            let (dx, dy) = (p[0] - cx, p[1] - cy);
            let d2 = dx * dx + dy * dy;
            if d2 > r * r {
                Cover::None
            } else if matches!(outline, Some(w) if d2 >= (r - w).max(0.0) * (r - w).max(0.0)) {
                Cover::Outline
            } else {
                Cover::Fill
            }
        }
        Shape::Rect { x, y, w, h } => {
            if p[0] < *x || p[0] >= x + w || p[1] < *y || p[1] >= y + h {
                Cover::None
            } else if matches!(outline, Some(t) if p[0] < x + t || p[0] >= x + w - t || p[1] < y + t || p[1] >= y + h - t) {
                Cover::Outline
            } else {
                Cover::Fill
            }
        }
        Shape::Triangle { points } => polygon_cover(p, points, outline),
        Shape::Diamond { cx, cy, half_w, half_h } => {
            let pts = [[*cx, cy - half_h], [cx + half_w, *cy], [*cx, cy + half_h], [cx - half_w, *cy]];
            polygon_cover(p, &pts, outline)
        }
        Shape::Polygon { points } => polygon_cover(p, points, outline),
        Shape::Line { from, to, width } => {
            if seg_dist2(p, *from, *to) <= (width / 2.0) * (width / 2.0) {
                Cover::Fill
            } else {
                Cover::None
            }
        }
        Shape::Arrow { from, to, width, head } => {
            let (base, tri) = arrow_parts(*from, *to, *head);
            if seg_dist2(p, *from, base) <= (width / 2.0) * (width / 2.0) || in_polygon(p, &tri) {
                Cover::Fill
            } else {
                Cover::None
            }
        }
        // Glyphs are drawn through the bitmap path.
        Shape::Glyph { .. } => Cover::None,
    }
}

fn draw(frame: &mut Frame, el: &Element) {
    let (w, h) = (frame.width() as i64, frame.height() as i64);
    if let Shape::Glyph { text, x, y, scale } = &el.shape {
        if let Some(c) = el.fill {
            font::for_each_pixel(text, x.floor() as i64, y.floor() as i64, *scale, |px, py| {
                if px >= 0 && py >= 0 && px < w && py < h {
                    frame.set(px as u32, py as u32, c);
                }
            });
        }
        return;
    }
    let b = el.shape.bbox();
    let x0 = (b.x0.floor() as i64).max(0);
    let y0 = (b.y0.floor() as i64).max(0);
    let x1 = (b.x1.ceil() as i64).min(w);
    let y1 = (b.y1.ceil() as i64).min(h);
    let outline_w = el.outline.map(|(_, w)| w);
    for py in y0..y1 {
        for px in x0..x1 {
            let p = [px as f64 + 0.5, py as f64 + 0.5];
            let color = match cover(&el.shape, p, outline_w) {
                Cover::None => None,
                // Strokes have no interior; an outline-only line takes the outline color.
                Cover::Fill => el.fill.or(match el.shape {
                    Shape::Line { .. } | Shape::Arrow { .. } => el.outline.map(|(c, _)| c),
                    _ => None,
                }),
                Cover::Outline => el.outline.map(|(c, _)| c),
            };
            if let Some(c) = color {
                frame.set(px as u32, py as u32, c);
            }
        }
    }
}

/// Rasterizes `scene`. Same scene, same bytes.
pub fn render_scene(scene: &SceneSpec) -> Result<Frame, RenderError> {
    scene.check()?;
    let mut frame = Frame::filled(scene.width, scene.height, scene.background);
    let mut order: Vec<&Element> = scene.elements.iter().collect();
    order.sort_by_key(|e| e.z);
    for el in order {
        draw(&mut frame, el);
    }
    Ok(frame)
}
