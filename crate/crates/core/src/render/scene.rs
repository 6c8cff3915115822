use serde::{Deserialize, Serialize};

use super::{font, RenderError, Rgb, CANVAS};

/// Axis-aligned box in pixel coordinates, `x1`/`y1` exclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl BBox {
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width().max(0.0) * self.height().max(0.0)
    }

    pub fn intersection_area(&self, other: &BBox) -> f64 {
        let w = self.x1.min(other.x1) - self.x0.max(other.x0);
        let h = self.y1.min(other.y1) - self.y0.max(other.y0);
        if w <= 0.0 || h <= 0.0 {
            0.0
        } else {
            w * h
        }
    }

    pub fn inside(&self, width: f64, height: f64) -> bool {
        self.x0 >= 0.0 && self.y0 >= 0.0 && self.x1 <= width && self.y1 <= height
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    fn union(points: impl IntoIterator<Item = [f64; 2]>) -> BBox {
        let mut b = BBox {
            x0: f64::INFINITY,
            y0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y1: f64::NEG_INFINITY,
        };
        for [x, y] in points {
            b.x0 = b.x0.min(x);
            b.y0 = b.y0.min(y);
            b.x1 = b.x1.max(x);
            b.y1 = b.y1.max(y);
        }
        b
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Shape {
    Circle { cx: f64, cy: f64, r: f64 },
    Rect { x: f64, y: f64, w: f64, h: f64 },
    Triangle { points: [[f64; 2]; 3] },
    Diamond { cx: f64, cy: f64, half_w: f64, half_h: f64 },
    Polygon { points: Vec<[f64; 2]> },
    Glyph { text: String, x: f64, y: f64, scale: u32 },
    Line { from: [f64; 2], to: [f64; 2], width: f64 },
    Arrow { from: [f64; 2], to: [f64; 2], width: f64, head: f64 },
}

impl Shape {
    pub fn bbox(&self) -> BBox {
        match self {
            Shape::Circle { cx, cy, r } => BBox { x0: cx - r, y0: cy - r, x1: cx + r, y1: cy + r },
            Shape::Rect { x, y, w, h } => BBox { x0: *x, y0: *y, x1: x + w, y1: y + h },
            Shape::Triangle { points } => BBox::union(points.iter().copied()),
            Shape::Diamond { cx, cy, half_w, half_h } => BBox {
                x0: cx - half_w,
                y0: cy - half_h,
                x1: cx + half_w,
                y1: cy + half_h,
            },
            Shape::Polygon { points } => BBox::union(points.iter().copied()),
            Shape::Glyph { text, x, y, scale } => {
                let (w, h) = font::glyph_size(text, *scale);
                BBox { x0: *x, y0: *y, x1: x + w as f64, y1: y + h as f64 }
            }
            Shape::Line { from, to, width } | Shape::Arrow { from, to, width, .. } => {
                let pad = match self {
                    Shape::Arrow { head, .. } => width.max(*head),
                    _ => *width,
                } / 2.0;
                let b = BBox::union([*from, *to]);
                BBox { x0: b.x0 - pad, y0: b.y0 - pad, x1: b.x1 + pad, y1: b.y1 + pad }
            }
        }
    }

    /// Same shape shifted by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> Shape {
        let mv = |p: &[f64; 2]| [p[0] + dx, p[1] + dy];
        match self {
            Shape::Circle { cx, cy, r } => Shape::Circle { cx: cx + dx, cy: cy + dy, r: *r },
            Shape::Rect { x, y, w, h } => Shape::Rect { x: x + dx, y: y + dy, w: *w, h: *h },
            Shape::Triangle { points } => Shape::Triangle { points: [mv(&points[0]), mv(&points[1]), mv(&points[2])] },
            Shape::Diamond { cx, cy, half_w, half_h } => Shape::Diamond {
                cx: cx + dx,
                cy: cy + dy,
                half_w: *half_w,
                half_h: *half_h,
            },
            Shape::Polygon { points } => Shape::Polygon { points: points.iter().map(mv).collect() },
            Shape::Glyph { text, x, y, scale } => Shape::Glyph { text: text.clone(), x: x + dx, y: y + dy, scale: *scale },
            Shape::Line { from, to, width } => Shape::Line { from: mv(from), to: mv(to), width: *width },
            Shape::Arrow { from, to, width, head } => Shape::Arrow { from: mv(from), to: mv(to), width: *width, head: *head },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub id: String,
    pub shape: Shape,
    pub fill: Option<Rgb>,
    /// Outline color and stroke width, drawn inside the shape boundary.
    pub outline: Option<(Rgb, f64)>,
    pub z: i32,
}

impl Element {
    pub fn filled(id: impl Into<String>, shape: Shape, fill: Rgb, z: i32) -> Self {
        Self { id: id.into(), shape, fill: Some(fill), outline: None, z }
    }

    pub fn outlined(id: impl Into<String>, shape: Shape, color: Rgb, width: f64, z: i32) -> Self {
        Self { id: id.into(), shape, fill: None, outline: Some((color, width)), z }
    }
}

/// Background plus a z-ordered element list. Ties in `z` keep insertion order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub width: u32,
    pub height: u32,
    pub background: Rgb,
    pub elements: Vec<Element>,
}

impl SceneSpec {
    pub fn new(background: Rgb) -> Self {
        Self { width: CANVAS, height: CANVAS, background, elements: Vec::new() }
    }

    pub fn push(&mut self, element: Element) {
        self.elements.push(element);
    }

    pub fn element(&self, id: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.id == id)
    }

    pub fn element_mut(&mut self, id: &str) -> Result<&mut Element, RenderError> {
        self.elements
            .iter_mut()
            .find(|e| e.id == id)
            .ok_or_else(|| RenderError::UnknownElement(id.to_string()))
    }

    pub fn remove(&mut self, id: &str) -> Result<Element, RenderError> {
        let pos = self
            .elements
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| RenderError::UnknownElement(id.to_string()))?;
        Ok(self.elements.remove(pos))
    }

    pub fn translate(&mut self, id: &str, dx: f64, dy: f64) -> Result<(), RenderError> {
        let el = self.element_mut(id)?;
        el.shape = el.shape.translated(dx, dy);
        Ok(())
    }

    /// Checks id uniqueness and canvas containment.
    pub fn check(&self) -> Result<(), RenderError> {
        let mut ids = std::collections::HashSet::new();
        for el in &self.elements {
            if !ids.insert(el.id.as_str()) {
                return Err(RenderError::DuplicateId(el.id.clone()));
            }
            if !el.shape.bbox().inside(self.width as f64, self.height as f64) {
                return Err(RenderError::OutOfBounds {
                    id: el.id.clone(),
                    width: self.width,
                    height: self.height,
                });
            }
            if let Shape::Glyph { text, .. } = &el.shape {
                if let Some(c) = text.chars().find(|c| font::glyph(*c).is_none()) {
                    return Err(RenderError::UnknownGlyph(c));
                }
            }
        }
        Ok(())
    }
}
