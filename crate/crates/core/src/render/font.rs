//! Embedded 5x7 bitmap font. Each row is the low five bits, MSB on the left.

pub const GLYPH_W: u32 = 5;
pub const GLYPH_H: u32 = 7;

const DIGITS: [[u8; 7]; 10] = [
    [0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110],
    [0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110],
    [0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111],
    [0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110],
    [0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010],
    [0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110],
    [0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110],
    [0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000],
    [0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110],
    [0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100],
];

const QUESTION: [u8; 7] = [0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b00000, 0b00100];
const MINUS: [u8; 7] = [0, 0, 0, 0b11111, 0, 0, 0];
const SPACE: [u8; 7] = [0; 7];

pub(crate) fn glyph(c: char) -> Option<&'static [u8; 7]> {
    match c {
        '0'..='9' => Some(&DIGITS[c as usize - '0' as usize]),
        '?' => Some(&QUESTION),
        '-' => Some(&MINUS),
        ' ' => Some(&SPACE),
        _ => None,
    }
}

/// Pixel extent of `text` at integral `scale`, one blank column between glyphs.
pub fn glyph_size(text: &str, scale: u32) -> (u32, u32) {
    let n = text.chars().count() as u32;
    if n == 0 {
        return (0, 0);
    }
    ((n * (GLYPH_W + 1) - 1) * scale, GLYPH_H * scale)
}

/// Calls `put(px, py)` for every lit pixel of `text` drawn at `(x, y)`.
pub(crate) fn for_each_pixel(text: &str, x: i64, y: i64, scale: u32, mut put: impl FnMut(i64, i64)) {
    let s = scale as i64;
    for (i, c) in text.chars().enumerate() {
        let Some(rows) = glyph(c) else { continue };
        let gx = x + i as i64 * (GLYPH_W as i64 + 1) * s;
        for (ry, bits) in rows.iter().enumerate() {
            for rx in 0..GLYPH_W as i64 {
                if bits & (1 << (GLYPH_W as i64 - 1 - rx)) != 0 {
                    for dy in 0..s {
                        for dx in 0..s {
                            put(gx + rx * s + dx, y + ry as i64 * s + dy);
                        }
                    }
                }
            }
        }
    }
}
