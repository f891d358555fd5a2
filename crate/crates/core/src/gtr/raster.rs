//! Bitmap rendering of a [`Scene`] for endpoints that only accept images.

use std::io::Cursor;

use image::{ImageFormat, Rgba, RgbaImage};

use super::render::{NodeShape, Scene};

pub const DEFAULT_RASTER_PX: u32 = 768;

const BLACK: Rgba<u8> = Rgba([0, 0, 0, 255]);
const WHITE: Rgba<u8> = Rgba([255, 255, 255, 255]);

// 5x7 glyphs, one row per byte, low 5 bits used, MSB on the left.
const DIGITS: [[u8; 7]; 10] = [
    [0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E],
    [0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E],
    [0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F],
    [0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E],
    [0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02],
    [0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E],
    [0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E],
    [0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
    [0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E],
    [0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C],
];

fn color(name: &str) -> Rgba<u8> {
    match name {
        "white" => WHITE,
        "black" => BLACK,
        _ => {
            let hex = name.trim_start_matches('#');
            if hex.len() == 6 {
                if let Ok(v) = u32::from_str_radix(hex, 16) {
                    return Rgba([(v >> 16) as u8, (v >> 8) as u8, v as u8, 255]);
                }
            }
            BLACK
        }
    }
}

struct Canvas {
    img: RgbaImage,
    scale: f64,
}

impl Canvas {
    fn put(&mut self, x: i64, y: i64, c: Rgba<u8>) {
        if x >= 0 && y >= 0 && (x as u32) < self.img.width() && (y as u32) < self.img.height() {
            self.img.put_pixel(x as u32, y as u32, c);
        }
    }

    /// Visits every pixel whose center is inside the scene-space box.
    fn each_pixel(&mut self, min: (f64, f64), max: (f64, f64), mut f: impl FnMut((f64, f64)) -> Option<Rgba<u8>>) {
        let s = self.scale;
        let x0 = (min.0 * s).floor().max(0.0) as i64;
        let y0 = (min.1 * s).floor().max(0.0) as i64;
        let x1 = ((max.0 * s).ceil() as i64).min(self.img.width() as i64 - 1);
        let y1 = ((max.1 * s).ceil() as i64).min(self.img.height() as i64 - 1);
        for py in y0..=y1 {
            for px in x0..=x1 {
                let p = ((px as f64 + 0.5) / s, (py as f64 + 0.5) / s);
                if let Some(c) = f(p) {
                    self.put(px, py, c);
                }
            }
        }
    }

    fn segment(&mut self, a: (f64, f64), b: (f64, f64), width: f64, c: Rgba<u8>) {
        let half = (width / 2.0).max(0.5 / self.scale);
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let len2 = (dx * dx + dy * dy).max(1e-12);
        let min = (a.0.min(b.0) - half, a.1.min(b.1) - half);
        let max = (a.0.max(b.0) + half, a.1.max(b.1) + half);
        self.each_pixel(min, max, |p| {
            let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0);
            let q = (a.0 + t * dx, a.1 + t * dy);
            ((p.0 - q.0).hypot(p.1 - q.1) <= half).then_some(c)
        });
    }

    fn triangle(&mut self, t: [(f64, f64); 3], c: Rgba<u8>) {
        let min = (t[0].0.min(t[1].0).min(t[2].0), t[0].1.min(t[1].1).min(t[2].1));
        let max = (t[0].0.max(t[1].0).max(t[2].0), t[0].1.max(t[1].1).max(t[2].1));
        let side = |a: (f64, f64), b: (f64, f64), p: (f64, f64)| (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
        self.each_pixel(min, max, |p| {
            let d = [side(t[0], t[1], p), side(t[1], t[2], p), side(t[2], t[0], p)];
            let inside = d.iter().all(|&v| v >= 0.0) || d.iter().all(|&v| v <= 0.0);
            inside.then_some(c)
        });
    }

    fn node(&mut self, center: (f64, f64), r: f64, shape: NodeShape, stroke_width: f64, fill: Rgba<u8>, stroke: Rgba<u8>) {
        let half = (stroke_width / 2.0).max(0.5 / self.scale);
        let min = (center.0 - r - half, center.1 - r - half);
        let max = (center.0 + r + half, center.1 + r + half);
        self.each_pixel(min, max, |p| {
            let (dx, dy) = (p.0 - center.0, p.1 - center.1);
            // Signed distance to the outline, negative inside.
            let d = match shape {
                NodeShape::Circle => dx.hypot(dy) - r,
                NodeShape::Square => dx.abs().max(dy.abs()) - r,
            };
            if d.abs() <= half {
                Some(stroke)
            } else if d < 0.0 {
                Some(fill)
            } else {
                None
            }
        });
    }

    fn text(&mut self, text: &str, center: (f64, f64), font_size: f64, c: Rgba<u8>) {
        let glyphs: Vec<&[u8; 7]> = text.bytes().filter_map(|b| b.is_ascii_digit().then(|| &DIGITS[(b - b'0') as usize])).collect();
        if glyphs.is_empty() {
            return;
        }
        let cell = font_size / 7.0;
        let advance = 6.0 * cell;
        let width = advance * glyphs.len() as f64 - cell;
        let left = center.0 - width / 2.0;
        let top = center.1 - 3.5 * cell;
        for (i, glyph) in glyphs.iter().enumerate() {
            for (row, bits) in glyph.iter().enumerate() {
                for col in 0..5 {
                    if bits & (0x10 >> col) != 0 {
                        let x = left + i as f64 * advance + col as f64 * cell;
                        let y = top + row as f64 * cell;
                        self.each_pixel((x, y), (x + cell, y + cell), |p| {
                            (p.0 >= x && p.0 < x + cell && p.1 >= y && p.1 < y + cell).then_some(c)
                        });
                    }
                }
            }
        }
    }
}

/// Draws the scene so that its longer side spans `max_px` pixels.
pub fn rasterize(scene: &Scene, max_px: u32) -> RgbaImage {
    let scale = max_px as f64 / scene.width.max(scene.height);
    let w = ((scene.width * scale).round() as u32).max(1);
    let h = ((scene.height * scale).round() as u32).max(1);
    let s = &scene.style;
    let mut canvas = Canvas { img: RgbaImage::from_pixel(w, h, color(&s.background)), scale };
    let stroke = color(&s.stroke);
    for e in &scene.edges {
        let end = match e.arrow {
            // Stop the line where the arrowhead starts so the tip stays sharp.
            Some(t) => ((t[1].0 + t[2].0) / 2.0, (t[1].1 + t[2].1) / 2.0),
            None => e.end,
        };
        canvas.segment(e.start, end, s.stroke_width, stroke);
        if let Some(t) = e.arrow {
            canvas.triangle(t, stroke);
        }
    }
    for e in &scene.edges {
        if let Some((text, at)) = &e.weight {
            canvas.text(text, *at, s.font_size, stroke);
        }
    }
    for n in &scene.nodes {
        canvas.node(n.center, s.node_radius, n.shape, s.stroke_width, color(&s.node_fill), stroke);
        canvas.text(&n.label, n.center, s.font_size, stroke);
    }
    canvas.img
}

/// PNG bytes (RGBA, 8-bit) of the scene.
pub fn render_png(scene: &Scene, max_px: u32) -> Vec<u8> {
    let img = rasterize(scene, max_px);
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, ImageFormat::Png).expect("encoding to memory cannot fail");
    out.into_inner()
}
