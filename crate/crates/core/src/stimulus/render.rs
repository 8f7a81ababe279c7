//! Pixel-deterministic renderer for single-column product lists.

use font8x8::legacy::BASIC_LEGACY;

use super::layout::{Aoi, AoiKind, AoiLayout, PageDims, Rect};
use super::model::{Magnitude, ProductSpec, ShapeMotif, StimulusSpec};
use crate::error::Result;
use crate::imaging::RasterImage;

pub const PAGE_WIDTH: u32 = 800;
pub const HEADER_HEIGHT: u32 = 80;
pub const ROW_HEIGHT: u32 = 160;
pub const IMAGE_COLUMN: u32 = 200;
pub const DESCRIPTION_COLUMN: u32 = 380;
pub const PRICE_COLUMN: u32 = PAGE_WIDTH - IMAGE_COLUMN - DESCRIPTION_COLUMN;

const WHITE: [u8; 3] = [255, 255, 255];
const TITLE_COLOR: [u8; 3] = [0, 74, 153];
const BODY_COLOR: [u8; 3] = [90, 90, 90];
const PRICE_COLOR: [u8; 3] = [204, 0, 0];
const STAR_ON: [u8; 3] = [250, 180, 0];
const STAR_OFF: [u8; 3] = [215, 215, 215];
const RULE_COLOR: [u8; 3] = [225, 225, 225];
const TAG_RED: [u8; 3] = [220, 20, 30];
const TAG_GREEN: [u8; 3] = [120, 210, 120];

/// Which rendered text a [`TextBox`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TextField {
    Title,
    Description,
    Reviews,
    Price,
    DiscountTag,
}

/// Bounding box of one rendered string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextBox {
    pub product: usize,
    pub field: TextField,
    pub text: String,
    pub rect: Rect,
}

#[derive(Debug, Clone)]
pub struct RenderOutput {
    pub image: RasterImage,
    pub layout: AoiLayout,
    pub text_boxes: Vec<TextBox>,
}

/// AOI rectangles for a list of `products` rows; depends on nothing else.
pub fn page_layout(products: usize) -> AoiLayout {
    let mut aois = Vec::with_capacity(products * 3);
    for i in 0..products {
        let y = HEADER_HEIGHT + ROW_HEIGHT * i as u32;
        let p = i + 1;
        aois.push(Aoi {
            product: p,
            kind: AoiKind::Image,
            rect: Rect::new(0, y, IMAGE_COLUMN, ROW_HEIGHT),
        });
        aois.push(Aoi {
            product: p,
            kind: AoiKind::Description,
            rect: Rect::new(IMAGE_COLUMN, y, DESCRIPTION_COLUMN, ROW_HEIGHT),
        });
        aois.push(Aoi {
            product: p,
            kind: AoiKind::Price,
            rect: Rect::new(IMAGE_COLUMN + DESCRIPTION_COLUMN, y, PRICE_COLUMN, ROW_HEIGHT),
        });
    }
    AoiLayout {
        page: PageDims {
            w: PAGE_WIDTH,
            h: HEADER_HEIGHT + ROW_HEIGHT * products as u32,
        },
        aois,
    }
}

struct Canvas {
    width: u32,
    height: u32,
    px: Vec<[u8; 3]>,
}

impl Canvas {
    fn new(width: u32, height: u32, fill: [u8; 3]) -> Self {
        Self {
            width,
            height,
            px: vec![fill; (width * height) as usize],
        }
    }

    fn set(&mut self, x: i64, y: i64, c: [u8; 3]) {
        if x >= 0 && y >= 0 && (x as u32) < self.width && (y as u32) < self.height {
            self.px[(y as u32 * self.width + x as u32) as usize] = c;
        }
    }

    fn fill_rect(&mut self, x: i64, y: i64, w: i64, h: i64, c: [u8; 3]) {
        for yy in y..y + h {
            for xx in x..x + w {
                self.set(xx, yy, c);
            }
        }
    }

    fn fill_ellipse(&mut self, cx: f64, cy: f64, rx: f64, ry: f64, c: [u8; 3]) {
        let (x0, x1) = ((cx - rx).floor() as i64, (cx + rx).ceil() as i64);
        let (y0, y1) = ((cy - ry).floor() as i64, (cy + ry).ceil() as i64);
        for y in y0..=y1 {
            for x in x0..=x1 {
                let dx = (x as f64 + 0.5 - cx) / rx;
                let dy = (y as f64 + 0.5 - cy) / ry;
                if dx * dx + dy * dy <= 1.0 {
                    self.set(x, y, c);
                }
            }
        }
    }

    fn fill_round_rect(&mut self, x: i64, y: i64, w: i64, h: i64, r: i64, c: [u8; 3]) {
        self.fill_rect(x + r, y, w - 2 * r, h, c);
        self.fill_rect(x, y + r, w, h - 2 * r, c);
        let rf = r as f64;
        for (cx, cy) in [
            (x + r, y + r),
            (x + w - r, y + r),
            (x + r, y + h - r),
            (x + w - r, y + h - r),
        ] {
            self.fill_ellipse(cx as f64, cy as f64, rf, rf, c);
        }
    }

    /// Even-odd fill of a polygon, sampled at pixel centers, restricted to
    /// columns below `clip_x`.
    fn fill_polygon(&mut self, pts: &[(f64, f64)], clip_x: f64, c: [u8; 3]) {
        let x0 = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).floor() as i64;
        let x1 = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).ceil() as i64;
        let y0 = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min).floor() as i64;
        let y1 = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max).ceil() as i64;
        for y in y0..=y1 {
            for x in x0..=x1 {
                let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
                if px >= clip_x {
                    continue;
                }
                let mut inside = false;
                let mut j = pts.len() - 1;
                for i in 0..pts.len() {
                    let (xi, yi) = pts[i];
                    let (xj, yj) = pts[j];
                    if (yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi {
                        inside = !inside;
                    }
                    j = i;
                }
                if inside {
                    self.set(x, y, c);
                }
            }
        }
    }

    /// Draws ASCII text with the 8x8 bitmap font; returns the inked box.
    fn text(&mut self, x: i64, y: i64, text: &str, scale: i64, c: [u8; 3], bold: bool) -> Rect {
        let mut cursor = x;
        for ch in text.chars() {
            let code = if ch.is_ascii() { ch as usize } else { b'?' as usize };
            let glyph = BASIC_LEGACY[code];
            for (row, bits) in glyph.iter().enumerate() {
                for col in 0..8 {
                    if bits & (1 << col) != 0 {
                        let (gx, gy) = (cursor + col * scale, y + row as i64 * scale);
                        self.fill_rect(gx, gy, scale, scale, c);
                        if bold {
                            self.fill_rect(gx + 1, gy, scale, scale, c);
                        }
                    }
                }
            }
            cursor += 8 * scale;
        }
        let w = (cursor - x) + i64::from(bold);
        Rect::new(x as u32, y as u32, w as u32, (8 * scale) as u32)
    }

    fn into_raster(self) -> Result<RasterImage> {
        let w = self.width as usize;
        RasterImage::from_fn(w, self.height as usize, |x, y| {
            let [r, g, b] = self.px[y * w + x];
            [r as f64 / 255.0, g as f64 / 255.0, b as f64 / 255.0]
        })
    }
}

fn shade(c: [u8; 3], toward: [u8; 3], t: f64) -> [u8; 3] {
    let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
    [mix(c[0], toward[0]), mix(c[1], toward[1]), mix(c[2], toward[2])]
}

fn draw_product_image(cv: &mut Canvas, x: i64, y: i64, size: i64, p: &ProductSpec) {
    let style = &p.image_style;
    cv.fill_rect(x, y, size, size, style.background_color);
    let c = style.base_color;
    let accent = shade(c, WHITE, 0.35);
    let (cx, cy) = (x + size / 2, y + size / 2);
    match style.shape_motif {
        ShapeMotif::Phone => {
            cv.fill_round_rect(cx - 32, y + 10, 64, size - 20, 10, c);
            cv.fill_rect(cx - 26, y + 24, 52, size - 50, accent);
            cv.fill_ellipse(cx as f64, (y + size - 18) as f64, 4.0, 4.0, accent);
        }
        ShapeMotif::Monitor => {
            cv.fill_rect(x + 8, y + 18, size - 16, 76, c);
            cv.fill_rect(x + 14, y + 24, size - 28, 64, accent);
            cv.fill_rect(cx - 6, y + 94, 12, 22, c);
            cv.fill_rect(cx - 30, y + 116, 60, 6, c);
        }
        ShapeMotif::Chair => {
            cv.fill_round_rect(cx - 30, y + 12, 60, 58, 8, c);
            cv.fill_rect(cx - 40, y + 74, 80, 14, c);
            cv.fill_rect(cx - 4, y + 88, 8, 24, accent);
            cv.fill_rect(cx - 36, y + 112, 72, 5, c);
            for dx in [-36, -2, 32] {
                cv.fill_ellipse((cx + dx + 2) as f64, (y + 121) as f64, 4.0, 4.0, c);
            }
        }
        ShapeMotif::Backpack => {
            cv.fill_round_rect(cx - 40, y + 14, 80, 108, 16, c);
            cv.fill_round_rect(cx - 28, y + 70, 56, 40, 8, accent);
            cv.fill_rect(cx - 14, y + 6, 28, 10, c);
        }
        ShapeMotif::Shoe => {
            cv.fill_rect(x + 14, cy - 4, size - 40, 30, c);
            cv.fill_ellipse((x + size - 30) as f64, (cy + 11) as f64, 22.0, 15.0, c);
            cv.fill_rect(x + 14, cy - 24, 36, 24, c);
            cv.fill_rect(x + 12, cy + 26, size - 22, 6, accent);
        }
    }
}

fn star_points(cx: f64, cy: f64, outer: f64) -> Vec<(f64, f64)> {
    let inner = outer * 0.45;
    (0..10)
        .map(|k| {
            let r = if k % 2 == 0 { outer } else { inner };
            let a = std::f64::consts::PI * (k as f64 / 5.0) - std::f64::consts::FRAC_PI_2;
            (cx + r * a.cos(), cy + r * a.sin())
        })
        .collect()
}

/// Price in cents formatted European style, `1.234,56`.
pub fn format_price(cents: u64) -> String {
    let units = (cents / 100).to_string();
    let mut grouped = String::new();
    for (i, ch) in units.chars().enumerate() {
        if i > 0 && (units.len() - i) % 3 == 0 {
            grouped.push('.');
        }
        grouped.push(ch);
    }
    format!("{grouped},{:02}", cents % 100)
}

fn truncate(text: &str, max_chars: usize) -> String {
    if text.chars().count() <= max_chars {
        text.to_string()
    } else {
        let mut s: String = text.chars().take(max_chars.saturating_sub(2)).collect();
        s.push_str("..");
        s
    }
}

/// Greedy word wrap into at most `lines` lines of `width` characters.
fn wrap(text: &str, width: usize, lines: usize) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut current = String::new();
    for word in text.split_whitespace() {
        let extra = if current.is_empty() { 0 } else { 1 };
        if current.len() + extra + word.len() > width && !current.is_empty() {
            out.push(std::mem::take(&mut current));
        }
        if !current.is_empty() {
            current.push(' ');
        }
        current.push_str(word);
    }
    if !current.is_empty() {
        out.push(current);
    }
    out.truncate(lines);
    out.into_iter().map(|l| truncate(&l, width)).collect()
}

/// Renders the page and records every text box drawn.
pub fn render_instrumented(spec: &StimulusSpec) -> Result<RenderOutput> {
    spec.validate()?;
    let layout = page_layout(spec.products.len());
    let mut cv = Canvas::new(layout.page.w, layout.page.h, WHITE);
    let mut boxes = Vec::new();

    // header: search bar with the query
    cv.fill_rect(0, 0, PAGE_WIDTH as i64, 56, [0, 88, 178]);
    cv.fill_rect(24, 12, 520, 32, WHITE);
    cv.text(36, 20, &truncate(&spec.query, 30), 2, BODY_COLOR, false);
    cv.text(24, 62, &format!("{} results", spec.products.len()), 1, BODY_COLOR, false);

    for (i, p) in spec.products.iter().enumerate() {
        let product = i + 1;
        let y = (HEADER_HEIGHT + ROW_HEIGHT * i as u32) as i64;
        cv.fill_rect(0, y + ROW_HEIGHT as i64 - 1, PAGE_WIDTH as i64, 1, RULE_COLOR);

        draw_product_image(&mut cv, 32, y + 12, 136, p);

        let dx = IMAGE_COLUMN as i64 + 16;
        let title = truncate(&p.title, 18);
        let r = cv.text(dx, y + 18, &title, 2, TITLE_COLOR, false);
        boxes.push(TextBox { product, field: TextField::Title, text: title, rect: r });
        for (k, line) in wrap(&p.description, 34, 2).into_iter().enumerate() {
            let r = cv.text(dx, y + 50 + 14 * k as i64, &line, 1, BODY_COLOR, false);
            boxes.push(TextBox { product, field: TextField::Description, text: line, rect: r });
        }
        for s in 0..5 {
            let cx = (dx + 8 + 18 * s) as f64;
            let cy = (y + 104) as f64;
            let pts = star_points(cx, cy, 8.0);
            cv.fill_polygon(&pts, f64::INFINITY, STAR_OFF);
            let fill = (p.star_rating - s as f64).clamp(0.0, 1.0);
            if fill > 0.0 {
                cv.fill_polygon(&pts, cx - 8.0 + 16.0 * fill, STAR_ON);
            }
        }
        let reviews = format!("({})", p.review_count);
        let r = cv.text(dx + 96, y + 100, &reviews, 1, BODY_COLOR, false);
        boxes.push(TextBox { product, field: TextField::Reviews, text: reviews, rect: r });

        let px = (IMAGE_COLUMN + DESCRIPTION_COLUMN) as i64 + 16;
        if let Some(tag) = &p.discount_tag {
            let text = truncate(&tag.text, 12);
            let r = match tag.style {
                Magnitude::TypeI => {
                    let w = 16 * text.len() as i64 + 13;
                    cv.fill_rect(px - 4, y + 16, w, 26, TAG_RED);
                    cv.text(px + 2, y + 21, &text, 2, WHITE, true)
                }
                Magnitude::TypeII => cv.text(px, y + 24, &text, 2, TAG_GREEN, false),
            };
            boxes.push(TextBox { product, field: TextField::DiscountTag, text, rect: r });
        }
        let price = format_price(p.price);
        // right-aligned against the page margin
        let right = PAGE_WIDTH as i64 - 16;
        let r = cv.text(right - 24 * price.len() as i64 - 1, y + 64, &price, 3, PRICE_COLOR, true);
        boxes.push(TextBox { product, field: TextField::Price, text: price, rect: r });
    }

    Ok(RenderOutput {
        image: cv.into_raster()?,
        layout,
        text_boxes: boxes,
    })
}

pub fn render(spec: &StimulusSpec) -> Result<(RasterImage, AoiLayout)> {
    let out = render_instrumented(spec)?;
    Ok((out.image, out.layout))
}
