use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AoiKind {
    Image,
    Description,
    Price,
}

impl AoiKind {
    pub const ALL: [AoiKind; 3] = [AoiKind::Image, AoiKind::Description, AoiKind::Price];

    pub fn name(self) -> &'static str {
        match self {
            AoiKind::Image => "image",
            AoiKind::Description => "description",
            AoiKind::Price => "price",
        }
    }
}

impl std::str::FromStr for AoiKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "image" => Ok(AoiKind::Image),
            "description" => Ok(AoiKind::Description),
            "price" => Ok(AoiKind::Price),
            other => Err(Error::validation("kind", format!("unknown AOI kind `{other}`"))),
        }
    }
}

/// `(product, kind)`: product is the 1-based list position.
pub type AoiKey = (usize, AoiKind);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Self { x, y, w, h }
    }

    pub fn contains(&self, px: f64, py: f64) -> bool {
        px >= self.x as f64
            && px < (self.x + self.w) as f64
            && py >= self.y as f64
            && py < (self.y + self.h) as f64
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x >= self.x
            && other.y >= self.y
            && other.x + other.w <= self.x + self.w
            && other.y + other.h <= self.y + self.h
    }

    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x < other.x + other.w
            && other.x < self.x + self.w
            && self.y < other.y + other.h
            && other.y < self.y + self.h
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aoi {
    pub product: usize,
    pub kind: AoiKind,
    #[serde(flatten)]
    pub rect: Rect,
}

impl Aoi {
    pub fn key(&self) -> AoiKey {
        (self.product, self.kind)
    }

    pub fn label(&self) -> String {
        format!("{}:{}", self.product, self.kind.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageDims {
    pub w: u32,
    pub h: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AoiLayout {
    pub page: PageDims,
    pub aois: Vec<Aoi>,
}

impl AoiLayout {
    /// Checks bounds and pairwise disjointness.
    pub fn validate(&self) -> Result<()> {
        let page = Rect::new(0, 0, self.page.w, self.page.h);
        for a in &self.aois {
            if !page.contains_rect(&a.rect) {
                return Err(Error::validation(
                    "aois",
                    format!("AOI {} exceeds the page", a.label()),
                ));
            }
        }
        for (i, a) in self.aois.iter().enumerate() {
            for b in &self.aois[i + 1..] {
                if a.rect.overlaps(&b.rect) {
                    return Err(Error::OverlappingAois(a.label(), b.label()));
                }
            }
        }
        Ok(())
    }

    /// Index of the AOI containing `(x, y)`, if any.
    pub fn locate(&self, x: f64, y: f64) -> Option<usize> {
        self.aois.iter().position(|a| a.rect.contains(x, y))
    }

    pub fn get(&self, product: usize, kind: AoiKind) -> Option<&Aoi> {
        self.aois
            .iter()
            .find(|a| a.product == product && a.kind == kind)
    }

    pub fn product_count(&self) -> usize {
        self.aois.iter().map(|a| a.product).max().unwrap_or(0)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let layout: Self = serde_json::from_str(text)?;
        layout.validate()?;
        Ok(layout)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
