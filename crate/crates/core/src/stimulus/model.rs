use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Products on every stimulus page.
pub const PRODUCTS_PER_PAGE: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Magnitude {
    #[serde(rename = "typeI")]
    TypeI,
    #[serde(rename = "typeII")]
    TypeII,
}

impl Magnitude {
    pub fn name(self) -> &'static str {
        match self {
            Magnitude::TypeI => "typeI",
            Magnitude::TypeII => "typeII",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscountTag {
    pub style: Magnitude,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeMotif {
    Phone,
    Monitor,
    Chair,
    Backpack,
    Shoe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageStyle {
    pub base_color: [u8; 3],
    pub shape_motif: ShapeMotif,
    pub background_color: [u8; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductSpec {
    pub title: String,
    pub description: String,
    /// Price in cents.
    pub price: u64,
    pub star_rating: f64,
    pub review_count: u32,
    #[serde(default)]
    pub discount_tag: Option<DiscountTag>,
    pub image_style: ImageStyle,
}

impl ProductSpec {
    pub fn validate(&self, field: &str) -> Result<()> {
        if self.price == 0 {
            return Err(Error::validation(format!("{field}.price"), "must be positive"));
        }
        if !(1.0..=5.0).contains(&self.star_rating) {
            return Err(Error::validation(
                format!("{field}.star_rating"),
                "must lie within [1, 5]",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutlierFeature {
    Price,
    DiscountTag,
    Image,
    StarRating,
}

impl OutlierFeature {
    pub fn name(self) -> &'static str {
        match self {
            OutlierFeature::Price => "price",
            OutlierFeature::DiscountTag => "discount_tag",
            OutlierFeature::Image => "image",
            OutlierFeature::StarRating => "star_rating",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outlier {
    pub feature: OutlierFeature,
    /// 1-based list position.
    pub position: usize,
    pub magnitude: Magnitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StimulusSpec {
    pub query: String,
    pub products: Vec<ProductSpec>,
    #[serde(default)]
    pub outlier: Option<Outlier>,
    pub seed: u64,
}

impl StimulusSpec {
    pub fn validate(&self) -> Result<()> {
        if self.products.len() != PRODUCTS_PER_PAGE {
            return Err(Error::validation(
                "products",
                format!(
                    "a page holds exactly {PRODUCTS_PER_PAGE} products, found {}",
                    self.products.len()
                ),
            ));
        }
        for (i, p) in self.products.iter().enumerate() {
            p.validate(&format!("products[{i}]"))?;
        }
        if let Some(o) = &self.outlier {
            if !(1..=PRODUCTS_PER_PAGE).contains(&o.position) {
                return Err(Error::validation(
                    "outlier.position",
                    format!("must lie within [1, {PRODUCTS_PER_PAGE}], found {}", o.position),
                ));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
