//! Synthetic product-list stimuli: catalog sampling, outlier injection and
//! page rendering with exact AOI rectangles.

mod catalog;
mod inject;
mod layout;
mod model;
mod render;

pub use catalog::{known_queries, sample_products, PRICE_SPREAD};
pub use inject::{inject_outlier, price_factor, TYPE_II_TAG_TEXT};
pub use layout::{Aoi, AoiKey, AoiKind, AoiLayout, PageDims, Rect};
pub use model::{
    DiscountTag, ImageStyle, Magnitude, Outlier, OutlierFeature, ProductSpec, ShapeMotif,
    StimulusSpec, PRODUCTS_PER_PAGE,
};
pub use render::{
    format_price, page_layout, render, render_instrumented, RenderOutput, TextBox, TextField,
    DESCRIPTION_COLUMN, HEADER_HEIGHT, IMAGE_COLUMN, PAGE_WIDTH, PRICE_COLUMN, ROW_HEIGHT,
};

use crate::error::Result;

/// A full page for `query` with one injected outlier.
pub fn build_stimulus(
    query: &str,
    outlier: Option<Outlier>,
    seed: u64,
) -> Result<StimulusSpec> {
    let mut products = sample_products(query, PRODUCTS_PER_PAGE, seed)?;
    if let Some(o) = outlier {
        products = inject_outlier(&products, o.feature, o.position, o.magnitude, seed)?;
    }
    let spec = StimulusSpec {
        query: query.to_string(),
        products,
        outlier,
        seed,
    };
    spec.validate()?;
    Ok(spec)
}

/// Query used for each outlier feature in the bundled corpus: image outliers
/// on phones, tags on monitors, prices on chairs, ratings on backpacks.
pub fn corpus_query(feature: OutlierFeature) -> &'static str {
    match feature {
        OutlierFeature::Image => "phones",
        OutlierFeature::DiscountTag => "monitors",
        OutlierFeature::Price => "chairs",
        OutlierFeature::StarRating => "backpacks",
    }
}

/// Outlier positions used by the bundled corpus.
pub const CORPUS_POSITIONS: [usize; 3] = [3, 8, 13];

/// The nine-stimulus corpus: image, price and discount-tag outliers (type I)
/// at positions 3, 8 and 13.
pub fn bundled_corpus(seed: u64) -> Result<Vec<StimulusSpec>> {
    let mut out = Vec::new();
    for feature in [
        OutlierFeature::Image,
        OutlierFeature::Price,
        OutlierFeature::DiscountTag,
    ] {
        for position in CORPUS_POSITIONS {
            let outlier = Outlier {
                feature,
                position,
                magnitude: Magnitude::TypeI,
            };
            out.push(build_stimulus(corpus_query(feature), Some(outlier), seed)?);
        }
    }
    Ok(out)
}
