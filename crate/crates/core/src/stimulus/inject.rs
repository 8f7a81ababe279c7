use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::model::{DiscountTag, Magnitude, OutlierFeature, ProductSpec};
use crate::error::{Error, Result};

/// Price multiplier applied to the median of the other products.
pub fn price_factor(magnitude: Magnitude) -> u64 {
    match magnitude {
        Magnitude::TypeI => 10,
        Magnitude::TypeII => 2,
    }
}

const TYPE_I_TAG_TEXTS: &[&str] = &["SPECIAL DEAL", "DEAL OF DAY", "TOP DEAL"];
pub const TYPE_II_TAG_TEXT: &str = "10% discount";

/// Median of `values` (mean of the middle pair for even counts), rounded to whole cents.
fn median_cents(mut values: Vec<u64>) -> u64 {
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]).div_ceil(2)
    }
}

fn rgb_to_hsv([r, g, b]: [u8; 3]) -> (f64, f64, f64) {
    let (r, g, b) = (r as f64 / 255.0, g as f64 / 255.0, b as f64 / 255.0);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let d = max - min;
    let h = if d == 0.0 {
        0.0
    } else if max == r {
        60.0 * (((g - b) / d).rem_euclid(6.0))
    } else if max == g {
        60.0 * ((b - r) / d + 2.0)
    } else {
        60.0 * ((r - g) / d + 4.0)
    };
    let s = if max == 0.0 { 0.0 } else { d / max };
    (h, s, max)
}

pub(crate) fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let h = h.rem_euclid(360.0);
    let c = v * s;
    let x = c * (1.0 - ((h / 60.0) % 2.0 - 1.0).abs());
    let m = v - c;
    let (r, g, b) = match (h / 60.0) as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let q = |u: f64| ((u + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    [q(r), q(g), q(b)]
}

/// Hue opposite to the saturation-weighted circular mean hue of `colors`.
/// Achromatic palettes map to a warm red.
pub(crate) fn contrasting_hue(colors: &[[u8; 3]]) -> f64 {
    let (mut sx, mut sy) = (0.0, 0.0);
    for c in colors {
        let (h, s, _) = rgb_to_hsv(*c);
        let rad = h.to_radians();
        sx += s * rad.cos();
        sy += s * rad.sin();
    }
    if (sx * sx + sy * sy).sqrt() < 0.05 * colors.len().max(1) as f64 {
        return 5.0;
    }
    (sy.atan2(sx).to_degrees() + 180.0).rem_euclid(360.0)
}

/// Returns `products` with one product altered at `position` (1-based).
///
/// Reference statistics (median price, rating range, shared palette) come
/// from the other products, so injecting the same outlier twice is the same
/// as injecting it once.
pub fn inject_outlier(
    products: &[ProductSpec],
    feature: OutlierFeature,
    position: usize,
    magnitude: Magnitude,
    seed: u64,
) -> Result<Vec<ProductSpec>> {
    if position == 0 || position > products.len() {
        return Err(Error::validation(
            "position",
            format!("must lie within [1, {}], found {position}", products.len()),
        ));
    }
    let idx = position - 1;
    let others: Vec<&ProductSpec> = products
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != idx)
        .map(|(_, p)| p)
        .collect();
    if others.is_empty() {
        return Err(Error::InjectionConflict(
            "an outlier needs at least one other product to deviate from".into(),
        ));
    }
    let mut out = products.to_vec();
    let target = &mut out[idx];
    match feature {
        OutlierFeature::Price => {
            let median = median_cents(others.iter().map(|p| p.price).collect());
            target.price = median * price_factor(magnitude);
        }
        OutlierFeature::DiscountTag => {
            let tag = match magnitude {
                Magnitude::TypeI => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    DiscountTag {
                        style: Magnitude::TypeI,
                        text: TYPE_I_TAG_TEXTS.choose(&mut rng).expect("non-empty").to_string(),
                    }
                }
                Magnitude::TypeII => DiscountTag {
                    style: Magnitude::TypeII,
                    text: TYPE_II_TAG_TEXT.to_string(),
                },
            };
            match &target.discount_tag {
                Some(existing) if *existing != tag => {
                    return Err(Error::InjectionConflict(format!(
                        "product {position} already carries a discount tag"
                    )));
                }
                _ => target.discount_tag = Some(tag),
            }
        }
        OutlierFeature::Image => {
            let palette: Vec<[u8; 3]> = others.iter().map(|p| p.image_style.base_color).collect();
            let hue = contrasting_hue(&palette);
            match magnitude {
                Magnitude::TypeI => {
                    target.image_style.base_color = hsv_to_rgb(hue, 1.0, 1.0);
                    target.image_style.background_color = hsv_to_rgb(hue, 0.25, 1.0);
                }
                Magnitude::TypeII => {
                    target.image_style.base_color = hsv_to_rgb(hue, 0.45, 0.85);
                    target.image_style.background_color = others[0].image_style.background_color;
                }
            }
        }
        OutlierFeature::StarRating => {
            let min = others.iter().map(|p| p.star_rating).fold(f64::INFINITY, f64::min);
            let max = others.iter().map(|p| p.star_rating).fold(f64::NEG_INFINITY, f64::max);
            let span = (max - min).max(0.5);
            let drop = match magnitude {
                Magnitude::TypeI => span,
                Magnitude::TypeII => span / 2.0,
            };
            target.star_rating = ((min - drop) * 10.0).round().max(10.0) / 10.0;
        }
    }
    Ok(out)
}
