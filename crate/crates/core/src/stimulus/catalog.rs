//! Deterministic stand-in product catalog.
//!
//! Each query draws a list anchor price from its category band, then every
//! price from `[anchor, 1.9 * anchor]`, so no product is more than twice (or
//! less than half) the list median.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{ImageStyle, ProductSpec, ShapeMotif};
use crate::error::{Error, Result};

/// Upper price of a list relative to its anchor.
pub const PRICE_SPREAD: f64 = 1.9;

struct Template {
    query: &'static str,
    motif: ShapeMotif,
    /// Range of list anchors, whole currency units.
    anchor: (u64, u64),
    brands: &'static [&'static str],
    models: &'static [&'static str],
    variants: &'static [&'static str],
    blurbs: &'static [&'static str],
    palette: &'static [[u8; 3]],
    backgrounds: &'static [[u8; 3]],
}

const LIGHT_BACKGROUNDS: &[[u8; 3]] = &[[246, 246, 246], [240, 240, 238], [250, 250, 250]];

const TEMPLATES: &[Template] = &[
    Template {
        query: "phones",
        motif: ShapeMotif::Phone,
        anchor: (150, 450),
        brands: &["Novatel", "Orion", "Kestrel", "Lumo", "Pinecone", "Vantor"],
        models: &["X12", "S8", "Note 5", "Lite 3", "Pro 9", "A54", "Edge 2"],
        variants: &["128GB", "256GB", "64GB", "5G 128GB", "Dual SIM"],
        blurbs: &[
            "6.5 inch OLED display, triple camera",
            "All-day battery with fast charging",
            "Dual SIM smartphone, water resistant",
            "Compact design with 120Hz screen",
            "Night mode camera and stereo speakers",
        ],
        palette: &[[34, 34, 38], [58, 60, 66], [80, 82, 88], [44, 46, 52], [24, 26, 30]],
        backgrounds: LIGHT_BACKGROUNDS,
    },
    Template {
        query: "monitors",
        motif: ShapeMotif::Monitor,
        anchor: (120, 300),
        brands: &["Viewmax", "Optica", "Pixelon", "Dynex", "Clearline"],
        models: &["24F1", "27Q", "UltraView 32", "Office 22", "Curve 34"],
        variants: &["Full HD", "QHD IPS", "4K UHD", "144Hz", "USB-C"],
        blurbs: &[
            "IPS panel with thin bezels, HDMI input",
            "Height adjustable stand, low blue light",
            "Flicker free, 75Hz refresh rate",
            "Wide color gamut for office and photo",
            "Built-in speakers and VESA mount",
        ],
        palette: &[[30, 30, 32], [52, 54, 58], [40, 42, 46], [66, 68, 72]],
        backgrounds: LIGHT_BACKGROUNDS,
    },
    Template {
        query: "chairs",
        motif: ShapeMotif::Chair,
        anchor: (100, 180),
        brands: &["Ergoline", "Sitwell", "Officio", "Backrest", "Cormo"],
        models: &["Task 200", "Mesh Pro", "Comfort X", "Exec 5", "Flex"],
        variants: &["black", "graphite", "dark grey", "mesh", "leather look"],
        blurbs: &[
            "Ergonomic office chair with lumbar support",
            "Adjustable armrests and seat height",
            "Breathable mesh back, tilt mechanism",
            "Swivel chair with smooth running castors",
            "Padded seat, load capacity 120 kg",
        ],
        palette: &[[28, 28, 30], [44, 42, 40], [36, 36, 40], [52, 50, 48]],
        backgrounds: LIGHT_BACKGROUNDS,
    },
    Template {
        query: "backpacks",
        motif: ShapeMotif::Backpack,
        anchor: (25, 45),
        brands: &["Trailmark", "Urbanpack", "Nordway", "Carrylab"],
        models: &["Daypack 20", "Commuter", "Roll Top", "Laptop 15", "Hiker 30"],
        variants: &["20L", "25L", "30L", "water repellent", "anti-theft"],
        blurbs: &[
            "Padded laptop sleeve up to 15.6 inch",
            "Water repellent fabric, side pockets",
            "Ergonomic straps and chest belt",
            "Lightweight daypack for city and travel",
        ],
        palette: &[[36, 44, 64], [40, 40, 44], [54, 58, 66], [30, 36, 52]],
        backgrounds: LIGHT_BACKGROUNDS,
    },
    Template {
        query: "shoes",
        motif: ShapeMotif::Shoe,
        anchor: (40, 90),
        brands: &["Stridex", "Kinetix", "Runwell", "Pacer", "Lumen"],
        models: &["Air 3", "Trail Run", "Street 90", "Court Low", "Flex Knit"],
        variants: &["size 42", "size 44", "size 39", "unisex", "wide fit"],
        blurbs: &[
            "Lightweight running shoe with cushioned sole",
            "Breathable knit upper, rubber outsole",
            "Everyday sneaker with memory foam insole",
            "Low top leather look court shoe",
        ],
        palette: &[[60, 60, 64], [40, 40, 42], [84, 84, 88], [50, 52, 56]],
        backgrounds: LIGHT_BACKGROUNDS,
    },
];

/// Queries the catalog knows.
pub fn known_queries() -> Vec<&'static str> {
    TEMPLATES.iter().map(|t| t.query).collect()
}

fn template(query: &str) -> Result<&'static Template> {
    TEMPLATES
        .iter()
        .find(|t| t.query == query)
        .ok_or_else(|| Error::UnknownQuery(query.to_string()))
}

/// FNV-1a, used to mix the query into the RNG seed.
fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

pub(crate) fn rng_for(query: &str, seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(query))
}

/// `n` outlier-free products for `query`, deterministic in `(query, n, seed)`.
pub fn sample_products(query: &str, n: usize, seed: u64) -> Result<Vec<ProductSpec>> {
    if n == 0 {
        return Err(Error::validation("n", "at least one product is required"));
    }
    let t = template(query)?;
    let mut rng = rng_for(query, seed);
    let anchor = rng.random_range(t.anchor.0..=t.anchor.1) as f64;
    let background = *t.backgrounds.choose(&mut rng).expect("non-empty");

    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let brand = t.brands.choose(&mut rng).expect("non-empty");
        let model = t.models.choose(&mut rng).expect("non-empty");
        let variant = t.variants.choose(&mut rng).expect("non-empty");
        let blurb = t.blurbs.choose(&mut rng).expect("non-empty");
        let units = rng.random_range(anchor..=anchor * PRICE_SPREAD).floor() as u64;
        let cents = units * 100 + [0, 49, 95, 99][rng.random_range(0..4)];
        let rating_tenths: u32 = rng.random_range(35..=50);
        let reviews = rng.random_range(3..=2400);
        out.push(ProductSpec {
            title: format!("{brand} {model} {variant}"),
            description: blurb.to_string(),
            price: cents,
            star_rating: rating_tenths as f64 / 10.0,
            review_count: reviews,
            discount_tag: None,
            image_style: ImageStyle {
                base_color: *t.palette.choose(&mut rng).expect("non-empty"),
                shape_motif: t.motif,
                background_color: background,
            },
        });
    }
    Ok(out)
}
