//! Whole-model behavior of Itti-Koch and GBVS on test cards and rendered pages.

mod common;

use common::{argmax_distance, fixture};
use listgaze::imaging::RasterImage;
use listgaze::saliency::{
    conspicuity_map, gbvs_saliency, itti_saliency, itti_saliency_raw, overlay, FeatureGroup, GbvsParams,
    IttiParams, SaliencyMap, OVERLAY_ALPHA, VIRIDIS,
};
use listgaze::scoring::{aoi_saliency, outlier_rank};
use listgaze::stimulus::{build_stimulus, render, AoiKind, Magnitude, Outlier, OutlierFeature};

fn flip_error(a: &SaliencyMap, b: &SaliencyMap) -> f64 {
    a.values().iter().zip(b.flip_horizontal().values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn uniform_image_gives_zero_itti_map() {
    let image = RasterImage::read_png(fixture("uniform_64.png")).unwrap();
    let params = IttiParams::default();
    let map = itti_saliency(&image, &params).unwrap();
    assert_eq!(map.dims(), (64, 64));
    assert!(map.max() < 1e-9);
    for group in FeatureGroup::ALL {
        assert!(conspicuity_map(&image, group, &params).unwrap().values.iter().all(|v| v.abs() < 1e-9));
    }
    // blending an all-zero map paints the first color table entry everywhere
    let o = overlay(&image, &map, OVERLAY_ALPHA).unwrap();
    let expect = |c: usize| (1.0 - OVERLAY_ALPHA) * (128.0 / 255.0) + OVERLAY_ALPHA * VIRIDIS[0][c] as f64 / 255.0;
    assert!(o.red().iter().all(|v| (v - expect(0)).abs() < 1e-12));
    assert!(o.green().iter().all(|v| (v - expect(1)).abs() < 1e-12));
    assert!(o.blue().iter().all(|v| (v - expect(2)).abs() < 1e-12));
}

#[test]
fn uniform_image_gives_symmetric_centered_gbvs_map() {
    let image = RasterImage::read_png(fixture("uniform_64.png")).unwrap();
    let map = gbvs_saliency(&image, &GbvsParams::default()).unwrap();
    let (w, h) = map.dims();
    for y in 0..h {
        for x in 0..w {
            let v = map.at(x, y);
            assert!((v - map.at(w - 1 - x, y)).abs() < 1e-8);
            assert!((v - map.at(x, h - 1 - y)).abs() < 1e-8);
        }
    }
    assert!(map.at(w / 2, h / 2) >= map.at(0, 0));
}

#[test]
fn bright_disc_is_localized_by_both_models() {
    let image = RasterImage::read_png(fixture("disc_256.png")).unwrap();
    let itti = itti_saliency(&image, &IttiParams::default()).unwrap();
    let gbvs = gbvs_saliency(&image, &GbvsParams::default()).unwrap();
    assert!(argmax_distance(&itti, 128.0, 128.0) <= 12.0, "itti argmax {:?}", itti.argmax());
    assert!(argmax_distance(&gbvs, 128.0, 128.0) <= 12.0, "gbvs argmax {:?}", gbvs.argmax());
}

#[test]
fn red_square_wins_the_color_conspicuity() {
    let image = RasterImage::from_fn(128, 128, |x, y| {
        if (80..104).contains(&x) && (30..54).contains(&y) {
            [0.9, 0.1, 0.1]
        } else {
            [0.5, 0.5, 0.5]
        }
    })
    .unwrap();
    let c = conspicuity_map(&image, FeatureGroup::Color, &IttiParams::default()).unwrap();
    // output level 4 of 128 px is 8 px; the square spans cells 5..=6 x 1..=3
    let (x, y) = c.argmax();
    let scale = 128.0 / c.width as f64;
    let (px, py) = ((x as f64 + 0.5) * scale, (y as f64 + 0.5) * scale);
    assert!((80.0..104.0).contains(&px) && (30.0..54.0).contains(&py), "argmax cell ({x},{y})");
}

#[test]
fn itti_map_is_mean_of_conspicuity_maps() {
    let image = RasterImage::read_png(fixture("test_card_64.png")).unwrap();
    let params = IttiParams::default();
    let raw = itti_saliency_raw(&image, &params).unwrap();
    let maps: Vec<_> = FeatureGroup::ALL.iter().map(|g| conspicuity_map(&image, *g, &params).unwrap()).collect();
    for (i, v) in raw.values.iter().enumerate() {
        let mean = maps.iter().map(|m| m.values[i]).sum::<f64>() / 3.0;
        assert!((v - mean).abs() < 1e-9);
    }
}

/// Colored Gaussian blobs at generic positions: no plateaus, no exact ties.
fn blob_image() -> RasterImage {
    let blobs = [(14.0, 20.0, 5.0, [0.9, 0.2, 0.1]), (45.0, 12.0, 7.0, [0.1, 0.3, 0.8]), (37.0, 47.0, 4.0, [0.8, 0.8, 0.1])];
    RasterImage::from_fn(64, 64, |x, y| {
        let mut px = [0.35, 0.4, 0.45];
        for (bx, by, r, color) in blobs {
            let g = (-((x as f64 - bx).powi(2) + (y as f64 - by).powi(2)) / (2.0 * r * r)).exp();
            for c in 0..3 {
                px[c] += g * (color[c] - px[c]);
            }
        }
        px
    })
    .unwrap()
}

#[test]
fn models_are_deterministic_and_flip_equivariant() {
    // the test card's flat blocks exercise plateau handling in normalization
    let card = RasterImage::read_png(fixture("test_card_64.png")).unwrap();
    for image in [blob_image(), card] {
        let flipped = image.flip_horizontal();
        let itti = itti_saliency(&image, &IttiParams::default()).unwrap();
        assert_eq!(itti, itti_saliency(&image, &IttiParams::default()).unwrap());
        assert!(flip_error(&itti, &itti_saliency(&flipped, &IttiParams::default()).unwrap()) < 1e-6);
        let gbvs = gbvs_saliency(&image, &GbvsParams::default()).unwrap();
        assert_eq!(gbvs, gbvs_saliency(&image, &GbvsParams::default()).unwrap());
        assert!(flip_error(&gbvs, &gbvs_saliency(&flipped, &GbvsParams::default()).unwrap()) < 1e-6);
    }
}

#[test]
fn chair_price_outlier_ranks_in_top_three_under_gbvs() {
    let outlier = Outlier { feature: OutlierFeature::Price, position: 13, magnitude: Magnitude::TypeI };
    let spec = build_stimulus("chairs", Some(outlier), 7).unwrap();
    let (image, layout) = render(&spec).unwrap();
    let map = gbvs_saliency(&image, &GbvsParams::default()).unwrap();
    let rank = outlier_rank(&spec, &aoi_saliency(&map, &layout).unwrap()).unwrap();
    assert!(rank <= 3, "price outlier ranked {rank} of 15");
}

// Known failure: the darkest catalog phone image wins the global maximum;
// the outlier still ranks first by mean AOI saliency.
#[test]
fn phone_image_outlier_holds_the_gbvs_argmax() {
    let outlier = Outlier { feature: OutlierFeature::Image, position: 3, magnitude: Magnitude::TypeI };
    let spec = build_stimulus("phones", Some(outlier), 7).unwrap();
    let (image, layout) = render(&spec).unwrap();
    let map = gbvs_saliency(&image, &GbvsParams::default()).unwrap();
    let (x, y) = map.argmax();
    let rect = layout.get(3, AoiKind::Image).unwrap().rect;
    assert!(rect.contains(x as f64 + 0.5, y as f64 + 0.5), "argmax ({x},{y}) outside {rect:?}");
}

// Known failure: GBVS maps on rendered lists come out flatter than Itti's.
#[test]
fn itti_map_is_more_spread_than_gbvs_on_monitor_list() {
    let spec = build_stimulus("monitors", None, 7).unwrap();
    let (image, _) = render(&spec).unwrap();
    let itti = itti_saliency(&image, &IttiParams::default()).unwrap();
    let gbvs = gbvs_saliency(&image, &GbvsParams::default()).unwrap();
    assert!(itti.entropy() > gbvs.entropy(), "itti {} vs gbvs {}", itti.entropy(), gbvs.entropy());
}
