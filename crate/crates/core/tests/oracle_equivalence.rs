use binaq::binarize::{integral_stats, otsu_threshold, sauvola_binarize, sauvola_threshold_map, SauvolaParams};
use binaq::metrics::{distance_transform, drd, interior_distance, score_pair, stroke_width, Score};
use binaq::{BinaryImage, RasterImage};
use binaq_oracle::{
    naive_distance_transform, naive_drd, naive_interior_distance, naive_otsu, naive_sauvola_binarize, naive_score_pair,
    naive_stroke_width, naive_window_stats,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn binary(max: usize) -> impl Strategy<Value = BinaryImage> {
    (1..=max, 1..=max, 0.05f64..0.6).prop_flat_map(|(w, h, p)| {
        proptest::collection::vec(proptest::bool::weighted(p), w * h)
            .prop_map(move |labels| BinaryImage::new(w, h, labels).unwrap())
    })
}

fn raster(max: usize) -> impl Strategy<Value = RasterImage> {
    (1..=max, 1..=max).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<u8>(), w * h).prop_map(move |px| RasterImage::new(w, h, px).unwrap())
    })
}

/// Blobby ink with sparse noise so DRD neighborhoods see both labels.
fn random_pair(rng: &mut ChaCha8Rng, w: usize, h: usize) -> (BinaryImage, BinaryImage) {
    let cx: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.random_range(0.0..w as f64),
                rng.random_range(0.0..h as f64),
                rng.random_range(2.0..7.0),
            )
        })
        .collect();
    let gt = BinaryImage::from_fn(w, h, |x, y| {
        cx.iter()
            .any(|&(a, b, r)| (x as f64 - a).powi(2) + (y as f64 - b).powi(2) < r * r)
    })
    .unwrap();
    let flip = rng.random_range(0.01..0.2);
    let labels = gt
        .as_slice()
        .iter()
        .map(|&g| if rng.random_bool(flip) { !g } else { g })
        .collect();
    (BinaryImage::new(w, h, labels).unwrap(), gt)
}

#[test]
fn drd_matches_oracle_on_200_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..200 {
        let (pred, gt) = random_pair(&mut rng, 32, 32);
        match (drd(&pred, &gt), naive_drd(&pred, &gt)) {
            (Ok(a), Ok(b)) => {
                assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
                checked += 1;
            }
            (Err(_), Err(_)) => {}
            (a, b) => panic!("disagreement on definedness: {a:?} vs {b:?}"),
        }
    }
    assert!(checked >= 190);
}

#[test]
fn sauvola_matches_oracle_on_100_images() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let params = SauvolaParams::default();
    for i in 0..100 {
        let img = if i % 2 == 0 {
            RasterImage::from_fn(64, 64, |_, _| rng.random()).unwrap()
        } else {
            let (_, gt) = random_pair(&mut rng, 64, 64);
            RasterImage::from_fn(64, 64, |x, y| {
                let base: i32 = if gt.is_foreground(x, y) { 60 } else { 200 };
                (base + rng.random_range(-25..=25) - x as i32).clamp(0, 255) as u8
            })
            .unwrap()
        };
        let fast = sauvola_binarize(&img, &params).unwrap();
        let slow = naive_sauvola_binarize(&img, params.window, params.k, params.r).unwrap();
        assert_eq!(fast, slow, "image {i}");
    }
}

#[test]
fn sauvola_threshold_map_close_to_naive_statistics() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let params = SauvolaParams::new(7, 0.34, 128.0).unwrap();
    for _ in 0..20 {
        let img = RasterImage::from_fn(40, 33, |_, _| rng.random()).unwrap();
        let map = sauvola_threshold_map(&img, &params).unwrap();
        for y in 0..33 {
            for x in 0..40 {
                let (m, s) = naive_window_stats(&img, params.window, x, y).unwrap();
                assert!((map.get(x, y) - params.threshold(m, s)).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn window_stats_match_oracle_on_100_images() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let img = RasterImage::from_fn(32, 32, |_, _| rng.random()).unwrap();
        let ii = integral_stats(&img);
        let window = 2 * rng.random_range(1..12) + 1;
        for _ in 0..20 {
            let (x, y) = (rng.random_range(0..32), rng.random_range(0..32));
            let fast = ii.window_stats(x, y, window);
            let (m, s) = naive_window_stats(&img, window, x, y).unwrap();
            assert_eq!(fast.mean, m);
            assert!((fast.stddev - s).abs() <= 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_transform_is_exact(img in binary(64)) {
        prop_assume!(img.has_foreground());
        let fast = distance_transform(&img).unwrap();
        let slow = naive_distance_transform(&img).unwrap();
        prop_assert_eq!(fast.as_slice(), slow.as_slice());
    }

    #[test]
    fn interior_distance_is_exact(img in binary(48)) {
        let fast = interior_distance(&img);
        let slow = naive_interior_distance(&img).unwrap();
        prop_assert_eq!(fast.as_slice(), slow.as_slice());
    }

    #[test]
    fn stroke_width_matches(img in binary(48)) {
        prop_assume!(img.has_foreground());
        prop_assert_eq!(stroke_width(&img).unwrap(), naive_stroke_width(&img).unwrap());
    }

    #[test]
    fn otsu_matches_exhaustive_search(img in raster(64)) {
        prop_assert_eq!(otsu_threshold(&img), naive_otsu(&img).unwrap());
    }

    #[test]
    fn score_pair_matches_definitions((pred, gt) in (1usize..=40, 1usize..=40).prop_flat_map(|(w, h)| {
        let labels = proptest::collection::vec(proptest::bool::weighted(0.3), w * h);
        (labels.clone(), labels).prop_map(move |(a, b)| {
            (BinaryImage::new(w, h, a).unwrap(), BinaryImage::new(w, h, b).unwrap())
        })
    })) {
        let fast = score_pair(&pred, &gt).unwrap();
        let slow = naive_score_pair(&pred, &gt).unwrap();
        let close = |s: Score, o: Option<f64>, tol: f64| match (s.value(), o) {
            (Some(a), Some(b)) => (a - b).abs() <= tol,
            (None, None) => true,
            _ => false,
        };
        prop_assert!(close(fast.fm, slow.fm, 1e-12), "fm {:?} vs {:?}", fast.fm, slow.fm);
        prop_assert!(close(fast.pfm, slow.pfm, 1e-12), "pfm {:?} vs {:?}", fast.pfm, slow.pfm);
        prop_assert!(close(fast.psnr, slow.psnr, 1e-12), "psnr {:?} vs {:?}", fast.psnr, slow.psnr);
        prop_assert!(close(fast.drd, slow.drd, 1e-12), "drd {:?} vs {:?}", fast.drd, slow.drd);
    }
}
