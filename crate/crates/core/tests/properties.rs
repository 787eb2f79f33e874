use binaq::binarize::{
    apply_threshold_map, hinge_loss, multi_window_threshold, otsu_threshold, sauvola_threshold_map, SauvolaParams,
};
use binaq::image::{decode_binary, load_image, luminance, save_binary};
use binaq::metrics::{confusion_counts, drd, drd_weight_matrix, f_measure, pfm_weight_maps, score_pair};
use binaq::patch::{augment, split, stitch, Augmentation, Patch, PatchGrid};
use binaq::{BinaryImage, Polarity, RasterImage, RealMap};
use proptest::prelude::*;

fn binary(max: usize) -> impl Strategy<Value = BinaryImage> {
    (1..=max, 1..=max, 0.0f64..1.0).prop_flat_map(|(w, h, p)| {
        proptest::collection::vec(proptest::bool::weighted(p), w * h)
            .prop_map(move |labels| BinaryImage::new(w, h, labels).unwrap())
    })
}

fn same_size_pair(max: usize) -> impl Strategy<Value = (BinaryImage, BinaryImage)> {
    (1..=max, 1..=max, 0.05f64..0.9).prop_flat_map(|(w, h, p)| {
        let labels = proptest::collection::vec(proptest::bool::weighted(p), w * h);
        (labels.clone(), labels)
            .prop_map(move |(a, b)| (BinaryImage::new(w, h, a).unwrap(), BinaryImage::new(w, h, b).unwrap()))
    })
}

fn raster(max: usize) -> impl Strategy<Value = RasterImage> {
    (1..=max, 1..=max).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<u8>(), w * h).prop_map(move |px| RasterImage::new(w, h, px).unwrap())
    })
}

fn tile2x2(img: &RasterImage) -> RasterImage {
    let (w, h) = img.dims();
    RasterImage::from_fn(2 * w, 2 * h, |x, y| img.get(x % w, y % h)).unwrap()
}

#[test]
fn gray_luminance_is_identity() {
    for v in 0..=255u8 {
        assert_eq!(luminance(v, v, v), v);
    }
}

#[test]
fn drd_weights_are_symmetric_and_normalized() {
    let m = drd_weight_matrix();
    assert!((m.sum() - 1.0).abs() <= 1e-12);
    for i in 0..5 {
        for j in 0..5 {
            assert_eq!(m.get(i, j), m.get(i, 4 - j));
            assert_eq!(m.get(i, j), m.get(4 - i, j));
            assert_eq!(m.get(i, j), m.get(j, 4 - i));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn binary_png_round_trip(img in binary(512)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.png");
        save_binary(&img, &path).unwrap();
        let decoded = decode_binary(&load_image(&path).unwrap(), Polarity::DarkForeground);
        prop_assert_eq!(&decoded, &img);
        save_binary(&decoded, &path).unwrap();
        prop_assert_eq!(decode_binary(&load_image(&path).unwrap(), Polarity::DarkForeground), decoded);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fm_never_drops_when_a_false_positive_is_fixed(
        gt in proptest::collection::vec(any::<bool>(), 64),
        pred in proptest::collection::vec(any::<bool>(), 64),
    ) {
        let gt = BinaryImage::new(8, 8, gt).unwrap();
        let pred = BinaryImage::new(8, 8, pred).unwrap();
        let Ok(before) = f_measure(&confusion_counts(&pred, &gt).unwrap()) else { return Ok(()) };
        for y in 0..8 {
            for x in 0..8 {
                if pred.is_foreground(x, y) && !gt.is_foreground(x, y) {
                    let mut fixed = pred.clone();
                    fixed.set(x, y, false);
                    let after = f_measure(&confusion_counts(&fixed, &gt).unwrap()).unwrap();
                    prop_assert!(after.fm >= before.fm);
                }
            }
        }
    }

    #[test]
    fn drd_is_additive_over_disjoint_flips(
        gt in binary(24),
        seed_a in proptest::collection::vec(any::<bool>(), 576),
        seed_b in proptest::collection::vec(any::<bool>(), 576),
    ) {
        prop_assume!(drd(&gt, &gt).is_ok());
        let (w, h) = gt.dims();
        let n = w * h;
        let flip = |mask: &dyn Fn(usize) -> bool| {
            let labels = (0..n).map(|i| gt.as_slice()[i] ^ mask(i)).collect();
            BinaryImage::new(w, h, labels).unwrap()
        };
        let in_a = |i: usize| seed_a[i] && i.is_multiple_of(2);
        let in_b = |i: usize| seed_b[i] && i % 2 == 1;
        let a = drd(&flip(&in_a), &gt).unwrap();
        let b = drd(&flip(&in_b), &gt).unwrap();
        let ab = drd(&flip(&|i| in_a(i) || in_b(i)), &gt).unwrap();
        prop_assert!((ab - (a + b)).abs() <= 1e-9);
    }

    #[test]
    fn pfm_weights_and_ratios_stay_in_range((pred, gt) in same_size_pair(40)) {
        prop_assume!(gt.has_foreground());
        let maps = pfm_weight_maps(&gt).unwrap();
        prop_assert!(maps.recall_weights.as_slice().iter().all(|w| (0.0..=1.0).contains(w)));
        prop_assert!(maps.precision_weights.as_slice().iter().all(|w| (1.0..=2.0).contains(w)));
        let s = score_pair(&pred, &gt).unwrap();
        for v in [s.p_recall, s.p_precision, s.pfm].iter().filter_map(|s| s.value()) {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn identity_scores_are_perfect(gt in binary(40)) {
        let s = score_pair(&gt, &gt).unwrap();
        prop_assert!(s.psnr.is_infinite());
        if gt.has_foreground() {
            prop_assert_eq!(s.fm.value(), Some(1.0));
            prop_assert_eq!(s.pfm.value(), Some(1.0));
        }
        if let Some(d) = s.drd.value() {
            prop_assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn otsu_is_invariant_under_tiling(img in raster(48)) {
        prop_assert_eq!(otsu_threshold(&img), otsu_threshold(&tile2x2(&img)));
    }

    #[test]
    fn constant_images_have_no_sauvola_ink(v in any::<u8>(), k in 0.01f64..0.99, w in 1usize..30, h in 1usize..30) {
        let img = RasterImage::filled(w, h, v).unwrap();
        let params = SauvolaParams::new(15, k, 128.0).unwrap();
        let map = sauvola_threshold_map(&img, &params).unwrap();
        prop_assert!(!apply_threshold_map(&img, &map).unwrap().has_foreground());
    }

    #[test]
    fn multi_window_is_a_convex_combination(img in raster(40), a in 0.0f64..1.0) {
        let windows = [SauvolaParams::with_window(3).unwrap(), SauvolaParams::with_window(11).unwrap()];
        let fused = multi_window_threshold(&img, &windows, &[a, 1.0 - a]).unwrap();
        let t0 = sauvola_threshold_map(&img, &windows[0]).unwrap();
        let t1 = sauvola_threshold_map(&img, &windows[1]).unwrap();
        for i in 0..fused.as_slice().len() {
            let (lo, hi) = (t0.as_slice()[i].min(t1.as_slice()[i]), t0.as_slice()[i].max(t1.as_slice()[i]));
            let t = fused.as_slice()[i];
            prop_assert!(t >= lo - 1e-9 && t <= hi + 1e-9);
        }
    }

    #[test]
    fn hinge_loss_is_non_negative(
        d in proptest::collection::vec(0.0f64..1.0, 36),
        t in proptest::collection::vec(0.0f64..1.0, 36),
        g in proptest::collection::vec(any::<bool>(), 36),
    ) {
        let d = RealMap::new(6, 6, d).unwrap();
        let t = RealMap::new(6, 6, t).unwrap();
        let g = BinaryImage::new(6, 6, g).unwrap();
        prop_assert!(hinge_loss(&d, &t, &g, 16.0).unwrap() >= 0.0);
    }

    #[test]
    fn patch_grid_covers_every_pixel(w in 1usize..300, h in 1usize..300, size in 1usize..140, s in 1usize..140) {
        let stride = s.min(size);
        let grid = PatchGrid::new(w, h, size, stride).unwrap();
        let mut covered = vec![false; w * h];
        for &(ox, oy) in &grid.origins {
            let (pw, ph) = grid.padded_dims();
            prop_assert!(ox + size <= pw && oy + size <= ph);
            for y in oy..(oy + size).min(h) {
                for x in ox..(ox + size).min(w) {
                    covered[y * w + x] = true;
                }
            }
        }
        prop_assert!(covered.iter().all(|&c| c));
    }

    #[test]
    fn split_stitch_round_trip(img in binary(200), size in 1usize..80, s in 1usize..80) {
        let stride = s.min(size);
        let (grid, patches) = split(&img, size, stride).unwrap();
        let outputs: Vec<Patch<f64>> = patches.iter().map(|p| p.map(|b| if b { 1.0 } else { 0.0 })).collect();
        prop_assert_eq!(stitch(&grid, &outputs).unwrap(), img);
    }

    #[test]
    fn augmentations_invert(data in proptest::collection::vec(any::<u8>(), 49)) {
        let p = Patch::new(7, 7, data).unwrap();
        for op in Augmentation::ALL {
            prop_assert_eq!(&augment(&augment(&p, op).unwrap(), op.inverse()).unwrap(), &p);
        }
    }
}

#[test]
fn dihedral_closure() {
    let p = Patch::from_fn(4, 4, |x, y| (y * 4 + x) as u8).unwrap();
    let mut elements = vec![p.clone()];
    elements.extend(Augmentation::ALL.iter().map(|&op| augment(&p, op).unwrap()));
    let rot90_then_hflip = augment(&augment(&p, Augmentation::Rot90).unwrap(), Augmentation::HFlip).unwrap();
    let rot90_then_vflip = augment(&augment(&p, Augmentation::Rot90).unwrap(), Augmentation::VFlip).unwrap();
    elements.push(rot90_then_hflip);
    elements.push(rot90_then_vflip);
    for a in &elements {
        assert_eq!(
            elements.iter().filter(|b| *b == a).count(),
            1,
            "group elements must be distinct"
        );
    }
    // closure: every composition of two generators lands in the 8-element group
    for a in &elements {
        for op in Augmentation::ALL {
            let c = augment(a, op).unwrap();
            assert!(elements.contains(&c));
        }
    }
    let mut q = p.clone();
    for _ in 0..4 {
        q = augment(&q, Augmentation::Rot90).unwrap();
    }
    assert_eq!(q, p);
    let twice = augment(&augment(&p, Augmentation::HFlip).unwrap(), Augmentation::HFlip).unwrap();
    assert_eq!(twice, p);
}
