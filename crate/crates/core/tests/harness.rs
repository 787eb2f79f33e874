use std::path::Path;

use binaq::binarize::{Binarizer, SauvolaParams};
use binaq::harness::{
    discover_dataset, discover_ground_truth, evaluate, measure_throughput, Dataset, EvalOptions, MethodSource,
    RunReport,
};
use binaq::image::{save_binary, save_raster};
use binaq::synth::{corpus, plant_errors, SynthConfig};
use binaq::{Error, Metric};

fn write_corpus(root: &Path, pages: usize) -> (std::path::PathBuf, std::path::PathBuf) {
    let images = root.join("images");
    let gt = root.join("gt");
    std::fs::create_dir_all(&images).unwrap();
    std::fs::create_dir_all(&gt).unwrap();
    for (i, page) in corpus(&SynthConfig::default(), pages).unwrap().iter().enumerate() {
        save_raster(&page.image, images.join(format!("p{i:02}.png"))).unwrap();
        save_binary(&page.gt, gt.join(format!("p{i:02}_GT.png"))).unwrap();
    }
    (images, gt)
}

#[test]
fn planted_confusions_are_scored_analytically() {
    let dir = tempfile::tempdir().unwrap();
    let (_, gt_dir) = write_corpus(dir.path(), 3);
    let pred_dir = dir.path().join("pred");
    std::fs::create_dir_all(&pred_dir).unwrap();
    let pages = corpus(&SynthConfig::default(), 3).unwrap();
    let planted = [(100usize, 50usize), (0, 200), (400, 0)];
    for (i, (page, &(fp, fn_))) in pages.iter().zip(&planted).enumerate() {
        let pred = plant_errors(&page.gt, fp, fn_, i as u64).unwrap();
        save_binary(&pred, pred_dir.join(format!("p{i:02}.png"))).unwrap();
    }
    let dataset = Dataset::new("synthetic", discover_ground_truth(&gt_dir).unwrap());
    let eval = evaluate(
        &MethodSource::predictions("planted", &pred_dir),
        &dataset,
        &EvalOptions::default(),
    )
    .unwrap();

    for ((record, page), &(fp, fn_)) in eval.images.iter().zip(&pages).zip(&planted) {
        let ink = page.gt.foreground_count() as f64;
        let n = (page.gt.width() * page.gt.height()) as f64;
        let tp = ink - fn_ as f64;
        let recall = tp / ink;
        let precision = tp / (tp + fp as f64);
        let fm = 2.0 * recall * precision / (recall + precision);
        let psnr = 10.0 * (n / (fp + fn_) as f64).log10();
        let s = &record.scores;
        assert_eq!((s.counts.fp, s.counts.fn_), (fp as u64, fn_ as u64));
        assert!((s.recall.value().unwrap() - recall).abs() < 1e-12);
        assert!((s.precision.value().unwrap() - precision).abs() < 1e-12);
        assert!((s.fm.value().unwrap() - fm).abs() < 1e-12);
        assert!((s.psnr.value().unwrap() - psnr).abs() < 1e-9);
    }
}

#[test]
fn ground_truth_as_predictions_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let (_, gt_dir) = write_corpus(dir.path(), 4);
    let dataset = Dataset::new("synthetic", discover_ground_truth(&gt_dir).unwrap());
    let eval = evaluate(
        &MethodSource::predictions("identity", &gt_dir),
        &dataset,
        &EvalOptions::default(),
    )
    .unwrap();
    assert_eq!(eval.means.fm, Some(1.0));
    assert_eq!(eval.means.pfm, Some(1.0));
    assert_eq!(eval.means.drd, Some(0.0));
    assert_eq!(eval.means.psnr, None);
    assert!(eval.images.iter().all(|r| r.scores.get(Metric::Psnr).is_infinite()));
    assert_eq!(eval.excluded.psnr, 4);
}

#[test]
fn missing_prediction_names_the_entry() {
    let dir = tempfile::tempdir().unwrap();
    let (_, gt_dir) = write_corpus(dir.path(), 2);
    let pred_dir = dir.path().join("pred");
    std::fs::create_dir_all(&pred_dir).unwrap();
    std::fs::copy(gt_dir.join("p00_GT.png"), pred_dir.join("p00.png")).unwrap();
    let dataset = Dataset::new("synthetic", discover_ground_truth(&gt_dir).unwrap());
    match evaluate(
        &MethodSource::predictions("partial", &pred_dir),
        &dataset,
        &EvalOptions::default(),
    ) {
        Err(Error::Evaluation { id, .. }) => assert_eq!(id, "p01"),
        other => panic!("expected evaluation error, got {other:?}"),
    }
}

#[test]
fn otsu_on_clean_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let (images, gt) = write_corpus(dir.path(), 5);
    let dataset = Dataset::new("clean", discover_dataset(&images, &gt).unwrap());
    let eval = evaluate(
        &MethodSource::builtin(Binarizer::Otsu),
        &dataset,
        &EvalOptions::default(),
    )
    .unwrap();
    assert!(eval.means.fm.unwrap() >= 0.99, "fm {:?}", eval.means.fm);
}

#[test]
fn repeated_runs_have_identical_bodies() {
    let dir = tempfile::tempdir().unwrap();
    let (images, gt) = write_corpus(dir.path(), 4);
    let dataset = Dataset::new("clean", discover_dataset(&images, &gt).unwrap());
    let method = MethodSource::builtin(Binarizer::Sauvola(SauvolaParams::default()));
    let run = |threads| {
        let opts = EvalOptions {
            threads: Some(threads),
            ..EvalOptions::default()
        };
        let mut report = RunReport::new("test", "cfg");
        report.evaluations.push(evaluate(&method, &dataset, &opts).unwrap());
        report.summarize().unwrap_or(());
        report.canonical_body().unwrap()
    };
    assert_eq!(run(1), run(4));
}

fn median_rate(method: &MethodSource, dataset: &Dataset) -> f64 {
    let mut rates: Vec<f64> = (0..5)
        .map(|_| measure_throughput(method, dataset).unwrap().images_per_second)
        .collect();
    rates.sort_by(f64::total_cmp);
    rates[2]
}

#[test]
fn throughput_is_stable_under_duplication() {
    let dir = tempfile::tempdir().unwrap();
    let (images, gt) = write_corpus(dir.path(), 6);
    let entries = discover_dataset(&images, &gt).unwrap();
    let single = Dataset::new("x1", entries.clone());
    let doubled = Dataset::new("x2", entries.iter().chain(&entries).cloned().collect());
    let method = MethodSource::builtin(Binarizer::Sauvola(SauvolaParams::default()));
    measure_throughput(&method, &single).unwrap();
    let a = median_rate(&method, &single);
    let b = median_rate(&method, &doubled);
    assert!(a.is_finite() && a > 0.0);
    assert!((b / a - 1.0).abs() <= 0.25, "{a} vs {b} img/s");
}
