//! End-to-end flows through the public API: benchmark segmentation,
//! sweep reproducibility, and CSV ingestion through report assembly.

use std::fmt::Write as _;
use std::fs;

use forecastability::experiments::{run_sweep, segment_metrics, SweepMetric, SweepSpec};
use forecastability::ingest_report::{
    aggregate_levels, build_report, load_error_csv, load_long_csv, HierarchySpec, ReportOptions,
    SchemaMapping,
};
use forecastability::lyapunov::EmbeddingConfig;
use forecastability::spectral::SpectralConfig;
use forecastability::synth::{five_segment_benchmark, SignalKind, SignalSpec};
use forecastability::timeseries::{Frequency, WindowPlan};

#[test]
fn benchmark_segments_rank_as_designed() {
    let (series, boundaries) = five_segment_benchmark(500, 11).unwrap();
    let metrics = segment_metrics(
        &series,
        &boundaries,
        &WindowPlan::new(200),
        &WindowPlan::new(300),
        &SpectralConfig::default(),
        &EmbeddingConfig::default(),
    )
    .unwrap();

    let omegas: Vec<f64> = metrics.omega.segments.iter().map(|s| s.mean).collect();
    assert!(
        omegas.windows(2).all(|w| w[0] > w[1]),
        "omega means should fall from sine to white noise, got {omegas:?}"
    );

    let lambdas: Vec<f64> = metrics.lambda.segments.iter().map(|s| s.mean).collect();
    assert!(lambdas[0] <= 0.05, "sine lambda {} too large", lambdas[0]);
    let max = lambdas.iter().cloned().fold(f64::MIN, f64::max);
    assert_eq!(lambdas[4], max, "white noise should maximize lambda");
}

#[test]
fn sweeps_are_reproducible() {
    let spec = SweepSpec {
        generator: SignalSpec::new(SignalKind::NoisyMultisine, 0, 0),
        lengths: vec![80, 160],
        sparsity_rates: vec![0.0, 0.5],
        replicates: 5,
        metric: SweepMetric::SpectralPredictability,
        base_seed: 21,
    };
    let first = run_sweep(&spec).unwrap();
    let second = run_sweep(&spec).unwrap();
    assert_eq!(first, second);
    assert_eq!(first.cells.len(), 4);
    assert!(first.cells.iter().all(|c| c.n == 5 && c.failures == 0));
}

#[test]
fn csv_ingestion_feeds_the_report() {
    // Two categories with two items each, 160 daily observations, plus
    // a two-model error file covering only some series.
    let dir = tempfile::tempdir().unwrap();
    let data_path = dir.path().join("sales.csv");
    let mut csv = String::from("series_id,category,t,value\n");
    for (id, category, level_shift) in [
        ("a1", "food", 10.0),
        ("a2", "food", 20.0),
        ("b1", "toys", 5.0),
        ("b2", "toys", 8.0),
    ] {
        for t in 0..160 {
            let value = level_shift + ((t % 7) as f64) + if t % 11 == 0 { 3.0 } else { 0.0 };
            writeln!(csv, "{id},{category},{t},{value}").unwrap();
        }
    }
    fs::write(&data_path, csv).unwrap();

    let errors_path = dir.path().join("errors.csv");
    fs::write(
        &errors_path,
        "series_id,model,wape\na1,naive,0.4\na2,naive,0.5\nb1,naive,0.3\n\
         a1,ets,0.2\na2,ets,0.25\nb1,ets,0.15\nb2,ets,0.35\n",
    )
    .unwrap();

    let dataset = load_long_csv(&data_path, &SchemaMapping::default()).unwrap();
    assert_eq!(dataset.dims(), ["category"]);
    let hierarchy = HierarchySpec::default_for(dataset.dims());
    let levels = aggregate_levels(&dataset, &hierarchy, Frequency::Daily).unwrap();

    // Aggregation consistency: every level sums to the total pointwise.
    let total = &levels[0].series[0];
    for level in &levels[1..] {
        for t in 0..total.len() {
            let sum: f64 = level.series.iter().map(|s| s.values()[t]).sum();
            let reference = total.values()[t];
            assert!(
                (sum - reference).abs() <= 1e-9 * reference.abs(),
                "level {} diverges from the total at t={t}",
                level.level
            );
        }
    }

    let errors = load_error_csv(&errors_path).unwrap();
    let report = build_report(
        &levels,
        &SpectralConfig::default(),
        &EmbeddingConfig::default(),
        Some(&errors),
        &ReportOptions::default(),
    )
    .unwrap();

    assert_eq!(report.models(), ["ets", "naive"]);
    // 7 series per frequency: total, 2 categories, 4 items.
    let daily_rows = report
        .rows
        .iter()
        .filter(|r| r.frequency == Frequency::Daily)
        .count();
    let weekly_rows = report
        .rows
        .iter()
        .filter(|r| r.frequency == Frequency::Weekly)
        .count();
    assert_eq!(daily_rows, 7);
    assert_eq!(weekly_rows, 7);

    // The error join lands on the leaf level only; b2 lacks the naive
    // model, which surfaces as a join-miss warning.
    let b2 = report
        .rows
        .iter()
        .find(|r| r.frequency == Frequency::Daily && r.series_id == "b2")
        .unwrap();
    assert!(b2.errors.contains_key("ets"));
    assert!(!b2.errors.contains_key("naive"));
    assert!(report.warnings.iter().any(|w| w.contains("naive")));

    // Correlations exist for both models over the joined daily points.
    assert!(report
        .correlations
        .iter()
        .any(|c| c.scope == "pooled" && c.model == "ets" && c.points >= 4));
}
