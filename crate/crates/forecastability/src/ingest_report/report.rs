//! Metric report assembly: per-series omega and lambda across
//! frequencies, level summaries, forecast-error joins, correlations,
//! threshold annotations, and deterministic CSV/JSON emission.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::sample_mean_std;
use crate::ingest_report::hierarchy::LevelSeries;
use crate::ingest_report::metrics::pearson_r;
use crate::lyapunov::{largest_lyapunov, sufficiency_check, EmbeddingConfig, Sufficiency};
use crate::numfmt::{sig9, to_json_string};
use crate::spectral::{
    omega_two_pi, power_distribution, spectral_predictability, SpectralConfig, MIN_SPECTRAL_LEN,
};
use crate::synth::{gen_white_noise, sparsify, RNG_IDENTITY};
use crate::timeseries::{resample_weekly, sparsity_of, Frequency, TimeSeries};

/// One externally supplied forecast error observation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub series_id: String,
    pub model: String,
    pub wape: f64,
}

/// Loads an error CSV with header `series_id,model,wape`.
pub fn load_error_csv(path: impl AsRef<Path>) -> Result<Vec<ErrorRecord>> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::MalformedCsv {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::UnmappedColumn(name.to_string()))
    };
    let id_col = col("series_id")?;
    let model_col = col("model")?;
    let wape_col = col("wape")?;

    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, row) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let row = row.map_err(|e| Error::MalformedCsv {
            line,
            message: e.to_string(),
        })?;
        let get = |i: usize| -> Result<&str> {
            row.get(i).ok_or_else(|| Error::MalformedCsv {
                line,
                message: format!("missing column {i}"),
            })
        };
        let series_id = get(id_col)?.to_string();
        let model = get(model_col)?.to_string();
        let raw = get(wape_col)?.trim();
        let wape: f64 = raw.parse().map_err(|_| Error::MalformedCsv {
            line,
            message: format!("wape {raw:?} is not a number"),
        })?;
        if !wape.is_finite() || wape < 0.0 {
            return Err(Error::MalformedCsv {
                line,
                message: format!("wape {raw:?} must be finite and non-negative"),
            });
        }
        if !seen.insert((series_id.clone(), model.clone())) {
            return Err(Error::MalformedCsv {
                line,
                message: format!("duplicate error entry for ({series_id}, {model})"),
            });
        }
        out.push(ErrorRecord {
            series_id,
            model,
            wape,
        });
    }
    Ok(out)
}

/// Low-forecastability annotation thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub omega_low: f64,
    pub lambda_high: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            omega_low: 0.2,
            lambda_high: 1.0,
        }
    }
}

impl Thresholds {
    /// A row is flagged when omega falls below `omega_low` or lambda
    /// exceeds `lambda_high`.
    pub fn flags(&self, omega: f64, lambda: Option<f64>) -> bool {
        omega < self.omega_low || lambda.is_some_and(|l| l > self.lambda_high)
    }
}

/// Report assembly options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportOptions {
    /// Also analyze the weekly resample of daily series.
    pub weekly: bool,
    /// Emit the diagnostic omega variant normalized by ln(2 pi).
    pub emit_two_pi: bool,
    /// White-noise baseline replicates per (length, sparsity) bucket.
    pub baseline_replicates: usize,
    pub thresholds: Thresholds,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            weekly: true,
            emit_two_pi: false,
            baseline_replicates: 20,
            thresholds: Thresholds::default(),
        }
    }
}

/// One analyzed series at one level and frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub level: String,
    pub frequency: Frequency,
    pub series_id: String,
    pub length: usize,
    pub sparsity: f64,
    pub omega: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_two_pi: Option<f64>,
    /// None marks a gap: no admissible divergence pair existed.
    pub lambda: Option<f64>,
    pub pair_count: usize,
    pub skipped_pairs: usize,
    pub sufficiency: Sufficiency,
    /// Mean omega of white noise matched in length and sparsity.
    pub baseline_omega: f64,
    pub low_forecastability: bool,
    /// Joined forecast errors keyed by model name.
    pub errors: BTreeMap<String, f64>,
}

/// Per-(level, frequency) aggregate of rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSummary {
    pub level: String,
    pub frequency: Frequency,
    pub series_count: usize,
    pub omega_mean: f64,
    pub omega_std: f64,
    /// None when every row of the group has a lambda gap.
    pub lambda_mean: Option<f64>,
    pub lambda_std: Option<f64>,
    pub lambda_gap_count: usize,
    pub flagged_count: usize,
}

/// Pearson correlation between a metric and a model's error over one
/// scope ("pooled" or a level name).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub scope: String,
    pub frequency: Frequency,
    pub model: String,
    pub metric: String,
    pub r: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMetadata {
    pub version: String,
    pub spectral: SpectralConfig,
    pub embedding: EmbeddingConfig,
    /// Effective Theiler exclusion, resolved from the embedding config.
    pub theiler_window: usize,
    /// Entropy normalizer identity: log of the spectral bin count.
    pub entropy_normalizer: String,
    pub rng: String,
    pub options: ReportOptions,
}

/// The full report: rows, summaries, correlations, warnings, and the
/// configuration needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub metadata: ReportMetadata,
    pub rows: Vec<ReportRow>,
    pub level_summaries: Vec<LevelSummary>,
    pub correlations: Vec<CorrelationRow>,
    pub warnings: Vec<String>,
}

impl MetricReport {
    /// Models joined anywhere in the report, sorted.
    pub fn models(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.rows.iter().flat_map(|r| r.errors.keys()).collect();
        set.into_iter().cloned().collect()
    }

    pub fn summary_for(&self, level: &str, frequency: Frequency) -> Option<&LevelSummary> {
        self.level_summaries
            .iter()
            .find(|s| s.level == level && s.frequency == frequency)
    }

    /// Flat CSV rendering of the rows; error columns appear as
    /// `wape_<model>` in sorted model order.
    pub fn to_csv_string(&self) -> Result<String> {
        let models = self.models();
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = [
            "level",
            "frequency",
            "series_id",
            "length",
            "sparsity",
            "omega",
        ]
        .map(str::to_string)
        .to_vec();
        if self.metadata.options.emit_two_pi {
            header.push("omega_two_pi".into());
        }
        header.extend(
            [
                "lambda",
                "pair_count",
                "skipped_pairs",
                "sufficiency",
                "baseline_omega",
                "low_forecastability",
            ]
            .map(str::to_string),
        );
        for model in &models {
            header.push(format!("wape_{model}"));
        }
        write_record(&mut writer, &header)?;

        for row in &self.rows {
            let mut fields = vec![
                row.level.clone(),
                row.frequency.to_string(),
                row.series_id.clone(),
                row.length.to_string(),
                sig9(row.sparsity),
                sig9(row.omega),
            ];
            if self.metadata.options.emit_two_pi {
                fields.push(row.omega_two_pi.map(sig9).unwrap_or_default());
            }
            fields.push(row.lambda.map(sig9).unwrap_or_default());
            fields.push(row.pair_count.to_string());
            fields.push(row.skipped_pairs.to_string());
            fields.push(row.sufficiency.to_string());
            fields.push(sig9(row.baseline_omega));
            fields.push(row.low_forecastability.to_string());
            for model in &models {
                fields.push(row.errors.get(model).copied().map(sig9).unwrap_or_default());
            }
            write_record(&mut writer, &fields)?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::InvalidConfig(format!("csv flush failed: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::InvalidConfig(format!("csv not utf-8: {e}")))
    }

    /// JSON rendering with floats fixed at 9 significant digits.
    pub fn to_json_string(&self) -> Result<String> {
        to_json_string(self)
    }
}

fn write_record(writer: &mut csv::Writer<Vec<u8>>, fields: &[String]) -> Result<()> {
    writer
        .write_record(fields)
        .map_err(|e| Error::InvalidConfig(format!("csv write failed: {e}")))
}

struct RowCore {
    level: String,
    frequency: Frequency,
    series_id: String,
    length: usize,
    sparsity: f64,
    omega: f64,
    omega_two_pi: Option<f64>,
    lambda: Option<f64>,
    pair_count: usize,
    skipped_pairs: usize,
    sufficiency: Sufficiency,
}

fn analyze_series(
    level: &str,
    series: &TimeSeries,
    spectral: &SpectralConfig,
    embedding: &EmbeddingConfig,
    emit_two_pi: bool,
) -> Result<std::result::Result<RowCore, String>> {
    if series.len() < MIN_SPECTRAL_LEN {
        return Ok(Err(format!(
            "series {} ({}) skipped: length {} is below the spectral minimum {}",
            series.id(),
            series.frequency(),
            series.len(),
            MIN_SPECTRAL_LEN
        )));
    }
    let omega = spectral_predictability(series, spectral)?;
    let two_pi = if emit_two_pi {
        omega_two_pi(&power_distribution(series, spectral)?)
    } else {
        None
    };
    let (lambda, pair_count, skipped_pairs) = match largest_lyapunov(series, embedding) {
        Ok(est) => (Some(est.lambda), est.pair_count, est.skipped_pairs),
        Err(Error::EstimationImpossible) | Err(Error::EmbeddingInfeasible { .. }) => (None, 0, 0),
        Err(e) => return Err(e),
    };
    Ok(Ok(RowCore {
        level: level.to_string(),
        frequency: series.frequency(),
        series_id: series.id().to_string(),
        length: series.len(),
        sparsity: sparsity_of(series),
        omega,
        omega_two_pi: two_pi,
        lambda,
        pair_count,
        skipped_pairs,
        sufficiency: sufficiency_check(series, embedding),
    }))
}

/// Sparsity bucket for baseline matching: whole percent.
fn sparsity_bucket(sparsity: f64) -> u32 {
    (sparsity * 100.0).round().min(99.0).max(0.0) as u32
}

/// Fixed, documented seed derivation so baselines are reproducible:
/// a hash mix of length, bucket, and replicate index.
fn baseline_seed(length: usize, bucket: u32, rep: usize) -> u64 {
    (length as u64)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ ((bucket as u64) << 32)
        ^ rep as u64
}

fn baseline_omega_for(
    length: usize,
    bucket: u32,
    replicates: usize,
    spectral: &SpectralConfig,
) -> Result<f64> {
    let rate = f64::from(bucket) / 100.0;
    let mut total = 0.0;
    for rep in 0..replicates {
        let seed = baseline_seed(length, bucket, rep);
        let noise = gen_white_noise(length, 1.0, seed)?;
        let sparse = sparsify(&noise, rate, seed)?;
        total += spectral_predictability(&sparse, spectral)?;
    }
    Ok(total / replicates as f64)
}

/// Builds the full metric report over aggregated level data.
///
/// Per-series work runs in parallel in a fixed order (level, series id,
/// daily before weekly), so output is identical across thread counts.
/// Correlations are computed per (frequency, model, metric) pooled
/// across levels and per level, and are skipped with a warning rather
/// than fabricated when fewer than 3 joined points exist.
pub fn build_report(
    levels: &[LevelSeries],
    spectral: &SpectralConfig,
    embedding: &EmbeddingConfig,
    errors: Option<&[ErrorRecord]>,
    options: &ReportOptions,
) -> Result<MetricReport> {
    if levels.is_empty() {
        return Err(Error::DegenerateInput("report needs at least one level".into()));
    }
    if options.baseline_replicates == 0 {
        return Err(Error::InvalidConfig(
            "baseline needs at least one replicate".into(),
        ));
    }

    // Job list in emission order. Weekly jobs resample daily series.
    let mut jobs: Vec<(&str, &TimeSeries, bool)> = Vec::new();
    for level in levels {
        for series in &level.series {
            jobs.push((&level.level, series, false));
            if options.weekly && series.frequency() == Frequency::Daily {
                jobs.push((&level.level, series, true));
            }
        }
    }

    let analyzed: Vec<std::result::Result<RowCore, String>> = jobs
        .par_iter()
        .map(|&(level, series, weekly)| {
            if weekly {
                let resampled = match resample_weekly(series) {
                    Ok(r) => r,
                    Err(Error::SeriesTooShort { needed, got }) => {
                        return Ok(Err(format!(
                            "series {} skipped for weekly analysis: needs {} daily samples, has {}",
                            series.id(),
                            needed,
                            got
                        )))
                    }
                    Err(e) => return Err(e),
                };
                analyze_series(level, &resampled, spectral, embedding, options.emit_two_pi)
            } else {
                analyze_series(level, series, spectral, embedding, options.emit_two_pi)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut warnings = Vec::new();
    let mut cores = Vec::with_capacity(analyzed.len());
    for outcome in analyzed {
        match outcome {
            Ok(core) => cores.push(core),
            Err(warning) => warnings.push(warning),
        }
    }
    if cores.is_empty() {
        return Err(Error::DegenerateInput(
            "no series were long enough to analyze".into(),
        ));
    }

    // White-noise baselines per (length, sparsity bucket), cached.
    let keys: BTreeSet<(usize, u32)> = cores
        .iter()
        .map(|c| (c.length, sparsity_bucket(c.sparsity)))
        .collect();
    let keys: Vec<(usize, u32)> = keys.into_iter().collect();
    let baselines: BTreeMap<(usize, u32), f64> = keys
        .par_iter()
        .map(|&(length, bucket)| {
            baseline_omega_for(length, bucket, options.baseline_replicates, spectral)
                .map(|omega| ((length, bucket), omega))
        })
        .collect::<Result<_>>()?;

    // Error joins.
    let mut by_model: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
    for record in errors.unwrap_or_default() {
        let prior = by_model
            .entry(&record.model)
            .or_default()
            .insert(&record.series_id, record.wape);
        if prior.is_some() {
            return Err(Error::MalformedCsv {
                line: 0,
                message: format!(
                    "duplicate error entry for ({}, {})",
                    record.series_id, record.model
                ),
            });
        }
    }
    let known_ids: BTreeSet<&str> = cores.iter().map(|c| c.series_id.as_str()).collect();
    for (model, entries) in &by_model {
        let misses = entries.keys().filter(|id| !known_ids.contains(*id)).count();
        if misses > 0 {
            warnings.push(format!(
                "model {model}: {misses} error rows matched no analyzed series"
            ));
        }
    }

    let rows: Vec<ReportRow> = cores
        .into_iter()
        .map(|core| {
            let baseline = baselines[&(core.length, sparsity_bucket(core.sparsity))];
            let mut joined = BTreeMap::new();
            for (model, entries) in &by_model {
                if let Some(&wape) = entries.get(core.series_id.as_str()) {
                    joined.insert(model.to_string(), wape);
                }
            }
            ReportRow {
                low_forecastability: options.thresholds.flags(core.omega, core.lambda),
                level: core.level,
                frequency: core.frequency,
                series_id: core.series_id,
                length: core.length,
                sparsity: core.sparsity,
                omega: core.omega,
                omega_two_pi: core.omega_two_pi,
                lambda: core.lambda,
                pair_count: core.pair_count,
                skipped_pairs: core.skipped_pairs,
                sufficiency: core.sufficiency,
                baseline_omega: baseline,
                errors: joined,
            }
        })
        .collect();

    let level_summaries = summarize_levels(levels, &rows);
    let correlations = correlate(levels, &rows, &mut warnings);

    Ok(MetricReport {
        metadata: ReportMetadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            spectral: *spectral,
            embedding: *embedding,
            theiler_window: embedding.effective_theiler(),
            entropy_normalizer: "log_bin_count".into(),
            rng: RNG_IDENTITY.into(),
            options: *options,
        },
        rows,
        level_summaries,
        correlations,
        warnings,
    })
}

fn summarize_levels(levels: &[LevelSeries], rows: &[ReportRow]) -> Vec<LevelSummary> {
    let frequencies = row_frequencies(rows);
    let mut out = Vec::new();
    for level in levels {
        for &frequency in &frequencies {
            let group: Vec<&ReportRow> = rows
                .iter()
                .filter(|r| r.level == level.level && r.frequency == frequency)
                .collect();
            if group.is_empty() {
                continue;
            }
            let omegas: Vec<f64> = group.iter().map(|r| r.omega).collect();
            let lambdas: Vec<f64> = group.iter().filter_map(|r| r.lambda).collect();
            let (omega_mean, omega_std) = sample_mean_std(&omegas);
            let (lambda_mean, lambda_std) = if lambdas.is_empty() {
                (None, None)
            } else {
                let (m, s) = sample_mean_std(&lambdas);
                (Some(m), Some(s))
            };
            out.push(LevelSummary {
                level: level.level.clone(),
                frequency,
                series_count: group.len(),
                omega_mean,
                omega_std,
                lambda_mean,
                lambda_std,
                lambda_gap_count: group.len() - lambdas.len(),
                flagged_count: group.iter().filter(|r| r.low_forecastability).count(),
            });
        }
    }
    out
}

fn row_frequencies(rows: &[ReportRow]) -> Vec<Frequency> {
    let mut seen = Vec::new();
    for row in rows {
        if !seen.contains(&row.frequency) {
            seen.push(row.frequency);
        }
    }
    seen
}

fn correlate(
    levels: &[LevelSeries],
    rows: &[ReportRow],
    warnings: &mut Vec<String>,
) -> Vec<CorrelationRow> {
    let frequencies = row_frequencies(rows);
    let models: BTreeSet<&String> = rows.iter().flat_map(|r| r.errors.keys()).collect();
    let mut scopes: Vec<Option<&str>> = vec![None];
    scopes.extend(levels.iter().map(|l| Some(l.level.as_str())));

    let mut out = Vec::new();
    for &frequency in &frequencies {
        for model in &models {
            for metric in ["omega", "lambda"] {
                for scope in &scopes {
                    let points: Vec<(f64, f64)> = rows
                        .iter()
                        .filter(|r| r.frequency == frequency)
                        .filter(|r| scope.is_none_or(|s| r.level == s))
                        .filter_map(|r| {
                            let wape = *r.errors.get(model.as_str())?;
                            let value = match metric {
                                "omega" => Some(r.omega),
                                _ => r.lambda,
                            }?;
                            Some((value, wape))
                        })
                        .collect();
                    let scope_name = scope.unwrap_or("pooled");
                    if points.len() < 3 {
                        if scope.is_none() && !points.is_empty() {
                            warnings.push(format!(
                                "correlation skipped (frequency={frequency}, model={model}, \
                                 metric={metric}): {} joined points, need 3",
                                points.len()
                            ));
                        }
                        continue;
                    }
                    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
                    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
                    match pearson_r(&xs, &ys) {
                        Ok(r) => out.push(CorrelationRow {
                            scope: scope_name.to_string(),
                            frequency,
                            model: (*model).clone(),
                            metric: metric.to_string(),
                            r,
                            points: points.len(),
                        }),
                        Err(_) if scope.is_none() => warnings.push(format!(
                            "correlation skipped (frequency={frequency}, model={model}, \
                             metric={metric}): degenerate variance"
                        )),
                        Err(_) => {}
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{add_gaussian_noise, gen_sine, gen_white_noise};
    use approx::assert_abs_diff_eq;
    use std::io::Write;

    fn daily(id: &str, values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(id, values, 0, Frequency::Daily).unwrap()
    }

    fn single_level(series: Vec<TimeSeries>) -> Vec<LevelSeries> {
        vec![LevelSeries {
            level: "L0".into(),
            series,
        }]
    }

    fn default_report(levels: &[LevelSeries], errors: Option<&[ErrorRecord]>) -> MetricReport {
        build_report(
            levels,
            &SpectralConfig::default(),
            &EmbeddingConfig::default(),
            errors,
            &ReportOptions {
                weekly: false,
                ..ReportOptions::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn constant_series_row_has_unit_omega_and_lambda_gap() {
        let report = default_report(&single_level(vec![daily("flat", vec![5.0; 64])]), None);
        assert_eq!(report.rows.len(), 1);
        let row = &report.rows[0];
        assert_eq!(row.omega, 1.0);
        assert_eq!(row.lambda, None);
        assert_eq!(row.pair_count, 0);
        assert!(!row.low_forecastability);
        assert!(row.baseline_omega < 0.5);

        let summary = report.summary_for("L0", Frequency::Daily).unwrap();
        assert_eq!(summary.lambda_mean, None);
        assert_eq!(summary.lambda_gap_count, 1);
    }

    #[test]
    fn clean_total_outscores_noisy_items() {
        let sine = gen_sine(256, 0.05, 1.0, 0.2).unwrap();
        let item1 = add_gaussian_noise(&sine, 1.5, 1).unwrap();
        let item2 = add_gaussian_noise(&sine, 1.5, 2).unwrap();
        let levels = vec![
            LevelSeries {
                level: "L0".into(),
                series: vec![daily("total", sine.values().to_vec())],
            },
            LevelSeries {
                level: "L1".into(),
                series: vec![
                    daily("item1", item1.values().to_vec()),
                    daily("item2", item2.values().to_vec()),
                ],
            },
        ];
        let report = default_report(&levels, None);
        let l0 = report.summary_for("L0", Frequency::Daily).unwrap();
        let l1 = report.summary_for("L1", Frequency::Daily).unwrap();
        assert!(
            l0.omega_mean > l1.omega_mean,
            "L0 {} not above L1 {}",
            l0.omega_mean,
            l1.omega_mean
        );
        // The tone towers over its matched white-noise baseline.
        assert!(report.rows[0].omega > report.rows[0].baseline_omega + 0.3);
    }

    #[test]
    fn planted_errors_correlate_perfectly() {
        let spectral = SpectralConfig::default();
        let series: Vec<TimeSeries> = (0..20)
            .map(|i| {
                let noise = gen_white_noise(64 + 8 * i, 1.0, i as u64).unwrap();
                daily(&format!("s{i:02}"), noise.values().to_vec())
            })
            .collect();
        let errors: Vec<ErrorRecord> = series
            .iter()
            .map(|s| ErrorRecord {
                series_id: s.id().to_string(),
                model: "planted".into(),
                wape: 1.0 - spectral_predictability(s, &spectral).unwrap(),
            })
            .collect();
        let report = default_report(&single_level(series), Some(&errors));
        let pooled = report
            .correlations
            .iter()
            .find(|c| c.scope == "pooled" && c.metric == "omega")
            .expect("pooled omega correlation");
        assert_eq!(pooled.points, 20);
        assert_abs_diff_eq!(pooled.r, -1.0, epsilon = 1e-9);
    }

    #[test]
    fn summaries_are_recomputable_from_rows() {
        let series: Vec<TimeSeries> = (0..6)
            .map(|i| {
                let noise = gen_white_noise(120, 1.0, 100 + i).unwrap();
                daily(&format!("n{i}"), noise.values().to_vec())
            })
            .collect();
        let report = default_report(&single_level(series), None);
        let summary = report.summary_for("L0", Frequency::Daily).unwrap();
        let omegas: Vec<f64> = report.rows.iter().map(|r| r.omega).collect();
        let (mean, std) = sample_mean_std(&omegas);
        assert_eq!(summary.omega_mean.to_bits(), mean.to_bits());
        assert_eq!(summary.omega_std.to_bits(), std.to_bits());
        assert_eq!(
            summary.flagged_count,
            report.rows.iter().filter(|r| r.low_forecastability).count()
        );
    }

    #[test]
    fn threshold_annotation_is_pure() {
        let mut series = vec![daily("tone", gen_sine(300, 0.05, 1.0, 0.0).unwrap().values().to_vec())];
        for i in 0..5 {
            series.push(daily(
                &format!("noise{i}"),
                gen_white_noise(300, 1.0, i).unwrap().values().to_vec(),
            ));
        }
        let report = default_report(&single_level(series), None);
        let thresholds = Thresholds::default();
        for row in &report.rows {
            assert_eq!(
                row.low_forecastability,
                row.omega < thresholds.omega_low
                    || row.lambda.is_some_and(|l| l > thresholds.lambda_high),
                "row {} annotation impure",
                row.series_id
            );
        }
        // The clean tone is never flagged.
        assert!(!report.rows.iter().find(|r| r.series_id == "tone").unwrap().low_forecastability);
    }

    #[test]
    fn weekly_rows_resample_daily_series() {
        let noise = gen_white_noise(140, 1.0, 9).unwrap();
        let levels = single_level(vec![daily("s", noise.values().to_vec())]);
        let report = build_report(
            &levels,
            &SpectralConfig::default(),
            &EmbeddingConfig::default(),
            None,
            &ReportOptions::default(),
        )
        .unwrap();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.rows[0].frequency, Frequency::Daily);
        assert_eq!(report.rows[1].frequency, Frequency::Weekly);
        assert_eq!(report.rows[1].length, 20);

        // Too short for a meaningful weekly resample: warn, not fail.
        let short = single_level(vec![daily("tiny", gen_white_noise(20, 1.0, 1).unwrap().values().to_vec())]);
        let report = build_report(
            &short,
            &SpectralConfig::default(),
            &EmbeddingConfig::default(),
            None,
            &ReportOptions::default(),
        )
        .unwrap();
        assert_eq!(report.rows.len(), 1);
        assert!(report.warnings.iter().any(|w| w.contains("tiny")));
    }

    #[test]
    fn join_misses_are_warned_with_counts() {
        let noise = gen_white_noise(64, 1.0, 3).unwrap();
        let errors = vec![
            ErrorRecord { series_id: "s".into(), model: "ets".into(), wape: 0.3 },
            ErrorRecord { series_id: "ghost1".into(), model: "ets".into(), wape: 0.5 },
            ErrorRecord { series_id: "ghost2".into(), model: "ets".into(), wape: 0.7 },
        ];
        let report = default_report(
            &single_level(vec![daily("s", noise.values().to_vec())]),
            Some(&errors),
        );
        assert_eq!(report.rows[0].errors["ets"], 0.3);
        assert!(report
            .warnings
            .iter()
            .any(|w| w.contains("model ets") && w.contains("2 error rows")));
        // One joined point: pooled correlation skipped with a warning.
        assert!(report.correlations.is_empty());
        assert!(report.warnings.iter().any(|w| w.contains("correlation skipped")));
    }

    #[test]
    fn report_emission_is_deterministic() {
        let series: Vec<TimeSeries> = (0..4)
            .map(|i| {
                let noise = gen_white_noise(90, 1.0, 40 + i).unwrap();
                daily(&format!("d{i}"), noise.values().to_vec())
            })
            .collect();
        let levels = single_level(series);
        let a = default_report(&levels, None);
        let b = default_report(&levels, None);
        assert_eq!(a.to_json_string().unwrap(), b.to_json_string().unwrap());
        assert_eq!(a.to_csv_string().unwrap(), b.to_csv_string().unwrap());
        assert!(a.to_csv_string().unwrap().starts_with("level,frequency,series_id"));
    }

    #[test]
    fn error_csv_round_trips() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(b"series_id,model,wape\na,ets,0.25\nb,chronos,0.5\n")
            .unwrap();
        let records = load_error_csv(file.path()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].model, "ets");
        assert_eq!(records[1].wape, 0.5);

        let mut bad = tempfile::NamedTempFile::new().unwrap();
        bad.write_all(b"series_id,model,wape\na,ets,oops\n").unwrap();
        assert!(matches!(
            load_error_csv(bad.path()),
            Err(Error::MalformedCsv { line: 2, .. })
        ));

        let mut dup = tempfile::NamedTempFile::new().unwrap();
        dup.write_all(b"series_id,model,wape\na,ets,0.2\na,ets,0.3\n")
            .unwrap();
        assert!(load_error_csv(dup.path()).is_err());
    }
}
