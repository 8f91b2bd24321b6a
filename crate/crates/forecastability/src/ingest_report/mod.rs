//! Ingestion of long-format hierarchical datasets, level aggregation,
//! forecast-error metrics, and the metric report joining everything
//! together.

mod hierarchy;
mod load;
mod metrics;
mod report;

pub use hierarchy::{aggregate_levels, HierarchySpec, LevelSeries, LevelSpec, SERIES_DIM};
pub use load::{load_long_csv, Dataset, LongRecord, SchemaMapping};
pub use metrics::{pearson_r, wape};
pub use report::{
    build_report, load_error_csv, CorrelationRow, ErrorRecord, LevelSummary, MetricReport,
    ReportMetadata, ReportOptions, ReportRow, Thresholds,
};
