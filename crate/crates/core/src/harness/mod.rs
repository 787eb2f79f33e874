//! Dataset discovery, evaluation runs, aggregation and reporting.

pub mod aggregate;
pub mod dataset;
pub mod evaluate;
pub mod overlay;
pub mod report;

pub use aggregate::{
    aggregate_metrics, format_fixed, fractional_ranks, rank_methods, round_half_away, MethodMeans, MethodRank,
    ScoreGrid,
};
pub use dataset::{discover_dataset, discover_ground_truth, entry_id, index_directory, Dataset, DatasetEntry};
pub use evaluate::{
    dataset_means, evaluate, limit_global_workers, measure_throughput, run_builtin, DatasetEvaluation, EvalOptions,
    ImageRecord, MethodKind, MethodSource, PatchSpec, Throughput,
};
pub use overlay::overlay_errors;
pub use report::{config_hash, emit_report, parse_report, MethodSummary, Provenance, ReportFormat, RunReport};
