//! Experiment orchestration: seeded repetitions, summaries, exponent fits,
//! model curves, and harmonic numbers.

mod fit;
mod harmonic;
mod plan;
mod stats;

pub use fit::{fit_exponent, fit_summaries, model_curve, FitResult, ModelFamily, VariantFit};
pub use harmonic::{harmonic, Harmonic, HarmonicSeries};
pub use plan::{
    run_experiment, run_experiment_with_progress, run_stream_id, BudgetRule, ExperimentPlan,
    ExperimentRow, ExperimentTable, InstanceSpec, VariantSpec, RAW_CSV_HEADER,
};
pub use stats::{read_summary_csv, summarize, write_summary_csv, GroupSummary, SUMMARY_CSV_HEADER};
