//! The benchmark battery: built-in cases, evaluation of a generated dataset
//! against a target, boxplot summaries and report output.

mod evaluate;
mod report;
mod run;
mod suite;

pub use evaluate::{
    boxplot_summary, estimate_dataset, evaluate, BoxplotSummary, EvalReport, ParamEstimates, Seeds,
    REPORT_SCHEMA_VERSION, TOOL_VERSION,
};
pub use report::{read_report_json, write_params_csv, write_psd_csv, write_report_json, write_single_psd_csv};
pub use run::{case_seed, run_case, run_suite, scaled_size, CaseOutcome, SuiteRunConfig};
pub use suite::{
    band_edges, builtin_suite, estimate_params, param_names, true_params, BenchmarkCase, BG_PROBABILITIES,
    DEFAULT_TEST_SIZE, DEFAULT_TRAIN_SIZE, HURST_GRID, N_BANDS, SAS_ALPHAS, SHOT_RATES,
};
