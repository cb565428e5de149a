//! Search over hyperparameters, scaler quantile ranges and persistency.
//!
//! Every (hyperparameters, quantile range) pair is trained once. Its boolean
//! prediction tracks on the validation set are then frozen and scored for every
//! persistency value, since persistency only acts downstream of the network.
//! The best candidate's persistency is refined by a sweep, the smallest value
//! meeting the [`Requirements`] is chosen, and the detection metrics are
//! double-checked for a bias toward long faults before the result is frozen.

mod bundle;
mod check;
mod report;
mod search;
mod space;
mod tracks;

pub use bundle::{freeze, load_bundle, BundleManifest, FrozenBundle, Hyperparameters, BUNDLE_FORMAT_VERSION};
pub use check::{detection_double_check, BiasFlag, BiasKind, DoubleCheck, DoubleCheckThresholds};
pub use search::{
    evaluate_persistency, grid_search, ledger_rows, persistency_sweep, sweep_interval, tune, write_ledger,
    CandidateResult, CandidateStatus, LedgerRow, PersistencyEvaluation, SweepResult, TuneOutcome,
};
pub use report::{tune_summary, write_tune_reports, TuneSummary, HISTOGRAM_BIN_WIDTH};
pub use space::{HyperParams, Requirements, SearchManifest, SearchSpace};
pub use tracks::TrackSet;
