//! Accuracy metrics, repeated trainings, training-size ablation and the
//! JSON document they are reported in.

mod ablation;
mod document;
mod experiment;
mod metrics;
mod repeat;

pub use ablation::{ablate_training_size, test_set_digest, AblationCurve, AblationPoint};
pub use document::{read_document, write_document, MetricsDocument};
pub use experiment::LstmExperiment;
pub use metrics::{evaluate, ClassMetrics, Metrics};
pub use repeat::{repeat_training, RepetitionSummary, RunResult};
