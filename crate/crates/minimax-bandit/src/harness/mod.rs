//! Experiment harness: dataset ingestion and normalization, hyperparameter
//! calculation from the closed-form rates, multi-seed execution, and metric
//! emission as CSV plus a JSON summary.

mod dataset;
mod experiment;
mod hyperparams;

pub use dataset::{load_dataset, synthetic_regression, LoadReport};
pub use experiment::{
    run_experiment, DataSource, ExperimentOutcome, ExperimentSpec, METRICS_HEADER, THREADS_ENV,
};
pub use hyperparams::{compute_hyperparams, HyperParams};
