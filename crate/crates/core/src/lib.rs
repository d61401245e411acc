//! User-level sentiment classification over a social network.
//!
//! Users and their on-topic tweets form a heterogeneous graph; a log-linear
//! factor model couples each user's label with their tweets' predicted labels
//! and with the labels of connected users. Parameters come from edge label
//! counts or from SampleRank, and labels are inferred with loopy belief
//! propagation. A text-only voting baseline and a seeded evaluation harness
//! complete the pipeline.

pub mod dataset;
pub mod error;
pub mod estimation;
pub mod graph;
pub mod harness;
pub mod inference;
pub mod model;
pub mod seed;
pub mod stats;
pub mod synth;
pub mod text;

pub use dataset::{load_dataset, write_dataset, Dataset, DatasetPaths};
pub use error::{Error, Result};
pub use estimation::{no_learning_estimate, perf, sample_rank, SampleRankConfig, UpdateRule};
pub use graph::{EdgeKind, GraphVariant, HeterogeneousGraph, RawEdge, SentLabel, Tweet, User, UserId};
pub use harness::{run_experiment, scale_unlabeled, ExperimentConfig, ExperimentReport, Method};
pub use inference::{loopy_bp, predict, BpConfig, PredictConfig};
pub use model::{Assignment, FactorParams, TweetLabels};
pub use synth::{generate, SynthConfig};
