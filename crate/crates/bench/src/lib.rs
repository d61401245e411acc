//! Fixtures shared by the criterion benchmarks.

use std::collections::BTreeSet;

use netsent::graph::{GraphVariant, HeterogeneousGraph};
use netsent::model::{FactorParams, TweetLabels};
use netsent::synth::{generate, SynthConfig};
use netsent::text::{revealed_training_set, tokenize, train_classifier, TrainConfig};

pub struct Fixture {
    pub graph: HeterogeneousGraph,
    pub tweets: TweetLabels,
    pub params: FactorParams,
}

/// Synthetic benchmark graph with the first `revealed` gold users disclosed and
/// classifier-labeled tweets for everyone else.
pub fn fixture(n_users: usize, revealed: usize) -> Fixture {
    let cfg = SynthConfig {
        n_users,
        ..SynthConfig::default()
    };
    let ds = generate(&cfg).expect("valid generator settings");
    let g = ds
        .dataset
        .topic_graph(&cfg.topic, GraphVariant::DirectedFollow)
        .expect("synthetic data is consistent");
    let ids: BTreeSet<_> = g.users().iter().take(revealed).map(|u| u.id.clone()).collect();
    let graph = g.with_revealed(&ids).expect("gold users");
    let model = train_classifier(&revealed_training_set(&graph), &TrainConfig::default()).expect("both classes");
    let tweets = TweetLabels::observed(&graph, |t| model.classify(&tokenize(&t.text)));
    let params = netsent::no_learning_estimate(&graph).params;
    Fixture { graph, tweets, params }
}
