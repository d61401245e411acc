#![allow(dead_code)]

use netsent::graph::{EdgeKind, GraphVariant, HeterogeneousGraph, RawEdge, SentLabel, Tweet, User};
use netsent::model::{FactorParams, TweetLabels};
use rand::Rng;

pub fn label(b: bool) -> SentLabel {
    if b {
        SentLabel::Positive
    } else {
        SentLabel::Negative
    }
}

/// Users `u00, u01, ...` with one tweet each unless `n_tweets` says otherwise.
#[derive(Clone, Debug)]
pub struct GraphSpec {
    pub labels: Vec<SentLabel>,
    pub revealed: Vec<bool>,
    pub n_tweets: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub kind: EdgeKind,
}

impl GraphSpec {
    pub fn new(labels: &[SentLabel], edges: &[(usize, usize)]) -> Self {
        GraphSpec {
            labels: labels.to_vec(),
            revealed: vec![false; labels.len()],
            n_tweets: vec![1; labels.len()],
            edges: edges.to_vec(),
            kind: EdgeKind::Follow,
        }
    }

    pub fn revealed(mut self, r: &[bool]) -> Self {
        self.revealed = r.to_vec();
        self
    }

    pub fn raw(&self) -> (Vec<User>, Vec<Tweet>, Vec<RawEdge>) {
        let users = self
            .labels
            .iter()
            .zip(&self.revealed)
            .enumerate()
            .map(|(i, (l, r))| User {
                id: id(i).into(),
                gold_label: Some(*l),
                revealed: *r,
            })
            .collect();
        let tweets = self
            .n_tweets
            .iter()
            .enumerate()
            .flat_map(|(u, &n)| (0..n).map(move |t| Tweet::new(format!("t{u:02}-{t}"), id(u), "topic")))
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|&(s, d)| RawEdge::new(id(s), id(d), self.kind))
            .collect();
        (users, tweets, edges)
    }

    pub fn build(&self, variant: GraphVariant) -> HeterogeneousGraph {
        let (u, t, e) = self.raw();
        HeterogeneousGraph::build(&u, &t, &e, variant).unwrap()
    }
}

pub fn id(i: usize) -> String {
    format!("u{i:02}")
}

/// Random graph over `n` users: each ordered pair linked with probability `p`.
pub fn random_spec<R: Rng>(rng: &mut R, n: usize, p: f64, kind: EdgeKind) -> GraphSpec {
    let labels = (0..n).map(|_| label(rng.random())).collect::<Vec<_>>();
    let mut edges = Vec::new();
    for s in 0..n {
        for d in 0..n {
            if s != d && rng.random::<f64>() < p {
                edges.push((s, d));
            }
        }
    }
    GraphSpec {
        revealed: (0..n).map(|_| rng.random::<f64>() < 0.4).collect(),
        n_tweets: (0..n).map(|_| rng.random_range(1..=3)).collect(),
        labels,
        edges,
        kind,
    }
}

pub fn random_variant<R: Rng>(rng: &mut R) -> GraphVariant {
    GraphVariant::ALL[rng.random_range(0..4)]
}

/// Parameters in the range the estimators produce: near-identity `mu`, stochastic-ish `lambda`.
pub fn random_params<R: Rng>(rng: &mut R) -> FactorParams {
    let mut mu = [[0.0; 2]; 2];
    let mut lambda = [[0.0; 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            mu[k][l] = if k == l { rng.random_range(0.5..1.5) } else { rng.random_range(-0.5..0.5) };
            lambda[k][l] = rng.random_range(0.0..1.0);
        }
    }
    FactorParams::new(mu, lambda)
}

pub fn random_tweet_labels<R: Rng>(rng: &mut R, g: &HeterogeneousGraph) -> TweetLabels {
    let labels = (0..g.n_users())
        .map(|u| (0..g.tweets(u).len()).map(|_| label(rng.random())).collect())
        .collect();
    TweetLabels::new(g, labels).unwrap()
}
