//! Synthetic datasets with planted homophily and class-conditional tweet text.
//!
//! Every ordered user pair gets a directed edge with probability `p_same` or
//! `p_diff` depending on whether the two hidden classes agree; a fraction of
//! drawn edges is then reciprocated. Follow and mention edges are drawn
//! independently with their own rates. Tweets mix class-specific and shared
//! vocabulary; with probability `tweet_noise` a tweet is written from the
//! other class's distribution.
//!
//! Optional pool users (ids starting with `x`) have hidden classes but no
//! gold label in the users file; they stand in for extra unlabeled data.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{write_dataset, Dataset, DatasetPaths};
use crate::error::{Error, Result};
use crate::graph::{EdgeKind, RawEdge, SentLabel, Tweet, User};
use crate::seed::derive_seeds;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRates {
    pub p_same: f64,
    pub p_diff: f64,
    /// Probability that a drawn edge also gets its reverse.
    pub mutual_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_users: usize,
    /// Probability that a user is Positive.
    pub class_balance: f64,
    pub p_edge_same: f64,
    pub p_edge_diff: f64,
    pub mutual_fraction: f64,
    pub mention: EdgeRates,
    pub tweets_per_user: (usize, usize),
    pub tweet_noise: f64,
    /// Per-token probability of drawing from the class-specific vocabulary rather than the shared one.
    pub separation: f64,
    pub vocab_size: usize,
    pub words_per_tweet: usize,
    pub topic: String,
    pub n_pool: usize,
    pub pool_tweet_noise: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_users: 300,
            class_balance: 0.5,
            p_edge_same: 0.02,
            p_edge_diff: 0.002,
            mutual_fraction: 0.3,
            mention: EdgeRates {
                p_same: 0.006,
                p_diff: 0.002,
                mutual_fraction: 0.2,
            },
            tweets_per_user: (1, 3),
            tweet_noise: 0.2,
            separation: 0.5,
            vocab_size: 600,
            words_per_tweet: 8,
            topic: "obama".to_owned(),
            n_pool: 0,
            pool_tweet_noise: 0.45,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn follow_rates(&self) -> EdgeRates {
        EdgeRates {
            p_same: self.p_edge_same,
            p_diff: self.p_edge_diff,
            mutual_fraction: self.mutual_fraction,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must lie in [0, 1], got {x}")))
            }
        };
        if self.n_users < 2 {
            return Err(Error::invalid("need at least two users"));
        }
        if !(self.class_balance > 0.0 && self.class_balance < 1.0) {
            return Err(Error::invalid("class_balance must lie in (0, 1)"));
        }
        unit("p_edge_same", self.p_edge_same)?;
        unit("p_edge_diff", self.p_edge_diff)?;
        unit("mutual_fraction", self.mutual_fraction)?;
        unit("mention.p_same", self.mention.p_same)?;
        unit("mention.p_diff", self.mention.p_diff)?;
        unit("mention.mutual_fraction", self.mention.mutual_fraction)?;
        unit("tweet_noise", self.tweet_noise)?;
        unit("pool_tweet_noise", self.pool_tweet_noise)?;
        unit("separation", self.separation)?;
        let (lo, hi) = self.tweets_per_user;
        if lo == 0 || lo > hi {
            return Err(Error::invalid("tweets_per_user must satisfy 1 <= min <= max"));
        }
        if self.vocab_size < 3 {
            return Err(Error::invalid("vocab_size must be at least 3"));
        }
        if self.words_per_tweet == 0 {
            return Err(Error::invalid("words_per_tweet must be positive"));
        }
        if self.topic.trim().is_empty() || self.topic.contains(char::is_whitespace) {
            return Err(Error::invalid("topic must be a single non-empty word"));
        }
        Ok(())
    }
}

/// Probability that an unordered pair ends up connected under the generator,
/// for a directed variant ("either direction") or a mutual one ("both directions").
pub fn expected_pair_connection(p: f64, mutual_fraction: f64, mutual: bool) -> f64 {
    if mutual {
        p * p + 2.0 * p * (1.0 - p) * mutual_fraction
    } else {
        1.0 - (1.0 - p) * (1.0 - p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub generator: String,
    pub config: SynthConfig,
    pub n_labeled: usize,
    pub n_pool: usize,
    pub n_tweets: usize,
    pub n_follow_edges: usize,
    pub n_mention_edges: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthDataset {
    pub dataset: Dataset,
    /// Hidden class of every user, in dataset order (pool users included).
    pub classes: Vec<SentLabel>,
    pub manifest: Manifest,
}

fn draw_edges(
    rng: &mut ChaCha8Rng,
    classes: &[SentLabel],
    ids: &[String],
    rates: EdgeRates,
    kind: EdgeKind,
) -> Vec<RawEdge> {
    let n = classes.len();
    let mut present = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let p = if classes[i] == classes[j] { rates.p_same } else { rates.p_diff };
            if rng.random::<f64>() < p {
                present[i * n + j] = true;
            }
        }
    }
    let drawn = present.clone();
    for i in 0..n {
        for j in 0..n {
            if drawn[i * n + j] && rng.random::<f64>() < rates.mutual_fraction {
                present[j * n + i] = true;
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if present[i * n + j] {
                edges.push(RawEdge::new(ids[i].as_str(), ids[j].as_str(), kind));
            }
        }
    }
    edges
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthDataset> {
    cfg.validate()?;
    let seeds = derive_seeds(cfg.seed, 4);
    let mut label_rng = ChaCha8Rng::seed_from_u64(seeds[0]);
    let mut text_rng = ChaCha8Rng::seed_from_u64(seeds[1]);
    let mut follow_rng = ChaCha8Rng::seed_from_u64(seeds[2]);
    let mut mention_rng = ChaCha8Rng::seed_from_u64(seeds[3]);

    let total = cfg.n_users + cfg.n_pool;
    let ids: Vec<String> = (0..cfg.n_users)
        .map(|i| format!("u{i:05}"))
        .chain((0..cfg.n_pool).map(|i| format!("x{i:05}")))
        .collect();
    let classes: Vec<SentLabel> = (0..total)
        .map(|_| {
            if label_rng.random::<f64>() < cfg.class_balance {
                SentLabel::Positive
            } else {
                SentLabel::Negative
            }
        })
        .collect();
    let users: Vec<User> = ids
        .iter()
        .zip(&classes)
        .enumerate()
        .map(|(i, (id, &c))| User::new(id.as_str(), (i < cfg.n_users).then_some(c)))
        .collect();

    // Vocabulary thirds: negative-specific, positive-specific, shared.
    let third = cfg.vocab_size / 3;
    let shared_len = cfg.vocab_size - 2 * third;
    let mut tweets = Vec::new();
    for (i, &class) in classes.iter().enumerate() {
        let noise = if i < cfg.n_users { cfg.tweet_noise } else { cfg.pool_tweet_noise };
        let n_tweets = text_rng.random_range(cfg.tweets_per_user.0..=cfg.tweets_per_user.1);
        for _ in 0..n_tweets {
            let voice = if text_rng.random::<f64>() < noise { class.flip() } else { class };
            let mut words = vec![cfg.topic.clone()];
            for _ in 0..cfg.words_per_tweet {
                let w = if text_rng.random::<f64>() < cfg.separation {
                    voice.index() * third + text_rng.random_range(0..third)
                } else {
                    2 * third + text_rng.random_range(0..shared_len)
                };
                words.push(format!("w{w}"));
            }
            tweets.push(Tweet::new(format!("t{:07}", tweets.len()), ids[i].as_str(), words.join(" ")));
        }
    }

    let follow = draw_edges(&mut follow_rng, &classes, &ids, cfg.follow_rates(), EdgeKind::Follow);
    let mention = draw_edges(&mut mention_rng, &classes, &ids, cfg.mention, EdgeKind::Mention);
    let manifest = Manifest {
        generator: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).to_owned(),
        config: cfg.clone(),
        n_labeled: cfg.n_users,
        n_pool: cfg.n_pool,
        n_tweets: tweets.len(),
        n_follow_edges: follow.len(),
        n_mention_edges: mention.len(),
    };
    let mut edges = follow;
    edges.extend(mention);
    Ok(SynthDataset {
        dataset: Dataset {
            users,
            tweets,
            edges,
        },
        classes,
        manifest,
    })
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Writes the dataset files and `manifest.json` into `dir`.
pub fn write_synth(ds: &SynthDataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_dataset(&ds.dataset, &DatasetPaths::in_dir(dir))?;
    let path = dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&ds.manifest)?;
    fs::write(&path, json + "\n").map_err(|e| Error::io(path, e))
}
