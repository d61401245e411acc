//! Tweet tokenization, a hinge-loss linear classifier, and the majority-vote baseline.
//!
//! Features are hashed unigrams and adjacent-token bigrams with term-frequency
//! weights. The classifier is trained by stochastic subgradient descent on the
//! L2-regularized hinge loss.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{HeterogeneousGraph, SentLabel, Tweet, UserId};

pub const HASH_BITS: u32 = 20;
const HASH_MASK: u64 = (1 << HASH_BITS) - 1;

fn feature_id(token: &str) -> u32 {
    // FNV-1a, stable across platforms and releases.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in token.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    (h & HASH_MASK) as u32
}

/// Lowercased tokens: maximal alphanumeric runs, with a directly preceding
/// `#` or `@` kept attached.
pub fn tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut pending_prefix: Option<char> = None;
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            if cur.is_empty() {
                if let Some(p) = pending_prefix.take() {
                    cur.push(p);
                }
            }
            cur.extend(ch.to_lowercase());
        } else {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            pending_prefix = matches!(ch, '#' | '@').then_some(ch);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Sparse term-frequency vector over hashed features, sorted by feature id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TokenVector {
    entries: Vec<(u32, f64)>,
}

impl TokenVector {
    pub fn from_terms<'a>(terms: impl IntoIterator<Item = &'a str>) -> Self {
        let mut counts: BTreeMap<u32, f64> = BTreeMap::new();
        for t in terms {
            *counts.entry(feature_id(t)).or_insert(0.0) += 1.0;
        }
        TokenVector {
            entries: counts.into_iter().collect(),
        }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weight_of(&self, term: &str) -> f64 {
        let id = feature_id(term);
        self.entries
            .binary_search_by_key(&id, |e| e.0)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }
}

/// Unigrams plus `first_second` bigrams of adjacent tokens.
pub fn tokenize(text: &str) -> TokenVector {
    let toks = tokens(text);
    let bigrams: Vec<String> = toks.windows(2).map(|w| format!("{}_{}", w[0], w[1])).collect();
    TokenVector::from_terms(toks.iter().chain(bigrams.iter()).map(String::as_str))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub bias: f64,
    #[serde(with = "sparse_weights")]
    pub weights: BTreeMap<u32, f64>,
}

mod sparse_weights {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(w: &BTreeMap<u32, f64>, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(u32, f64)> = w.iter().map(|(&k, &v)| (k, v)).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u32, f64>, D::Error> {
        Ok(Vec::<(u32, f64)>::deserialize(d)?.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TweetPrediction {
    pub tweet_id: String,
    pub label: SentLabel,
    pub margin: f64,
}

impl LinearModel {
    pub fn margin(&self, x: &TokenVector) -> f64 {
        x.entries
            .iter()
            .map(|(f, v)| self.weights.get(f).map_or(0.0, |w| w * v))
            .sum::<f64>()
            + self.bias
    }

    /// Positive iff the margin is non-negative.
    pub fn classify(&self, x: &TokenVector) -> SentLabel {
        label_of_margin(self.margin(x))
    }

    pub fn predict_tweet(&self, tweet: &Tweet) -> TweetPrediction {
        let margin = self.margin(&tokenize(&tweet.text));
        TweetPrediction {
            tweet_id: tweet.id.clone(),
            label: label_of_margin(margin),
            margin,
        }
    }
}

fn label_of_margin(margin: f64) -> SentLabel {
    if margin >= 0.0 {
        SentLabel::Positive
    } else {
        SentLabel::Negative
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub reg: f64,
    /// Learning rate at epoch `e` is `learning_rate / (1 + e)`.
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 20,
            reg: 1e-4,
            learning_rate: 0.1,
            seed: 0,
        }
    }
}

pub fn train_classifier(examples: &[(TokenVector, SentLabel)], cfg: &TrainConfig) -> Result<LinearModel> {
    for class in SentLabel::ALL {
        if !examples.iter().any(|(_, y)| *y == class) {
            return Err(Error::insufficient(format!("no `{class}` training examples")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    // w = scale * v, so the L2 shrink is O(1) per step.
    let mut v: HashMap<u32, f64> = HashMap::new();
    let mut scale = 1.0;
    let mut bias = 0.0;
    for epoch in 0..cfg.epochs {
        let lr = cfg.learning_rate / (1.0 + epoch as f64);
        order.shuffle(&mut rng);
        for &i in &order {
            let (x, label) = &examples[i];
            let y = if *label == SentLabel::Positive { 1.0 } else { -1.0 };
            let dot: f64 = x
                .entries
                .iter()
                .map(|(f, xv)| v.get(f).map_or(0.0, |w| w * xv))
                .sum();
            let margin = y * (scale * dot + bias);
            scale *= 1.0 - lr * cfg.reg;
            if margin < 1.0 {
                for &(f, xv) in &x.entries {
                    *v.entry(f).or_insert(0.0) += lr * y * xv / scale;
                }
                bias += lr * y;
            }
            if scale < 1e-9 {
                v.values_mut().for_each(|w| *w *= scale);
                scale = 1.0;
            }
        }
    }
    let weights = v
        .into_iter()
        .map(|(f, w)| (f, w * scale))
        .filter(|(_, w)| *w != 0.0)
        .collect();
    Ok(LinearModel { bias, weights })
}

/// Every tweet of a revealed user, labeled with that user's label.
pub fn revealed_training_set(g: &HeterogeneousGraph) -> Vec<(TokenVector, SentLabel)> {
    (0..g.n_users())
        .filter_map(|i| g.revealed_label(i).map(|l| (i, l)))
        .flat_map(|(i, l)| g.tweets(i).iter().map(move |t| (tokenize(&t.text), l)))
        .collect()
}

/// Majority label; ties go to Positive.
pub fn majority_vote(labels: impl IntoIterator<Item = SentLabel>) -> SentLabel {
    let (mut pos, mut neg) = (0usize, 0usize);
    for l in labels {
        match l {
            SentLabel::Positive => pos += 1,
            SentLabel::Negative => neg += 1,
        }
    }
    if pos >= neg {
        SentLabel::Positive
    } else {
        SentLabel::Negative
    }
}

/// The text-only baseline: the majority predicted label among the user's tweets.
pub fn svm_vote(g: &HeterogeneousGraph, m: &LinearModel, u: &UserId) -> Result<SentLabel> {
    let idx = g.require_index(u)?;
    svm_vote_index(g, m, idx)
}

pub fn svm_vote_index(g: &HeterogeneousGraph, m: &LinearModel, idx: usize) -> Result<SentLabel> {
    let tweets = g.tweets(idx);
    if tweets.is_empty() {
        return Err(Error::insufficient(format!("user `{}` has no tweets", g.user(idx).id)));
    }
    Ok(majority_vote(tweets.iter().map(|t| m.classify(&tokenize(&t.text)))))
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    #[serde(flatten)]
    model: LinearModel,
}

const MODEL_VERSION: u32 = 1;

pub fn save_model(m: &LinearModel, path: &Path) -> Result<()> {
    let json = serde_json::to_string(&ModelFile {
        version: MODEL_VERSION,
        model: m.clone(),
    })?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<LinearModel> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ModelFile = serde_json::from_str(&text)?;
    if file.version != MODEL_VERSION {
        return Err(Error::invalid(format!("unsupported model version {}", file.version)));
    }
    Ok(file.model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use SentLabel::{Negative as N, Positive as P};

    #[test]
    fn tokenizes_unigrams_and_bigrams() {
        let v = tokenize("Obama rocks");
        assert_eq!(v.weight_of("obama"), 1.0);
        assert_eq!(v.weight_of("rocks"), 1.0);
        assert_eq!(v.weight_of("obama_rocks"), 1.0);
        assert_eq!(v.entries().len(), 3);
    }

    #[test]
    fn keeps_hashtag_prefix() {
        assert_eq!(tokens("#lakers B**TCH!"), vec!["#lakers", "b", "tch"]);
        assert_eq!(tokens("@Bob: hi # there"), vec!["@bob", "hi", "there"]);
        let v = tokenize("#lakers B**TCH!");
        assert_eq!(v.weight_of("#lakers_b"), 1.0);
        assert_eq!(v.weight_of("b_tch"), 1.0);
    }

    #[test]
    fn empty_text_is_empty_vector() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("!!! ...").is_empty());
    }

    #[test]
    fn term_frequencies_accumulate() {
        assert_eq!(tokenize("love love").weight_of("love"), 2.0);
    }

    #[test]
    fn tie_margin_is_positive() {
        let m = LinearModel::default();
        assert_eq!(m.classify(&TokenVector::default()), P);
    }

    #[test]
    fn margin_is_a_dot_product() {
        let mut m = LinearModel::default();
        m.weights.insert(feature_id("love"), 1.0);
        let p = m.predict_tweet(&Tweet::new("t", "u", "love love"));
        assert_eq!(p.margin, 2.0);
        assert_eq!(p.label, P);
        m.bias = -2.3;
        assert_eq!(m.predict_tweet(&Tweet::new("t", "u", "love love")).label, N);
    }

    fn toy() -> Vec<(TokenVector, SentLabel)> {
        vec![
            (tokenize("good"), P),
            (tokenize("good good"), P),
            (tokenize("bad"), N),
            (tokenize("bad bad"), N),
        ]
    }

    #[test]
    fn separable_toy_is_fit() {
        let cfg = TrainConfig {
            epochs: 10,
            ..TrainConfig::default()
        };
        let m = train_classifier(&toy(), &cfg).unwrap();
        for (x, y) in toy() {
            assert_eq!(m.classify(&x), y);
        }
    }

    #[test]
    fn flipped_labels_negate_margins() {
        let cfg = TrainConfig::default();
        let flipped: Vec<_> = toy().into_iter().map(|(x, y)| (x, y.flip())).collect();
        let a = train_classifier(&toy(), &cfg).unwrap();
        let b = train_classifier(&flipped, &cfg).unwrap();
        for (x, _) in toy() {
            assert_eq!(a.margin(&x), -b.margin(&x));
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let data = vec![(tokenize("good"), P)];
        assert!(matches!(
            train_classifier(&data, &TrainConfig::default()),
            Err(Error::Insufficient(_))
        ));
    }

    #[test]
    fn training_is_reproducible() {
        let cfg = TrainConfig {
            seed: 7,
            ..TrainConfig::default()
        };
        assert_eq!(train_classifier(&toy(), &cfg).unwrap(), train_classifier(&toy(), &cfg).unwrap());
    }

    #[test]
    fn majority_with_positive_ties() {
        assert_eq!(majority_vote([P, P, N]), P);
        assert_eq!(majority_vote([P, N]), P);
        assert_eq!(majority_vote([N, N, N]), N);
    }

    #[test]
    fn model_file_round_trips() {
        let m = train_classifier(&toy(), &TrainConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        save_model(&m, &path).unwrap();
        assert_eq!(load_model(&path).unwrap(), m);
    }
}
