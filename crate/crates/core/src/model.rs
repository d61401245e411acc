//! The log-linear user/tweet factor-graph model.
//!
//! With user labels `Y`, observed tweet labels `ŷ`, and confidence weights,
//!
//! ```text
//! log P(Y) = Σ_{k,ℓ} mu[k][ℓ]·F[k][ℓ](Y) + Σ_{k,ℓ} lambda[k][ℓ]·H[k][ℓ](Y) − log Z
//! ```
//!
//! where `F` aggregates user-tweet feature mass (each tweet of user `u`
//! contributes `w_u / |tweets(u)|` to cell `[Y(u)][ŷ_t]`, with `w_u` the
//! labeled or unlabeled confidence) and `H` aggregates user-user feature mass
//! (each neighbor `v` of `u` contributes `w_relation / |neighbors(u)|` to
//! cell `[Y(u)][Y(v)]`). The score is linear in the parameters, so the
//! log-likelihood ratio of two assignments is a difference of feature counts
//! dotted with the parameters, and its gradient is that difference.

use std::collections::BTreeMap;
use std::fs;
use std::ops::{Index, Sub};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{HeterogeneousGraph, SentLabel, Tweet, UserId};

/// 2×2 table indexed by `[user label][other label]`.
pub type Matrix2 = [[f64; 2]; 2];

pub const IDENTITY: Matrix2 = [[1.0, 0.0], [0.0, 1.0]];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorParams {
    /// User-tweet parameters, `[user label][tweet label]`.
    pub mu: Matrix2,
    /// User-user parameters, `[user label][neighbor label]`.
    pub lambda: Matrix2,
    pub w_labeled: f64,
    pub w_unlabeled: f64,
    pub w_relation: f64,
}

impl FactorParams {
    pub const W_LABELED: f64 = 1.0;
    pub const W_UNLABELED: f64 = 0.125;
    pub const W_RELATION: f64 = 0.6;

    /// Parameters with the default confidence weights.
    pub fn new(mu: Matrix2, lambda: Matrix2) -> Self {
        FactorParams {
            mu,
            lambda,
            w_labeled: Self::W_LABELED,
            w_unlabeled: Self::W_UNLABELED,
            w_relation: Self::W_RELATION,
        }
    }

    pub fn zeros() -> Self {
        Self::new([[0.0; 2]; 2], [[0.0; 2]; 2])
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self
            .mu
            .iter()
            .chain(self.lambda.iter())
            .flatten()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::invalid("non-finite factor parameter"));
        }
        for (name, w) in [
            ("w_labeled", self.w_labeled),
            ("w_unlabeled", self.w_unlabeled),
            ("w_relation", self.w_relation),
        ] {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {w}")));
            }
        }
        Ok(())
    }

    /// Moves `mu` and `lambda` by `step · delta`; the confidence weights never change.
    pub fn step(&mut self, delta: &FeatureCounts, step: f64) {
        for k in 0..2 {
            for l in 0..2 {
                self.mu[k][l] += step * delta.f[k][l];
                self.lambda[k][l] += step * delta.h[k][l];
            }
        }
    }

    /// Confidence weight of user `u`'s tweet factors.
    pub fn tweet_weight(&self, g: &HeterogeneousGraph, u: usize) -> f64 {
        if g.is_revealed(u) {
            self.w_labeled
        } else {
            self.w_unlabeled
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let p: FactorParams = serde_json::from_str(&text)?;
        p.validate()?;
        Ok(p)
    }
}

/// A full vector of user labels, indexed like the graph's users.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment(Vec<SentLabel>);

impl Assignment {
    pub fn new(labels: Vec<SentLabel>) -> Self {
        Assignment(labels)
    }

    pub fn uniform(n: usize, label: SentLabel) -> Self {
        Assignment(vec![label; n])
    }

    pub fn from_map(g: &HeterogeneousGraph, labels: &BTreeMap<UserId, SentLabel>) -> Result<Self> {
        g.users()
            .iter()
            .map(|u| {
                labels
                    .get(&u.id)
                    .copied()
                    .ok_or_else(|| Error::invalid(format!("assignment misses user `{}`", u.id)))
            })
            .collect::<Result<Vec<_>>>()
            .map(Assignment)
    }

    pub fn to_map(&self, g: &HeterogeneousGraph) -> BTreeMap<UserId, SentLabel> {
        g.users()
            .iter()
            .zip(&self.0)
            .map(|(u, l)| (u.id.clone(), *l))
            .collect()
    }

    /// Assignment number `bits` in binary order: user `i` is Positive iff bit `i` is set.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Assignment(
            (0..n)
                .map(|i| SentLabel::from_index(((bits >> i) & 1) as usize))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[SentLabel] {
        &self.0
    }

    pub fn flip(&mut self, u: usize) {
        self.0[u] = self.0[u].flip();
    }

    pub fn flipped(&self, u: usize) -> Self {
        let mut y = self.clone();
        y.flip(u);
        y
    }

    pub fn set(&mut self, u: usize, label: SentLabel) {
        self.0[u] = label;
    }
}

impl Index<usize> for Assignment {
    type Output = SentLabel;

    fn index(&self, i: usize) -> &SentLabel {
        &self.0[i]
    }
}

/// Observed tweet labels, aligned with [`HeterogeneousGraph::tweets`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TweetLabels(Vec<Vec<SentLabel>>);

impl TweetLabels {
    pub fn new(g: &HeterogeneousGraph, labels: Vec<Vec<SentLabel>>) -> Result<Self> {
        if labels.len() != g.n_users()
            || labels
                .iter()
                .enumerate()
                .any(|(u, ls)| ls.len() != g.tweets(u).len())
        {
            return Err(Error::invalid("tweet labels do not cover the graph's tweets"));
        }
        Ok(TweetLabels(labels))
    }

    /// Tweets of revealed users take their author's label; all others are labeled by `classify`.
    pub fn observed(g: &HeterogeneousGraph, mut classify: impl FnMut(&Tweet) -> SentLabel) -> Self {
        TweetLabels(
            (0..g.n_users())
                .map(|u| match g.revealed_label(u) {
                    Some(l) => vec![l; g.tweets(u).len()],
                    None => g.tweets(u).iter().map(&mut classify).collect(),
                })
                .collect(),
        )
    }

    pub fn of(&self, u: usize) -> &[SentLabel] {
        &self.0[u]
    }
}

/// Aggregated feature activations: `f` for user-tweet factors, `h` for user-user factors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureCounts {
    pub f: Matrix2,
    pub h: Matrix2,
}

impl FeatureCounts {
    /// `Σ mu·F + Σ lambda·H`.
    pub fn score(&self, p: &FactorParams) -> f64 {
        let mut s = 0.0;
        for k in 0..2 {
            for l in 0..2 {
                s += p.mu[k][l] * self.f[k][l] + p.lambda[k][l] * self.h[k][l];
            }
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.f.iter().chain(self.h.iter()).flatten().all(|&x| x == 0.0)
    }
}

impl Sub for FeatureCounts {
    type Output = FeatureCounts;

    fn sub(self, rhs: FeatureCounts) -> FeatureCounts {
        let mut out = self;
        for k in 0..2 {
            for l in 0..2 {
                out.f[k][l] -= rhs.f[k][l];
                out.h[k][l] -= rhs.h[k][l];
            }
        }
        out
    }
}

/// User-tweet feature for tweet number `t` of user `u` and configuration `(k, l)`.
#[allow(clippy::too_many_arguments)]
pub fn user_tweet_feature(
    g: &HeterogeneousGraph,
    params: &FactorParams,
    tweets: &TweetLabels,
    y: &Assignment,
    u: usize,
    t: usize,
    k: SentLabel,
    l: SentLabel,
) -> f64 {
    if y[u] == k && tweets.of(u)[t] == l {
        params.tweet_weight(g, u) / g.tweets(u).len() as f64
    } else {
        0.0
    }
}

/// User-user feature for neighbor `v` of `u`; normalized by `u`'s neighbor count.
pub fn user_user_feature(
    g: &HeterogeneousGraph,
    params: &FactorParams,
    y: &Assignment,
    u: usize,
    v: usize,
    k: SentLabel,
    l: SentLabel,
) -> f64 {
    let nbrs = g.neighbor_indices(u);
    debug_assert!(nbrs.binary_search(&v).is_ok(), "{v} is not a neighbor of {u}");
    if y[u] == k && y[v] == l {
        params.w_relation / nbrs.len() as f64
    } else {
        0.0
    }
}

pub fn feature_counts(
    g: &HeterogeneousGraph,
    params: &FactorParams,
    tweets: &TweetLabels,
    y: &Assignment,
) -> FeatureCounts {
    let mut c = FeatureCounts::default();
    for u in 0..g.n_users() {
        let yu = y[u].index();
        let ts = tweets.of(u);
        if !ts.is_empty() {
            let w = params.tweet_weight(g, u) / ts.len() as f64;
            for l in ts {
                c.f[yu][l.index()] += w;
            }
        }
        let nbrs = g.neighbor_indices(u);
        if !nbrs.is_empty() {
            let r = params.w_relation / nbrs.len() as f64;
            for &v in nbrs {
                c.h[yu][y[v].index()] += r;
            }
        }
    }
    c
}

/// Unnormalized log-probability of `y`.
pub fn log_score(g: &HeterogeneousGraph, params: &FactorParams, tweets: &TweetLabels, y: &Assignment) -> f64 {
    feature_counts(g, params, tweets, y).score(params)
}

/// `log P(y_new) − log P(y_old)`; the partition function cancels.
pub fn llr(
    g: &HeterogeneousGraph,
    params: &FactorParams,
    tweets: &TweetLabels,
    y_new: &Assignment,
    y_old: &Assignment,
) -> f64 {
    llr_gradient(g, params, tweets, y_new, y_old).score(params)
}

/// Gradient of [`llr`] with respect to `(mu, lambda)`.
pub fn llr_gradient(
    g: &HeterogeneousGraph,
    params: &FactorParams,
    tweets: &TweetLabels,
    y_new: &Assignment,
    y_old: &Assignment,
) -> FeatureCounts {
    feature_counts(g, params, tweets, y_new) - feature_counts(g, params, tweets, y_old)
}

/// `feature_counts(y with u flipped) − feature_counts(y)`, touching only `u`'s factors.
pub fn flip_delta(
    g: &HeterogeneousGraph,
    params: &FactorParams,
    tweets: &TweetLabels,
    y: &Assignment,
    u: usize,
) -> FeatureCounts {
    let mut d = FeatureCounts::default();
    let old = y[u].index();
    let new = y[u].flip().index();
    let ts = tweets.of(u);
    if !ts.is_empty() {
        let w = params.tweet_weight(g, u) / ts.len() as f64;
        for l in ts {
            d.f[old][l.index()] -= w;
            d.f[new][l.index()] += w;
        }
    }
    let nbrs = g.neighbor_indices(u);
    if !nbrs.is_empty() {
        let r = params.w_relation / nbrs.len() as f64;
        for &v in nbrs {
            d.h[old][y[v].index()] -= r;
            d.h[new][y[v].index()] += r;
        }
    }
    for &w in g.in_neighbor_indices(u) {
        let r = params.w_relation / g.neighbor_indices(w).len() as f64;
        let yw = y[w].index();
        d.h[yw][old] -= r;
        d.h[yw][new] += r;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeKind, GraphVariant, RawEdge, User};
    use SentLabel::{Negative as N, Positive as P};

    fn graph(
        n_tweets: &[usize],
        edges: &[(usize, usize)],
        revealed: &[usize],
        variant: GraphVariant,
    ) -> HeterogeneousGraph {
        let ids: Vec<String> = (0..n_tweets.len()).map(|i| format!("u{i}")).collect();
        let mut users: Vec<User> = ids.iter().map(|id| User::new(id.as_str(), Some(P))).collect();
        for &r in revealed {
            users[r].revealed = true;
        }
        let tweets: Vec<Tweet> = n_tweets
            .iter()
            .enumerate()
            .flat_map(|(u, &n)| (0..n).map(move |t| Tweet::new(format!("t{u}-{t}"), format!("u{u}"), "x")))
            .collect();
        let raw: Vec<RawEdge> = edges
            .iter()
            .map(|&(s, d)| RawEdge::new(ids[s].as_str(), ids[d].as_str(), EdgeKind::Follow))
            .collect();
        HeterogeneousGraph::build(&users, &tweets, &raw, variant).unwrap()
    }

    fn all_tweets(g: &HeterogeneousGraph, l: SentLabel) -> TweetLabels {
        TweetLabels::observed(g, |_| l)
    }

    #[test]
    fn user_tweet_feature_values() {
        let g = graph(&[1, 4], &[], &[0], GraphVariant::DirectedFollow);
        let p = FactorParams::zeros();
        let tl = all_tweets(&g, P);
        let y = Assignment::uniform(2, P);
        assert_eq!(user_tweet_feature(&g, &p, &tl, &y, 0, 0, P, P), 1.0);
        assert_eq!(user_tweet_feature(&g, &p, &tl, &y, 1, 2, P, P), 0.03125);
        assert_eq!(user_tweet_feature(&g, &p, &tl, &y, 1, 2, N, P), 0.0);
    }

    #[test]
    fn user_user_feature_values() {
        let g = graph(&[1, 1, 1, 1], &[(0, 1), (0, 2), (0, 3), (1, 0)], &[], GraphVariant::DirectedFollow);
        let p = FactorParams::zeros();
        let y = Assignment::uniform(4, P);
        assert!((user_user_feature(&g, &p, &y, 0, 1, P, P) - 0.2).abs() < 1e-15);
        assert_eq!(user_user_feature(&g, &p, &y, 0, 1, P, N), 0.0);
        assert_eq!(user_user_feature(&g, &p, &y, 1, 0, P, P), 0.6);
    }

    #[test]
    fn counts_for_single_revealed_user() {
        let g = graph(&[2], &[], &[0], GraphVariant::DirectedFollow);
        let c = feature_counts(&g, &FactorParams::zeros(), &all_tweets(&g, P), &Assignment::uniform(1, P));
        assert_eq!(c.f, [[0.0, 0.0], [0.0, 1.0]]);
        assert_eq!(c.h, [[0.0; 2]; 2]);
    }

    #[test]
    fn counts_for_mutual_pair() {
        let g = graph(&[1, 1], &[(0, 1), (1, 0)], &[], GraphVariant::MutualFollow);
        let c = feature_counts(&g, &FactorParams::zeros(), &all_tweets(&g, P), &Assignment::uniform(2, P));
        assert!((c.h[1][1] - 1.2).abs() < 1e-15);
        assert_eq!(c.h[0], [0.0, 0.0]);
    }

    #[test]
    fn log_score_is_linear_in_parameters() {
        let g = graph(&[2], &[], &[0], GraphVariant::DirectedFollow);
        let tl = all_tweets(&g, P);
        let y = Assignment::uniform(1, P);
        assert_eq!(log_score(&g, &FactorParams::zeros(), &tl, &y), 0.0);
        let mut p = FactorParams::zeros();
        p.mu[1][1] = 2.0;
        assert_eq!(log_score(&g, &p, &tl, &y), 2.0);
    }

    #[test]
    fn llr_identity_and_antisymmetry() {
        let g = graph(&[1, 2, 3], &[(0, 1), (1, 2), (2, 0)], &[1], GraphVariant::DirectedFollow);
        let p = FactorParams::new(IDENTITY, [[0.7, 0.3], [0.2, 0.8]]);
        let tl = all_tweets(&g, N);
        let a = Assignment::new(vec![P, N, P]);
        let b = Assignment::new(vec![N, N, P]);
        assert_eq!(llr(&g, &p, &tl, &a, &a), 0.0);
        assert!(llr_gradient(&g, &p, &tl, &a, &a).is_zero());
        assert_eq!(llr(&g, &p, &tl, &a, &b), -llr(&g, &p, &tl, &b, &a));
    }

    #[test]
    fn single_flip_on_path_matches_hand_counts() {
        // Path u0 - u1 - u2 (mutual), unrevealed, one positive tweet each.
        let g = graph(&[1, 1, 1], &[(0, 1), (1, 0), (1, 2), (2, 1)], &[], GraphVariant::MutualFollow);
        let tl = all_tweets(&g, P);
        let p = FactorParams::zeros();
        let old = Assignment::uniform(3, P);
        let new = old.flipped(1);
        let d = llr_gradient(&g, &p, &tl, &new, &old);
        // u1's tweet moves from [1][1] to [0][1].
        assert_eq!(d.f, [[0.0, 0.125], [0.0, -0.125]]);
        // u1's two outgoing factors (0.3 each) move [1][1] -> [0][1];
        // u0 and u2 (degree 1) each move 0.6 from [1][1] -> [1][0].
        let expect_h = [[0.0, 0.6], [1.2, -1.8]];
        for k in 0..2 {
            for l in 0..2 {
                assert!((d.h[k][l] - expect_h[k][l]).abs() < 1e-12, "{k}{l}: {}", d.h[k][l]);
            }
        }
        let local = flip_delta(&g, &p, &tl, &old, 1);
        for k in 0..2 {
            for l in 0..2 {
                assert!((local.h[k][l] - d.h[k][l]).abs() < 1e-12);
                assert!((local.f[k][l] - d.f[k][l]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn step_leaves_weights_alone() {
        let mut p = FactorParams::new(IDENTITY, IDENTITY);
        let d = FeatureCounts {
            f: [[1.0, 1.0], [1.0, 1.0]],
            h: [[2.0, 2.0], [2.0, 2.0]],
        };
        p.step(&d, 0.5);
        assert_eq!(p.mu, [[1.5, 0.5], [0.5, 1.5]]);
        assert_eq!(p.lambda, [[2.0, 1.0], [1.0, 2.0]]);
        assert_eq!(
            (p.w_labeled, p.w_unlabeled, p.w_relation),
            (FactorParams::W_LABELED, FactorParams::W_UNLABELED, FactorParams::W_RELATION)
        );
    }

    #[test]
    fn params_json_shape() {
        let p = FactorParams::new(IDENTITY, [[0.5, 0.5], [0.25, 0.75]]);
        let v: serde_json::Value = serde_json::to_value(p).unwrap();
        assert_eq!(v["lambda"][1][1], 0.75);
        assert_eq!(v["w_unlabeled"], 0.125);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        p.save(&path).unwrap();
        assert_eq!(FactorParams::load(&path).unwrap(), p);
    }

    #[test]
    fn rejects_bad_weights() {
        let mut p = FactorParams::zeros();
        p.w_relation = 0.0;
        assert!(p.validate().is_err());
        p.w_relation = 0.6;
        p.mu[0][0] = f64::NAN;
        assert!(p.validate().is_err());
    }
}
