//! Parameter estimation: count-based NoLearning and rank-based SampleRank.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{HeterogeneousGraph, SentLabel};
use crate::model::{flip_delta, Assignment, FactorParams, TweetLabels, IDENTITY};

/// Result of [`no_learning_estimate`].
#[derive(Clone, Debug, PartialEq)]
pub struct NoLearning {
    pub params: FactorParams,
    /// Source labels `k` for which no labeled edge existed; their lambda rows are `(0.5, 0.5)`.
    pub fallback_rows: Vec<SentLabel>,
}

/// Estimates `lambda` from label co-occurrence on edges whose endpoints are
/// both revealed, and fixes `mu` to the identity.
///
/// `lambda[k][l]` is the fraction of labeled edges `(u, v)` with `y_u = k`
/// that have `y_v = l`. Edges are the neighbor relations of the model, so
/// under mutual variants each undirected edge is counted in both orientations.
pub fn no_learning_estimate(g: &HeterogeneousGraph) -> NoLearning {
    let mut counts = [[0usize; 2]; 2];
    for u in 0..g.n_users() {
        let Some(yu) = g.revealed_label(u) else { continue };
        for &v in g.neighbor_indices(u) {
            if let Some(yv) = g.revealed_label(v) {
                counts[yu.index()][yv.index()] += 1;
            }
        }
    }
    let mut lambda = [[0.5; 2]; 2];
    let mut fallback_rows = Vec::new();
    for k in SentLabel::ALL {
        let row = counts[k.index()];
        let total = row[0] + row[1];
        if total == 0 {
            log::warn!("no labeled edges leave `{k}` users; using a uniform lambda row");
            fallback_rows.push(k);
        } else {
            for l in 0..2 {
                lambda[k.index()][l] = row[l] as f64 / total as f64;
            }
        }
    }
    NoLearning {
        params: FactorParams::new(IDENTITY, lambda),
        fallback_rows,
    }
}

/// Accuracy plus macro-averaged F1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfScore {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub combined: f64,
}

/// Counts indexed `[gold][predicted]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Confusion([[usize; 2]; 2]);

impl Confusion {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (SentLabel, SentLabel)>) -> Self {
        let mut c = Confusion::default();
        for (pred, gold) in pairs {
            c.add(pred, gold);
        }
        c
    }

    pub fn add(&mut self, pred: SentLabel, gold: SentLabel) {
        self.0[gold.index()][pred.index()] += 1;
    }

    pub fn remove(&mut self, pred: SentLabel, gold: SentLabel) {
        self.0[gold.index()][pred.index()] -= 1;
    }

    pub fn total(&self) -> usize {
        self.0.iter().flatten().sum()
    }

    fn f1(&self, c: usize) -> f64 {
        let tp = self.0[c][c];
        let fp = self.0[1 - c][c];
        let fn_ = self.0[c][1 - c];
        let denom = 2 * tp + fp + fn_;
        if denom == 0 {
            0.0
        } else {
            (2 * tp) as f64 / denom as f64
        }
    }

    pub fn score(&self) -> Result<PerfScore> {
        let n = self.total();
        if n == 0 {
            return Err(Error::insufficient("empty evaluation scope"));
        }
        let accuracy = (self.0[0][0] + self.0[1][1]) as f64 / n as f64;
        let macro_f1 = (self.f1(0) + self.f1(1)) / 2.0;
        Ok(PerfScore {
            accuracy,
            macro_f1,
            combined: accuracy + macro_f1,
        })
    }
}

/// Scores `(predicted, gold)` pairs.
pub fn perf(pairs: impl IntoIterator<Item = (SentLabel, SentLabel)>) -> Result<PerfScore> {
    Confusion::from_pairs(pairs).score()
}

/// Scores `y` against the gold labels of the users in `scope`.
pub fn perf_on(g: &HeterogeneousGraph, y: &Assignment, scope: &[usize]) -> Result<PerfScore> {
    let pairs = scope
        .iter()
        .map(|&u| {
            g.user(u)
                .gold_label
                .map(|gold| (y[u], gold))
                .ok_or_else(|| Error::MissingGoldLabel(g.user(u).id.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    perf(pairs)
}

/// Copy of `y` with one uniformly chosen user flipped.
pub fn sample_step<R: Rng>(y: &Assignment, rng: &mut R) -> Assignment {
    y.flipped(rng.random_range(0..y.len()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateRule {
    /// `φ := φ − η ∇LLR` on every disagreement, regardless of the sign of RelPerf.
    #[serde(rename = "paper")]
    PaperLiteral,
    /// `φ := φ + η sign(RelPerf) ∇LLR`, moving the LLR toward agreement.
    SignCorrected,
}

impl FromStr for UpdateRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(UpdateRule::PaperLiteral),
            "sign-corrected" => Ok(UpdateRule::SignCorrected),
            other => Err(Error::invalid(format!("unknown update rule `{other}`"))),
        }
    }
}

impl fmt::Display for UpdateRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpdateRule::PaperLiteral => "paper",
            UpdateRule::SignCorrected => "sign-corrected",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SampleRankConfig {
    pub steps: usize,
    #[serde(rename = "eta")]
    pub learning_rate: f64,
    /// Stop once this many consecutive steps made no parameter update; 0 disables.
    pub convergence_window: usize,
    pub seed: u64,
    pub update_rule: UpdateRule,
}

impl Default for SampleRankConfig {
    fn default() -> Self {
        SampleRankConfig {
            steps: 20_000,
            learning_rate: 0.001,
            convergence_window: 2_000,
            seed: 0,
            update_rule: UpdateRule::SignCorrected,
        }
    }
}

impl SampleRankConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::invalid("SampleRank needs at least one step"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::invalid("SampleRank learning rate must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleRankOutcome {
    pub params: FactorParams,
    pub labels: Assignment,
    pub steps_run: usize,
    pub updates: usize,
    /// Labeled-data performance after each accepted transition, starting with the initial state.
    pub perf_trace: Vec<f64>,
}

/// Runs SampleRank from `init` with a seeded random initial assignment.
///
/// Each step proposes a single-user flip. When the model's log-likelihood
/// ratio and the change in labeled-data performance have strictly opposite
/// signs, `mu` and `lambda` move by the configured update rule. The proposal
/// is accepted iff performance strictly improves.
pub fn sample_rank(
    g: &HeterogeneousGraph,
    tweets: &TweetLabels,
    cfg: &SampleRankConfig,
    init: &FactorParams,
) -> Result<SampleRankOutcome> {
    cfg.validate()?;
    let gold: Vec<Option<SentLabel>> = (0..g.n_users()).map(|u| g.revealed_label(u)).collect();
    if gold.iter().all(Option::is_none) {
        return Err(Error::insufficient("SampleRank needs at least one revealed user"));
    }
    let n = g.n_users();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut y = Assignment::new(
        (0..n)
            .map(|_| if rng.random::<bool>() { SentLabel::Positive } else { SentLabel::Negative })
            .collect(),
    );
    let mut confusion = Confusion::from_pairs(
        gold.iter()
            .enumerate()
            .filter_map(|(u, g)| g.map(|g| (y[u], g))),
    );
    let mut current = confusion.score()?.combined;
    let mut params = *init;
    let mut trace = vec![current];
    let mut updates = 0;
    let mut last_update = 0;
    let mut steps_run = 0;

    for step in 1..=cfg.steps {
        steps_run = step;
        let u = rng.random_range(0..n);
        // Flipping an unrevealed user leaves performance unchanged: no update, no acceptance.
        let Some(gold_u) = gold[u] else {
            if cfg.convergence_window > 0 && step - last_update >= cfg.convergence_window {
                break;
            }
            continue;
        };
        let mut proposed = confusion;
        proposed.remove(y[u], gold_u);
        proposed.add(y[u].flip(), gold_u);
        let proposed_perf = proposed.score()?.combined;
        let rel_perf = proposed_perf - current;

        let grad = flip_delta(g, &params, tweets, &y, u);
        let llr = grad.score(&params);
        if rel_perf != 0.0 && llr != 0.0 && (rel_perf > 0.0) != (llr > 0.0) {
            let step_size = match cfg.update_rule {
                UpdateRule::SignCorrected => cfg.learning_rate * rel_perf.signum(),
                UpdateRule::PaperLiteral => -cfg.learning_rate,
            };
            params.step(&grad, step_size);
            updates += 1;
            last_update = step;
        }
        if cfg.convergence_window > 0 && step - last_update >= cfg.convergence_window {
            break;
        }
        if rel_perf > 0.0 {
            y.flip(u);
            confusion = proposed;
            current = proposed_perf;
            trace.push(current);
        }
    }

    Ok(SampleRankOutcome {
        params,
        labels: y,
        steps_run,
        updates,
        perf_trace: trace,
    })
}
