//! Experiment protocol: seeded splits, repeated runs, metrics and significance.

mod component;
mod dot;
mod ttest;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use component::{component_accuracy, largest_component};
pub use dot::{export_dot, to_dot};
pub use ttest::{paired_t_test, student_t_upper_tail, PairedTTest};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::estimation::{perf_on, SampleRankConfig};
use crate::graph::{GraphVariant, HeterogeneousGraph, SentLabel, UserId};
use crate::inference::{predict, BpConfig, PredictConfig, Prediction};
use crate::model::{Assignment, TweetLabels};
use crate::seed::derive_seeds;
use crate::text::{revealed_training_set, svm_vote_index, tokenize, train_classifier, LinearModel, TrainConfig};

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SvmVote,
    HgmNoLearning,
    HgmLearning,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::SvmVote, Method::HgmNoLearning, Method::HgmLearning];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::SvmVote => "svm-vote",
            Method::HgmNoLearning => "hgm-no-learning",
            Method::HgmLearning => "hgm-learning",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub variant: GraphVariant,
    pub method: Method,
    pub n_runs: usize,
    pub train_per_class: usize,
    /// One seed per run.
    pub seeds: Vec<u64>,
    pub topic_keyword: String,
    pub text: TrainConfig,
    /// Learning/inference repetitions per run for the HGM methods.
    pub repeats: usize,
    pub sample_rank: SampleRankConfig,
    pub bp: BpConfig,
    pub clamp_revealed: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig::seeded(0, 10)
    }
}

impl ExperimentConfig {
    /// Default settings with `n_runs` run seeds derived from `seed`.
    pub fn seeded(seed: u64, n_runs: usize) -> Self {
        ExperimentConfig {
            variant: GraphVariant::DirectedFollow,
            method: Method::HgmLearning,
            n_runs,
            train_per_class: 50,
            seeds: derive_seeds(seed, n_runs),
            topic_keyword: "obama".to_string(),
            text: TrainConfig::default(),
            repeats: PredictConfig::DEFAULT_REPEATS,
            sample_rank: SampleRankConfig::default(),
            bp: BpConfig::default(),
            clamp_revealed: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs < 2 {
            return Err(Error::invalid("n_runs must be at least 2 for significance testing"));
        }
        if self.seeds.len() != self.n_runs {
            return Err(Error::invalid(format!(
                "expected {} run seeds, got {}",
                self.n_runs,
                self.seeds.len()
            )));
        }
        if self.train_per_class == 0 {
            return Err(Error::invalid("train_per_class must be at least 1"));
        }
        if self.repeats == 0 || self.repeats.is_multiple_of(2) {
            return Err(Error::invalid(format!("repeats must be odd, got {}", self.repeats)));
        }
        if self.topic_keyword.trim().is_empty() {
            return Err(Error::invalid("empty topic keyword"));
        }
        self.sample_rank.validate()?;
        self.bp.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub n: usize,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Summary {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            median: quantile(&v, 0.5),
            q25: quantile(&v, 0.25),
            q75: quantile(&v, 0.75),
            n: v.len(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub n_revealed: usize,
    pub n_eval: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
    /// Absent when no evaluation user lies in the largest component.
    pub component_accuracy: Option<f64>,
    pub baseline_accuracy: f64,
    pub baseline_macro_f1: f64,
    pub baseline_component_accuracy: Option<f64>,
    /// Whether BP converged in every repeat; absent for the text-only method.
    pub bp_converged: Option<bool>,
}

/// Per-run artifacts that do not go into the JSON report.
#[derive(Clone, Debug)]
pub struct RunDetail {
    pub graph: HeterogeneousGraph,
    pub eval: Vec<usize>,
    pub labels: Assignment,
    pub prediction: Option<Prediction>,
}

impl RunDetail {
    pub fn label_map(&self) -> BTreeMap<UserId, SentLabel> {
        self.labels.to_map(&self.graph)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Significance {
    pub t: f64,
    pub p: f64,
    pub significant: bool,
}

impl From<PairedTTest> for Significance {
    fn from(r: PairedTTest) -> Self {
        Significance {
            t: r.t,
            p: r.p,
            significant: r.significant(SIGNIFICANCE_LEVEL),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Aggregates {
    pub accuracy: Summary,
    pub macro_f1: Summary,
    pub component_accuracy: Option<Summary>,
}

impl Aggregates {
    fn of(acc: &[f64], f1: &[f64], comp: &[Option<f64>]) -> Aggregates {
        let comp: Vec<f64> = comp.iter().flatten().copied().collect();
        Aggregates {
            accuracy: Summary::of(acc).expect("at least two runs"),
            macro_f1: Summary::of(f1).expect("at least two runs"),
            component_accuracy: Summary::of(&comp),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub n_users: usize,
    pub n_edges: usize,
    pub runs: Vec<RunRecord>,
    pub summary: Aggregates,
    /// The SvmVote baseline on the same splits.
    pub baseline: Aggregates,
    /// One-sided paired tests of the configured method against the baseline.
    pub accuracy_vs_baseline: Significance,
    pub macro_f1_vs_baseline: Significance,
    #[serde(skip)]
    pub details: Vec<RunDetail>,
}

pub const RUNS_CSV_HEADER: &str = "run,seed,method,variant,n_revealed,n_eval,accuracy,macro_f1,component_accuracy,\
baseline_accuracy,baseline_macro_f1,baseline_component_accuracy,bp_converged";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn runs_csv(&self) -> String {
        let mut out = String::from(RUNS_CSV_HEADER);
        out.push('\n');
        for r in &self.runs {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.run,
                r.seed,
                self.config.method,
                self.config.variant,
                r.n_revealed,
                r.n_eval,
                r.accuracy,
                r.macro_f1,
                opt(r.component_accuracy),
                r.baseline_accuracy,
                r.baseline_macro_f1,
                opt(r.baseline_component_accuracy),
                opt(r.bp_converged),
            ));
        }
        out
    }
}

/// Revealed ids for one run: `per_class` users of each class drawn from the gold users.
fn sample_revealed(g: &HeterogeneousGraph, per_class: usize, seed: u64) -> Result<BTreeSet<UserId>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut revealed = BTreeSet::new();
    let mut n_gold = 0;
    for class in SentLabel::ALL {
        let mut pool: Vec<&UserId> = g
            .users()
            .iter()
            .filter(|u| u.gold_label == Some(class))
            .map(|u| &u.id)
            .collect();
        n_gold += pool.len();
        if pool.len() < per_class {
            return Err(Error::insufficient(format!(
                "{} gold users of class {class:?}, need {per_class}",
                pool.len()
            )));
        }
        pool.shuffle(&mut rng);
        revealed.extend(pool.into_iter().take(per_class).cloned());
    }
    if n_gold == revealed.len() {
        return Err(Error::insufficient("no gold users left for evaluation"));
    }
    Ok(revealed)
}

struct RunOutcome {
    record: RunRecord,
    detail: RunDetail,
}

fn run_once(base: &HeterogeneousGraph, cfg: &ExperimentConfig, run: usize, in_component: &[bool]) -> Result<RunOutcome> {
    let seed = cfg.seeds[run];
    let [split_seed, text_seed, predict_seed]: [u64; 3] = derive_seeds(seed, 3).try_into().expect("three seeds");
    let revealed = sample_revealed(base, cfg.train_per_class, split_seed)?;
    let g = base.with_revealed(&revealed)?;
    let eval: Vec<usize> = (0..g.n_users())
        .filter(|&u| g.user(u).gold_label.is_some() && !g.is_revealed(u))
        .collect();

    let text_cfg = TrainConfig { seed: text_seed, ..cfg.text };
    let model: LinearModel = train_classifier(&revealed_training_set(&g), &text_cfg)?;
    let baseline = Assignment::new(
        (0..g.n_users())
            .map(|u| svm_vote_index(&g, &model, u))
            .collect::<Result<_>>()?,
    );

    let (labels, prediction) = match cfg.method {
        Method::SvmVote => (baseline.clone(), None),
        Method::HgmNoLearning | Method::HgmLearning => {
            let tweets = TweetLabels::observed(&g, |t| model.classify(&tokenize(&t.text)));
            let pcfg = PredictConfig {
                n_repeats: cfg.repeats,
                learn: cfg.method == Method::HgmLearning,
                seeds: derive_seeds(predict_seed, cfg.repeats),
                sample_rank: cfg.sample_rank,
                bp: cfg.bp,
                clamp_revealed: cfg.clamp_revealed,
            };
            let p = predict(&g, &tweets, &pcfg)?;
            (p.labels.clone(), Some(p))
        }
    };

    let score = perf_on(&g, &labels, &eval)?;
    let base_score = perf_on(&g, &baseline, &eval)?;
    let comp = |y: &Assignment| component::component_accuracy_with(&g, in_component, y.labels(), &eval).ok();
    let record = RunRecord {
        run,
        seed,
        n_revealed: revealed.len(),
        n_eval: eval.len(),
        accuracy: score.accuracy,
        macro_f1: score.macro_f1,
        component_accuracy: comp(&labels),
        baseline_accuracy: base_score.accuracy,
        baseline_macro_f1: base_score.macro_f1,
        baseline_component_accuracy: comp(&baseline),
        bp_converged: prediction.as_ref().map(|p| p.repeats.iter().all(|r| r.bp_converged)),
    };
    Ok(RunOutcome {
        record,
        detail: RunDetail {
            graph: g,
            eval,
            labels,
            prediction,
        },
    })
}

/// Runs the configured method on a prebuilt topic graph.
pub fn run_on_graph(g: &HeterogeneousGraph, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    if g.variant() != cfg.variant {
        return Err(Error::invalid(format!(
            "graph variant {} does not match configured {}",
            g.variant(),
            cfg.variant
        )));
    }
    let in_component = largest_component(g);
    let outcomes: Vec<RunOutcome> = (0..cfg.n_runs)
        .into_par_iter()
        .map(|run| run_once(g, cfg, run, &in_component))
        .collect::<Result<_>>()?;

    let (runs, details): (Vec<RunRecord>, Vec<RunDetail>) =
        outcomes.into_iter().map(|o| (o.record, o.detail)).unzip();
    let col = |f: fn(&RunRecord) -> f64| runs.iter().map(f).collect::<Vec<f64>>();
    let acc = col(|r| r.accuracy);
    let f1 = col(|r| r.macro_f1);
    let base_acc = col(|r| r.baseline_accuracy);
    let base_f1 = col(|r| r.baseline_macro_f1);
    let comp: Vec<Option<f64>> = runs.iter().map(|r| r.component_accuracy).collect();
    let base_comp: Vec<Option<f64>> = runs.iter().map(|r| r.baseline_component_accuracy).collect();

    Ok(ExperimentReport {
        config: cfg.clone(),
        n_users: g.n_users(),
        n_edges: g.n_edges(),
        summary: Aggregates::of(&acc, &f1, &comp),
        baseline: Aggregates::of(&base_acc, &base_f1, &base_comp),
        accuracy_vs_baseline: paired_t_test(&acc, &base_acc)?.into(),
        macro_f1_vs_baseline: paired_t_test(&f1, &base_f1)?.into(),
        runs,
        details,
    })
}

/// Builds the topic graph from `dataset` and runs the configured experiment.
pub fn run_experiment(dataset: &Dataset, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let g = dataset.topic_graph(&cfg.topic_keyword, cfg.variant)?;
    run_on_graph(&g, cfg)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalePoint {
    pub n_unlabeled: usize,
    pub report: ExperimentReport,
}

pub const SCALE_CSV_HEADER: &str = "n_unlabeled,method,n_users,n_edges,mean_accuracy,mean_component_accuracy,\
mean_baseline_component_accuracy";

pub fn scale_csv(points: &[ScalePoint]) -> String {
    let mut out = String::from(SCALE_CSV_HEADER);
    out.push('\n');
    for p in points {
        let r = &p.report;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.n_unlabeled,
            r.config.method,
            r.n_users,
            r.n_edges,
            r.summary.accuracy.mean,
            opt(r.summary.component_accuracy.map(|s| s.mean)),
            opt(r.baseline.component_accuracy.map(|s| s.mean)),
        ));
    }
    out
}

/// Reruns the experiment with growing numbers of unlabeled pool users.
///
/// The pool is every user without a gold label, in id order; for a count `k`
/// the first `k` pool users and their edges join the labeled users.
pub fn scale_unlabeled(dataset: &Dataset, cfg: &ExperimentConfig, counts: &[usize]) -> Result<Vec<ScalePoint>> {
    cfg.validate()?;
    let mut pool: Vec<&UserId> = dataset
        .users
        .iter()
        .filter(|u| u.gold_label.is_none())
        .map(|u| &u.id)
        .collect();
    pool.sort();
    counts
        .iter()
        .map(|&k| {
            if k > pool.len() {
                return Err(Error::insufficient(format!(
                    "requested {k} unlabeled users, pool holds {}",
                    pool.len()
                )));
            }
            let chosen: BTreeSet<&UserId> = pool[..k].iter().copied().collect();
            let subset = dataset.retain_users(|u| u.gold_label.is_some() || chosen.contains(&u.id));
            Ok(ScalePoint {
                n_unlabeled: k,
                report: run_experiment(&subset, cfg)?,
            })
        })
        .collect()
}
