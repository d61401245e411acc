//! Inference over the user-label field.
//!
//! With tweet labels fixed as evidence, the model reduces to a pairwise field
//! over binary user labels: one unary table per user (its tweet factors) and
//! one pairwise table per connected pair (the user-user factors of both
//! directions merged). [`loopy_bp`] runs damped sum-product message passing
//! on that field; [`brute_force_marginals`] enumerates it exactly for small
//! graphs.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{no_learning_estimate, sample_rank, SampleRankConfig};
use crate::graph::{HeterogeneousGraph, SentLabel, UserId};
use crate::model::{Assignment, FactorParams, Matrix2, TweetLabels};
use crate::seed::derive_seeds;
use crate::text::majority_vote;

/// Pairwise log-potential between users `a < b`, indexed `[label of a][label of b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairFactor {
    pub a: usize,
    pub b: usize,
    pub table: Matrix2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseField {
    /// Unary log-potentials `[negative, positive]`; a clamped user carries `-inf` on the other label.
    pub unary: Vec<[f64; 2]>,
    pub pairs: Vec<PairFactor>,
    // (pair index, whether the node is the pair's `a` side)
    incident: Vec<Vec<(usize, bool)>>,
}

impl PairwiseField {
    pub fn new(unary: Vec<[f64; 2]>, pairs: Vec<PairFactor>) -> Result<Self> {
        let n = unary.len();
        let mut incident = vec![Vec::new(); n];
        for (e, p) in pairs.iter().enumerate() {
            if p.a >= p.b || p.b >= n {
                return Err(Error::invalid(format!("bad pair factor ({}, {})", p.a, p.b)));
            }
            incident[p.a].push((e, true));
            incident[p.b].push((e, false));
        }
        for (u, row) in unary.iter().enumerate() {
            if row.iter().any(|x| x.is_nan() || *x == f64::INFINITY) || row.iter().all(|x| x.is_infinite()) {
                return Err(Error::invalid(format!("bad unary potential for node {u}")));
            }
        }
        Ok(PairwiseField {
            unary,
            pairs,
            incident,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.unary.len()
    }

    /// Whether the pair factors form a forest.
    pub fn is_forest(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.n_nodes()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for pf in &self.pairs {
            let (ra, rb) = (find(&mut parent, pf.a), find(&mut parent, pf.b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }

    /// Sum of all log-potentials at a joint assignment.
    pub fn total_log_potential(&self, y: &[SentLabel]) -> f64 {
        let unary: f64 = self.unary.iter().zip(y).map(|(u, l)| u[l.index()]).sum();
        let pair: f64 = self
            .pairs
            .iter()
            .map(|p| p.table[y[p.a].index()][y[p.b].index()])
            .sum();
        unary + pair
    }
}

/// Builds the field for `g` with tweet evidence `tweets`; users with `Some` in `clamped` are fixed.
pub fn build_field(
    g: &HeterogeneousGraph,
    params: &FactorParams,
    tweets: &TweetLabels,
    clamped: &[Option<SentLabel>],
) -> Result<PairwiseField> {
    if clamped.len() != g.n_users() {
        return Err(Error::invalid("clamp vector does not match the graph"));
    }
    let mut unary = vec![[0.0; 2]; g.n_users()];
    for (u, row) in unary.iter_mut().enumerate() {
        let ts = tweets.of(u);
        if !ts.is_empty() {
            let w = params.tweet_weight(g, u) / ts.len() as f64;
            for k in 0..2 {
                row[k] = ts.iter().map(|l| params.mu[k][l.index()] * w).sum();
            }
        }
        if let Some(c) = clamped[u] {
            row[c.flip().index()] = f64::NEG_INFINITY;
        }
    }
    let mut tables: BTreeMap<(usize, usize), Matrix2> = BTreeMap::new();
    for u in 0..g.n_users() {
        let nbrs = g.neighbor_indices(u);
        if nbrs.is_empty() {
            continue;
        }
        let r = params.w_relation / nbrs.len() as f64;
        for &v in nbrs {
            let t = tables.entry((u.min(v), u.max(v))).or_insert([[0.0; 2]; 2]);
            for k in 0..2 {
                for l in 0..2 {
                    let c = params.lambda[k][l] * r;
                    if u < v {
                        t[k][l] += c;
                    } else {
                        t[l][k] += c;
                    }
                }
            }
        }
    }
    let pairs = tables
        .into_iter()
        .map(|((a, b), table)| PairFactor { a, b, table })
        .collect();
    PairwiseField::new(unary, pairs)
}

/// [`build_field`] with clamps given by user id.
pub fn build_pairwise_field(
    g: &HeterogeneousGraph,
    params: &FactorParams,
    tweets: &TweetLabels,
    clamped: &BTreeMap<UserId, SentLabel>,
) -> Result<PairwiseField> {
    let mut clamp = vec![None; g.n_users()];
    for (id, l) in clamped {
        clamp[g.require_index(id)?] = Some(*l);
    }
    build_field(g, params, tweets, &clamp)
}

/// Per-node `[p_negative, p_positive]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Marginals(pub Vec<[f64; 2]>);

impl Marginals {
    pub fn p_positive(&self, u: usize) -> f64 {
        self.0[u][1]
    }

    /// Most probable label; exact ties go to Positive.
    pub fn argmax(&self, u: usize) -> SentLabel {
        if self.0[u][1] >= self.0[u][0] {
            SentLabel::Positive
        } else {
            SentLabel::Negative
        }
    }

    pub fn to_map(&self, g: &HeterogeneousGraph) -> BTreeMap<UserId, (f64, f64)> {
        g.users()
            .iter()
            .zip(&self.0)
            .map(|(u, p)| (u.id.clone(), (p[0], p[1])))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BpConfig {
    pub max_iterations: usize,
    /// Weight of the previous message in each update.
    pub damping: f64,
    pub tolerance: f64,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig {
            max_iterations: 100,
            damping: 0.5,
            tolerance: 1e-6,
        }
    }
}

impl BpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::invalid("BP needs at least one iteration"));
        }
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::invalid("BP damping must lie in [0, 1)"));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::invalid("BP tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BpResult {
    pub marginals: Marginals,
    pub converged: bool,
    pub iterations: usize,
    /// Largest absolute message change of each iteration.
    pub deltas: Vec<f64>,
}

fn log_sum_exp2(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn normalize_log(x: [f64; 2]) -> [f64; 2] {
    let z = log_sum_exp2(x[0], x[1]);
    [(x[0] - z).exp(), (x[1] - z).exp()]
}

/// Synchronous damped sum-product belief propagation.
///
/// Messages are probability vectors, renormalized after every update. The
/// run stops when the largest message change falls below the tolerance or
/// after `max_iterations`; a non-converged run still returns its current beliefs.
pub fn loopy_bp(field: &PairwiseField, cfg: &BpConfig) -> Result<BpResult> {
    cfg.validate()?;
    let n = field.n_nodes();
    // msgs[e][0]: a -> b over b's label; msgs[e][1]: b -> a over a's label.
    let mut msgs = vec![[[0.5f64; 2]; 2]; field.pairs.len()];
    let mut next = msgs.clone();
    let mut deltas = Vec::new();
    let mut converged = false;

    let cavity_sums = |msgs: &[[[f64; 2]; 2]]| -> Vec<[f64; 2]> {
        (0..n)
            .map(|u| {
                let mut s = field.unary[u];
                for &(e, is_a) in &field.incident[u] {
                    let m = msgs[e][if is_a { 1 } else { 0 }];
                    s[0] += m[0].ln();
                    s[1] += m[1].ln();
                }
                s
            })
            .collect()
    };

    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let sums = cavity_sums(&msgs);
        let mut delta: f64 = 0.0;
        for (e, pf) in field.pairs.iter().enumerate() {
            for dir in 0..2 {
                // dir 0: a -> b, dir 1: b -> a
                let (src, incoming) = if dir == 0 { (pf.a, msgs[e][1]) } else { (pf.b, msgs[e][0]) };
                let mut out = [0.0; 2];
                for (l, o) in out.iter_mut().enumerate() {
                    let term = |k: usize| {
                        let t = if dir == 0 { pf.table[k][l] } else { pf.table[l][k] };
                        sums[src][k] - incoming[k].ln() + t
                    };
                    *o = log_sum_exp2(term(0), term(1));
                }
                let fresh = normalize_log(out);
                let old = msgs[e][dir];
                let mut damped = [
                    (1.0 - cfg.damping) * fresh[0] + cfg.damping * old[0],
                    (1.0 - cfg.damping) * fresh[1] + cfg.damping * old[1],
                ];
                let z = damped[0] + damped[1];
                damped[0] /= z;
                damped[1] /= z;
                delta = delta.max((damped[0] - old[0]).abs()).max((damped[1] - old[1]).abs());
                next[e][dir] = damped;
            }
        }
        std::mem::swap(&mut msgs, &mut next);
        deltas.push(delta);
        if delta < cfg.tolerance {
            converged = true;
            break;
        }
    }

    let beliefs = cavity_sums(&msgs).into_iter().map(normalize_log).collect();
    Ok(BpResult {
        marginals: Marginals(beliefs),
        converged,
        iterations,
        deltas,
    })
}

pub const MAX_ENUMERATION_NODES: usize = 20;

/// Exact marginals and log partition function by enumerating all `2^n` joint states.
pub fn brute_force_marginals(field: &PairwiseField) -> Result<(Marginals, f64)> {
    let n = field.n_nodes();
    if n > MAX_ENUMERATION_NODES {
        return Err(Error::invalid(format!(
            "enumeration limited to {MAX_ENUMERATION_NODES} nodes, field has {n}"
        )));
    }
    let states = 1u64 << n;
    let potentials: Vec<f64> = (0..states)
        .map(|bits| field.total_log_potential(Assignment::from_bits(n, bits).labels()))
        .collect();
    let max = potentials.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    let mut pos_mass = vec![0.0; n];
    for (bits, lp) in potentials.iter().enumerate() {
        let w = (lp - max).exp();
        z += w;
        for (u, m) in pos_mass.iter_mut().enumerate() {
            if (bits >> u) & 1 == 1 {
                *m += w;
            }
        }
    }
    let marginals = pos_mass
        .into_iter()
        .map(|m| {
            let p = m / z;
            [1.0 - p, p]
        })
        .collect();
    Ok((Marginals(marginals), max + z.ln()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictConfig {
    pub n_repeats: usize,
    /// Run SampleRank before inference; otherwise use NoLearning parameters directly.
    pub learn: bool,
    /// One seed per repeat.
    pub seeds: Vec<u64>,
    pub sample_rank: SampleRankConfig,
    pub bp: BpConfig,
    /// Clamp revealed users during inference instead of relying on their tweet evidence.
    pub clamp_revealed: bool,
}

impl PredictConfig {
    pub const DEFAULT_REPEATS: usize = 5;

    /// Default settings with `n_repeats` seeds derived from `seed`.
    pub fn seeded(seed: u64, learn: bool) -> Self {
        PredictConfig {
            n_repeats: Self::DEFAULT_REPEATS,
            learn,
            seeds: derive_seeds(seed, Self::DEFAULT_REPEATS),
            sample_rank: SampleRankConfig::default(),
            bp: BpConfig::default(),
            clamp_revealed: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepeatOutcome {
    pub params: FactorParams,
    pub labels: Assignment,
    pub bp_converged: bool,
    pub bp_iterations: usize,
    pub bp_deltas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    /// Majority label over repeats for every user; revealed users keep their labels when clamped.
    pub labels: Assignment,
    pub repeats: Vec<RepeatOutcome>,
}

fn infer_once(
    g: &HeterogeneousGraph,
    tweets: &TweetLabels,
    params: FactorParams,
    cfg: &PredictConfig,
) -> Result<RepeatOutcome> {
    let clamp: Vec<Option<SentLabel>> = if cfg.clamp_revealed {
        (0..g.n_users()).map(|u| g.revealed_label(u)).collect()
    } else {
        vec![None; g.n_users()]
    };
    let field = build_field(g, &params, tweets, &clamp)?;
    let bp = loopy_bp(&field, &cfg.bp)?;
    let labels = Assignment::new((0..g.n_users()).map(|u| bp.marginals.argmax(u)).collect());
    Ok(RepeatOutcome {
        params,
        labels,
        bp_converged: bp.converged,
        bp_iterations: bp.iterations,
        bp_deltas: bp.deltas,
    })
}

/// Learning-then-inference `n_repeats` times, followed by a per-user majority vote.
pub fn predict(g: &HeterogeneousGraph, tweets: &TweetLabels, cfg: &PredictConfig) -> Result<Prediction> {
    if cfg.n_repeats == 0 || cfg.n_repeats.is_multiple_of(2) {
        return Err(Error::invalid(format!("repeat count must be odd, got {}", cfg.n_repeats)));
    }
    if cfg.seeds.len() != cfg.n_repeats {
        return Err(Error::invalid(format!(
            "expected {} seeds, got {}",
            cfg.n_repeats,
            cfg.seeds.len()
        )));
    }
    let init = no_learning_estimate(g).params;
    let repeats: Vec<RepeatOutcome> = if cfg.learn {
        cfg.seeds
            .par_iter()
            .map(|&seed| {
                let sr = SampleRankConfig { seed, ..cfg.sample_rank };
                let learned = sample_rank(g, tweets, &sr, &init)?;
                infer_once(g, tweets, learned.params, cfg)
            })
            .collect::<Result<_>>()?
    } else {
        let once = infer_once(g, tweets, init, cfg)?;
        vec![once; cfg.n_repeats]
    };
    let labels = Assignment::new(
        (0..g.n_users())
            .map(|u| majority_vote(repeats.iter().map(|r| r.labels[u])))
            .collect(),
    );
    Ok(Prediction { labels, repeats })
}

pub const BP_TRACE_CSV_HEADER: &str = "run,repeat,iteration,max_delta,converged";

/// Diagnostics rows for one prediction, tagged with `run`.
pub fn bp_trace_rows(run: usize, p: &Prediction) -> Vec<String> {
    p.repeats
        .iter()
        .enumerate()
        .flat_map(|(r, rep)| {
            rep.bp_deltas.iter().enumerate().map(move |(i, d)| {
                format!("{run},{r},{},{d},{}", i + 1, rep.bp_converged)
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeKind, GraphVariant, RawEdge, Tweet, User};
    use crate::model::{log_score, IDENTITY};
    use SentLabel::{Negative as N, Positive as P};

    fn field(unary: Vec<[f64; 2]>, pairs: &[(usize, usize, Matrix2)]) -> PairwiseField {
        PairwiseField::new(
            unary,
            pairs.iter().map(|&(a, b, table)| PairFactor { a, b, table }).collect(),
        )
        .unwrap()
    }

    fn tight() -> BpConfig {
        BpConfig {
            max_iterations: 5000,
            damping: 0.5,
            tolerance: 1e-14,
        }
    }

    fn close(a: &Marginals, b: &Marginals, tol: f64) -> bool {
        a.0.iter().zip(&b.0).all(|(x, y)| (x[1] - y[1]).abs() <= tol && (x[0] - y[0]).abs() <= tol)
    }

    #[test]
    fn isolated_node_is_softmax() {
        let f = field(vec![[0.2, 1.1]], &[]);
        let bp = loopy_bp(&f, &BpConfig::default()).unwrap();
        let e = (1.1f64 - 0.2).exp();
        assert!((bp.marginals.p_positive(0) - e / (1.0 + e)).abs() < 1e-15);
        assert!(bp.converged);
    }

    #[test]
    fn chain_is_exact() {
        let t: Matrix2 = [[0.9, -0.2], [0.1, 0.7]];
        let f = field(vec![[0.3, 0.0], [0.0, 0.5], [-0.4, 0.2]], &[(0, 1, t), (1, 2, t)]);
        let bp = loopy_bp(&f, &tight()).unwrap();
        let (exact, _) = brute_force_marginals(&f).unwrap();
        assert!(close(&bp.marginals, &exact, 1e-9), "{:?} vs {:?}", bp.marginals, exact);
    }

    #[test]
    fn four_cycle_is_close_at_default_damping() {
        let t: Matrix2 = [[0.6, 0.0], [0.0, 0.6]];
        let f = field(
            vec![[0.0, 0.125], [0.1, 0.0], [0.0, 0.0], [0.05, 0.0]],
            &[(0, 1, t), (1, 2, t), (2, 3, t), (0, 3, t)],
        );
        let bp = loopy_bp(&f, &BpConfig::default()).unwrap();
        let (exact, _) = brute_force_marginals(&f).unwrap();
        assert!(close(&bp.marginals, &exact, 1e-3));
    }

    #[test]
    fn uniform_field_partition() {
        let f = field(vec![[0.3, 0.3]; 3], &[(0, 1, [[0.0; 2]; 2])]);
        let (m, log_z) = brute_force_marginals(&f).unwrap();
        assert!(m.0.iter().all(|p| (p[1] - 0.5).abs() < 1e-15));
        assert!((log_z - (3.0 * 2f64.ln() + 0.9)).abs() < 1e-12);
    }

    #[test]
    fn clamped_node_is_a_delta() {
        let f = field(vec![[f64::NEG_INFINITY, 0.0], [0.0, 0.0]], &[(0, 1, IDENTITY)]);
        let (m, _) = brute_force_marginals(&f).unwrap();
        assert_eq!(m.0[0], [0.0, 1.0]);
        let bp = loopy_bp(&f, &BpConfig::default()).unwrap();
        assert_eq!(bp.marginals.0[0], [0.0, 1.0]);
        assert!(bp.marginals.p_positive(1) > 0.5);
    }

    #[test]
    fn enumeration_limit() {
        let f = field(vec![[0.0; 2]; MAX_ENUMERATION_NODES + 1], &[]);
        assert!(brute_force_marginals(&f).is_err());
    }

    #[test]
    fn forest_detection() {
        let t = [[0.0; 2]; 2];
        assert!(field(vec![[0.0; 2]; 3], &[(0, 1, t), (1, 2, t)]).is_forest());
        assert!(!field(vec![[0.0; 2]; 3], &[(0, 1, t), (1, 2, t), (0, 2, t)]).is_forest());
    }

    fn small_graph(variant: GraphVariant, revealed: &[usize]) -> HeterogeneousGraph {
        let mut users: Vec<User> = (0..4).map(|i| User::new(format!("u{i}"), Some(P))).collect();
        for &r in revealed {
            users[r].revealed = true;
        }
        let tweets: Vec<Tweet> = (0..4)
            .flat_map(|i| (0..=i % 2).map(move |t| Tweet::new(format!("t{i}{t}"), format!("u{i}"), "x")))
            .collect();
        let edges: Vec<RawEdge> = [(0, 1), (1, 0), (1, 2), (2, 3), (3, 1), (0, 3)]
            .iter()
            .map(|(s, d)| RawEdge::new(format!("u{s}"), format!("u{d}"), EdgeKind::Follow))
            .collect();
        HeterogeneousGraph::build(&users, &tweets, &edges, variant).unwrap()
    }

    #[test]
    fn unary_for_unrevealed_user_with_two_positive_tweets() {
        let g = small_graph(GraphVariant::DirectedFollow, &[]);
        // u1 has two tweets.
        let tl = TweetLabels::observed(&g, |_| P);
        let f = build_field(&g, &FactorParams::new(IDENTITY, IDENTITY), &tl, &[None; 4]).unwrap();
        assert_eq!(f.unary[1], [0.0, 0.125]);
    }

    #[test]
    fn mutual_pair_table_merges_both_directions() {
        let users: Vec<User> = (0..2).map(|i| User::new(format!("u{i}"), None)).collect();
        let tweets = vec![Tweet::new("a", "u0", "x"), Tweet::new("b", "u1", "x")];
        let edges = vec![
            RawEdge::new("u0", "u1", EdgeKind::Follow),
            RawEdge::new("u1", "u0", EdgeKind::Follow),
        ];
        let g = HeterogeneousGraph::build(&users, &tweets, &edges, GraphVariant::MutualFollow).unwrap();
        let lambda = [[0.9, 0.3], [0.1, 0.5]];
        let p = FactorParams::new(IDENTITY, lambda);
        let tl = TweetLabels::observed(&g, |_| N);
        let f = build_field(&g, &p, &tl, &[None, None]).unwrap();
        assert_eq!(f.pairs.len(), 1);
        for k in 0..2 {
            for l in 0..2 {
                let expect = lambda[k][l] * 0.6 + lambda[l][k] * 0.6;
                assert!((f.pairs[0].table[k][l] - expect).abs() < 1e-15);
            }
        }
        let offsets: Vec<f64> = (0..4u64)
            .map(|bits| {
                let y = Assignment::from_bits(2, bits);
                f.total_log_potential(y.labels()) - log_score(&g, &p, &tl, &y)
            })
            .collect();
        assert!(offsets.iter().all(|o| o.abs() < 1e-12));
    }

    #[test]
    fn clamping_by_id() {
        let g = small_graph(GraphVariant::DirectedFollow, &[]);
        let tl = TweetLabels::observed(&g, |_| P);
        let clamp: BTreeMap<UserId, SentLabel> = [("u2".into(), N)].into_iter().collect();
        let f = build_pairwise_field(&g, &FactorParams::new(IDENTITY, IDENTITY), &tl, &clamp).unwrap();
        let bp = loopy_bp(&f, &BpConfig::default()).unwrap();
        assert_eq!(bp.marginals.0[2], [1.0, 0.0]);
        let bad: BTreeMap<UserId, SentLabel> = [("zz".into(), N)].into_iter().collect();
        assert!(build_pairwise_field(&g, &FactorParams::zeros(), &tl, &bad).is_err());
    }

    #[test]
    fn predict_without_learning_repeats_identically() {
        let g = small_graph(GraphVariant::DirectedFollow, &[0, 2]);
        let tl = TweetLabels::observed(&g, |_| N);
        let cfg = PredictConfig::seeded(1, false);
        let p = predict(&g, &tl, &cfg).unwrap();
        assert_eq!(p.repeats.len(), 5);
        assert!(p.repeats.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(p.labels, p.repeats[0].labels);
        assert_eq!(p.labels[0], P);
    }

    #[test]
    fn predict_rejects_even_repeats() {
        let g = small_graph(GraphVariant::DirectedFollow, &[0]);
        let tl = TweetLabels::observed(&g, |_| N);
        let mut cfg = PredictConfig::seeded(1, false);
        cfg.n_repeats = 4;
        cfg.seeds.truncate(4);
        assert!(predict(&g, &tl, &cfg).is_err());
    }

    #[test]
    fn predict_with_learning_is_deterministic() {
        let g = small_graph(GraphVariant::MutualFollow, &[0, 1]);
        let tl = TweetLabels::observed(&g, |_| N);
        let cfg = PredictConfig::seeded(11, true);
        assert_eq!(predict(&g, &tl, &cfg).unwrap(), predict(&g, &tl, &cfg).unwrap());
    }
}
