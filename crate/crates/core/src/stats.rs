//! Homophily statistics over fully labeled graphs.
//!
//! For directed variants a pair of users counts as connected when at least
//! one of them links to the other, so every statistic here works on
//! unordered pairs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{HeterogeneousGraph, SentLabel};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConnectionStats {
    /// Fraction of connected pairs sharing a label; `None` without any connected pair.
    pub p_same_given_connected: Option<f64>,
    /// Fraction of all unordered user pairs sharing a label.
    pub p_same_random: f64,
    pub n_edges_used: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinkStats {
    pub p_connected_given_same: f64,
    pub p_connected_given_diff: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DegreeStats {
    pub avg_degree: f64,
    pub n_users: usize,
    pub n_edges: usize,
}

fn gold_labels(g: &HeterogeneousGraph) -> Result<Vec<SentLabel>> {
    g.users()
        .iter()
        .map(|u| u.gold_label.ok_or_else(|| Error::MissingGoldLabel(u.id.to_string())))
        .collect()
}

fn choose2(n: usize) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

/// Unordered connected pairs `(i, j)` with `i < j`.
fn connected_pairs(g: &HeterogeneousGraph) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..g.n_users()).flat_map(move |i| {
        g.adjacent_indices(i)
            .iter()
            .filter(move |&&j| j > i)
            .map(move |&j| (i, j))
    })
}

pub fn shared_sentiment_stats(g: &HeterogeneousGraph) -> Result<ConnectionStats> {
    let labels = gold_labels(g)?;
    let n = labels.len();
    if n < 2 {
        return Err(Error::insufficient("need at least two users"));
    }
    let n_pos = labels.iter().filter(|&&l| l == SentLabel::Positive).count();
    let p_same_random = (choose2(n_pos) + choose2(n - n_pos)) / choose2(n);

    let (mut same, mut total) = (0usize, 0usize);
    for (i, j) in connected_pairs(g) {
        total += 1;
        if labels[i] == labels[j] {
            same += 1;
        }
    }
    Ok(ConnectionStats {
        p_same_given_connected: (total > 0).then(|| same as f64 / total as f64),
        p_same_random,
        n_edges_used: total,
    })
}

pub fn link_stats(g: &HeterogeneousGraph) -> Result<LinkStats> {
    let labels = gold_labels(g)?;
    let n = labels.len();
    let n_pos = labels.iter().filter(|&&l| l == SentLabel::Positive).count();
    let same_pairs = choose2(n_pos) + choose2(n - n_pos);
    let diff_pairs = (n_pos * (n - n_pos)) as f64;
    if same_pairs == 0.0 {
        return Err(Error::insufficient("no same-label user pairs"));
    }
    if diff_pairs == 0.0 {
        return Err(Error::insufficient("no different-label user pairs"));
    }
    let (mut conn_same, mut conn_diff) = (0usize, 0usize);
    for (i, j) in connected_pairs(g) {
        if labels[i] == labels[j] {
            conn_same += 1;
        } else {
            conn_diff += 1;
        }
    }
    Ok(LinkStats {
        p_connected_given_same: conn_same as f64 / same_pairs,
        p_connected_given_diff: conn_diff as f64 / diff_pairs,
    })
}

/// Average out-degree for directed variants, average undirected degree for mutual ones.
pub fn degree_stats(g: &HeterogeneousGraph) -> DegreeStats {
    let n = g.n_users();
    let endpoints = if g.variant().is_mutual() {
        2 * g.n_edges()
    } else {
        g.n_edges()
    };
    DegreeStats {
        avg_degree: if n == 0 { 0.0 } else { endpoints as f64 / n as f64 },
        n_users: n,
        n_edges: g.n_edges(),
    }
}

/// One line of the statistics CSV.
#[derive(Clone, Debug, Serialize)]
pub struct StatsRow {
    pub topic: String,
    pub variant: String,
    pub p_same_connected: Option<f64>,
    pub p_same_random: f64,
    pub p_conn_same: f64,
    pub p_conn_diff: f64,
    pub n_edges: usize,
    pub avg_degree: f64,
}

pub const STATS_CSV_HEADER: &str =
    "topic,variant,p_same_connected,p_same_random,p_conn_same,p_conn_diff,n_edges,avg_degree";

impl StatsRow {
    pub fn compute(topic: &str, g: &HeterogeneousGraph) -> Result<Self> {
        let c = shared_sentiment_stats(g)?;
        let l = link_stats(g)?;
        let d = degree_stats(g);
        Ok(StatsRow {
            topic: topic.to_owned(),
            variant: g.variant().to_string(),
            p_same_connected: c.p_same_given_connected,
            p_same_random: c.p_same_random,
            p_conn_same: l.p_connected_given_same,
            p_conn_diff: l.p_connected_given_diff,
            n_edges: d.n_edges,
            avg_degree: d.avg_degree,
        })
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            csv_field(&self.topic),
            self.variant,
            self.p_same_connected.map(|p| p.to_string()).unwrap_or_default(),
            self.p_same_random,
            self.p_conn_same,
            self.p_conn_diff,
            self.n_edges,
            self.avg_degree
        )
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}
