//! Users, tweets and the topic-specific heterogeneous graph.
//!
//! A [`HeterogeneousGraph`] joins every user to the list of their on-topic
//! tweets and to other users through one of four connection semantics
//! ([`GraphVariant`]). Users are stored in sorted-id order and addressed by
//! dense indices; every iteration over users, tweets or neighbors is
//! deterministic.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(String);

impl UserId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for UserId {
    fn from(s: &str) -> Self {
        UserId(s.to_owned())
    }
}

impl From<String> for UserId {
    fn from(s: String) -> Self {
        UserId(s)
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Binary sentiment polarity. The integer codes (0 and 1) index the
/// parameter matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SentLabel {
    #[serde(rename = "neg")]
    Negative = 0,
    #[serde(rename = "pos")]
    Positive = 1,
}

impl SentLabel {
    pub const ALL: [SentLabel; 2] = [SentLabel::Negative, SentLabel::Positive];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            SentLabel::Negative
        } else {
            SentLabel::Positive
        }
    }

    #[inline]
    pub fn flip(self) -> Self {
        match self {
            SentLabel::Negative => SentLabel::Positive,
            SentLabel::Positive => SentLabel::Negative,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SentLabel::Negative => "neg",
            SentLabel::Positive => "pos",
        }
    }
}

impl fmt::Display for SentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SentLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pos" | "positive" | "1" => Ok(SentLabel::Positive),
            "neg" | "negative" | "0" => Ok(SentLabel::Negative),
            other => Err(Error::invalid(format!("unknown label `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct User {
    pub id: UserId,
    pub gold_label: Option<SentLabel>,
    /// Whether the gold label is disclosed to the algorithms as training data.
    pub revealed: bool,
}

impl User {
    pub fn new(id: impl Into<UserId>, gold_label: Option<SentLabel>) -> Self {
        User {
            id: id.into(),
            gold_label,
            revealed: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    #[serde(rename = "user")]
    pub author: UserId,
    pub text: String,
}

impl Tweet {
    pub fn new(id: impl Into<String>, author: impl Into<UserId>, text: impl Into<String>) -> Self {
        Tweet {
            id: id.into(),
            author: author.into(),
            text: text.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Follow,
    Mention,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Follow => "follow",
            EdgeKind::Mention => "mention",
        }
    }
}

impl FromStr for EdgeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "follow" => Ok(EdgeKind::Follow),
            "mention" => Ok(EdgeKind::Mention),
            other => Err(Error::invalid(format!("unknown edge kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RawEdge {
    pub src: UserId,
    pub dst: UserId,
    pub kind: EdgeKind,
}

impl RawEdge {
    pub fn new(src: impl Into<UserId>, dst: impl Into<UserId>, kind: EdgeKind) -> Self {
        RawEdge {
            src: src.into(),
            dst: dst.into(),
            kind,
        }
    }
}

/// Which raw edges become user-user edges, and whether reciprocation is required.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphVariant {
    DirectedFollow,
    MutualFollow,
    DirectedAt,
    MutualAt,
}

impl GraphVariant {
    pub const ALL: [GraphVariant; 4] = [
        GraphVariant::DirectedFollow,
        GraphVariant::MutualFollow,
        GraphVariant::DirectedAt,
        GraphVariant::MutualAt,
    ];

    pub fn is_mutual(self) -> bool {
        matches!(self, GraphVariant::MutualFollow | GraphVariant::MutualAt)
    }

    pub fn edge_kind(self) -> EdgeKind {
        match self {
            GraphVariant::DirectedFollow | GraphVariant::MutualFollow => EdgeKind::Follow,
            GraphVariant::DirectedAt | GraphVariant::MutualAt => EdgeKind::Mention,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GraphVariant::DirectedFollow => "directed-follow",
            GraphVariant::MutualFollow => "mutual-follow",
            GraphVariant::DirectedAt => "directed-at",
            GraphVariant::MutualAt => "mutual-at",
        }
    }
}

impl fmt::Display for GraphVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GraphVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GraphVariant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown graph variant `{s}`")))
    }
}

/// Keeps the tweets whose text contains `keyword`, ignoring case.
pub fn filter_on_topic(tweets: &[Tweet], keyword: &str) -> Vec<Tweet> {
    let needle = keyword.to_lowercase();
    tweets
        .iter()
        .filter(|t| t.text.to_lowercase().contains(&needle))
        .cloned()
        .collect()
}

#[derive(Clone, Debug)]
pub struct HeterogeneousGraph {
    variant: GraphVariant,
    users: Vec<User>,
    index: HashMap<UserId, usize>,
    tweets: Vec<Vec<Tweet>>,
    // Out-neighbors for directed variants, all adjacent users for mutual ones.
    neighbors: Vec<Vec<usize>>,
    // Users that list this one among their neighbors.
    in_neighbors: Vec<Vec<usize>>,
    // Either-direction adjacency.
    adjacent: Vec<Vec<usize>>,
    // (src, dst) for directed variants; (lo, hi) once per pair for mutual ones.
    edges: Vec<(usize, usize)>,
}

impl HeterogeneousGraph {
    /// Builds the graph for `variant`.
    ///
    /// Users without tweets are dropped together with their incident edges.
    /// Duplicate raw edges collapse to one.
    pub fn build(
        users: &[User],
        tweets: &[Tweet],
        raw_edges: &[RawEdge],
        variant: GraphVariant,
    ) -> Result<Self> {
        let mut all: HashMap<&UserId, &User> = HashMap::with_capacity(users.len());
        for u in users {
            if u.id.as_str().is_empty() {
                return Err(Error::invalid("empty user id"));
            }
            if u.revealed && u.gold_label.is_none() {
                return Err(Error::MissingGoldLabel(u.id.to_string()));
            }
            if all.insert(&u.id, u).is_some() {
                return Err(Error::DuplicateUser(u.id.to_string()));
            }
        }

        let mut by_author: HashMap<&UserId, Vec<&Tweet>> = HashMap::new();
        for t in tweets {
            if !all.contains_key(&t.author) {
                return Err(Error::UnknownUser(t.author.to_string()));
            }
            by_author.entry(&t.author).or_default().push(t);
        }

        let mut kept: Vec<User> = users
            .iter()
            .filter(|u| by_author.contains_key(&u.id))
            .cloned()
            .collect();
        kept.sort_by(|a, b| a.id.cmp(&b.id));
        let index: HashMap<UserId, usize> = kept
            .iter()
            .enumerate()
            .map(|(i, u)| (u.id.clone(), i))
            .collect();
        let tweets: Vec<Vec<Tweet>> = kept
            .iter()
            .map(|u| {
                let mut ts: Vec<Tweet> = by_author[&u.id].iter().map(|t| (*t).clone()).collect();
                ts.sort_by(|a, b| a.id.cmp(&b.id));
                ts
            })
            .collect();

        let mut directed = BTreeSet::new();
        for e in raw_edges {
            for end in [&e.src, &e.dst] {
                if !all.contains_key(end) {
                    return Err(Error::UnknownUser(end.to_string()));
                }
            }
            if e.src == e.dst {
                return Err(Error::invalid(format!("self-loop on user `{}`", e.src)));
            }
            if e.kind != variant.edge_kind() {
                continue;
            }
            if let (Some(&s), Some(&d)) = (index.get(&e.src), index.get(&e.dst)) {
                directed.insert((s, d));
            }
        }

        let n = kept.len();
        let mut neighbors = vec![Vec::new(); n];
        let mut in_neighbors = vec![Vec::new(); n];
        let mut adjacent = vec![Vec::new(); n];
        let mut edges = Vec::new();
        if variant.is_mutual() {
            for &(s, d) in &directed {
                if s < d && directed.contains(&(d, s)) {
                    edges.push((s, d));
                    neighbors[s].push(d);
                    neighbors[d].push(s);
                }
            }
            adjacent.clone_from(&neighbors);
            in_neighbors.clone_from(&neighbors);
        } else {
            for &(s, d) in &directed {
                edges.push((s, d));
                neighbors[s].push(d);
                in_neighbors[d].push(s);
                adjacent[s].push(d);
                adjacent[d].push(s);
            }
        }
        for list in neighbors
            .iter_mut()
            .chain(in_neighbors.iter_mut())
            .chain(adjacent.iter_mut())
        {
            list.sort_unstable();
            list.dedup();
        }

        Ok(HeterogeneousGraph {
            variant,
            users: kept,
            index,
            tweets,
            neighbors,
            in_neighbors,
            adjacent,
            edges,
        })
    }

    pub fn variant(&self) -> GraphVariant {
        self.variant
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn users(&self) -> &[User] {
        &self.users
    }

    pub fn user(&self, idx: usize) -> &User {
        &self.users[idx]
    }

    pub fn index_of(&self, id: &UserId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require_index(&self, id: &UserId) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownUser(id.to_string()))
    }

    pub fn tweets(&self, idx: usize) -> &[Tweet] {
        &self.tweets[idx]
    }

    pub fn n_tweets(&self) -> usize {
        self.tweets.iter().map(Vec::len).sum()
    }

    /// Neighbors of `id` in sorted-id order: out-neighbors under directed
    /// variants, every adjacent user under mutual ones.
    pub fn neighbors(&self, id: &UserId) -> Result<Vec<&UserId>> {
        let idx = self.require_index(id)?;
        Ok(self.neighbors[idx]
            .iter()
            .map(|&j| &self.users[j].id)
            .collect())
    }

    pub fn neighbor_indices(&self, idx: usize) -> &[usize] {
        &self.neighbors[idx]
    }

    /// Users whose neighbor lists contain `idx`.
    pub fn in_neighbor_indices(&self, idx: usize) -> &[usize] {
        &self.in_neighbors[idx]
    }

    /// Users linked to `idx` in either direction.
    pub fn adjacent_indices(&self, idx: usize) -> &[usize] {
        &self.adjacent[idx]
    }

    /// Variant-level edges: ordered pairs for directed variants, `(lo, hi)` pairs for mutual ones.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Whether at least one of the two users links to the other.
    pub fn connected(&self, i: usize, j: usize) -> bool {
        self.adjacent[i].binary_search(&j).is_ok()
    }

    pub fn is_revealed(&self, idx: usize) -> bool {
        self.users[idx].revealed
    }

    /// Gold label if it is disclosed to the algorithms, `None` otherwise.
    pub fn revealed_label(&self, idx: usize) -> Option<SentLabel> {
        let u = &self.users[idx];
        if u.revealed {
            u.gold_label
        } else {
            None
        }
    }

    pub fn revealed_indices(&self) -> Vec<usize> {
        (0..self.n_users()).filter(|&i| self.is_revealed(i)).collect()
    }

    /// A copy of the graph in which exactly the users in `revealed` have their labels disclosed.
    pub fn with_revealed(&self, revealed: &BTreeSet<UserId>) -> Result<Self> {
        let mut g = self.clone();
        for id in revealed {
            let idx = self.require_index(id)?;
            if g.users[idx].gold_label.is_none() {
                return Err(Error::MissingGoldLabel(id.to_string()));
            }
        }
        for u in &mut g.users {
            u.revealed = revealed.contains(&u.id);
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn users(ids: &[&str]) -> Vec<User> {
        ids.iter().map(|id| User::new(*id, Some(SentLabel::Positive))).collect()
    }

    fn one_tweet_each(ids: &[&str]) -> Vec<Tweet> {
        ids.iter()
            .map(|id| Tweet::new(format!("t-{id}"), *id, "obama"))
            .collect()
    }

    fn follows(pairs: &[(&str, &str)]) -> Vec<RawEdge> {
        pairs
            .iter()
            .map(|(s, d)| RawEdge::new(*s, *d, EdgeKind::Follow))
            .collect()
    }

    fn edge_ids(g: &HeterogeneousGraph) -> Vec<(String, String)> {
        g.edges()
            .iter()
            .map(|&(s, d)| (g.user(s).id.to_string(), g.user(d).id.to_string()))
            .collect()
    }

    #[test]
    fn mutual_follow_requires_both_directions() {
        let ids = ["a", "b", "c"];
        let edges = follows(&[("a", "b"), ("b", "a"), ("a", "c")]);
        let g = HeterogeneousGraph::build(&users(&ids), &one_tweet_each(&ids), &edges, GraphVariant::MutualFollow)
            .unwrap();
        assert_eq!(edge_ids(&g), vec![("a".into(), "b".into())]);
    }

    #[test]
    fn directed_follow_keeps_every_edge() {
        let ids = ["a", "b", "c"];
        let edges = follows(&[("a", "b"), ("b", "a"), ("a", "c")]);
        let g = HeterogeneousGraph::build(&users(&ids), &one_tweet_each(&ids), &edges, GraphVariant::DirectedFollow)
            .unwrap();
        assert_eq!(
            edge_ids(&g),
            vec![
                ("a".into(), "b".into()),
                ("a".into(), "c".into()),
                ("b".into(), "a".into())
            ]
        );
    }

    #[test]
    fn single_mention_is_not_mutual() {
        let ids = ["a", "b"];
        let edges = vec![RawEdge::new("a", "b", EdgeKind::Mention)];
        let g = HeterogeneousGraph::build(&users(&ids), &one_tweet_each(&ids), &edges, GraphVariant::MutualAt)
            .unwrap();
        assert_eq!(g.n_edges(), 0);
        let g = HeterogeneousGraph::build(&users(&ids), &one_tweet_each(&ids), &edges, GraphVariant::DirectedAt)
            .unwrap();
        assert_eq!(g.n_edges(), 1);
        let g = HeterogeneousGraph::build(&users(&ids), &one_tweet_each(&ids), &edges, GraphVariant::DirectedFollow)
            .unwrap();
        assert_eq!(g.n_edges(), 0);
    }

    #[test]
    fn neighbors_follow_variant_semantics() {
        let ids = ["a", "b", "c"];
        let tw = one_tweet_each(&ids);
        let g = HeterogeneousGraph::build(&users(&ids), &tw, &follows(&[("a", "b"), ("c", "a")]), GraphVariant::DirectedFollow)
            .unwrap();
        assert_eq!(g.neighbors(&"a".into()).unwrap(), vec![&UserId::from("b")]);

        let g = HeterogeneousGraph::build(&users(&ids), &tw, &follows(&[("a", "b"), ("b", "a")]), GraphVariant::MutualFollow)
            .unwrap();
        assert_eq!(g.neighbors(&"b".into()).unwrap(), vec![&UserId::from("a")]);
        assert!(g.neighbors(&"c".into()).unwrap().is_empty());
        assert!(matches!(g.neighbors(&"zz".into()), Err(Error::UnknownUser(_))));
    }

    #[test]
    fn tweetless_users_are_dropped_with_their_edges() {
        let ids = ["a", "b", "c"];
        let tw = one_tweet_each(&["a", "b"]);
        let g = HeterogeneousGraph::build(&users(&ids), &tw, &follows(&[("a", "c"), ("c", "b"), ("a", "b")]), GraphVariant::DirectedFollow)
            .unwrap();
        assert_eq!(g.n_users(), 2);
        assert_eq!(edge_ids(&g), vec![("a".into(), "b".into())]);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let ids = ["a", "b"];
        let g = HeterogeneousGraph::build(&users(&ids), &one_tweet_each(&ids), &follows(&[("a", "b"), ("a", "b")]), GraphVariant::DirectedFollow)
            .unwrap();
        assert_eq!(g.n_edges(), 1);
    }

    #[test]
    fn rejects_bad_references() {
        let ids = ["a", "b"];
        let tw = vec![Tweet::new("t", "u9", "x")];
        assert!(matches!(
            HeterogeneousGraph::build(&users(&ids), &tw, &[], GraphVariant::DirectedFollow),
            Err(Error::UnknownUser(id)) if id == "u9"
        ));
        let dup = users(&["a", "a"]);
        assert!(matches!(
            HeterogeneousGraph::build(&dup, &[], &[], GraphVariant::DirectedFollow),
            Err(Error::DuplicateUser(_))
        ));
    }

    #[test]
    fn topic_filter_is_case_insensitive_substring() {
        let tweets = vec![
            Tweet::new("1", "a", "Obama rocks"),
            Tweet::new("2", "a", "Barack is great"),
            Tweet::new("3", "a", "go SARAH palin"),
        ];
        let kept = filter_on_topic(&tweets, "obama");
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].id, "1");
        assert_eq!(filter_on_topic(&tweets, "Sarah Palin")[0].id, "3");
        assert!(filter_on_topic(&[], "obama").is_empty());
    }

    #[test]
    fn revealing_requires_gold_labels() {
        let us = vec![User::new("a", None), User::new("b", Some(SentLabel::Negative))];
        let g = HeterogeneousGraph::build(&us, &one_tweet_each(&["a", "b"]), &[], GraphVariant::DirectedFollow)
            .unwrap();
        let ok = g.with_revealed(&["b".into()].into_iter().collect()).unwrap();
        assert_eq!(ok.revealed_label(1), Some(SentLabel::Negative));
        assert_eq!(ok.revealed_label(0), None);
        assert!(g.with_revealed(&["a".into()].into_iter().collect()).is_err());
    }

    #[test]
    fn variant_names_round_trip() {
        for v in GraphVariant::ALL {
            assert_eq!(v.as_str().parse::<GraphVariant>().unwrap(), v);
        }
    }
}
