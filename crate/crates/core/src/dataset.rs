//! Dataset files: JSON-lines users and tweets, TSV edges.
//!
//! ```text
//! users.jsonl   {"id": "u1", "label": "pos"}        label is "pos", "neg" or null
//! tweets.jsonl  {"id": "t1", "user": "u1", "text": "..."}
//! edges.tsv     u1<TAB>u2<TAB>follow                kind is follow or mention
//! ```
//!
//! Blank lines and lines starting with `#` are skipped.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    filter_on_topic, GraphVariant, HeterogeneousGraph, RawEdge, SentLabel, Tweet, User, UserId,
};

pub const USERS_FILE: &str = "users.jsonl";
pub const TWEETS_FILE: &str = "tweets.jsonl";
pub const EDGES_FILE: &str = "edges.tsv";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dataset {
    pub users: Vec<User>,
    pub tweets: Vec<Tweet>,
    pub edges: Vec<RawEdge>,
}

#[derive(Serialize, Deserialize)]
struct UserRecord {
    id: UserId,
    label: Option<SentLabel>,
}

/// Paths of the three dataset files.
#[derive(Clone, Debug)]
pub struct DatasetPaths {
    pub users: PathBuf,
    pub tweets: PathBuf,
    pub edges: PathBuf,
}

impl DatasetPaths {
    /// The conventional file names inside `dir`.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        DatasetPaths {
            users: dir.join(USERS_FILE),
            tweets: dir.join(TWEETS_FILE),
            edges: dir.join(EDGES_FILE),
        }
    }
}

fn content_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.to_owned()))
        .collect())
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_owned(),
        line,
        message: message.into(),
    }
}

/// Loads and validates a dataset.
///
/// Duplicate user ids, tweets of unknown authors and edges with unknown
/// endpoints are rejected; malformed lines report their line number.
pub fn load_dataset(paths: &DatasetPaths) -> Result<Dataset> {
    let mut users = Vec::new();
    let mut seen = HashSet::new();
    for (line, text) in content_lines(&paths.users)? {
        let rec: UserRecord =
            serde_json::from_str(&text).map_err(|e| parse_err(&paths.users, line, e.to_string()))?;
        if rec.id.as_str().is_empty() {
            return Err(parse_err(&paths.users, line, "empty user id"));
        }
        if !seen.insert(rec.id.clone()) {
            return Err(Error::DuplicateUser(rec.id.to_string()));
        }
        users.push(User::new(rec.id, rec.label));
    }

    let mut tweets = Vec::new();
    let mut tweet_ids = HashSet::new();
    for (line, text) in content_lines(&paths.tweets)? {
        let t: Tweet =
            serde_json::from_str(&text).map_err(|e| parse_err(&paths.tweets, line, e.to_string()))?;
        if t.text.is_empty() {
            return Err(parse_err(&paths.tweets, line, "empty tweet text"));
        }
        if !seen.contains(&t.author) {
            return Err(Error::UnknownUser(t.author.to_string()));
        }
        if !tweet_ids.insert(t.id.clone()) {
            return Err(parse_err(&paths.tweets, line, format!("duplicate tweet id `{}`", t.id)));
        }
        tweets.push(t);
    }

    let mut edges = Vec::new();
    for (line, text) in content_lines(&paths.edges)? {
        let cols: Vec<&str> = text.split('\t').collect();
        if cols.len() != 3 {
            return Err(parse_err(&paths.edges, line, format!("expected 3 columns, found {}", cols.len())));
        }
        let kind = cols[2]
            .trim()
            .parse()
            .map_err(|e: Error| parse_err(&paths.edges, line, e.to_string()))?;
        let edge = RawEdge::new(cols[0], cols[1], kind);
        for end in [&edge.src, &edge.dst] {
            if !seen.contains(end) {
                return Err(Error::UnknownUser(end.to_string()));
            }
        }
        if edge.src == edge.dst {
            return Err(parse_err(&paths.edges, line, "self-loop"));
        }
        edges.push(edge);
    }

    Ok(Dataset {
        users,
        tweets,
        edges,
    })
}

fn write_lines(path: &Path, lines: impl Iterator<Item = String>) -> Result<()> {
    let mut out = Vec::new();
    for l in lines {
        out.extend_from_slice(l.as_bytes());
        out.push(b'\n');
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&out).map_err(|e| Error::io(path, e))
}

/// Writes the dataset in the formats read by [`load_dataset`].
pub fn write_dataset(ds: &Dataset, paths: &DatasetPaths) -> Result<()> {
    let users: Vec<String> = ds
        .users
        .iter()
        .map(|u| {
            serde_json::to_string(&UserRecord {
                id: u.id.clone(),
                label: u.gold_label,
            })
        })
        .collect::<std::result::Result<_, _>>()?;
    write_lines(&paths.users, users.into_iter())?;
    let tweets: Vec<String> = ds
        .tweets
        .iter()
        .map(serde_json::to_string)
        .collect::<std::result::Result<_, _>>()?;
    write_lines(&paths.tweets, tweets.into_iter())?;
    write_lines(
        &paths.edges,
        ds.edges
            .iter()
            .map(|e| format!("{}\t{}\t{}", e.src, e.dst, e.kind.as_str())),
    )
}

impl Dataset {
    /// Restricts the dataset to the users accepted by `keep`, with their tweets and edges.
    pub fn retain_users(&self, mut keep: impl FnMut(&User) -> bool) -> Dataset {
        let users: Vec<User> = self.users.iter().filter(|u| keep(u)).cloned().collect();
        let ids: HashSet<&UserId> = users.iter().map(|u| &u.id).collect();
        let tweets = self
            .tweets
            .iter()
            .filter(|t| ids.contains(&t.author))
            .cloned()
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| ids.contains(&e.src) && ids.contains(&e.dst))
            .cloned()
            .collect();
        Dataset {
            users,
            tweets,
            edges,
        }
    }

    /// Applies the topic filter and builds the graph for `variant`.
    pub fn topic_graph(&self, topic_keyword: &str, variant: GraphVariant) -> Result<HeterogeneousGraph> {
        if topic_keyword.trim().is_empty() {
            return Err(Error::invalid("empty topic keyword"));
        }
        let on_topic = filter_on_topic(&self.tweets, topic_keyword);
        HeterogeneousGraph::build(&self.users, &on_topic, &self.edges, variant)
    }
}
