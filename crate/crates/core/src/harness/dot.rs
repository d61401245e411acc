use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{HeterogeneousGraph, SentLabel, UserId};

fn quote(id: &str) -> String {
    format!("\"{}\"", id.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering: positive users green, negative users red.
/// Mutual-variant edges are drawn without arrowheads.
pub fn to_dot(g: &HeterogeneousGraph, labels: &BTreeMap<UserId, SentLabel>) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(g.variant().as_str())).unwrap();
    writeln!(out, "  node [style=filled, fontcolor=white];").unwrap();
    for u in g.users() {
        let label = labels
            .get(&u.id)
            .ok_or_else(|| Error::invalid(format!("no label for user `{}`", u.id)))?;
        let color = match label {
            SentLabel::Positive => "green",
            SentLabel::Negative => "red",
        };
        writeln!(out, "  {} [fillcolor={color}];", quote(u.id.as_str())).unwrap();
    }
    let attr = if g.variant().is_mutual() { " [dir=none]" } else { "" };
    for &(a, b) in g.edges() {
        writeln!(
            out,
            "  {} -> {}{attr};",
            quote(g.user(a).id.as_str()),
            quote(g.user(b).id.as_str())
        )
        .unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}

pub fn export_dot(g: &HeterogeneousGraph, labels: &BTreeMap<UserId, SentLabel>, path: &Path) -> Result<()> {
    let dot = to_dot(g, labels)?;
    fs::write(path, dot).map_err(|e| Error::io(path, e))
}
