use crate::error::{Error, Result};
use crate::graph::{HeterogeneousGraph, SentLabel};

/// Membership mask of the largest weakly connected component of the user-user edges.
///
/// Among equally large components the one holding the lowest user index wins.
pub fn largest_component(g: &HeterogeneousGraph) -> Vec<bool> {
    let n = g.n_users();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in g.edges() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let roots: Vec<usize> = (0..n).map(|u| find(&mut parent, u)).collect();
    let mut size = vec![0usize; n];
    for &r in &roots {
        size[r] += 1;
    }
    // Roots are component minima, so scanning upward keeps the lowest index on ties.
    let best = (0..n).fold(None::<usize>, |best, r| match best {
        Some(b) if size[b] >= size[r] => Some(b),
        _ if size[r] > 0 => Some(r),
        _ => best,
    });
    roots.iter().map(|&r| Some(r) == best).collect()
}

/// Accuracy of `predicted` over the users of `scope` that lie in the largest component.
pub fn component_accuracy(
    g: &HeterogeneousGraph,
    predicted: &[SentLabel],
    scope: &[usize],
) -> Result<f64> {
    component_accuracy_with(g, &largest_component(g), predicted, scope)
}

pub(crate) fn component_accuracy_with(
    g: &HeterogeneousGraph,
    in_component: &[bool],
    predicted: &[SentLabel],
    scope: &[usize],
) -> Result<f64> {
    if scope.is_empty() {
        return Err(Error::insufficient("empty evaluation scope"));
    }
    let (mut hit, mut total) = (0usize, 0usize);
    for &u in scope.iter().filter(|&&u| in_component[u]) {
        let gold = g
            .user(u)
            .gold_label
            .ok_or_else(|| Error::MissingGoldLabel(g.user(u).id.to_string()))?;
        total += 1;
        if predicted[u] == gold {
            hit += 1;
        }
    }
    if total == 0 {
        return Err(Error::insufficient("no evaluation user lies in the largest component"));
    }
    Ok(hit as f64 / total as f64)
}
