//! Reference optima computed without the integer program.
//!
//! Both routines work from per-vertex gains `g(v, c)` and maximize the total
//! gain of a set of pairwise disjoint connected sets, one per used color.
//! That covers recoloring (`g = w` on the vertex's own color) as well as the
//! assignment variant.

use crate::error::{Error, Result};
use crate::graph::{Color, Graph, GraphKind, Instance};
use crate::scalar::Scalar;

/// Size limits for the reference optimizers.
#[derive(Debug, Clone, Copy)]
pub struct OracleGuard {
    /// Largest path or tree handled.
    pub max_tree_vertices: usize,
    /// Largest color count on paths and trees.
    pub max_tree_colors: usize,
    /// Largest `(#connected sets) * k` on other graphs.
    pub max_sets_times_colors: usize,
}

impl Default for OracleGuard {
    fn default() -> Self {
        OracleGuard { max_tree_vertices: 16, max_tree_colors: 12, max_sets_times_colors: 60 }
    }
}

/// Optimal kept weight of a recoloring instance.
pub fn oracle_opt<T: Scalar>(instance: &Instance<T>) -> Result<T> {
    oracle_opt_with_gains(
        instance.graph(),
        instance.color_count(),
        |v, c| instance.vertex_gain(v, c),
        &OracleGuard::default(),
    )
}

/// Optimal total gain for arbitrary per-vertex gains.
pub fn oracle_opt_with_gains<T: Scalar>(
    graph: &Graph,
    k: usize,
    gain: impl Fn(usize, Color) -> T,
    guard: &OracleGuard,
) -> Result<T> {
    let n = graph.vertex_count();
    match graph.kind() {
        GraphKind::Path => {
            if n > guard.max_tree_vertices || k > guard.max_tree_colors {
                return Err(guard_error(n, k, guard));
            }
            Ok(path_dp(graph, k, &gain))
        }
        kind => {
            let sets = connected_masks(graph)?;
            let small_tree = kind == GraphKind::Tree
                && n <= guard.max_tree_vertices
                && k <= guard.max_tree_colors;
            if !small_tree && sets.len() * k > guard.max_sets_times_colors {
                return Err(Error::SizeGuard(format!(
                    "reference search over {} connected sets and {k} colors exceeds {}",
                    sets.len(),
                    guard.max_sets_times_colors
                )));
            }
            Ok(exhaustive(n, k, &sets, &gain))
        }
    }
}

fn guard_error(n: usize, k: usize, guard: &OracleGuard) -> Error {
    Error::SizeGuard(format!(
        "reference dynamic program limited to n <= {} and k <= {} (got n = {n}, k = {k})",
        guard.max_tree_vertices, guard.max_tree_colors
    ))
}

/// Vertices in path order, from one end to the other.
fn path_order(graph: &Graph) -> Vec<usize> {
    let n = graph.vertex_count();
    if n == 1 {
        return vec![0];
    }
    let start = (0..n).find(|&v| graph.neighbors(v).len() == 1).expect("paths have an end");
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while order.len() < n {
        let next = *graph.neighbors(cur).iter().find(|&&u| u != prev).expect("path continues");
        prev = cur;
        cur = next;
        order.push(cur);
    }
    order
}

/// Dynamic program over (prefix length, set of used colors). Every color
/// claims at most one contiguous block.
fn path_dp<T: Scalar>(graph: &Graph, k: usize, gain: &impl Fn(usize, Color) -> T) -> T {
    let order = path_order(graph);
    let n = order.len();
    // prefix[c][i] = sum of gains for color c over the first i path positions.
    let prefix: Vec<Vec<T>> = (0..k)
        .map(|c| {
            let mut p = Vec::with_capacity(n + 1);
            p.push(T::zero());
            for (i, &v) in order.iter().enumerate() {
                let next = p[i].clone() + gain(v, Color::from_index(c));
                p.push(next);
            }
            p
        })
        .collect();
    let masks = 1usize << k;
    let mut best: Vec<Option<T>> = vec![None; (n + 1) * masks];
    best[0] = Some(T::zero());
    let better = |slot: &mut Option<T>, value: T| {
        if slot.as_ref().is_none_or(|b| value > *b) {
            *slot = Some(value);
        }
    };
    for i in 0..n {
        for mask in 0..masks {
            let Some(value) = best[i * masks + mask].clone() else {
                continue;
            };
            better(&mut best[(i + 1) * masks + mask], value.clone());
            for (c, p) in prefix.iter().enumerate() {
                if mask & (1 << c) != 0 {
                    continue;
                }
                let next = mask | (1 << c);
                for j in i..n {
                    let block = p[j + 1].clone() - p[i].clone();
                    better(&mut best[(j + 1) * masks + next], value.clone() + block);
                }
            }
        }
    }
    best[n * masks..]
        .iter()
        .flatten()
        .cloned()
        .fold(T::zero(), T::max_of)
}

/// All vertex subsets inducing a connected subgraph, as bit masks.
fn connected_masks(graph: &Graph) -> Result<Vec<u64>> {
    let n = graph.vertex_count();
    if n > 24 {
        return Err(Error::SizeGuard(format!(
            "reference search enumerates all vertex subsets; n = {n} is too large"
        )));
    }
    let mut out = Vec::new();
    let mut members = Vec::with_capacity(n);
    for mask in 1u64..(1u64 << n) {
        members.clear();
        members.extend((0..n).filter(|&v| mask >> v & 1 == 1));
        if graph.induces_connected(&members) {
            out.push(mask);
        }
    }
    Ok(out)
}

fn exhaustive<T: Scalar>(n: usize, k: usize, sets: &[u64], gain: &impl Fn(usize, Color) -> T) -> T {
    // Candidates per color with positive gain; zero-gain sets never help.
    let candidates: Vec<Vec<(u64, T)>> = (0..k)
        .map(|c| {
            let color = Color::from_index(c);
            let mut list: Vec<(u64, T)> = sets
                .iter()
                .map(|&m| {
                    let g = (0..n)
                        .filter(|&v| m >> v & 1 == 1)
                        .fold(T::zero(), |acc, v| acc + gain(v, color));
                    (m, g)
                })
                .filter(|(_, g)| g.is_positive())
                .collect();
            list.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
            list
        })
        .collect();
    // suffix[c] bounds what colors c.. can still add.
    let mut suffix = vec![T::zero(); k + 1];
    for c in (0..k).rev() {
        let top = candidates[c].first().map(|(_, g)| g.clone()).unwrap_or_else(T::zero);
        suffix[c] = suffix[c + 1].clone() + top;
    }
    let mut best = T::zero();
    search(&candidates, &suffix, 0, 0, T::zero(), &mut best);
    best
}

fn search<T: Scalar>(
    candidates: &[Vec<(u64, T)>],
    suffix: &[T],
    color: usize,
    used: u64,
    value: T,
    best: &mut T,
) {
    if value > *best {
        *best = value.clone();
    }
    if color == candidates.len() || value.clone() + suffix[color].clone() <= *best {
        return;
    }
    for (mask, g) in &candidates[color] {
        if mask & used == 0 {
            search(candidates, suffix, color + 1, used | mask, value.clone() + g.clone(), best);
        }
    }
    search(candidates, suffix, color + 1, used, value, best);
}
