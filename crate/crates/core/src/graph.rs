//! Graphs, partial colorings, instances and the connected vertex sets that
//! index the formulation's variables.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default vertex cap for enumerating connected sets of non-path graphs.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Path,
    Tree,
    General,
}

/// Simple connected undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    kind: GraphKind,
}

impl Graph {
    /// The path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph must have at least one vertex".into()));
        }
        let mut seen = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u},{v}) references a vertex outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u},{v})")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let edges: Vec<(usize, usize)> = seen.into_iter().collect();
        let mut graph = Graph { n, adjacency, edges, kind: GraphKind::General };
        let all: Vec<usize> = (0..n).collect();
        if !graph.induces_connected(&all) {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        graph.kind = if graph.edges.iter().all(|&(u, v)| v == u + 1) && graph.edges.len() + 1 == n
        {
            GraphKind::Path
        } else if graph.edges.len() + 1 == n {
            GraphKind::Tree
        } else {
            GraphKind::General
        };
        Ok(graph)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn is_path(&self) -> bool {
        self.kind == GraphKind::Path
    }

    /// Whether `vertices` (nonempty) induce a connected subgraph.
    pub fn induces_connected(&self, vertices: &[usize]) -> bool {
        let Some(&start) = vertices.first() else {
            return false;
        };
        let mut inside = FixedBitSet::with_capacity(self.n);
        for &v in vertices {
            inside.insert(v);
        }
        let mut visited = FixedBitSet::with_capacity(self.n);
        visited.insert(start);
        let mut queue = VecDeque::from([start]);
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                if inside.contains(w) && !visited.contains(w) {
                    visited.insert(w);
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        reached == inside.count_ones(..)
    }
}

/// A color label in `1..=k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Color(u32);

impl Color {
    /// Panics on the reserved label 0.
    pub fn new(label: u32) -> Self {
        assert!(label >= 1, "color labels start at 1");
        Color(label)
    }

    pub fn from_index(index: usize) -> Self {
        Color(index as u32 + 1)
    }

    pub fn label(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Map from vertices to colors in `1..=k` or none.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialColoring {
    color_count: usize,
    assignment: Vec<Option<Color>>,
}

impl PartialColoring {
    pub fn new(color_count: usize, assignment: Vec<Option<Color>>) -> Result<Self> {
        if color_count == 0 {
            return Err(Error::InvalidColoring("color count must be positive".into()));
        }
        if let Some((v, c)) = assignment
            .iter()
            .enumerate()
            .find_map(|(v, c)| c.filter(|c| c.index() >= color_count).map(|c| (v, c)))
        {
            return Err(Error::InvalidColoring(format!(
                "vertex {} has color {c} outside 1..={color_count}",
                v + 1
            )));
        }
        Ok(PartialColoring { color_count, assignment })
    }

    /// Builds from raw labels where 0 means uncolored.
    pub fn from_labels(color_count: usize, labels: &[u32]) -> Result<Self> {
        let assignment = labels.iter().map(|&l| (l > 0).then(|| Color::new(l))).collect();
        Self::new(color_count, assignment)
    }

    pub fn uncolored(color_count: usize, n: usize) -> Self {
        PartialColoring { color_count, assignment: vec![None; n] }
    }

    pub fn color_count(&self) -> usize {
        self.color_count
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn get(&self, v: usize) -> Option<Color> {
        self.assignment[v]
    }

    pub fn set(&mut self, v: usize, color: Option<Color>) {
        if let Some(c) = color {
            assert!(c.index() < self.color_count, "color {c} out of range");
        }
        self.assignment[v] = color;
    }

    pub fn assignment(&self) -> &[Option<Color>] {
        &self.assignment
    }

    /// Vertices holding `color`, ascending.
    pub fn class(&self, color: Color) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(v, c)| (*c == Some(color)).then_some(v))
            .collect()
    }

    /// Labels with 0 for uncolored vertices.
    pub fn labels(&self) -> Vec<u32> {
        self.assignment.iter().map(|c| c.map_or(0, Color::label)).collect()
    }
}

/// True iff every nonempty color class induces a connected subgraph.
pub fn is_convex(graph: &Graph, coloring: &PartialColoring) -> bool {
    first_disconnected_color(graph, coloring).is_none()
}

pub(crate) fn first_disconnected_color(graph: &Graph, coloring: &PartialColoring) -> Option<Color> {
    (0..coloring.color_count()).map(Color::from_index).find(|&c| {
        let class = coloring.class(c);
        !class.is_empty() && !graph.induces_connected(&class)
    })
}

/// A convex recoloring instance: graph, initial partial coloring and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    graph: Graph,
    coloring: PartialColoring,
    weights: Vec<T>,
}

impl<T: Scalar> Instance<T> {
    pub fn new(graph: Graph, coloring: PartialColoring, weights: Vec<T>) -> Result<Self> {
        let n = graph.vertex_count();
        if coloring.len() != n {
            return Err(Error::InvalidInstance(format!(
                "coloring has {} entries for {n} vertices",
                coloring.len()
            )));
        }
        if weights.len() != n {
            return Err(Error::InvalidInstance(format!(
                "{} weights given for {n} vertices",
                weights.len()
            )));
        }
        for (v, w) in weights.iter().enumerate() {
            if *w < T::zero() {
                return Err(Error::InvalidInstance(format!(
                    "vertex {} has negative weight {w}",
                    v + 1
                )));
            }
            if coloring.get(v).is_none() && !w.is_zero() {
                return Err(Error::InvalidInstance(format!(
                    "uncolored vertex {} has nonzero weight {w}; uncolored vertices must weigh 0",
                    v + 1
                )));
            }
        }
        Ok(Instance { graph, coloring, weights })
    }

    /// Unit weight on colored vertices, zero on uncolored ones.
    pub fn unit_weights(graph: Graph, coloring: PartialColoring) -> Result<Self> {
        let weights = coloring
            .assignment()
            .iter()
            .map(|c| if c.is_some() { T::one() } else { T::zero() })
            .collect();
        Self::new(graph, coloring, weights)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn coloring(&self) -> &PartialColoring {
        &self.coloring
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn color_count(&self) -> usize {
        self.coloring.color_count()
    }

    /// `w_{v,c}`: the weight kept at `v` when it ends up with color `c`.
    pub fn vertex_gain(&self, v: usize, c: Color) -> T {
        if self.coloring.get(v) == Some(c) {
            self.weights[v].clone()
        } else {
            T::zero()
        }
    }

    pub fn total_weight(&self) -> T {
        self.weights.iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    /// Weight of originally colored vertices whose color changes under `recoloring`.
    pub fn recolored_weight(&self, recoloring: &PartialColoring) -> T {
        assert_eq!(recoloring.len(), self.graph.vertex_count(), "recoloring length");
        (0..self.graph.vertex_count())
            .filter(|&v| {
                let original = self.coloring.get(v);
                original.is_some() && original != recoloring.get(v)
            })
            .fold(T::zero(), |acc, v| acc + self.weights[v].clone())
    }

    /// Weight of vertices that keep their original color under `recoloring`.
    pub fn kept_weight(&self, recoloring: &PartialColoring) -> T {
        (0..self.graph.vertex_count())
            .filter(|&v| self.coloring.get(v).is_some() && self.coloring.get(v) == recoloring.get(v))
            .fold(T::zero(), |acc, v| acc + self.weights[v].clone())
    }

    pub fn map_weights<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Instance<U> {
        Instance {
            graph: self.graph.clone(),
            coloring: self.coloring.clone(),
            weights: self.weights.iter().map(f).collect(),
        }
    }
}

/// Vertex set inducing a connected subgraph; on paths it also records the
/// interval `[lo, hi]` so set relations reduce to endpoint arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConnectedSet {
    members: FixedBitSet,
    size: usize,
    min: usize,
    interval: Option<(usize, usize)>,
}

impl ConnectedSet {
    fn from_interval(n: usize, lo: usize, hi: usize) -> Self {
        let mut members = FixedBitSet::with_capacity(n);
        members.insert_range(lo..hi + 1);
        ConnectedSet { members, size: hi - lo + 1, min: lo, interval: Some((lo, hi)) }
    }

    fn from_mask(n: usize, mask: u64) -> Self {
        let mut members = FixedBitSet::with_capacity(n);
        for v in 0..n {
            if mask >> v & 1 == 1 {
                members.insert(v);
            }
        }
        ConnectedSet {
            size: mask.count_ones() as usize,
            min: mask.trailing_zeros() as usize,
            members,
            interval: None,
        }
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn min_vertex(&self) -> usize {
        self.min
    }

    pub fn interval(&self) -> Option<(usize, usize)> {
        self.interval
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn member_bits(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.members.contains(v)
    }

    /// True iff the two sets share a vertex.
    pub fn intersects(&self, other: &ConnectedSet) -> bool {
        match (self.interval, other.interval) {
            (Some((a, b)), Some((c, d))) => a <= d && c <= b,
            _ => !self.members.is_disjoint(&other.members),
        }
    }

    /// True iff `inner ⊆ self`.
    pub fn contains(&self, inner: &ConnectedSet) -> bool {
        match (self.interval, inner.interval) {
            (Some((a, b)), Some((c, d))) => a <= c && d <= b,
            _ => inner.members.is_subset(&self.members),
        }
    }

    /// `|self \ other|`.
    pub fn missing_from(&self, other: &ConnectedSet) -> usize {
        match (self.interval, other.interval) {
            (Some((a, b)), Some((c, d))) => {
                let lo = a.max(c);
                let hi = b.min(d);
                let overlap = if lo <= hi { hi - lo + 1 } else { 0 };
                self.size - overlap
            }
            _ => self.members.difference(&other.members).count(),
        }
    }

    pub fn is_whole(&self, graph: &Graph) -> bool {
        self.size == graph.vertex_count()
    }
}

impl fmt::Display for ConnectedSet {
    /// 1-based, matching log conventions.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.interval {
            Some((lo, hi)) => write!(f, "[{},{}]", lo + 1, hi + 1),
            None => {
                let labels: Vec<String> = self.members().map(|v| (v + 1).to_string()).collect();
                write!(f, "{{{}}}", labels.join(","))
            }
        }
    }
}

/// Enumerates every connected vertex set of `graph` exactly once, sorted by
/// minimum vertex, then size, then lexicographic membership.
///
/// Non-path graphs with more than `cap` vertices are refused.
pub fn enumerate_connected_sets(graph: &Graph, cap: usize) -> Result<Vec<ConnectedSet>> {
    let n = graph.vertex_count();
    if graph.is_path() {
        let mut sets = Vec::with_capacity(n * (n + 1) / 2);
        for lo in 0..n {
            for hi in lo..n {
                sets.push(ConnectedSet::from_interval(n, lo, hi));
            }
        }
        return Ok(sets);
    }
    if n > cap || n > 64 {
        return Err(Error::EnumerationCap { vertices: n, cap: cap.min(64) });
    }

    let neighbor_masks: Vec<u64> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u))
        .collect();
    let mut masks = Vec::new();
    for root in 0..n {
        // Only vertices above the root may join, so every set is produced
        // from its minimum vertex exactly once.
        let allowed = !0u64 << root & mask_below(n);
        let closed = 1u64 << root | neighbor_masks[root];
        grow(
            1 << root,
            neighbor_masks[root] & allowed,
            closed,
            allowed,
            &neighbor_masks,
            &mut masks,
        );
    }
    let mut sets: Vec<(Vec<usize>, u64)> =
        masks.into_iter().map(|m| (bits_of(m), m)).collect();
    sets.sort_by(|(a, _), (b, _)| a[0].cmp(&b[0]).then(a.len().cmp(&b.len())).then(a.cmp(b)));
    Ok(sets.into_iter().map(|(_, m)| ConnectedSet::from_mask(n, m)).collect())
}

fn mask_below(n: usize) -> u64 {
    if n == 64 {
        !0
    } else {
        (1u64 << n) - 1
    }
}

fn bits_of(mut mask: u64) -> Vec<usize> {
    let mut bits = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        bits.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    bits
}

/// Extension step of the exclusive-neighbourhood enumeration: `extension`
/// holds the candidates not yet branched on, `closed` is the current set plus
/// its neighbourhood.
fn grow(
    current: u64,
    mut extension: u64,
    closed: u64,
    allowed: u64,
    neighbor_masks: &[u64],
    out: &mut Vec<u64>,
) {
    out.push(current);
    while extension != 0 {
        let w = extension.trailing_zeros() as usize;
        extension &= extension - 1;
        let exclusive = neighbor_masks[w] & !closed & allowed;
        grow(
            current | 1 << w,
            extension | exclusive,
            closed | neighbor_masks[w],
            allowed,
            neighbor_masks,
            out,
        );
    }
}
