//! Valid inequalities for the connected-subgraph polytope and their exact
//! separation.
//!
//! Two families are built here. The binary family, indexed by a connected
//! set `H` and a color `c`, puts a unit coefficient on every `(H', c')` with
//! `H' ⊇ H, c' != c` and on every `(H', c)` with `H'` meeting `H`; its
//! right-hand side is 1. The general family, indexed by `H` and a color set
//! `C'` of size `s`, weighs `(H', c)` by `max(δ, 1)` for `c ∈ C'` and
//! `max(δ, 0)` otherwise, where `δ = s - |H \ H'|`, with right-hand side `s`.

use std::cmp::Ordering;
use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formulation::Model;
use crate::graph::Color;
use crate::scalar::Scalar;

/// Default minimum violation for a separated cut.
pub const DEFAULT_SEPARATION_TOL: f64 = 1e-4;

/// Default number of cuts returned per separation round.
pub const DEFAULT_MAX_CUTS_PER_ROUND: usize = 100;

/// Where an inequality comes from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    /// Vertex row: each vertex receives at most one color.
    Vertex { vertex: usize },
    /// Color row: each color is used by at most one set.
    Color { color: Color },
    /// Binary-coefficient inequality for `(H, c)`.
    Class5 { set: usize, color: Color },
    /// General inequality for `(H, C')`, colors sorted ascending.
    Class6 { set: usize, colors: Vec<Color> },
}

impl Provenance {
    pub fn describe<T: Scalar>(&self, model: &Model<T>) -> String {
        match self {
            Provenance::Vertex { vertex } => format!("vertex row for vertex {}", vertex + 1),
            Provenance::Color { color } => format!("color row for color {color}"),
            Provenance::Class5 { set, color } => {
                format!("class-5 cut H={} c={color}", model.set(*set))
            }
            Provenance::Class6 { set, colors } => {
                let labels: Vec<String> = colors.iter().map(Color::to_string).collect();
                format!("class-6 cut H={} C'={{{}}}", model.set(*set), labels.join(","))
            }
        }
    }
}

/// Sparse `≤` inequality with nonnegative integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cut {
    coefficients: Vec<(usize, u32)>,
    rhs: u32,
    provenance: Provenance,
}

impl Cut {
    /// Sorts the coefficients by variable and drops zeros.
    pub fn new(mut coefficients: Vec<(usize, u32)>, rhs: u32, provenance: Provenance) -> Self {
        coefficients.retain(|&(_, a)| a != 0);
        coefficients.sort_unstable_by_key(|&(j, _)| j);
        debug_assert!(coefficients.windows(2).all(|w| w[0].0 < w[1].0), "duplicate variable");
        Cut { coefficients, rhs, provenance }
    }

    pub fn coefficients(&self) -> &[(usize, u32)] {
        &self.coefficients
    }

    pub fn rhs(&self) -> u32 {
        self.rhs
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn coefficient(&self, flat: usize) -> u32 {
        self.coefficients
            .binary_search_by_key(&flat, |&(j, _)| j)
            .map_or(0, |i| self.coefficients[i].1)
    }

    /// Same support, coefficients and right-hand side, ignoring provenance.
    pub fn same_inequality(&self, other: &Cut) -> bool {
        self.rhs == other.rhs && self.coefficients == other.coefficients
    }

    pub fn lhs<T: Scalar>(&self, x: &[T]) -> T {
        self.coefficients
            .iter()
            .fold(T::zero(), |acc, &(j, a)| acc + T::of_u32(a) * x[j].clone())
    }

    /// Left-hand side at the 0/1 point with the given support.
    pub fn lhs_on_support(&self, support: &[usize]) -> u64 {
        support.iter().map(|&j| u64::from(self.coefficient(j))).sum()
    }

    pub fn violation<T: Scalar>(&self, x: &[T]) -> T {
        self.lhs(x) - T::of_u32(self.rhs)
    }

    /// The same inequality with a lowered right-hand side; for negative controls.
    pub fn with_rhs(&self, rhs: u32) -> Cut {
        Cut { rhs, ..self.clone() }
    }
}

/// Which class-6 sizes the separator searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Class6Regime {
    /// `2 <= |C'| <= |H| - 1`, where the inequalities are facets.
    #[default]
    Facet,
    /// `2 <= |C'| <= |H|`, everything known to be valid.
    Validity,
}

#[derive(Debug, Clone)]
pub struct SeparationOptions<T> {
    /// A cut is reported when its violation exceeds this.
    pub tol: T,
    /// Keep only the most violated cuts; `None` keeps all.
    pub max_cuts: Option<usize>,
    pub class6_regime: Class6Regime,
}

impl<T: Scalar> Default for SeparationOptions<T> {
    fn default() -> Self {
        let tol = if T::EXACT {
            T::zero()
        } else {
            T::from_f64(DEFAULT_SEPARATION_TOL).expect("representable")
        };
        SeparationOptions {
            tol,
            max_cuts: Some(DEFAULT_MAX_CUTS_PER_ROUND),
            class6_regime: Class6Regime::Facet,
        }
    }
}

/// A cut violated by a given point.
#[derive(Debug, Clone)]
pub struct Violated<T> {
    pub cut: Cut,
    pub violation: T,
}

pub fn build_class5<T: Scalar>(model: &Model<T>, set: usize, color: Color) -> Cut {
    let h = model.set(set);
    let mut coefficients = Vec::new();
    for (s, other) in model.sets().iter().enumerate() {
        if other.contains(h) {
            coefficients.extend(model.colors().map(|c| (model.flat(s, c), 1)));
        } else if other.intersects(h) {
            coefficients.push((model.flat(s, color), 1));
        }
    }
    Cut::new(coefficients, 1, Provenance::Class5 { set, color })
}

pub fn build_class6<T: Scalar>(model: &Model<T>, set: usize, colors: &[Color]) -> Result<Cut> {
    let h = model.set(set);
    let mut chosen: Vec<Color> = colors.to_vec();
    chosen.sort_unstable();
    chosen.dedup();
    if chosen.len() != colors.len() {
        return Err(Error::InvalidColorSet("repeated color".into()));
    }
    if chosen.is_empty() || chosen.len() > model.color_count() {
        return Err(Error::InvalidColorSet(format!(
            "need 1..={} colors, got {}",
            model.color_count(),
            chosen.len()
        )));
    }
    if let Some(c) = chosen.iter().find(|c| c.index() >= model.color_count()) {
        return Err(Error::InvalidColorSet(format!("color {c} out of range")));
    }
    let s = chosen.len();
    if s > h.len() && h.len() != 1 {
        return Err(Error::Class6Precondition { colors: s, set_size: h.len() });
    }
    let mut in_set = vec![false; model.color_count()];
    for c in &chosen {
        in_set[c.index()] = true;
    }
    let mut coefficients = Vec::new();
    for (idx, other) in model.sets().iter().enumerate() {
        if !other.intersects(h) {
            continue;
        }
        let delta = s as i64 - h.missing_from(other) as i64;
        for c in model.colors() {
            let floor = if in_set[c.index()] { 1 } else { 0 };
            let a = delta.max(floor);
            if a > 0 {
                coefficients.push((model.flat(idx, c), a as u32));
            }
        }
    }
    Ok(Cut::new(coefficients, s as u32, Provenance::Class6 { set, colors: chosen }))
}

fn by_violation<T: Scalar>(a: &Violated<T>, b: &Violated<T>) -> Ordering {
    b.violation
        .partial_cmp(&a.violation)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.cut.provenance.cmp(&b.cut.provenance))
}

fn finish<T: Scalar>(mut found: Vec<Violated<T>>, max_cuts: Option<usize>) -> Vec<Violated<T>> {
    found.sort_by(by_violation);
    if let Some(cap) = max_cuts {
        found.truncate(cap);
    }
    found
}

/// Every binary-family cut violated by more than `tol` at `x`, most violated first.
pub fn separate_class5<T: Scalar>(
    model: &Model<T>,
    x: &[T],
    options: &SeparationOptions<T>,
) -> Vec<Violated<T>> {
    let k = model.color_count();
    let one = T::one();
    let found: Vec<(usize, Color, T)> = (0..model.set_count())
        .into_par_iter()
        .flat_map_iter(|set| {
            let h = model.set(set);
            let mut meet = vec![T::zero(); k];
            let mut cover = vec![T::zero(); k];
            for (s, other) in model.sets().iter().enumerate() {
                if !other.intersects(h) {
                    continue;
                }
                let contains = other.contains(h);
                for ci in 0..k {
                    let v = &x[s * k + ci];
                    if v.is_zero() {
                        continue;
                    }
                    meet[ci] = meet[ci].clone() + v.clone();
                    if contains {
                        cover[ci] = cover[ci].clone() + v.clone();
                    }
                }
            }
            let cover_total = cover.iter().cloned().fold(T::zero(), |a, b| a + b);
            (0..k)
                .filter_map(|ci| {
                    let lhs = cover_total.clone() - cover[ci].clone() + meet[ci].clone();
                    let violation = lhs - one.clone();
                    (violation > options.tol).then(|| (set, Color::from_index(ci), violation))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let found = found
        .into_iter()
        .map(|(set, color, violation)| Violated { cut: build_class5(model, set, color), violation })
        .collect();
    finish(found, options.max_cuts)
}

/// Most violated general-family cut for every `(H, |C'|)` pair in the
/// configured regime, keeping those violated by more than `tol`.
///
/// For fixed `H` and size `s` the coefficients depend on `H'` only through
/// `|H \ H'|` and on the color only through membership in `C'`, so the best
/// `C'` takes the `s` colors with the largest gain from being inside.
pub fn separate_class6<T: Scalar>(
    model: &Model<T>,
    x: &[T],
    options: &SeparationOptions<T>,
) -> Vec<Violated<T>> {
    let k = model.color_count();
    let found: Vec<(usize, Vec<Color>, T)> = (0..model.set_count())
        .into_par_iter()
        .flat_map_iter(|set| {
            let h = model.set(set);
            let size = h.len();
            let max_s = match options.class6_regime {
                Class6Regime::Facet => size.saturating_sub(1),
                Class6Regime::Validity => size,
            }
            .min(k);
            if size < 2 || max_s < 2 {
                return Vec::new();
            }
            // mass[c][d]: total x on (H', c) with |H \ H'| = d
            let mut mass = vec![vec![T::zero(); size]; k];
            for (s, other) in model.sets().iter().enumerate() {
                if !other.intersects(h) {
                    continue;
                }
                let d = h.missing_from(other);
                for (ci, row) in mass.iter_mut().enumerate() {
                    let v = &x[s * k + ci];
                    if !v.is_zero() {
                        row[d] = row[d].clone() + v.clone();
                    }
                }
            }
            let mut out = Vec::new();
            for s in 2..=max_s {
                let weigh = |floor: i64, row: &[T]| {
                    row.iter().enumerate().fold(T::zero(), |acc, (d, m)| {
                        let a = (s as i64 - d as i64).max(floor);
                        acc + T::of_u32(a as u32) * m.clone()
                    })
                };
                let inside: Vec<T> = mass.iter().map(|row| weigh(1, row)).collect();
                let outside: Vec<T> = mass.iter().map(|row| weigh(0, row)).collect();
                let mut order: Vec<usize> = (0..k).collect();
                order.sort_by(|&a, &b| {
                    let ga = inside[a].clone() - outside[a].clone();
                    let gb = inside[b].clone() - outside[b].clone();
                    gb.partial_cmp(&ga).unwrap_or(Ordering::Equal).then(a.cmp(&b))
                });
                let mut lhs = outside.iter().cloned().fold(T::zero(), |a, b| a + b);
                for &ci in &order[..s] {
                    lhs = lhs + inside[ci].clone() - outside[ci].clone();
                }
                let violation = lhs - T::of_u32(s as u32);
                if violation > options.tol {
                    let mut colors: Vec<Color> =
                        order[..s].iter().map(|&ci| Color::from_index(ci)).collect();
                    colors.sort_unstable();
                    out.push((set, colors, violation));
                }
            }
            out
        })
        .collect();
    let found = found
        .into_iter()
        .map(|(set, colors, violation)| Violated {
            cut: build_class6(model, set, &colors).expect("separator respects the size bound"),
            violation,
        })
        .collect();
    finish(found, options.max_cuts)
}

/// Cut store that suppresses re-added inequalities, by provenance and by content.
#[derive(Debug, Default, Clone)]
pub struct CutPool {
    provenances: HashSet<Provenance>,
    contents: HashSet<(Vec<(usize, u32)>, u32)>,
    cuts: Vec<Cut>,
}

impl CutPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when the cut (or an identical inequality) is already pooled.
    pub fn insert(&mut self, cut: Cut) -> bool {
        if self.provenances.contains(&cut.provenance) {
            return false;
        }
        let key = (cut.coefficients.clone(), cut.rhs);
        if self.contents.contains(&key) {
            self.provenances.insert(cut.provenance.clone());
            return false;
        }
        self.provenances.insert(cut.provenance.clone());
        self.contents.insert(key);
        self.cuts.push(cut);
        true
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn into_cuts(self) -> Vec<Cut> {
        self.cuts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, Instance, PartialColoring};

    fn path_model(labels: &[u32], k: usize) -> Model<f64> {
        let g = Graph::path(labels.len()).unwrap();
        let c = PartialColoring::from_labels(k, labels).unwrap();
        Model::build(&Instance::unit_weights(g, c).unwrap()).unwrap()
    }

    fn interval(m: &Model<f64>, lo: usize, hi: usize) -> usize {
        m.sets().iter().position(|s| s.interval() == Some((lo - 1, hi - 1))).unwrap()
    }

    #[test]
    fn class5_singleton_is_the_vertex_row() {
        let m = path_model(&[1, 2, 1, 2], 3);
        for v in 0..4 {
            for c in m.colors() {
                assert!(build_class5(&m, m.singleton_index(v), c).same_inequality(m.vertex_row(v)));
            }
        }
    }

    #[test]
    fn class5_whole_set_dominates_color_row() {
        let m = path_model(&[1, 2, 1, 2], 3);
        for c in m.colors() {
            let cut = build_class5(&m, m.whole_set_index(), c);
            let row = m.color_row(c);
            assert_eq!(cut.rhs(), row.rhs());
            for &(j, a) in row.coefficients() {
                assert_eq!(cut.coefficient(j), a);
            }
            assert!(cut.coefficients().len() > row.coefficients().len());
        }
    }

    #[test]
    fn class5_support_size_on_short_path() {
        for k in 2..=4 {
            let m = path_model(&[1, 2, 1], k);
            let cut = build_class5(&m, interval(&m, 1, 2), Color::new(1));
            // containing [1,2]: [1,2], [1,3]; meeting [1,2]: all but [3,3]
            assert_eq!(cut.coefficients().len(), 2 * (k - 1) + 5);
        }
    }

    #[test]
    fn class6_delta_rule_on_path_five() {
        let m = path_model(&[1, 2, 3, 1, 2], 3);
        let cut = build_class6(&m, interval(&m, 2, 4), &[Color::new(1), Color::new(2)]).unwrap();
        assert_eq!(cut.rhs(), 2);
        let whole = interval(&m, 1, 5);
        let tail = interval(&m, 4, 5);
        for c in 1..=3 {
            assert_eq!(cut.coefficient(m.flat(whole, Color::new(c))), 2);
        }
        assert_eq!(cut.coefficient(m.flat(tail, Color::new(1))), 1);
        assert_eq!(cut.coefficient(m.flat(tail, Color::new(2))), 1);
        assert_eq!(cut.coefficient(m.flat(tail, Color::new(3))), 0);
        assert_eq!(cut.coefficient(m.flat(interval(&m, 5, 5), Color::new(1))), 0);
    }

    #[test]
    fn class6_single_color_equals_class5() {
        let m = path_model(&[1, 2, 1, 3, 2], 3);
        for set in 0..m.set_count() {
            for c in m.colors() {
                let a = build_class6(&m, set, &[c]).unwrap();
                assert!(a.same_inequality(&build_class5(&m, set, c)));
            }
        }
    }

    #[test]
    fn class6_singleton_scales_vertex_row() {
        let m = path_model(&[1, 2, 1, 3], 3);
        let v = 1;
        let cut = build_class6(&m, m.singleton_index(v), &[Color::new(1), Color::new(3)]).unwrap();
        let row = m.vertex_row(v);
        assert_eq!(cut.rhs(), 2 * row.rhs());
        assert_eq!(cut.coefficients().len(), row.coefficients().len());
        for &(j, a) in row.coefficients() {
            assert_eq!(cut.coefficient(j), 2 * a);
        }
    }

    #[test]
    fn class6_precondition_errors() {
        let m = path_model(&[1, 2, 3, 1], 3);
        let pair = interval(&m, 1, 2);
        let all = [Color::new(1), Color::new(2), Color::new(3)];
        assert!(matches!(
            build_class6(&m, pair, &all),
            Err(Error::Class6Precondition { colors: 3, set_size: 2 })
        ));
        assert!(build_class6(&m, pair, &[]).is_err());
        assert!(build_class6(&m, pair, &[Color::new(1), Color::new(1)]).is_err());
        assert!(build_class6(&m, pair, &[Color::new(4)]).is_err());
    }

    #[test]
    fn no_cut_at_zero_or_integral_points() {
        let m = path_model(&[1, 2, 1, 2, 1], 3);
        let opts = SeparationOptions { max_cuts: None, ..Default::default() };
        let zero = vec![0.0; m.var_count()];
        assert!(separate_class5(&m, &zero, &opts).is_empty());
        assert!(separate_class6(&m, &zero, &opts).is_empty());
        let coloring = PartialColoring::from_labels(3, &[1, 1, 2, 2, 3]).unwrap();
        let x = m.chi(&coloring).unwrap();
        assert!(separate_class5(&m, &x.values, &opts).is_empty());
        let wide = SeparationOptions { class6_regime: Class6Regime::Validity, ..opts };
        assert!(separate_class6(&m, &x.values, &wide).is_empty());
    }

    #[test]
    fn separated_cuts_are_violated_and_ordered() {
        let m = path_model(&[1, 2, 1, 2], 2);
        // Half of [1,3] with color 1 and half of [2,4] with color 2.
        let mut x = vec![0.0; m.var_count()];
        x[m.flat(interval(&m, 1, 3), Color::new(1))] = 0.5;
        x[m.flat(interval(&m, 2, 4), Color::new(2))] = 0.5;
        x[m.flat(interval(&m, 1, 1), Color::new(2))] = 0.5;
        x[m.flat(interval(&m, 4, 4), Color::new(1))] = 0.5;
        let opts = SeparationOptions { max_cuts: None, ..Default::default() };
        let found = separate_class5(&m, &x, &opts);
        assert!(!found.is_empty());
        for w in found.windows(2) {
            assert!(w[0].violation >= w[1].violation);
        }
        for v in &found {
            assert!(v.cut.lhs(&x) > 1.0 + 1e-4);
            assert!((v.cut.violation(&x) - v.violation).abs() < 1e-12);
        }
        let capped = separate_class5(&m, &x, &SeparationOptions { max_cuts: Some(1), ..opts });
        assert_eq!(capped.len(), 1);
        assert_eq!(capped[0].cut, found[0].cut);
    }

    #[test]
    fn pool_suppresses_duplicates() {
        let m = path_model(&[1, 2, 1], 2);
        let mut pool = CutPool::new();
        let a = build_class5(&m, 0, Color::new(1));
        assert!(pool.insert(a.clone()));
        assert!(!pool.insert(a));
        // Same inequality under another provenance.
        assert!(!pool.insert(build_class5(&m, 0, Color::new(2))));
        assert!(!pool.insert(m.vertex_row(0).clone()));
        assert_eq!(pool.len(), 1);
    }
}
