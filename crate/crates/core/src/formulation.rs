//! The connected-subgraph integer program.
//!
//! One binary variable per (connected set, color) pair; the objective
//! coefficient of `(H, c)` is the weight kept by painting all of `H` with `c`.
//! Base rows say that each vertex is covered at most once and each color is
//! used by at most one set.

use std::collections::HashMap;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;

use crate::cuts::{Cut, Provenance};
use crate::error::{Error, Result};
use crate::graph::{
    enumerate_connected_sets, first_disconnected_color, Color, ConnectedSet, Graph,
    Instance, PartialColoring, DEFAULT_ENUMERATION_CAP,
};
use crate::scalar::Scalar;

/// Index of `x_{H,c}`: a set position in the canonical enumeration plus a color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId {
    pub set_index: usize,
    pub color: Color,
}

impl VarId {
    pub fn flat(self, color_count: usize) -> usize {
        self.set_index * color_count + self.color.index()
    }

    pub fn from_flat(flat: usize, color_count: usize) -> Self {
        VarId { set_index: flat / color_count, color: Color::from_index(flat % color_count) }
    }
}

/// What the objective of a model measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelOrigin {
    /// Kept weight of a convex recoloring instance.
    Recoloring,
    /// Gains of a connected-assignment-in-arrays instance; the carried
    /// instance is an uncolored path and recoloring semantics do not apply.
    Capa,
}

#[derive(Debug, Clone)]
pub struct Model<T> {
    instance: Instance<T>,
    origin: ModelOrigin,
    sets: Vec<ConnectedSet>,
    set_lookup: HashMap<FixedBitSet, usize>,
    color_count: usize,
    objective: Vec<(usize, T)>,
    rows: Vec<Cut>,
}

/// Dense assignment of values to all `ηk` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> Point<T> {
    pub fn zeros(len: usize) -> Self {
        Point { values: vec![T::zero(); len] }
    }

    /// Unit point `e(H, c)`.
    pub fn unit(len: usize, flat: usize) -> Self {
        let mut p = Self::zeros(len);
        p.values[flat] = T::one();
        p
    }

    /// 0/1 point from the flat indices set to one.
    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut p = Self::zeros(len);
        for &j in support {
            p.values[j] = T::one();
        }
        p
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(Scalar::is_binary)
    }

    /// Flat indices whose value rounds to one.
    pub fn support(&self) -> Vec<usize> {
        let half = T::one() / (T::one() + T::one());
        self.values.iter().enumerate().filter_map(|(j, v)| (*v > half).then_some(j)).collect()
    }
}

impl<T: Scalar> Model<T> {
    /// Builds the formulation for a recoloring instance (requires `k >= 2`).
    pub fn build(instance: &Instance<T>) -> Result<Self> {
        Self::build_with_cap(instance, DEFAULT_ENUMERATION_CAP)
    }

    pub fn build_with_cap(instance: &Instance<T>, cap: usize) -> Result<Self> {
        if instance.color_count() < 2 {
            return Err(Error::InvalidInstance(format!(
                "the formulation needs at least 2 colors, got {}",
                instance.color_count()
            )));
        }
        Self::from_vertex_gains(instance.clone(), ModelOrigin::Recoloring, cap, |v, c| {
            instance.vertex_gain(v, c)
        })
    }

    /// Builds a model whose objective coefficient on `(H, c)` is the sum of
    /// `gain(v, c)` over `v` in `H`.
    pub fn from_vertex_gains(
        instance: Instance<T>,
        origin: ModelOrigin,
        cap: usize,
        gain: impl Fn(usize, Color) -> T,
    ) -> Result<Self> {
        let graph = instance.graph();
        let sets = enumerate_connected_sets(graph, cap)?;
        let k = instance.color_count();
        let n = graph.vertex_count();

        let mut objective = Vec::new();
        for (s, set) in sets.iter().enumerate() {
            for ci in 0..k {
                let c = Color::from_index(ci);
                let coef = set.members().fold(T::zero(), |acc, v| acc + gain(v, c));
                if !coef.is_zero() {
                    objective.push((s * k + ci, coef));
                }
            }
        }

        let mut vertex_rows: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
        let mut color_rows: Vec<Vec<(usize, u32)>> = vec![Vec::new(); k];
        for (s, set) in sets.iter().enumerate() {
            for v in set.members() {
                vertex_rows[v].extend((0..k).map(|ci| (s * k + ci, 1)));
            }
            for (ci, row) in color_rows.iter_mut().enumerate() {
                row.push((s * k + ci, 1));
            }
        }
        let rows = vertex_rows
            .into_iter()
            .enumerate()
            .map(|(v, coefficients)| Cut::new(coefficients, 1, Provenance::Vertex { vertex: v }))
            .chain(color_rows.into_iter().enumerate().map(|(ci, coefficients)| {
                Cut::new(coefficients, 1, Provenance::Color { color: Color::from_index(ci) })
            }))
            .collect();

        let set_lookup =
            sets.iter().enumerate().map(|(i, s)| (s.member_bits().clone(), i)).collect();
        Ok(Model { instance, origin, sets, set_lookup, color_count: k, objective, rows })
    }

    pub fn instance(&self) -> &Instance<T> {
        &self.instance
    }

    pub fn graph(&self) -> &Graph {
        self.instance.graph()
    }

    pub fn origin(&self) -> ModelOrigin {
        self.origin
    }

    pub fn sets(&self) -> &[ConnectedSet] {
        &self.sets
    }

    pub fn set(&self, index: usize) -> &ConnectedSet {
        &self.sets[index]
    }

    /// η, the number of connected sets.
    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    pub fn color_count(&self) -> usize {
        self.color_count
    }

    pub fn colors(&self) -> impl Iterator<Item = Color> {
        (0..self.color_count).map(Color::from_index)
    }

    pub fn var_count(&self) -> usize {
        self.sets.len() * self.color_count
    }

    pub fn flat(&self, set_index: usize, color: Color) -> usize {
        VarId { set_index, color }.flat(self.color_count)
    }

    pub fn var(&self, flat: usize) -> VarId {
        VarId::from_flat(flat, self.color_count)
    }

    /// Position of a vertex set in the canonical order, if it is connected.
    pub fn index_of(&self, members: &FixedBitSet) -> Option<usize> {
        self.set_lookup.get(members).copied()
    }

    /// Position of the whole vertex set `V(G)`.
    pub fn whole_set_index(&self) -> usize {
        let n = self.graph().vertex_count();
        self.sets.iter().position(|s| s.len() == n).expect("V(G) is connected")
    }

    /// Position of the singleton `{v}`.
    pub fn singleton_index(&self, v: usize) -> usize {
        self.sets
            .iter()
            .position(|s| s.len() == 1 && s.min_vertex() == v)
            .expect("every singleton is connected")
    }

    /// Sparse objective, zero coefficients omitted, sorted by flat index.
    pub fn objective(&self) -> &[(usize, T)] {
        &self.objective
    }

    pub fn objective_coefficient(&self, flat: usize) -> T {
        self.objective
            .binary_search_by_key(&flat, |(j, _)| *j)
            .map(|i| self.objective[i].1.clone())
            .unwrap_or_else(|_| T::zero())
    }

    pub fn objective_value(&self, point: &Point<T>) -> T {
        self.objective
            .iter()
            .fold(T::zero(), |acc, (j, w)| acc + w.clone() * point.values[*j].clone())
    }

    /// Objective of the 0/1 point with the given support.
    pub fn support_value(&self, support: &[usize]) -> T {
        support.iter().fold(T::zero(), |acc, &j| acc + self.objective_coefficient(j))
    }

    /// Base rows: one per vertex, then one per color.
    pub fn rows(&self) -> &[Cut] {
        &self.rows
    }

    pub fn vertex_row(&self, v: usize) -> &Cut {
        &self.rows[v]
    }

    pub fn color_row(&self, color: Color) -> &Cut {
        &self.rows[self.graph().vertex_count() + color.index()]
    }

    /// Incidence vector of a convex coloring.
    pub fn chi(&self, coloring: &PartialColoring) -> Result<Point<T>> {
        if let Some(color) = first_disconnected_color(self.graph(), coloring) {
            return Err(Error::NotConvex { color: color.label() });
        }
        let n = self.graph().vertex_count();
        let mut point = Point::zeros(self.var_count());
        for color in self.colors() {
            let class = coloring.class(color);
            if class.is_empty() {
                continue;
            }
            let mut bits = FixedBitSet::with_capacity(n);
            for v in class {
                bits.insert(v);
            }
            let s = self.index_of(&bits).expect("convex class is an enumerated set");
            point.values[self.flat(s, color)] = T::one();
        }
        Ok(point)
    }

    /// Partial coloring encoded by an integral feasible point; vertices not
    /// covered by any chosen set stay uncolored.
    pub fn decode(&self, point: &Point<T>) -> Result<PartialColoring> {
        if point.len() != self.var_count() {
            return Err(Error::InvalidPoint(format!(
                "point has {} entries, model has {} variables",
                point.len(),
                self.var_count()
            )));
        }
        if let Some(j) = point.values.iter().position(|v| !v.is_binary()) {
            let var = self.var(j);
            return Err(Error::InvalidPoint(format!(
                "x_{{{},{}}} = {} is fractional",
                self.sets[var.set_index], var.color, point.values[j]
            )));
        }
        let support = point.support();
        let n = self.graph().vertex_count();
        let mut cover = vec![0u32; n];
        let mut color_use = vec![0u32; self.color_count];
        for &j in &support {
            let var = self.var(j);
            color_use[var.color.index()] += 1;
            for v in self.sets[var.set_index].members() {
                cover[v] += 1;
            }
        }
        if let Some(v) = cover.iter().position(|&c| c > 1) {
            return Err(Error::InvalidPoint(format!("vertex row for vertex {} is violated", v + 1)));
        }
        if let Some(ci) = color_use.iter().position(|&c| c > 1) {
            return Err(Error::InvalidPoint(format!(
                "color row for color {} is violated",
                Color::from_index(ci)
            )));
        }
        let mut coloring = PartialColoring::uncolored(self.color_count, n);
        for &j in &support {
            let var = self.var(j);
            for v in self.sets[var.set_index].members() {
                coloring.set(v, Some(var.color));
            }
        }
        Ok(coloring)
    }

    /// Name of a variable in the LP text dump.
    pub fn var_name(&self, flat: usize) -> String {
        let var = self.var(flat);
        match self.sets[var.set_index].interval() {
            Some((lo, hi)) => format!("x_H{}_{}_c{}", lo + 1, hi + 1, var.color),
            None => format!("x_s{}_c{}", var.set_index, var.color),
        }
    }

    /// LP-format text of the objective, the base rows and `extra` rows.
    pub fn to_lp_text(&self, extra: &[Cut]) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "\\ convex recoloring model: n = {}, k = {}, eta = {}, {} variables",
            self.graph().vertex_count(),
            self.color_count,
            self.set_count(),
            self.var_count()
        );
        out.push_str("Maximize\n obj:");
        if self.objective.is_empty() {
            out.push_str(" 0");
        }
        for (j, w) in &self.objective {
            let _ = write!(out, " + {} {}", w, self.var_name(*j));
        }
        out.push_str("\nSubject To\n");
        for (i, row) in self.rows.iter().chain(extra).enumerate() {
            let _ = writeln!(out, " \\ {}", row.provenance().describe(self));
            let _ = write!(out, " r{}:", i + 1);
            for &(j, a) in row.coefficients() {
                let _ = write!(out, " + {} {}", a, self.var_name(j));
            }
            let _ = writeln!(out, " <= {}", row.rhs());
        }
        out.push_str("Bounds\n");
        for j in 0..self.var_count() {
            let _ = writeln!(out, " 0 <= {} <= 1", self.var_name(j));
        }
        out.push_str("End\n");
        out
    }
}

/// Recoloring cost from a kept weight: total weight minus what is kept.
pub fn kept_to_recolored<T: Scalar>(instance: &Instance<T>, kept_value: T) -> T {
    instance.total_weight() - kept_value
}

/// Extends a convex partial coloring to a total convex coloring by growing
/// colored components into uncovered neighbours (smallest vertex first), and
/// by painting a component with an unused color when nothing is colored.
pub fn extend_to_total(graph: &Graph, coloring: &PartialColoring) -> PartialColoring {
    let mut out = coloring.clone();
    let n = graph.vertex_count();
    loop {
        let next = (0..n).find_map(|v| {
            if out.get(v).is_some() {
                return None;
            }
            graph.neighbors(v).iter().find_map(|&u| out.get(u)).map(|c| (v, c))
        });
        match next {
            Some((v, c)) => out.set(v, Some(c)),
            None => {
                let Some(v) = (0..n).find(|&v| out.get(v).is_none()) else {
                    return out;
                };
                let used: Vec<Color> = out.assignment().iter().flatten().copied().collect();
                let fresh = (0..out.color_count())
                    .map(Color::from_index)
                    .find(|c| !used.contains(c))
                    .expect("an uncolored graph has every color free");
                out.set(v, Some(fresh));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_convex;

    fn path_instance(labels: &[u32], k: usize) -> Instance<f64> {
        let g = Graph::path(labels.len()).unwrap();
        let c = PartialColoring::from_labels(k, labels).unwrap();
        Instance::unit_weights(g, c).unwrap()
    }

    #[test]
    fn flat_index_is_a_bijection() {
        let k = 3;
        for flat in 0..30 {
            let v = VarId::from_flat(flat, k);
            assert_eq!(v.flat(k), flat);
            assert!(v.color.index() < k);
        }
    }

    #[test]
    fn small_path_model() {
        let m = Model::build(&path_instance(&[1, 0, 2], 2)).unwrap();
        assert_eq!(m.var_count(), 12);
        assert_eq!(m.rows().len(), 5);
        let c1 = Color::new(1);
        let idx = |lo: usize, hi: usize| {
            m.sets().iter().position(|s| s.interval() == Some((lo, hi))).unwrap()
        };
        assert_eq!(m.objective_coefficient(m.flat(idx(0, 0), c1)), 1.0);
        assert_eq!(m.objective_coefficient(m.flat(idx(0, 2), c1)), 1.0);
        assert_eq!(m.objective_coefficient(m.flat(idx(1, 1), c1)), 0.0);
        assert_eq!(m.objective_coefficient(m.flat(idx(1, 1), Color::new(2))), 0.0);
    }

    #[test]
    fn model_needs_two_colors() {
        let g = Graph::path(2).unwrap();
        let c = PartialColoring::from_labels(1, &[1, 1]).unwrap();
        let inst = Instance::<f64>::unit_weights(g, c).unwrap();
        assert!(Model::build(&inst).is_err());
    }

    #[test]
    fn uncolored_instance_has_zero_objective() {
        let m = Model::build(&path_instance(&[0, 0, 0, 0], 3)).unwrap();
        assert!(m.objective().is_empty());
    }

    #[test]
    fn row_incidence_counts() {
        let m = Model::build(&path_instance(&[1, 2, 1, 2], 2)).unwrap();
        let mut appearances = vec![(0usize, 0usize); m.var_count()];
        let n = m.graph().vertex_count();
        for (i, row) in m.rows().iter().enumerate() {
            for &(j, a) in row.coefficients() {
                assert_eq!(a, 1);
                if i < n {
                    appearances[j].0 += 1;
                } else {
                    appearances[j].1 += 1;
                }
            }
        }
        for (j, (vertex_rows, color_rows)) in appearances.into_iter().enumerate() {
            assert_eq!(color_rows, 1);
            assert_eq!(vertex_rows, m.set(m.var(j).set_index).len());
        }
    }

    #[test]
    fn chi_examples() {
        let m = Model::build(&path_instance(&[1, 1, 2], 2)).unwrap();
        let zero = m.chi(&PartialColoring::uncolored(2, 3)).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));
        let full = PartialColoring::from_labels(2, &[1, 1, 2]).unwrap();
        let x = m.chi(&full).unwrap();
        let names: Vec<String> = x.support().into_iter().map(|j| m.var_name(j)).collect();
        assert_eq!(names, vec!["x_H1_2_c1", "x_H3_3_c2"]);
        let bad = PartialColoring::from_labels(2, &[1, 2, 1]).unwrap();
        assert!(matches!(m.chi(&bad), Err(Error::NotConvex { color: 1 })));
    }

    #[test]
    fn decode_examples_and_errors() {
        let m = Model::build(&path_instance(&[1, 2, 1, 2], 2)).unwrap();
        let zero = Point::<f64>::zeros(m.var_count());
        assert_eq!(m.decode(&zero).unwrap(), PartialColoring::uncolored(2, 4));
        let whole = m.whole_set_index();
        let e = Point::<f64>::unit(m.var_count(), m.flat(whole, Color::new(2)));
        assert_eq!(m.decode(&e).unwrap().labels(), vec![2, 2, 2, 2]);

        let mut frac = zero.clone();
        frac.values[0] = 0.5;
        assert!(m.decode(&frac).unwrap_err().to_string().contains("fractional"));

        let s0 = m.singleton_index(0);
        let two = Point::<f64>::from_support(
            m.var_count(),
            &[m.flat(s0, Color::new(1)), m.flat(whole, Color::new(2))],
        );
        assert!(m.decode(&two).unwrap_err().to_string().contains("vertex row for vertex 1"));

        let s3 = m.singleton_index(3);
        let reuse = Point::<f64>::from_support(
            m.var_count(),
            &[m.flat(s0, Color::new(1)), m.flat(s3, Color::new(1))],
        );
        assert!(m.decode(&reuse).unwrap_err().to_string().contains("color row for color 1"));
    }

    #[test]
    fn recolored_weight_of_decoded_point_matches_objective() {
        let inst = path_instance(&[1, 2, 1, 2], 2);
        let m = Model::build(&inst).unwrap();
        let s = m.sets().iter().position(|s| s.interval() == Some((0, 2))).unwrap();
        let x = Point::<f64>::from_support(
            m.var_count(),
            &[m.flat(s, Color::new(1)), m.flat(m.singleton_index(3), Color::new(2))],
        );
        let kept = m.objective_value(&x);
        assert_eq!(kept, 3.0);
        let decoded = m.decode(&x).unwrap();
        assert_eq!(kept_to_recolored(&inst, kept), inst.recolored_weight(&decoded));
        assert_eq!(kept_to_recolored(&inst, 3.0), 1.0);
        assert_eq!(kept_to_recolored(&inst, 0.0), 4.0);
        assert_eq!(kept_to_recolored(&inst, inst.total_weight()), 0.0);
    }

    #[test]
    fn extension_is_total_and_convex() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (1, 3), (3, 4), (4, 5)]).unwrap();
        let partial = PartialColoring::from_labels(3, &[0, 0, 2, 0, 1, 0]).unwrap();
        let total = extend_to_total(&g, &partial);
        assert!(total.assignment().iter().all(Option::is_some));
        assert!(is_convex(&g, &total));
        assert_eq!(total.get(2), Some(Color::new(2)));
        assert_eq!(total.get(4), Some(Color::new(1)));

        let none = extend_to_total(&g, &PartialColoring::uncolored(2, 6));
        assert_eq!(none.labels(), vec![1; 6]);
    }

    #[test]
    fn lp_text_names_variables() {
        let m = Model::build(&path_instance(&[1, 2], 2)).unwrap();
        let text = m.to_lp_text(&[]);
        assert!(text.contains("Maximize"));
        assert!(text.contains("x_H1_2_c1"));
        assert!(text.contains("vertex row"));
        assert!(text.trim_end().ends_with("End"));

        let star = Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        let c = PartialColoring::from_labels(2, &[1, 2, 2]).unwrap();
        let ms = Model::build(&Instance::<f64>::unit_weights(star, c).unwrap()).unwrap();
        assert_eq!(ms.var_name(1), "x_s0_c2");
    }
}
