//! Enumeration of integral points of the formulation and exact dimension
//! computations on small instances.

use log::warn;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cuts::Cut;
use crate::error::{Error, Result};
use crate::formulation::Model;
use crate::linalg::Echelon;
use crate::scalar::Scalar;

/// Size limits for enumerating every integral point.
#[derive(Debug, Clone, Copy)]
pub struct PointGuard {
    pub max_vars: usize,
    pub path_max_vertices: usize,
    pub path_max_colors: usize,
}

impl Default for PointGuard {
    fn default() -> Self {
        PointGuard { max_vars: 60, path_max_vertices: 10, path_max_colors: 5 }
    }
}

impl PointGuard {
    fn check<T: Scalar>(&self, model: &Model<T>) -> Result<()> {
        let n = model.graph().vertex_count();
        let k = model.color_count();
        let small_path =
            model.graph().is_path() && n <= self.path_max_vertices && k <= self.path_max_colors;
        if small_path || model.var_count() <= self.max_vars {
            Ok(())
        } else {
            Err(Error::SizeGuard(format!(
                "integral point enumeration limited to {} variables or paths with n <= {}, k <= {} \
                 (got {} variables, n = {n}, k = {k})",
                self.max_vars,
                self.path_max_vertices,
                self.path_max_colors,
                model.var_count()
            )))
        }
    }
}

/// Iterator over the supports (sorted flat indices) of all 0/1 points that
/// satisfy the vertex and color rows.
///
/// Each color picks no set or one set disjoint from the sets already picked;
/// colors are visited in order and sets in index order.
pub struct IntegralPoints<'m, T> {
    model: &'m Model<T>,
    /// Chosen set per decided color.
    chosen: Vec<Option<usize>>,
    /// Next set index to try at each decided level.
    cursor: Vec<usize>,
    used: Vec<bool>,
    done: bool,
}

impl<T: Scalar> IntegralPoints<'_, T> {
    fn support(&self) -> Vec<usize> {
        let k = self.model.color_count();
        let mut s: Vec<usize> = self
            .chosen
            .iter()
            .enumerate()
            .filter_map(|(c, set)| set.map(|h| h * k + c))
            .collect();
        s.sort_unstable();
        s
    }

    fn mark(&mut self, set: usize, value: bool) {
        for v in self.model.set(set).members() {
            self.used[v] = value;
        }
    }

    fn fits(&self, set: usize) -> bool {
        self.model.set(set).members().all(|v| !self.used[v])
    }

    /// Moves to the next leaf's ancestor chain; sets `done` when exhausted.
    fn advance(&mut self) {
        let eta = self.model.set_count();
        while let Some(last) = self.chosen.pop() {
            let start = self.cursor.pop().expect("cursor per level");
            if let Some(set) = last {
                self.mark(set, false);
            }
            if let Some(next) = (start..eta).find(|&h| self.fits(h)) {
                self.mark(next, true);
                self.chosen.push(Some(next));
                self.cursor.push(next + 1);
                return;
            }
        }
        self.done = true;
    }
}

impl<T: Scalar> Iterator for IntegralPoints<'_, T> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        while self.chosen.len() < self.model.color_count() {
            self.chosen.push(None);
            self.cursor.push(0);
        }
        let out = self.support();
        self.advance();
        Some(out)
    }
}

/// All integral points of the formulation, subject to `guard`.
pub fn enumerate_integral_points<'m, T: Scalar>(
    model: &'m Model<T>,
    guard: &PointGuard,
) -> Result<IntegralPoints<'m, T>> {
    guard.check(model)?;
    Ok(IntegralPoints {
        model,
        chosen: Vec::new(),
        cursor: Vec::new(),
        used: vec![false; model.graph().vertex_count()],
        done: false,
    })
}

/// Some integral point violating `cut`, if any.
pub fn find_violating_point<T: Scalar>(
    model: &Model<T>,
    cut: &Cut,
    guard: &PointGuard,
) -> Result<Option<Vec<usize>>> {
    let rhs = u64::from(cut.rhs());
    Ok(enumerate_integral_points(model, guard)?.find(|s| cut.lhs_on_support(s) > rhs))
}

/// True iff every integral point satisfies `cut`.
pub fn verify_inequality<T: Scalar>(model: &Model<T>, cut: &Cut, guard: &PointGuard) -> Result<bool> {
    Ok(find_violating_point(model, cut, guard)?.is_none())
}

fn regime_warning<T: Scalar>(model: &Model<T>) {
    if model.graph().vertex_count() < 3 || model.color_count() < 2 {
        warn!(
            "dimension results below n = 3 or k = 2 are outside the regime where the facet \
             statements hold"
        );
    }
}

/// Affine dimension of a set of 0/1 points given by their supports; -1 when empty.
fn affine_dimension(dim: usize, supports: impl Iterator<Item = Vec<usize>>) -> i64 {
    let mut echelon = Echelon::<BigRational>::new(dim);
    let mut base: Option<Vec<usize>> = None;
    for s in supports {
        let Some(b) = &base else {
            base = Some(s);
            continue;
        };
        let mut diff = vec![BigRational::zero(); dim];
        for &j in &s {
            diff[j] += BigRational::one();
        }
        for &j in b {
            diff[j] -= BigRational::one();
        }
        echelon.insert(diff);
        if echelon.is_full() {
            break;
        }
    }
    match base {
        None => -1,
        Some(_) => echelon.rank() as i64,
    }
}

/// Dimension of the convex hull of all integral points.
pub fn polytope_dimension<T: Scalar>(model: &Model<T>, guard: &PointGuard) -> Result<i64> {
    regime_warning(model);
    Ok(affine_dimension(model.var_count(), enumerate_integral_points(model, guard)?))
}

/// Dimension of the face `{x : cut holds with equality}`; errors if the cut
/// is not valid.
pub fn face_dimension<T: Scalar>(model: &Model<T>, cut: &Cut, guard: &PointGuard) -> Result<i64> {
    regime_warning(model);
    if let Some(s) = find_violating_point(model, cut, guard)? {
        return Err(Error::InvalidPoint(format!(
            "{} is violated by the integral point with support {s:?}",
            cut.provenance().describe(model)
        )));
    }
    let rhs = u64::from(cut.rhs());
    let tight = enumerate_integral_points(model, guard)?.filter(|s| cut.lhs_on_support(s) == rhs);
    Ok(affine_dimension(model.var_count(), tight))
}

/// Dimension of the face `{x : x_j = 0}`.
pub fn bound_face_dimension<T: Scalar>(model: &Model<T>, flat: usize, guard: &PointGuard) -> Result<i64> {
    regime_warning(model);
    let points = enumerate_integral_points(model, guard)?.filter(|s| s.binary_search(&flat).is_err());
    Ok(affine_dimension(model.var_count(), points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::{build_class5, build_class6};
    use crate::graph::{Color, Graph, Instance, PartialColoring};

    fn path_model(n: usize, k: usize) -> Model<f64> {
        let labels: Vec<u32> = (0..n).map(|v| (v % k) as u32 + 1).collect();
        let c = PartialColoring::from_labels(k, &labels).unwrap();
        Model::build(&Instance::unit_weights(Graph::path(n).unwrap(), c).unwrap()).unwrap()
    }

    /// Count of 0/1 vectors satisfying the base rows, by trying every vector.
    fn brute_count(model: &Model<f64>) -> usize {
        let m = model.var_count();
        (0u64..1 << m)
            .filter(|&mask| {
                let support: Vec<usize> = (0..m).filter(|&j| mask >> j & 1 == 1).collect();
                model.rows().iter().all(|r| r.lhs_on_support(&support) <= u64::from(r.rhs()))
            })
            .count()
    }

    #[test]
    fn point_counts_match_brute_force() {
        for (n, k) in [(1, 2), (2, 2), (3, 2), (2, 3), (3, 3)] {
            let m = path_model(n, k);
            let got = enumerate_integral_points(&m, &PointGuard::default()).unwrap().count();
            assert_eq!(got, brute_count(&m), "n={n} k={k}");
        }
        assert_eq!(enumerate_integral_points(&path_model(2, 2), &PointGuard::default()).unwrap().count(), 9);
    }

    #[test]
    fn points_are_distinct_and_sorted() {
        let m = path_model(4, 3);
        let pts: Vec<_> = enumerate_integral_points(&m, &PointGuard::default()).unwrap().collect();
        let set: std::collections::HashSet<_> = pts.iter().cloned().collect();
        assert_eq!(set.len(), pts.len());
        assert!(pts.iter().all(|s| s.windows(2).all(|w| w[0] < w[1])));
        assert!(pts[0].is_empty());
    }

    #[test]
    fn decoded_points_are_convex() {
        let m = path_model(4, 3);
        for s in enumerate_integral_points(&m, &PointGuard::default()).unwrap() {
            let c = m.decode(&crate::formulation::Point::from_support(m.var_count(), &s)).unwrap();
            assert!(crate::graph::is_convex(m.graph(), &c));
        }
    }

    #[test]
    fn trivial_cut_gives_the_polytope_dimension() {
        let m = path_model(3, 2);
        let zero = Cut::new(Vec::new(), 0, crate::cuts::Provenance::Color { color: Color::new(1) });
        assert_eq!(face_dimension(&m, &zero, &PointGuard::default()).unwrap(), 12);
    }

    #[test]
    fn base_rows_and_binary_cuts_are_valid() {
        let m = path_model(4, 3);
        let g = PointGuard::default();
        assert!(m.rows().iter().all(|r| verify_inequality(&m, r, &g).unwrap()));
        for set in 0..m.set_count() {
            for c in m.colors() {
                let cut = build_class5(&m, set, c);
                assert!(verify_inequality(&m, &cut, &g).unwrap());
                // Every binary cut is tight somewhere, so lowering rhs breaks it.
                assert!(!verify_inequality(&m, &cut.with_rhs(0), &g).unwrap());
            }
        }
    }

    #[test]
    fn full_dimension_on_small_paths() {
        for (n, k) in [(3, 2), (4, 3)] {
            let m = path_model(n, k);
            assert_eq!(polytope_dimension(&m, &PointGuard::default()).unwrap(), m.var_count() as i64);
        }
    }

    #[test]
    fn bound_faces_are_facets() {
        let m = path_model(3, 2);
        for j in 0..m.var_count() {
            assert_eq!(bound_face_dimension(&m, j, &PointGuard::default()).unwrap(), 11);
        }
    }

    #[test]
    fn invalid_cut_is_rejected() {
        let m = path_model(4, 3);
        let bogus = build_class5(&m, 0, Color::new(1)).with_rhs(0);
        assert!(!verify_inequality(&m, &bogus, &PointGuard::default()).unwrap());
        assert!(face_dimension(&m, &bogus, &PointGuard::default()).is_err());
        let good = build_class6(&m, m.whole_set_index(), &[Color::new(1), Color::new(2)]).unwrap();
        assert!(verify_inequality(&m, &good, &PointGuard::default()).unwrap());
    }

    #[test]
    fn guard_rejects_large_models() {
        let m = path_model(11, 3);
        assert!(matches!(
            enumerate_integral_points(&m, &PointGuard::default()),
            Err(Error::SizeGuard(_))
        ));
    }
}
