use std::time::{Duration, Instant};

use log::{debug, info};
use serde::Serialize;

use super::relax::{lp_from_rows, solve_relaxation, RelaxationLevel, RelaxationOptions};
use crate::error::{Error, Result};
use crate::formulation::{Model, Point};
use crate::lp::{solve_lp_from, Basis, LpStatus, SolveLimits};
use crate::scalar::Scalar;

pub const DEFAULT_NODE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct BranchOptions<T> {
    /// Cuts added at the root before branching.
    pub root_level: RelaxationLevel,
    pub relaxation: RelaxationOptions<T>,
    pub node_limit: usize,
    pub time_limit: Option<Duration>,
}

impl<T: Scalar> Default for BranchOptions<T> {
    fn default() -> Self {
        BranchOptions {
            root_level: RelaxationLevel::Lp1,
            relaxation: RelaxationOptions::default(),
            node_limit: DEFAULT_NODE_LIMIT,
            time_limit: None,
        }
    }
}

/// Result of [`branch_and_bound`].
#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    /// Optimal objective (kept weight for recoloring models).
    pub opt_value: T,
    pub incumbent: Point<T>,
    pub nodes_explored: usize,
    /// Rows from either cut family in the root LP.
    pub cuts_added: usize,
    pub root_lp_value: T,
    pub wall_time: Duration,
}

/// Flat view of a report for CSV and JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub opt_value: f64,
    pub root_lp_value: f64,
    pub nodes_explored: usize,
    pub cuts_added: usize,
    pub wall_time_secs: f64,
    /// Flat indices set to 1 in the optimal point.
    pub support: Vec<usize>,
}

impl<T: Scalar> SolveReport<T> {
    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            opt_value: self.opt_value.to_f64_lossy(),
            root_lp_value: self.root_lp_value.to_f64_lossy(),
            nodes_explored: self.nodes_explored,
            cuts_added: self.cuts_added,
            wall_time_secs: self.wall_time.as_secs_f64(),
            support: self.incumbent.support(),
        }
    }
}

impl SolveSummary {
    pub const CSV_HEADER: &'static str = "opt_value,root_lp_value,nodes_explored,cuts_added,wall_time_secs";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.6},{:.6},{},{},{:.6}",
            self.opt_value, self.root_lp_value, self.nodes_explored, self.cuts_added, self.wall_time_secs
        )
    }
}

struct Node {
    fixings: Vec<(usize, bool)>,
    basis: Option<Basis>,
}

/// Index of the most fractional entry, ties to the smaller index.
fn branching_variable<T: Scalar>(x: &[T]) -> Option<usize> {
    let half = T::one() / (T::one() + T::one());
    let mut best: Option<(usize, T)> = None;
    for (j, v) in x.iter().enumerate() {
        if v.is_binary() {
            continue;
        }
        let dist = (v.clone() - half.clone()).abs();
        if best.as_ref().is_none_or(|(_, d)| dist < *d) {
            best = Some((j, dist));
        }
    }
    best.map(|(j, _)| j)
}

/// Exact optimum by cut-and-branch: cuts at the root, then depth-first
/// branching on the most fractional variable with the down branch first.
pub fn branch_and_bound<T: Scalar>(model: &Model<T>, options: &BranchOptions<T>) -> Result<SolveReport<T>> {
    let start = Instant::now();
    let deadline = options.time_limit.map(|d| start + d);
    let mut relax_options = options.relaxation.clone();
    relax_options.deadline = deadline.or(relax_options.deadline);
    let root = solve_relaxation(model, options.root_level, &relax_options)?;
    let cuts_added = root.cut_count();
    let root_lp_value = root.outcome.value.clone();

    let mut lp = lp_from_rows(model, &root.rows);
    let limits = SolveLimits { max_iterations: None, deadline };
    let tol = T::optimality_tol();
    let nv = model.var_count();

    // The empty point is always feasible.
    let mut best_value = T::zero();
    let mut best_support: Vec<usize> = Vec::new();
    let mut nodes = 0usize;
    let mut applied: Vec<usize> = Vec::new();
    let mut stack = vec![Node { fixings: Vec::new(), basis: root.outcome.basis.clone() }];

    while let Some(node) = stack.pop() {
        nodes += 1;
        if nodes > options.node_limit {
            return Err(Error::NodeLimit(options.node_limit));
        }
        for &j in &applied {
            lp.set_bounds(j, T::zero(), T::one());
        }
        applied.clear();
        for &(j, up) in &node.fixings {
            let b = if up { T::one() } else { T::zero() };
            lp.set_bounds(j, b.clone(), b);
            applied.push(j);
        }
        let outcome = solve_lp_from(&lp, node.basis.as_ref(), limits);
        match outcome.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            LpStatus::TimeLimit => return Err(Error::TimeLimit),
            other => return Err(Error::Lp(format!("node {nodes}: {other:?}"))),
        }
        if outcome.value <= best_value.clone() + tol.clone() {
            continue;
        }
        match branching_variable(&outcome.primal) {
            None => {
                let support: Vec<usize> = (0..nv)
                    .filter(|&j| outcome.primal[j] > T::one() / (T::one() + T::one()))
                    .collect();
                let value = model.support_value(&support);
                if value > best_value {
                    debug!("node {nodes}: incumbent {value}");
                    best_value = value;
                    best_support = support;
                }
            }
            Some(j) => {
                let mut up = node.fixings.clone();
                up.push((j, true));
                let mut down = node.fixings;
                down.push((j, false));
                stack.push(Node { fixings: up, basis: outcome.basis.clone() });
                stack.push(Node { fixings: down, basis: outcome.basis });
            }
        }
    }

    let incumbent = Point::from_support(nv, &best_support);
    // The incumbent must satisfy the base rows; decode checks that.
    model.decode(&incumbent)?;
    let wall_time = start.elapsed();
    info!("optimum {best_value} after {nodes} nodes in {:.3}s", wall_time.as_secs_f64());
    Ok(SolveReport {
        opt_value: best_value,
        incumbent,
        nodes_explored: nodes,
        cuts_added,
        root_lp_value,
        wall_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, Instance, PartialColoring};
    use crate::solve::oracle::oracle_opt;
    use crate::solve::relax::CutMode;
    use num_rational::BigRational;

    fn inst(labels: &[u32], k: usize) -> Instance<f64> {
        let c = PartialColoring::from_labels(k, labels).unwrap();
        Instance::unit_weights(Graph::path(labels.len()).unwrap(), c).unwrap()
    }

    #[test]
    fn branching_rule() {
        assert_eq!(branching_variable(&[0.0, 0.3, 0.5, 0.5, 1.0]), Some(2));
        assert_eq!(branching_variable(&[0.0, 1.0]), None);
        assert_eq!(branching_variable(&[0.2, 0.8]), Some(0));
    }

    #[test]
    fn convex_instance_solves_at_root() {
        let i = inst(&[1, 1, 2, 2, 3], 3);
        let m = Model::build(&i).unwrap();
        let r = branch_and_bound(&m, &BranchOptions::default()).unwrap();
        assert_eq!(r.opt_value, 5.0);
        assert_eq!(r.nodes_explored, 1);
        let c = m.decode(&r.incumbent).unwrap();
        assert_eq!(c.labels(), vec![1, 1, 2, 2, 3]);
    }

    #[test]
    fn matches_oracle_at_every_root_level() {
        let cases: &[(&[u32], usize)] = &[
            (&[1, 2, 1, 2, 1, 2], 2),
            (&[1, 2, 3, 1, 2, 3, 1], 3),
            (&[3, 1, 2, 2, 1, 3, 1, 2], 3),
        ];
        for &(labels, k) in cases {
            let i = inst(labels, k);
            let m = Model::build(&i).unwrap();
            let want = oracle_opt(&i).unwrap();
            for level in [RelaxationLevel::Lp0, RelaxationLevel::Lp1, RelaxationLevel::Lp1Plus] {
                for mode in [CutMode::Upfront, CutMode::Separated] {
                    let opts = BranchOptions {
                        root_level: level,
                        relaxation: RelaxationOptions::with_mode(mode),
                        ..BranchOptions::default()
                    };
                    let r = branch_and_bound(&m, &opts).unwrap();
                    assert!((r.opt_value - want).abs() < 1e-9, "{labels:?} {level:?}");
                    assert!(r.root_lp_value >= want - 1e-9);
                }
            }
        }
    }

    #[test]
    fn exact_arithmetic_agrees() {
        let i = inst(&[1, 2, 1, 3, 2, 3], 3);
        let exact = i.map_weights(|w| BigRational::from_float(*w).unwrap());
        let m = Model::build(&exact).unwrap();
        let r = branch_and_bound(&m, &BranchOptions::default()).unwrap();
        assert_eq!(r.opt_value, oracle_opt(&exact).unwrap());
    }

    #[test]
    fn node_limit_is_reported() {
        let i = inst(&[1, 2, 1, 2, 1, 2, 1, 2], 2);
        let m = Model::build(&i).unwrap();
        let opts = BranchOptions { root_level: RelaxationLevel::Lp0, node_limit: 1, ..BranchOptions::default() };
        match branch_and_bound(&m, &opts) {
            Err(Error::NodeLimit(1)) | Ok(_) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn summary_row() {
        let i = inst(&[1, 2], 2);
        let m = Model::build(&i).unwrap();
        let s = branch_and_bound(&m, &BranchOptions::default()).unwrap().summary();
        assert_eq!(s.csv_row().split(',').count(), SolveSummary::CSV_HEADER.split(',').count());
        assert!(serde_json::to_string(&s).unwrap().contains("\"opt_value\":2.0"));
    }
}
