use crsolve_core::graph::DEFAULT_ENUMERATION_CAP;
use crsolve_core::solve::{branch_and_bound, oracle_opt_with_gains, BranchOptions, OracleGuard};
use crsolve_core::{Error, Graph, Instance, Model, PartialColoring};

fn check(graph: Graph, labels: &[u32], k: usize) {
    let inst = Instance::<f64>::unit_weights(graph, PartialColoring::from_labels(k, labels).unwrap()).unwrap();
    let model = Model::build(&inst).unwrap();
    let solved = branch_and_bound(&model, &BranchOptions::default()).unwrap();
    let guard = OracleGuard { max_sets_times_colors: 10_000, ..OracleGuard::default() };
    let want = oracle_opt_with_gains(inst.graph(), k, |v, c| inst.vertex_gain(v, c), &guard).unwrap();
    assert_eq!(solved.opt_value, want, "{labels:?}");
}

#[test]
fn cycles() {
    let c5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
    check(c5.clone(), &[1, 2, 1, 2, 1], 2);
    check(c5.clone(), &[1, 2, 3, 1, 2], 3);
    check(c5, &[1, 1, 2, 2, 1], 2);
}

#[test]
fn dense_graphs() {
    let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    check(k4, &[1, 2, 1, 2], 2);
    let bowtie = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]).unwrap();
    check(bowtie, &[1, 2, 3, 1, 2], 3);
}

#[test]
fn enumeration_cap_is_enforced() {
    let n = DEFAULT_ENUMERATION_CAP + 1;
    let edges: Vec<(usize, usize)> = (1..n).map(|v| (0, v)).collect();
    let star = Graph::from_edges(n, &edges).unwrap();
    let inst = Instance::<f64>::unit_weights(star, PartialColoring::from_labels(2, &vec![1; n]).unwrap()).unwrap();
    assert!(matches!(Model::build(&inst), Err(Error::EnumerationCap { .. })));
}
