mod common;

use std::sync::Arc;

use common::*;
use lipext::gluing::{run_claim1, select_near_nearest, GluingOptions};
use lipext::lab::{generate, Generator};
use lipext::metric::{
    distance_to_subset, graph_metric, points_to_metric, unit_cycle, unit_path, Exponent, FiniteMetricSpace, PartialMap,
    TargetPoint, TargetSpace,
};
use lipext::moduli::{check_claim1, e_n, e_up_n, modulus_for_subset};
use lipext::solvers::{brute_force_extend, euclidean_extend, EuclideanConfig, Oracle, DEFAULT_ENUMERATION_CAP};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAP: u64 = DEFAULT_ENUMERATION_CAP;

fn graph_edges(inst: &lipext::lab::Instance) -> (usize, Vec<(usize, usize, f64)>) {
    match &inst.file {
        lipext::io::InstanceFile::Graph { graph } => (graph.n, graph.edges.clone()),
        _ => unreachable!(),
    }
}

fn random_graph(seed: u64, n: usize) -> Arc<FiniteMetricSpace> {
    let g: Generator = format!("random-graph:{n}:0.5:1:3").parse().unwrap();
    generate(&g, seed).unwrap().space
}

#[test]
fn cycle_distances_match_floyd_warshall() {
    let c4 = unit_cycle(4);
    let fw = floyd_warshall(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]);
    for (i, row) in fw.iter().enumerate() {
        for (j, &d) in row.iter().enumerate() {
            assert_eq!(c4.d(i, j), d);
        }
    }
    assert_eq!(c4.d(0, 2), 2.0);
    assert_eq!(distance_to_subset(&c4, &[0, 1], 3).unwrap(), (1.0, 0));
}

#[test]
fn graph_metric_matches_bellman_ford() {
    for seed in 0..40 {
        let inst = generate(&"random-graph:8:0.35:0.5:4".parse().unwrap(), seed).unwrap();
        let (n, edges) = graph_edges(&inst);
        for s in 0..n {
            let bf = bellman_ford(n, &edges, s);
            for (t, &d) in bf.iter().enumerate() {
                assert!((inst.space.d(s, t) - d).abs() < 1e-12, "seed {seed}: d({s},{t})");
            }
        }
    }
}

#[test]
fn random_graphs_are_connected_by_union_find() {
    for seed in 0..50 {
        let inst = generate(&"random-graph:6:0.5:1:3".parse().unwrap(), seed).unwrap();
        let (n, edges) = graph_edges(&inst);
        assert!(connected(n, &edges), "seed {seed}");
        assert!(edges.iter().all(|e| (1.0..=3.0).contains(&e.2)));
    }
    let edges = [(0, 1, 1.0), (2, 3, 1.0)];
    assert!(!connected(4, &edges));
    assert!(graph_metric(&edges, 4).is_err());
}

#[test]
fn modulus_matches_double_enumeration() {
    let two = TargetSpace::two_point(1.0).unwrap();
    let three = TargetSpace::equilateral(3, 1.0).unwrap();
    let p3 = Arc::new(unit_path(2));
    let r = modulus_for_subset(&p3, &[0, 2], &three, CAP).unwrap();
    assert_eq!(r.value, 2.0);
    assert_eq!(naive_e(&p3, &[0, 1, 2], &[0, 2], three.finite().unwrap()), 2.0);

    for m in 2..=6 {
        let path = Arc::new(unit_path(m));
        let all: Vec<usize> = (0..=m).collect();
        let naive = naive_e(&path, &all, &[0, m], two.finite().unwrap());
        assert_eq!(naive, m as f64);
        assert_eq!(modulus_for_subset(&path, &[0, m], &two, CAP).unwrap().value, naive);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..15 {
        let space = random_graph(seed, 5);
        let all: Vec<usize> = (0..5).collect();
        let subset: Vec<usize> = all.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        if subset.is_empty() {
            continue;
        }
        for target in [&two, &three] {
            let naive = naive_e(&space, &all, &subset, target.finite().unwrap());
            let got = modulus_for_subset(&space, &subset, target, CAP).unwrap().value;
            assert!((got - naive).abs() < TOL, "seed {seed} {subset:?}: {got} vs {naive}");
        }
    }
}

#[test]
fn finitary_moduli_match_double_enumeration() {
    let two = TargetSpace::two_point(1.0).unwrap();
    let three = TargetSpace::equilateral(3, 1.0).unwrap();
    let mut spaces = vec![Arc::new(unit_path(4)), Arc::new(unit_cycle(5))];
    spaces.extend((0..6).map(|s| random_graph(100 + s, 5)));
    for space in &spaces {
        for target in [&two, &three] {
            let t = target.finite().unwrap();
            for n in 1..=2 {
                let lower = e_n(space, n, target, CAP).unwrap();
                let upper = e_up_n(space, n, target, CAP).unwrap();
                assert!((lower.value - naive_e_n(space, n, t)).abs() < TOL);
                assert!((upper.value - naive_e_up_n(space, n, t)).abs() < TOL);
                // The witness itself reproduces the value.
                let universe = upper.extension_set();
                let w = naive_e(space, &universe, &upper.witness_subset, t);
                assert!((w - upper.value).abs() < TOL);
            }
        }
    }
}

#[test]
fn path_moduli_examples() {
    let two = TargetSpace::two_point(1.0).unwrap();
    let p5 = Arc::new(unit_path(4));
    let lower = e_n(&p5, 2, &two, CAP).unwrap();
    assert_eq!(lower.value, 4.0);
    assert_eq!(lower.witness_subset, vec![0, 4]);
    let upper = e_up_n(&p5, 1, &two, CAP).unwrap();
    assert_eq!(upper.value, 2.0);
    let check = check_claim1(&p5, 1, &two, CAP).unwrap();
    assert_eq!((check.e_up_n.value, check.e_n.value, check.slack), (2.0, 1.0, 1.0));

    let pair = Arc::new(unit_path(1));
    for n in 1..=3 {
        assert_eq!(
            check_claim1(&pair, n, &TargetSpace::equilateral(3, 1.0).unwrap(), CAP)
                .unwrap()
                .slack,
            2.0
        );
    }
}

#[test]
fn brute_force_matches_re_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for seed in 0..30 {
        let space = random_graph(seed, 6);
        let k = rng.random_range(2..=4);
        let target = TargetSpace::equilateral(k, 1.0).unwrap();
        let domain: Vec<usize> = (0..6).filter(|_| rng.random_bool(0.5)).collect();
        let values: Vec<usize> = domain.iter().map(|_| rng.random_range(0..k)).collect();
        let phi = PartialMap::indexed(space.clone(), domain.clone(), &values, target.clone()).unwrap();
        let all: Vec<usize> = (0..6).collect();
        let free: Vec<usize> = all.iter().copied().filter(|p| !domain.contains(p)).collect();
        let ext = brute_force_extend(&phi, &all, CAP).unwrap();
        let fixed: Vec<(usize, usize)> = domain.iter().copied().zip(values).collect();
        let (best, assignment) = best_extension(&space, &fixed, &free, target.finite().unwrap());
        assert!((ext.constant - best).abs() < TOL, "seed {seed}");
        let got: Vec<usize> = free
            .iter()
            .map(|&p| ext.map.value_at(p).unwrap().index().unwrap())
            .collect();
        assert_eq!(got, assignment, "seed {seed}: lexicographic tie-break");
    }
}

#[test]
fn euclidean_one_point_matches_golden_section() {
    // Midpoint of a segment.
    let line = Arc::new(points_to_metric(&[vec![0.0], vec![1.0], vec![2.0]], Exponent::new(2.0).unwrap()).unwrap());
    let phi = PartialMap::new(
        line.clone(),
        vec![0, 2],
        vec![TargetPoint::Coords(vec![0.0]), TargetPoint::Coords(vec![2.0])],
        TargetSpace::Euclidean { dim: 1 },
    )
    .unwrap();
    let ext = euclidean_extend(&phi, &[0, 1, 2], &EuclideanConfig::default()).unwrap();
    let objective = |t: f64| (t.abs() / 1.0).max((2.0 - t).abs() / 1.0).max(1.0);
    let (t, best) = golden_section(objective, -3.0, 5.0, 200);
    assert!((t - 1.0).abs() < 1e-6);
    assert!((ext.constant - best).abs() < 1e-4);
    assert!((ext.map.value_at(1).unwrap().coords().unwrap()[0] - 1.0).abs() < 1e-2);
}

#[test]
fn euclidean_triangle_matches_grid_search() {
    let pts = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 5.0]];
    let space = Arc::new(points_to_metric(&pts, Exponent::new(2.0).unwrap()).unwrap());
    let values = pts[..2].iter().map(|p| TargetPoint::Coords(p.clone())).collect();
    let phi = PartialMap::new(space.clone(), vec![0, 1], values, TargetSpace::Euclidean { dim: 2 }).unwrap();
    let ext = euclidean_extend(&phi, &[0, 1, 2], &EuclideanConfig::default()).unwrap();
    assert!(ext.constant <= 1.0 + 1e-4, "{}", ext.constant);

    let d = |a: &[f64], b: &[f64]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let mut grid_best = f64::INFINITY;
    for i in -300..=300 {
        for j in -300..=300 {
            let q = [i as f64 * 0.01, j as f64 * 0.01];
            let f = (d(&q, &pts[0]) / space.d(0, 2))
                .max(d(&q, &pts[1]) / space.d(1, 2))
                .max(1.0);
            grid_best = grid_best.min(f);
        }
    }
    assert!(grid_best <= 1.0 + 1e-12);
    assert!(ext.constant >= grid_best - 1e-3);
}

#[test]
fn near_nearest_examples() {
    let p4 = unit_path(3);
    assert_eq!(select_near_nearest(&p4, &[0, 3], &[1], 0.0, false).unwrap(), vec![0]);
    let c4 = unit_cycle(4);
    let fw = floyd_warshall(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]);
    assert_eq!(fw[1][0], fw[1][2]);
    assert_eq!(select_near_nearest(&c4, &[0, 2], &[1], 0.0, false).unwrap(), vec![0]);
}

#[test]
fn saturating_path_instance_glues_under_the_bound() {
    // Two-point target on the path, the instance saturating e^1 = 2.
    let p5 = Arc::new(unit_path(4));
    let two = TargetSpace::two_point(1.0).unwrap();
    let phi = PartialMap::indexed(p5.clone(), vec![0, 4], &[0, 1], two.clone()).unwrap();
    let trace = run_claim1(&phi, &[2], &Oracle::BruteForce { cap: CAP }, &GluingOptions::default()).unwrap();
    assert!(trace.achieved <= trace.certified_bound + TOL);
    let fixed = [(0, 0), (4, 1)];
    let glued: Vec<usize> = [0, 2, 4]
        .iter()
        .map(|&p| trace.phi_glued.value_at(p).unwrap().index().unwrap())
        .collect();
    let achieved = lip(&p5, &[0, 2, 4], &glued, two.finite().unwrap());
    assert_eq!(achieved, trace.achieved);
    let (opt, _) = best_extension(&p5, &fixed, &[2], two.finite().unwrap());
    assert!(trace.achieved >= opt - TOL);
}
