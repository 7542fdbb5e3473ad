//! Independent reference implementations. Nothing here calls into the
//! solvers or moduli under test; only the metric container is shared.
#![allow(dead_code)]

use lipext::metric::FiniteMetricSpace;

pub const TOL: f64 = 1e-9;

pub fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(u, v, w) in edges {
        d[u][v] = d[u][v].min(w);
        d[v][u] = d[v][u].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

pub fn bellman_ford(n: usize, edges: &[(usize, usize, f64)], src: usize) -> Vec<f64> {
    let mut d = vec![f64::INFINITY; n];
    d[src] = 0.0;
    for _ in 0..n {
        for &(u, v, w) in edges {
            if d[u] + w < d[v] {
                d[v] = d[u] + w;
            }
            if d[v] + w < d[u] {
                d[u] = d[v] + w;
            }
        }
    }
    d
}

pub fn connected(n: usize, edges: &[(usize, usize, f64)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(u, v, _) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    (0..n).all(|i| find(&mut parent, i) == root)
}

/// All vectors in `{0..k}^len`, in lexicographic order.
pub fn assignments(k: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = k.pow(len as u32);
    (0..total).map(move |mut code| {
        let mut v = vec![0; len];
        for slot in v.iter_mut().rev() {
            *slot = code % k;
            code /= k;
        }
        v
    })
}

/// Max ratio over pairs of `points`, with `value(i)` the target index of point `points[i]`.
pub fn lip(space: &FiniteMetricSpace, points: &[usize], values: &[usize], target: &FiniteMetricSpace) -> f64 {
    let mut best = 0.0_f64;
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            best = best.max(target.d(values[a], values[b]) / space.d(points[a], points[b]));
        }
    }
    best
}

/// `(min constant, lexicographically first minimizer)` over all assignments of `free`.
pub fn best_extension(
    space: &FiniteMetricSpace,
    fixed: &[(usize, usize)],
    free: &[usize],
    target: &FiniteMetricSpace,
) -> (f64, Vec<usize>) {
    let mut points: Vec<usize> = fixed.iter().map(|p| p.0).collect();
    points.extend_from_slice(free);
    let mut best = (f64::INFINITY, Vec::new());
    for a in assignments(target.size(), free.len()) {
        let mut values: Vec<usize> = fixed.iter().map(|p| p.1).collect();
        values.extend_from_slice(&a);
        let c = lip(space, &points, &values, target);
        if c < best.0 {
            best = (c, a);
        }
    }
    best
}

/// `e(U, S; N)` for the subspace on `universe`, by double enumeration.
pub fn naive_e(space: &FiniteMetricSpace, universe: &[usize], subset: &[usize], target: &FiniteMetricSpace) -> f64 {
    let free: Vec<usize> = universe.iter().copied().filter(|p| !subset.contains(p)).collect();
    let mut best = 1.0_f64;
    for phi in assignments(target.size(), subset.len()) {
        let l = lip(space, subset, &phi, target);
        if l == 0.0 {
            continue;
        }
        let fixed: Vec<(usize, usize)> = subset.iter().copied().zip(phi).collect();
        let (c, _) = best_extension(space, &fixed, &free, target);
        best = best.max(c / l);
    }
    best
}

fn subsets(points: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (1u32..(1 << points.len())).map(move |m| {
        points
            .iter()
            .enumerate()
            .filter(|(i, _)| m >> i & 1 == 1)
            .map(|(_, &p)| p)
            .collect()
    })
}

pub fn naive_e_n(space: &FiniteMetricSpace, n: usize, target: &FiniteMetricSpace) -> f64 {
    let all: Vec<usize> = (0..space.size()).collect();
    subsets(&all)
        .filter(|s| s.len() <= n)
        .map(|s| naive_e(space, &all, &s, target))
        .fold(1.0, f64::max)
}

pub fn naive_e_up_n(space: &FiniteMetricSpace, n: usize, target: &FiniteMetricSpace) -> f64 {
    let all: Vec<usize> = (0..space.size()).collect();
    let mut best = 1.0_f64;
    for s in subsets(&all) {
        let rest: Vec<usize> = all.iter().copied().filter(|p| !s.contains(p)).collect();
        for x in subsets(&rest).filter(|x| x.len() <= n) {
            let mut universe: Vec<usize> = s.iter().chain(&x).copied().collect();
            universe.sort_unstable();
            best = best.max(naive_e(space, &universe, &s, target));
        }
    }
    best
}

/// Minimizer of a unimodal `f` on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..iters {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}
