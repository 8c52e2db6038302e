//! Dense reference implementations written from the definitions, sharing no
//! code with the library beyond reading the complex's links and triangles.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use hodgelink_core::SimplicialComplex;
use nalgebra::{DMatrix, DVector};

pub fn link_index(x: &SimplicialComplex) -> BTreeMap<(usize, usize), usize> {
    x.links().iter().enumerate().map(|(k, l)| ((l.lo, l.hi), k)).collect()
}

pub fn b1(x: &SimplicialComplex) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(x.n0(), x.n1());
    for (k, l) in x.links().iter().enumerate() {
        m[(l.lo, k)] = -1.0;
        m[(l.hi, k)] = 1.0;
    }
    m
}

/// Boundary of [a,b,c] is [b,c] - [a,c] + [a,b].
pub fn b2(x: &SimplicialComplex) -> DMatrix<f64> {
    let idx = link_index(x);
    let mut m = DMatrix::zeros(x.n1(), x.n2());
    for (t, tri) in x.triangles().iter().enumerate() {
        let mut v = [tri.a, tri.b, tri.c];
        v.sort_unstable();
        let [a, b, c] = v;
        m[(idx[&(b, c)], t)] += 1.0;
        m[(idx[&(a, c)], t)] -= 1.0;
        m[(idx[&(a, b)], t)] += 1.0;
    }
    m
}

pub fn l1(x: &SimplicialComplex) -> DMatrix<f64> {
    let b1 = b1(x);
    let b2 = b2(x);
    b1.transpose() * &b1 + &b2 * b2.transpose()
}

pub fn d_tot(x: &SimplicialComplex) -> Vec<f64> {
    let mut deg = vec![0usize; x.n0()];
    for l in x.links() {
        deg[l.lo] += 1;
        deg[l.hi] += 1;
    }
    let idx = link_index(x);
    let mut up = vec![0usize; x.n1()];
    for tri in x.triangles() {
        let mut v = [tri.a, tri.b, tri.c];
        v.sort_unstable();
        for (p, q) in [(v[0], v[1]), (v[0], v[2]), (v[1], v[2])] {
            up[idx[&(p, q)]] += 1;
        }
    }
    x.links()
        .iter()
        .enumerate()
        .map(|(k, l)| (deg[l.lo] + deg[l.hi] + 3 * up[k]) as f64)
        .collect()
}

pub fn normalized_l1(x: &SimplicialComplex) -> DMatrix<f64> {
    let d = d_tot(x);
    let mut m = l1(x);
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            m[(r, c)] /= d[c];
        }
    }
    m
}

/// Tail and head of oriented state `s`; states below `n1` follow the
/// ascending reference orientation.
pub fn endpoints(x: &SimplicialComplex, s: usize) -> (usize, usize) {
    let n1 = x.n1();
    let l = x.links()[s % n1];
    if s < n1 {
        (l.lo, l.hi)
    } else {
        (l.hi, l.lo)
    }
}

/// Lifted adjacency built combinatorially: a lower edge for every node that
/// is the tail of one state and the head of the other, an upper edge for
/// every triangle that one state traverses along its cyclic orientation and
/// the other against it, and the total degree on the diagonal.
pub fn lifted_adjacency(x: &SimplicialComplex) -> DMatrix<f64> {
    let n1 = x.n1();
    let n = 2 * n1;
    let mut a = DMatrix::zeros(n, n);
    let mut tails = vec![Vec::new(); x.n0()];
    let mut heads = vec![Vec::new(); x.n0()];
    for s in 0..n {
        let (t, h) = endpoints(x, s);
        tails[t].push(s);
        heads[h].push(s);
    }
    for v in 0..x.n0() {
        for &s in &tails[v] {
            for &r in &heads[v] {
                a[(s, r)] += 1.0;
                a[(r, s)] += 1.0;
            }
        }
    }
    let idx = link_index(x);
    let state = |p: usize, q: usize| match idx.get(&(p, q)) {
        Some(&k) => k,
        None => idx[&(q, p)] + n1,
    };
    for tri in x.triangles() {
        let mut v = [tri.a, tri.b, tri.c];
        v.sort_unstable();
        let cycle = [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])];
        let along: Vec<usize> = cycle.iter().map(|&(p, q)| state(p, q)).collect();
        let against: Vec<usize> = cycle.iter().map(|&(p, q)| state(q, p)).collect();
        for &s in &along {
            for &r in &against {
                a[(s, r)] += 1.0;
                a[(r, s)] += 1.0;
            }
        }
    }
    for (k, d) in d_tot(x).into_iter().enumerate() {
        a[(k, k)] += d;
        a[(k + n1, k + n1)] += d;
    }
    a
}

pub fn column_stochastic(a: &DMatrix<f64>) -> DMatrix<f64> {
    let mut p = a.clone();
    for c in 0..p.ncols() {
        let s: f64 = a.column(c).sum();
        p.column_mut(c).scale_mut(1.0 / s);
    }
    p
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// `P^t e_start` by repeated multiplication.
pub fn walk_column(p: &DMatrix<f64>, start: usize, t: usize) -> DVector<f64> {
    let mut v = DVector::zeros(p.nrows());
    v[start] = 1.0;
    for _ in 0..t {
        v = p * v;
    }
    v
}

/// Gaussian elimination modulo a large prime.
pub fn rank_mod_p(m: &DMatrix<f64>) -> usize {
    const P: i64 = 2_147_483_647;
    let mut a: Vec<Vec<i64>> = (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| (m[(r, c)] as i64).rem_euclid(P)).collect())
        .collect();
    let inv = |v: i64| {
        let (mut b, mut e, mut r) = (v, P - 2, 1i64);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % P;
            }
            b = b * b % P;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for c in 0..m.ncols() {
        let Some(p) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, p);
        let f = inv(a[rank][c]);
        let pivot: Vec<i64> = a[rank].iter().map(|v| v * f % P).collect();
        for r in 0..a.len() {
            if r != rank && a[r][c] != 0 {
                let k = a[r][c];
                for (x, y) in a[r].iter_mut().zip(&pivot) {
                    *x = (*x - k * y).rem_euclid(P);
                }
            }
        }
        a[rank] = pivot;
        rank += 1;
    }
    rank
}

pub fn components(x: &SimplicialComplex) -> usize {
    let mut parent: Vec<usize> = (0..x.n0()).collect();
    fn find(p: &mut [usize], v: usize) -> usize {
        let mut r = v;
        while p[r] != r {
            r = p[r];
        }
        p[v] = r;
        r
    }
    for l in x.links() {
        let (a, b) = (find(&mut parent, l.lo), find(&mut parent, l.hi));
        parent[a] = b;
    }
    (0..x.n0()).filter(|&v| find(&mut parent, v) == v).count()
}

/// Community ids of the links around each node, keeping only communities
/// whose links touch at least three distinct nodes.
pub fn memberships(x: &SimplicialComplex, assignment: &[usize]) -> Vec<BTreeSet<usize>> {
    let mut nodes: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (l, &c) in x.links().iter().zip(assignment) {
        nodes.entry(c).or_default().extend([l.lo, l.hi]);
    }
    let mut out = vec![BTreeSet::new(); x.n0()];
    for (l, &c) in x.links().iter().zip(assignment) {
        if nodes[&c].len() >= 3 {
            out[l.lo].insert(c);
            out[l.hi].insert(c);
        }
    }
    out
}

pub fn enrichment(x: &SimplicialComplex, assignment: &[usize], labels: &BTreeMap<u64, String>) -> Option<f64> {
    let m = memberships(x, assignment);
    let nodes: Vec<usize> = (0..x.n0()).filter(|&i| labels.contains_key(&x.original_id(i))).collect();
    let same = |i: usize, j: usize| f64::from(u8::from(labels[&x.original_id(i)] == labels[&x.original_id(j)]));
    let mut all = Vec::new();
    let mut within = Vec::new();
    for (p, &i) in nodes.iter().enumerate() {
        for &j in &nodes[p + 1..] {
            all.push(same(i, j));
            if m[i].intersection(&m[j]).next().is_some() {
                within.push(same(i, j));
            }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    if within.is_empty() || all.iter().all(|&s| s == 0.0) {
        return None;
    }
    Some(mean(&within) / mean(&all))
}

pub fn bins(values: &[f64]) -> Vec<i64> {
    if values.iter().all(|v| v.fract() == 0.0) {
        return values.iter().map(|&v| v as i64).collect();
    }
    let distinct: BTreeSet<u64> = values.iter().map(|v| v.to_bits()).collect();
    let b = distinct.len().min(8);
    let n = values.len();
    values
        .iter()
        .map(|v| {
            let below = values.iter().filter(|w| *w < v).count();
            (b * below / n).min(b - 1) as i64
        })
        .collect()
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// I(A;B) = H(A) + H(B) - H(A,B) from the full contingency table.
pub fn mutual_information(a: &[i64], b: &[i64]) -> f64 {
    let n = a.len() as f64;
    let mut table: BTreeMap<i64, BTreeMap<i64, usize>> = BTreeMap::new();
    for (&p, &q) in a.iter().zip(b) {
        *table.entry(p).or_default().entry(q).or_default() += 1;
    }
    let mut cols: BTreeMap<i64, usize> = BTreeMap::new();
    for row in table.values() {
        for (&q, &c) in row {
            *cols.entry(q).or_default() += c;
        }
    }
    let h_a = entropy(table.values().map(|r| r.values().sum()), n);
    let h_b = entropy(cols.values().copied(), n);
    let h_ab = entropy(table.values().flat_map(|r| r.values().copied()), n);
    h_a + h_b - h_ab
}

pub fn overlap_quality(x: &SimplicialComplex, assignment: &[usize], overlap: &BTreeMap<u64, f64>) -> Option<f64> {
    let m = memberships(x, assignment);
    let (a, y): (Vec<i64>, Vec<f64>) = (0..x.n0())
        .filter_map(|i| overlap.get(&x.original_id(i)).map(|&v| (m[i].len() as i64, v)))
        .unzip();
    if a.is_empty() {
        return None;
    }
    Some(mutual_information(&a, &bins(&y)))
}

pub fn community_coverage(x: &SimplicialComplex, assignment: &[usize]) -> f64 {
    let m = memberships(x, assignment);
    m.iter().filter(|s| !s.is_empty()).count() as f64 / m.len() as f64
}

pub fn overlap_coverage(x: &SimplicialComplex, assignment: &[usize]) -> f64 {
    let m = memberships(x, assignment);
    m.iter().map(|s| s.len() as f64).sum::<f64>() / m.len() as f64
}

/// Modularity of a dense symmetric matrix whose row sums are the degrees.
pub fn modularity(a: &DMatrix<f64>, assignment: &[usize]) -> f64 {
    let k: Vec<f64> = (0..a.nrows()).map(|i| a.row(i).sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if assignment[i] == assignment[j] {
                q += a[(i, j)] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Markov stability: sum over communities of (Pi T^t - pi pi^T), with
/// T = D^-1 A the row-stochastic walk on the graph.
pub fn markov_stability(a: &DMatrix<f64>, assignment: &[usize], t: usize) -> f64 {
    let n = a.nrows();
    let k: Vec<f64> = (0..n).map(|i| a.row(i).sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut step = a.clone();
    for i in 0..n {
        step.row_mut(i).scale_mut(1.0 / k[i]);
    }
    let mut power = DMatrix::identity(n, n);
    for _ in 0..t {
        power = &power * &step;
    }
    let mut r = 0.0;
    for i in 0..n {
        for j in 0..n {
            if assignment[i] == assignment[j] {
                r += k[i] / two_m * power[(i, j)] - k[i] * k[j] / (two_m * two_m);
            }
        }
    }
    r
}

/// Exhaustive maximum of modularity over all set partitions of `n` items.
pub fn best_partition(a: &DMatrix<f64>) -> (f64, Vec<usize>) {
    let n = a.nrows();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    let mut current = vec![0usize; n];
    fn rec(i: usize, used: usize, cur: &mut Vec<usize>, a: &DMatrix<f64>, best: &mut (f64, Vec<usize>)) {
        if i == cur.len() {
            let q = modularity(a, cur);
            if q > best.0 + 1e-12 {
                *best = (q, cur.clone());
            }
            return;
        }
        for c in 0..=used {
            cur[i] = c;
            rec(i + 1, used.max(c + 1), cur, a, best);
        }
    }
    if n > 0 {
        rec(1, 1, &mut current, a, &mut best);
    }
    best
}
