#![allow(dead_code)]
//! Independent oracles shared by the integration tests.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use liemf::rootsys::RootSystem;
use liemf::Weight;

pub fn w(v: &[i32]) -> Weight {
    Weight::from_slice(v)
}

/// Elements of the Weyl group as (image of a regular weight, length parity)
/// by breadth-first search on words; the BFS distance is the length.
pub fn weyl_group(r: &RootSystem) -> Vec<(Vec<Vec<i32>>, i32)> {
    // Represent group elements by their action on the fundamental weights
    // (columns), composing simple reflections explicitly.
    let n = r.rank();
    let a = r.cartan_matrix();
    let reflect = |v: &Vec<i32>, i: usize| -> Vec<i32> {
        let vi = v[i];
        (0..n).map(|j| v[j] - vi * a[i][j]).collect()
    };
    let ident: Vec<Vec<i32>> = (0..n).map(|k| (0..n).map(|j| (j == k) as i32).collect()).collect();
    let mut seen: HashSet<Vec<Vec<i32>>> = HashSet::new();
    let mut out = Vec::new();
    let mut q = VecDeque::new();
    seen.insert(ident.clone());
    q.push_back((ident, 0usize));
    while let Some((g, len)) = q.pop_front() {
        out.push((g.clone(), if len % 2 == 0 { 1 } else { -1 }));
        for i in 0..n {
            let h: Vec<Vec<i32>> = g.iter().map(|col| reflect(col, i)).collect();
            if seen.insert(h.clone()) {
                q.push_back((h, len + 1));
            }
        }
    }
    out
}

pub fn act(g: &[Vec<i32>], v: &[i32]) -> Vec<i32> {
    let n = v.len();
    let mut out = vec![0; n];
    for k in 0..n {
        for j in 0..n {
            out[j] += v[k] * g[k][j];
        }
    }
    out
}

/// Positive roots in simple coordinates from the ε-description.
pub fn simple_coords_of_weight(r: &RootSystem, wt: &[i32]) -> Vec<i32> {
    // Solve c·A = wt by brute search using rational Gaussian elimination.
    let n = r.rank();
    let a = r.cartan_matrix();
    let mut m: Vec<Vec<f64>> = (0..n).map(|j| {
        let mut row: Vec<f64> = (0..n).map(|i| a[i][j] as f64).collect();
        row.push(wt[j] as f64);
        row
    }).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| m[x][c].abs().partial_cmp(&m[y][c].abs()).unwrap()).unwrap();
        m.swap(c, p);
        let pv = m[c][c];
        for k in c..=n {
            m[c][k] /= pv;
        }
        for rr in 0..n {
            if rr != c {
                let f = m[rr][c];
                for k in c..=n {
                    m[rr][k] -= f * m[c][k];
                }
            }
        }
    }
    (0..n).map(|i| m[i][n].round() as i32).collect()
}

/// Kostant partition function on simple-root coordinates.
pub struct Kostant {
    roots: Vec<Vec<i32>>,
    memo: HashMap<(Vec<i32>, usize), i64>,
}

impl Kostant {
    pub fn new(r: &RootSystem) -> Self {
        let roots = r.positive_roots().iter().map(|x| x.simple.to_vec()).collect();
        Kostant { roots, memo: HashMap::new() }
    }

    pub fn count(&mut self, g: &[i32], from: usize) -> i64 {
        if g.iter().any(|&x| x < 0) {
            return 0;
        }
        if g.iter().all(|&x| x == 0) {
            return 1;
        }
        if from == self.roots.len() {
            return 0;
        }
        let key = (g.to_vec(), from);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let mut total = 0;
        let mut cur = g.to_vec();
        loop {
            total += self.count(&cur, from + 1);
            let root = &self.roots[from];
            for (c, x) in cur.iter_mut().zip(root) {
                *c -= x;
            }
            if cur.iter().any(|&x| x < 0) {
                break;
            }
        }
        self.memo.insert(key, total);
        total
    }
}

/// Multiplicity of `mu` in `V(lambda)` by Kostant's alternating formula.
pub fn kostant_mult(r: &RootSystem, group: &[(Vec<Vec<i32>>, i32)], k: &mut Kostant, lambda: &[i32], mu: &[i32]) -> i64 {
    let n = r.rank();
    let lr: Vec<i32> = lambda.iter().map(|x| x + 1).collect();
    let mut total = 0;
    for (g, s) in group {
        let img = act(g, &lr);
        let diff: Vec<i32> = (0..n).map(|j| img[j] - mu[j] - 1).collect();
        let c = simple_coords_of_weight(r, &diff);
        total += *s as i64 * k.count(&c, 0);
    }
    total
}

/// Full weight multiset of V(λ) computed by Kostant's formula on the
/// dominant weights and orbit images via the brute-force group.
pub fn full_weights(r: &RootSystem, group: &[(Vec<Vec<i32>>, i32)], lambda: &[i32]) -> BTreeMap<Vec<i32>, i64> {
    let mut k = Kostant::new(r);
    let n = r.rank();
    let mut out = BTreeMap::new();
    // Dominant weights below λ: search by subtracting simple roots.
    let a = r.cartan_matrix();
    let mut seen = HashSet::new();
    let mut q = VecDeque::from([lambda.to_vec()]);
    seen.insert(lambda.to_vec());
    while let Some(v) = q.pop_front() {
        if v.iter().all(|&x| x >= 0) {
            let m = kostant_mult(r, group, &mut k, lambda, &v);
            if m > 0 {
                out.insert(v.clone(), m);
            }
        }
        for i in 0..n {
            let u: Vec<i32> = (0..n).map(|j| v[j] - a[i][j]).collect();
            // Stay inside the convex hull bound: the dominant conjugate of
            // u must be ≤ λ; cheap proxy is to require the orbit image test
            // at insertion by checking the Kostant multiplicity later.
            if u.iter().map(|x| x.abs()).sum::<i32>() <= 4 * lambda.iter().sum::<i32>() + 4 && seen.insert(u.clone()) {
                q.push_back(u);
            }
        }
    }
    let dom: Vec<(Vec<i32>, i64)> = out.into_iter().collect();
    let mut full = BTreeMap::new();
    for (d, m) in dom {
        let orbit: HashSet<Vec<i32>> = group.iter().map(|(g, _)| act(g, &d)).collect();
        for o in orbit {
            full.insert(o, m);
        }
    }
    full
}
