//! Root systems of types A–D (and Levi subsystems of them), simple
//! reflections, dominant conjugation and Weyl orbit enumeration.

use std::collections::VecDeque;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use rustc_hash::{FxHashMap, FxHashSet};
use smallvec::SmallVec;

use crate::charcalc::DominantCharacter;
use crate::error::{Error, Result};
use crate::weight::{EpsCoords, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
        }
    }

    pub fn from_letter(c: char) -> Option<Family> {
        match c.to_ascii_uppercase() {
            'A' => Some(Family::A),
            'B' => Some(Family::B),
            'C' => Some(Family::C),
            'D' => Some(Family::D),
            _ => None,
        }
    }

    pub fn min_rank(self) -> usize {
        match self {
            Family::A => 1,
            Family::B | Family::C => 2,
            Family::D => 3,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A positive root with the data the character algorithms need.
#[derive(Debug, Clone)]
pub struct Root {
    /// Coefficients in the simple roots.
    pub simple: SmallVec<[i32; 8]>,
    /// The root in fundamental-weight coordinates.
    pub weight: Weight,
    /// Coefficients of the coroot in the simple coroots.
    pub coroot: SmallVec<[i32; 8]>,
    /// Indices with nonzero simple coefficient, paired with `simple[j] * sym[j]`.
    pub form: SmallVec<[(u32, i64); 8]>,
}

impl Root {
    /// `⟨w, β^∨⟩`.
    #[inline]
    pub fn pair_coroot(&self, w: &Weight) -> i64 {
        self.coroot.iter().zip(w.iter()).map(|(&c, &x)| c as i64 * x as i64).sum()
    }

    /// `(w, β)` in the normalization where `(α_i, α_i) = 2·sym[i]`.
    #[inline]
    pub fn pair_form(&self, w: &Weight) -> i64 {
        self.form.iter().map(|&(j, c)| c * w[j as usize] as i64).sum()
    }
}

pub struct RootSystem {
    family: Option<Family>,
    rank: usize,
    cartan: Vec<i32>,
    sym: Vec<i64>,
    neighbors: Vec<SmallVec<[(usize, i32); 3]>>,
    roots: OnceLock<Vec<Root>>,
    height_coef: OnceLock<Vec<i64>>,
    pub(crate) char_cache: Mutex<FxHashMap<Weight, Arc<DominantCharacter>>>,
}

impl fmt::Debug for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl PartialEq for RootSystem {
    fn eq(&self, o: &Self) -> bool {
        self.cartan == o.cartan && self.rank == o.rank
    }
}

/// Standard Cartan matrix (Bourbaki numbering), `A[i][j] = ⟨α_i, α_j^∨⟩`.
fn classical_cartan(family: Family, n: usize) -> (Vec<i32>, Vec<i64>) {
    let mut a = vec![0i32; n * n];
    for i in 0..n {
        a[i * n + i] = 2;
    }
    let mut link = |i: usize, j: usize, aij: i32, aji: i32| {
        a[i * n + j] = aij;
        a[j * n + i] = aji;
    };
    let mut sym = vec![1i64; n];
    match family {
        Family::A => (0..n.saturating_sub(1)).for_each(|i| link(i, i + 1, -1, -1)),
        Family::B => {
            (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
            link(n - 2, n - 1, -2, -1);
            sym.iter_mut().take(n - 1).for_each(|h| *h = 2);
        }
        Family::C => {
            (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
            link(n - 2, n - 1, -1, -2);
            sym[n - 1] = 2;
        }
        Family::D => {
            (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
            link(n - 3, n - 1, -1, -1);
        }
    }
    (a, sym)
}

pub fn build_root_system(family: Family, rank: usize) -> Result<RootSystem> {
    if rank < family.min_rank() {
        return Err(Error::InvalidRank { family: family.letter(), rank });
    }
    let (cartan, sym) = classical_cartan(family, rank);
    Ok(RootSystem::from_parts(Some(family), rank, cartan, sym))
}

impl RootSystem {
    pub fn new(family: Family, rank: usize) -> Result<Arc<RootSystem>> {
        build_root_system(family, rank).map(Arc::new)
    }

    fn from_parts(family: Option<Family>, rank: usize, cartan: Vec<i32>, sym: Vec<i64>) -> RootSystem {
        let neighbors = (0..rank)
            .map(|i| (0..rank).filter(|&j| j != i && cartan[i * rank + j] != 0).map(|j| (j, cartan[i * rank + j])).collect())
            .collect();
        RootSystem {
            family,
            rank,
            cartan,
            sym,
            neighbors,
            roots: OnceLock::new(),
            height_coef: OnceLock::new(),
            char_cache: Mutex::new(FxHashMap::default()),
        }
    }

    /// Subsystem spanned by the simple roots `indices` (ascending), with the
    /// symmetrizer inherited from `self`. It carries a family only when the
    /// induced numbering is the standard one.
    pub fn subsystem(&self, indices: &[usize]) -> RootSystem {
        let r = indices.len();
        let mut cartan = vec![0; r * r];
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                cartan[a * r + b] = self.cartan(i, j);
            }
        }
        let sym: Vec<i64> = indices.iter().map(|&i| self.sym[i]).collect();
        let comps = classify(r, &cartan, &sym);
        let family = match comps.as_slice() {
            [(f, n, _)] if *n == r && r >= f.min_rank() && classical_cartan(*f, r).0 == cartan => Some(*f),
            _ => None,
        };
        RootSystem::from_parts(family, r, cartan, sym)
    }

    pub fn family(&self) -> Option<Family> {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn cartan(&self, i: usize, j: usize) -> i32 {
        self.cartan[i * self.rank + j]
    }

    pub fn cartan_matrix(&self) -> Vec<Vec<i32>> {
        (0..self.rank).map(|i| self.cartan[i * self.rank..(i + 1) * self.rank].to_vec()).collect()
    }

    /// Half squared lengths of the simple roots (integral symmetrizer).
    pub fn sym(&self) -> &[i64] {
        &self.sym
    }

    pub fn rho(&self) -> Weight {
        Weight(SmallVec::from_elem(1, self.rank))
    }

    pub fn zero(&self) -> Weight {
        Weight::zero(self.rank)
    }

    /// Dimension of the ε-space (`rank + 1` for A, `rank` otherwise).
    pub fn eps_dim(&self) -> usize {
        match self.family {
            Some(Family::A) => self.rank + 1,
            _ => self.rank,
        }
    }

    pub fn name(&self) -> String {
        match self.family {
            Some(f) => format!("{}{}", f.letter(), self.rank),
            None => {
                let comps = self.components();
                if comps.is_empty() {
                    return "T".into();
                }
                comps.iter().map(|(f, n, _)| format!("{}{}", f.letter(), n)).collect::<Vec<_>>().join("x")
            }
        }
    }

    /// Simple factors as (family, rank, ascending node indices).
    pub fn components(&self) -> Vec<(Family, usize, Vec<usize>)> {
        classify(self.rank, &self.cartan, &self.sym)
    }

    /// The simple root α_i (0-based) in fundamental coordinates.
    pub fn simple_root(&self, i: usize) -> Weight {
        Weight::from_slice(&self.cartan[i * self.rank..(i + 1) * self.rank])
    }

    /// Converts simple-root coefficients to a weight.
    pub fn weight_of_simple(&self, coeffs: &[i32]) -> Weight {
        let mut w = self.zero();
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                for j in 0..self.rank {
                    w[j] += c * self.cartan(i, j);
                }
            }
        }
        w
    }

    /// In-place simple reflection `s_i`.
    #[inline]
    pub fn reflect(&self, w: &mut Weight, i: usize) {
        let wi = w[i];
        if wi == 0 {
            return;
        }
        w[i] = -wi;
        for &(j, a) in &self.neighbors[i] {
            w[j] -= wi * a;
        }
    }

    /// Simple neighbours of node `i` with their Cartan entries `A[i][j]`.
    pub fn neighbors(&self, i: usize) -> &[(usize, i32)] {
        &self.neighbors[i]
    }

    /// Dominant conjugate together with the parity of the conjugating element.
    pub fn to_dominant(&self, w: &Weight) -> (Weight, i32) {
        let mut v = w.clone();
        let mut sign = 1;
        loop {
            let Some(i) = v.0.iter().position(|&c| c < 0) else { break };
            self.reflect(&mut v, i);
            sign = -sign;
        }
        (v, sign)
    }

    /// Dominant conjugate with sign `(-1)^ℓ(w)`, or sign 0 when `w` lies on a
    /// reflection wall.
    pub fn dominant_conjugate(&self, w: &Weight) -> (Weight, i32) {
        let (v, sign) = self.to_dominant(w);
        if v.iter().any(|&c| c == 0) {
            (v, 0)
        } else {
            (v, sign)
        }
    }

    /// Lazily generated positive roots, ordered by height.
    pub fn positive_roots(&self) -> &[Root] {
        self.roots.get_or_init(|| self.generate_roots())
    }

    fn generate_roots(&self) -> Vec<Root> {
        let r = self.rank;
        let mut all: Vec<SmallVec<[i32; 8]>> = Vec::new();
        let mut seen: FxHashSet<SmallVec<[i32; 8]>> = FxHashSet::default();
        let mut layer: Vec<SmallVec<[i32; 8]>> = (0..r)
            .map(|i| {
                let mut v = SmallVec::from_elem(0, r);
                v[i] = 1;
                v
            })
            .collect();
        for v in &layer {
            seen.insert(v.clone());
        }
        while !layer.is_empty() {
            all.extend(layer.iter().cloned());
            let mut next = Vec::new();
            for beta in &layer {
                for i in 0..r {
                    let pairing: i32 = (0..r).map(|j| beta[j] * self.cartan(j, i)).sum();
                    let mut p = 0;
                    let mut probe = beta.clone();
                    loop {
                        probe[i] -= 1;
                        if probe[i] < 0 || !seen.contains(&probe) {
                            break;
                        }
                        p += 1;
                    }
                    if p - pairing > 0 {
                        let mut up = beta.clone();
                        up[i] += 1;
                        if seen.insert(up.clone()) {
                            next.push(up);
                        }
                    }
                }
            }
            layer = next;
        }
        all.into_iter()
            .map(|simple| {
                let weight = self.weight_of_simple(&simple);
                let norm2: i64 = (0..r).map(|j| simple[j] as i64 * self.sym[j] * weight[j] as i64).sum();
                let half = norm2 / 2;
                let coroot = (0..r).map(|j| (simple[j] as i64 * self.sym[j] / half) as i32).collect();
                let form = (0..r)
                    .filter(|&j| simple[j] != 0)
                    .map(|j| (j as u32, simple[j] as i64 * self.sym[j]))
                    .collect();
                Root { simple, weight, coroot, form }
            })
            .collect()
    }

    /// `(x, y)` where `y` is given by its simple-root coefficients.
    pub fn form_with_simple(&self, x: &Weight, y_simple: &[i32]) -> i64 {
        (0..self.rank).map(|j| x[j] as i64 * y_simple[j] as i64 * self.sym[j]).sum()
    }

    /// Coefficients of `2ρ^∨` in the simple coroots; `⟨μ, 2ρ^∨⟩` is a strictly
    /// monotone height function on weights.
    pub fn height_coef(&self) -> &[i64] {
        self.height_coef.get_or_init(|| {
            let mut h = vec![0i64; self.rank];
            for r in self.positive_roots() {
                for (j, &c) in r.coroot.iter().enumerate() {
                    h[j] += c as i64;
                }
            }
            h
        })
    }

    pub fn height(&self, w: &Weight) -> i64 {
        self.height_coef().iter().zip(w.iter()).map(|(&h, &c)| h * c as i64).sum()
    }

    pub fn weyl_group_order(&self) -> BigUint {
        let fact = |n: usize| (1..=n as u64).fold(BigUint::from(1u32), |a, b| a * b);
        let mut total = BigUint::from(1u32);
        for (f, n, _) in self.components() {
            total *= match f {
                Family::A => fact(n + 1),
                Family::B | Family::C => fact(n) << n,
                Family::D => fact(n) << (n - 1),
            };
        }
        total
    }

    /// Orbit of a dominant weight; each element is produced exactly once.
    pub fn weyl_orbit(&self, w: &Weight) -> Result<Orbit<'_>> {
        if !w.is_dominant() {
            return Err(Error::NotDominant(w.to_string()));
        }
        Ok(Orbit { sys: self, stack: vec![w.clone()] })
    }

    /// Orbit enumeration restarted below an arbitrary orbit element: yields
    /// `w` and all its descendants in the canonical-parent tree.
    pub fn orbit_subtree(&self, w: Weight) -> Orbit<'_> {
        Orbit { sys: self, stack: vec![w] }
    }

    /// Children of `v` in the canonical-parent tree.
    #[inline]
    pub fn orbit_children(&self, v: &Weight, out: &mut Vec<Weight>) {
        for i in 0..self.rank {
            if v[i] > 0 {
                let mut u = v.clone();
                self.reflect(&mut u, i);
                if u.iter().position(|&c| c < 0) == Some(i) {
                    out.push(u);
                }
            }
        }
    }

    /// Splits the orbit tree of `w` into independently enumerable subtrees:
    /// returns (interior nodes, subtree roots) with at least `min_roots`
    /// roots when the orbit is large enough.
    pub fn orbit_split(&self, w: &Weight, min_roots: usize) -> (Vec<Weight>, Vec<Weight>) {
        let mut interior = Vec::new();
        let mut frontier = VecDeque::from([w.clone()]);
        let mut kids = Vec::new();
        while !frontier.is_empty() && frontier.len() < min_roots {
            let v = frontier.pop_front().expect("nonempty");
            kids.clear();
            self.orbit_children(&v, &mut kids);
            frontier.extend(kids.drain(..));
            interior.push(v);
        }
        (interior, frontier.into())
    }

    /// Orbit of `w` under the Weyl group, tracking `depth` (simple-root
    /// coefficients of `w - v`).
    pub fn orbit_with_depth(&self, w: &Weight) -> Vec<(Weight, SmallVec<[i32; 8]>)> {
        let mut out = Vec::new();
        let mut stack = vec![(w.clone(), SmallVec::from_elem(0, self.rank))];
        while let Some((v, d)) = stack.pop() {
            for i in 0..self.rank {
                if v[i] > 0 {
                    let mut u = v.clone();
                    self.reflect(&mut u, i);
                    if u.iter().position(|&c| c < 0) == Some(i) {
                        let mut e = d.clone();
                        e[i] += v[i];
                        stack.push((u, e));
                    }
                }
            }
            out.push((v, d));
        }
        out
    }

    pub fn to_eps(&self, w: &Weight) -> Result<EpsCoords> {
        let n = self.rank;
        let f = self.family.ok_or_else(|| Error::NotApplicable("eps coordinates need a simple classical system".into()))?;
        let w: Vec<i64> = w.iter().map(|&c| c as i64).collect();
        let mut e = vec![0i64; self.eps_dim()];
        match f {
            Family::A => {
                let mut acc = 0;
                for k in (0..n).rev() {
                    acc += w[k];
                    e[k] = 2 * acc;
                }
            }
            Family::B => {
                let mut acc = w[n - 1];
                for k in (0..n).rev() {
                    if k < n - 1 {
                        acc += 2 * w[k];
                    }
                    e[k] = acc;
                }
            }
            Family::C => {
                let mut acc = 0;
                for k in (0..n).rev() {
                    acc += w[k];
                    e[k] = 2 * acc;
                }
            }
            Family::D => {
                let spin = w[n - 2] + w[n - 1];
                e[n - 1] = w[n - 1] - w[n - 2];
                let mut acc = spin;
                for k in (0..n - 1).rev() {
                    if k < n - 2 {
                        acc += 2 * w[k];
                    }
                    e[k] = acc;
                }
            }
        }
        Ok(EpsCoords(e))
    }

    pub fn from_eps(&self, e: &EpsCoords) -> Result<Weight> {
        let n = self.rank;
        let f = self.family.ok_or_else(|| Error::NotApplicable("eps coordinates need a simple classical system".into()))?;
        let e = e.doubled();
        let bad = || Error::NonRepresentable(format!("{:?}", e));
        if e.len() != self.eps_dim() {
            return Err(bad());
        }
        let half = |x: i64| if x % 2 == 0 { Ok(x / 2) } else { Err(bad()) };
        let mut w = vec![0i64; n];
        match f {
            Family::A => {
                for i in 0..n {
                    w[i] = half(e[i] - e[i + 1])?;
                }
            }
            Family::B => {
                for i in 0..n - 1 {
                    w[i] = half(e[i] - e[i + 1])?;
                }
                w[n - 1] = e[n - 1];
            }
            Family::C => {
                if e.iter().any(|x| x % 2 != 0) {
                    return Err(bad());
                }
                for i in 0..n - 1 {
                    w[i] = half(e[i] - e[i + 1])?;
                }
                w[n - 1] = half(e[n - 1])?;
            }
            Family::D => {
                for i in 0..n - 1 {
                    w[i] = half(e[i] - e[i + 1])?;
                }
                w[n - 1] = half(e[n - 2] + e[n - 1])?;
            }
        }
        let w: Vec<i32> = w.into_iter().map(|x| i32::try_from(x).map_err(|_| bad())).collect::<Result<_>>()?;
        Ok(Weight::from(w))
    }

    /// `−w_0` applied to a weight.
    pub fn dual_weight(&self, w: &Weight) -> Weight {
        let mut out = w.clone();
        for (f, n, nodes) in self.components() {
            match f {
                Family::A => {
                    for k in 0..n {
                        out[nodes[k]] = w[nodes[n - 1 - k]];
                    }
                }
                Family::D if n % 2 == 1 => {
                    out[nodes[n - 2]] = w[nodes[n - 1]];
                    out[nodes[n - 1]] = w[nodes[n - 2]];
                }
                _ => {}
            }
        }
        out
    }

    /// Drops cached characters.
    pub fn clear_cache(&self) {
        self.char_cache.lock().expect("cache lock").clear();
    }
}

/// Depth-first orbit enumeration where `u` is accepted as a child of
/// `v = s_i u` iff `i` is the first negative coordinate of `u`.
pub struct Orbit<'a> {
    sys: &'a RootSystem,
    stack: Vec<Weight>,
}

impl Iterator for Orbit<'_> {
    type Item = Weight;
    fn next(&mut self) -> Option<Weight> {
        let v = self.stack.pop()?;
        self.sys.orbit_children(&v, &mut self.stack);
        Some(v)
    }
}

/// Connected components of a Cartan matrix, each identified as A–D.
/// Ambiguous small cases are named A1, B2 (= C2 with the same numbering
/// convention as a B-tail) and A3 (= D3).
fn classify(r: usize, cartan: &[i32], sym: &[i64]) -> Vec<(Family, usize, Vec<usize>)> {
    let mut seen = vec![false; r];
    let mut out = Vec::new();
    for start in 0..r {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < comp.len() {
            let i = comp[k];
            for j in 0..r {
                if !seen[j] && cartan[i * r + j] != 0 {
                    seen[j] = true;
                    comp.push(j);
                }
            }
            k += 1;
        }
        comp.sort_unstable();
        let n = comp.len();
        let degree = |i: usize| comp.iter().filter(|&&j| j != i && cartan[i * r + j] != 0).count();
        let double = comp.iter().any(|&i| comp.iter().any(|&j| cartan[i * r + j] == -2));
        let branch = comp.iter().any(|&i| degree(i) == 3);
        let family = if double {
            let ends: Vec<usize> = comp.iter().copied().filter(|&i| degree(i) <= 1).collect();
            let short_end = ends.iter().any(|&i| {
                comp.iter().any(|&j| j != i && cartan[i * r + j] != 0 && sym[i] < sym[j])
            });
            let b2 = n == 2 && sym[comp[1]] < sym[comp[0]];
            if b2 || (n > 2 && short_end) {
                Family::B
            } else {
                Family::C
            }
        } else if branch {
            Family::D
        } else {
            Family::A
        };
        out.push((family, n, comp));
    }
    out
}
