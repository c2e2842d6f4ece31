//! Characters: Weyl dimension, Freudenthal multiplicities, decomposition,
//! Klimyk tensor products, Adams operations and symmetric/exterior powers.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::rootsys::{Family, RootSystem};
use crate::weight::Weight;

pub type Depth = SmallVec<[i32; 8]>;

/// Dominant weights with multiplicities; stands for the Weyl-invariant
/// (possibly virtual) character they generate.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DominantCharacter {
    pub table: BTreeMap<Weight, i64>,
}

/// Formal integer combination of irreducible highest weights.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IrrepSum {
    pub terms: BTreeMap<Weight, i64>,
}

fn add_checked(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::MultiplicityOverflow)
}

fn mul_checked(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::MultiplicityOverflow)
}

impl DominantCharacter {
    pub fn mult(&self, w: &Weight) -> i64 {
        self.table.get(w).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn add_scaled(&mut self, other: &DominantCharacter, k: i64) -> Result<()> {
        for (w, &m) in &other.table {
            let e = self.table.entry(w.clone()).or_insert(0);
            *e = add_checked(*e, mul_checked(m, k)?)?;
            if *e == 0 {
                self.table.remove(w);
            }
        }
        Ok(())
    }
}

impl IrrepSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn irreducible(w: Weight) -> Self {
        let mut s = Self::new();
        s.terms.insert(w, 1);
        s
    }

    pub fn trivial(rank: usize) -> Self {
        Self::irreducible(Weight::zero(rank))
    }

    pub fn mult(&self, w: &Weight) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Weight, &i64)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, w: Weight, m: i64) -> Result<()> {
        if m == 0 {
            return Ok(());
        }
        let e = self.terms.entry(w.clone()).or_insert(0);
        *e = add_checked(*e, m)?;
        if *e == 0 {
            self.terms.remove(&w);
        }
        Ok(())
    }

    pub fn add_scaled(&mut self, other: &IrrepSum, k: i64) -> Result<()> {
        for (w, &m) in &other.terms {
            self.add_term(w.clone(), mul_checked(m, k)?)?;
        }
        Ok(())
    }

    pub fn plus(&self, other: &IrrepSum) -> Result<IrrepSum> {
        let mut s = self.clone();
        s.add_scaled(other, 1)?;
        Ok(s)
    }

    pub fn minus(&self, other: &IrrepSum) -> Result<IrrepSum> {
        let mut s = self.clone();
        s.add_scaled(other, -1)?;
        Ok(s)
    }

    pub fn is_genuine(&self) -> bool {
        self.terms.values().all(|&m| m > 0)
    }

    /// All multiplicities equal 1.
    pub fn is_mf(&self) -> bool {
        self.terms.values().all(|&m| m == 1)
    }

    /// Terms with multiplicity at least 2, by multiplicity then S-value,
    /// both descending.
    pub fn repeated(&self) -> Vec<(Weight, i64)> {
        let mut v: Vec<(Weight, i64)> = self.terms.iter().filter(|(_, &m)| m >= 2).map(|(w, &m)| (w.clone(), m)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(b.0.s_value().cmp(&a.0.s_value())).then(b.0.cmp(&a.0)));
        v
    }

    /// Maximum S-value over the terms.
    pub fn s_value(&self) -> i64 {
        self.terms.keys().map(|w| w.s_value()).max().unwrap_or(0)
    }

    pub fn dim(&self, r: &RootSystem) -> Result<BigInt> {
        let mut total = BigInt::zero();
        for (w, &m) in &self.terms {
            total += BigInt::from(weyl_dim(r, w)?) * m;
        }
        Ok(total)
    }

    pub fn map_weights(&self, f: impl Fn(&Weight) -> Weight) -> Result<IrrepSum> {
        let mut s = IrrepSum::new();
        for (w, &m) in &self.terms {
            s.add_term(f(w), m)?;
        }
        Ok(s)
    }
}

/// Terms in decreasing S-value, written `(w)` or `(w)^m`; `0` when empty.
impl std::fmt::Display for IrrepSum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut items: Vec<(&Weight, &i64)> = self.terms.iter().collect();
        items.sort_by(|a, b| b.0.s_value().cmp(&a.0.s_value()).then_with(|| b.0.cmp(a.0)));
        let parts: Vec<String> = items
            .into_iter()
            .map(|(w, &m)| match m {
                1 => format!("({w})"),
                _ => format!("({w})^{m}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl FromIterator<(Weight, i64)> for IrrepSum {
    fn from_iter<I: IntoIterator<Item = (Weight, i64)>>(it: I) -> Self {
        let mut s = IrrepSum::new();
        for (w, m) in it {
            s.add_term(w, m).expect("multiplicity overflow");
        }
        s
    }
}

fn product(mut xs: Vec<BigUint>) -> BigUint {
    if xs.is_empty() {
        return BigUint::one();
    }
    while xs.len() > 1 {
        xs = xs
            .chunks(2)
            .map(|c| if c.len() == 2 { &c[0] * &c[1] } else { c[0].clone() })
            .collect();
    }
    xs.pop().expect("nonempty")
}

/// Accumulates `u64` factors into a balanced big-integer product.
#[derive(Default)]
struct Prod {
    cur: u128,
    parts: Vec<BigUint>,
}

impl Prod {
    fn push(&mut self, f: u64) {
        if self.cur == 0 {
            self.cur = 1;
        }
        match self.cur.checked_mul(f as u128) {
            Some(v) if v < (1u128 << 100) => self.cur = v,
            _ => {
                self.parts.push(BigUint::from(self.cur));
                self.cur = f as u128;
            }
        }
    }

    fn finish(mut self) -> BigUint {
        if self.cur != 0 {
            self.parts.push(BigUint::from(self.cur));
        }
        product(self.parts)
    }
}

/// Weyl dimension formula.
pub fn weyl_dim(r: &RootSystem, lambda: &Weight) -> Result<BigUint> {
    if !lambda.is_dominant() {
        return Err(Error::NotDominant(lambda.to_string()));
    }
    let mut num = Prod::default();
    let mut den = Prod::default();
    if let Some(f) = r.family() {
        // ε-form: skip the factors where λ+ρ and ρ agree.
        let lr = lambda + &r.rho();
        let l = r.to_eps(&lr)?;
        let p = r.to_eps(&r.rho())?;
        let (l, p) = (l.doubled(), p.doubled());
        let m = l.len();
        let mut factor = |a: i64, b: i64| {
            if a != b {
                num.push(a as u64);
                den.push(b as u64);
            }
        };
        let changed: Vec<usize> = (0..m).filter(|&i| l[i] != p[i]).collect();
        let mut is_changed = vec![false; m];
        for &i in &changed {
            is_changed[i] = true;
        }
        for &i in &changed {
            for j in 0..m {
                if j == i || (is_changed[j] && j < i) {
                    continue;
                }
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                factor(l[a] - l[b], p[a] - p[b]);
                if f != Family::A {
                    factor(l[a] + l[b], p[a] + p[b]);
                }
            }
            match f {
                Family::B => factor(l[i], p[i]),
                Family::C => factor(2 * l[i], 2 * p[i]),
                _ => {}
            }
        }
    } else {
        let lr = lambda + &r.rho();
        let rho = r.rho();
        for root in r.positive_roots() {
            let a = root.pair_form(&lr);
            let b = root.pair_form(&rho);
            if a != b {
                num.push(a as u64);
                den.push(b as u64);
            }
        }
    }
    let (n, d) = (num.finish(), den.finish());
    debug_assert!((&n % &d).is_zero());
    Ok(n / d)
}

pub fn weyl_dim_u128(r: &RootSystem, lambda: &Weight) -> Result<u128> {
    Ok(weyl_dim(r, lambda)?.to_u128().unwrap_or(u128::MAX))
}

/// Restriction on the weights visited by Freudenthal: the total depth on
/// the masked simple roots stays at most `max`.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub mask: Vec<bool>,
    pub max: i64,
}

impl Truncation {
    fn level(&self, d: &[i32]) -> i64 {
        d.iter().zip(&self.mask).filter(|(_, &m)| m).map(|(&x, _)| x as i64).sum()
    }
}

/// Dominant weights of `V(λ)` with depth and multiplicity, highest first.
pub fn freudenthal(r: &RootSystem, lambda: &Weight, trunc: Option<&Truncation>, caps: &Caps) -> Result<Vec<(Weight, Depth, i64)>> {
    if !lambda.is_dominant() {
        return Err(Error::NotDominant(lambda.to_string()));
    }
    let rank = r.rank();
    let roots = r.positive_roots();
    // Dominant weights below λ.
    let mut index: FxHashMap<Weight, usize> = FxHashMap::default();
    let mut nodes: Vec<(Weight, Depth)> = vec![(lambda.clone(), SmallVec::from_elem(0, rank))];
    index.insert(lambda.clone(), 0);
    let mut k = 0;
    while k < nodes.len() {
        let (mu, d) = nodes[k].clone();
        for root in roots {
            let nu = &mu - &root.weight;
            if !nu.is_dominant() || index.contains_key(&nu) {
                continue;
            }
            let nd: Depth = d.iter().zip(root.simple.iter()).map(|(a, b)| a + b).collect();
            if let Some(t) = trunc {
                if t.level(&nd) > t.max {
                    continue;
                }
            }
            index.insert(nu.clone(), nodes.len());
            nodes.push((nu, nd));
        }
        k += 1;
        if k % 4096 == 0 {
            caps.check_entries(nodes.len())?;
        }
    }
    caps.check_entries(nodes.len())?;

    let mut order: Vec<usize> = (0..nodes.len()).collect();
    let ht = |d: &Depth| d.iter().map(|&x| x as i64).sum::<i64>();
    order.sort_by_key(|&i| (ht(&nodes[i].1), std::cmp::Reverse(nodes[i].0.clone())));
    let mut mult = vec![0i64; nodes.len()];
    mult[0] = 1;
    let sym = r.sym();
    let two_rho_plus_l: Weight = lambda.iter().map(|&c| c + 2).collect::<Vec<_>>().into();

    let mut start = 1;
    while start < order.len() {
        let h = ht(&nodes[order[start]].1);
        let mut end = start;
        while end < order.len() && ht(&nodes[order[end]].1) == h {
            end += 1;
        }
        let batch: Vec<usize> = order[start..end].to_vec();
        let compute = |&i: &usize| -> Result<(usize, i64)> {
            let (mu, d) = &nodes[i];
            let mut num: i128 = 0;
            for root in roots {
                let mut dd: Depth = d.clone();
                let mut x = mu.clone();
                loop {
                    let mut ok = true;
                    for (a, b) in dd.iter_mut().zip(root.simple.iter()) {
                        *a -= b;
                        if *a < 0 {
                            ok = false;
                        }
                    }
                    if !ok {
                        break;
                    }
                    for (a, b) in x.0.iter_mut().zip(root.weight.iter()) {
                        *a += b;
                    }
                    let (dom, _) = r.to_dominant(&x);
                    if let Some(&j) = index.get(&dom) {
                        let m = mult[j];
                        if m != 0 {
                            num += m as i128 * root.pair_form(&x) as i128;
                        }
                    }
                }
            }
            let den: i128 = (0..rank).map(|j| d[j] as i128 * sym[j] as i128 * (two_rho_plus_l[j] + mu[j]) as i128).sum();
            let num = 2 * num;
            if den == 0 || num % den != 0 {
                return Err(Error::NonIntegralDivision(den as i64));
            }
            let m = i64::try_from(num / den).map_err(|_| Error::MultiplicityOverflow)?;
            Ok((i, m))
        };
        let results: Vec<Result<(usize, i64)>> = if batch.len() > 64 {
            batch.par_iter().map(compute).collect()
        } else {
            batch.iter().map(compute).collect()
        };
        for res in results {
            let (i, m) = res?;
            mult[i] = m;
        }
        start = end;
        caps.check_time()?;
    }
    Ok(order.into_iter().map(|i| (nodes[i].0.clone(), nodes[i].1.clone(), mult[i])).filter(|e| e.2 != 0).collect())
}

/// Dominant character of `V(λ)`, memoized per root system.
pub fn dominant_character(r: &RootSystem, lambda: &Weight, caps: &Caps) -> Result<Arc<DominantCharacter>> {
    if let Some(c) = r.char_cache.lock().expect("cache lock").get(lambda) {
        return Ok(c.clone());
    }
    let entries = freudenthal(r, lambda, None, caps)?;
    let ch = Arc::new(DominantCharacter { table: entries.into_iter().map(|(w, _, m)| (w, m)).collect() });
    r.char_cache.lock().expect("cache lock").insert(lambda.clone(), ch.clone());
    Ok(ch)
}

/// Character of a formal sum of irreducibles.
pub fn character_of(r: &RootSystem, m: &IrrepSum, caps: &Caps) -> Result<DominantCharacter> {
    let mut out = DominantCharacter::default();
    for (w, &k) in &m.terms {
        out.add_scaled(&*dominant_character(r, w, caps)?, k)?;
    }
    Ok(out)
}

/// Highest-weight peeling.
pub fn decompose(r: &RootSystem, ch: &DominantCharacter, caps: &Caps) -> Result<IrrepSum> {
    let mut work: BTreeMap<(i64, Weight), i64> = ch.table.iter().filter(|(_, &m)| m != 0).map(|(w, &m)| ((r.height(w), w.clone()), m)).collect();
    let mut out = IrrepSum::new();
    while let Some(((_, top), m)) = work.pop_last() {
        out.add_term(top.clone(), m)?;
        let sub = dominant_character(r, &top, caps)?;
        for (w, &k) in &sub.table {
            if *w == top {
                continue;
            }
            let key = (r.height(w), w.clone());
            let e = work.entry(key.clone()).or_insert(0);
            *e = add_checked(*e, -mul_checked(m, k)?)?;
            if *e == 0 {
                work.remove(&key);
            }
        }
        caps.check_time()?;
    }
    Ok(out)
}

/// All weights (with multiplicity) of a dominant character.
pub fn expand(r: &RootSystem, ch: &DominantCharacter) -> Vec<(Weight, i64)> {
    let items: Vec<(&Weight, &i64)> = ch.table.iter().collect();
    items
        .par_iter()
        .flat_map_iter(|(w, &m)| r.orbit_subtree((*w).clone()).map(move |v| (v, m)))
        .collect()
}

/// Sum over `weights` and `hw` of `sign · χ_{dom(λ+ν+ρ)−ρ}`.
pub fn klimyk(r: &RootSystem, hw: &IrrepSum, weights: &[(Weight, i64)], caps: &Caps) -> Result<IrrepSum> {
    let rho = r.rho();
    let shifted: Vec<(Weight, i64)> = hw.terms.iter().map(|(l, &c)| (l + &rho, c)).collect();
    let chunk = (weights.len() / (rayon::current_num_threads() * 4)).max(256);
    let partial: Vec<Result<FxHashMap<Weight, i64>>> = weights
        .par_chunks(chunk)
        .map(|ws| {
            let mut acc: FxHashMap<Weight, i64> = FxHashMap::default();
            let mut x = r.zero();
            for (nu, m) in ws {
                for (l, c) in &shifted {
                    for k in 0..x.rank() {
                        x[k] = l[k] + nu[k];
                    }
                    let (mut d, s) = r.dominant_conjugate(&x);
                    if s == 0 {
                        continue;
                    }
                    for v in d.0.iter_mut() {
                        *v -= 1;
                    }
                    let e = acc.entry(d).or_insert(0);
                    *e = add_checked(*e, s as i64 * mul_checked(*c, *m)?)?;
                }
            }
            caps.check_time()?;
            Ok(acc)
        })
        .collect();
    let mut out: FxHashMap<Weight, i64> = FxHashMap::default();
    for p in partial {
        for (w, m) in p? {
            let e = out.entry(w).or_insert(0);
            *e = add_checked(*e, m)?;
        }
    }
    Ok(IrrepSum { terms: out.into_iter().filter(|(_, m)| *m != 0).collect() })
}

fn size_estimate(r: &RootSystem, m: &IrrepSum) -> Result<BigUint> {
    let mut t = BigUint::zero();
    for w in m.terms.keys() {
        t += weyl_dim(r, w)?;
    }
    Ok(t)
}

/// Tensor product via Klimyk's rule, expanding the smaller factor.
pub fn tensor(r: &RootSystem, a: &IrrepSum, b: &IrrepSum, caps: &Caps) -> Result<IrrepSum> {
    if a.is_empty() || b.is_empty() {
        return Ok(IrrepSum::new());
    }
    let (big, small) = if size_estimate(r, a)? >= size_estimate(r, b)? { (a, b) } else { (b, a) };
    let weights = expand(r, &character_of(r, small, caps)?);
    klimyk(r, big, &weights, caps)
}

/// Adams operation `ψ^k`.
pub fn adams(k: i32, c: &DominantCharacter) -> DominantCharacter {
    DominantCharacter { table: c.table.iter().map(|(w, &m)| (w.scale(k), m)).collect() }
}

fn power_tower(r: &RootSystem, k: usize, m: &IrrepSum, alternating: bool, caps: &Caps) -> Result<Vec<IrrepSum>> {
    let weights = expand(r, &character_of(r, m, caps)?);
    let mut tower = vec![IrrepSum::trivial(r.rank())];
    for j in 1..=k {
        let mut acc = IrrepSum::new();
        for i in 1..=j {
            let prev = &tower[j - i];
            if prev.is_empty() {
                continue;
            }
            let scaled: Vec<(Weight, i64)> = weights.iter().map(|(w, c)| (w.scale(i as i32), *c)).collect();
            let term = klimyk(r, prev, &scaled, caps)?;
            let sign = if alternating && i % 2 == 0 { -1 } else { 1 };
            acc.add_scaled(&term, sign)?;
        }
        let mut next = IrrepSum::new();
        for (w, c) in acc.terms {
            if c % j as i64 != 0 {
                return Err(Error::NonIntegralDivision(j as i64));
            }
            next.add_term(w, c / j as i64)?;
        }
        tower.push(next);
    }
    Ok(tower)
}

/// `[S^0(m), …, S^k(m)]`.
pub fn sym_powers(r: &RootSystem, k: usize, m: &IrrepSum, caps: &Caps) -> Result<Vec<IrrepSum>> {
    power_tower(r, k, m, false, caps)
}

/// `[Λ^0(m), …, Λ^k(m)]`.
pub fn ext_powers(r: &RootSystem, k: usize, m: &IrrepSum, caps: &Caps) -> Result<Vec<IrrepSum>> {
    power_tower(r, k, m, true, caps)
}

pub fn sym_power(r: &RootSystem, k: usize, m: &IrrepSum, caps: &Caps) -> Result<IrrepSum> {
    Ok(sym_powers(r, k, m, caps)?.pop().expect("tower has k+1 entries"))
}

pub fn ext_power(r: &RootSystem, k: usize, m: &IrrepSum, caps: &Caps) -> Result<IrrepSum> {
    Ok(ext_powers(r, k, m, caps)?.pop().expect("tower has k+1 entries"))
}

/// Applies `−w_0` to every highest weight.
pub fn dual(r: &RootSystem, m: &IrrepSum) -> IrrepSum {
    m.map_weights(|w| r.dual_weight(w)).expect("relabelling cannot overflow")
}

pub fn s_value(w: &Weight) -> Result<i64> {
    if !w.is_dominant() {
        return Err(Error::NotDominant(w.to_string()));
    }
    Ok(w.s_value())
}

pub fn l_value(w: &Weight) -> Result<usize> {
    if !w.is_dominant() {
        return Err(Error::NotDominant(w.to_string()));
    }
    Ok(w.l_value())
}
