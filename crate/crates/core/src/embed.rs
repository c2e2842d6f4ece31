//! Irreducible self-dual embeddings `X = A_{l+1} → Y = Sp(W)/SO(W)` and the
//! three restriction algorithms.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::branch::{self, LevelDecomposition, ParabolicSpec};
use crate::caps::Caps;
use crate::charcalc::{self, DominantCharacter, IrrepSum};
use crate::error::{Error, Result};
use crate::rootsys::{Family, RootSystem};
use crate::weight::Weight;

/// The torus `T(c) = h_1(c) h_2(c^2) ⋯ h_{l+1}(c^{l+1})` of `A_{l+1}`, kept
/// as its exponent functional `μ ↦ Σ i·m_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrader {
    pub rank: usize,
}

impl TorusGrader {
    pub fn exponent(&self, w: &Weight) -> i64 {
        w.iter().enumerate().map(|(i, &c)| (i as i64 + 1) * c as i64).sum()
    }

    /// Exponent of the end-node simple root `α_{l+1}`.
    pub fn alpha_exponent(&self) -> i64 {
        self.rank as i64 + 1
    }

    /// Extends an `L_X'` weight by the last label `x` so that the exponent
    /// equals `top − d·exp(α)`.
    pub fn solve_last_label(&self, top: i64, d: usize, prefix: &Weight) -> Result<Weight> {
        let l = self.rank - 1;
        if prefix.rank() != l {
            return Err(Error::NoSolution(format!("prefix {prefix} has {} labels, expected {l}", prefix.rank())));
        }
        let partial: i64 = prefix.iter().enumerate().map(|(i, &c)| (i as i64 + 1) * c as i64).sum();
        let rest = top - d as i64 * self.alpha_exponent() - partial;
        let n = self.rank as i64;
        if rest < 0 || rest % n != 0 {
            return Err(Error::NoSolution(format!("prefix {prefix} at level {d}: {rest}/{n}")));
        }
        let mut v: Vec<i32> = prefix.as_slice().to_vec();
        v.push((rest / n) as i32);
        Ok(v.into())
    }
}

/// Steinberg's sign on `V(δ)` of `A_m`: `z = Π h_α(−1)` acts on a weight `μ`
/// by `(−1)^{⟨μ, 2ρ^∨⟩}`, and `⟨ω_i, 2ρ^∨⟩ = i(m+1−i)`.
pub fn steinberg_sign(delta: &Weight) -> i32 {
    let m = delta.rank() as i64;
    let e: i64 = delta.iter().enumerate().map(|(k, &c)| {
        let i = k as i64 + 1;
        c as i64 * i * (m + 1 - i)
    }).sum();
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddingSpec {
    pub l: usize,
    pub delta: Weight,
    pub dim_w: BigUint,
    pub y_family: Family,
    pub y_rank: usize,
    /// `ν_i`, the X-weight that `ε_i` of Y restricts to.
    pub torus_map: Vec<Weight>,
    pub steinberg_sign: i32,
    pub x: Arc<RootSystem>,
    pub y: Arc<RootSystem>,
    pub grader: TorusGrader,
    /// End-node parabolic of X.
    pub px: ParabolicSpec,
    /// Doubled X-images of the fundamental weights of Y.
    push_fund: Vec<Vec<i64>>,
}

/// Largest rank of Y that is built; its Cartan matrix is stored densely.
pub const MAX_Y_RANK: usize = 4096;

fn y_root_count(f: Family, n: usize) -> usize {
    match f {
        Family::A => n * (n + 1),
        Family::B | Family::C => 2 * n * n,
        Family::D => 2 * n * (n - 1),
    }
}

/// Type and rank of Y for `δ`, checking that the embedding is proper.
pub fn target_group(l: usize, delta: &Weight) -> Result<(Family, usize)> {
    let x = RootSystem::new(Family::A, l + 1)?;
    if delta.rank() != l + 1 {
        return Err(Error::Invalid(format!("δ = {delta} needs {} labels", l + 1)));
    }
    if !delta.is_dominant() {
        return Err(Error::NotDominant(delta.to_string()));
    }
    if delta.is_zero() {
        return Err(Error::TrivialDelta);
    }
    if *delta != delta.reversed() {
        return Err(Error::NotSelfDual(delta.to_string()));
    }
    let dim = charcalc::weyl_dim(&x, delta)?.to_usize().ok_or_else(|| Error::ResourceLimit("dim W too large".into()))?;
    let y_family = if steinberg_sign(delta) < 0 {
        Family::C
    } else if dim % 2 == 1 {
        Family::B
    } else {
        Family::D
    };
    let y_rank = dim / 2;
    if y_rank < y_family.min_rank() || y_root_count(y_family, y_rank) <= y_root_count(Family::A, l + 1) {
        return Err(Error::NotProper(format!("δ = {delta} gives {}{y_rank}", y_family.letter())));
    }
    Ok((y_family, y_rank))
}

/// Builds the embedding given by the self-dual weight `δ` of `A_{l+1}`.
pub fn build_embedding(l: usize, delta: &Weight, caps: &Caps) -> Result<EmbeddingSpec> {
    let (y_family, y_rank) = target_group(l, delta)?;
    if y_rank > MAX_Y_RANK {
        return Err(Error::ResourceLimit(format!("Y of rank {y_rank} exceeds {MAX_Y_RANK}")));
    }
    let x = RootSystem::new(Family::A, l + 1)?;
    let dim_w = charcalc::weyl_dim(&x, delta)?;
    let y = RootSystem::new(y_family, y_rank)?;
    let grader = TorusGrader { rank: l + 1 };
    let torus_map = choose_torus_map(&x, delta, grader, y_family, y_rank, caps)?;
    let px = ParabolicSpec::new(x.clone(), &[l])?;
    let sign = steinberg_sign(delta);
    let mut spec = EmbeddingSpec { l, delta: delta.clone(), dim_w, y_family, y_rank, torus_map, steinberg_sign: sign, x, y, grader, px, push_fund: vec![] };
    spec.push_fund = spec.fundamental_images()?;
    Ok(spec)
}

/// Pairs the weights of W as `±ν_i`, ordered by T-exponent, then height,
/// then lexicographically, all descending.
fn choose_torus_map(x: &RootSystem, delta: &Weight, grader: TorusGrader, fam: Family, rank: usize, caps: &Caps) -> Result<Vec<Weight>> {
    let ch = charcalc::dominant_character(x, delta, caps)?;
    let mut all: Vec<(Weight, i64)> = charcalc::expand(x, &ch);
    all.sort_by(|a, b| {
        grader
            .exponent(&b.0)
            .cmp(&grader.exponent(&a.0))
            .then(x.height(&b.0).cmp(&x.height(&a.0)))
            .then(b.0.cmp(&a.0))
    });
    let mut count: FxHashMap<Weight, i64> = all.iter().cloned().collect();
    let mut out = Vec::with_capacity(rank);
    for (w, _) in &all {
        loop {
            let c = count[w];
            if w.is_zero() {
                if c < 2 {
                    break;
                }
                *count.get_mut(w).expect("present") -= 2;
            } else {
                let neg = -w;
                let cn = count.get(&neg).copied().unwrap_or(0);
                if c == 0 || cn == 0 {
                    break;
                }
                *count.get_mut(w).expect("present") -= 1;
                *count.get_mut(&neg).expect("present") -= 1;
            }
            out.push(w.clone());
        }
    }
    let left: i64 = count.values().sum();
    let expect_left = if fam == Family::B { 1 } else { 0 };
    if out.len() != rank || left != expect_left {
        return Err(Error::Invalid(format!("weights of δ = {delta} do not pair up ({} pairs, {left} left)", out.len())));
    }
    Ok(out)
}

impl EmbeddingSpec {
    /// Replaces the torus map, checking it is a valid `±` pairing of W.
    pub fn with_torus_map(&self, nus: Vec<Weight>, caps: &Caps) -> Result<EmbeddingSpec> {
        let ch = charcalc::dominant_character(&self.x, &self.delta, caps)?;
        let mut want: BTreeMap<Weight, i64> = BTreeMap::new();
        for (w, m) in charcalc::expand(&self.x, &ch) {
            *want.entry(w).or_insert(0) += m;
        }
        let mut got: BTreeMap<Weight, i64> = BTreeMap::new();
        for nu in &nus {
            *got.entry(nu.clone()).or_insert(0) += 1;
            *got.entry(-nu).or_insert(0) += 1;
        }
        if self.y_family == Family::B {
            *got.entry(self.x.zero()).or_insert(0) += 1;
        }
        if got != want || nus.len() != self.y_rank {
            return Err(Error::Invalid("torus map does not match the weights of W".into()));
        }
        let mut spec = self.clone();
        spec.torus_map = nus;
        spec.push_fund = spec.fundamental_images()?;
        Ok(spec)
    }

    pub fn x_rank(&self) -> usize {
        self.l + 1
    }

    /// The Levi `L_X' = A_l`.
    pub fn lx(&self) -> &Arc<RootSystem> {
        &self.px.levi
    }

    pub fn y_name(&self) -> String {
        format!("{}{}", self.y_family.letter(), self.y_rank)
    }

    fn fundamental_images(&self) -> Result<Vec<Vec<i64>>> {
        (0..self.y_rank)
            .map(|k| {
                let e = self.y.to_eps(&Weight::fundamental(self.y_rank, k + 1))?;
                Ok(self.push_eps_doubled(e.doubled()))
            })
            .collect()
    }

    fn push_eps_doubled(&self, e: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.l + 1];
        for (c, nu) in e.iter().zip(&self.torus_map) {
            if *c != 0 {
                for j in 0..=self.l {
                    out[j] += c * nu[j] as i64;
                }
            }
        }
        out
    }

    /// Doubled image of a Y-weight in X-coordinates.
    #[inline]
    pub fn push_doubled(&self, w: &Weight) -> Vec<i64> {
        let mut out = vec![0i64; self.l + 1];
        for (k, &c) in w.iter().enumerate() {
            if c != 0 {
                for (o, p) in out.iter_mut().zip(&self.push_fund[k]) {
                    *o += c as i64 * p;
                }
            }
        }
        out
    }

    fn halve(v: &[i64]) -> Result<Weight> {
        v.iter()
            .map(|&x| if x % 2 == 0 { Ok((x / 2) as i32) } else { Err(Error::NonIntegralWeight) })
            .collect::<Result<Vec<i32>>>()
            .map(Weight::from)
    }

    /// Restriction of a Y-weight to the maximal torus of X.
    pub fn push(&self, w: &Weight) -> Result<Weight> {
        Self::halve(&self.push_doubled(w))
    }

    pub fn exponent_of_y(&self, w: &Weight) -> Result<i64> {
        Ok(self.grader.exponent(&self.push(w)?))
    }

    /// Last label of the X-factor whose first level sits at level `d` with
    /// `L_X'`-highest weight `prefix`.
    pub fn solve_last_label(&self, lambda: &Weight, d: usize, prefix: &Weight) -> Result<Weight> {
        self.grader.solve_last_label(self.exponent_of_y(lambda)?, d, prefix)
    }

    /// Parabolic of Y whose Levi centralizes T.
    pub fn y_parabolic(&self) -> Result<ParabolicSpec> {
        let a = self.grader.alpha_exponent();
        let mut removed = Vec::new();
        for i in 0..self.y_rank {
            let e = self.exponent_of_y(&self.y.simple_root(i))?;
            if e != 0 {
                if e != a {
                    return Err(Error::NotApplicable(format!("simple root {} of Y has T-exponent {e}, not {a}", i + 1)));
                }
                removed.push(i);
            }
        }
        ParabolicSpec::new(self.y.clone(), &removed)
    }

    pub fn dim_y(&self, lambda: &Weight) -> Result<BigUint> {
        charcalc::weyl_dim(&self.y, lambda)
    }

    /// X-levels of `V_X(θ)` for the end-node parabolic.
    pub fn x_levels(&self, theta: &Weight, max_level: Option<i64>, caps: &Caps) -> Result<LevelDecomposition> {
        branch::levels_bounded(&self.x, theta, &self.px, max_level, caps)
    }

    /// Which half-spin module `λ` is, if any.
    pub fn spin_parity(&self, lambda: &Weight) -> Option<SpinHalf> {
        if self.y_family != Family::D {
            return None;
        }
        let n = self.y_rank;
        if *lambda == Weight::fundamental(n, n) {
            Some(SpinHalf::Even)
        } else if *lambda == Weight::fundamental(n, n - 1) {
            Some(SpinHalf::Odd)
        } else {
            None
        }
    }
}

/// Direct pushforward of the full character of `V_Y(λ)`.
pub fn restrict_direct(e: &EmbeddingSpec, lambda: &Weight, caps: &Caps) -> Result<IrrepSum> {
    let dim = e.dim_y(lambda)?;
    if dim > BigUint::from(caps.max_direct_dim) {
        return Err(Error::ResourceLimit(format!("dim V_Y({lambda}) = {dim} exceeds the direct cap")));
    }
    let ch = charcalc::dominant_character(&e.y, lambda, caps)?;
    let mut tasks: Vec<(Weight, i64, bool)> = Vec::new();
    for (mu, &m) in &ch.table {
        let (inner, roots) = e.y.orbit_split(mu, 32);
        tasks.extend(inner.into_iter().map(|w| (w, m, false)));
        tasks.extend(roots.into_iter().map(|w| (w, m, true)));
    }
    let parts: Vec<Result<FxHashMap<Weight, i64>>> = tasks
        .par_chunks(16)
        .map(|chunk| {
            let mut acc: FxHashMap<Weight, i64> = FxHashMap::default();
            let mut visit = |w: &Weight, m: i64| -> Result<()> {
                let d = e.push_doubled(w);
                if d.iter().all(|&c| c >= 0) {
                    *acc.entry(EmbeddingSpec::halve(&d)?).or_insert(0) += m;
                } else if d.iter().any(|c| c % 2 != 0) {
                    return Err(Error::NonIntegralWeight);
                }
                Ok(())
            };
            for (w, m, subtree) in chunk {
                if *subtree {
                    for v in e.y.orbit_subtree(w.clone()) {
                        visit(&v, *m)?;
                    }
                } else {
                    visit(w, *m)?;
                }
            }
            caps.check_time()?;
            Ok(acc)
        })
        .collect();
    let mut total = DominantCharacter::default();
    for p in parts {
        for (w, m) in p? {
            *total.table.entry(w).or_insert(0) += m;
        }
    }
    charcalc::decompose(&e.x, &total, caps)
}

/// One factor in the product that realizes `V_Y(λ)` up to lower terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Gen {
    /// `S^a(W)`.
    Sym(usize),
    /// `V_Y(ω_k)` realized from exterior powers (k ≥ 2).
    Fund(usize),
    /// `Λ^{n-1}W = V(ω_{n−1}+ω_n)` for D, `Λ^n W = V(2ω_n)` for B.
    Wedge(usize),
}

fn generators(e: &EmbeddingSpec, lambda: &Weight) -> Result<Vec<(Gen, usize)>> {
    let n = e.y_rank;
    let unsupported = || Error::UnsupportedShape(lambda.to_string());
    let mut gens = Vec::new();
    if lambda[0] > 0 {
        gens.push((Gen::Sym(lambda[0] as usize), 1));
    }
    let last_plain = match e.y_family {
        Family::C => n,
        Family::B => n - 1,
        Family::D => n - 2,
        Family::A => return Err(unsupported()),
    };
    for k in 2..=last_plain {
        if lambda[k - 1] > 0 {
            gens.push((Gen::Fund(k), lambda[k - 1] as usize));
        }
    }
    match e.y_family {
        Family::B => {
            let c = lambda[n - 1];
            if c % 2 != 0 {
                return Err(unsupported());
            }
            if c > 0 {
                gens.push((Gen::Wedge(n), c as usize / 2));
            }
        }
        Family::D => {
            let (a, b) = (lambda[n - 2], lambda[n - 1]);
            if a != b {
                return Err(unsupported());
            }
            if a > 0 {
                gens.push((Gen::Wedge(n - 1), a as usize));
            }
        }
        _ => {}
    }
    Ok(gens)
}

/// Whether the constructed route can handle `λ`.
pub fn constructed_supported(e: &EmbeddingSpec, lambda: &Weight) -> bool {
    generators(e, lambda).is_ok()
}

struct Constructor<'a> {
    e: &'a EmbeddingSpec,
    caps: &'a Caps,
    wedges: Vec<IrrepSum>,
    syms: Vec<IrrepSum>,
    memo: FxHashMap<Weight, IrrepSum>,
}

impl Constructor<'_> {
    fn wedge(&mut self, k: usize) -> Result<IrrepSum> {
        if k >= self.wedges.len() {
            let w = IrrepSum::irreducible(self.e.delta.clone());
            self.wedges = charcalc::ext_powers(&self.e.x, k, &w, self.caps)?;
        }
        Ok(self.wedges[k].clone())
    }

    fn sym(&mut self, k: usize) -> Result<IrrepSum> {
        if k >= self.syms.len() {
            let w = IrrepSum::irreducible(self.e.delta.clone());
            self.syms = charcalc::sym_powers(&self.e.x, k, &w, self.caps)?;
        }
        Ok(self.syms[k].clone())
    }

    /// X-side value of a generator.
    fn gen_x(&mut self, g: Gen) -> Result<IrrepSum> {
        match g {
            Gen::Sym(a) => self.sym(a),
            Gen::Fund(k) => match self.e.y_family {
                Family::C => self.wedge(k)?.minus(&if k >= 2 { self.wedge(k - 2)? } else { IrrepSum::new() }),
                _ => self.wedge(k),
            },
            Gen::Wedge(k) => self.wedge(k),
        }
    }

    /// Y-side highest weights of a generator.
    fn gen_y(&self, g: Gen) -> Result<IrrepSum> {
        let y = &self.e.y;
        let n = self.e.y_rank;
        match g {
            Gen::Sym(a) => charcalc::sym_power(y, a, &IrrepSum::irreducible(Weight::fundamental(n, 1)), self.caps),
            Gen::Fund(k) => Ok(IrrepSum::irreducible(Weight::fundamental(n, k))),
            Gen::Wedge(k) if self.e.y_family == Family::B => {
                let _ = k;
                Ok(IrrepSum::irreducible(Weight::fundamental(n, n).scale(2)))
            }
            Gen::Wedge(_) => Ok(IrrepSum::irreducible(&Weight::fundamental(n, n - 1) + &Weight::fundamental(n, n))),
        }
    }

    fn run(&mut self, lambda: &Weight) -> Result<IrrepSum> {
        if let Some(v) = self.memo.get(lambda) {
            return Ok(v.clone());
        }
        self.caps.check_time()?;
        let n = self.e.y_rank;
        let gens = generators(self.e, lambda)?;
        let result = if gens.is_empty() {
            IrrepSum::trivial(self.e.x_rank())
        } else if gens.len() == 1 && gens[0].1 == 1 {
            match gens[0].0 {
                Gen::Sym(a) if self.e.y_family != Family::C => {
                    let lower = if a >= 2 { self.sym(a - 2)? } else { IrrepSum::new() };
                    self.sym(a)?.minus(&lower)?
                }
                g => self.gen_x(g)?,
            }
        } else {
            let mut mx: Option<IrrepSum> = None;
            let mut my: Option<IrrepSum> = None;
            for &(g, power) in &gens {
                let gx = self.gen_x(g)?;
                let gy = self.gen_y(g)?;
                for _ in 0..power {
                    mx = Some(match mx {
                        None => gx.clone(),
                        Some(acc) => charcalc::tensor(&self.e.x, &acc, &gx, self.caps)?,
                    });
                    my = Some(match my {
                        None => gy.clone(),
                        Some(acc) => charcalc::tensor(&self.e.y, &acc, &gy, self.caps)?,
                    });
                }
            }
            let (mut mx, my) = (mx.expect("nonempty"), my.expect("nonempty"));
            if my.mult(lambda) != 1 {
                return Err(Error::Invalid(format!("generator product for {lambda} has top coefficient {}", my.mult(lambda))));
            }
            let lower: Vec<(Weight, i64)> = my.terms.iter().filter(|(w, _)| *w != lambda).map(|(w, &c)| (w.clone(), c)).collect();
            for (nu, c) in lower {
                debug_assert_eq!(nu.rank(), n);
                let sub = self.run(&nu)?;
                mx.add_scaled(&sub, -c)?;
            }
            mx
        };
        self.memo.insert(lambda.clone(), result.clone());
        Ok(result)
    }
}

/// Restriction computed inside X from symmetric and exterior powers of δ,
/// subtracting lower terms recursively.
pub fn restrict_constructed(e: &EmbeddingSpec, lambda: &Weight, caps: &Caps) -> Result<IrrepSum> {
    if !lambda.is_dominant() {
        return Err(Error::NotDominant(lambda.to_string()));
    }
    generators(e, lambda)?;
    let mut c = Constructor { e, caps, wedges: vec![], syms: vec![], memo: FxHashMap::default() };
    c.run(lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinHalf {
    /// `λ_n`: even number of minus signs.
    Even,
    /// `λ_{n−1}`.
    Odd,
}

/// `L_X'`-module of the level pieces of W: blocks of `ν_i` with equal
/// positive T-exponent, and the zero-exponent middle block.
struct WBlocks {
    blocks: Vec<(i64, Vec<Weight>)>,
    middle: Vec<Weight>,
}

fn w_blocks(e: &EmbeddingSpec) -> WBlocks {
    let mut blocks: Vec<(i64, Vec<Weight>)> = Vec::new();
    let mut middle = Vec::new();
    for nu in &e.torus_map {
        let x = e.grader.exponent(nu);
        if x == 0 {
            middle.push(nu.clone());
        } else {
            match blocks.last_mut() {
                Some((ex, v)) if *ex == x => v.push(nu.clone()),
                _ => blocks.push((x, vec![nu.clone()])),
            }
        }
    }
    WBlocks { blocks, middle }
}

fn sx(w: &Weight, l: usize) -> Weight {
    Weight::from_slice(&w.as_slice()[..l])
}

/// Level pieces of a half-spin module of `Y = D_n` as `L_X'`-modules.
///
/// Level `d` is the sum over `(f_b)` with `Σ f_b e_b = d·exp(α)` (relative to
/// the top) of `⊗_b Λ^{f_b}(B_b) ⊗ S_±`, where `B_b` is the dual of block `b`
/// of W and `S_±` the half-spin piece of the middle block.
pub fn spin_levels(e: &EmbeddingSpec, which: SpinHalf, max_level: Option<usize>, caps: &Caps) -> Result<Vec<IrrepSum>> {
    if e.y_family != Family::D {
        return Err(Error::NotApplicable(format!("spin levels need Y of type D, got {}", e.y_name())));
    }
    let l = e.l;
    let lx = e.lx().clone();
    let wb = w_blocks(e);
    let a = e.grader.alpha_exponent();
    let m = wb.middle.len();
    if m > 24 {
        return Err(Error::ResourceLimit(format!("middle block of size {m}")));
    }
    // Middle half-spin pieces by parity of the number of minus signs.
    let mut mids = [DominantCharacter::default(), DominantCharacter::default()];
    for mask in 0u32..(1u32 << m) {
        let mut v = vec![0i64; l];
        for (i, nu) in wb.middle.iter().enumerate() {
            let s = if mask >> i & 1 == 1 { -1 } else { 1 };
            for j in 0..l {
                v[j] += s * nu[j] as i64;
            }
        }
        let w = EmbeddingSpec::halve(&v)?;
        if w.is_dominant() {
            *mids[(mask.count_ones() % 2) as usize].table.entry(w).or_insert(0) += 1;
        }
    }
    let mids: Vec<IrrepSum> = mids.iter().map(|c| charcalc::decompose(&lx, c, caps)).collect::<Result<_>>()?;

    // Duals of the blocks and their exterior powers.
    let mut towers = Vec::new();
    for (_, nus) in &wb.blocks {
        let mut ch = DominantCharacter::default();
        for nu in nus {
            let w = sx(&-nu, l);
            if w.is_dominant() {
                *ch.table.entry(w).or_insert(0) += 1;
            }
        }
        let b = charcalc::decompose(&lx, &ch, caps)?;
        towers.push(charcalc::ext_powers(&lx, nus.len(), &b, caps)?);
    }
    let target = match which {
        SpinHalf::Even => 0,
        SpinHalf::Odd => 1,
    };
    // Enumerate block flip counts with their exponent drop.
    let mut combos: Vec<(i64, Vec<usize>)> = vec![(0, vec![])];
    for (ex, nus) in &wb.blocks {
        let mut next = Vec::new();
        for (drop, f) in &combos {
            for k in 0..=nus.len() {
                let mut g = f.clone();
                g.push(k);
                next.push((drop + k as i64 * ex, g));
            }
        }
        combos = next;
    }
    let valid: Vec<(i64, Vec<usize>, usize)> = combos
        .into_iter()
        .filter_map(|(drop, f)| {
            let flips: usize = f.iter().sum();
            let mid_parity = (flips + target) % 2;
            if m == 0 && mid_parity != 0 {
                None
            } else {
                Some((drop, f, mid_parity))
            }
        })
        .collect();
    let top = valid.iter().map(|v| v.0).min().ok_or_else(|| Error::NotApplicable("empty spin module".into()))?;
    let mut levels: BTreeMap<usize, Vec<(Vec<usize>, usize)>> = BTreeMap::new();
    for (drop, f, mp) in valid {
        let rel = drop - top;
        if rel % a != 0 {
            return Err(Error::Invalid(format!("spin weight at exponent drop {rel} is not a whole level")));
        }
        let d = (rel / a) as usize;
        if max_level.is_none_or(|ml| d <= ml) {
            levels.entry(d).or_default().push((f, mp));
        }
    }
    let count = levels.keys().max().map_or(0, |d| d + 1);
    let mut out = vec![IrrepSum::new(); count];
    for (d, list) in levels {
        let parts: Vec<Result<IrrepSum>> = list
            .par_iter()
            .map(|(f, mp)| {
                let mut acc = if m == 0 { IrrepSum::trivial(l) } else { mids[*mp].clone() };
                for (b, &k) in f.iter().enumerate() {
                    acc = charcalc::tensor(&lx, &acc, &towers[b][k], caps)?;
                }
                Ok(acc)
            })
            .collect();
        for p in parts {
            out[d].add_scaled(&p?, 1)?;
        }
    }
    Ok(out)
}

/// Level pieces of `V_Y(λ)` restricted to `L_X'`, via the Levi of the
/// T-centralizing parabolic of Y.
pub fn y_levels_via_levi(e: &EmbeddingSpec, lambda: &Weight, max_level: Option<usize>, caps: &Caps) -> Result<Vec<IrrepSum>> {
    let py = e.y_parabolic()?;
    let b = branch::levi_restrict_bounded(&e.y, lambda, &py, max_level.map(|m| m as i64), caps)?;
    let l = e.l;
    let lx = e.lx().clone();
    let levi = py.levi.clone();
    let pushed_roots: Vec<Vec<i64>> = py.retained.iter().map(|&i| e.push_doubled(&e.y.simple_root(i))).collect();
    let results: Vec<Result<(usize, DominantCharacter)>> = b
        .terms
        .par_iter()
        .map(|t| {
            let d: usize = t.central.iter().map(|&c| c as usize).sum();
            let top = e.push_doubled(&t.weight);
            let entries = charcalc::freudenthal(&levi, &t.levi, None, caps)?;
            let mut ch = DominantCharacter::default();
            for (v, depth0, m) in entries {
                for (_, depth1) in levi.orbit_with_depth(&v) {
                    let mut x = top.clone();
                    for k in 0..depth0.len() {
                        let c = (depth0[k] + depth1[k]) as i64;
                        if c != 0 {
                            for j in 0..=l {
                                x[j] -= c * pushed_roots[k][j];
                            }
                        }
                    }
                    if x[..l].iter().all(|&c| c >= 0) {
                        let w = EmbeddingSpec::halve(&x[..l])?;
                        *ch.table.entry(w).or_insert(0) += m * t.mult;
                    } else if x.iter().any(|c| c % 2 != 0) {
                        return Err(Error::NonIntegralWeight);
                    }
                }
            }
            Ok((d, ch))
        })
        .collect();
    let mut per_level: BTreeMap<usize, DominantCharacter> = BTreeMap::new();
    for r in results {
        let (d, ch) = r?;
        per_level.entry(d).or_default().add_scaled(&ch, 1)?;
    }
    let count = per_level.keys().max().map_or(0, |d| d + 1);
    let mut out = vec![IrrepSum::new(); count];
    for (d, ch) in per_level {
        out[d] = charcalc::decompose(&lx, &ch, caps)?;
    }
    Ok(out)
}

/// Level pieces of `V_Y(λ)↓L_X'`, using the spin shortcut when it applies.
pub fn y_levels(e: &EmbeddingSpec, lambda: &Weight, max_level: Option<usize>, caps: &Caps) -> Result<Vec<IrrepSum>> {
    match e.spin_parity(lambda) {
        Some(which) => spin_levels(e, which, max_level, caps),
        None => y_levels_via_levi(e, lambda, max_level, caps),
    }
}

/// A factor found by level peeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeeledFactor {
    pub theta: Weight,
    pub level: usize,
    pub mult: i64,
}

#[derive(Debug, Clone)]
pub struct LevelPeel {
    pub factors: IrrepSum,
    pub found: Vec<PeeledFactor>,
    /// Whether the found dimensions add up to `dim V_Y(λ)`.
    pub complete: bool,
    pub levels_used: usize,
}

/// Memoized, level-bounded X-levels of found factors.
pub struct XLevelCache<'a> {
    e: &'a EmbeddingSpec,
    caps: &'a Caps,
    store: Mutex<FxHashMap<Weight, (usize, Arc<LevelDecomposition>)>>,
}

impl<'a> XLevelCache<'a> {
    pub fn new(e: &'a EmbeddingSpec, caps: &'a Caps) -> Self {
        XLevelCache { e, caps, store: Mutex::new(FxHashMap::default()) }
    }

    /// Level `k` of `V_X(θ)`.
    pub fn level(&self, theta: &Weight, k: usize) -> Result<IrrepSum> {
        if let Some((bound, lv)) = self.store.lock().expect("lock").get(theta) {
            if k <= *bound {
                return Ok(lv.level(k));
            }
        }
        let lv = Arc::new(self.e.x_levels(theta, Some(k as i64), self.caps)?);
        let mut s = self.store.lock().expect("lock");
        let replace = s.get(theta).is_none_or(|(b, _)| *b < k);
        if replace {
            s.insert(theta.clone(), (k, lv.clone()));
        }
        Ok(lv.level(k))
    }

    /// Precomputes levels up to `k` for several weights in parallel.
    pub fn prefetch(&self, items: &[(Weight, usize)]) -> Result<()> {
        let todo: Vec<&(Weight, usize)> = {
            let s = self.store.lock().expect("lock");
            items.iter().filter(|(t, k)| s.get(t).is_none_or(|(b, _)| b < k)).collect()
        };
        let res: Vec<Result<(Weight, usize, LevelDecomposition)>> = todo
            .par_iter()
            .map(|(t, k)| Ok((t.clone(), *k, self.e.x_levels(t, Some(*k as i64), self.caps)?)))
            .collect();
        let mut s = self.store.lock().expect("lock");
        for r in res {
            let (t, k, lv) = r?;
            s.insert(t, (k, Arc::new(lv)));
        }
        Ok(())
    }
}

/// Level-by-level recovery of `V_Y(λ)↓X`.
pub fn restrict_levelpeel(e: &EmbeddingSpec, lambda: &Weight, max_level: Option<usize>, caps: &Caps) -> Result<LevelPeel> {
    let dim = e.dim_y(lambda)?;
    if e.spin_parity(lambda).is_none() && max_level.is_none() && dim > BigUint::from(caps.max_levelpeel_dim) {
        return Err(Error::ResourceLimit(format!("dim V_Y({lambda}) = {dim} exceeds the level-peeling cap")));
    }
    let source = y_levels(e, lambda, max_level, caps)?;
    let cache = XLevelCache::new(e, caps);
    let mut found: Vec<PeeledFactor> = Vec::new();
    let mut total = BigUint::from(0u32);
    let mut complete = false;
    let mut used = 0;
    for (d, piece) in source.iter().enumerate() {
        used = d + 1;
        let needed: Vec<(Weight, usize)> = found.iter().map(|f| (f.theta.clone(), d - f.level)).collect();
        cache.prefetch(&needed)?;
        let mut residual = piece.clone();
        for f in &found {
            let lv = cache.level(&f.theta, d - f.level)?;
            residual.add_scaled(&lv, -f.mult)?;
        }
        if let Some((w, m)) = residual.iter().find(|(_, &m)| m < 0) {
            return Err(Error::InconsistentResidual { level: d, detail: format!("{w} has multiplicity {m}") });
        }
        let mut fresh: Vec<(Weight, i64)> = residual.terms.into_iter().collect();
        fresh.sort_by(|a, b| b.0.s_value().cmp(&a.0.s_value()).then(b.0.cmp(&a.0)));
        for (nu, r) in fresh {
            let theta = e.solve_last_label(lambda, d, &nu)?;
            total += charcalc::weyl_dim(&e.x, &theta)? * BigUint::from(r as u64);
            found.push(PeeledFactor { theta, level: d, mult: r });
        }
        if total == dim {
            complete = true;
            break;
        }
        if total > dim {
            return Err(Error::InconsistentResidual { level: d, detail: format!("found dimension {total} exceeds {dim}") });
        }
        caps.check_time()?;
    }
    let mut factors = IrrepSum::new();
    for f in &found {
        factors.add_term(f.theta.clone(), f.mult)?;
    }
    Ok(LevelPeel { factors, found, complete, levels_used: used })
}
