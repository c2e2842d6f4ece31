//! Levi restriction and parabolic level decompositions.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::caps::Caps;
use crate::charcalc::{self, Depth, DominantCharacter, IrrepSum, Truncation};
use crate::error::{Error, Result};
use crate::rootsys::{Family, RootSystem};
use crate::weight::Weight;

/// A simple factor of the Levi subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeviFactor {
    pub family: Family,
    /// Node indices in the ambient system, ascending.
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ParabolicSpec {
    pub system: Arc<RootSystem>,
    /// Removed simple roots, 0-based ascending.
    pub removed: Vec<usize>,
    /// Retained simple roots, 0-based ascending.
    pub retained: Vec<usize>,
    pub factors: Vec<LeviFactor>,
    /// Derived Levi subgroup on the retained nodes.
    pub levi: Arc<RootSystem>,
    non_levi_roots: Vec<usize>,
}

impl ParabolicSpec {
    /// `removed` holds 0-based indices.
    pub fn new(system: Arc<RootSystem>, removed: &[usize]) -> Result<ParabolicSpec> {
        let rank = system.rank();
        let mut removed = removed.to_vec();
        removed.sort_unstable();
        removed.dedup();
        if removed.is_empty() || removed.iter().any(|&i| i >= rank) {
            return Err(Error::Invalid(format!("bad removed set {removed:?} for rank {rank}")));
        }
        let retained: Vec<usize> = (0..rank).filter(|i| !removed.contains(i)).collect();
        let levi = Arc::new(system.subsystem(&retained));
        let family = system.family();
        let factors = levi
            .components()
            .into_iter()
            .map(|(f, _, local)| {
                let nodes: Vec<usize> = local.iter().map(|&k| retained[k]).collect();
                let last = rank - 1;
                let tagged = match family {
                    Some(Family::B) | Some(Family::C) if nodes.len() >= 2 && nodes.contains(&last) => family.expect("checked"),
                    Some(Family::D) if nodes.len() >= 3 && nodes.contains(&last) && nodes.contains(&(last - 1)) => Family::D,
                    _ if f == Family::D => Family::D,
                    _ => Family::A,
                };
                LeviFactor { family: tagged, nodes }
            })
            .collect();
        let non_levi_roots = system
            .positive_roots()
            .iter()
            .enumerate()
            .filter(|(_, r)| removed.iter().any(|&i| r.simple[i] != 0))
            .map(|(k, _)| k)
            .collect();
        Ok(ParabolicSpec { system, removed, retained, factors, levi, non_levi_roots })
    }

    /// Levi coordinates of a weight.
    pub fn levi_part(&self, w: &Weight) -> Weight {
        self.retained.iter().map(|&i| w[i]).collect::<Vec<_>>().into()
    }

    /// Splits a Levi weight into one weight per simple factor.
    pub fn split_tuple(&self, levi_weight: &Weight) -> Vec<Weight> {
        self.factors
            .iter()
            .map(|f| {
                f.nodes
                    .iter()
                    .map(|n| levi_weight[self.retained.iter().position(|r| r == n).expect("retained node")])
                    .collect::<Vec<_>>()
                    .into()
            })
            .collect()
    }

    pub fn central_charge(&self, depth: &[i32]) -> Vec<i32> {
        self.removed.iter().map(|&i| depth[i]).collect()
    }

    fn level_of(&self, depth: &[i32]) -> i64 {
        self.removed.iter().map(|&i| depth[i] as i64).sum()
    }

    fn truncation(&self, max_level: i64) -> Truncation {
        let mut mask = vec![false; self.system.rank()];
        for &i in &self.removed {
            mask[i] = true;
        }
        Truncation { mask, max: max_level }
    }

    /// Levi-dominant conjugate of `w` by Levi reflections, updating `depth`.
    fn levi_dominant(&self, w: &mut Weight, depth: &mut Depth) {
        let sys = &self.system;
        loop {
            let Some(&i) = self.retained.iter().find(|&&i| w[i] < 0) else { break };
            depth[i] += w[i];
            sys.reflect(w, i);
        }
    }

    /// All Levi-dominant elements of the Weyl orbit of the dominant `mu`,
    /// with depths relative to the highest weight of the ambient module.
    pub fn levi_dominant_conjugates(&self, mu: &Weight, depth: &Depth, max_level: Option<i64>) -> Vec<(Weight, Depth)> {
        let roots = self.system.positive_roots();
        let mut seen: FxHashSet<Weight> = FxHashSet::default();
        seen.insert(mu.clone());
        let mut out = vec![(mu.clone(), depth.clone())];
        let mut k = 0;
        while k < out.len() {
            let (p, pd) = out[k].clone();
            for &ri in &self.non_levi_roots {
                let root = &roots[ri];
                let c = root.pair_coroot(&p);
                if c <= 0 {
                    continue;
                }
                let mut y = p.clone();
                let mut yd = pd.clone();
                for j in 0..y.rank() {
                    y[j] -= c as i32 * root.weight[j];
                    yd[j] += c as i32 * root.simple[j];
                }
                if let Some(m) = max_level {
                    if self.level_of(&yd) > m {
                        continue;
                    }
                }
                self.levi_dominant(&mut y, &mut yd);
                if seen.insert(y.clone()) {
                    out.push((y, yd));
                }
            }
            k += 1;
        }
        out
    }
}

/// Constituent of a Levi restriction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeviTerm {
    /// Removed-root coefficients of `λ − weight`.
    pub central: Vec<i32>,
    /// Highest weight for the derived Levi subgroup (retained coordinates).
    pub levi: Weight,
    /// The same highest weight as an ambient weight.
    pub weight: Weight,
    pub mult: i64,
}

#[derive(Debug, Clone, Default)]
pub struct LeviBranching {
    pub terms: Vec<LeviTerm>,
}

impl LeviBranching {
    /// Map `(Levi tuple, central charge) → multiplicity`.
    pub fn as_map(&self) -> BTreeMap<(Weight, Vec<i32>), i64> {
        self.terms.iter().map(|t| ((t.levi.clone(), t.central.clone()), t.mult)).collect()
    }
}

/// Levi-dominant weights of `V(λ)` keyed by ambient weight, with depth and
/// multiplicity.
fn levi_weights(
    r: &RootSystem,
    lambda: &Weight,
    p: &ParabolicSpec,
    max_level: Option<i64>,
    caps: &Caps,
) -> Result<FxHashMap<Weight, (Depth, i64)>> {
    let trunc = max_level.map(|m| p.truncation(m));
    let entries = charcalc::freudenthal(r, lambda, trunc.as_ref(), caps)?;
    let parts: Vec<Vec<(Weight, Depth, i64)>> = entries
        .par_iter()
        .map(|(mu, d, m)| {
            p.levi_dominant_conjugates(mu, d, max_level).into_iter().map(|(w, wd)| (w, wd, *m)).collect()
        })
        .collect();
    let mut out: FxHashMap<Weight, (Depth, i64)> = FxHashMap::default();
    for part in parts {
        for (w, d, m) in part {
            out.insert(w, (d, m));
        }
    }
    caps.check_entries(out.len())?;
    Ok(out)
}

/// Decomposition of `V(λ)` for the Levi subgroup, optionally only up to
/// level `max_level`.
pub fn levi_restrict_bounded(
    r: &RootSystem,
    lambda: &Weight,
    p: &ParabolicSpec,
    max_level: Option<i64>,
    caps: &Caps,
) -> Result<LeviBranching> {
    let weights = levi_weights(r, lambda, p, max_level, caps)?;
    let mut groups: BTreeMap<Vec<i32>, DominantCharacter> = BTreeMap::new();
    let mut lookup: FxHashMap<(Vec<i32>, Weight), Weight> = FxHashMap::default();
    for (w, (d, m)) in &weights {
        let c = p.central_charge(d);
        let lw = p.levi_part(w);
        lookup.insert((c.clone(), lw.clone()), w.clone());
        groups.entry(c).or_default().table.insert(lw, *m);
    }
    let decomposed: Vec<Result<(Vec<i32>, IrrepSum)>> = groups
        .into_par_iter()
        .map(|(c, ch)| Ok((c, charcalc::decompose(&p.levi, &ch, caps)?)))
        .collect();
    let mut terms = Vec::new();
    for res in decomposed {
        let (c, sum) = res?;
        for (lw, &m) in &sum.terms {
            let weight = lookup.get(&(c.clone(), lw.clone())).cloned().ok_or_else(|| {
                Error::Invalid(format!("Levi highest weight {lw} at charge {c:?} is not a weight"))
            })?;
            terms.push(LeviTerm { central: c.clone(), levi: lw.clone(), weight, mult: m });
        }
    }
    terms.sort_by(|a, b| a.central.cmp(&b.central).then(b.levi.cmp(&a.levi)));
    Ok(LeviBranching { terms })
}

pub fn levi_restrict(r: &RootSystem, lambda: &Weight, p: &ParabolicSpec, caps: &Caps) -> Result<LeviBranching> {
    levi_restrict_bounded(r, lambda, p, None, caps)
}

/// Levels `V^{d+1}(Q)`; entry `d` maps Levi highest weights (retained
/// coordinates) to multiplicities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LevelDecomposition {
    pub levels: Vec<IrrepSum>,
}

impl LevelDecomposition {
    pub fn level(&self, d: usize) -> IrrepSum {
        self.levels.get(d).cloned().unwrap_or_default()
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

pub fn levels_bounded(
    r: &RootSystem,
    lambda: &Weight,
    p: &ParabolicSpec,
    max_level: Option<i64>,
    caps: &Caps,
) -> Result<LevelDecomposition> {
    let b = levi_restrict_bounded(r, lambda, p, max_level, caps)?;
    let mut levels: Vec<IrrepSum> = Vec::new();
    for t in &b.terms {
        let d = t.central.iter().map(|&c| c as usize).sum::<usize>();
        if levels.len() <= d {
            levels.resize(d + 1, IrrepSum::new());
        }
        levels[d].add_term(t.levi.clone(), t.mult)?;
    }
    Ok(LevelDecomposition { levels })
}

pub fn levels(r: &RootSystem, lambda: &Weight, p: &ParabolicSpec, caps: &Caps) -> Result<LevelDecomposition> {
    levels_bounded(r, lambda, p, None, caps)
}

/// Highest weight of the maximal-S factor of the innermost Levi natural
/// module, read off a self-dual `δ` of `A_{l+1}` for the end-node parabolic.
pub fn level_top_factor(delta: &Weight) -> Result<Weight> {
    let n = delta.rank();
    if *delta != delta.reversed() {
        return Err(Error::NotSelfDual(delta.to_string()));
    }
    let a = delta.as_slice();
    let s = n / 2;
    let mut out: Vec<i32> = Vec::with_capacity(n.saturating_sub(1));
    if n.is_multiple_of(2) {
        out.extend_from_slice(&a[..s - 1]);
        out.push(2 * a[s - 1]);
        out.extend(a[..s - 1].iter().rev());
    } else if s > 0 {
        let c = a[s];
        out.extend_from_slice(&a[..s - 1]);
        let (x, y) = if c % 2 == 0 { (a[s - 1] + c / 2, a[s - 1] + c / 2) } else { (a[s - 1] + (c - 1) / 2, a[s - 1] + (c + 1) / 2) };
        out.push(x);
        out.push(y);
        out.extend(a[..s - 1].iter().rev());
    }
    Ok(out.into())
}
