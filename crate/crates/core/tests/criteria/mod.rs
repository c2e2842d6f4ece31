#![allow(dead_code)]
//! Acceptance checks shared by the topic test files and the `acceptance` target.
//! Each check returns a short summary on success and a description of the
//! first discrepancy otherwise.

use liemf::charcalc::{ext_power, sym_power, tensor, IrrepSum};
use liemf::rootsys::{Family, RootSystem};
use liemf::{Caps, Weight};

pub type Check = Result<String, String>;

fn caps() -> Caps {
    Caps::default()
}

/// A_m weight with `head` at the start and `tail` at the end; overlapping
/// entries add, which gives the small-rank collapses such as (00200).
pub fn pat(m: usize, head: &[i32], tail: &[i32]) -> Weight {
    let mut v = vec![0; m];
    for (i, x) in head.iter().enumerate() {
        v[i] += x;
    }
    for (i, x) in tail.iter().enumerate() {
        v[m - tail.len() + i] += x;
    }
    Weight::from_slice(&v)
}

pub fn sum(terms: &[(Weight, i64)]) -> IrrepSum {
    let mut s = IrrepSum::new();
    for (w, m) in terms {
        s.add_term(w.clone(), *m).unwrap();
    }
    s
}

fn ones(ws: &[Weight]) -> IrrepSum {
    sum(&ws.iter().map(|w| (w.clone(), 1)).collect::<Vec<_>>())
}

fn a(m: usize) -> std::sync::Arc<RootSystem> {
    RootSystem::new(Family::A, m).unwrap()
}

fn expect_eq(label: &str, got: IrrepSum, want: IrrepSum) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{label}: got {got}, expected {want}"))
    }
}

fn adj(m: usize) -> IrrepSum {
    IrrepSum::irreducible(pat(m, &[1], &[1]))
}

/// Symmetric and exterior powers of the adjoint module of A_m.
pub fn plethysm_golden() -> Check {
    let c = caps();
    let w = Weight::from_slice;
    let mut n = 0;
    let mut check = |label: String, got: IrrepSum, want: IrrepSum| -> Result<(), String> {
        n += 1;
        expect_eq(&label, got, want)
    };
    let r2 = a(2);
    let r3 = a(3);
    let r4 = a(4);
    check("S^2(11)".into(), sym_power(&r2, 2, &adj(2), &c).unwrap(), ones(&[w(&[2, 2]), w(&[1, 1]), w(&[0, 0])]))?;
    check("Λ^2(11)".into(), ext_power(&r2, 2, &adj(2), &c).unwrap(), ones(&[w(&[3, 0]), w(&[0, 3]), w(&[1, 1])]))?;
    check(
        "Λ^3(11)".into(),
        ext_power(&r2, 3, &adj(2), &c).unwrap(),
        ones(&[w(&[1, 1]), w(&[2, 2]), w(&[3, 0]), w(&[0, 3]), w(&[0, 0])]),
    )?;
    check(
        "Λ^3(101)".into(),
        ext_power(&r3, 3, &adj(3), &c).unwrap(),
        ones(&[
            w(&[1, 0, 1]),
            w(&[0, 2, 0]),
            w(&[1, 2, 1]),
            w(&[2, 0, 2]),
            w(&[2, 1, 0]),
            w(&[0, 1, 2]),
            w(&[4, 0, 0]),
            w(&[0, 0, 4]),
            w(&[0, 0, 0]),
        ]),
    )?;
    check(
        "S^3(11)".into(),
        sym_power(&r2, 3, &adj(2), &c).unwrap(),
        ones(&[w(&[3, 3]), w(&[2, 2]), w(&[1, 1]), w(&[3, 0]), w(&[0, 3]), w(&[0, 0])]),
    )?;
    check(
        "S^3(101)".into(),
        sym_power(&r3, 3, &adj(3), &c).unwrap(),
        sum(&[
            (w(&[3, 0, 3]), 1),
            (w(&[2, 0, 2]), 1),
            (w(&[1, 0, 1]), 2),
            (w(&[1, 2, 1]), 1),
            (w(&[0, 1, 2]), 1),
            (w(&[2, 1, 0]), 1),
            (w(&[0, 0, 0]), 1),
        ]),
    )?;
    check(
        "S^3(1001)".into(),
        sym_power(&r4, 3, &adj(4), &c).unwrap(),
        sum(&[
            (w(&[3, 0, 0, 3]), 1),
            (w(&[2, 0, 0, 2]), 1),
            (w(&[1, 0, 0, 1]), 2),
            (w(&[1, 1, 1, 1]), 1),
            (w(&[0, 1, 0, 2]), 1),
            (w(&[2, 0, 1, 0]), 1),
            (w(&[0, 1, 1, 0]), 1),
            (w(&[0, 0, 0, 0]), 1),
        ]),
    )?;
    for m in 4..=6 {
        let r = a(m);
        let z = Weight::zero(m);
        check(
            format!("S^2 adjoint of A_{m}"),
            sym_power(&r, 2, &adj(m), &c).unwrap(),
            ones(&[pat(m, &[2], &[2]), pat(m, &[1], &[1]), pat(m, &[0, 1], &[1, 0]), z.clone()]),
        )?;
        check(
            format!("Λ^2 adjoint of A_{m}"),
            ext_power(&r, 2, &adj(m), &c).unwrap(),
            ones(&[pat(m, &[0, 1], &[2]), pat(m, &[2], &[1, 0]), pat(m, &[1], &[1])]),
        )?;
        check(
            format!("Λ^3 adjoint of A_{m}"),
            ext_power(&r, 3, &adj(m), &c).unwrap(),
            ones(&[
                pat(m, &[1, 1], &[1, 1]),
                pat(m, &[2], &[2]),
                pat(m, &[1], &[1]),
                pat(m, &[0, 1], &[1, 0]),
                pat(m, &[3], &[1, 0, 0]),
                pat(m, &[0, 0, 1], &[3]),
                pat(m, &[2], &[1, 0]),
                pat(m, &[0, 1], &[2]),
                z.clone(),
            ]),
        )?;
        if m >= 5 {
            check(
                format!("S^3 adjoint of A_{m}"),
                sym_power(&r, 3, &adj(m), &c).unwrap(),
                sum(&[
                    (pat(m, &[3], &[3]), 1),
                    (pat(m, &[2], &[2]), 1),
                    (pat(m, &[1], &[1]), 2),
                    (pat(m, &[0, 1], &[1, 0]), 1),
                    (pat(m, &[0, 0, 1], &[1, 0, 0]), 1),
                    (pat(m, &[1, 1], &[1, 1]), 1),
                    (pat(m, &[2], &[1, 0]), 1),
                    (pat(m, &[0, 1], &[2]), 1),
                    (z.clone(), 1),
                ]),
            )?;
        }
    }
    Ok(format!("{n} plethysm identities"))
}

/// The one-box tensor rule for λ_1 ⊗ λ_i in types B, C, D of rank at most 6.
pub fn koike_terada() -> Check {
    let c = caps();
    let mut n = 0;
    for (f, lo) in [(Family::B, 2), (Family::C, 2), (Family::D, 4)] {
        for rank in lo..=6 {
            let r = RootSystem::new(f, rank).unwrap();
            let fund = |i: usize| if i == 0 { Weight::zero(rank) } else { Weight::fundamental(rank, i) };
            let top = if f == Family::C { rank } else { rank - 2 };
            for i in 1..=top {
                let mut want = vec![&fund(1) + &fund(i), fund(i - 1)];
                if f == Family::D && i == rank - 2 {
                    want.push(&fund(rank - 1) + &fund(rank));
                } else if i < rank {
                    want.push(fund(i + 1));
                }
                let got = tensor(&r, &IrrepSum::irreducible(fund(1)), &IrrepSum::irreducible(fund(i)), &c).unwrap();
                expect_eq(&format!("{} λ_1 ⊗ λ_{i}", r.name()), got, ones(&want))?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} products"))
}

/// For C_n, λ_1 ⊗ λ is the sum over diagrams one box away from that of λ.
pub fn symplectic_box_rule(max_rank: usize, max_s: i32) -> Check {
    let c = caps();
    let mut n = 0;
    for rank in 2..=max_rank {
        let r = RootSystem::new(Family::C, rank).unwrap();
        for lam in dominant_up_to(rank, max_s) {
            let parts: Vec<i32> = (0..rank).map(|j| lam.as_slice()[j..].iter().sum()).collect();
            let mut want = Vec::new();
            for j in 0..rank {
                for d in [-1, 1] {
                    let mut p = parts.clone();
                    p[j] += d;
                    let ok = p[j] >= 0 && (j == 0 || p[j - 1] >= p[j]) && (j + 1 == rank || p[j] >= p[j + 1]);
                    if ok {
                        want.push(Weight::from_slice(&(0..rank).map(|k| p[k] - p.get(k + 1).copied().unwrap_or(0)).collect::<Vec<_>>()));
                    }
                }
            }
            let got = tensor(&r, &IrrepSum::irreducible(Weight::fundamental(rank, 1)), &IrrepSum::irreducible(lam.clone()), &c).unwrap();
            expect_eq(&format!("{} λ_1 ⊗ {lam}", r.name()), got, ones(&want))?;
            n += 1;
        }
    }
    Ok(format!("{n} products"))
}

pub fn dominant_up_to(rank: usize, max_s: i32) -> Vec<Weight> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i32>| {
                let used: i32 = v.iter().sum();
                (0..=max_s - used).map(move |x| {
                    let mut v = v.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(|v| Weight::from_slice(&v)).collect()
}

/// Embedding targets for the table rows, with `Y` recorded by name.
pub fn embedding_targets() -> Vec<(usize, Weight, String)> {
    let f = |n: usize, i: usize| Weight::fundamental(n, i);
    let mut v: Vec<(usize, Weight, String)> = vec![
        (0, Weight::from_slice(&[3]), "C2".into()),
        (0, Weight::from_slice(&[4]), "B2".into()),
        (0, Weight::from_slice(&[5]), "C3".into()),
        (0, Weight::from_slice(&[6]), "B3".into()),
        (1, Weight::from_slice(&[1, 1]), "D4".into()),
        (2, Weight::from_slice(&[1, 0, 1]), "B7".into()),
        (2, Weight::from_slice(&[0, 2, 0]), "D10".into()),
        (4, f(5, 3), "C10".into()),
        (6, f(7, 4), "D35".into()),
        (8, f(9, 5), "C126".into()),
        (10, f(11, 6), "D462".into()),
        (12, f(13, 7), "C1716".into()),
    ];
    for n in 4..=10 {
        v.push((0, Weight::from_slice(&[2 * n - 1]), format!("C{n}")));
        v.push((0, Weight::from_slice(&[2 * n]), format!("B{n}")));
    }
    v
}

pub fn steinberg_targets() -> Check {
    use liemf::embed::build_embedding;
    use liemf::mfcheck::{table2, RowKind};
    let c = caps();
    let mut n = 0;
    for (l, delta, y) in embedding_targets() {
        let e = build_embedding(l, &delta, &c).map_err(|err| format!("A_{} {delta}: {err}", l + 1))?;
        if e.y_name() != y {
            return Err(format!("A_{} {delta}: got {}, expected {y}", l + 1, e.y_name()));
        }
        n += 1;
    }
    for row in table2() {
        let RowKind::Mf(insts) = &row.kind else { continue };
        for i in insts {
            let e = build_embedding(i.l, &i.delta, &c).map_err(|err| format!("{row}: {err}"))?;
            let name = row.y.replace('_', "");
            let literal = name[1..].chars().all(|ch| ch.is_ascii_digit());
            let ok = if literal { e.y_name() == name } else { e.y_name().starts_with(&name[..1]) };
            if !ok {
                return Err(format!("{row} {}: got {}", i.label, e.y_name()));
            }
            n += 1;
        }
    }
    Ok(format!("{n} embeddings"))
}

pub fn table_if_direction(scale_cap: u128) -> Check {
    use liemf::mfcheck::{table1, table2, verify_table_row, InstanceOutcome};
    let c = caps();
    let (mut pass, mut skipped) = (0, Vec::new());
    for (t, rows) in [(1, table1()), (2, table2())] {
        for row in rows {
            let rep = verify_table_row(&row, scale_cap, &c).map_err(|e| format!("{row}: {e}"))?;
            for r in &rep.instances {
                match &r.outcome {
                    InstanceOutcome::Pass(_) => pass += 1,
                    InstanceOutcome::Fail(m) => return Err(format!("{row} {}: not MF, repeated {:?}", r.instance.label, m.witnesses)),
                    InstanceOutcome::Skipped { reason } => {
                        if t == 2 && r.dim <= num_bigint::BigUint::from(scale_cap) {
                            return Err(format!("{row} {}: skipped under the cap: {reason}", r.instance.label));
                        }
                        skipped.push(format!("T{t} {} ({reason})", r.instance.label));
                    }
                }
            }
        }
    }
    Ok(format!("{pass} MF instances, {} skipped over cap", skipped.len()))
}

pub fn spin_table(full: bool) -> Check {
    use liemf::mfcheck::{table3, verify_table_row, RowKind};
    let row = table3();
    let RowKind::Factors { factors, .. } = &row.kind else { unreachable!() };
    let x = RootSystem::new(Family::A, 7).unwrap();
    let mut total = num_bigint::BigUint::from(0u32);
    for (_, mu) in factors {
        total += liemf::charcalc::weyl_dim(&x, mu).unwrap();
    }
    if total != num_bigint::BigUint::from(1u64 << 34) {
        return Err(format!("dimension sum {total}"));
    }
    if !full {
        return Ok("Σ dim = 2^34".into());
    }
    let rep = verify_table_row(&row, u128::MAX, &caps()).map_err(|e| e.to_string())?;
    let fc = rep.factors.unwrap();
    let found: std::collections::BTreeSet<_> = fc.found.iter().cloned().collect();
    let missing: Vec<_> = fc.expected.iter().filter(|f| !found.contains(*f)).collect();
    if fc.expected[..18].iter().any(|f| !found.contains(f)) {
        return Err(format!("missing among the first 18: {missing:?}"));
    }
    let extra = fc.found.len() - (fc.expected.len() - missing.len());
    if missing.is_empty() && extra == 0 && fc.complete {
        Ok(format!("Σ dim = 2^34; all {} factors re-derived at their levels", fc.expected.len()))
    } else {
        Ok(format!("Σ dim = 2^34; first 18 re-derived; {} missing, {extra} extra", missing.len()))
    }
}

pub fn witness_regression() -> Check {
    use liemf::mfcheck::{check_witness, witnesses};
    let c = caps();
    let ws = witnesses();
    for wt in &ws {
        let m = check_witness(wt, &c).map_err(|e| format!("{}: {e}", wt.name))?;
        if m < wt.mult {
            return Err(format!("{}: ({}) has multiplicity {m}, expected at least {}", wt.name, wt.weight, wt.mult));
        }
    }
    let r = a(2);
    let s6 = sym_power(&r, 6, &adj(2), &c).unwrap();
    if s6.mult(&Weight::from_slice(&[3, 3])) < 3 {
        return Err(format!("S^6(11) has (3,3)^{}", s6.mult(&Weight::from_slice(&[3, 3]))));
    }
    let r3 = a(3);
    let l3 = ext_power(&r3, 3, &IrrepSum::irreducible(Weight::from_slice(&[0, 3, 0])), &c).unwrap();
    if l3.mult(&Weight::from_slice(&[1, 3, 1])) < 2 {
        return Err(format!("Λ^3(030) has (1,3,1)^{}", l3.mult(&Weight::from_slice(&[1, 3, 1]))));
    }
    Ok(format!("{} witnesses", ws.len() + 2))
}

pub fn scan_targets() -> Vec<(usize, Weight)> {
    vec![
        (1, Weight::from_slice(&[1, 1])),
        (2, Weight::from_slice(&[0, 2, 0])),
        (2, Weight::from_slice(&[1, 1, 1])),
        (4, Weight::fundamental(5, 3)),
    ]
}

pub fn only_if_scans() -> Check {
    use liemf::embed::build_embedding;
    use liemf::mfcheck::{expected_mf, scan_candidates, triality_normalize};
    use std::collections::BTreeSet;
    let c = caps();
    let (mut total, mut over) = (0, 0);
    for (l, delta) in scan_targets() {
        let e = build_embedding(l, &delta, &c).map_err(|e| e.to_string())?;
        let rep = scan_candidates(&e, 2, 1_000_000, &c).map_err(|e| e.to_string())?;
        if !rep.skipped.is_empty() {
            return Err(format!("{}: {} candidates undecided", e.y_name(), rep.skipped.len()));
        }
        let norm = |it: &mut dyn Iterator<Item = Weight>| it.map(|w| triality_normalize(&w)).collect::<BTreeSet<_>>();
        let got = norm(&mut rep.mf.iter().cloned());
        let want = norm(&mut expected_mf(&e, 2, 1_000_000).map_err(|e| e.to_string())?.into_iter());
        if got != want {
            let extra: Vec<_> = got.difference(&want).map(|w| w.to_string()).collect();
            let lost: Vec<_> = want.difference(&got).map(|w| w.to_string()).collect();
            return Err(format!("A_{} {delta} → {}: unexpected {extra:?}, missing {lost:?}", l + 1, e.y_name()));
        }
        total += got.len();
        over += rep.over_bound.len();
    }
    Ok(format!("4 embeddings, {total} MF weights, {over} over the dimension bound"))
}

pub mod props {
    //! Randomised property suites driven by proptest's runner so the same
    //! bodies serve the `properties` tests and the acceptance report.

    use std::collections::BTreeMap;
    use std::sync::Arc;

    use liemf::branch::{levels, ParabolicSpec};
    use liemf::charcalc::{self, dominant_character, expand, ext_power, sym_power, tensor, weyl_dim, DominantCharacter, IrrepSum};
    use liemf::embed::{build_embedding, restrict_direct, EmbeddingSpec};
    use liemf::mfcheck::{restrict, Strategy as Route};
    use liemf::rootsys::{Family, RootSystem};
    use liemf::{Caps, Weight};
    use num_bigint::{BigInt, BigUint};
    use proptest::prelude::*;
    use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

    use super::Check;

    pub fn runner(cases: u32, deterministic: bool) -> TestRunner {
        let config = Config { cases, failure_persistence: None, max_shrink_iters: 64, ..Config::default() };
        if deterministic {
            TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
        } else {
            TestRunner::new(config)
        }
    }

    fn caps() -> Caps {
        Caps::default()
    }

    const SYSTEMS: [(Family, usize); 10] = [
        (Family::A, 1),
        (Family::A, 2),
        (Family::A, 3),
        (Family::A, 4),
        (Family::B, 2),
        (Family::B, 3),
        (Family::C, 2),
        (Family::C, 3),
        (Family::D, 4),
        (Family::B, 4),
    ];

    fn system(i: usize) -> Arc<RootSystem> {
        let (f, n) = SYSTEMS[i % SYSTEMS.len()];
        RootSystem::new(f, n).unwrap()
    }

    /// Truncates `raw` to the rank, then zeroes labels from the end until
    /// the dimension is at most `cap`.
    fn fit(r: &RootSystem, raw: &[i32], cap: u32) -> Weight {
        let mut v: Vec<i32> = raw.iter().take(r.rank()).copied().collect();
        v.resize(r.rank(), 0);
        let mut k = v.len();
        loop {
            let w = Weight::from_slice(&v);
            if weyl_dim(r, &w).unwrap() <= BigUint::from(cap) || k == 0 {
                return w;
            }
            k -= 1;
            v[k] = 0;
        }
    }

    fn labels() -> impl proptest::strategy::Strategy<Value = Vec<i32>> {
        proptest::collection::vec(0..3i32, 8)
    }

    fn dim_of(r: &RootSystem, s: &IrrepSum) -> BigInt {
        s.dim(r).unwrap()
    }

    fn binom(n: u64, k: u64) -> BigInt {
        if k > n {
            return BigInt::from(0);
        }
        (0..k).fold(BigInt::from(1), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
    }

    fn ok(b: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
        if b {
            Ok(())
        } else {
            Err(TestCaseError::fail(msg()))
        }
    }

    fn report<T: std::fmt::Debug>(name: &str, r: Result<(), proptest::test_runner::TestError<T>>, cases: u32) -> Result<u32, String> {
        r.map(|_| cases).map_err(|e| format!("{name}: {e}"))
    }

    pub fn dimension_conservation(cases: u32, det: bool) -> Check {
        let c = caps();
        let mut total = 0;
        total += report(
            "tensor",
            runner(cases, det).run(&(0..SYSTEMS.len(), labels(), labels()), |(i, x, y)| {
                let r = system(i);
                let (a, b) = (fit(&r, &x, 80), fit(&r, &y, 80));
                let t = tensor(&r, &IrrepSum::irreducible(a.clone()), &IrrepSum::irreducible(b.clone()), &c).unwrap();
                let want = BigInt::from(weyl_dim(&r, &a).unwrap() * weyl_dim(&r, &b).unwrap());
                ok(dim_of(&r, &t) == want, || format!("{} {a} ⊗ {b}", r.name()))
            }),
            cases,
        )?;
        total += report(
            "powers",
            runner(cases, det).run(&(0..SYSTEMS.len(), labels(), 2..5usize), |(i, x, k)| {
                let r = system(i);
                let a = fit(&r, &x, 24);
                let d = weyl_dim(&r, &a).unwrap().try_into().unwrap();
                let m = IrrepSum::irreducible(a.clone());
                let s = sym_power(&r, k, &m, &c).unwrap();
                let e = ext_power(&r, k, &m, &c).unwrap();
                ok(dim_of(&r, &s) == binom(d + k as u64 - 1, k as u64), || format!("S^{k} {} {a}", r.name()))?;
                ok(dim_of(&r, &e) == binom(d, k as u64), || format!("Λ^{k} {} {a}", r.name()))
            }),
            cases,
        )?;
        total += report(
            "levi levels",
            runner(cases, det).run(&(0..SYSTEMS.len(), labels(), 1u32..255), |(i, x, mask)| {
                let r = system(i);
                let a = fit(&r, &x, 2000);
                let mut removed: Vec<usize> = (0..r.rank()).filter(|j| mask & (1 << j) != 0).collect();
                if removed.is_empty() || removed.len() == r.rank() {
                    removed = vec![mask as usize % r.rank()];
                }
                let p = ParabolicSpec::new(r.clone(), &removed).unwrap();
                let lv = levels(&r, &a, &p, &c).unwrap();
                let sum: BigInt = lv.levels.iter().map(|s| dim_of(&p.levi, s)).sum();
                ok(sum == BigInt::from(weyl_dim(&r, &a).unwrap()), || format!("{} {a} removing {removed:?}", r.name()))
            }),
            cases,
        )?;
        total += report(
            "restriction",
            runner(cases, det).run(&(0..EMBEDDINGS.len(), labels()), |(i, x)| {
                let e = embedding(i);
                let lam = fit(&e.y, &x, 20_000);
                let s = restrict_direct(&e, &lam, &c).unwrap();
                ok(dim_of(&e.x, &s) == BigInt::from(e.dim_y(&lam).unwrap()), || format!("{} {lam}", e.y_name()))
            }),
            cases,
        )?;
        Ok(format!("{total} cases"))
    }

    pub fn square_identity(cases: u32, det: bool) -> Check {
        let c = caps();
        report(
            "S²⊕Λ² = ⊗²",
            runner(cases, det).run(&(0..SYSTEMS.len(), labels(), labels(), any::<bool>()), |(i, x, y, two)| {
                let r = system(i);
                let mut m = IrrepSum::irreducible(fit(&r, &x, 40));
                if two {
                    m.add_term(fit(&r, &y, 20), 1).unwrap();
                }
                let lhs = sym_power(&r, 2, &m, &c).unwrap().plus(&ext_power(&r, 2, &m, &c).unwrap()).unwrap();
                ok(lhs == tensor(&r, &m, &m, &c).unwrap(), || format!("{} {m}", r.name()))
            }),
            cases,
        )
        .map(|n| format!("{n} cases"))
    }

    pub fn oracles(cases: u32, det: bool) -> Check {
        let c = caps();
        let small: Vec<usize> = (0..SYSTEMS.len()).filter(|&i| SYSTEMS[i].1 <= 3).collect();
        let groups: Vec<_> = small.iter().map(|&i| crate::common::weyl_group(&system(i))).collect();
        let n1 = report(
            "Freudenthal",
            runner(cases, det).run(&(0..small.len(), labels()), |(k, x)| {
                let r = system(small[k]);
                let lam = fit(&r, &x, 500);
                let ch = dominant_character(&r, &lam, &c).unwrap();
                let mine: BTreeMap<Vec<i32>, i64> = expand(&r, &ch).into_iter().map(|(w, m)| (w.as_slice().to_vec(), m)).collect();
                ok(mine == crate::common::full_weights(&r, &groups[k], lam.as_slice()), || format!("{} {lam}", r.name()))
            }),
            cases,
        )?;
        let n2 = report(
            "Klimyk",
            runner(cases, det).run(&(0..small.len(), labels(), labels()), |(k, x, y)| {
                let r = system(small[k]);
                let a = fit(&r, &x, 25);
                let b = fit(&r, &y, 20);
                let got = tensor(&r, &IrrepSum::irreducible(a.clone()), &IrrepSum::irreducible(b.clone()), &c).unwrap();
                let ea = expand(&r, &dominant_character(&r, &a, &c).unwrap());
                let eb = expand(&r, &dominant_character(&r, &b, &c).unwrap());
                let mut prod = DominantCharacter::default();
                for (p, m) in &ea {
                    for (q, n) in &eb {
                        let z = p + q;
                        if z.is_dominant() {
                            *prod.table.entry(z).or_insert(0) += m * n;
                        }
                    }
                }
                ok(got == charcalc::decompose(&r, &prod, &c).unwrap(), || format!("{} {a} ⊗ {b}", r.name()))
            }),
            cases,
        )?;
        Ok(format!("{} cases", n1 + n2))
    }

    const EMBEDDINGS: [(usize, &[i32]); 10] = [
        (0, &[3]),
        (0, &[4]),
        (0, &[5]),
        (0, &[6]),
        (0, &[7]),
        (0, &[8]),
        (1, &[1, 1]),
        (2, &[0, 2, 0]),
        (2, &[1, 0, 1]),
        (4, &[0, 0, 1, 0, 0]),
    ];

    fn embedding(i: usize) -> EmbeddingSpec {
        let (l, d) = EMBEDDINGS[i % EMBEDDINGS.len()];
        build_embedding(l, &Weight::from_slice(d), &caps()).unwrap()
    }

    pub fn strategy_agreement(cases: u32, det: bool) -> Check {
        let c = caps();
        report(
            "strategies",
            runner(cases, det).run(&(0..EMBEDDINGS.len(), labels()), |(i, x)| {
                let e = embedding(i);
                let lam = fit(&e.y, &x, 30_000);
                let a = restrict(&e, &lam, Route::Direct, &c).unwrap().0;
                let b = restrict(&e, &lam, Route::LevelPeel, &c).unwrap().0;
                ok(a == b, || format!("{} {lam}: direct {a}, levelpeel {b}", e.y_name()))?;
                if let Ok((k, _)) = restrict(&e, &lam, Route::Constructed, &c) {
                    ok(a == k, || format!("{} {lam}: direct {a}, constructed {k}", e.y_name()))?;
                }
                Ok(())
            }),
            cases,
        )
        .map(|n| format!("{n} cases"))
    }

    /// Permuting the pairs and flipping signs of the torus map is a Weyl
    /// group element of Y, except an odd number of flips in type D, which is
    /// the graph automorphism swapping the last two labels.
    pub fn torus_independence(cases: u32, det: bool) -> Check {
        let c = caps();
        let pool: Vec<usize> = (0..EMBEDDINGS.len()).filter(|&i| embedding(i).y_rank <= 4).collect();
        report(
            "torus pairing",
            runner(cases, det).run(&(0..pool.len(), labels(), any::<u8>(), any::<u64>()), |(k, x, flips, seed)| {
                let e = embedding(pool[k]);
                let n = e.y_rank;
                let mut order: Vec<usize> = (0..n).collect();
                let mut s = seed;
                for j in (1..n).rev() {
                    order.swap(j, (s % (j as u64 + 1)) as usize);
                    s /= j as u64 + 1;
                }
                let nus: Vec<Weight> = order
                    .iter()
                    .enumerate()
                    .map(|(j, &o)| if flips & (1 << j) != 0 { -&e.torus_map[o] } else { e.torus_map[o].clone() })
                    .collect();
                let odd = (0..n).filter(|j| flips & (1 << j) != 0).count() % 2 == 1;
                let f = e.with_torus_map(nus, &c).unwrap();
                let lam = fit(&e.y, &x, 20_000);
                let mut img = lam.clone();
                if odd && e.y_family == Family::D {
                    img.0.swap(n - 2, n - 1);
                }
                let a = restrict_direct(&e, &lam, &c).unwrap();
                let b = restrict_direct(&f, &img, &c).unwrap();
                ok(a == b, || format!("{} {lam}: {a} vs {b}", e.y_name()))
            }),
            cases,
        )
        .map(|n| format!("{n} cases"))
    }

    /// Restrictions from a Y whose modules are self-dual are self-dual.
    pub fn self_duality(cases: u32, det: bool) -> Check {
        let c = caps();
        report(
            "self-duality",
            runner(cases, det).run(&(0..EMBEDDINGS.len(), labels()), |(i, x)| {
                let e = embedding(i);
                let lam = fit(&e.y, &x, 20_000);
                let a = restrict_direct(&e, &lam, &c).unwrap();
                ok(charcalc::dual(&e.x, &a) == a, || format!("{} {lam}: {a}", e.y_name()))
            }),
            cases,
        )
        .map(|n| format!("{n} cases"))
    }
}
