//! Multiplicity-freeness verdicts, classification tables and bounded scans.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::charcalc::{self, IrrepSum};
use crate::embed::{self, EmbeddingSpec, XLevelCache};
use crate::error::{Error, Result};
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Mf,
    NotMf,
    /// No strategy finished within the caps.
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Mf => "MF",
            Verdict::NotMf => "not MF",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Direct,
    Constructed,
    #[serde(rename = "levelpeel")]
    LevelPeel,
    Auto,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Direct => "direct",
            Strategy::Constructed => "constructed",
            Strategy::LevelPeel => "levelpeel",
            Strategy::Auto => "auto",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Strategy::Direct),
            "constructed" => Ok(Strategy::Constructed),
            "levelpeel" => Ok(Strategy::LevelPeel),
            "auto" => Ok(Strategy::Auto),
            _ => Err(Error::Invalid(format!("unknown strategy {s}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MfReport {
    pub embedding: EmbeddingSpec,
    pub lambda: Weight,
    pub verdict: Verdict,
    pub factors: IrrepSum,
    /// Repeated factors, by multiplicity then S-value.
    pub witnesses: Vec<(Weight, i64)>,
    pub method: Option<Strategy>,
    pub dim: BigUint,
    pub elapsed: Duration,
    pub cap_hits: Vec<String>,
}

fn soft(e: &Error) -> bool {
    matches!(e, Error::ResourceLimit(_) | Error::UnsupportedShape(_) | Error::NotApplicable(_))
}

/// Restriction of `V_Y(λ)` by one strategy.
pub fn restrict(e: &EmbeddingSpec, lambda: &Weight, strategy: Strategy, caps: &Caps) -> Result<(IrrepSum, Strategy)> {
    let dim = e.dim_y(lambda)?;
    match strategy {
        Strategy::Direct => Ok((embed::restrict_direct(e, lambda, caps)?, strategy)),
        Strategy::Constructed => {
            if dim > BigUint::from(caps.max_constructed_dim) {
                return Err(Error::ResourceLimit(format!("dim {dim} exceeds the constructed cap")));
            }
            Ok((embed::restrict_constructed(e, lambda, caps)?, strategy))
        }
        Strategy::LevelPeel => {
            let lp = embed::restrict_levelpeel(e, lambda, None, caps)?;
            if !lp.complete {
                return Err(Error::ResourceLimit("level peeling did not reach the full dimension".into()));
            }
            Ok((lp.factors, strategy))
        }
        Strategy::Auto => {
            let mut last = Error::ResourceLimit("no strategy applies".into());
            for s in [Strategy::Constructed, Strategy::Direct, Strategy::LevelPeel] {
                if s == Strategy::Constructed && !embed::constructed_supported(e, lambda) {
                    continue;
                }
                if s == Strategy::Direct && dim > BigUint::from(caps.max_direct_dim) {
                    continue;
                }
                match restrict(e, lambda, s, caps) {
                    Ok(r) => return Ok(r),
                    Err(err) if soft(&err) => last = err,
                    Err(err) => return Err(err),
                }
            }
            Err(last)
        }
    }
}

/// Decides whether `V_Y(λ)↓X` is multiplicity-free. Cap hits give
/// [`Verdict::Unknown`], never a verdict.
pub fn is_mf(e: &EmbeddingSpec, lambda: &Weight, strategy: Strategy, caps: &Caps) -> Result<MfReport> {
    let start = Instant::now();
    if lambda.rank() != e.y_rank || !lambda.is_dominant() {
        return Err(Error::NotDominant(lambda.to_string()));
    }
    let dim = e.dim_y(lambda)?;
    let mut report = MfReport {
        embedding: e.clone(),
        lambda: lambda.clone(),
        verdict: Verdict::Unknown,
        factors: IrrepSum::new(),
        witnesses: vec![],
        method: None,
        dim,
        elapsed: Duration::ZERO,
        cap_hits: vec![],
    };
    match restrict(e, lambda, strategy, caps) {
        Ok((factors, method)) => {
            report.witnesses = factors.repeated();
            report.verdict = if report.witnesses.is_empty() { Verdict::Mf } else { Verdict::NotMf };
            report.factors = factors;
            report.method = Some(method);
        }
        Err(err) if soft(&err) => report.cap_hits.push(err.to_string()),
        Err(err) => return Err(err),
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

/// One concrete `(δ, λ)` of a table row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub l: usize,
    pub delta: Weight,
    pub lambda: Weight,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowKind {
    /// Every instance is expected to be MF.
    Mf(Vec<Instance>),
    /// Expected composition factors with the level `V^k` of first appearance.
    Factors { l: usize, delta: Weight, lambda: Weight, factors: Vec<(usize, Weight)> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub table: u8,
    pub x: String,
    pub delta: String,
    pub y: String,
    pub lambda: String,
    pub kind: RowKind,
}

impl fmt::Display for TableRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{} | {} | {} | {} | {}", self.table, self.x, self.delta, self.y, self.lambda)
    }
}

impl FromStr for TableRow {
    type Err = Error;

    /// Looks a row up in the built-in tables by its notation.
    fn from_str(s: &str) -> Result<Self> {
        let norm = |t: &str| t.split('|').map(str::trim).collect::<Vec<_>>().join(" | ");
        let key = norm(s);
        all_rows().into_iter().find(|r| r.to_string() == key).ok_or_else(|| Error::Invalid(format!("no table row {s}")))
    }
}

fn fund(n: usize, i: usize) -> Weight {
    Weight::fundamental(n, i)
}

fn mid(m: usize, b: i32) -> Weight {
    fund(m, m / 2 + 1).scale(b)
}

fn ends(m: usize, k: usize, c: i32) -> Weight {
    (&fund(m, k) + &fund(m, m + 1 - k)).scale(c)
}

/// Instances for `(l, δ)`; none when the embedding is not proper.
fn labelled(l: usize, delta: &Weight, lambdas: Vec<Lam>) -> Vec<Instance> {
    let Ok((_, n)) = embed::target_group(l, delta) else { return vec![] };
    lambdas.into_iter().map(|(label, f)| Instance { l, delta: delta.clone(), lambda: f(n), label }).collect()
}

type Lam = (String, Box<dyn Fn(usize) -> Weight>);

fn lam_fund(i: usize) -> Lam {
    (format!("λ{i}"), Box::new(move |n| fund(n, i)))
}

fn lam_last(back: usize) -> Lam {
    (if back == 0 { "λn".to_string() } else { format!("λn-{back}") }, Box::new(move |n| fund(n, n - back)))
}

fn lam_mul(c: i32, i: usize) -> Lam {
    (format!("{c}λ{i}"), Box::new(move |n| fund(n, i).scale(c)))
}

fn lam_w(label: &str, v: Vec<i32>) -> Lam {
    (label.to_string(), Box::new(move |_| Weight::from(v.clone())))
}

fn lam_sum(terms: Vec<(i32, usize)>) -> Lam {
    let label = terms.iter().map(|&(c, i)| if c == 1 { format!("λ{i}") } else { format!("{c}λ{i}") }).collect::<Vec<_>>().join("+");
    (label, Box::new(move |n| terms.iter().fold(Weight::zero(n), |acc, &(c, i)| &acc + &fund(n, i).scale(c))))
}

/// Largest `l` for which Table 1 families are instantiated.
pub const TABLE1_MAX_L: usize = 8;
/// Largest `b` in the `bω_{s+1}` family of Table 1.
pub const TABLE1_MAX_B: i32 = 3;
/// Largest `n` in the `A_1`, `2n−1`/`2n` families of Table 2.
pub const TABLE2_MAX_N: usize = 10;

pub fn table1() -> Vec<TableRow> {
    let row = |delta: &str, lambda: &str, inst: Vec<Instance>| TableRow {
        table: 1,
        x: "A_{l+1}".into(),
        delta: delta.into(),
        y: "-".into(),
        lambda: lambda.into(),
        kind: RowKind::Mf(inst),
    };
    let mut rows = Vec::new();
    let ls = 1..=TABLE1_MAX_L;
    let mut inst = Vec::new();
    for l in ls.clone().filter(|l| l % 2 == 0) {
        for b in 1..=TABLE1_MAX_B {
            inst.extend(labelled(l, &mid(l + 1, b), vec![lam_fund(2), lam_mul(2, 1)]));
        }
    }
    rows.push(row("bω_{s+1} (l even, s = l/2)", "λ_2, 2λ_1", inst));
    let inst = ls.clone().flat_map(|l| labelled(l, &ends(l + 1, 1, 1), vec![lam_fund(2), lam_mul(2, 1)])).collect();
    rows.push(row("ω_1+ω_{l+1}", "λ_2, 2λ_1", inst));
    let inst = ls
        .clone()
        .filter(|l| l % 2 == 1)
        .flat_map(|l| {
            let s = l.div_ceil(2);
            labelled(l, &(&fund(l + 1, s) + &fund(l + 1, s + 1)), vec![lam_fund(2), lam_mul(2, 1)])
        })
        .collect();
    rows.push(row("ω_s+ω_{s+1} (l odd, s = (l+1)/2)", "λ_2, 2λ_1", inst));
    let inst = ls.clone().flat_map(|l| labelled(l, &ends(l + 1, 1, 2), vec![lam_fund(2)])).collect();
    rows.push(row("2ω_1+2ω_{l+1}", "λ_2", inst));
    let inst = ls.clone().filter(|&l| l >= 3).flat_map(|l| labelled(l, &ends(l + 1, 2, 1), vec![lam_fund(2)])).collect();
    rows.push(row("ω_2+ω_l (l ≥ 3)", "λ_2", inst));
    let inst = ls.flat_map(|l| labelled(l, &ends(l + 1, 1, 1), vec![lam_fund(3), lam_mul(3, 1)])).collect();
    rows.push(row("ω_1+ω_{l+1}", "λ_3, 3λ_1", inst));
    rows
}

pub fn table2() -> Vec<TableRow> {
    let row = |x: &str, delta: &str, y: &str, lambda: &str, inst: Vec<Instance>| TableRow {
        table: 2,
        x: x.into(),
        delta: delta.into(),
        y: y.into(),
        lambda: lambda.into(),
        kind: RowKind::Mf(inst),
    };
    let w = |v: &[i32]| Weight::from_slice(v);
    let rank2 = |extra: &[&str]| {
        let mut v: Vec<Lam> = vec![lam_w("01", vec![0, 1])];
        for b in 2..=5 {
            v.push(lam_w(&format!("{b}0"), vec![b, 0]));
            v.push(lam_w(&format!("0{b}"), vec![0, b]));
        }
        for s in extra {
            let lab: Vec<i32> = s.chars().map(|c| c.to_digit(10).expect("digit") as i32).collect();
            v.push(lam_w(s, lab));
        }
        v
    };
    let mut rows = vec![
        row("A_1", "3", "C_2", "01, b0, 0b (2≤b≤5), 11, 12, 21", labelled(0, &w(&[3]), rank2(&["11", "12", "21"]))),
        row("A_1", "4", "B_2", "01, b0, 0b (2≤b≤5), 11, 12, 21", labelled(0, &w(&[4]), rank2(&["11", "12", "21"]))),
        row(
            "A_1",
            "5",
            "C_3",
            "010, 200, 001, 300",
            labelled(0, &w(&[5]), ["010", "200", "001", "300"].iter().map(|s| lam_w(s, parse_digits(s))).collect()),
        ),
        row(
            "A_1",
            "6",
            "B_3",
            "010, 200, 001, 101, 002, 300",
            labelled(0, &w(&[6]), ["010", "200", "001", "101", "002", "300"].iter().map(|s| lam_w(s, parse_digits(s))).collect()),
        ),
    ];
    let mut inst = Vec::new();
    for n in 4..=TABLE2_MAX_N {
        let mut lams = vec![lam_fund(2), lam_mul(2, 1)];
        if n <= 5 {
            lams.push(lam_fund(3));
            lams.push(lam_last(0));
        }
        inst.extend(labelled(0, &w(&[2 * n as i32 - 1]), lams));
    }
    rows.push(row("A_1", "2n-1 (n≥4)", "C_n", "λ_2, 2λ_1, λ_3 (n=4,5), λ_n (n=4,5)", inst));
    let mut inst = Vec::new();
    for n in 4..=TABLE2_MAX_N {
        let mut lams = vec![lam_fund(2), lam_mul(2, 1)];
        if n <= 8 {
            lams.push(lam_last(0));
        }
        inst.extend(labelled(0, &w(&[2 * n as i32]), lams));
    }
    rows.push(row("A_1", "2n", "B_n", "λ_2, 2λ_1, λ_n (n≤8)", inst));

    let d11 = w(&[1, 1]);
    let mut lams = Vec::new();
    for i in [1, 3, 4] {
        for c in 1..=5 {
            lams.push(lam_mul(c, i));
        }
    }
    rows.push(row("A_2", "11", "D_4", "cλ_i (c≤5, i=1,3,4)", labelled(1, &d11, lams)));
    rows.push(row("A_2", "11", "D_4", "λ_2", labelled(1, &d11, vec![lam_fund(2)])));
    let pairs = [(1, 3), (1, 4), (3, 4)];
    rows.push(row(
        "A_2",
        "11",
        "D_4",
        "λ_i+λ_j (i,j ∈ {1,3,4})",
        labelled(1, &d11, pairs.iter().map(|&(i, j)| lam_sum(vec![(1, i), (1, j)])).collect()),
    ));

    let d020 = w(&[0, 2, 0]);
    rows.push(row("A_3", "020", "D_10", "cλ_1 (c≤3)", labelled(2, &d020, (1..=3).map(|c| lam_mul(c, 1)).collect())));
    rows.push(row("A_3", "020", "D_10", "λ_2, λ_3", labelled(2, &d020, vec![lam_fund(2), lam_fund(3)])));
    rows.push(row("A_3", "020", "D_10", "λ_9, λ_10", labelled(2, &d020, vec![lam_fund(9), lam_fund(10)])));

    let d5 = fund(5, 3);
    rows.push(row("A_5", "ω_3", "C_10", "λ_i", labelled(4, &d5, (1..=10).map(lam_fund).collect())));
    rows.push(row("A_5", "ω_3", "C_10", "cλ_1 (c ≤ 5)", labelled(4, &d5, (1..=5).map(|c| lam_mul(c, 1)).collect())));
    rows.push(row("A_5", "ω_3", "C_10", "2λ_2", labelled(4, &d5, vec![lam_mul(2, 2)])));
    rows.push(row(
        "A_5",
        "ω_3",
        "C_10",
        "λ_1+λ_i (i = 2,3,4)",
        labelled(4, &d5, (2..=4).map(|i| lam_sum(vec![(1, 1), (1, i)])).collect()),
    ));
    rows.push(row("A_5", "ω_3", "C_10", "λ_1+λ_10", labelled(4, &d5, vec![lam_sum(vec![(1, 1), (1, 10)])])));
    rows.push(row("A_5", "ω_3", "C_10", "2λ_1+λ_2", labelled(4, &d5, vec![lam_sum(vec![(2, 1), (1, 2)])])));

    let d7 = fund(7, 4);
    rows.push(row("A_7", "ω_4", "D_35", "λ_3, λ_4", labelled(6, &d7, vec![lam_fund(3), lam_fund(4)])));
    rows.push(row("A_7", "ω_4", "D_35", "3λ_1, 4λ_1", labelled(6, &d7, vec![lam_mul(3, 1), lam_mul(4, 1)])));
    rows.push(row("A_7", "ω_4", "D_35", "λ_34, λ_35", labelled(6, &d7, vec![lam_fund(34), lam_fund(35)])));
    rows.push(row("A_9", "ω_5", "C_126", "λ_3", labelled(8, &fund(9, 5), vec![lam_fund(3)])));
    rows.push(row("A_9", "ω_5", "C_126", "3λ_1", labelled(8, &fund(9, 5), vec![lam_mul(3, 1)])));
    rows.push(row("A_11", "ω_6", "D_462", "λ_3", labelled(10, &fund(11, 6), vec![lam_fund(3)])));
    rows.push(row("A_11", "ω_6", "D_462", "3λ_1", labelled(10, &fund(11, 6), vec![lam_mul(3, 1)])));
    rows.push(row("A_13", "ω_7", "C_1716", "λ_3", labelled(12, &fund(13, 7), vec![lam_fund(3)])));
    rows
}

fn parse_digits(s: &str) -> Vec<i32> {
    s.chars().map(|c| c.to_digit(10).expect("digit") as i32).collect()
}

/// Composition factors of the half-spin module of `D_35` restricted to
/// `A_7` via `ω_4`, with the level `V^k` where each first appears.
pub const TABLE3: [(usize, &str); 36] = [
    (1, "000000(10)"),
    (2, "0101008"),
    (3, "0300016"),
    (3, "1101106"),
    (3, "0003006"),
    (4, "2110114"),
    (4, "1301005"),
    (4, "3000304"),
    (4, "1011204"),
    (4, "0202014"),
    (5, "1211103"),
    (5, "1010402"),
    (5, "4010122"),
    (5, "3120013"),
    (5, "2101212"),
    (5, "2021022"),
    (5, "0120212"),
    (5, "3200203"),
    (6, "0040030"),
    (6, "1210301"),
    (6, "1130111"),
    (6, "0200410"),
    (6, "6000040"),
    (6, "3031002"),
    (6, "0000600"),
    (6, "3111111"),
    (6, "5101021"),
    (6, "5020102"),
    (6, "2020220"),
    (6, "4002030"),
    (7, "7010020"),
    (7, "7002001"),
    (7, "5012010"),
    (7, "3030200"),
    (7, "1050010"),
    (8, "9000100"),
];

pub fn table3() -> TableRow {
    TableRow {
        table: 3,
        x: "A_7".into(),
        delta: "ω_4".into(),
        y: "D_35".into(),
        lambda: "λ_35".into(),
        kind: RowKind::Factors {
            l: 6,
            delta: fund(7, 4),
            lambda: fund(35, 35),
            factors: TABLE3.iter().map(|(k, s)| (*k, Weight::parse_compact(s).expect("table weight"))).collect(),
        },
    }
}

pub fn all_rows() -> Vec<TableRow> {
    let mut rows = table1();
    rows.extend(table2());
    rows.push(table3());
    rows
}

#[derive(Debug, Clone)]
pub enum InstanceOutcome {
    Pass(MfReport),
    Fail(MfReport),
    /// Over the scale cap, or no strategy finished within the caps.
    Skipped { reason: String },
}

#[derive(Debug, Clone)]
pub struct InstanceResult {
    pub instance: Instance,
    pub dim: BigUint,
    pub outcome: InstanceOutcome,
}

#[derive(Debug, Clone)]
pub struct FactorCheck {
    pub expected: Vec<(usize, Weight)>,
    pub found: Vec<(usize, Weight)>,
    pub dim_sum: BigUint,
    pub dim_v: BigUint,
    pub complete: bool,
}

impl FactorCheck {
    pub fn passed(&self) -> bool {
        let a: BTreeSet<_> = self.expected.iter().collect();
        let b: BTreeSet<_> = self.found.iter().collect();
        self.complete && a == b && self.dim_sum == self.dim_v
    }
}

#[derive(Debug, Clone)]
pub struct RowReport {
    pub row: TableRow,
    pub instances: Vec<InstanceResult>,
    pub factors: Option<FactorCheck>,
}

impl RowReport {
    pub fn failures(&self) -> usize {
        let inst = self.instances.iter().filter(|r| matches!(r.outcome, InstanceOutcome::Fail(_))).count();
        inst + usize::from(self.factors.as_ref().is_some_and(|f| !f.passed()))
    }

    pub fn skipped(&self) -> usize {
        self.instances.iter().filter(|r| matches!(r.outcome, InstanceOutcome::Skipped { .. })).count()
    }
}

/// Verifies one instance expected to be MF. Half-spin modules of D are not
/// gated by `scale_cap`: their level route does not grow with the dimension.
pub fn verify_instance(inst: &Instance, scale_cap: u128, caps: &Caps) -> Result<InstanceResult> {
    let skip = |reason: String, dim: BigUint| InstanceResult { instance: inst.clone(), dim, outcome: InstanceOutcome::Skipped { reason } };
    let e = match embed::build_embedding(inst.l, &inst.delta, caps) {
        Ok(e) => e,
        Err(Error::ResourceLimit(r)) => return Ok(skip(r, BigUint::from(0u32))),
        Err(err) => return Err(err),
    };
    let dim = e.dim_y(&inst.lambda)?;
    if dim > BigUint::from(scale_cap) && e.spin_parity(&inst.lambda).is_none() {
        return Ok(skip(format!("dim {dim} over scale cap {scale_cap}"), dim));
    }
    let report = is_mf(&e, &inst.lambda, Strategy::Auto, caps)?;
    let outcome = match report.verdict {
        Verdict::Mf => InstanceOutcome::Pass(report),
        Verdict::NotMf => InstanceOutcome::Fail(report),
        Verdict::Unknown => InstanceOutcome::Skipped { reason: report.cap_hits.join("; ") },
    };
    Ok(InstanceResult { instance: inst.clone(), dim, outcome })
}

/// Re-derives the expected factors by level peeling.
pub fn verify_factors(l: usize, delta: &Weight, lambda: &Weight, expected: &[(usize, Weight)], caps: &Caps) -> Result<FactorCheck> {
    let e = embed::build_embedding(l, delta, caps)?;
    let lp = embed::restrict_levelpeel(&e, lambda, None, caps)?;
    let found: Vec<(usize, Weight)> = lp.found.iter().map(|f| (f.level + 1, f.theta.clone())).collect();
    let mut dim_sum = BigUint::from(0u32);
    for (_, mu) in expected {
        dim_sum += charcalc::weyl_dim(&e.x, mu)?;
    }
    Ok(FactorCheck { expected: expected.to_vec(), found, dim_sum, dim_v: e.dim_y(lambda)?, complete: lp.complete })
}

pub fn verify_table_row(row: &TableRow, scale_cap: u128, caps: &Caps) -> Result<RowReport> {
    match &row.kind {
        RowKind::Mf(insts) => {
            let results: Vec<Result<InstanceResult>> = insts.par_iter().map(|i| verify_instance(i, scale_cap, caps)).collect();
            Ok(RowReport { row: row.clone(), instances: results.into_iter().collect::<Result<_>>()?, factors: None })
        }
        RowKind::Factors { l, delta, lambda, factors } => {
            Ok(RowReport { row: row.clone(), instances: vec![], factors: Some(verify_factors(*l, delta, lambda, factors, caps)?) })
        }
    }
}

/// Representative of `λ` under the graph automorphisms of `D_4` permuting
/// labels 1, 3, 4: the lexicographically largest image.
pub fn triality_normalize(lambda: &Weight) -> Weight {
    if lambda.rank() != 4 {
        return lambda.clone();
    }
    let (a, b, c, d) = (lambda[0], lambda[1], lambda[2], lambda[3]);
    let perms = [[a, c, d], [a, d, c], [c, a, d], [c, d, a], [d, a, c], [d, c, a]];
    perms.iter().map(|p| Weight::from(vec![p[0], b, p[1], p[2]])).max().expect("nonempty")
}

#[derive(Debug, Clone, Default)]
pub struct ScanReport {
    pub mf: Vec<Weight>,
    pub not_mf: Vec<Weight>,
    /// Candidates left undecided by the resource caps.
    pub skipped: Vec<(Weight, String)>,
    /// Candidates over the dimension bound, not examined.
    pub over_bound: Vec<Weight>,
}

/// Dominant weights of the given rank with coordinate sum at most `max_s`.
pub fn weights_up_to(rank: usize, max_s: i32) -> Vec<Weight> {
    let mut out: Vec<Vec<i32>> = vec![vec![]];
    for _ in 0..rank {
        let mut next = Vec::new();
        for v in &out {
            let used: i32 = v.iter().sum();
            for c in 0..=(max_s - used) {
                let mut u = v.clone();
                u.push(c);
                next.push(u);
            }
        }
        out = next;
    }
    let mut ws: Vec<Weight> = out.into_iter().map(Weight::from).collect();
    ws.sort_by(|a, b| a.s_value().cmp(&b.s_value()).then(b.cmp(a)));
    ws
}

/// Classifies every dominant `λ` with `S(λ) ≤ max_s` and `dim ≤ max_dim`.
pub fn scan_candidates(e: &EmbeddingSpec, max_s: i32, max_dim: u128, caps: &Caps) -> Result<ScanReport> {
    if max_s < 0 {
        return Ok(ScanReport::default());
    }
    let cands = weights_up_to(e.y_rank, max_s);
    let results: Vec<Result<(Weight, Option<Verdict>, String)>> = cands
        .par_iter()
        .map(|lam| {
            let dim = e.dim_y(lam)?;
            if dim > BigUint::from(max_dim) {
                return Ok((lam.clone(), None, format!("dim {dim} over bound")));
            }
            let r = is_mf(e, lam, Strategy::Auto, caps)?;
            Ok((lam.clone(), Some(r.verdict), r.cap_hits.join("; ")))
        })
        .collect();
    let mut rep = ScanReport::default();
    for r in results {
        match r? {
            (w, Some(Verdict::Mf), _) => rep.mf.push(w),
            (w, Some(Verdict::NotMf), _) => rep.not_mf.push(w),
            (w, None, _) => rep.over_bound.push(w),
            (w, _, why) => rep.skipped.push((w, why)),
        }
    }
    Ok(rep)
}

/// MF weights predicted by the tables for `(l, δ)`, plus `0` and `λ_1`,
/// restricted to `S(λ) ≤ max_s` and `dim ≤ max_dim`.
pub fn expected_mf(e: &EmbeddingSpec, max_s: i32, max_dim: u128) -> Result<BTreeSet<Weight>> {
    let mut set = BTreeSet::new();
    let n = e.y_rank;
    set.insert(Weight::zero(n));
    set.insert(fund(n, 1));
    for row in table1().into_iter().chain(table2()) {
        if let RowKind::Mf(insts) = row.kind {
            for i in insts {
                if i.l == e.l && i.delta == e.delta {
                    set.insert(i.lambda);
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for w in set {
        if w.s_value() <= max_s as i64 && e.dim_y(&w)? <= BigUint::from(max_dim) {
            out.insert(w);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub levels_checked: usize,
    /// `n_θ` for each factor.
    pub first_levels: Vec<(Weight, usize)>,
}

/// Checks `found` against the level pieces of `V_Y(λ)`: every level must equal
/// the sum of the found factors' own levels, shifted by where they start. For
/// an MF `found`, also checks `S(ν) ≤ S(V^d) + 1` for repeated `ν` in `V^{d+1}`.
pub fn level_consistency_check(e: &EmbeddingSpec, lambda: &Weight, found: &IrrepSum, caps: &Caps) -> Result<ConsistencyReport> {
    let g = e.grader;
    let top = e.exponent_of_y(lambda)?;
    let a = g.alpha_exponent();
    let mut first = Vec::new();
    for (theta, _) in found.iter() {
        let gap = top - g.exponent(theta);
        if gap < 0 || gap % a != 0 {
            return Err(Error::Mismatch { level: 0, detail: format!("{theta} is not at a whole level below λ") });
        }
        first.push((theta.clone(), (gap / a) as usize));
    }
    let y = embed::y_levels(e, lambda, None, caps)?;
    let cache = XLevelCache::new(e, caps);
    let depth = y.len().max(first.iter().map(|f| f.1 + 1).max().unwrap_or(0));
    let mut prev_s: Option<i64> = None;
    for d in 0..depth {
        let have = y.get(d).cloned().unwrap_or_default();
        let mut predicted = IrrepSum::new();
        for (theta, n) in &first {
            if *n <= d {
                predicted.add_scaled(&cache.level(theta, d - n)?, found.mult(theta))?;
            }
        }
        if predicted != have {
            let diff = have.minus(&predicted)?;
            let (w, m) = diff.iter().next().map(|(w, m)| (w.clone(), *m)).unwrap_or_else(|| (Weight::zero(e.l), 0));
            return Err(Error::Mismatch { level: d, detail: format!("{w} differs by {m}") });
        }
        if found.is_mf() {
            if let Some(ps) = prev_s {
                for (w, m) in have.iter() {
                    if *m >= 2 && w.s_value() > ps + 1 {
                        return Err(Error::Mismatch { level: d, detail: format!("repeated {w} has S-value above {}", ps + 1) });
                    }
                }
            }
        }
        prev_s = Some(have.iter().map(|(w, _)| w.s_value()).max().unwrap_or(0));
    }
    Ok(ConsistencyReport { levels_checked: depth, first_levels: first })
}

/// A quoted non-MF witness: `V_Y(λ)↓X`, or one level of it, contains
/// `weight` at least `mult` times.
#[derive(Debug, Clone)]
pub struct Witness {
    pub name: &'static str,
    pub l: usize,
    pub delta: Weight,
    pub lambda: Weight,
    /// Level index for a statement about one level, else the whole restriction.
    pub level: Option<usize>,
    pub weight: Weight,
    pub mult: i64,
}

pub fn witnesses() -> Vec<Witness> {
    let c10 = |name, terms: &[(i32, usize)], wt: &str, mult| Witness {
        name,
        l: 4,
        delta: fund(5, 3),
        lambda: terms.iter().fold(Weight::zero(10), |acc, &(c, i)| &acc + &fund(10, i).scale(c)),
        level: None,
        weight: Weight::parse_compact(wt).expect("weight"),
        mult,
    };
    let mut v = vec![
        c10("C10 λ2+λ8", &[(1, 2), (1, 8)], "21012", 6),
        c10("C10 λ2+λ3", &[(1, 2), (1, 3)], "10101", 2),
        c10("C10 λ1+2λ2", &[(1, 1), (2, 2)], "10101", 3),
        c10("C10 3λ1+λ2", &[(3, 1), (1, 2)], "01110", 2),
        c10("C10 4λ1+λ2", &[(4, 1), (1, 2)], "10201", 3),
        c10("C10 λ1+λ5", &[(1, 1), (1, 5)], "11011", 2),
        c10("C10 λ1+λ6", &[(1, 1), (1, 6)], "11111", 2),
        c10("C10 λ1+λ7", &[(1, 1), (1, 7)], "21012", 2),
        c10("C10 λ1+λ8", &[(1, 1), (1, 8)], "11111", 2),
        c10("C10 λ1+λ9", &[(1, 1), (1, 9)], "20202", 2),
        c10("C10 λ2+λ10", &[(1, 2), (1, 10)], "21012", 3),
    ];
    let mut lvl = c10("C10 2λ3 second level", &[(2, 3)], "1020", 4);
    lvl.level = Some(1);
    v.push(lvl);
    v
}

/// Observed multiplicity of the witness weight.
pub fn check_witness(wt: &Witness, caps: &Caps) -> Result<i64> {
    let e = embed::build_embedding(wt.l, &wt.delta, caps)?;
    match wt.level {
        None => Ok(restrict(&e, &wt.lambda, Strategy::Auto, caps)?.0.mult(&wt.weight)),
        Some(d) => Ok(embed::y_levels(&e, &wt.lambda, Some(d), caps)?.get(d).map_or(0, |s| s.mult(&wt.weight))),
    }
}
