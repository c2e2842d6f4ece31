//! One function per subcommand, each producing a `Record`.

use std::collections::BTreeSet;
use std::sync::Arc;

use liemf::branch::{levels, levi_restrict, ParabolicSpec};
use liemf::charcalc::{self, IrrepSum};
use liemf::embed::{build_embedding, EmbeddingSpec};
use liemf::mfcheck::{self, InstanceOutcome, Strategy, TableRow, Verdict};
use liemf::{Family, RootSystem, Weight};
use serde_json::{json, Value};

use crate::parse::{parse_system, parse_weight};
use crate::{cached, CliError, Command, JobConfig, Record, EXIT_CAP, EXIT_FAILED};

type Outcome = Result<(Record, bool), CliError>;

pub fn dispatch(cfg: &JobConfig) -> Outcome {
    match &cfg.command {
        Command::Dim { system, weight } => fresh(dim(system, weight)),
        Command::Char { system, weight } => character(cfg, system, weight),
        Command::Tensor { system, a, b } => tensor(cfg, system, a, b),
        Command::Sympow { system, k, weight } => power(cfg, "sympow", system, *k, weight),
        Command::Extpow { system, k, weight } => power(cfg, "extpow", system, *k, weight),
        Command::Levi { system, weight, remove } => levi(cfg, system, weight, remove),
        Command::Levels { system, weight, remove } => level_pieces(cfg, system, weight, remove),
        Command::Embed { l, delta } => fresh(embed(cfg, *l, delta)),
        Command::Restrict { l, delta, lambda, strategy } => restrict(cfg, *l, delta, lambda, strategy),
        Command::Mf { l, delta, lambda, strategy } => mf(cfg, *l, delta, lambda, strategy),
        Command::Verify { table, row, cap } => fresh(verify(cfg, *table, row.as_deref(), *cap)),
        Command::Scan { l, delta, max_s, cap } => fresh(scan(cfg, *l, delta, *max_s, *cap)),
    }
}

fn fresh(r: Result<Record, CliError>) -> Outcome {
    r.map(|r| (r, false))
}

fn system(s: &str) -> Result<Arc<RootSystem>, CliError> {
    let (f, n) = parse_system(s)?;
    Ok(RootSystem::new(f, n)?)
}

fn labels(w: &Weight) -> Value {
    json!(w.as_slice())
}

/// Terms in display order with their dimensions.
fn sum_json(r: &RootSystem, s: &IrrepSum) -> Result<Value, CliError> {
    let mut items: Vec<(&Weight, &i64)> = s.iter().collect();
    items.sort_by(|a, b| b.0.s_value().cmp(&a.0.s_value()).then_with(|| b.0.cmp(a.0)));
    let mut out = Vec::new();
    for (w, m) in items {
        out.push(json!({ "weight": labels(w), "mult": m, "dim": charcalc::weyl_dim(r, w)?.to_string() }));
    }
    Ok(Value::Array(out))
}

fn dim(sys: &str, weight: &str) -> Result<Record, CliError> {
    let r = system(sys)?;
    let w = parse_weight(weight, r.rank())?;
    let d = charcalc::weyl_dim(&r, &w)?;
    let mut rec = Record::new("dim", json!({ "system": r.name(), "weight": labels(&w) }));
    rec.result = json!({ "dim": d.to_string() });
    rec.dims = json!({ "V": d.to_string() });
    rec.human = d.to_string();
    Ok(rec)
}

fn character(cfg: &JobConfig, sys: &str, weight: &str) -> Outcome {
    let r = system(sys)?;
    let w = parse_weight(weight, r.rank())?;
    let inputs = json!({ "system": r.name(), "weight": labels(&w) });
    cached(cfg, "char", inputs.clone(), || {
        let ch = charcalc::dominant_character(&r, &w, &cfg.caps)?;
        let mut items: Vec<(&Weight, &i64)> = ch.table.iter().collect();
        items.sort_by(|a, b| r.height(b.0).cmp(&r.height(a.0)).then_with(|| b.0.cmp(a.0)));
        let d = charcalc::weyl_dim(&r, &w)?;
        let mut rec = Record::new("char", inputs);
        rec.result = Value::Array(items.iter().map(|(x, m)| json!({ "weight": labels(x), "mult": m })).collect());
        rec.dims = json!({ "V": d.to_string(), "dominant_weights": items.len() });
        rec.human = items.iter().map(|(x, m)| format!("({x}) {m}")).collect::<Vec<_>>().join("\n");
        Ok(rec)
    })
}

fn sum_record(command: &str, inputs: Value, r: &RootSystem, s: &IrrepSum) -> Result<Record, CliError> {
    let mut rec = Record::new(command, inputs);
    let d = s.dim(r)?;
    rec.result = sum_json(r, s)?;
    rec.dims = json!({ "total": d.to_string(), "factors": s.len() });
    rec.human = format!("{s}\ndim {d}");
    Ok(rec)
}

fn tensor(cfg: &JobConfig, sys: &str, a: &str, b: &str) -> Outcome {
    let r = system(sys)?;
    let x = parse_weight(a, r.rank())?;
    let y = parse_weight(b, r.rank())?;
    let inputs = json!({ "system": r.name(), "a": labels(&x), "b": labels(&y) });
    cached(cfg, "tensor", inputs.clone(), || {
        let s = charcalc::tensor(&r, &IrrepSum::irreducible(x.clone()), &IrrepSum::irreducible(y.clone()), &cfg.caps)?;
        sum_record("tensor", inputs, &r, &s)
    })
}

fn power(cfg: &JobConfig, op: &str, sys: &str, k: usize, weight: &str) -> Outcome {
    let r = system(sys)?;
    let w = parse_weight(weight, r.rank())?;
    let inputs = json!({ "system": r.name(), "k": k, "weight": labels(&w) });
    cached(cfg, op, inputs.clone(), || {
        let m = IrrepSum::irreducible(w.clone());
        let s = if op == "sympow" { charcalc::sym_power(&r, k, &m, &cfg.caps)? } else { charcalc::ext_power(&r, k, &m, &cfg.caps)? };
        sum_record(op, inputs, &r, &s)
    })
}

fn parabolic(r: &Arc<RootSystem>, remove: &[usize]) -> Result<ParabolicSpec, CliError> {
    if let Some(&bad) = remove.iter().find(|&&i| i == 0 || i > r.rank()) {
        return Err(CliError::Usage(format!("--remove index {bad} is outside 1..={}", r.rank())));
    }
    let zero_based: Vec<usize> = remove.iter().map(|i| i - 1).collect();
    Ok(ParabolicSpec::new(r.clone(), &zero_based)?)
}

fn factor_label(p: &ParabolicSpec, levi_weight: &Weight) -> String {
    let parts: Vec<String> =
        p.factors.iter().zip(p.split_tuple(levi_weight)).map(|(f, w)| format!("{}{}({w})", f.family.letter(), f.nodes.len())).collect();
    if parts.is_empty() {
        "T".into()
    } else {
        parts.join(" ⊗ ")
    }
}

fn levi(cfg: &JobConfig, sys: &str, weight: &str, remove: &[usize]) -> Outcome {
    let r = system(sys)?;
    let w = parse_weight(weight, r.rank())?;
    let p = parabolic(&r, remove)?;
    let inputs = json!({ "system": r.name(), "weight": labels(&w), "remove": p.removed.iter().map(|i| i + 1).collect::<Vec<_>>() });
    cached(cfg, "levi", inputs.clone(), || {
        let b = levi_restrict(&r, &w, &p, &cfg.caps)?;
        let mut rec = Record::new("levi", inputs);
        let mut rows = Vec::new();
        let mut lines = Vec::new();
        for t in &b.terms {
            let d = charcalc::weyl_dim(&p.levi, &t.levi)?;
            rows.push(json!({
                "charge": t.central,
                "levi": labels(&t.levi),
                "factors": p.split_tuple(&t.levi).iter().map(labels).collect::<Vec<_>>(),
                "mult": t.mult,
                "dim": d.to_string(),
            }));
            let m = if t.mult == 1 { String::new() } else { format!("^{}", t.mult) };
            lines.push(format!("charge {:?}: {}{m}", t.central, factor_label(&p, &t.levi)));
        }
        rec.result = Value::Array(rows);
        rec.dims = json!({ "V": charcalc::weyl_dim(&r, &w)?.to_string(), "levi": p.levi.name() });
        rec.human = lines.join("\n");
        Ok(rec)
    })
}

fn level_pieces(cfg: &JobConfig, sys: &str, weight: &str, remove: &[usize]) -> Outcome {
    let r = system(sys)?;
    let w = parse_weight(weight, r.rank())?;
    let p = parabolic(&r, remove)?;
    let inputs = json!({ "system": r.name(), "weight": labels(&w), "remove": p.removed.iter().map(|i| i + 1).collect::<Vec<_>>() });
    cached(cfg, "levels", inputs.clone(), || {
        let lv = levels(&r, &w, &p, &cfg.caps)?;
        let mut rec = Record::new("levels", inputs);
        let mut rows = Vec::new();
        let mut lines = Vec::new();
        let mut dims = Vec::new();
        for (k, piece) in lv.levels.iter().enumerate() {
            let d = piece.dim(&p.levi)?;
            rows.push(sum_json(&p.levi, piece)?);
            dims.push(d.to_string());
            lines.push(format!("V^{}: {piece}  [dim {d}]", k + 1));
        }
        rec.result = Value::Array(rows);
        rec.dims = json!({ "V": charcalc::weyl_dim(&r, &w)?.to_string(), "levels": dims, "levi": p.levi.name() });
        rec.human = lines.join("\n");
        Ok(rec)
    })
}

fn embedding(cfg: &JobConfig, l: usize, delta: &str) -> Result<EmbeddingSpec, CliError> {
    let d = parse_weight(delta, l + 1)?;
    Ok(build_embedding(l, &d, &cfg.caps)?)
}

fn embed(cfg: &JobConfig, l: usize, delta: &str) -> Result<Record, CliError> {
    let e = embedding(cfg, l, delta)?;
    let mut rec = Record::new("embed", json!({ "l": l, "delta": labels(&e.delta) }));
    let form = if e.y_family == Family::C { "symplectic" } else { "orthogonal" };
    rec.result = json!({
        "y": e.y_name(),
        "family": e.y_family.letter().to_string(),
        "rank": e.y_rank,
        "form": form,
        "torus_map": e.torus_map.iter().map(labels).collect::<Vec<_>>(),
    });
    rec.dims = json!({ "W": e.dim_w.to_string() });
    rec.human = e.y_name();
    Ok(rec)
}

fn strategy(s: &str) -> Result<Strategy, CliError> {
    s.parse().map_err(|_| CliError::Usage(format!("unknown strategy `{s}`; expected auto, direct, constructed or levelpeel")))
}

fn restrict(cfg: &JobConfig, l: usize, delta: &str, lambda: &str, strat: &str) -> Outcome {
    let st = strategy(strat)?;
    let e = embedding(cfg, l, delta)?;
    let lam = parse_weight(lambda, e.y_rank)?;
    let inputs = json!({ "l": l, "delta": labels(&e.delta), "lambda": labels(&lam), "strategy": st.to_string() });
    cached(cfg, "restrict", inputs.clone(), || {
        let (s, used) = mfcheck::restrict(&e, &lam, st, &cfg.caps)?;
        let mut rec = sum_record("restrict", inputs, &e.x, &s)?;
        rec.result = json!({ "y": e.y_name(), "method": used.to_string(), "factors": rec.result });
        rec.dims = json!({ "V": e.dim_y(&lam)?.to_string(), "total": s.dim(&e.x)?.to_string(), "factors": s.len() });
        rec.human = format!("{s}\ndim {} via {used}", e.dim_y(&lam)?);
        Ok(rec)
    })
}

fn mf(cfg: &JobConfig, l: usize, delta: &str, lambda: &str, strat: &str) -> Outcome {
    let st = strategy(strat)?;
    let e = embedding(cfg, l, delta)?;
    let lam = parse_weight(lambda, e.y_rank)?;
    let inputs = json!({ "l": l, "delta": labels(&e.delta), "lambda": labels(&lam), "strategy": st.to_string() });
    cached(cfg, "mf", inputs.clone(), || {
        let rep = mfcheck::is_mf(&e, &lam, st, &cfg.caps)?;
        let mut rec = Record::new("mf", inputs);
        rec.result = json!({
            "y": e.y_name(),
            "verdict": rep.verdict.to_string(),
            "method": rep.method.map(|m| m.to_string()),
            "factors": sum_json(&e.x, &rep.factors)?,
        });
        rec.dims = json!({ "V": rep.dim.to_string(), "factors": rep.factors.len() });
        rec.cap_hits = rep.cap_hits.clone();
        let repeated = || rep.witnesses.iter().map(|(w, m)| format!("({w})^{m}")).collect::<Vec<_>>().join(" + ");
        rec.human = match rep.verdict {
            Verdict::Mf => format!("MF, {} factors\n{}", rep.factors.len(), rep.factors),
            Verdict::NotMf => format!("not MF, repeated: {}\n{}", repeated(), rep.factors),
            Verdict::Unknown => {
                rec.exit = EXIT_CAP;
                format!("unknown: {}", rep.cap_hits.join("; "))
            }
        };
        if rep.verdict == Verdict::NotMf {
            rec.witnesses = Some(Value::Array(rep.witnesses.iter().map(|(w, m)| json!({ "weight": labels(w), "mult": m })).collect()));
        }
        Ok(rec)
    })
}

fn select_rows(table: u8, row: Option<&str>) -> Result<Vec<TableRow>, CliError> {
    let rows = match table {
        1 => mfcheck::table1(),
        2 => mfcheck::table2(),
        _ => vec![mfcheck::table3()],
    };
    let Some(sel) = row else { return Ok(rows) };
    if let Ok(i) = sel.trim().parse::<usize>() {
        return rows
            .get(i.wrapping_sub(1))
            .cloned()
            .map(|r| vec![r])
            .ok_or_else(|| CliError::Usage(format!("row {i} is outside 1..={}", rows.len())));
    }
    let r: TableRow = sel.parse().map_err(|_| CliError::Usage(format!("no table row `{sel}`")))?;
    if r.table != table {
        return Err(CliError::Usage(format!("row `{sel}` belongs to table {}", r.table)));
    }
    Ok(vec![r])
}

fn verify(cfg: &JobConfig, table: u8, row: Option<&str>, cap: u128) -> Result<Record, CliError> {
    let rows = select_rows(table, row)?;
    let mut rec = Record::new("verify", json!({ "table": table, "row": row, "cap": cap.to_string() }));
    let mut out_rows = Vec::new();
    let mut lines = Vec::new();
    let mut failures = 0usize;
    for r in &rows {
        let rep = mfcheck::verify_table_row(r, cap, &cfg.caps)?;
        if let Some(fc) = &rep.factors {
            let ok = fc.passed();
            failures += usize::from(!ok);
            let found: BTreeSet<_> = fc.found.iter().collect();
            let missing: Vec<String> = fc.expected.iter().filter(|f| !found.contains(f)).map(|(k, w)| format!("V^{k} ({w})")).collect();
            lines.push(format!(
                "{r}: {} {}/{} factors at their levels, Σ dim {} vs dim V {}",
                if ok { "PASS" } else { "FAIL" },
                fc.expected.len() - missing.len(),
                fc.expected.len(),
                fc.dim_sum,
                fc.dim_v
            ));
            for m in &missing {
                lines.push(format!("  missing {m}"));
            }
            out_rows.push(json!({
                "row": r.to_string(),
                "passed": ok,
                "expected": fc.expected.len(),
                "missing": missing,
                "found": fc.found.iter().map(|(k, w)| json!({ "level": k, "weight": labels(w) })).collect::<Vec<_>>(),
                "dim_sum": fc.dim_sum.to_string(),
                "dim_v": fc.dim_v.to_string(),
                "complete": fc.complete,
            }));
            continue;
        }
        let (mut pass, mut failed, mut skipped) = (0usize, Vec::new(), Vec::new());
        let mut detail = Vec::new();
        for i in &rep.instances {
            let inst = &i.instance;
            let name = format!("{} (l={}, δ={})", inst.label, inst.l, inst.delta);
            let who = json!({ "label": inst.label, "l": inst.l, "delta": labels(&inst.delta), "lambda": labels(&inst.lambda), "dim": i.dim.to_string() });
            match &i.outcome {
                InstanceOutcome::Pass(_) => pass += 1,
                InstanceOutcome::Fail(m) => {
                    let reps = m.witnesses.iter().map(|(w, k)| format!("({w})^{k}")).collect::<Vec<_>>().join(" + ");
                    detail.push(format!("  FAIL {name}: repeated {reps}"));
                    failed.push(who);
                }
                InstanceOutcome::Skipped { reason } => {
                    detail.push(format!("  skipped {name}: {reason}"));
                    let mut s = who;
                    s["reason"] = json!(reason);
                    skipped.push(s);
                }
            }
        }
        failures += failed.len();
        let tag = if failed.is_empty() { "PASS" } else { "FAIL" };
        lines.push(format!("{r}: {tag} {pass} MF, {} failed, {} skipped", failed.len(), skipped.len()));
        lines.extend(detail);
        out_rows.push(json!({ "row": r.to_string(), "passed": pass, "failed": failed, "skipped": skipped }));
    }
    lines.push(if failures == 0 { format!("all {} rows pass", rows.len()) } else { format!("{failures} failures") });
    rec.result = json!({ "rows": out_rows, "failures": failures });
    rec.human = lines.join("\n");
    if failures > 0 {
        rec.exit = EXIT_FAILED;
    }
    Ok(rec)
}

fn scan(cfg: &JobConfig, l: usize, delta: &str, max_s: i32, cap: u128) -> Result<Record, CliError> {
    let e = embedding(cfg, l, delta)?;
    let rep = mfcheck::scan_candidates(&e, max_s, cap, &cfg.caps)?;
    let want = mfcheck::expected_mf(&e, max_s, cap)?;
    let norm = |ws: &mut dyn Iterator<Item = &Weight>| ws.map(mfcheck::triality_normalize).collect::<BTreeSet<_>>();
    let got_n = norm(&mut rep.mf.iter());
    let want_n = norm(&mut want.iter());
    let unexpected: Vec<&Weight> = got_n.difference(&want_n).collect();
    let missing: Vec<&Weight> = want_n.difference(&got_n).collect();
    let mut rec = Record::new("scan", json!({ "l": l, "delta": labels(&e.delta), "max_s": max_s, "cap": cap.to_string() }));
    let list = |ws: &[&Weight]| ws.iter().map(|w| labels(w)).collect::<Vec<_>>();
    let mf: Vec<&Weight> = rep.mf.iter().collect();
    let not_mf: Vec<&Weight> = rep.not_mf.iter().collect();
    rec.result = json!({
        "y": e.y_name(),
        "mf": list(&mf),
        "not_mf": list(&not_mf),
        "over_bound": rep.over_bound.len(),
        "undecided": rep.skipped.iter().map(|(w, why)| json!({ "weight": labels(w), "reason": why })).collect::<Vec<_>>(),
        "unexpected": list(&unexpected),
        "missing": list(&missing),
    });
    rec.cap_hits = rep.skipped.iter().map(|(w, why)| format!("({w}): {why}")).collect();
    let show = |ws: &[&Weight]| ws.iter().map(|w| format!("({w})")).collect::<Vec<_>>().join(" ");
    let mut lines = vec![
        format!(
            "{} with S ≤ {max_s}, dim ≤ {cap}: {} MF, {} not MF, {} over bound, {} undecided",
            e.y_name(),
            rep.mf.len(),
            rep.not_mf.len(),
            rep.over_bound.len(),
            rep.skipped.len()
        ),
        format!("MF: {}", show(&mf)),
    ];
    if unexpected.is_empty() && missing.is_empty() {
        lines.push("matches the tables".into());
    } else {
        lines.push(format!("unexpected MF: {}", show(&unexpected)));
        lines.push(format!("missing: {}", show(&missing)));
        rec.exit = EXIT_FAILED;
    }
    if rec.exit == 0 && !rep.skipped.is_empty() {
        rec.exit = EXIT_CAP;
    }
    rec.human = lines.join("\n");
    Ok(rec)
}
