use std::path::Path;
use std::process::{Command, Output};

use liemf::Weight;
use liemf_cli::cache::{fingerprint, Cache};
use liemf_cli::parse::{labels, parse_weight, symbolic};
use serde_json::{json, Value};

fn liemf(cache: Option<&Path>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_liemf"));
    match cache {
        Some(dir) => cmd.env("LIEMF_CACHE_DIR", dir),
        None => cmd.env_remove("LIEMF_CACHE_DIR").arg("--no-cache"),
    };
    cmd.args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json_record(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn documented_examples() {
    let o = liemf(None, &["embed", "4", "0,0,1,0,0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("C10"), "{}", stdout(&o));

    let o = liemf(None, &["mf", "4", "0,0,1,0,0", "2λ2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("MF, 7 factors"), "{}", stdout(&o));

    let o = liemf(None, &["dim", "A7", "ω4"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "70"));

    let o = liemf(None, &["mf", "4", "0,0,1,0,0", "λ2+λ8"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("not MF"));
    assert!(stdout(&o).contains("(2,1,0,1,2)^6"), "{}", stdout(&o));
}

#[test]
fn usage_errors_name_the_token() {
    let o = liemf(None, &["mf", "4", "0,0,1,0,0", "x4"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("`x4`"));

    let o = liemf(None, &["dim", "Q7", "0"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Q7"));

    let o = liemf(None, &["dim", "A3", "1,2"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&liemf(None, &["embed", "4", "0,0,0,0,0"])), 2);
    assert_eq!(code(&liemf(None, &["frobnicate"])), 2);
    assert_eq!(code(&liemf(None, &["--help"])), 0);

    let o = liemf(None, &["--json", "dim", "A3", "1,-1,0"]);
    assert_eq!(code(&o), 2);
    let r = json_record(&o);
    assert_eq!(r["exit"], 2);
    assert!(r["error"].is_string());
}

#[test]
fn cap_hits_exit_three() {
    let caps = ["--max-dim", "10", "--max-levelpeel-dim", "10", "--max-constructed-dim", "10"];
    let mut args = caps.to_vec();
    args.extend(["--json", "mf", "4", "0,0,1,0,0", "λ2+λ8"]);
    let o = liemf(None, &args);
    assert_eq!(code(&o), 3);
    let r = json_record(&o);
    assert!(!r["cap_hits"].as_array().unwrap().is_empty());
    assert_eq!(r["result"]["verdict"], "unknown");
}

#[test]
fn json_schema() {
    let o = liemf(None, &["--json", "mf", "4", "0,0,1,0,0", "λ2+λ8"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.trim_end().lines().count(), 1);
    let r = json_record(&o);
    let keys: Vec<&str> = r.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    for k in ["cap_hits", "command", "dims", "inputs", "result", "timing", "witnesses"] {
        assert!(keys.contains(&k), "missing {k} in {keys:?}");
    }
    assert_eq!(r["command"], "mf");
    assert_eq!(r["inputs"]["lambda"], json!([0, 1, 0, 0, 0, 0, 0, 1, 0, 0]));
    assert!(r["timing"]["elapsed_ms"].is_number());
    assert_eq!(r["timing"]["cached"], false);
    let first = &r["witnesses"][0];
    assert_eq!(first["mult"], 6);
    assert_eq!(first["weight"], json!([2, 1, 0, 1, 2]));
    // serde_json keeps object keys sorted, so the raw text is canonical.
    assert_eq!(serde_json::to_string(&r).unwrap(), text.trim_end());
}

#[test]
fn verify_table_exit_status() {
    let o = liemf(None, &["verify", "--table", "2", "--row", "1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn weight_grammar_round_trips() {
    for rank in 1..=4usize {
        let mut w = vec![0i32; rank];
        loop {
            let wt = Weight::from(w.clone());
            assert_eq!(parse_weight(&labels(&wt), rank).unwrap(), wt);
            assert_eq!(parse_weight(&symbolic(&wt), rank).unwrap(), wt);
            let spaced = symbolic(&wt).replace('+', " + ").replace('λ', "omega");
            assert_eq!(parse_weight(&spaced, rank).unwrap(), wt);
            if rank >= 2 {
                let compact: String = w.iter().map(|c| c.to_string()).collect();
                assert_eq!(parse_weight(&compact, rank).unwrap(), wt);
            }
            let Some(i) = w.iter().position(|&c| c < 3) else { break };
            w[i] += 1;
            w[..i].iter_mut().for_each(|c| *c = 0);
        }
    }
    assert_eq!(parse_weight("2λ1+λ1", 2).unwrap(), Weight::from(vec![3, 0]));
    assert_eq!(parse_weight("12", 1).unwrap(), Weight::from(vec![12]));
    assert!(parse_weight("λ5", 4).is_err());
    assert!(parse_weight("", 4).is_err());
    assert!(parse_weight("1,a,0", 3).is_err());
}

#[test]
fn cache_store_and_evict() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::at(dir.path());
    let fp = fingerprint("dim", &json!({"system": "A7", "weight": [0, 0, 0, 1, 0, 0, 0]}));
    let value = json!({"result": {"dim": "70"}});
    assert_eq!(cache.get(&fp), None);
    cache.put(&fp, &value).unwrap();
    assert_eq!(cache.get(&fp), Some(value.clone()));

    let other = fingerprint("dim", &json!({"system": "A7", "weight": [1, 0, 0, 0, 0, 0, 0]}));
    assert_ne!(Cache::key(&fp), Cache::key(&other));
    assert_eq!(cache.get(&other), None);

    let disabled = Cache::disabled();
    disabled.put(&fp, &value).unwrap();
    assert_eq!(disabled.get(&fp), None);

    let key = Cache::key(&fp);
    let path = dir.path().join(&key[..2]).join(format!("{key}.json"));
    std::fs::write(&path, b"{not json").unwrap();
    assert_eq!(cache.get(&fp), None);
    assert!(!path.exists());

    std::fs::write(&path, serde_json::to_vec(&json!({"fingerprint": other, "value": value})).unwrap()).unwrap();
    assert_eq!(cache.get(&fp), None);
    assert!(!path.exists());
}

#[test]
fn cache_hit_matches_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--json", "mf", "4", "0,0,1,0,0", "2λ2"];
    let strip = |o: &Output| {
        let mut r = json_record(o);
        let cached = r["timing"]["cached"].as_bool().unwrap();
        r.as_object_mut().unwrap().remove("timing");
        (r, cached)
    };
    let (cold, c0) = strip(&liemf(Some(dir.path()), &args));
    let (warm, c1) = strip(&liemf(Some(dir.path()), &args));
    let (fresh, c2) = strip(&liemf(None, &args));
    assert_eq!((c0, c1, c2), (false, true, false));
    assert_eq!(cold, warm);
    assert_eq!(warm, fresh);

    // Equivalent spellings share one entry.
    let (_, c3) = strip(&liemf(Some(dir.path()), &["--json", "mf", "4", "00100", "0,2,0,0,0,0,0,0,0,0"]));
    assert!(c3);

    // Cap-limited results are never stored.
    let capped = ["--max-dim", "10", "--max-levelpeel-dim", "10", "--max-constructed-dim", "10", "--json", "mf", "4", "0,0,1,0,0", "λ3"];
    assert_eq!(code(&liemf(Some(dir.path()), &capped)), 3);
    let o = liemf(Some(dir.path()), &capped);
    assert_eq!((code(&o), strip(&o).1), (3, false));
}
