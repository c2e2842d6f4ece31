//! Input grammar for systems and weights.
//!
//! A system is a family letter and a rank: `A7`, `a7` or `A_7`.
//!
//! A weight is one of
//! - labels: `a1,a2,...,an`, integers separated by commas;
//! - compact digits `21012` when the rank is at least 2 and every label is a
//!   single digit;
//! - a sum of fundamental terms `[c]Fk` joined by `+`, where `F` is one of
//!   `λ`, `ω`, `l`, `w`, `L`, `W`, `lambda`, `omega`, `c` is a nonnegative
//!   integer and `k` is 1-based, e.g. `2λ1+λ3`;
//! - `0` for the zero weight.

use liemf::{Family, Weight};

use crate::CliError;

pub fn parse_system(s: &str) -> Result<(Family, usize), CliError> {
    let t = s.trim();
    let bad = || CliError::Usage(format!("bad system `{s}`: expected a family letter and rank like A7 or C_10"));
    let mut chars = t.chars();
    let letter = chars.next().ok_or_else(bad)?;
    let family = Family::from_letter(letter.to_ascii_uppercase()).ok_or_else(bad)?;
    let rest = chars.as_str().trim_start_matches('_');
    let rank: usize = rest.parse().map_err(|_| bad())?;
    Ok((family, rank))
}

const PREFIXES: [&str; 8] = ["lambda", "omega", "λ", "ω", "l", "w", "L", "W"];

pub fn parse_weight(s: &str, rank: usize) -> Result<Weight, CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(CliError::Usage("empty weight".into()));
    }
    if t == "0" {
        return Ok(Weight::zero(rank));
    }
    if t.contains(',') || (rank == 1 && t.chars().all(|c| c.is_ascii_digit())) {
        let labels = t
            .split(',')
            .map(|p| p.parse::<i32>().map_err(|_| CliError::Usage(format!("bad label `{p}` in weight `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        return check_rank(labels, rank, s);
    }
    if t.chars().all(|c| c.is_ascii_digit()) {
        let labels = t.chars().map(|c| c.to_digit(10).expect("digit") as i32).collect();
        return check_rank(labels, rank, s);
    }
    let mut w = Weight::zero(rank);
    for term in t.split('+') {
        let digits = term.chars().take_while(|c| c.is_ascii_digit()).count();
        let (coef, rest) = term.split_at(digits);
        let c: i32 = if coef.is_empty() { 1 } else { coef.parse().map_err(|_| CliError::Usage(format!("bad coefficient in `{term}`")))? };
        let idx = PREFIXES
            .iter()
            .find_map(|p| rest.strip_prefix(p))
            .ok_or_else(|| CliError::Usage(format!("bad weight token `{term}` in `{s}`")))?;
        let k: usize = idx.parse().map_err(|_| CliError::Usage(format!("bad weight token `{term}` in `{s}`")))?;
        if k == 0 || k > rank {
            return Err(CliError::Usage(format!("index {k} in `{term}` is outside 1..={rank}")));
        }
        w = &w + &Weight::fundamental(rank, k).scale(c);
    }
    Ok(w)
}

fn check_rank(labels: Vec<i32>, rank: usize, s: &str) -> Result<Weight, CliError> {
    if labels.len() != rank {
        return Err(CliError::Usage(format!("weight `{s}` has {} labels, expected {rank}", labels.len())));
    }
    Ok(Weight::from(labels))
}

/// Comma-separated labels, the canonical form.
pub fn labels(w: &Weight) -> String {
    w.to_string()
}

/// Fundamental-weight sum such as `2λ1+λ3`, or `0`.
pub fn symbolic(w: &Weight) -> String {
    let terms: Vec<String> = w
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| if c == 1 { format!("λ{}", i + 1) } else { format!("{c}λ{}", i + 1) })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}
