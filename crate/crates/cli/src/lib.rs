//! Command-line front end: argument handling, output records and the result
//! cache. `run` is the whole program; `main` only forwards the exit code.

pub mod cache;
pub mod commands;
pub mod parse;

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use cache::Cache;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CAP: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] liemf::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use liemf::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(E::ResourceLimit(_)) => EXIT_CAP,
            CliError::Core(
                E::InvalidRank { .. }
                | E::NotDominant(_)
                | E::TrivialDelta
                | E::NotProper(_)
                | E::NotSelfDual(_)
                | E::Invalid(_)
                | E::UnsupportedShape(_)
                | E::NotApplicable(_),
            ) => EXIT_USAGE,
            CliError::Core(_) => EXIT_FAILED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

fn positive_u128(s: &str) -> Result<u128, String> {
    match s.replace('_', "").parse::<u128>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_secs(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err("must be a positive number of seconds".into()),
    }
}

#[derive(Debug, Parser)]
#[command(name = "liemf", version, about = "Characters, branching and multiplicity-free restrictions for classical groups")]
pub struct Cli {
    /// Output format; `json` prints one record per line with sorted keys.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    pub json: bool,
    /// Cache directory [default: $XDG_CACHE_HOME/liemf or ~/.cache/liemf].
    #[arg(long, env = "LIEMF_CACHE_DIR", global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Do not read or write the cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Worker threads (default: one per core).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Largest number of dominant weights held by one character.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_entries: Option<u64>,
    /// Largest dimension handed to the direct restriction.
    #[arg(long, global = true, value_parser = positive_u128)]
    pub max_dim: Option<u128>,
    /// Largest dimension handed to level peeling.
    #[arg(long, global = true, value_parser = positive_u128)]
    pub max_levelpeel_dim: Option<u128>,
    /// Largest dimension handed to the constructed restriction.
    #[arg(long, global = true, value_parser = positive_u128)]
    pub max_constructed_dim: Option<u128>,
    /// Wall-clock budget in seconds.
    #[arg(long, global = true, value_parser = positive_secs)]
    pub timeout: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Weyl dimension of V(λ).
    Dim { system: String, weight: String },
    /// Dominant weights of V(λ) with multiplicities.
    Char { system: String, weight: String },
    /// Decomposition of V(λ) ⊗ V(μ).
    Tensor { system: String, a: String, b: String },
    /// Decomposition of the k-th symmetric power of V(λ).
    Sympow { system: String, k: usize, weight: String },
    /// Decomposition of the k-th exterior power of V(λ).
    Extpow { system: String, k: usize, weight: String },
    /// Restriction of V(λ) to a Levi subgroup, grouped by central charge.
    Levi {
        system: String,
        weight: String,
        /// Removed simple roots, 1-based, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        remove: Vec<usize>,
    },
    /// Levels of V(λ) for the parabolic with the given removed roots.
    Levels {
        system: String,
        weight: String,
        #[arg(long, value_delimiter = ',', required = true)]
        remove: Vec<usize>,
    },
    /// Target group Y of the embedding of A_{l+1} through V(δ).
    Embed {
        /// X is A_{l+1}.
        l: usize,
        /// Highest weight of V(δ), l+1 labels.
        delta: String,
    },
    /// Composition factors of V_Y(λ) restricted to A_{l+1}.
    Restrict {
        l: usize,
        delta: String,
        /// Weight of Y in its standard numbering.
        lambda: String,
        /// auto, direct, constructed or levelpeel.
        #[arg(long, default_value = "auto")]
        strategy: String,
    },
    /// Whether V_Y(λ) restricted to A_{l+1} is multiplicity-free.
    Mf {
        l: usize,
        delta: String,
        /// Weight of Y in its standard numbering.
        lambda: String,
        /// auto, direct, constructed or levelpeel.
        #[arg(long, default_value = "auto")]
        strategy: String,
    },
    /// Checks the built-in table rows.
    Verify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        table: u8,
        /// Row index (1-based) or the row's notation.
        #[arg(long)]
        row: Option<String>,
        /// Instances above this dimension are reported as skipped.
        #[arg(long, default_value = "2000000", value_parser = positive_u128)]
        cap: u128,
    },
    /// Classifies all λ with S(λ) at most `--max-s` and dimension at most `--cap`.
    Scan {
        l: usize,
        delta: String,
        /// Bound on the label sum S(λ).
        #[arg(long)]
        max_s: i32,
        #[arg(long, default_value = "1000000", value_parser = positive_u128)]
        cap: u128,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Dim { .. } => "dim",
            Command::Char { .. } => "char",
            Command::Tensor { .. } => "tensor",
            Command::Sympow { .. } => "sympow",
            Command::Extpow { .. } => "extpow",
            Command::Levi { .. } => "levi",
            Command::Levels { .. } => "levels",
            Command::Embed { .. } => "embed",
            Command::Restrict { .. } => "restrict",
            Command::Mf { .. } => "mf",
            Command::Verify { .. } => "verify",
            Command::Scan { .. } => "scan",
        }
    }
}

/// Resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub command: Command,
    pub caps: liemf::Caps,
    pub format: Format,
    pub cache: Cache,
    pub threads: Option<usize>,
}

impl JobConfig {
    pub fn from_cli(cli: Cli) -> JobConfig {
        let mut caps = liemf::Caps::default();
        if let Some(n) = cli.max_entries {
            caps.max_entries = n as usize;
        }
        if let Some(n) = cli.max_dim {
            caps.max_direct_dim = n;
        }
        if let Some(n) = cli.max_levelpeel_dim {
            caps.max_levelpeel_dim = n;
        }
        if let Some(n) = cli.max_constructed_dim {
            caps.max_constructed_dim = n;
        }
        if let Some(s) = cli.timeout {
            caps.deadline = Some(Instant::now() + Duration::from_secs_f64(s));
        }
        let cache = if cli.no_cache {
            Cache::disabled()
        } else {
            cli.cache_dir.or_else(default_cache_dir).map(Cache::at).unwrap_or_else(Cache::disabled)
        };
        JobConfig {
            command: cli.command,
            caps,
            format: if cli.json { Format::Json } else { cli.format },
            cache,
            threads: cli.threads.map(|n| n as usize),
        }
    }
}

fn default_cache_dir() -> Option<PathBuf> {
    let base = std::env::var_os("XDG_CACHE_HOME")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))?;
    Some(base.join("liemf"))
}

/// Result of one command before timing is attached.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub command: String,
    pub inputs: Value,
    pub result: Value,
    pub witnesses: Option<Value>,
    pub dims: Value,
    pub cap_hits: Vec<String>,
    pub human: String,
    pub exit: u8,
}

impl Record {
    pub fn new(command: &str, inputs: Value) -> Record {
        Record {
            command: command.into(),
            inputs,
            result: Value::Null,
            witnesses: None,
            dims: json!({}),
            cap_hits: vec![],
            human: String::new(),
            exit: EXIT_OK,
        }
    }

    /// The structured output line.
    pub fn to_json(&self, elapsed: Duration, cached: bool) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command));
        m.insert("inputs".into(), self.inputs.clone());
        m.insert("result".into(), self.result.clone());
        if let Some(w) = &self.witnesses {
            m.insert("witnesses".into(), w.clone());
        }
        m.insert("dims".into(), self.dims.clone());
        m.insert("timing".into(), json!({ "elapsed_ms": elapsed.as_secs_f64() * 1e3, "cached": cached }));
        m.insert("cap_hits".into(), json!(self.cap_hits));
        Value::Object(m)
    }

    fn to_cache(&self) -> Value {
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "result": self.result,
            "witnesses": self.witnesses,
            "dims": self.dims,
            "cap_hits": self.cap_hits,
            "human": self.human,
            "exit": self.exit,
        })
    }

    fn from_cache(v: &Value) -> Option<Record> {
        Some(Record {
            command: v.get("command")?.as_str()?.into(),
            inputs: v.get("inputs")?.clone(),
            result: v.get("result")?.clone(),
            witnesses: match v.get("witnesses")? {
                Value::Null => None,
                w => Some(w.clone()),
            },
            dims: v.get("dims")?.clone(),
            cap_hits: serde_json::from_value(v.get("cap_hits")?.clone()).ok()?,
            human: v.get("human")?.as_str()?.into(),
            exit: u8::try_from(v.get("exit")?.as_u64()?).ok()?,
        })
    }
}

/// Runs the program on `argv` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let config = JobConfig::from_cli(cli);
    if let Some(n) = config.threads {
        // Fails only if the global pool already exists, as in repeated
        // in-process runs; the existing pool is kept then.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    execute(&config, out, err)
}

pub fn execute(config: &JobConfig, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let start = Instant::now();
    let (record, cached) = match commands::dispatch(config) {
        Ok(r) => r,
        Err(e) => {
            let code = e.exit_code();
            match config.format {
                Format::Human => {
                    let _ = writeln!(err, "error: {e}");
                }
                Format::Json => {
                    let rec = json!({
                        "command": config.command.name(),
                        "error": e.to_string(),
                        "exit": code,
                    });
                    let _ = writeln!(out, "{rec}");
                    let _ = writeln!(err, "error: {e}");
                }
            }
            return code;
        }
    };
    match config.format {
        Format::Human => {
            let _ = writeln!(out, "{}", record.human.trim_end());
        }
        Format::Json => {
            let _ = writeln!(out, "{}", record.to_json(start.elapsed(), cached));
        }
    }
    record.exit
}

/// Looks the record up in the cache, or computes and stores it. Records
/// that hit a cap or failed are not stored.
pub(crate) fn cached(config: &JobConfig, op: &str, inputs: Value, compute: impl FnOnce() -> Result<Record, CliError>) -> Result<(Record, bool), CliError> {
    let fp = cache::fingerprint(op, &inputs);
    if let Some(rec) = config.cache.get(&fp).as_ref().and_then(Record::from_cache) {
        return Ok((rec, true));
    }
    let rec = compute()?;
    if rec.exit == EXIT_OK && rec.cap_hits.is_empty() {
        if let Err(e) = config.cache.put(&fp, &rec.to_cache()) {
            eprintln!("warning: cache write failed: {e}");
        }
    }
    Ok((rec, false))
}
