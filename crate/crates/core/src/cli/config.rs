//! Run configuration: a TOML document with a root seed, shared defaults and
//! an ordered list of checks.
//!
//! ```toml
//! seed = 42
//! out = "reports.jsonl"      # optional
//!
//! [defaults]
//! n_samples = 100000
//! eps = 1e-8
//! quad_order = 64
//! z_grid = [0.5, 1.0, 3.0]
//!
//! [[check]]
//! name = "check_eq2"
//! theta = 1.0
//! base = "0.5*delta(0)+0.5*delta(1)"
//! functional = "id"
//! ```
//!
//! Any parameter field may appear in `[defaults]` or a `[[check]]` table.
//! Values in a check table win over `[defaults]`, which win over the
//! check's built-in defaults.

use std::path::PathBuf;

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::identities::{find_check, CheckParams, CheckSpec};
use crate::rng::derive_seed;

/// A validated run specification.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub defaults: CheckParams,
    pub checks: Vec<ConfiguredCheck>,
    pub out: Option<PathBuf>,
}

/// One resolved check: every parameter filled in and preconditions checked.
#[derive(Debug, Clone)]
pub struct ConfiguredCheck {
    pub spec: &'static CheckSpec,
    pub params: CheckParams,
}

/// Command-line overrides applied while parsing.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub n_samples: Option<usize>,
    pub quad_order: Option<usize>,
}

fn params_from(table: Table, path: &str) -> Result<CheckParams> {
    Value::Table(table)
        .try_into::<CheckParams>()
        .map_err(|e| Error::parse(path, e.message().to_string()))
}

fn seed_from(v: &Value, path: &str) -> Result<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        _ => Err(Error::parse(path, "seed must be a nonnegative integer")),
    }
}

/// Parses and validates a config.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, &Overrides::default())
}

/// [`parse_config`] with command-line overrides: `seed` replaces the root
/// seed; `n_samples` and `quad_order` replace the `[defaults]` values.
pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<RunConfig> {
    let mut root: Table = text.parse().map_err(|e: toml::de::Error| {
        let at = match e.span() {
            Some(span) => {
                let line = text[..span.start].matches('\n').count() + 1;
                format!("line {line}")
            }
            None => "config".to_string(),
        };
        Error::parse(at, e.message().to_string())
    })?;

    let seed = match root.remove("seed") {
        Some(v) => seed_from(&v, "seed")?,
        None => 0,
    };
    let seed = overrides.seed.unwrap_or(seed);
    let out = match root.remove("out") {
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => return Err(Error::parse("out", "must be a string path")),
        None => None,
    };
    let mut defaults = match root.remove("defaults") {
        Some(Value::Table(t)) => params_from(t, "defaults")?,
        Some(_) => return Err(Error::parse("defaults", "must be a table")),
        None => CheckParams::default(),
    };
    if let Some(n) = overrides.n_samples {
        defaults.n_samples = Some(n);
    }
    if let Some(m) = overrides.quad_order {
        defaults.quad_order = Some(m);
    }
    let entries = match root.remove("check") {
        Some(Value::Array(a)) => a,
        Some(_) => return Err(Error::parse("check", "must be an array of tables ([[check]])")),
        None => Vec::new(),
    };
    if let Some(key) = root.keys().next() {
        return Err(Error::parse(
            key.clone(),
            "unknown top-level key; expected seed, out, defaults or check",
        ));
    }
    if entries.is_empty() {
        return Err(Error::parse("check", "config lists no checks"));
    }

    let mut checks = Vec::with_capacity(entries.len());
    for (i, entry) in entries.into_iter().enumerate() {
        let path = format!("check[{i}]");
        let Value::Table(mut table) = entry else {
            return Err(Error::parse(path, "must be a table"));
        };
        let name = match table.remove("name") {
            Some(Value::String(s)) => s,
            _ => return Err(Error::parse(format!("{path}.name"), "missing check name")),
        };
        let spec = find_check(&name).map_err(|e| Error::parse(format!("{path}.name"), e.to_string()))?;
        let mut params = params_from(table, &path)?.or(&defaults);
        if params.seed.is_none() {
            params.seed = Some(derive_seed(seed, i as u64));
        }
        let params = (spec.prepare)(&params).map_err(|e| {
            let (field, msg) = match e {
                Error::Parse { path, msg } => (format!(".{path}"), msg),
                other => (String::new(), other.to_string()),
            };
            Error::parse(format!("{path}{field} ({})", spec.name), msg)
        })?;
        checks.push(ConfiguredCheck { spec, params });
    }
    Ok(RunConfig {
        seed,
        defaults,
        checks,
        out,
    })
}
