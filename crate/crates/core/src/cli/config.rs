//! Run configuration: command-line flags layered over an optional JSON file,
//! with `GAPTLZ_PRECISION` as the fallback working precision.

use std::path::{Path, PathBuf};

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::symbol::WTerm;

pub const PRECISION_ENV: &str = "GAPTLZ_PRECISION";
pub const MIN_PRECISION: u32 = 64;
pub const DEFAULT_DIGITS: usize = 30;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown flag or key: {0}")]
    UnknownFlag(String),
    #[error("bad value for {key}: {reason}")]
    TypeError { key: String, reason: String },
    #[error("--s and --x are mutually exclusive")]
    Conflict,
    #[error("{0}")]
    Usage(String),
    /// Help or version text requested; not a failure.
    #[error("{0}")]
    Help(String),
    #[error("cannot read config file {path}: {reason}")]
    File { path: String, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// ln D_n over a θ0 × n × (s | x) grid.
    Logdet,
    /// Finite-n values against the Widom, Szegő or Fisher–Hartwig expansion.
    Asym,
    /// |ln D_n(s) − ln D_n(0)| against the n^{-1/2} e^{x_c n} s envelope.
    VerifyTheorem,
    /// Equilibrium measure summary and variational residuals.
    Equilibrium,
    /// Determinant, jump and matching residuals of the parametrices.
    ParametrixCheck,
    /// Sine-kernel Fredholm determinants and the large-gap expansion.
    SineKernel,
    /// CUE arc counts: distribution, MGF or Chernoff tail bounds.
    Cue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Either an explicit list of s values or of decay rates x with s = e^{−xn}.
#[derive(Clone, Debug, PartialEq)]
pub enum GapGrid {
    S(Vec<f64>),
    X(Vec<f64>),
    Unset,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub theta0: Vec<f64>,
    pub n: Vec<usize>,
    pub gap: GapGrid,
    pub w: Vec<WTerm>,
    pub y: Vec<f64>,
    pub p: Option<Vec<usize>>,
    pub lambda: Option<Vec<f64>>,
    /// None means "choose per grid point".
    pub precision: Option<u32>,
    pub digits: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
}

#[derive(Parser, Debug)]
#[command(name = "gaptlz", version, about = "Toeplitz determinants with a gap: values, asymptotics and checks")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Arc half-width(s) in radians, comma separated.
    #[arg(long, global = true)]
    theta0: Option<String>,
    /// Matrix size(s), comma separated.
    #[arg(long, global = true)]
    n: Option<String>,
    /// Gap value(s) s, comma separated.
    #[arg(long, global = true)]
    s: Option<String>,
    /// Decay rate(s) x with s = e^{-xn}, comma separated.
    #[arg(long, global = true)]
    x: Option<String>,
    /// Coefficients of W as JSON: [{"k": 1, "re": 0.3}, ...].
    #[arg(long, global = true)]
    w: Option<String>,
    /// Sine-kernel half-length(s), comma separated.
    #[arg(long, global = true)]
    y: Option<String>,
    /// Tail threshold(s) for the CUE bound.
    #[arg(long, global = true)]
    p: Option<String>,
    /// Chernoff parameter(s).
    #[arg(long, global = true)]
    lambda: Option<String>,
    /// Working precision in bits.
    #[arg(long, global = true)]
    precision: Option<String>,
    /// Significant digits for high-precision columns.
    #[arg(long, global = true)]
    digits: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON config file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

const FILE_KEYS: [&str; 11] = ["theta0", "n", "s", "x", "w", "y", "p", "lambda", "precision", "digits", "format"];

fn type_error(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::TypeError { key: key.into(), reason: reason.into() }
}

fn split_list(key: &str, raw: &str) -> Result<Vec<String>, ConfigError> {
    let items: Vec<String> = raw.split(',').map(|t| t.trim().to_string()).collect();
    if items.iter().any(|t| t.is_empty()) {
        return Err(type_error(key, "empty list entry"));
    }
    Ok(items)
}

fn parse_f64(key: &str, t: &str) -> Result<f64, ConfigError> {
    let v: f64 = t.parse().map_err(|_| type_error(key, format!("'{t}' is not a number")))?;
    // x = inf stands for s = 0.
    if v.is_nan() || (v.is_infinite() && !(key == "x" && v > 0.0)) {
        return Err(type_error(key, "value must be finite"));
    }
    Ok(v)
}

fn parse_usize(key: &str, t: &str) -> Result<usize, ConfigError> {
    t.parse().map_err(|_| type_error(key, format!("'{t}' is not a nonnegative integer")))
}

fn json_items<'a>(key: &str, v: &'a Value) -> Result<Vec<&'a Value>, ConfigError> {
    match v {
        Value::Array(a) if a.is_empty() => Err(type_error(key, "empty list")),
        Value::Array(a) => Ok(a.iter().collect()),
        other => Ok(vec![other]),
    }
}

fn json_f64_list(key: &str, v: &Value) -> Result<Vec<f64>, ConfigError> {
    json_items(key, v)?
        .into_iter()
        .map(|e| match e {
            Value::String(t) => parse_f64(key, t),
            _ => e.as_f64().ok_or_else(|| type_error(key, "expected a number")),
        })
        .collect()
}

fn json_usize_list(key: &str, v: &Value) -> Result<Vec<usize>, ConfigError> {
    json_items(key, v)?
        .into_iter()
        .map(|e| e.as_u64().map(|u| u as usize).ok_or_else(|| type_error(key, "expected a nonnegative integer")))
        .collect()
}

fn f64_list(key: &str, flag: Option<&String>, file: &Map<String, Value>) -> Result<Option<Vec<f64>>, ConfigError> {
    match (flag, file.get(key)) {
        (Some(raw), _) => Ok(Some(split_list(key, raw)?.iter().map(|t| parse_f64(key, t)).collect::<Result<_, _>>()?)),
        (None, Some(v)) => Ok(Some(json_f64_list(key, v)?)),
        (None, None) => Ok(None),
    }
}

fn usize_list(key: &str, flag: Option<&String>, file: &Map<String, Value>) -> Result<Option<Vec<usize>>, ConfigError> {
    match (flag, file.get(key)) {
        (Some(raw), _) => Ok(Some(split_list(key, raw)?.iter().map(|t| parse_usize(key, t)).collect::<Result<_, _>>()?)),
        (None, Some(v)) => Ok(Some(json_usize_list(key, v)?)),
        (None, None) => Ok(None),
    }
}

fn single_usize(key: &str, flag: Option<&String>, file: &Map<String, Value>) -> Result<Option<usize>, ConfigError> {
    match usize_list(key, flag, file)? {
        None => Ok(None),
        Some(v) if v.len() == 1 => Ok(Some(v[0])),
        Some(_) => Err(type_error(key, "expected a single value")),
    }
}

fn parse_w(raw: &Value) -> Result<Vec<WTerm>, ConfigError> {
    serde_json::from_value(raw.clone()).map_err(|e| type_error("w", e.to_string()))
}

fn read_file(path: &Path) -> Result<Map<String, Value>, ConfigError> {
    let file_err = |reason: String| ConfigError::File { path: path.display().to_string(), reason };
    let text = std::fs::read_to_string(path).map_err(|e| file_err(e.to_string()))?;
    match serde_json::from_str::<Value>(&text).map_err(|e| file_err(e.to_string()))? {
        Value::Object(m) => {
            for k in m.keys() {
                if !FILE_KEYS.contains(&k.as_str()) && k != "out" {
                    return Err(ConfigError::UnknownFlag(k.clone()));
                }
            }
            Ok(m)
        }
        _ => Err(file_err("top level must be an object".into())),
    }
}

fn clap_error(e: clap::Error) -> ConfigError {
    match e.kind() {
        ErrorKind::UnknownArgument => match e.get(ContextKind::InvalidArg) {
            Some(ContextValue::String(s)) => ConfigError::UnknownFlag(s.clone()),
            _ => ConfigError::UnknownFlag(e.to_string()),
        },
        ErrorKind::InvalidValue | ErrorKind::ValueValidation => {
            let key = match e.get(ContextKind::InvalidArg) {
                Some(ContextValue::String(s)) => s.clone(),
                _ => "?".into(),
            };
            type_error(&key, e.to_string())
        }
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            ConfigError::Help(e.render().to_string())
        }
        _ => ConfigError::Usage(e.to_string()),
    }
}

/// Builds a config from command-line arguments (program name first). The
/// file named by `--config`, or `file` when given, fills in absent flags.
pub fn parse_config(args: &[String], file: Option<&Path>) -> Result<RunConfig, ConfigError> {
    let a = Args::try_parse_from(args).map_err(clap_error)?;
    let file_map = match a.config.as_deref().or(file) {
        Some(p) => read_file(p)?,
        None => Map::new(),
    };

    let theta0 = f64_list("theta0", a.theta0.as_ref(), &file_map)?.unwrap_or_else(|| vec![std::f64::consts::FRAC_PI_2]);
    if theta0.iter().any(|t| !(*t > 0.0 && *t < std::f64::consts::PI)) {
        return Err(type_error("theta0", "must lie in (0, pi)"));
    }
    let n = usize_list("n", a.n.as_ref(), &file_map)?.unwrap_or_else(|| vec![10]);
    if n.contains(&0) {
        return Err(type_error("n", "must be positive"));
    }

    let flag_gap = (a.s.is_some(), a.x.is_some());
    let file_gap = (file_map.contains_key("s"), file_map.contains_key("x"));
    if flag_gap == (true, true) || (flag_gap == (false, false) && file_gap == (true, true)) {
        return Err(ConfigError::Conflict);
    }
    let empty = Map::new();
    let gap_src = if flag_gap != (false, false) { &empty } else { &file_map };
    let gap = match (f64_list("s", a.s.as_ref(), gap_src)?, f64_list("x", a.x.as_ref(), gap_src)?) {
        (Some(s), _) => {
            if s.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(type_error("s", "must lie in [0, 1]"));
            }
            GapGrid::S(s)
        }
        (None, Some(x)) => {
            if x.iter().any(|v| *v <= 0.0) {
                return Err(type_error("x", "must be positive"));
            }
            GapGrid::X(x)
        }
        (None, None) => GapGrid::Unset,
    };

    let w = match (&a.w, file_map.get("w")) {
        (Some(raw), _) => parse_w(&serde_json::from_str(raw).map_err(|e| type_error("w", e.to_string()))?)?,
        (None, Some(v)) => parse_w(v)?,
        (None, None) => Vec::new(),
    };
    let y = f64_list("y", a.y.as_ref(), &file_map)?.unwrap_or_else(|| vec![1.0]);
    if y.iter().any(|v| *v <= 0.0) {
        return Err(type_error("y", "must be positive"));
    }
    let p = usize_list("p", a.p.as_ref(), &file_map)?;
    let lambda = f64_list("lambda", a.lambda.as_ref(), &file_map)?;
    if lambda.as_ref().is_some_and(|l| l.iter().any(|v| *v < 0.0)) {
        return Err(type_error("lambda", "must be nonnegative"));
    }

    let precision = match single_usize("precision", a.precision.as_ref(), &file_map)? {
        Some(p) => Some(p as u32),
        None => match std::env::var(PRECISION_ENV) {
            Ok(v) => Some(parse_usize(PRECISION_ENV, v.trim())? as u32),
            Err(_) => None,
        },
    };
    if precision.is_some_and(|p| p < MIN_PRECISION) {
        return Err(type_error("precision", format!("must be at least {MIN_PRECISION} bits")));
    }
    let digits = single_usize("digits", a.digits.as_ref(), &file_map)?.unwrap_or(DEFAULT_DIGITS);
    if digits == 0 {
        return Err(type_error("digits", "must be positive"));
    }
    let format = match (a.format, file_map.get("format")) {
        (Some(f), _) => f,
        (None, Some(Value::String(s))) => Format::from_str(s, true).map_err(|e| type_error("format", e))?,
        (None, Some(_)) => return Err(type_error("format", "expected \"csv\" or \"json\"")),
        (None, None) => Format::Csv,
    };
    let out = match (a.out, file_map.get("out")) {
        (Some(p), _) => Some(p),
        (None, Some(Value::String(s))) => Some(PathBuf::from(s)),
        (None, Some(_)) => return Err(type_error("out", "expected a path")),
        (None, None) => None,
    };

    Ok(RunConfig { command: a.command, theta0, n, gap, w, y, p, lambda, precision, digits, format, out })
}
