//! Command-line driver: parses a [`RunConfig`], evaluates the requested grid
//! and renders one row per grid point. Numeric failures become rows with a
//! filled `error` column instead of aborting the run.

pub mod config;
pub mod table;

use std::io::Write;

pub use config::{parse_config, Command, ConfigError, Format, GapGrid, RunConfig};
pub use table::{Cell, Table};

use crate::asymptotics::{fisher_hartwig_expansion, szego_expansion, theorem_error_envelope, widom_expansion, x_critical};
use crate::cue::{count_distribution, ln_mgf, ln_tail_bound, MAX_COUNT_N};
use crate::equilibrium::{variational_residuals, EquilibriumData};
use crate::error::Result;
use crate::numerics::{Complex, Real};
use crate::parametrix::{standard_checks, ParametrixContext};
use crate::sine_kernel::{fredholm_row, FredholmSpec};
use crate::symbol::{GapRate, SymbolSpec, WTerm};
use crate::toeplitz::{auto_precision, log_det};

const DEFAULT_PRECISION: u32 = 128;
const WIDOM_TERMS: usize = 32;
const EQUILIBRIUM_GRID: usize = 64;

fn symbol(theta0: &Real, s: &Real, w: &[WTerm], prec: u32) -> Result<SymbolSpec> {
    let w = w.iter().map(|t| (t.k, Complex::from_f64(prec, t.re, t.im))).collect();
    SymbolSpec::new(theta0.with_prec(prec), Complex::one(prec), s.with_prec(prec).to_complex(), w)
}

fn digits(r: &Real, n: usize) -> String {
    r.as_float().to_string_radix(10, Some(n))
}

/// s at size n for one entry of the gap grid; `x` is reported alongside.
#[derive(Clone)]
enum GapPoint {
    S(f64),
    X(f64),
}

impl GapPoint {
    fn s(&self, n: usize, prec: u32) -> Real {
        match self {
            GapPoint::S(s) => Real::new(prec, *s),
            GapPoint::X(x) => (-(Real::new(prec, *x) * (n as f64))).exp(),
        }
    }

    fn lead(&self, n: usize) -> (Cell, Cell) {
        match self {
            GapPoint::S(s) => (Cell::Float(*s), Cell::Empty),
            GapPoint::X(x) => (Cell::Float((-x * n as f64).exp()), Cell::Float(*x)),
        }
    }
}

fn gap_points(cfg: &RunConfig, default_s: f64) -> Vec<GapPoint> {
    match &cfg.gap {
        GapGrid::S(v) => v.iter().map(|s| GapPoint::S(*s)).collect(),
        GapGrid::X(v) => v.iter().map(|x| GapPoint::X(*x)).collect(),
        GapGrid::Unset => vec![GapPoint::S(default_s)],
    }
}

fn push_result(table: &mut Table, lead: Vec<Cell>, r: Result<Vec<Cell>>) {
    match r {
        Ok(mut cells) => {
            let mut row = lead;
            row.append(&mut cells);
            table.push(row);
        }
        Err(e) => table.push_error(lead, e.to_string()),
    }
}

fn run_logdet(cfg: &RunConfig) -> Table {
    let mut t = Table::new(&["theta0", "n", "s", "x", "precision", "ln_d_re", "ln_d_im", "ln_d", "validated"]);
    for &th in &cfg.theta0 {
        for &n in &cfg.n {
            for g in gap_points(cfg, 0.0) {
                let (sc, xc) = g.lead(n);
                let lead = vec![th.into(), n.into(), sc, xc];
                let r = (|| {
                    let theta0 = Real::new(DEFAULT_PRECISION, th);
                    let prec = cfg.precision.unwrap_or_else(|| auto_precision(n, &theta0));
                    let theta0 = Real::new(prec, th);
                    let res = log_det(&symbol(&theta0, &g.s(n, prec), &cfg.w, prec)?, n, prec)?;
                    Ok(vec![
                        (prec as usize).into(),
                        res.ln_d.re.to_f64().into(),
                        res.ln_d.im.to_f64().into(),
                        digits(&res.ln_d.re, cfg.digits).into(),
                        res.validated.into(),
                    ])
                })();
                push_result(&mut t, lead, r);
            }
        }
    }
    t
}

fn run_asym(cfg: &RunConfig) -> Table {
    let mut t = Table::new(&["theta0", "n", "s", "x", "regime", "expansion", "ln_d", "residual", "truncation_bound"]);
    for &th in &cfg.theta0 {
        for &n in &cfg.n {
            for g in gap_points(cfg, 0.0) {
                let (sc, xc) = g.lead(n);
                let lead = vec![th.into(), n.into(), sc, xc];
                let r = (|| {
                    let prec = cfg.precision.unwrap_or_else(|| auto_precision(n, &Real::new(DEFAULT_PRECISION, th)));
                    let theta0 = Real::new(prec, th);
                    let s = g.s(n, prec);
                    let spec = symbol(&theta0, &s, &cfg.w, prec)?;
                    let (regime, e) = if s.is_zero() {
                        ("widom", widom_expansion(&spec, n, WIDOM_TERMS, prec)?)
                    } else if s == 1.0 {
                        ("szego", szego_expansion(&spec, n, prec))
                    } else {
                        ("fisher_hartwig", fisher_hartwig_expansion(&spec, n, prec)?)
                    };
                    let ln_d = log_det(&spec, n, prec)?.ln_d;
                    Ok(vec![
                        regime.into(),
                        e.value.re.to_f64().into(),
                        ln_d.re.to_f64().into(),
                        (&ln_d.re - &e.value.re).to_f64().into(),
                        e.truncation_bound.to_f64().into(),
                    ])
                })();
                push_result(&mut t, lead, r);
            }
        }
    }
    t
}

fn run_verify_theorem(cfg: &RunConfig) -> Table {
    let mut t = Table::new(&["theta0", "n", "s", "x", "ln_d_s", "ln_d_0", "delta", "envelope", "ratio"]);
    for &th in &cfg.theta0 {
        for &n in &cfg.n {
            let points = match &cfg.gap {
                GapGrid::Unset => vec![None],
                _ => gap_points(cfg, 0.0).into_iter().map(Some).collect(),
            };
            for g in points {
                let (sc, xc) = match &g {
                    Some(g) => g.lead(n),
                    None => {
                        let xc = x_critical(&Real::new(64, th)).map(|v| v.to_f64()).unwrap_or(f64::NAN);
                        (Cell::Float((-xc * n as f64).exp()), Cell::Float(xc))
                    }
                };
                let lead = vec![th.into(), n.into(), sc, xc];
                let r = (|| {
                    let prec = cfg.precision.unwrap_or_else(|| auto_precision(n, &Real::new(DEFAULT_PRECISION, th)));
                    let theta0 = Real::new(prec, th);
                    let s = match &g {
                        Some(g) => g.s(n, prec),
                        None => (-(x_critical(&theta0)? * (n as f64))).exp(),
                    };
                    let ls = log_det(&symbol(&theta0, &s, &cfg.w, prec)?, n, prec)?.ln_d.re;
                    let l0 = log_det(&symbol(&theta0, &Real::zero(prec), &cfg.w, prec)?, n, prec)?.ln_d.re;
                    let delta = (&ls - &l0).abs();
                    let env = theorem_error_envelope(n, &theta0, &s, false)?;
                    let ratio = &delta / &env;
                    Ok(vec![
                        ls.to_f64().into(),
                        l0.to_f64().into(),
                        delta.to_f64().into(),
                        env.to_f64().into(),
                        ratio.to_f64().into(),
                    ])
                })();
                push_result(&mut t, lead, r);
            }
        }
    }
    t
}

/// Decay rates for the equilibrium and parametrix grids: explicit x, −ln(s)/n
/// for each n, or None for "use the default".
fn rate_points(cfg: &RunConfig) -> Vec<(Option<usize>, Option<f64>)> {
    match &cfg.gap {
        GapGrid::X(v) => v.iter().map(|x| (None, Some(*x))).collect(),
        GapGrid::S(v) => {
            let mut out = Vec::new();
            for &n in &cfg.n {
                for &s in v {
                    out.push((Some(n), if s == 0.0 { Some(f64::INFINITY) } else { Some(-s.ln() / n as f64) }));
                }
            }
            out
        }
        GapGrid::Unset => vec![(None, None)],
    }
}

fn run_equilibrium(cfg: &RunConfig) -> Table {
    let mut t = Table::new(&[
        "theta0",
        "x",
        "regime",
        "x_c",
        "theta1",
        "ell",
        "equality_residual",
        "min_margin",
        "strict",
    ]);
    let prec = cfg.precision.unwrap_or(DEFAULT_PRECISION);
    for &th in &cfg.theta0 {
        for (_, x) in rate_points(cfg) {
            let x_cell = match x {
                Some(v) if v.is_finite() => Cell::Float(v),
                _ => Cell::Text("inf".into()),
            };
            let r = (|| {
                let theta0 = Real::new(prec, th);
                let rate = match x {
                    Some(v) if v.is_finite() => GapRate::Finite(Real::new(prec, v)),
                    _ => GapRate::Infinite,
                };
                let d = EquilibriumData::new(rate, &theta0, prec)?;
                let rep = variational_residuals(&d, EQUILIBRIUM_GRID)?;
                let regime = serde_json::to_value(d.regime).ok().and_then(|v| v.as_str().map(String::from));
                Ok(vec![
                    regime.into(),
                    d.x_c.to_f64().into(),
                    d.theta1.to_f64().into(),
                    d.ell.to_f64().into(),
                    rep.equality_residual.into(),
                    rep.min_margin.into(),
                    rep.strict.into(),
                ])
            })();
            push_result(&mut t, vec![th.into(), x_cell], r);
        }
    }
    t
}

fn run_parametrix(cfg: &RunConfig) -> Table {
    let mut t = Table::new(&["theta0", "n", "x", "object", "point_re", "point_im", "offset", "residual"]);
    let prec = cfg.precision.unwrap_or(DEFAULT_PRECISION);
    for &th in &cfg.theta0 {
        for (fixed_n, x) in rate_points(cfg) {
            let ns: Vec<usize> = fixed_n.map(|n| vec![n]).unwrap_or_else(|| cfg.n.clone());
            for n in ns {
                let theta0 = Real::new(prec, th);
                let lead = vec![th.into(), n.into(), x.map(Cell::Float).unwrap_or(Cell::Text("x_c".into()))];
                let r = (|| {
                    let x = match x {
                        Some(v) => Real::new(prec, v),
                        None => x_critical(&theta0)?,
                    };
                    let spec = symbol(&theta0, &Real::zero(prec), &cfg.w, prec)?;
                    let ctx = ParametrixContext::new(&spec, n, &x, prec)?;
                    standard_checks(&ctx)
                })();
                match r {
                    Ok(rows) => {
                        for row in rows {
                            let mut cells = lead.clone();
                            cells.extend([
                                row.object.into(),
                                row.point_re.into(),
                                row.point_im.into(),
                                row.offset.into(),
                                row.residual.into(),
                            ]);
                            t.push(cells);
                        }
                    }
                    Err(e) => t.push_error(lead, e.to_string()),
                }
            }
        }
    }
    t
}

fn run_sine_kernel(cfg: &RunConfig) -> Table {
    let mut t = Table::new(&["y", "s", "m", "ln_det", "expansion", "residual"]);
    let prec = cfg.precision.unwrap_or(DEFAULT_PRECISION);
    let ss = match &cfg.gap {
        GapGrid::S(v) => v.clone(),
        _ => vec![0.0],
    };
    for &y in &cfg.y {
        for &s in &ss {
            let m = FredholmSpec::default_order(y);
            let r = (|| {
                let spec = FredholmSpec::new(Real::new(prec, y), Real::new(prec, s), m)?;
                let row = fredholm_row(&spec, prec)?;
                Ok(vec![row.ln_det.into(), row.expansion.into(), row.residual.into()])
            })();
            push_result(&mut t, vec![y.into(), s.into(), m.into()], r);
        }
    }
    t
}

fn run_cue(cfg: &RunConfig) -> Table {
    let prec = cfg.precision.unwrap_or(DEFAULT_PRECISION);
    let lambdas: Vec<Option<f64>> = match &cfg.lambda {
        Some(v) => v.iter().map(|l| Some(*l)).collect(),
        None => vec![None],
    };
    if let Some(ps) = &cfg.p {
        let mut t = Table::new(&["theta0", "n", "p", "lambda", "ln_bound", "bound", "exact_tail"]);
        for &th in &cfg.theta0 {
            for &n in &cfg.n {
                let theta0 = Real::new(prec, th);
                let dist = if n <= MAX_COUNT_N { count_distribution(&theta0, n, prec).ok() } else { None };
                for &p in ps {
                    for &l in &lambdas {
                        let lead = vec![th.into(), n.into(), p.into()];
                        let r = (|| {
                            let lambda = match l {
                                Some(v) => Real::new(prec, v),
                                None => x_critical(&theta0)? * (n as f64),
                            };
                            let lb = ln_tail_bound(&theta0, n, p, Some(&lambda), prec)?;
                            let exact = dist.as_ref().map(|d| d.tail(p).to_f64());
                            Ok(vec![lambda.to_f64().into(), lb.to_f64().into(), lb.exp().to_f64().into(), exact.into()])
                        })();
                        push_result(&mut t, lead, r);
                    }
                }
            }
        }
        return t;
    }
    if cfg.lambda.is_some() {
        let mut t = Table::new(&["theta0", "n", "lambda", "ln_mgf", "mgf"]);
        for &th in &cfg.theta0 {
            for &n in &cfg.n {
                for l in lambdas.iter().flatten() {
                    let r = ln_mgf(&Real::new(prec, th), n, &Real::new(prec, *l), prec)
                        .map(|v| vec![v.to_f64().into(), v.exp().to_f64().into()]);
                    push_result(&mut t, vec![th.into(), n.into(), (*l).into()], r);
                }
            }
        }
        return t;
    }
    let mut t = Table::new(&["theta0", "n", "k", "p_k"]);
    for &th in &cfg.theta0 {
        for &n in &cfg.n {
            match count_distribution(&Real::new(prec, th), n, prec) {
                Ok(d) => {
                    for (k, p) in d.probs.iter().enumerate() {
                        t.push(vec![th.into(), n.into(), k.into(), p.to_f64().into()]);
                    }
                }
                Err(e) => t.push_error(vec![th.into(), n.into()], e.to_string()),
            }
        }
    }
    t
}

/// Evaluates the configured grid. Rows follow grid order.
pub fn run(cfg: &RunConfig) -> Table {
    match cfg.command {
        Command::Logdet => run_logdet(cfg),
        Command::Asym => run_asym(cfg),
        Command::VerifyTheorem => run_verify_theorem(cfg),
        Command::Equilibrium => run_equilibrium(cfg),
        Command::ParametrixCheck => run_parametrix(cfg),
        Command::SineKernel => run_sine_kernel(cfg),
        Command::Cue => run_cue(cfg),
    }
}

/// Full driver: 0 on success, 1 if any row carries an error, 2 on a
/// configuration or I/O failure.
pub fn main_with_args(args: &[String]) -> i32 {
    let cfg = match parse_config(args, None) {
        Ok(c) => c,
        Err(ConfigError::Help(text)) => {
            print!("{text}");
            return 0;
        }
        Err(e) => {
            eprintln!("gaptlz: {e}");
            return 2;
        }
    };
    let table = run(&cfg);
    let text = table.render(cfg.format);
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("gaptlz: cannot write output: {e}");
        return 2;
    }
    if table.has_errors() {
        1
    } else {
        0
    }
}
