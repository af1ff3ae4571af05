//! Report rows behind the command-line front end.
//!
//! Every command produces a [`Table`]: ordered rows of named cells. Exact
//! values travel as `"p/q"` strings and are never rounded; floats sit next
//! to them as mirrors. The same table renders as CSV, JSON or plain text.

use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::analytic::contour::{contour_i, contour_i_residue, ic_exact, saddle_line_check, ContourSpec};
use crate::error::{Error, Result};
use crate::friable::dickman::{dickman_rho, DEFAULT_U_MAX};
use crate::friable::psi::{psi, psi_squarefree};
use crate::friable::saddle::{ht_from_saddle, saddle_alpha};
use crate::main_term::{hausman_shapiro_vq, main_term, main_term_corr_with, predict, squarefree_factors, Method};
use crate::rational::{to_f64, to_string_exact, ExactRational};
use crate::sieve::{mertens_product_of, primes_up_to};
use crate::variance::variance_exact_threads;

/// Smallest `H` the range conditions are evaluated for.
pub const RANGE_MIN_H: u64 = 16;

/// The two admissibility conditions on `(X, H, y)`; `log` is natural.
///
/// * stronger: `y >= (log H)^{1 + eps}`
/// * sieve: `(1 + a) log H / log log H <= (1 - delta) log X / log y`,
///   with `a = log log H / log y`
///
/// Always rebuilt from its inputs through [`RangeCheck::new`]; the fields
/// are read-only views.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeCheck {
    x: u64,
    h: u64,
    y: u64,
    epsilon: f64,
    delta: f64,
    a: f64,
    stronger_ok: bool,
    sieve_ok: bool,
}

impl RangeCheck {
    pub fn new(x: u64, h: u64, y: u64, epsilon: f64, delta: f64) -> Result<Self> {
        if h < RANGE_MIN_H {
            return Err(Error::InvalidInput(format!("range check needs H >= {RANGE_MIN_H}, got {h}")));
        }
        if y < 2 || x < h {
            return Err(Error::InvalidInput(format!("range check needs y >= 2 and X >= H, got X = {x}, H = {h}, y = {y}")));
        }
        if !(epsilon > 0.0 && delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidInput(format!("need eps > 0 and 0 < delta < 1, got {epsilon}, {delta}")));
        }
        let lh = (h as f64).ln();
        let llh = lh.ln();
        let ly = (y as f64).ln();
        let a = llh / ly;
        let stronger_ok = (y as f64) >= lh.powf(1.0 + epsilon);
        let sieve_ok = (1.0 + a) * lh / llh <= (1.0 - delta) * (x as f64).ln() / ly;
        Ok(RangeCheck { x, h, y, epsilon, delta, a, stronger_ok, sieve_ok })
    }

    pub fn x(&self) -> u64 {
        self.x
    }
    pub fn h(&self) -> u64 {
        self.h
    }
    pub fn y(&self) -> u64 {
        self.y
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn stronger_ok(&self) -> bool {
        self.stronger_ok
    }
    pub fn sieve_ok(&self) -> bool {
        self.sieve_ok
    }
    pub fn ok(&self) -> bool {
        self.stronger_ok && self.sieve_ok
    }

    /// Why the check failed, for refusals.
    pub fn explain(&self) -> String {
        let lh = (self.h as f64).ln();
        let mut out = Vec::new();
        if !self.stronger_ok {
            out.push(format!("y = {} is below (log H)^(1+eps) = {:.3}", self.y, lh.powf(1.0 + self.epsilon)));
        }
        if !self.sieve_ok {
            let lhs = (1.0 + self.a) * lh / lh.ln();
            let rhs = (1.0 - self.delta) * (self.x as f64).ln() / (self.y as f64).ln();
            out.push(format!("(1+a) log H / log log H = {lhs:.4} exceeds (1-delta) log X / log y = {rhs:.4}"));
        }
        format!("X = {}, H = {}, y = {}: {}", self.x, self.h, self.y, out.join("; "))
    }
}

/// One cell of a report.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Exact(ExactRational),
    Text(String),
    Bool(bool),
}

impl Cell {
    /// Text form shared by CSV and the plain table.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => render_float(*v),
            Cell::Exact(r) => to_string_exact(r),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        use serde_json::Value;
        match self {
            Cell::Int(v) => match i64::try_from(*v) {
                Ok(v) => Value::from(v),
                Err(_) => Value::String(v.to_string()),
            },
            Cell::Float(v) => serde_json::Number::from_f64(*v).map(Value::Number).unwrap_or(Value::Null),
            Cell::Exact(r) => Value::String(to_string_exact(r)),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

/// Shortest round-trip form, so equal floats always print the same.
fn render_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else {
        v.to_string()
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        i128::try_from(v).map(Cell::Int).unwrap_or_else(|_| Cell::Text(v.to_string()))
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<ExactRational> for Cell {
    fn from(v: ExactRational) -> Self {
        Cell::Exact(v)
    }
}

/// Named cells in column order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportRow {
    pub cells: Vec<(&'static str, Cell)>,
}

impl ReportRow {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: &'static str, cell: impl Into<Cell>) -> &mut Self {
        self.cells.push((name, cell.into()));
        self
    }

    /// An exact value followed by its float mirror `<name>_float`.
    pub fn exact(&mut self, name: &'static str, float_name: &'static str, r: &ExactRational) -> &mut Self {
        self.push(name, Cell::Exact(r.clone()));
        self.push(float_name, to_f64(r))
    }

    pub fn get(&self, name: &str) -> Option<&Cell> {
        self.cells.iter().find(|(n, _)| *n == name).map(|(_, c)| c)
    }

    pub fn float(&self, name: &str) -> Option<f64> {
        match self.get(name)? {
            Cell::Float(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Exact(r) => Some(to_f64(r)),
            _ => None,
        }
    }

    pub fn columns(&self) -> Vec<&'static str> {
        self.cells.iter().map(|(n, _)| *n).collect()
    }
}

/// Output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Table,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "table" => Ok(Format::Table),
            _ => Err(Error::InvalidInput(format!("unknown format {s:?} (csv, json, table)"))),
        }
    }
}

/// Rows sharing one set of columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: &'static str,
    pub rows: Vec<ReportRow>,
}

impl Table {
    pub fn new(command: &'static str, rows: Vec<ReportRow>) -> Self {
        Table { command, rows }
    }

    fn header(&self) -> Vec<&'static str> {
        self.rows.first().map(|r| r.columns()).unwrap_or_default()
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
            Format::Table => Ok(self.to_text()),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidInput(format!("csv encoding failed: {e}"));
        w.write_record(self.header()).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.cells.iter().map(|(_, c)| c.render())).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(format!("csv encoding failed: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = serde_json::Map::new();
                for (n, c) in &r.cells {
                    m.insert((*n).to_string(), c.json());
                }
                serde_json::Value::Object(m)
            })
            .collect();
        let mut out = serde_json::json!({ "command": self.command, "rows": rows }).to_string();
        out.push('\n');
        out
    }

    pub fn to_text(&self) -> String {
        let header = self.header();
        let body: Vec<Vec<String>> = self.rows.iter().map(|r| r.cells.iter().map(|(_, c)| c.render()).collect()).collect();
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for row in &body {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: Vec<&str>| {
            let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| " ".repeat(w.saturating_sub(c.len())) + c).collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut out, header.clone());
        for row in &body {
            line(&mut out, row.iter().map(String::as_str).collect());
        }
        out
    }
}

/// Settings shared by every command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flags {
    pub threads: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub force: bool,
    /// Adds an `elapsed_ms` column; off by default so output is reproducible.
    pub timing: bool,
}

impl Default for Flags {
    fn default() -> Self {
        Flags { threads: 1, epsilon: 0.1, delta: 0.1, force: false, timing: false }
    }
}

fn finish(mut row: ReportRow, flags: &Flags, start: Instant) -> ReportRow {
    if flags.timing {
        row.push("elapsed_ms", start.elapsed().as_secs_f64() * 1e3);
    }
    row
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 {
            1.0
        } else {
            f64::NAN
        }
    } else {
        a / b
    }
}

/// `a / b`, kept exact until the final rounding.
fn exact_ratio(a: &ExactRational, b: &ExactRational) -> f64 {
    if b.is_zero() {
        return ratio(to_f64(a), 0.0);
    }
    to_f64(&(a / b))
}

pub fn cmd_variance(x: u64, h: u64, y: u64, flags: &Flags) -> Result<ReportRow> {
    let start = Instant::now();
    let v = variance_exact_threads(x, h, y, flags.threads)?;
    let pi = mertens_product_of(&primes_up_to(y));
    let mut row = ReportRow::new();
    row.push("X", x).push("H", h).push("y", y).push("S1", v.s1).push("S2", v.s2);
    row.exact("V", "V_float", &v.variance);
    row.push("H_pi_y", h as f64 * pi.float);
    Ok(finish(row, flags, start))
}

pub fn cmd_mainterm(h: u64, y: u64, method: Method, flags: &Flags) -> Result<ReportRow> {
    let start = Instant::now();
    let m = main_term(h, y, method)?;
    let pi = mertens_product_of(&primes_up_to(y));
    let naive = BigRational::from_integer(BigInt::from(h)) * &pi.exact;
    let mut row = ReportRow::new();
    row.push("H", h).push("y", y).push("method", method.name());
    row.exact("M", "M_float", &m.value);
    row.push("H_pi_y", to_f64(&naive)).push("ratio_M_over_H_pi_y", exact_ratio(&m.value, &naive));
    Ok(finish(row, flags, start))
}

pub fn cmd_vq(q: u64, h: u64, flags: &Flags) -> Result<ReportRow> {
    let start = Instant::now();
    let v = hausman_shapiro_vq(q, h)?;
    let omega = squarefree_factors(q)?.len();
    let mut row = ReportRow::new();
    row.push("q", q).push("H", h).push("omega", omega);
    row.exact("V_q", "V_q_float", &v);
    Ok(finish(row, flags, start))
}

pub fn cmd_friable(x: u64, y: u64, flags: &Flags) -> Result<ReportRow> {
    let start = Instant::now();
    if x < 1 || y < 2 {
        return Err(Error::InvalidInput(format!("friable counts need x >= 1 and y >= 2, got x = {x}, y = {y}")));
    }
    let count = psi(x, y)?;
    let sf = psi_squarefree(x, y)?;
    let u = (x as f64).ln() / (y as f64).ln();
    let mut row = ReportRow::new();
    row.push("x", x).push("y", y).push("psi", count).push("psi_squarefree", sf).push("u", u);
    let rho = if u <= DEFAULT_U_MAX { dickman_rho(u)? } else { f64::NAN };
    row.push("rho_u", rho).push("x_rho_u", x as f64 * rho);
    let ht = if x >= y && x >= 2 { ht_from_saddle(&saddle_alpha((x as f64).ln(), y)?) } else { f64::NAN };
    row.push("psi_ht", ht).push("ratio_ht_over_psi", ratio(ht, count as f64));
    Ok(finish(row, flags, start))
}

pub fn cmd_saddle(x: f64, y: u64, flags: &Flags) -> Result<ReportRow> {
    let start = Instant::now();
    if !(x >= 2.0) {
        return Err(Error::InvalidInput(format!("saddle point needs x >= 2, got {x}")));
    }
    let s = saddle_alpha(x.ln(), y)?;
    let gap = if s.u > 1.0 { (1.0 - s.alpha) * (y as f64).ln() - s.xi } else { f64::NAN };
    let mut row = ReportRow::new();
    row.push("x", x).push("y", y).push("alpha", s.alpha).push("u", s.u).push("xi", s.xi);
    row.push("gap", gap).push("sigma2", s.sigma2).push("log_zeta_partial_alpha", s.log_zeta_partial_alpha);
    row.push("residual", s.residual).push("psi_ht", ht_from_saddle(&s));
    Ok(finish(row, flags, start))
}

pub fn cmd_saddle_line(x: u64, y: u64, flags: &Flags) -> Result<ReportRow> {
    let start = Instant::now();
    let s = saddle_line_check(x, y)?;
    let mut row = ReportRow::new();
    row.push("x", x).push("y", y).push("alpha", s.alpha).push("I_alpha", s.integral).push("psi", s.psi);
    row.push("H_alpha", s.h_alpha).push("zeta_alpha_minus_1", s.zeta_alpha_minus_one);
    row.push("predicted", s.predicted).push("ratio", s.ratio);
    Ok(finish(row, flags, start))
}

pub fn cmd_contour(x: f64, y: u64, c: f64, tol: f64, flags: &Flags) -> Result<ReportRow> {
    let start = Instant::now();
    let spec = ContourSpec::new(c, tol);
    spec.validate()?;
    let direct = contour_i(x, y, &spec)?;
    let via = contour_i_residue(x, y, &spec)?;
    let exact_x = BigRational::from_float(x).ok_or_else(|| Error::InvalidInput(format!("x = {x} is not finite")))?;
    let exact = ic_exact(&exact_x, y)?;
    let ef = to_f64(&exact);
    let mut row = ReportRow::new();
    row.push("x", x).push("y", y).push("c", c).push("tol", tol);
    row.push("I_line", direct.value).push("I_residue", via.value);
    row.exact("I_exact", "I_exact_float", &exact);
    row.push("err_line", (direct.value - ef).abs()).push("err_residue", (via.value - ef).abs());
    row.push("tail_bound", direct.tail_bound).push("quad_error", direct.quad_error);
    row.push("dirichlet_terms", direct.dirichlet_terms);
    Ok(finish(row, flags, start))
}

/// `V(X, H, y)` against `M(H, y)` along a list of `X`.
///
/// Every `X` must pass [`RangeCheck`] unless `flags.force` is set.
pub fn cmd_converge(h: u64, y: u64, xs: &[u64], flags: &Flags) -> Result<Table> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("converge needs at least one X".into()));
    }
    let checks = xs.iter().map(|&x| RangeCheck::new(x, h, y, flags.epsilon, flags.delta)).collect::<Result<Vec<_>>>()?;
    if !flags.force {
        if let Some(bad) = checks.iter().find(|c| !c.ok()) {
            return Err(Error::RangeViolated(format!("{} (pass --force to run anyway)", bad.explain())));
        }
    }
    let table = primes_up_to(y);
    let m = main_term_corr_with(h, &table);
    let mut rows = Vec::with_capacity(xs.len());
    for (&x, check) in xs.iter().zip(&checks) {
        let start = Instant::now();
        let v = variance_exact_threads(x, h, y, flags.threads)?;
        let mut row = ReportRow::new();
        row.push("X", x).push("H", h).push("y", y);
        row.exact("V", "V_float", &v.variance);
        row.exact("M", "M_float", &m);
        let r = exact_ratio(&v.variance, &m);
        row.push("ratio", r).push("abs_ratio_minus_1", (r - 1.0).abs());
        row.push("a", check.a()).push("stronger_ok", check.stronger_ok()).push("sieve_ok", check.sieve_ok());
        rows.push(finish(row, flags, start));
    }
    Ok(Table::new("converge", rows))
}

/// One regime row: exact `M`, the selected prediction and context.
pub fn regime_row(h: u64, y: u64, flags: &Flags) -> Result<ReportRow> {
    let start = Instant::now();
    let p = predict(h, y)?;
    let table = primes_up_to(y);
    let m = main_term_corr_with(h, &table);
    let ps = psi(h, y)?;
    let alpha = if h >= 4 { saddle_alpha((h as f64 / 2.0).ln(), y)?.alpha } else { f64::NAN };
    let mut row = ReportRow::new();
    row.push("H", h).push("y", y).push("regime", p.regime.name()).push("u", p.u).push("a", p.a);
    row.push("pi_y", p.pi_y).push("psi_H_y", ps);
    row.exact("M", "M_float", &m);
    row.push("predicted", p.predicted).push("ratio", ratio(to_f64(&m), p.predicted));
    row.push("alpha", alpha);
    let lam = p.details.iter().find(|(n, _)| *n == "lambda").map(|d| d.1).unwrap_or(f64::NAN);
    row.push("lambda_u", lam);
    Ok(finish(row, flags, start))
}

/// Regime rows for a grid, computed on `flags.threads` workers and returned
/// in input order.
pub fn cmd_regimes(grid: &[(u64, u64)], flags: &Flags) -> Result<Table> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(flags.threads.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let rows: Vec<Result<ReportRow>> = pool.install(|| grid.par_iter().map(|&(h, y)| regime_row(h, y, flags)).collect());
    Ok(Table::new("regimes", rows.into_iter().collect::<Result<Vec<_>>>()?))
}

/// Default regime grid: `y` and `H` grow together along three rays.
///
/// * `y = H^2` (`u = 1/2`, large `y`)
/// * `H = y^{3/2}` (bounded `u`)
/// * `H = y^{2.943}`, through `(H, y) = (10^5, 50)`
pub fn default_regime_grids() -> Vec<(&'static str, Vec<(u64, u64)>)> {
    let pow = |y: u64, e: f64| (y as f64).powf(e).round() as u64;
    vec![
        ("large_y", [4u32, 6, 8, 10].iter().map(|&k| (1u64 << k, 1u64 << (2 * k))).collect()),
        ("bounded_u", [100u64, 400, 1600, 6400].iter().map(|&y| (pow(y, 1.5), y)).collect()),
        ("y50_ray", [(100_000u64, 50u64), (pow(100, 2.943), 100), (pow(200, 2.943), 200), (pow(400, 2.943), 400)].to_vec()),
    ]
}

/// Parses `"H:y,H:y,..."`.
pub fn parse_grid(s: &str) -> Result<Vec<(u64, u64)>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (h, y) = t.split_once(':').ok_or_else(|| Error::InvalidInput(format!("grid entry {t:?} is not H:y")))?;
            let p = |v: &str| v.trim().parse::<u64>().map_err(|_| Error::InvalidInput(format!("bad integer {v:?} in grid")));
            Ok((p(h)?, p(y)?))
        })
        .collect()
}

/// Parses a comma list of integers; accepts `1e6`-style powers of ten.
pub fn parse_int_list(s: &str) -> Result<Vec<u64>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| parse_int(t.trim())).collect()
}

pub fn parse_int(t: &str) -> Result<u64> {
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    if let Some((m, e)) = t.split_once(['e', 'E']) {
        if let (Ok(m), Ok(e)) = (m.parse::<u64>(), e.parse::<u32>()) {
            if let Some(v) = 10u64.checked_pow(e).and_then(|p| p.checked_mul(m)) {
                return Ok(v);
            }
        }
    }
    Err(Error::InvalidInput(format!("{t:?} is not a nonnegative integer")))
}

/// Relative gap between an exact value and its mirror; zero for zero.
pub fn mirror_error(r: &ExactRational, f: f64) -> f64 {
    if r.is_zero() {
        return f.abs();
    }
    let back = BigRational::from_float(f).unwrap_or_else(BigRational::zero);
    to_f64(&((back - r) / r).abs())
}
