//! Batch verification over parameter grids and single-point evaluation.
//!
//! A run expands every selected suite into checks over the grid, evaluates
//! them on a worker pool and writes one report row per (claim, point) in a
//! fixed order: suite, then claim, then grid index.

use crate::bounds::{
    auxiliary_log_ratio_cached, catalog, check_bound_cached, check_dominance, Auxiliary, BoundId, DominanceId,
    PointCache, Status, VerificationRecord,
};
use crate::error::{Error, Result};
use crate::kernel::{psi_connection_real, psi_quadrature, Evaluator, FunctionValue, Method, ParameterPoint, INTEGER_C_GUARD};
use crate::measure::{MomentIdentity, WeightDensity};
use crate::turanian::{sharpness_scan_with, SharpnessLimit, TuranianKind, TuranianTriple};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

pub const DEFAULT_GRID_A: [f64; 7] = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0];
pub const DEFAULT_GRID_C: [f64; 6] = [-5.0, -2.5, -1.5, -0.5, 0.25, 0.75];
pub const DEFAULT_GRID_X: [f64; 9] = [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 200.0];

/// Step of the ODE residual differences, relative to x.
pub const ODE_STEP: f64 = 1e-4;
/// Step of the derivative differences, relative to x.
pub const DERIVATIVE_STEP: f64 = 1e-3;
/// Absolute floor of the derivative comparison.
pub const DERIVATIVE_ABS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    KernelCrosscheck,
    OdeResidual,
    Derivative,
    Moments,
    Stieltjes,
    Bounds,
    Dominance,
    Sharpness,
    Monotonicity,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::KernelCrosscheck,
        Suite::OdeResidual,
        Suite::Derivative,
        Suite::Moments,
        Suite::Stieltjes,
        Suite::Bounds,
        Suite::Dominance,
        Suite::Sharpness,
        Suite::Monotonicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::KernelCrosscheck => "kernel_crosscheck",
            Suite::OdeResidual => "ode_residual",
            Suite::Derivative => "derivative",
            Suite::Moments => "moments",
            Suite::Stieltjes => "stieltjes",
            Suite::Bounds => "bounds",
            Suite::Dominance => "dominance",
            Suite::Sharpness => "sharpness",
            Suite::Monotonicity => "monotonicity",
        }
    }

    /// Default tolerance. For kernel_crosscheck it is the relative agreement
    /// floor, for ode_residual the residual relative to the equation's scale,
    /// for derivative the relative agreement, for moments the absolute
    /// agreement, for stieltjes the quadrature tolerance; for bounds,
    /// dominance, sharpness and monotonicity it is the relative tolerance of
    /// ψ evaluations.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::KernelCrosscheck => 1e-8,
            Suite::OdeResidual => 1e-4,
            Suite::Derivative => 1e-6,
            Suite::Moments => 1e-6,
            Suite::Stieltjes => 1e-10,
            Suite::Bounds | Suite::Dominance | Suite::Sharpness | Suite::Monotonicity => 1e-13,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Domain(format!("unknown format '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub suites: Vec<Suite>,
    pub grid_a: Vec<f64>,
    pub grid_c: Vec<f64>,
    pub grid_x: Vec<f64>,
    pub tolerances: BTreeMap<Suite, f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Also write a JSON copy next to a CSV report.
    pub json_mirror: bool,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suites: Suite::ALL.to_vec(),
            grid_a: DEFAULT_GRID_A.to_vec(),
            grid_c: DEFAULT_GRID_C.to_vec(),
            grid_x: DEFAULT_GRID_X.to_vec(),
            tolerances: BTreeMap::new(),
            out: None,
            format: Format::Csv,
            json_mirror: false,
            jobs: 1,
        }
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| Error::Domain(format!("not a number: '{t}'"))))
        .collect()
}

pub fn parse_suites(s: &str) -> Result<Vec<Suite>> {
    let mut v: Vec<Suite> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    v.sort();
    v.dedup();
    Ok(v)
}

impl RunConfig {
    pub fn tolerance(&self, suite: Suite) -> f64 {
        self.tolerances.get(&suite).copied().unwrap_or_else(|| suite.default_tolerance())
    }

    /// Applies one `key=value` setting (the config-file syntax).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "suites" => self.suites = parse_suites(value)?,
            "grid_a" => self.grid_a = parse_list(value)?,
            "grid_c" => self.grid_c = parse_list(value)?,
            "grid_x" => self.grid_x = parse_list(value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "json" => {
                self.json_mirror = value
                    .parse()
                    .map_err(|_| Error::Domain(format!("json expects true or false, got '{value}'")))?
            }
            "jobs" => {
                self.jobs = value
                    .parse()
                    .map_err(|_| Error::Domain(format!("jobs expects a positive integer, got '{value}'")))?
            }
            k => match k.strip_prefix("tol_") {
                Some(suite) => {
                    let suite: Suite = suite.parse()?;
                    let v: f64 = value
                        .parse()
                        .map_err(|_| Error::Domain(format!("tolerance is not a number: '{value}'")))?;
                    self.tolerances.insert(suite, v);
                }
                None => return Err(Error::Domain(format!("unknown setting '{k}'"))),
            },
        }
        Ok(())
    }

    /// Reads `key = value` lines; blank lines and `#` comments are ignored.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Domain(format!("{}:{}: expected key = value", path.display(), n + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.suites.is_empty() {
            return Err(Error::Domain("no suites selected".into()));
        }
        for (name, g) in [("a", &self.grid_a), ("c", &self.grid_c), ("x", &self.grid_x)] {
            if g.is_empty() {
                return Err(Error::Domain(format!("grid {name} is empty")));
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain(format!("grid {name} has a non-finite value")));
            }
        }
        if self.grid_x.iter().any(|&x| x <= 0.0) {
            return Err(Error::Domain("grid x must be positive".into()));
        }
        for (s, &t) in &self.tolerances {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::Domain(format!("tolerance for {s} must be positive")));
            }
        }
        if self.jobs == 0 {
            return Err(Error::Domain("jobs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub suite: Suite,
    pub claim: String,
    pub a: f64,
    pub c: f64,
    /// Absent for claims that depend on (a, c) only.
    pub x: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub budget: f64,
    pub status: RowStatus,
    pub anchor: String,
}

/// Report-level status: a verification status or an evaluation error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Pass,
    Fail,
    Inconclusive,
    Flagged,
    NotApplicable,
    Error,
}

impl RowStatus {
    pub const ALL: [RowStatus; 6] = [
        RowStatus::Pass,
        RowStatus::Fail,
        RowStatus::Inconclusive,
        RowStatus::Flagged,
        RowStatus::NotApplicable,
        RowStatus::Error,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RowStatus::Pass => "pass",
            RowStatus::Fail => "fail",
            RowStatus::Inconclusive => "inconclusive",
            RowStatus::Flagged => "flagged",
            RowStatus::NotApplicable => "not_applicable",
            RowStatus::Error => "error",
        }
    }
}

impl From<Status> for RowStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Pass => RowStatus::Pass,
            Status::Fail => RowStatus::Fail,
            Status::Inconclusive => RowStatus::Inconclusive,
            Status::Flagged => RowStatus::Flagged,
            Status::NotClaimed => RowStatus::NotApplicable,
        }
    }
}

impl ReportRow {
    fn from_record(suite: Suite, r: &VerificationRecord, x: Option<f64>) -> Self {
        ReportRow {
            suite,
            claim: r.claim.clone(),
            a: r.point.a(),
            c: r.point.c(),
            x,
            lhs: r.lhs.value,
            rhs: r.rhs.value,
            margin: r.margin,
            budget: r.budget,
            status: r.status.into(),
            anchor: r.anchor.clone(),
        }
    }

    /// `lhs ≤ rhs` style agreement row: the budget is already part of `rhs`.
    fn agreement(suite: Suite, claim: &str, a: f64, c: f64, x: Option<f64>, lhs: f64, rhs: f64, anchor: &str) -> Self {
        let margin = rhs - lhs;
        let status = if !margin.is_finite() {
            RowStatus::Inconclusive
        } else if margin >= 0.0 {
            RowStatus::Pass
        } else {
            RowStatus::Fail
        };
        ReportRow {
            suite,
            claim: claim.to_string(),
            a,
            c,
            x,
            lhs,
            rhs,
            margin,
            budget: 0.0,
            status,
            anchor: anchor.to_string(),
        }
    }

    fn error(suite: Suite, claim: &str, a: f64, c: f64, x: Option<f64>, err: &Error, anchor: &str) -> Self {
        ReportRow {
            suite,
            claim: claim.to_string(),
            a,
            c,
            x,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            budget: f64::NAN,
            status: RowStatus::Error,
            anchor: format!("{anchor}; {err}"),
        }
    }

    fn not_applicable(suite: Suite, claim: &str, a: f64, c: f64, x: Option<f64>, why: &str) -> Self {
        ReportRow {
            suite,
            claim: claim.to_string(),
            a,
            c,
            x,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            budget: f64::NAN,
            status: RowStatus::NotApplicable,
            anchor: why.to_string(),
        }
    }
}

/// One unit of parallel work with its rows in claim order.
struct Task {
    suite: Suite,
    a: f64,
    c: f64,
    /// Index into the x grid, or None for (a, c)-level tasks.
    xi: Option<usize>,
}

fn evaluator(tol: f64) -> Evaluator {
    Evaluator {
        rel_tol: tol.min(1e-10),
        cross_check: false,
    }
}

fn kernel_crosscheck(cfg: &RunConfig, a: f64, c: f64, x: f64) -> Vec<ReportRow> {
    const CLAIM: &str = "quadrature_vs_connection";
    const ANCHOR: &str = "integral representation against connection formula";
    let s = Suite::KernelCrosscheck;
    let p = match ParameterPoint::new(a, c, x) {
        Ok(p) => p,
        Err(e) => return vec![ReportRow::error(s, CLAIM, a, c, Some(x), &e, ANCHOR)],
    };
    let q = match psi_quadrature(p, 1e-13) {
        Ok(v) => v,
        Err(e) => return vec![ReportRow::error(s, CLAIM, a, c, Some(x), &e, ANCHOR)],
    };
    match psi_connection_real(p) {
        Ok(w) => {
            let allowed = (cfg.tolerance(s) * q.value.abs()).max(q.abs_error + w.abs_error);
            vec![ReportRow::agreement(s, CLAIM, a, c, Some(x), (q.value - w.value).abs(), allowed, ANCHOR)]
        }
        Err(e @ Error::Cancellation { .. }) => vec![ReportRow::not_applicable(
            s,
            CLAIM,
            a,
            c,
            Some(x),
            &format!("{ANCHOR}; connection formula unusable: {e}"),
        )],
        Err(e) => vec![ReportRow::error(s, CLAIM, a, c, Some(x), &e, ANCHOR)],
    }
}

/// Residual of x y'' + (c − x) y' − a y with central differences of step
/// ODE_STEP·x, together with the scale |x y''| + |(c − x) y'| + |a y|.
pub fn ode_residual(ev: &Evaluator, p: ParameterPoint) -> Result<(f64, f64)> {
    let (a, c, x) = (p.a(), p.c(), p.x());
    let h = ODE_STEP * x;
    let ym = ev.psi(p.with_x(x - h)?)?.value;
    let y0 = ev.psi(p)?.value;
    let yp = ev.psi(p.with_x(x + h)?)?.value;
    let d1 = (yp - ym) / (2.0 * h);
    let d2 = (yp - 2.0 * y0 + ym) / (h * h);
    let residual = x * d2 + (c - x) * d1 - a * y0;
    let scale = (x * d2).abs() + ((c - x) * d1).abs() + (a * y0).abs();
    Ok((residual, scale))
}

/// Five-point difference of ψ in x with step DERIVATIVE_STEP·x, and the
/// closed form −a ψ(a+1, c+1, x).
pub fn derivative_pair(ev: &Evaluator, p: ParameterPoint) -> Result<(f64, FunctionValue)> {
    let (a, x) = (p.a(), p.x());
    let h = DERIVATIVE_STEP * x;
    let f = |k: f64| -> Result<f64> { Ok(ev.psi(p.with_x(x + k * h)?)?.value) };
    let d = (f(-2.0)? - 8.0 * f(-1.0)? + 8.0 * f(1.0)? - f(2.0)?) / (12.0 * h);
    let up = ev.psi(p.shifted(1.0, 1.0))?;
    let exact = FunctionValue::new(-a * up.value, a.abs() * up.abs_error, Method::Derived);
    Ok((d, exact))
}

fn ode_rows(cfg: &RunConfig, a: f64, c: f64, x: f64) -> Vec<ReportRow> {
    const CLAIM: &str = "kummer_ode";
    const ANCHOR: &str = "x y'' + (c - x) y' - a y = 0";
    let s = Suite::OdeResidual;
    let ev = evaluator(1e-13);
    match ParameterPoint::new(a, c, x).and_then(|p| ode_residual(&ev, p)) {
        Ok((r, scale)) => vec![ReportRow::agreement(s, CLAIM, a, c, Some(x), r.abs(), cfg.tolerance(s) * scale, ANCHOR)],
        Err(e) => vec![ReportRow::error(s, CLAIM, a, c, Some(x), &e, ANCHOR)],
    }
}

fn derivative_rows(cfg: &RunConfig, a: f64, c: f64, x: f64) -> Vec<ReportRow> {
    const CLAIM: &str = "derivative";
    const ANCHOR: &str = "d/dx psi(a,c,x) = -a psi(a+1,c+1,x)";
    let s = Suite::Derivative;
    let ev = evaluator(1e-13);
    match ParameterPoint::new(a, c, x).and_then(|p| derivative_pair(&ev, p)) {
        Ok((d, exact)) => {
            let allowed = cfg.tolerance(s) * exact.value.abs() + DERIVATIVE_ABS_TOL;
            vec![ReportRow::agreement(s, CLAIM, a, c, Some(x), (d - exact.value).abs(), allowed, ANCHOR)]
        }
        Err(e) => vec![ReportRow::error(s, CLAIM, a, c, Some(x), &e, ANCHOR)],
    }
}

fn moment_rows(cfg: &RunConfig, a: f64, c: f64) -> Vec<ReportRow> {
    let s = Suite::Moments;
    let tol = cfg.tolerance(s);
    let mut rows = Vec::new();
    for power in MomentIdentity::POWERS {
        let id = MomentIdentity { power };
        if !id.in_region(a, c) {
            continue;
        }
        let anchor = format!("integral of t^{power} phi(t)");
        let row = WeightDensity::new(a, c)
            .and_then(|d| d.moment(power, 0.01 * tol))
            .map(|m| {
                let diff = (m.value - id.closed_form(a, c)).abs();
                let mut row = ReportRow::agreement(s, id.id(), a, c, None, diff, tol + m.abs_error, &anchor);
                row.budget = m.abs_error;
                row
            })
            .unwrap_or_else(|e| ReportRow::error(s, id.id(), a, c, None, &e, &anchor));
        rows.push(row);
    }
    rows
}

fn stieltjes_rows(cfg: &RunConfig, a: f64, c: f64, x: f64) -> Vec<ReportRow> {
    let s = Suite::Stieltjes;
    let tol = cfg.tolerance(s);
    let ev = evaluator(1e-13);
    let mut rows = Vec::new();
    let cases: [(&str, TuranianKind, &str); 2] = [
        ("stieltjes_both", TuranianKind::BothShift, "-int t phi(t)/(x+t)^2 dt equals the both-shift ratio"),
        ("stieltjes_first", TuranianKind::FirstShift, "(1 - int x^2 phi(t)/(x+t)^2 dt)/(1+a-c) equals the first-shift ratio"),
    ];
    for (claim, kind, anchor) in cases {
        let result = (|| -> Result<(FunctionValue, FunctionValue)> {
            let d = WeightDensity::new(a, c)?;
            let p = ParameterPoint::new(a, c, x)?;
            let direct = TuranianTriple::evaluate(&ev, kind, p)?.ratio()?;
            let integral = match kind {
                TuranianKind::BothShift => d.stieltjes_ratio(x, tol)?,
                _ => d.stieltjes_first_shift(x, tol)?,
            };
            Ok((direct, integral))
        })();
        rows.push(match result {
            Ok((direct, integral)) => {
                let budget = direct.abs_error + integral.abs_error;
                let mut row = ReportRow::agreement(s, claim, a, c, Some(x), (direct.value - integral.value).abs(), budget, anchor);
                row.budget = budget;
                row
            }
            Err(e) => ReportRow::error(s, claim, a, c, Some(x), &e, anchor),
        });
    }
    rows
}

fn bound_rows(cfg: &RunConfig, a: f64, c: f64, x: f64) -> Vec<ReportRow> {
    let s = Suite::Bounds;
    let ev = evaluator(cfg.tolerance(s));
    let p = match ParameterPoint::new(a, c, x) {
        Ok(p) => p,
        Err(e) => return vec![ReportRow::error(s, "point", a, c, Some(x), &e, "")],
    };
    let mut cache = PointCache::new(&ev, p);
    catalog()
        .iter()
        .filter(|spec| spec.in_region(a, c))
        .map(|spec| match check_bound_cached(spec.id, &mut cache) {
            Ok(r) => ReportRow::from_record(s, &r, Some(x)),
            Err(e) => ReportRow::error(s, &spec.id.name(), a, c, Some(x), &e, spec.anchor),
        })
        .collect()
}

fn dominance_rows(a: f64, c: f64, x: f64) -> Vec<ReportRow> {
    let s = Suite::Dominance;
    DominanceId::ALL
        .into_iter()
        .filter(|d| d.spec().in_region(a, c))
        .map(|d| {
            match ParameterPoint::new(a, c, x).and_then(|p| check_dominance(d, p)) {
                Ok(r) => {
                    let mut row = ReportRow::from_record(s, &r.record, Some(x));
                    row.anchor = format!("{}; threshold {} {}", row.anchor, d.spec().threshold, if r.threshold_met { "met" } else { "not met" });
                    row
                }
                Err(e) => ReportRow::error(s, &d.name(), a, c, Some(x), &e, d.spec().anchor),
            }
        })
        .collect()
}

fn sharpness_rows(cfg: &RunConfig, a: f64, c: f64) -> Vec<ReportRow> {
    let s = Suite::Sharpness;
    let ev = evaluator(cfg.tolerance(s));
    let mut rows = Vec::new();
    for id in SharpnessLimit::ALL {
        let limit = SharpnessLimit::new(id);
        if !limit.in_region(a, c) {
            continue;
        }
        let anchor = format!("{} limit {} ({})", limit.name(), limit.limit_value(a, c), limit.region());
        let claim = format!("{}:approach", limit.name());
        let row = match sharpness_scan_with(&ev, limit, a, c, limit.default_sequence()) {
            Ok(scan) => {
                let n = scan.points.len();
                let (last, prev) = (scan.points[n - 1], scan.points[n - 2]);
                let budget = last.budget + prev.budget;
                let margin = prev.deviation - last.deviation;
                let status = if margin.abs() <= budget || scan.any_inconclusive() {
                    RowStatus::Inconclusive
                } else if scan.eventually_decreasing() && margin > budget {
                    RowStatus::Pass
                } else {
                    RowStatus::Fail
                };
                ReportRow {
                    suite: s,
                    claim,
                    a,
                    c,
                    x: Some(last.x),
                    lhs: last.deviation,
                    rhs: prev.deviation,
                    margin,
                    budget,
                    status,
                    anchor,
                }
            }
            Err(e) => ReportRow::error(s, &claim, a, c, None, &e, &anchor),
        };
        rows.push(row);
    }
    rows
}

fn monotonicity_rows(cfg: &RunConfig, a: f64, c: f64) -> Vec<ReportRow> {
    let s = Suite::Monotonicity;
    let ev = evaluator(cfg.tolerance(s));
    let mut xs = cfg.grid_x.clone();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut rows = Vec::new();
    for f in Auxiliary::ALL {
        if !f.in_region(a, c) {
            continue;
        }
        let claim = format!("{}_{}", f.name(), if f.increasing() { "increasing" } else { "decreasing" });
        let anchor = format!("{} monotone on consecutive x ({})", f.name(), f.region());
        let values: Vec<Result<FunctionValue>> = xs
            .iter()
            .map(|&x| {
                let p = ParameterPoint::new(a, c, x)?;
                auxiliary_log_ratio_cached(f, &mut PointCache::new(&ev, p))
            })
            .collect();
        for (i, w) in values.windows(2).enumerate() {
            let row = match (&w[0], &w[1]) {
                (Ok(v0), Ok(v1)) => {
                    let (lhs, rhs) = if f.increasing() { (*v0, *v1) } else { (*v1, *v0) };
                    let p = ParameterPoint::new(a, c, xs[i]).expect("validated grid");
                    let r = VerificationRecord::compare(claim.clone(), p, lhs, rhs, true, &anchor);
                    ReportRow::from_record(s, &r, Some(xs[i]))
                }
                (Err(e), _) | (_, Err(e)) => ReportRow::error(s, &claim, a, c, Some(xs[i]), e, &anchor),
            };
            rows.push(row);
        }
    }
    rows
}

fn run_task(cfg: &RunConfig, t: &Task) -> Vec<ReportRow> {
    let x = t.xi.map(|i| cfg.grid_x[i]);
    match (t.suite, x) {
        (Suite::KernelCrosscheck, Some(x)) => kernel_crosscheck(cfg, t.a, t.c, x),
        (Suite::OdeResidual, Some(x)) => ode_rows(cfg, t.a, t.c, x),
        (Suite::Derivative, Some(x)) => derivative_rows(cfg, t.a, t.c, x),
        (Suite::Stieltjes, Some(x)) => stieltjes_rows(cfg, t.a, t.c, x),
        (Suite::Bounds, Some(x)) => bound_rows(cfg, t.a, t.c, x),
        (Suite::Dominance, Some(x)) => dominance_rows(t.a, t.c, x),
        (Suite::Moments, None) => moment_rows(cfg, t.a, t.c),
        (Suite::Sharpness, None) => sharpness_rows(cfg, t.a, t.c),
        (Suite::Monotonicity, None) => monotonicity_rows(cfg, t.a, t.c),
        _ => Vec::new(),
    }
}

fn suite_region(suite: Suite, a: f64, c: f64) -> bool {
    match suite {
        Suite::KernelCrosscheck => a > 0.0 && (c - c.round()).abs() >= INTEGER_C_GUARD,
        Suite::OdeResidual | Suite::Derivative | Suite::Bounds | Suite::Dominance => true,
        Suite::Moments | Suite::Stieltjes => a > 0.0 && c < 1.0,
        Suite::Sharpness => a > 0.0 && c < 1.0,
        Suite::Monotonicity => a > 0.0,
    }
}

fn per_x(suite: Suite) -> bool {
    !matches!(suite, Suite::Moments | Suite::Sharpness | Suite::Monotonicity)
}

/// Claim names a suite can produce, in report order.
fn claim_order(suite: Suite) -> Vec<String> {
    match suite {
        Suite::KernelCrosscheck => vec!["quadrature_vs_connection".into()],
        Suite::OdeResidual => vec!["kummer_ode".into()],
        Suite::Derivative => vec!["derivative".into()],
        Suite::Moments => MomentIdentity::POWERS.iter().map(|&power| MomentIdentity { power }.id().to_string()).collect(),
        Suite::Stieltjes => vec!["stieltjes_both".into(), "stieltjes_first".into()],
        Suite::Bounds => catalog().iter().map(|s| s.id.name()).collect(),
        Suite::Dominance => DominanceId::ALL.iter().map(|d| d.name()).collect(),
        Suite::Sharpness => SharpnessLimit::ALL
            .iter()
            .map(|&id| format!("{}:approach", SharpnessLimit::new(id).name()))
            .collect(),
        Suite::Monotonicity => Auxiliary::ALL
            .iter()
            .map(|f| format!("{}_{}", f.name(), if f.increasing() { "increasing" } else { "decreasing" }))
            .collect(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub counts: BTreeMap<String, usize>,
    /// Claims with no grid point inside their region.
    pub empty_claims: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub rows: Vec<ReportRow>,
    pub summary: BTreeMap<String, SuiteSummary>,
}

impl RunReport {
    pub fn count(&self, status: RowStatus) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }

    /// 0 with no failures, 1 with at least one failing row, 2 when a row
    /// could not be evaluated.
    pub fn exit_code(&self) -> i32 {
        if self.count(RowStatus::Error) > 0 {
            2
        } else if self.count(RowStatus::Fail) > 0 {
            1
        } else {
            0
        }
    }

    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        for (suite, s) in &self.summary {
            let counts: Vec<String> = RowStatus::ALL
                .iter()
                .map(|st| format!("{}={}", st.name(), s.counts.get(st.name()).copied().unwrap_or(0)))
                .collect();
            out.push_str(&format!("{suite}: {}\n", counts.join(" ")));
            if !s.empty_claims.is_empty() {
                out.push_str(&format!("{suite}: empty region for {}\n", s.empty_claims.join(", ")));
            }
        }
        out
    }
}

/// Runs the configured suites. Rows are ordered by suite, claim and grid
/// index independently of the number of workers.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let mut tasks = Vec::new();
    for &suite in &cfg.suites {
        for &a in &cfg.grid_a {
            for &c in &cfg.grid_c {
                if !suite_region(suite, a, c) {
                    continue;
                }
                if per_x(suite) {
                    for xi in 0..cfg.grid_x.len() {
                        tasks.push(Task { suite, a, c, xi: Some(xi) });
                    }
                } else {
                    tasks.push(Task { suite, a, c, xi: None });
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Vec<ReportRow>> = pool.install(|| {
        use rayon::prelude::*;
        tasks.par_iter().map(|t| run_task(cfg, t)).collect()
    });

    // (suite, claim, task index, position) gives the report order
    let mut keyed: Vec<(usize, usize, usize, usize, ReportRow)> = Vec::new();
    for (ti, rows) in results.into_iter().enumerate() {
        for (pos, row) in rows.into_iter().enumerate() {
            let order = claim_order(row.suite);
            let ci = order.iter().position(|c| *c == row.claim).unwrap_or(order.len());
            let si = Suite::ALL.iter().position(|s| *s == row.suite).unwrap_or(usize::MAX);
            keyed.push((si, ci, ti, pos, row));
        }
    }
    keyed.sort_by(|l, r| (l.0, l.1, l.2, l.3).cmp(&(r.0, r.1, r.2, r.3)));
    let rows: Vec<ReportRow> = keyed.into_iter().map(|k| k.4).collect();

    let mut summary = BTreeMap::new();
    for &suite in &cfg.suites {
        let mut s = SuiteSummary::default();
        for st in RowStatus::ALL {
            let n = rows.iter().filter(|r| r.suite == suite && r.status == st).count();
            s.counts.insert(st.name().to_string(), n);
        }
        for claim in claim_order(suite) {
            if !rows.iter().any(|r| r.suite == suite && r.claim == claim) {
                s.empty_claims.push(claim);
            }
        }
        summary.insert(suite.name().to_string(), s);
    }
    Ok(RunReport { rows, summary })
}

fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub const CSV_COLUMNS: [&str; 11] = ["suite", "claim", "a", "c", "x", "lhs", "rhs", "margin", "budget", "status", "anchor"];

/// CSV report; the first line is a `#` comment carrying the generation time.
pub fn write_csv<W: Write>(report: &RunReport, mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Domain(format!("cannot write report: {e}"));
    writeln!(out, "# generated_at={}", timestamp()).map_err(io)?;
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Domain(format!("cannot write report: {e}"));
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for r in &report.rows {
        w.write_record([
            r.suite.name().to_string(),
            r.claim.clone(),
            fmt_float(r.a),
            fmt_float(r.c),
            r.x.map(fmt_float).unwrap_or_default(),
            fmt_float(r.lhs),
            fmt_float(r.rhs),
            fmt_float(r.margin),
            fmt_float(r.budget),
            r.status.name().to_string(),
            r.anchor.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io)?;
    Ok(())
}

#[derive(Serialize)]
struct JsonRow<'a> {
    suite: &'a str,
    claim: &'a str,
    a: String,
    c: String,
    x: Option<String>,
    lhs: String,
    rhs: String,
    margin: String,
    budget: String,
    status: &'a str,
    anchor: &'a str,
}

/// JSON report: `generated_at` on its own first line, then rows and summary.
pub fn write_json<W: Write>(report: &RunReport, mut out: W) -> Result<()> {
    let rows: Vec<JsonRow> = report
        .rows
        .iter()
        .map(|r| JsonRow {
            suite: r.suite.name(),
            claim: &r.claim,
            a: fmt_float(r.a),
            c: fmt_float(r.c),
            x: r.x.map(fmt_float),
            lhs: fmt_float(r.lhs),
            rhs: fmt_float(r.rhs),
            margin: fmt_float(r.margin),
            budget: fmt_float(r.budget),
            status: r.status.name(),
            anchor: &r.anchor,
        })
        .collect();
    let body = serde_json::json!({ "rows": rows, "summary": report.summary });
    let text = serde_json::to_string_pretty(&body).map_err(|e| Error::Domain(e.to_string()))?;
    // keep the timestamp on a line of its own so reports diff cleanly
    let text = text.replacen('{', &format!("{{\n  \"generated_at\": {},", timestamp()), 1);
    out.write_all(text.as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| Error::Domain(format!("cannot write report: {e}")))
}

/// Writes the report where the configuration says: `out` or standard output.
pub fn write_report(cfg: &RunConfig, report: &RunReport) -> Result<()> {
    let open = |p: &Path| fs::File::create(p).map_err(|e| Error::Domain(format!("cannot create {}: {e}", p.display())));
    match (&cfg.out, cfg.format) {
        (Some(p), Format::Csv) => {
            write_csv(report, std::io::BufWriter::new(open(p)?))?;
            if cfg.json_mirror {
                write_json(report, std::io::BufWriter::new(open(&p.with_extension("json"))?))?;
            }
        }
        (Some(p), Format::Json) => write_json(report, std::io::BufWriter::new(open(p)?))?,
        (None, Format::Csv) => write_csv(report, std::io::stdout().lock())?,
        (None, Format::Json) => write_json(report, std::io::stdout().lock())?,
    }
    Ok(())
}

/// What `eval` computes at a point.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalTarget {
    Psi,
    Turanian(TuranianKind),
    Ratio(TuranianKind),
    Phi(f64),
    Bound(BoundId),
    Dominance(DominanceId),
    Auxiliary(Auxiliary),
}

impl FromStr for EvalTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let need = || arg.ok_or_else(|| Error::Domain(format!("'{head}' needs an argument, as in {head}:<value>")));
        Ok(match head {
            "psi" => EvalTarget::Psi,
            "turanian" => EvalTarget::Turanian(need()?.parse()?),
            "ratio" => EvalTarget::Ratio(need()?.parse()?),
            "phi" => {
                let t = need()?;
                EvalTarget::Phi(t.parse().map_err(|_| Error::Domain(format!("not a number: '{t}'")))?)
            }
            "bound" => EvalTarget::Bound(BoundId::parse(need()?)?),
            "dominance" => EvalTarget::Dominance(DominanceId::parse(need()?)?),
            "aux" => EvalTarget::Auxiliary(Auxiliary::parse(need()?)?),
            _ => return Err(Error::Domain(format!("unknown evaluation target '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalOutput {
    pub what: String,
    pub a: f64,
    pub c: f64,
    pub x: f64,
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
    /// Present for bound and dominance checks.
    pub record: Option<VerificationRecord>,
}

impl EvalOutput {
    pub fn line(&self) -> String {
        let mut s = format!(
            "{} a={} c={} x={} value={} abs_error={} method={}",
            self.what,
            self.a,
            self.c,
            self.x,
            fmt_float(self.value),
            fmt_float(self.abs_error),
            self.method
        );
        if let Some(r) = &self.record {
            s.push_str(&format!(
                " lhs={} rhs={} margin={} budget={} status={}",
                fmt_float(r.lhs.value),
                fmt_float(r.rhs.value),
                fmt_float(r.margin),
                fmt_float(r.budget),
                r.status
            ));
        }
        s
    }

    pub fn failed(&self) -> bool {
        self.record.as_ref().is_some_and(|r| r.status == Status::Fail)
    }
}

pub fn eval_point(a: f64, c: f64, x: f64, what: &EvalTarget) -> Result<EvalOutput> {
    let p = ParameterPoint::new(a, c, x)?;
    let ev = Evaluator::default();
    let (name, v, record) = match what {
        EvalTarget::Psi => ("psi".to_string(), ev.psi(p)?, None),
        EvalTarget::Turanian(k) => (format!("turanian:{k}"), TuranianTriple::evaluate(&ev, *k, p)?.turanian(), None),
        EvalTarget::Ratio(k) => (format!("ratio:{k}"), TuranianTriple::evaluate(&ev, *k, p)?.ratio()?, None),
        EvalTarget::Phi(t) => (format!("phi:{t}"), WeightDensity::new(a, c)?.phi(*t)?, None),
        EvalTarget::Bound(id) => {
            let r = check_bound_cached(*id, &mut PointCache::new(&ev, p))?;
            (format!("bound:{id}"), FunctionValue::new(r.margin, r.budget, Method::Derived), Some(r))
        }
        EvalTarget::Dominance(id) => {
            let r = check_dominance(*id, p)?;
            (format!("dominance:{}", id.name()), FunctionValue::new(r.record.margin, r.record.budget, Method::Exact), Some(r.record))
        }
        EvalTarget::Auxiliary(f) => (format!("aux:{}", f.name()), auxiliary_log_ratio_cached(*f, &mut PointCache::new(&ev, p))?, None),
    };
    Ok(EvalOutput {
        what: name,
        a,
        c,
        x,
        value: v.value,
        abs_error: v.abs_error,
        method: v.method,
        record,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn config_settings() {
        let mut cfg = RunConfig::default();
        cfg.set("suites", "moments, bounds").unwrap();
        cfg.set("grid-a", "1,2").unwrap();
        cfg.set("tol_moments", "1e-7").unwrap();
        cfg.set("jobs", "3").unwrap();
        assert_eq!(cfg.suites, vec![Suite::Moments, Suite::Bounds]);
        assert_eq!(cfg.grid_a, vec![1.0, 2.0]);
        assert_eq!(cfg.tolerance(Suite::Moments), 1e-7);
        assert_eq!(cfg.tolerance(Suite::Bounds), 1e-13);
        assert!(cfg.set("colour", "blue").is_err());
        assert!(cfg.set("tol_everything", "1").is_err());
        cfg.set("tol_bounds", "-1").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn invalid_grids_rejected() {
        let cfg = RunConfig {
            grid_x: vec![0.0],
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig {
            grid_c: vec![],
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn eval_targets_parse() {
        assert_eq!("psi".parse::<EvalTarget>().unwrap(), EvalTarget::Psi);
        assert_eq!("ratio:both".parse::<EvalTarget>().unwrap(), EvalTarget::Ratio(TuranianKind::BothShift));
        assert_eq!("phi:2.5".parse::<EvalTarget>().unwrap(), EvalTarget::Phi(2.5));
        assert_eq!("bound:T1L".parse::<EvalTarget>().unwrap(), EvalTarget::Bound(BoundId::T1L));
        assert!("ratio".parse::<EvalTarget>().is_err());
        assert!("bound:Q".parse::<EvalTarget>().is_err());
    }

    #[test]
    fn eval_examples() {
        let o = eval_point(1.0, 2.0, 2.0, &EvalTarget::Psi).unwrap();
        assert!((o.value - 0.5).abs() < 1e-14);
        let o = eval_point(2.0, -2.0, 1e-6, &EvalTarget::Ratio(TuranianKind::BothShift)).unwrap();
        assert!((o.value + 0.5).abs() < 1e-4);
        let o = eval_point(1.0, 0.0, 1.0, &EvalTarget::Bound(BoundId::T1L)).unwrap();
        assert_eq!(o.record.as_ref().unwrap().status, Status::Pass);
        assert!(o.line().contains("status=pass"));
    }

    #[test]
    fn empty_region_is_reported() {
        let cfg = RunConfig {
            suites: vec![Suite::Moments],
            grid_c: vec![0.25, 0.75],
            ..RunConfig::default()
        };
        let r = run(&cfg).unwrap();
        let s = &r.summary["moments"];
        assert!(s.empty_claims.contains(&"M-2".to_string()));
        assert!(s.empty_claims.contains(&"M-1".to_string()));
        assert!(r.rows.iter().all(|row| row.claim == "M0" || row.claim == "M1"));
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn order_is_independent_of_workers() {
        let base = RunConfig {
            suites: vec![Suite::Bounds, Suite::KernelCrosscheck],
            grid_a: vec![0.5, 2.0],
            grid_c: vec![-1.5, 0.25],
            grid_x: vec![0.1, 1.0, 10.0],
            ..RunConfig::default()
        };
        let one = run(&base).unwrap();
        let four = run(&RunConfig { jobs: 4, ..base.clone() }).unwrap();
        assert_eq!(one.rows.len(), four.rows.len());
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&one, &mut a).unwrap();
        write_csv(&four, &mut b).unwrap();
        let strip = |v: &[u8]| String::from_utf8(v.to_vec()).unwrap().lines().skip(1).collect::<Vec<_>>().join("\n");
        assert_eq!(strip(&a), strip(&b));
    }
}
