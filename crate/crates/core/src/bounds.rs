//! Catalog of Turán-type and related inequalities for ψ, with pointwise
//! checks, comparisons between competing bounds, and the auxiliary log-ratio
//! functions whose monotonicity drives the Γ-normalized inequalities.
//!
//! Every inequality is stored in the form `lhs < rhs` and checked through
//! `margin = rhs − lhs` against the combined error budget of both sides.

use crate::error::{Error, Result};
use crate::gamma::{gamma_rel_error, log_gamma};
use crate::kernel::{Evaluator, FunctionValue, Method, ParameterPoint};
use crate::turanian::{TuranianKind, TuranianTriple};
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    RatioBoth,
    RatioFirst,
    RatioSecond,
    RawPsiRelation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    A,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Lt,
    Le,
    Gt,
}

/// `variable relation offset + a_coeff·a`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constraint {
    pub variable: Variable,
    pub relation: Relation,
    pub offset: f64,
    pub a_coeff: f64,
}

impl Constraint {
    const fn new(variable: Variable, relation: Relation, offset: f64) -> Self {
        Constraint {
            variable,
            relation,
            offset,
            a_coeff: 0.0,
        }
    }

    pub fn holds(&self, a: f64, c: f64) -> bool {
        let v = match self.variable {
            Variable::A => a,
            Variable::C => c,
        };
        let bound = self.offset + self.a_coeff * a;
        match self.relation {
            Relation::Lt => v < bound,
            Relation::Le => v <= bound,
            Relation::Gt => v > bound,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.variable {
            Variable::A => "a",
            Variable::C => "c",
        };
        let r = match self.relation {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
        };
        let a_term = if self.a_coeff == 1.0 { "a".to_string() } else { format!("{}a", self.a_coeff) };
        match (self.a_coeff, self.offset) {
            (k, o) if k == 0.0 => write!(f, "{v} {r} {o}"),
            (_, o) if o == 0.0 => write!(f, "{v} {r} {a_term}"),
            (_, o) => write!(f, "{v} {r} {a_term} + {o}"),
        }
    }
}

use Relation::*;
use Variable::*;

const A_POS: Constraint = Constraint::new(A, Gt, 0.0);
const A_GT1: Constraint = Constraint::new(A, Gt, 1.0);
const A_LE1: Constraint = Constraint::new(A, Le, 1.0);
const C_LT1: Constraint = Constraint::new(C, Lt, 1.0);
const C_NEG: Constraint = Constraint::new(C, Lt, 0.0);
const C_LTM1: Constraint = Constraint::new(C, Lt, -1.0);
const C_LT_A2: Constraint = Constraint {
    variable: C,
    relation: Lt,
    offset: 2.0,
    a_coeff: 1.0,
};
const C_LT_A1: Constraint = Constraint {
    variable: C,
    relation: Lt,
    offset: 1.0,
    a_coeff: 1.0,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BoundId {
    T1L,
    T1U,
    T2L,
    P1L,
    P1U,
    T3L,
    T3U,
    T5L,
    P2L,
    P2U,
    T6L,
    T6U,
    P3L,
    P3U,
    P4U,
    /// P4U probed on 0 < a ≤ 1, outside its proven range
    P4Ux,
    S1,
    S2,
    /// S2 with ψ(a,c,x)ψ(a+1,c+1,x) in place of ψ²(a,c,x)ψ(a+1,c+1,x)
    S2H,
    I1,
    I2,
    I3,
    I4,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundSpec {
    pub id: BoundId,
    pub target: Target,
    pub side: Side,
    pub region: &'static [Constraint],
    /// The inequality in readable form.
    pub statement: &'static str,
    pub anchor: &'static str,
    /// Whether a violation is a defect (true) or a finding to report.
    pub gated: bool,
}

impl BoundSpec {
    pub fn in_region(&self, a: f64, c: f64) -> bool {
        self.region.iter().all(|r| r.holds(a, c))
    }

    pub fn region_string(&self) -> String {
        let mut parts: Vec<String> = self.region.iter().map(|r| r.to_string()).collect();
        parts.push("x > 0".into());
        parts.join(", ")
    }
}

macro_rules! spec {
    ($id:ident, $target:ident, $side:ident, [$($r:expr),*], $stmt:expr, $anchor:expr, $gated:expr) => {
        BoundSpec {
            id: BoundId::$id,
            target: Target::$target,
            side: Side::$side,
            region: &[$($r),*],
            statement: $stmt,
            anchor: $anchor,
            gated: $gated,
        }
    };
}

/// The full bound catalog in a fixed order.
pub fn catalog() -> Vec<BoundSpec> {
    vec![
        spec!(T1L, RatioBoth, Lower, [A_POS, C_LT1], "(c-a-1)/x^2 < D_ac/psi^2", "both-shift lower bound, sharp at infinity", true),
        spec!(T1U, RatioBoth, Upper, [A_GT1, C_LTM1], "D_ac/psi^2 < 1/c + 2x(c-a)/(c^2(c+1))", "both-shift upper bound, sharp at zero", true),
        spec!(T2L, RatioBoth, Lower, [A_POS, C_LT1], "-1/(2x) < D_ac/psi^2", "both-shift lower bound -1/(2x)", true),
        spec!(P1L, RatioBoth, Lower, [A_POS, C_NEG], "1/c < D_ac/psi^2", "both-shift lower bound 1/c", true),
        spec!(P1U, RatioBoth, Upper, [A_POS, C_LT1], "D_ac/psi^2 < 0", "both-shift sign", true),
        spec!(T3L, RatioFirst, Lower, [A_POS, C_NEG], "(1 + x/(2c))/(1+a-c) < D_a/psi^2", "first-shift lower bound, linear in x", true),
        spec!(T3U, RatioFirst, Upper, [A_POS, C_LT1], "D_a/psi^2 < 2/x", "first-shift upper bound 2/x", true),
        spec!(T5L, RatioFirst, Lower, [A_GT1, C_LTM1], "(1 - (c-a)x^2/(c^2(c+1)))/(1+a-c) < D_a/psi^2", "first-shift lower bound, quadratic in x", true),
        spec!(P2L, RatioFirst, Lower, [A_POS, C_LT1], "0 < D_a/psi^2", "first-shift sign", true),
        spec!(P2U, RatioFirst, Upper, [A_GT1, C_LT1], "D_a/psi^2 < 1/(1+a-c)", "first-shift upper bound 1/(1+a-c)", true),
        spec!(T6L, RatioSecond, Lower, [A_POS, C_LT1], "-a/x^2 < D_c/psi^2", "second-shift lower bound -a/x^2", true),
        spec!(T6U, RatioSecond, Upper, [A_GT1, C_LTM1], "D_c/psi^2 < a(1 + 2x(c-a)/(c(c+1)))/(c(1+a-c))", "second-shift upper bound, sharp at zero", true),
        spec!(P3L, RatioSecond, Lower, [A_POS, C_NEG], "a/(c(1+a-c)) < D_c/psi^2", "second-shift lower bound a/(c(1+a-c))", true),
        spec!(P3U, RatioSecond, Upper, [A_POS], "D_c/psi^2 < 0", "second-shift sign", true),
        spec!(P4U, RatioBoth, Upper, [A_GT1], "D_ac/psi^2 < 1/a", "both-shift upper bound 1/a", true),
        spec!(P4Ux, RatioBoth, Upper, [A_POS, A_LE1], "D_ac/psi^2 < 1/a", "both-shift upper bound 1/a, probe for 0 < a <= 1", false),
        spec!(S1, RawPsiRelation, Lower, [A_POS, C_LT_A2], "-psi(a,c,x)psi(a,c-1,x)/x <= D_c", "second-shift lower bound with psi(a,c-1,x)", true),
        spec!(S2, RawPsiRelation, Lower, [A_GT1, C_LT_A1], "-psi^2(a,c,x)psi(a+1,c+1,x)/x <= D_c", "second-shift lower bound with psi^2(a,c,x)psi(a+1,c+1,x)", false),
        spec!(S2H, RawPsiRelation, Lower, [A_GT1, C_LT_A1], "-psi(a,c,x)psi(a+1,c+1,x)/x <= D_c", "second-shift lower bound with psi(a,c,x)psi(a+1,c+1,x)", false),
        spec!(I1, RawPsiRelation, Upper, [A_POS, C_NEG], "(G(a-c+1)/G(-c) psi(a+1,c+1,x))^(1/(a+1)) < (G(a-c+1)/G(1-c) psi(a,c,x))^(1/a)", "normalized power comparison", true),
        spec!(I2, RawPsiRelation, Lower, [A_POS, C_NEG], "2 < psi(a,c,x)/psi(a+1,c+1,x) - (G(a-c+1)/G(1-c) psi(a,c,x))^(1/a)/c", "ratio plus normalized power", true),
        spec!(I3, RawPsiRelation, Upper, [A_POS, C_LTM1], "(G(a-c+1)/G(1-c) psi(a,c,x))^(c/(a(c+1))) < (G(a-c+1)/G(-c) psi(a+1,c+1,x))^(1/(a+1))", "normalized power comparison, c < -1", true),
        spec!(I4, RawPsiRelation, Upper, [A_POS, C_NEG], "psi(a+1,c+1,x) < -psi(a,c,x)/c", "contiguous ratio bound", true),
    ]
}

pub fn spec(id: BoundId) -> BoundSpec {
    catalog().into_iter().find(|s| s.id == id).expect("every id is catalogued")
}

impl BoundId {
    pub fn name(self) -> String {
        format!("{self:?}")
    }

    pub fn parse(s: &str) -> Result<Self> {
        catalog()
            .into_iter()
            .map(|s| s.id)
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown bound '{s}'")))
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    /// Violation of a claim that is reported but not gated.
    Flagged,
    /// A comparison whose threshold condition does not hold at the point.
    NotClaimed,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
            Status::Flagged => "flagged",
            Status::NotClaimed => "not_claimed",
        }
    }

    /// Status of `lhs < rhs` given margin and combined budget.
    pub fn from_margin(margin: f64, budget: f64, gated: bool) -> Self {
        if !margin.is_finite() || !budget.is_finite() {
            return Status::Inconclusive;
        }
        if margin > budget {
            Status::Pass
        } else if margin.abs() <= budget {
            Status::Inconclusive
        } else if gated {
            Status::Fail
        } else {
            Status::Flagged
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationRecord {
    pub claim: String,
    pub point: ParameterPoint,
    pub lhs: FunctionValue,
    pub rhs: FunctionValue,
    pub margin: f64,
    pub budget: f64,
    pub status: Status,
    pub anchor: String,
}

impl VerificationRecord {
    pub fn compare(claim: String, point: ParameterPoint, lhs: FunctionValue, rhs: FunctionValue, gated: bool, anchor: &str) -> Self {
        let margin = rhs.value - lhs.value;
        let budget = lhs.abs_error + rhs.abs_error + 2.0 * f64::EPSILON * (lhs.value.abs() + rhs.value.abs());
        VerificationRecord {
            claim,
            point,
            lhs,
            rhs,
            margin,
            budget,
            status: Status::from_margin(margin, budget, gated),
            anchor: anchor.to_string(),
        }
    }
}

/// Memoized ψ(a+i, c+j, x) at one base point.
pub struct PointCache<'e> {
    evaluator: &'e Evaluator,
    base: ParameterPoint,
    values: HashMap<(i32, i32), FunctionValue>,
}

impl<'e> PointCache<'e> {
    pub fn new(evaluator: &'e Evaluator, base: ParameterPoint) -> Self {
        PointCache {
            evaluator,
            base,
            values: HashMap::new(),
        }
    }

    pub fn base(&self) -> ParameterPoint {
        self.base
    }

    pub fn psi(&mut self, da: i32, dc: i32) -> Result<FunctionValue> {
        if let Some(v) = self.values.get(&(da, dc)) {
            return Ok(*v);
        }
        let v = self.evaluator.psi(self.base.shifted(da as f64, dc as f64))?;
        self.values.insert((da, dc), v);
        Ok(v)
    }

    pub fn triple(&mut self, kind: TuranianKind) -> Result<TuranianTriple> {
        let (da, dc) = kind.shifts();
        let (da, dc) = (da as i32, dc as i32);
        Ok(TuranianTriple {
            kind,
            point: self.base,
            minus: self.psi(-da, -dc)?,
            center: self.psi(0, 0)?,
            plus: self.psi(da, dc)?,
        })
    }

    pub fn ratio(&mut self, kind: TuranianKind) -> Result<FunctionValue> {
        self.triple(kind)?.ratio()
    }
}

fn exact(value: f64) -> FunctionValue {
    FunctionValue::new(value, 2.0 * f64::EPSILON * value.abs(), Method::Exact)
}

fn derived(value: f64, abs_error: f64) -> FunctionValue {
    FunctionValue::new(value, abs_error, Method::Derived)
}

/// Γ(num)/Γ(den) with its relative error.
fn gamma_ratio_rel(num: f64, den: f64) -> Result<(f64, f64)> {
    let n = log_gamma(num)?;
    let d = log_gamma(den)?;
    let v = n.sign * d.sign * (n.ln_abs - d.ln_abs).exp();
    let rel = gamma_rel_error(num) + gamma_rel_error(den) + 2.0 * f64::EPSILON * (1.0 + (n.ln_abs - d.ln_abs).abs());
    Ok((v, rel))
}

/// (g·ψ)^e with g of relative error `g_rel`; requires gψ > 0.
fn normalized_power(g: f64, g_rel: f64, psi: FunctionValue, e: f64) -> Result<FunctionValue> {
    let base = g * psi.value;
    if !(base > 0.0) {
        return Err(Error::Domain(format!("normalized value must be positive, got {base}")));
    }
    let log_v = e * base.ln();
    let v = log_v.exp();
    let rel = e.abs() * (g_rel + psi.rel_error()) + 2.0 * f64::EPSILON * (1.0 + log_v.abs());
    Ok(derived(v, v * rel))
}

fn ratio_target(target: Target) -> Option<TuranianKind> {
    match target {
        Target::RatioBoth => Some(TuranianKind::BothShift),
        Target::RatioFirst => Some(TuranianKind::FirstShift),
        Target::RatioSecond => Some(TuranianKind::SecondShift),
        Target::RawPsiRelation => None,
    }
}

/// Closed-form bound value for the ratio-type specs.
pub fn bound_value(id: BoundId, a: f64, c: f64, x: f64) -> Option<f64> {
    use BoundId::*;
    let s = 1.0 + a - c;
    Some(match id {
        T1L => (c - a - 1.0) / (x * x),
        T1U => 1.0 / c + 2.0 * x * (c - a) / (c * c * (c + 1.0)),
        T2L => -1.0 / (2.0 * x),
        P1L => 1.0 / c,
        P1U | P2L | P3U => 0.0,
        T3L => (1.0 + x / (2.0 * c)) / s,
        T3U => 2.0 / x,
        T5L => (1.0 - (c - a) * x * x / (c * c * (c + 1.0))) / s,
        P2U => 1.0 / s,
        T6L => -a / (x * x),
        T6U => a / (c * s) * (1.0 + 2.0 * x * (c - a) / (c * (c + 1.0))),
        P3L => a / (c * s),
        P4U | P4Ux => 1.0 / a,
        S1 | S2 | S2H | I1 | I2 | I3 | I4 => return None,
    })
}

/// Both sides of a raw ψ relation, in `lhs < rhs` orientation.
fn raw_sides(id: BoundId, cache: &mut PointCache) -> Result<(FunctionValue, FunctionValue)> {
    use BoundId::*;
    let p = cache.base();
    let (a, c, x) = (p.a(), p.c(), p.x());
    match id {
        S1 | S2 | S2H => {
            let t = cache.triple(TuranianKind::SecondShift)?.turanian();
            let psi = cache.psi(0, 0)?;
            let other = match id {
                S1 => cache.psi(0, -1)?,
                _ => cache.psi(1, 1)?,
            };
            let mut prod = psi.value * other.value;
            let mut rel = psi.rel_error() + other.rel_error();
            if id == S2 {
                prod *= psi.value;
                rel += psi.rel_error();
            }
            let v = -prod / x;
            Ok((derived(v, v.abs() * (rel + 3.0 * f64::EPSILON)), t))
        }
        I1 | I3 => {
            let (g0, r0) = gamma_ratio_rel(a - c + 1.0, 1.0 - c)?;
            let (g1, r1) = gamma_ratio_rel(a - c + 1.0, -c)?;
            let shifted = normalized_power(g1, r1, cache.psi(1, 1)?, 1.0 / (a + 1.0))?;
            let e0 = if id == I1 { 1.0 / a } else { c / (a * (c + 1.0)) };
            let base = normalized_power(g0, r0, cache.psi(0, 0)?, e0)?;
            Ok(if id == I1 { (shifted, base) } else { (base, shifted) })
        }
        I2 => {
            let (g0, r0) = gamma_ratio_rel(a - c + 1.0, 1.0 - c)?;
            let psi = cache.psi(0, 0)?;
            let up = cache.psi(1, 1)?;
            let q = psi.value / up.value;
            let q_err = q.abs() * (psi.rel_error() + up.rel_error() + f64::EPSILON);
            let w = normalized_power(g0, r0, psi, 1.0 / a)?;
            let v = q - w.value / c;
            let err = q_err + w.abs_error / c.abs() + 2.0 * f64::EPSILON * (q.abs() + (w.value / c).abs());
            Ok((exact(2.0), derived(v, err)))
        }
        I4 => {
            let psi = cache.psi(0, 0)?;
            let up = cache.psi(1, 1)?;
            let v = -psi.value / c;
            Ok((up, derived(v, psi.abs_error / c.abs() + f64::EPSILON * v.abs())))
        }
        _ => Err(Error::Domain(format!("{id} is not a raw relation"))),
    }
}

/// Checks bound `id` at `p` using (and filling) `cache`, which must be
/// based at `p`.
pub fn check_bound_cached(id: BoundId, cache: &mut PointCache) -> Result<VerificationRecord> {
    let s = spec(id);
    let p = cache.base();
    if !s.in_region(p.a(), p.c()) {
        return Err(Error::region(id.name(), s.region_string()));
    }
    let (lhs, rhs) = match ratio_target(s.target) {
        Some(kind) => {
            let ratio = cache.ratio(kind)?;
            let b = exact(bound_value(id, p.a(), p.c(), p.x()).expect("ratio specs have closed forms"));
            match s.side {
                Side::Lower => (b, ratio),
                Side::Upper => (ratio, b),
            }
        }
        None => raw_sides(id, cache)?,
    };
    Ok(VerificationRecord::compare(id.name(), p, lhs, rhs, s.gated, s.anchor))
}

pub fn check_bound_with(ev: &Evaluator, id: BoundId, p: ParameterPoint) -> Result<VerificationRecord> {
    check_bound_cached(id, &mut PointCache::new(ev, p))
}

pub fn check_bound(id: BoundId, p: ParameterPoint) -> Result<VerificationRecord> {
    check_bound_with(&Evaluator::default(), id, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DominanceId {
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
    D7,
    D8,
}

#[derive(Debug, Clone, Serialize)]
pub struct DominanceSpec {
    pub id: DominanceId,
    /// The bound claimed to be tighter.
    pub claimed: BoundId,
    pub competitor: BoundId,
    pub threshold: &'static str,
    pub anchor: &'static str,
}

impl DominanceId {
    pub const ALL: [DominanceId; 8] = [
        DominanceId::D1,
        DominanceId::D2,
        DominanceId::D3,
        DominanceId::D4,
        DominanceId::D5,
        DominanceId::D6,
        DominanceId::D7,
        DominanceId::D8,
    ];

    pub fn name(self) -> String {
        format!("{self:?}")
    }

    pub fn parse(s: &str) -> Result<Self> {
        DominanceId::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown comparison '{s}'")))
    }

    pub fn spec(self) -> DominanceSpec {
        use BoundId::*;
        use DominanceId::*;
        let (claimed, competitor, threshold, anchor) = match self {
            D1 => (T1L, P1L, "x^2 > c(c-a-1)", "(c-a-1)/x^2 beats 1/c for large x"),
            D2 => (T1U, P1U, "x < c(c+1)/(2(a-c))", "both-shift upper bound beats 0 for small x"),
            D3 => (T2L, P1L, "x > -c/2", "-1/(2x) beats 1/c for large x"),
            D4 => (T3L, P2L, "x < -3c/2", "first-shift linear lower bound beats 0 for small x"),
            D5 => (T3U, P2U, "x > 2(1+a-c)", "2/x beats 1/(1+a-c) for large x"),
            D6 => (T5L, P2L, "x^2 < c^2(c+1)/(c-a)", "first-shift quadratic lower bound beats 0 for small x"),
            D7 => (T6L, P3L, "x^2 > c(c-a-1)", "-a/x^2 beats a/(c(1+a-c)) for large x"),
            D8 => (T6U, P3U, "x < c(c+1)/(2(a-c))", "second-shift upper bound beats 0 for small x"),
        };
        DominanceSpec {
            id: self,
            claimed,
            competitor,
            threshold,
            anchor,
        }
    }

    pub fn threshold_met(self, a: f64, c: f64, x: f64) -> bool {
        use DominanceId::*;
        match self {
            D1 | D7 => x * x > c * (c - a - 1.0),
            D2 | D8 => x < c * (c + 1.0) / (2.0 * (a - c)),
            D3 => x > -c / 2.0,
            D4 => x < -1.5 * c,
            D5 => x > 2.0 * (1.0 + a - c),
            D6 => x * x < c * c * (c + 1.0) / (c - a),
        }
    }
}

impl DominanceSpec {
    pub fn in_region(&self, a: f64, c: f64) -> bool {
        spec(self.claimed).in_region(a, c) && spec(self.competitor).in_region(a, c)
    }

    pub fn region_string(&self) -> String {
        format!("{}; {}", spec(self.claimed).region_string(), spec(self.competitor).region_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DominanceRecord {
    pub record: VerificationRecord,
    pub threshold_met: bool,
}

/// Compares the closed-form values of the two bounds: the claimed one must
/// lie strictly closer to the Turánian side. Points where the threshold
/// fails are recorded as `NotClaimed`.
pub fn check_dominance(id: DominanceId, p: ParameterPoint) -> Result<DominanceRecord> {
    let d = id.spec();
    let (a, c, x) = (p.a(), p.c(), p.x());
    if !d.in_region(a, c) {
        return Err(Error::region(id.name(), d.region_string()));
    }
    let claimed = exact(bound_value(d.claimed, a, c, x).expect("closed form"));
    let competitor = exact(bound_value(d.competitor, a, c, x).expect("closed form"));
    let (lhs, rhs) = match spec(d.claimed).side {
        Side::Lower => (competitor, claimed),
        Side::Upper => (claimed, competitor),
    };
    let mut record = VerificationRecord::compare(id.name(), p, lhs, rhs, true, d.anchor);
    let threshold_met = id.threshold_met(a, c, x);
    if !threshold_met {
        record.status = Status::NotClaimed;
    }
    Ok(DominanceRecord { record, threshold_met })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Auxiliary {
    /// log ψ(a,c,x)/a − log ψ(a+1,c+1,x)/(a+1), increasing for a > 0 > c
    F,
    /// c log ψ(a,c,x)/(a(c+1)) − log ψ(a+1,c+1,x)/(a+1), decreasing for a > 0, c < −1
    G,
    /// log ψ(a,c,x) − log ψ(a+1,c+1,x), increasing for a > 0
    H,
}

impl Auxiliary {
    pub const ALL: [Auxiliary; 3] = [Auxiliary::F, Auxiliary::G, Auxiliary::H];

    pub fn name(self) -> &'static str {
        match self {
            Auxiliary::F => "f",
            Auxiliary::G => "g",
            Auxiliary::H => "h",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Auxiliary::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown auxiliary function '{s}'")))
    }

    pub fn in_region(self, a: f64, c: f64) -> bool {
        match self {
            Auxiliary::F => a > 0.0 && c < 0.0,
            Auxiliary::G => a > 0.0 && c < -1.0,
            Auxiliary::H => a > 0.0,
        }
    }

    pub fn region(self) -> &'static str {
        match self {
            Auxiliary::F => "a > 0 > c",
            Auxiliary::G => "a > 0, c < -1",
            Auxiliary::H => "a > 0",
        }
    }

    pub fn increasing(self) -> bool {
        !matches!(self, Auxiliary::G)
    }

    fn weights(self, a: f64, c: f64) -> (f64, f64) {
        match self {
            Auxiliary::F => (1.0 / a, 1.0 / (a + 1.0)),
            Auxiliary::G => (c / (a * (c + 1.0)), 1.0 / (a + 1.0)),
            Auxiliary::H => (1.0, 1.0),
        }
    }

    /// Limit as x → 0 from ψ(a,c,x) → Γ(1−c)/Γ(a−c+1) (needs c < 0 so that
    /// the shifted function also has a finite limit).
    pub fn limit_at_zero(self, a: f64, c: f64) -> Result<f64> {
        if !(a > 0.0 && c < 0.0) {
            return Err(Error::region(format!("{} at zero", self.name()), "a > 0 > c"));
        }
        let l0 = log_gamma(1.0 - c)?.ln_abs - log_gamma(a - c + 1.0)?.ln_abs;
        let l1 = log_gamma(-c)?.ln_abs - log_gamma(a - c + 1.0)?.ln_abs;
        let (w0, w1) = self.weights(a, c);
        Ok(w0 * l0 - w1 * l1)
    }
}

pub fn auxiliary_log_ratio_cached(which: Auxiliary, cache: &mut PointCache) -> Result<FunctionValue> {
    let p = cache.base();
    let (a, c) = (p.a(), p.c());
    if !which.in_region(a, c) {
        return Err(Error::region(which.name(), which.region()));
    }
    let psi = cache.psi(0, 0)?;
    let up = cache.psi(1, 1)?;
    if !(psi.value > 0.0 && up.value > 0.0) {
        return Err(Error::Domain("psi must be positive on the auxiliary region".into()));
    }
    let (w0, w1) = which.weights(a, c);
    let (l0, l1) = (psi.value.ln(), up.value.ln());
    let value = w0 * l0 - w1 * l1;
    let err = w0.abs() * psi.rel_error() + w1.abs() * up.rel_error() + 2.0 * f64::EPSILON * ((w0 * l0).abs() + (w1 * l1).abs());
    Ok(derived(value, err))
}

pub fn auxiliary_log_ratio(which: Auxiliary, a: f64, c: f64, x: f64) -> Result<FunctionValue> {
    let ev = Evaluator::default();
    auxiliary_log_ratio_cached(which, &mut PointCache::new(&ev, ParameterPoint::new(a, c, x)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(a: f64, c: f64, x: f64) -> ParameterPoint {
        ParameterPoint::new(a, c, x).unwrap()
    }

    #[test]
    fn catalog_is_complete_and_parsable() {
        let cat = catalog();
        assert_eq!(cat.len(), 23);
        for s in &cat {
            assert_eq!(BoundId::parse(&s.id.name()).unwrap(), s.id);
            assert!(!s.region.is_empty());
            if ratio_target(s.target).is_some() {
                assert!(bound_value(s.id, 2.0, -2.5, 1.0).unwrap().is_finite());
            }
        }
        assert!(BoundId::parse("T9").is_err());
    }

    #[test]
    fn region_strings() {
        assert_eq!(spec(BoundId::T1L).region_string(), "a > 0, c < 1, x > 0");
        assert_eq!(spec(BoundId::S1).region_string(), "a > 0, c < a + 2, x > 0");
        assert!(spec(BoundId::S1).in_region(1.0, 2.5));
        assert!(!spec(BoundId::S1).in_region(1.0, 3.5));
    }

    #[test]
    fn t1l_example() {
        let r = check_bound(BoundId::T1L, pt(1.0, 0.0, 1.0)).unwrap();
        assert_eq!(r.lhs.value, -2.0);
        assert!(r.rhs.value > -2.0 && r.rhs.value < 0.0);
        assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn p3l_near_sharpness() {
        let r = check_bound(BoundId::P3L, pt(2.0, -2.0, 1e-6)).unwrap();
        assert!((r.lhs.value + 0.2).abs() < 1e-15);
        assert!(matches!(r.status, Status::Pass | Status::Inconclusive));
        assert!(r.margin.abs() < 1e-4);
    }

    #[test]
    fn i4_example() {
        let r = check_bound(BoundId::I4, pt(1.0, -1.0, 2.0)).unwrap();
        assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn region_violation_is_an_error() {
        assert!(matches!(check_bound(BoundId::T1U, pt(0.5, -2.5, 1.0)), Err(Error::Region { .. })));
        assert!(matches!(check_bound(BoundId::P1L, pt(1.0, 0.25, 1.0)), Err(Error::Region { .. })));
    }

    #[test]
    fn status_rules() {
        assert_eq!(Status::from_margin(1.0, 0.1, true), Status::Pass);
        assert_eq!(Status::from_margin(0.05, 0.1, true), Status::Inconclusive);
        assert_eq!(Status::from_margin(-0.05, 0.1, true), Status::Inconclusive);
        assert_eq!(Status::from_margin(-1.0, 0.1, true), Status::Fail);
        assert_eq!(Status::from_margin(-1.0, 0.1, false), Status::Flagged);
    }

    #[test]
    fn dominance_examples() {
        let d = check_dominance(DominanceId::D1, pt(1.0, -1.0, 2.0)).unwrap();
        assert!(d.threshold_met);
        assert_eq!(d.record.status, Status::Pass);
        assert_eq!(d.record.rhs.value, -0.75);
        assert_eq!(d.record.lhs.value, -1.0);
        let d = check_dominance(DominanceId::D3, pt(1.0, -1.0, 1.0)).unwrap();
        assert_eq!(d.record.status, Status::Pass);
        let d = check_dominance(DominanceId::D5, pt(2.0, 0.5, 10.0)).unwrap();
        assert_eq!(d.record.lhs.value, 0.2);
        assert_eq!(d.record.rhs.value, 0.4);
        assert_eq!(d.record.status, Status::Pass);
        let d = check_dominance(DominanceId::D5, pt(2.0, 0.5, 1.0)).unwrap();
        assert!(!d.threshold_met);
        assert_eq!(d.record.status, Status::NotClaimed);
    }

    #[test]
    fn auxiliary_monotonicity_examples() {
        let f1 = auxiliary_log_ratio(Auxiliary::F, 1.0, -1.0, 1.0).unwrap();
        let f2 = auxiliary_log_ratio(Auxiliary::F, 1.0, -1.0, 2.0).unwrap();
        assert!(f2.value > f1.value);
        let g1 = auxiliary_log_ratio(Auxiliary::G, 1.0, -2.0, 1.0).unwrap();
        let g2 = auxiliary_log_ratio(Auxiliary::G, 1.0, -2.0, 2.0).unwrap();
        assert!(g2.value < g1.value);
        let h0 = Auxiliary::H.limit_at_zero(1.0, -1.0).unwrap();
        assert!(h0.abs() < 1e-14);
        let h = auxiliary_log_ratio(Auxiliary::H, 1.0, -1.0, 1e-6).unwrap();
        assert!((h.value - h0).abs() < 1e-4);
        assert!(auxiliary_log_ratio(Auxiliary::G, 1.0, -0.5, 1.0).is_err());
    }
}
