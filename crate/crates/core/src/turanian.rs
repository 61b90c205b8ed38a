//! Turánians of ψ in three flavours and their normalized ratios.
//!
//! For a shift (δa, δc) the Turánian is
//! `ψ²(a,c,x) − ψ(a−δa, c−δc, x)·ψ(a+δa, c+δc, x)`; the ratio divides by ψ².

use crate::error::{Error, Result};
use crate::kernel::{Evaluator, FunctionValue, Method, ParameterPoint};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TuranianKind {
    /// (a, c) → (a ± 1, c ± 1)
    BothShift,
    /// a → a ± 1
    FirstShift,
    /// c → c ± 1
    SecondShift,
}

impl TuranianKind {
    pub const ALL: [TuranianKind; 3] = [
        TuranianKind::BothShift,
        TuranianKind::FirstShift,
        TuranianKind::SecondShift,
    ];

    pub fn shifts(self) -> (f64, f64) {
        match self {
            TuranianKind::BothShift => (1.0, 1.0),
            TuranianKind::FirstShift => (1.0, 0.0),
            TuranianKind::SecondShift => (0.0, 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TuranianKind::BothShift => "both",
            TuranianKind::FirstShift => "first",
            TuranianKind::SecondShift => "second",
        }
    }
}

impl fmt::Display for TuranianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TuranianKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" | "both_shift" => Ok(TuranianKind::BothShift),
            "first" | "first_shift" | "a" => Ok(TuranianKind::FirstShift),
            "second" | "second_shift" | "c" => Ok(TuranianKind::SecondShift),
            _ => Err(Error::Domain(format!("unknown Turanian kind '{s}'"))),
        }
    }
}

/// ψ at the three points a Turánian needs.
#[derive(Debug, Clone, Copy)]
pub struct TuranianTriple {
    pub kind: TuranianKind,
    pub point: ParameterPoint,
    pub minus: FunctionValue,
    pub center: FunctionValue,
    pub plus: FunctionValue,
}

impl TuranianTriple {
    pub fn evaluate(ev: &Evaluator, kind: TuranianKind, p: ParameterPoint) -> Result<Self> {
        let (da, dc) = kind.shifts();
        Ok(TuranianTriple {
            kind,
            point: p,
            minus: ev.psi(p.shifted(-da, -dc))?,
            center: ev.psi(p)?,
            plus: ev.psi(p.shifted(da, dc))?,
        })
    }

    pub fn turanian(&self) -> FunctionValue {
        let (m, c, p) = (self.minus, self.center, self.plus);
        let sq = c.value * c.value;
        let prod = m.value * p.value;
        let err = 2.0 * c.value.abs() * c.abs_error
            + p.value.abs() * m.abs_error
            + m.value.abs() * p.abs_error
            + c.abs_error * c.abs_error
            + m.abs_error * p.abs_error
            + 2.0 * f64::EPSILON * (sq + prod.abs());
        FunctionValue::new(sq - prod, err, Method::Derived)
    }

    /// 1 − ψ₋ψ₊/ψ², which avoids forming the cancelling difference in
    /// absolute terms first.
    pub fn ratio(&self) -> Result<FunctionValue> {
        let (m, c, p) = (self.minus, self.center, self.plus);
        if !(c.abs_error < c.value.abs()) {
            return Err(Error::ZeroDenominator);
        }
        let sq = c.value * c.value;
        let q = m.value * p.value / sq;
        let rel_center = c.abs_error / c.value.abs();
        let err = (p.value.abs() * m.abs_error + m.value.abs() * p.abs_error + m.abs_error * p.abs_error) / sq
            + q.abs() * (2.0 * rel_center + 3.0 * rel_center * rel_center)
            + 3.0 * f64::EPSILON * (1.0 + q.abs());
        Ok(FunctionValue::new(1.0 - q, err, Method::Derived))
    }
}

pub fn turanian_with(ev: &Evaluator, kind: TuranianKind, p: ParameterPoint) -> Result<FunctionValue> {
    Ok(TuranianTriple::evaluate(ev, kind, p)?.turanian())
}

pub fn turanian_ratio_with(ev: &Evaluator, kind: TuranianKind, p: ParameterPoint) -> Result<FunctionValue> {
    TuranianTriple::evaluate(ev, kind, p)?.ratio()
}

pub fn turanian(kind: TuranianKind, p: ParameterPoint) -> Result<FunctionValue> {
    turanian_with(&Evaluator::default(), kind, p)
}

pub fn turanian_ratio(kind: TuranianKind, p: ParameterPoint) -> Result<FunctionValue> {
    turanian_ratio_with(&Evaluator::default(), kind, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    XToZero,
    XToInfinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Ratio,
    RatioTimesX2,
}

/// Limits of normalized Turánian ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitId {
    /// x²Δ_{a,c}/ψ² → c − a − 1 as x → ∞
    Zeta,
    /// x²Δ_{a,c}/ψ² → 0 as x → 0
    Eta,
    /// Δ_{a,c}/ψ² → 1/c as x → 0
    BothAtZero,
    /// Δ_a/ψ² → 1/(1 + a − c) as x → 0
    FirstAtZero,
    /// Δ_c/ψ² → a/(c(1 + a − c)) as x → 0
    SecondAtZero,
    BothAtInfinity,
    FirstAtInfinity,
    SecondAtInfinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpnessLimit {
    pub id: LimitId,
    pub kind: TuranianKind,
    pub direction: Direction,
    pub normalization: Normalization,
}

impl SharpnessLimit {
    pub const ALL: [LimitId; 8] = [
        LimitId::Zeta,
        LimitId::Eta,
        LimitId::BothAtZero,
        LimitId::FirstAtZero,
        LimitId::SecondAtZero,
        LimitId::BothAtInfinity,
        LimitId::FirstAtInfinity,
        LimitId::SecondAtInfinity,
    ];

    pub fn new(id: LimitId) -> Self {
        use Direction::*;
        use LimitId::*;
        use Normalization::*;
        use TuranianKind::*;
        let (kind, direction, normalization) = match id {
            Zeta => (BothShift, XToInfinity, RatioTimesX2),
            Eta => (BothShift, XToZero, RatioTimesX2),
            BothAtZero => (BothShift, XToZero, Ratio),
            FirstAtZero => (FirstShift, XToZero, Ratio),
            SecondAtZero => (SecondShift, XToZero, Ratio),
            BothAtInfinity => (BothShift, XToInfinity, Ratio),
            FirstAtInfinity => (FirstShift, XToInfinity, Ratio),
            SecondAtInfinity => (SecondShift, XToInfinity, Ratio),
        };
        SharpnessLimit {
            id,
            kind,
            direction,
            normalization,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.id {
            LimitId::Zeta => "zeta",
            LimitId::Eta => "eta",
            LimitId::BothAtZero => "both_at_zero",
            LimitId::FirstAtZero => "first_at_zero",
            LimitId::SecondAtZero => "second_at_zero",
            LimitId::BothAtInfinity => "both_at_infinity",
            LimitId::FirstAtInfinity => "first_at_infinity",
            LimitId::SecondAtInfinity => "second_at_infinity",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        SharpnessLimit::ALL
            .iter()
            .map(|&id| SharpnessLimit::new(id))
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown limit '{s}'")))
    }

    /// Parameter region on which the limit holds.
    pub fn region(&self) -> &'static str {
        match self.id {
            LimitId::Eta | LimitId::BothAtZero | LimitId::SecondAtZero => "a > 0 > c",
            _ => "a > 0, c < 1",
        }
    }

    pub fn in_region(&self, a: f64, c: f64) -> bool {
        match self.id {
            LimitId::Eta | LimitId::BothAtZero | LimitId::SecondAtZero => a > 0.0 && c < 0.0,
            _ => a > 0.0 && c < 1.0,
        }
    }

    pub fn limit_value(&self, a: f64, c: f64) -> f64 {
        match self.id {
            LimitId::Zeta => c - a - 1.0,
            LimitId::BothAtZero => 1.0 / c,
            LimitId::FirstAtZero => 1.0 / (1.0 + a - c),
            LimitId::SecondAtZero => a / (c * (1.0 + a - c)),
            LimitId::Eta | LimitId::BothAtInfinity | LimitId::FirstAtInfinity | LimitId::SecondAtInfinity => 0.0,
        }
    }

    pub fn default_sequence(&self) -> &'static [f64] {
        match self.direction {
            Direction::XToZero => &[1.0, 1e-1, 1e-2, 1e-3],
            Direction::XToInfinity => &[10.0, 1e2, 1e3],
        }
    }

    /// The normalized ratio whose limit this is.
    pub fn normalized(&self, ev: &Evaluator, p: ParameterPoint) -> Result<FunctionValue> {
        let r = turanian_ratio_with(ev, self.kind, p)?;
        Ok(match self.normalization {
            Normalization::Ratio => r,
            Normalization::RatioTimesX2 => {
                let s = p.x() * p.x();
                FunctionValue::new(r.value * s, r.abs_error * s * (1.0 + 2.0 * f64::EPSILON), r.method)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub x: f64,
    pub value: f64,
    pub deviation: f64,
    pub budget: f64,
    /// Error budget at least as large as the deviation.
    pub inconclusive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessScan {
    pub limit: SharpnessLimit,
    pub a: f64,
    pub c: f64,
    pub limit_value: f64,
    pub points: Vec<ScanPoint>,
}

impl SharpnessScan {
    /// Deviation ratio between the last two scan points.
    pub fn last_contraction(&self) -> Option<f64> {
        let n = self.points.len();
        (n >= 2).then(|| self.points[n - 1].deviation / self.points[n - 2].deviation)
    }

    /// Deviations strictly decrease over the last two steps (or over the
    /// single step when only two points exist).
    pub fn eventually_decreasing(&self) -> bool {
        let n = self.points.len();
        if n < 2 {
            return false;
        }
        let start = n.saturating_sub(3);
        self.points[start..].windows(2).all(|w| w[1].deviation < w[0].deviation)
    }

    pub fn any_inconclusive(&self) -> bool {
        self.points.iter().any(|p| p.inconclusive)
    }

    /// Aitken Δ² extrapolation of the last three values; falls back to the
    /// last value when the second difference vanishes.
    pub fn extrapolated(&self) -> Option<f64> {
        let n = self.points.len();
        if n == 0 {
            return None;
        }
        if n < 3 {
            return Some(self.points[n - 1].value);
        }
        let (s0, s1, s2) = (self.points[n - 3].value, self.points[n - 2].value, self.points[n - 1].value);
        let d1 = s2 - s1;
        let d2 = d1 - (s1 - s0);
        if d2 == 0.0 || !d2.is_finite() {
            return Some(s2);
        }
        Some(s2 - d1 * d1 / d2)
    }

    /// |extrapolated − limit| within `rel` of the scale max(|limit|, |first value|).
    pub fn extrapolation_agrees(&self, rel: f64) -> bool {
        let Some(e) = self.extrapolated() else { return false };
        let scale = self.limit_value.abs().max(self.points[0].value.abs());
        (e - self.limit_value).abs() <= rel * scale
    }
}

pub fn sharpness_scan_with(
    ev: &Evaluator,
    limit: SharpnessLimit,
    a: f64,
    c: f64,
    sequence: &[f64],
) -> Result<SharpnessScan> {
    if !limit.in_region(a, c) {
        return Err(Error::region(limit.name(), limit.region()));
    }
    if sequence.is_empty() {
        return Err(Error::Domain("empty scan sequence".into()));
    }
    let monotone = sequence.windows(2).all(|w| match limit.direction {
        Direction::XToZero => w[1] < w[0],
        Direction::XToInfinity => w[1] > w[0],
    });
    if !monotone {
        return Err(Error::Domain("scan sequence must move monotonically toward the limit".into()));
    }
    let limit_value = limit.limit_value(a, c);
    let points = sequence
        .iter()
        .map(|&x| {
            let v = limit.normalized(ev, ParameterPoint::new(a, c, x)?)?;
            let deviation = (v.value - limit_value).abs();
            Ok(ScanPoint {
                x,
                value: v.value,
                deviation,
                budget: v.abs_error,
                inconclusive: v.abs_error >= deviation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SharpnessScan {
        limit,
        a,
        c,
        limit_value,
        points,
    })
}

pub fn sharpness_scan(limit: SharpnessLimit, a: f64, c: f64, sequence: &[f64]) -> Result<SharpnessScan> {
    sharpness_scan_with(&Evaluator::default(), limit, a, c, sequence)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(a: f64, c: f64, x: f64) -> ParameterPoint {
        ParameterPoint::new(a, c, x).unwrap()
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("both".parse::<TuranianKind>().unwrap(), TuranianKind::BothShift);
        assert_eq!("second_shift".parse::<TuranianKind>().unwrap(), TuranianKind::SecondShift);
        assert!("third".parse::<TuranianKind>().is_err());
    }

    #[test]
    fn closed_form_turanian_vanishes() {
        // ψ(1,2,2) = 1/2, ψ(0,1,2) = 1, ψ(2,3,2) = 1/4
        let t = turanian(TuranianKind::BothShift, pt(1.0, 2.0, 2.0)).unwrap();
        assert!(t.value.abs() <= t.abs_error + 1e-15, "{t:?}");
    }

    #[test]
    fn sign_examples() {
        let t = turanian(TuranianKind::BothShift, pt(1.0, 0.5, 1.0)).unwrap();
        assert!(t.value < -t.abs_error);
        let t = turanian(TuranianKind::FirstShift, pt(2.0, 0.5, 1.0)).unwrap();
        assert!(t.value > t.abs_error);
        let t = turanian(TuranianKind::SecondShift, pt(2.0, 0.5, 1.0)).unwrap();
        assert!(t.value < -t.abs_error);
    }

    #[test]
    fn small_x_ratio_examples() {
        let r = turanian_ratio(TuranianKind::BothShift, pt(2.0, -2.0, 1e-6)).unwrap();
        assert!((r.value + 0.5).abs() < 1e-4, "{}", r.value);
        let r = turanian_ratio(TuranianKind::FirstShift, pt(2.0, -1.0, 1e-6)).unwrap();
        assert!((r.value - 0.25).abs() < 1e-4, "{}", r.value);
        let r = turanian_ratio(TuranianKind::SecondShift, pt(2.0, -2.0, 1e-6)).unwrap();
        assert!((r.value + 0.2).abs() < 1e-4, "{}", r.value);
    }

    #[test]
    fn ratio_reference_values() {
        // Δ_{a,c}/ψ² from a 30-digit reference evaluation
        for (a, c, x, expected) in [
            (2.0, -2.0, 0.1, -0.387_505_314_415_565_81),
            (2.0, -2.0, 1.0, -0.159_869_210_162_378_397),
            (2.0, -2.0, 10.0, -0.018_197_705_336_670_358_9),
            (3.0, -1.5, 1.0, -0.153_644_234_027_080_776),
        ] {
            let r = turanian_ratio(TuranianKind::BothShift, pt(a, c, x)).unwrap();
            assert!((r.value - expected).abs() < 1e-11, "({a},{c},{x}): {} vs {expected}", r.value);
            assert!((r.value - expected).abs() <= r.abs_error * 10.0 + 1e-15);
        }
    }

    #[test]
    fn direct_and_ratio_paths_agree() {
        let ev = Evaluator::default();
        for kind in TuranianKind::ALL {
            for (a, c, x) in [(1.5, -2.5, 0.5), (0.5, 0.75, 3.0), (3.0, -0.5, 20.0)] {
                let tr = TuranianTriple::evaluate(&ev, kind, pt(a, c, x)).unwrap();
                let t = tr.turanian();
                let r = tr.ratio().unwrap();
                let sq = tr.center.value * tr.center.value;
                let budget = t.abs_error + r.abs_error * sq + 2.0 * tr.center.rel_error() * sq * r.value.abs();
                assert!((t.value - sq * r.value).abs() <= budget + 1e-15 * sq);
            }
        }
    }

    #[test]
    fn limit_constants() {
        let z = SharpnessLimit::new(LimitId::Zeta);
        assert_eq!(z.limit_value(1.0, 0.0), -2.0);
        assert_eq!(SharpnessLimit::new(LimitId::BothAtZero).limit_value(2.0, -2.0), -0.5);
        assert_eq!(SharpnessLimit::new(LimitId::FirstAtZero).limit_value(2.0, -1.0), 0.25);
        assert_eq!(SharpnessLimit::new(LimitId::SecondAtZero).limit_value(2.0, -2.0), -0.2);
        assert_eq!(SharpnessLimit::new(LimitId::Eta).limit_value(2.0, -2.0), 0.0);
        for id in SharpnessLimit::ALL {
            let l = SharpnessLimit::new(id);
            assert_eq!(SharpnessLimit::from_name(l.name()).unwrap(), l);
        }
    }

    #[test]
    fn zeta_scan_shrinks() {
        let s = sharpness_scan(SharpnessLimit::new(LimitId::Zeta), 1.0, 0.0, &[10.0, 1e2, 1e3]).unwrap();
        assert!(s.eventually_decreasing());
        assert!(!s.any_inconclusive());
        assert!(s.extrapolation_agrees(0.05));
    }

    #[test]
    fn small_x_scan_shrinks() {
        let s = sharpness_scan(SharpnessLimit::new(LimitId::BothAtZero), 2.0, -2.0, &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(s.eventually_decreasing());
        assert!(s.extrapolation_agrees(0.05));
    }

    #[test]
    fn plain_ratios_vanish_at_infinity() {
        for id in [LimitId::BothAtInfinity, LimitId::FirstAtInfinity, LimitId::SecondAtInfinity] {
            let s = sharpness_scan(SharpnessLimit::new(id), 2.0, -2.0, &[10.0, 1e2, 1e3]).unwrap();
            assert!(s.eventually_decreasing(), "{id:?}");
        }
    }

    #[test]
    fn scan_rejects_bad_input() {
        let l = SharpnessLimit::new(LimitId::BothAtZero);
        assert!(matches!(sharpness_scan(l, 2.0, 0.5, &[1e-1]), Err(Error::Region { .. })));
        assert!(sharpness_scan(l, 2.0, -2.0, &[1e-2, 1e-1]).is_err());
    }
}
