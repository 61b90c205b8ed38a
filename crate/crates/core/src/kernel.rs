//! The Tricomi function ψ(a, c, z), also written U(a, c, z).
//!
//! Independent evaluation routes:
//!
//! * [`psi_quadrature`]: the Laplace-type integral
//!   `ψ(a,c,x) = Γ(a)⁻¹ ∫₀^∞ e^(−xt) t^(a−1) (1+t)^(c−a−1) dt` for a > 0.
//! * [`psi_connection`]: the two-term connection formula in Kummer's M,
//!   valid for non-integer c and any complex z on the principal branch.
//! * [`psi_asymptotic`]: the large-x series `x^(−a) Σ (a)ₖ(a−c+1)ₖ (−x)^(−k)/k!`.
//! * [`psi_contour`]: the same integral along a rotated ray, which continues
//!   ψ to complex z (including the cut side z = t·e^(iπ)) for any real c.
//!
//! [`psi`] and [`psi_complex`] dispatch between them.

use crate::error::{Error, Result};
use crate::gamma::{gamma_rel_error, is_nonpositive_integer, log_gamma, recip_gamma};
use crate::kummer::kummer_m;
use crate::quadrature::{geometric_breaks, integrate_half_line, QuadOptions};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt;

/// Default relative tolerance for real ψ evaluations.
pub const DEFAULT_REL_TOL: f64 = 1e-13;

/// The connection formula is rejected when |c − round(c)| is below this.
pub const INTEGER_C_GUARD: f64 = 1e-6;

/// Largest estimated relative error the connection formula may return.
pub const CANCELLATION_LIMIT: f64 = 1e-6;

/// (a, c, x) with x > 0 and finite parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParameterPoint {
    a: f64,
    c: f64,
    x: f64,
}

impl ParameterPoint {
    pub fn new(a: f64, c: f64, x: f64) -> Result<Self> {
        if !a.is_finite() || !c.is_finite() {
            return Err(Error::Domain(format!("parameters must be finite, got a={a}, c={c}")));
        }
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("x must be positive and finite, got {x}")));
        }
        Ok(ParameterPoint { a, c, x })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn x(&self) -> f64 {
        self.x
    }

    /// (a + da, c + dc, x)
    pub fn shifted(&self, da: f64, dc: f64) -> Self {
        ParameterPoint {
            a: self.a + da,
            c: self.c + dc,
            x: self.x,
        }
    }

    pub fn with_x(&self, x: f64) -> Result<Self> {
        ParameterPoint::new(self.a, self.c, x)
    }
}

impl fmt::Display for ParameterPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(a={}, c={}, x={})", self.a, self.c, self.x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    ConnectionSeries,
    AsymptoticLargeX,
    /// ψ(a,c,x) = x^(1−c) ψ(1+a−c, 2−c, x) followed by another route
    KummerTransform,
    /// Downward recurrence in a from quadrature values
    Recurrence,
    /// Rotated-ray quadrature for complex arguments
    Contour,
    /// Power series (Kummer M)
    Series,
    /// Closed form: a = 0 or a terminating polynomial
    Exact,
    /// Combination of several kernel values
    Derived,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Quadrature => "quadrature",
            Method::ConnectionSeries => "connection_series",
            Method::AsymptoticLargeX => "asymptotic_large_x",
            Method::KummerTransform => "kummer_transform",
            Method::Recurrence => "recurrence",
            Method::Contour => "contour",
            Method::Series => "series",
            Method::Exact => "exact",
            Method::Derived => "derived",
        };
        f.write_str(s)
    }
}

/// A computed value with an estimated absolute error and the route used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionValue<T = f64> {
    pub value: T,
    pub abs_error: f64,
    pub method: Method,
}

impl<T> FunctionValue<T> {
    pub fn new(value: T, abs_error: f64, method: Method) -> Self {
        debug_assert!(abs_error >= 0.0 || abs_error.is_nan());
        FunctionValue {
            value,
            abs_error: abs_error.abs(),
            method,
        }
    }
}

impl FunctionValue<f64> {
    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            f64::INFINITY
        } else {
            self.abs_error / self.value.abs()
        }
    }
}

/// Large-x expansion ψ(a,c,x) ~ x^(−a) (1 + α₁/x + α₂/x² + …).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticSeries {
    pub a: f64,
    pub c: f64,
    /// a(c − a − 1)
    pub alpha1: f64,
    /// a(a+1)(a+1−c)(a+2−c)/2
    pub alpha2: f64,
}

impl AsymptoticSeries {
    pub fn new(a: f64, c: f64) -> Self {
        AsymptoticSeries {
            a,
            c,
            alpha1: a * (c - a - 1.0),
            alpha2: 0.5 * a * (a + 1.0) * (a + 1.0 - c) * (a + 2.0 - c),
        }
    }

    /// Coefficient of x^(−k): (a)ₖ (a−c+1)ₖ (−1)^k / k!.
    pub fn coefficient(&self, k: usize) -> f64 {
        let b = self.a - self.c + 1.0;
        (0..k).fold(1.0, |acc, j| {
            let j = j as f64;
            -acc * (self.a + j) * (b + j) / (j + 1.0)
        })
    }

    /// Truncated sum through order `order` and the first omitted term, both
    /// relative to the x^(−a) prefactor.
    pub fn partial_sum(&self, x: f64, order: usize) -> Result<(f64, f64)> {
        let mut sum = 0.0;
        let mut term = 1.0;
        let mut prev = f64::INFINITY;
        let b = self.a - self.c + 1.0;
        for k in 0..=order {
            if k > 0 {
                let j = (k - 1) as f64;
                term *= -(self.a + j) * (b + j) / ((j + 1.0) * x);
            }
            if term.abs() > prev && term != 0.0 {
                return Err(Error::AsymptoticDivergence { order });
            }
            prev = term.abs();
            sum += term;
        }
        let j = order as f64;
        let next = term * (self.a + j) * (b + j) / ((j + 1.0) * x);
        Ok((sum, next.abs()))
    }
}

/// ψ(a,c,x) by the Laplace-type integral; `tol` is a relative tolerance.
///
/// The integral is taken in the scaled variable τ = x·t,
/// `ψ = x^(−a)/Γ(a) ∫₀^∞ τ^(a−1) e^(−τ) (1 + τ/x)^(c−a−1) dτ`,
/// so the exponential cutoff sits near τ ≈ 40 for every x, with an explicit
/// breakpoint at the (1 + τ/x) transition.
pub fn psi_quadrature(p: ParameterPoint, tol: f64) -> Result<FunctionValue> {
    let (a, c, x) = (p.a, p.c, p.x);
    if !(a > 0.0) {
        return Err(Error::region("integral representation of psi", "a > 0"));
    }
    let power = c - a - 1.0;
    let g = |tau: f64| (-tau + power * (tau / x).ln_1p()).exp();
    let lo = 1e-3 * x.min(1.0);
    let hi = 64.0 + 4.0 * (a + power.abs());
    let breaks = geometric_breaks(lo, hi, 4.0, &[x]);
    let r = integrate_half_line(g, a, &breaks, true, QuadOptions::relative(tol))?;

    let lg = log_gamma(a)?;
    let log_pref = -a * x.ln() - lg.ln_abs;
    let value = log_pref.exp() * r.value;
    let rel = r.abs_error / r.value + 2.0 * f64::EPSILON * (1.0 + log_pref.abs()) + gamma_rel_error(a);
    Ok(FunctionValue::new(value, rel * value.abs(), Method::Quadrature))
}

/// ψ(a,c,z) for complex z ≠ 0 by rotating the integration ray.
///
/// With α = arg z the ray is turned by θ = −3α/4, so e^(−z·s) decays along it
/// with rate cos(α/4) ≥ cos(π/4) and the ray never meets the cut of
/// (1+s)^(c−a−1) on (−∞, −1]. Valid for a > 0 and every real c.
pub fn psi_contour(a: f64, c: f64, z: Complex64, tol: f64) -> Result<FunctionValue<Complex64>> {
    if !(a > 0.0) {
        return Err(Error::region("contour representation of psi", "a > 0"));
    }
    let r = z.norm();
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("contour evaluation needs finite z != 0, got {z}")));
    }
    let alpha = z.arg();
    let theta = -0.75 * alpha;
    let dir = Complex64::from_polar(1.0, 0.25 * alpha);
    let rot = Complex64::from_polar(1.0 / r, theta);
    let power = c - a - 1.0;
    let g = |tau: f64| {
        let log_base = (Complex64::new(1.0, 0.0) + rot * tau).ln();
        (-dir * tau + log_base * power).exp()
    };
    let decay = (0.25 * alpha).cos();
    let lo = 1e-3 * r.min(1.0);
    let hi = (64.0 + 4.0 * (a + power.abs())) / decay;
    let breaks = geometric_breaks(lo, hi, 4.0, &[r]);
    let q = integrate_half_line(g, a, &breaks, true, QuadOptions::relative(tol))?;

    let lg = log_gamma(a)?;
    let log_pref = Complex64::new(-a * r.ln() - lg.ln_abs, theta * a);
    let pref = log_pref.exp();
    let value = pref * q.value;
    let rel = q.abs_error / q.value.norm()
        + 2.0 * f64::EPSILON * (1.0 + log_pref.norm())
        + gamma_rel_error(a);
    Ok(FunctionValue::new(value, rel * value.norm(), Method::Contour))
}

/// ψ(−n, c, z) = Σₖ (−1)^(n+k) C(n,k) (c+k)_(n−k) z^k, a polynomial of degree n.
fn psi_terminating(n: u32, c: f64, z: Complex64) -> FunctionValue<Complex64> {
    let n_us = n as usize;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut binom = 1.0;
    let mut zk = Complex64::new(1.0, 0.0);
    for k in 0..=n_us {
        let poch: f64 = (0..(n_us - k)).map(|j| c + (k + j) as f64).product();
        let sign = if (n_us + k) % 2 == 0 { 1.0 } else { -1.0 };
        let term = zk * (sign * binom * poch);
        sum += term;
        abs_sum += term.norm();
        binom = binom * (n_us - k) as f64 / (k + 1) as f64;
        zk *= z;
    }
    FunctionValue::new(sum, 2.0 * (n as f64 + 2.0) * f64::EPSILON * abs_sum, Method::Exact)
}

/// Returns `Some(n)` when a = −n for a nonnegative integer n.
fn terminating_degree(a: f64) -> Option<u32> {
    if a <= 0.0 && a == a.floor() && a > -1e6 {
        Some((-a) as u32)
    } else {
        None
    }
}

/// ψ(a,c,z) through the connection formula
/// `ψ = Γ(1−c)/Γ(a−c+1)·M(a,c,z) + Γ(c−1)/Γ(a)·z^(1−c)·M(a−c+1,2−c,z)`,
/// with z^(1−c) on the principal branch. z = −t + 0i is the upper side of the
/// cut, i.e. t·e^(iπ).
pub fn psi_connection(a: f64, c: f64, z: Complex64) -> Result<FunctionValue<Complex64>> {
    if !a.is_finite() || !c.is_finite() {
        return Err(Error::Domain(format!("parameters must be finite, got a={a}, c={c}")));
    }
    if a == 0.0 {
        return Ok(FunctionValue::new(Complex64::new(1.0, 0.0), 0.0, Method::Exact));
    }
    if let Some(n) = terminating_degree(a) {
        return Ok(psi_terminating(n, c, z));
    }
    if (c - c.round()).abs() < INTEGER_C_GUARD {
        return Err(Error::IntegerC {
            c,
            guard: INTEGER_C_GUARD,
        });
    }
    if z.norm() == 0.0 {
        return Err(Error::Domain("connection formula needs z != 0".into()));
    }

    let g1 = log_gamma(1.0 - c)?;
    let coef1 = g1.sign * g1.ln_abs.exp() * recip_gamma(a - c + 1.0);
    let g2 = log_gamma(c - 1.0)?;
    let coef2 = g2.sign * g2.ln_abs.exp() * recip_gamma(a);

    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut scale = 0.0;
    if coef1 != 0.0 {
        let m1 = kummer_m(a, c, z)?;
        let t1 = m1.value * coef1;
        value += t1;
        err += coef1.abs() * m1.abs_error
            + t1.norm() * (gamma_rel_error(1.0 - c) + gamma_rel_error(a - c + 1.0));
        scale += t1.norm();
    }
    if coef2 != 0.0 {
        let log_pow = z.ln() * (1.0 - c);
        let zpow = log_pow.exp();
        let m2 = kummer_m(a - c + 1.0, 2.0 - c, z)?;
        let t2 = zpow * m2.value * coef2;
        value += t2;
        err += (coef2 * zpow).norm() * m2.abs_error
            + t2.norm()
                * (gamma_rel_error(c - 1.0) + gamma_rel_error(a) + 2.0 * f64::EPSILON * (1.0 + log_pow.norm()));
        scale += t2.norm();
    }
    err += 4.0 * f64::EPSILON * scale;
    let rel = err / value.norm();
    if !(rel <= CANCELLATION_LIMIT) {
        return Err(Error::Cancellation { relative_error: rel });
    }
    Ok(FunctionValue::new(value, err, Method::ConnectionSeries))
}

/// Real-axis connection formula value.
pub fn psi_connection_real(p: ParameterPoint) -> Result<FunctionValue> {
    let v = psi_connection(p.a, p.c, Complex64::new(p.x, 0.0))?;
    Ok(FunctionValue::new(v.value.re, v.abs_error, v.method))
}

/// Large-x series truncated after `order` correction terms; the error is the
/// magnitude of the first omitted term.
pub fn psi_asymptotic(p: ParameterPoint, order: usize) -> Result<FunctionValue> {
    let series = AsymptoticSeries::new(p.a, p.c);
    let (sum, remainder) = series.partial_sum(p.x, order)?;
    let pref = p.x.powf(-p.a);
    let value = pref * sum;
    let rounding = 2.0 * f64::EPSILON * (1.0 + (p.a * p.x.ln()).abs() + order as f64) * value.abs();
    Ok(FunctionValue::new(value, pref * remainder + rounding, Method::AsymptoticLargeX))
}

/// Large-x series summed until the next term drops below `rel_tol` of the
/// sum; fails if the terms start growing first.
pub fn psi_asymptotic_auto(p: ParameterPoint, rel_tol: f64) -> Result<FunctionValue> {
    let b = p.a - p.c + 1.0;
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    for k in 0..200usize {
        let j = k as f64;
        let next = term * -(p.a + j) * (b + j) / ((j + 1.0) * p.x);
        if next.abs() <= rel_tol * sum.abs() {
            let pref = p.x.powf(-p.a);
            let value = pref * sum;
            let rounding = 2.0 * f64::EPSILON * (2.0 + (p.a * p.x.ln()).abs() + j) * value.abs();
            return Ok(FunctionValue::new(
                value,
                pref * next.abs() + rounding,
                Method::AsymptoticLargeX,
            ));
        }
        if next.abs() > term.abs() {
            return Err(Error::AsymptoticDivergence { order: k });
        }
        sum += next;
        term = next;
    }
    Err(Error::AsymptoticDivergence { order: 200 })
}

/// Whether the large-x series is preferred for this point.
pub fn asymptotic_regime(p: ParameterPoint) -> bool {
    let s = 1.0 + p.a.abs() + p.c.abs();
    p.x > 50.0 * s * s
}

/// Method dispatcher with a configurable tolerance and optional cross-check
/// against the connection formula.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator {
    pub rel_tol: f64,
    pub cross_check: bool,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator {
            rel_tol: DEFAULT_REL_TOL,
            cross_check: false,
        }
    }
}

impl Evaluator {
    pub fn psi(&self, p: ParameterPoint) -> Result<FunctionValue> {
        let v = self.dispatch(p)?;
        if self.cross_check && v.method != Method::Exact {
            // the connection route is only a check; when it cannot run there is nothing to compare
            if let Ok(w) = psi_connection_real(p) {
                let budget = v.abs_error + w.abs_error;
                if (v.value - w.value).abs() > budget {
                    return Err(Error::Disagreement {
                        first: v.value,
                        second: w.value,
                        budget,
                    });
                }
            }
        }
        Ok(v)
    }

    fn dispatch(&self, p: ParameterPoint) -> Result<FunctionValue> {
        let (a, c, x) = (p.a, p.c, p.x);
        if a == 0.0 {
            return Ok(FunctionValue::new(1.0, 0.0, Method::Exact));
        }
        if let Some(n) = terminating_degree(a) {
            let v = psi_terminating(n, c, Complex64::new(x, 0.0));
            return Ok(FunctionValue::new(v.value.re, v.abs_error, Method::Exact));
        }
        if asymptotic_regime(p) {
            if let Ok(v) = psi_asymptotic_auto(p, 0.1 * self.rel_tol) {
                return Ok(v);
            }
        }
        if a > 0.0 {
            return psi_quadrature(p, self.rel_tol);
        }
        if 1.0 + a - c > 0.0 {
            let inner = self.dispatch(ParameterPoint::new(1.0 + a - c, 2.0 - c, x)?)?;
            let log_pow = (1.0 - c) * x.ln();
            let pow = log_pow.exp();
            let value = pow * inner.value;
            let err = pow * inner.abs_error + 2.0 * f64::EPSILON * (1.0 + log_pow.abs()) * value.abs();
            return Ok(FunctionValue::new(value, err, Method::KummerTransform));
        }
        self.recurrence(p)
    }

    /// Downward recurrence in a,
    /// ψ(b−1) = (2b + x − c) ψ(b) − b(b − c + 1) ψ(b+1),
    /// started from two values with positive first parameter.
    fn recurrence(&self, p: ParameterPoint) -> Result<FunctionValue> {
        let (a, c, x) = (p.a, p.c, p.x);
        let steps = (-a).ceil();
        let start = a + steps;
        let mut upper = self.dispatch(ParameterPoint::new(start + 1.0, c, x)?)?;
        let mut current = self.dispatch(ParameterPoint::new(start, c, x)?)?;
        let mut b = start;
        for _ in 0..(steps as usize) {
            let k1 = 2.0 * b + x - c;
            let k2 = b * (b - c + 1.0);
            let value = k1 * current.value - k2 * upper.value;
            let err = k1.abs() * current.abs_error
                + k2.abs() * upper.abs_error
                + 2.0 * f64::EPSILON * ((k1 * current.value).abs() + (k2 * upper.value).abs());
            upper = current;
            current = FunctionValue::new(value, err, Method::Recurrence);
            b -= 1.0;
        }
        Ok(FunctionValue::new(current.value, current.abs_error, Method::Recurrence))
    }

    /// ψ(a,c,z) for complex z: connection formula when c is safely
    /// non-integer, rotated-contour quadrature otherwise (a > 0).
    pub fn psi_complex(&self, a: f64, c: f64, z: Complex64) -> Result<FunctionValue<Complex64>> {
        if z.im == 0.0 && z.re > 0.0 {
            let v = self.psi(ParameterPoint::new(a, c, z.re)?)?;
            return Ok(FunctionValue::new(Complex64::new(v.value, 0.0), v.abs_error, v.method));
        }
        match psi_connection(a, c, z) {
            Ok(v) => Ok(v),
            Err(e @ (Error::IntegerC { .. } | Error::Cancellation { .. })) => {
                if a > 0.0 {
                    psi_contour(a, c, z, self.rel_tol.max(1e-13))
                } else {
                    Err(e)
                }
            }
            Err(e) => Err(e),
        }
    }
}

/// ψ(a,c,x) with the default dispatch policy.
pub fn psi(p: ParameterPoint) -> Result<FunctionValue> {
    Evaluator::default().psi(p)
}

pub fn psi_complex(a: f64, c: f64, z: Complex64) -> Result<FunctionValue<Complex64>> {
    Evaluator::default().psi_complex(a, c, z)
}

/// The x → 0 limit Γ(1−c)/Γ(a−c+1) for a > 0, c < 1.
pub fn small_x_limit(a: f64, c: f64) -> Result<f64> {
    if !(a > 0.0 && c < 1.0) {
        return Err(Error::region("small-x limit of psi", "a > 0, c < 1"));
    }
    crate::gamma::gamma_ratio(1.0 - c, a - c + 1.0)
}

/// True when the point lies on a pole of the connection coefficients.
pub fn connection_applicable(a: f64, c: f64) -> bool {
    (c - c.round()).abs() >= INTEGER_C_GUARD && !is_nonpositive_integer(a - c + 1.0) || a == 0.0
}
