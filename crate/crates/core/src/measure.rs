//! The weight density
//! `φ(t) = t^(−c) e^(−t) |ψ(a,c,t·e^(iπ))|^(−2) / (Γ(a+1) Γ(a−c+1))`
//! on t > 0, its moments, and the integral representations of the both-shift
//! and first-shift Turánian ratios built on it.
//!
//! All integrals over φ are truncated at a point T chosen so that the
//! analytic tail bound `2 f(T)·T/(T − q)` is below a tenth of the tolerance,
//! where `f(t) ~ t^q e^(−t)` is the integrand's large-t behaviour
//! (|ψ(a,c,−t)|^(−2) grows like t^(2a)).

use crate::error::{Error, Result};
use crate::gamma::log_gamma;
use crate::kernel::{Evaluator, FunctionValue, Method};
use crate::quadrature::{geometric_breaks, integrate_half_line, QuadOptions};
use num_complex::Complex64;
use serde::Serialize;
use std::cell::Cell;

/// Largest truncation point for integrals over φ.
pub const MAX_TRUNCATION: f64 = 600.0;

#[derive(Debug, Clone, Copy)]
pub struct WeightDensity {
    a: f64,
    c: f64,
    /// −log(Γ(a+1) Γ(a−c+1))
    log_prefactor: f64,
    evaluator: Evaluator,
}

impl WeightDensity {
    pub fn new(a: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && c < 1.0) {
            return Err(Error::region("weight density", "a > 0, c < 1"));
        }
        let g1 = log_gamma(a + 1.0)?;
        let g2 = log_gamma(a - c + 1.0)?;
        Ok(WeightDensity {
            a,
            c,
            log_prefactor: -(g1.ln_abs + g2.ln_abs),
            evaluator: Evaluator {
                rel_tol: 1e-12,
                cross_check: false,
            },
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn prefactor(&self) -> f64 {
        self.log_prefactor.exp()
    }

    /// e^(−t)·prefactor/|ψ(a,c,−t)|², i.e. φ(t)·t^c, with its relative error.
    fn reduced(&self, t: f64) -> Result<(f64, f64)> {
        let psi = self.evaluator.psi_complex(self.a, self.c, Complex64::new(-t, 0.0))?;
        let m = psi.value.norm();
        if !(psi.abs_error < m) {
            return Err(Error::ZeroDenominator);
        }
        let log_v = self.log_prefactor - t;
        let rel_psi = psi.abs_error / m;
        let rel = 2.0 * rel_psi + 3.0 * rel_psi * rel_psi + 4.0 * f64::EPSILON * (1.0 + log_v.abs());
        Ok((log_v.exp() / (m * m), rel))
    }

    pub fn phi(&self, t: f64) -> Result<FunctionValue> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("density needs t > 0, got {t}")));
        }
        let (r, rel) = self.reduced(t)?;
        let value = r * (-self.c * t.ln()).exp();
        Ok(FunctionValue::new(
            value,
            value * (rel + 2.0 * f64::EPSILON * (1.0 + (self.c * t.ln()).abs())),
            Method::Derived,
        ))
    }

    /// ∫₀^∞ t^(β−1) e^(−t) w(t) prefactor/|ψ(a,c,−t)|² dt with w bounded and
    /// nonincreasing for large t; `q` is the large-t exponent of the full
    /// integrand (t^q e^(−t)).
    fn integral<W: Fn(f64) -> f64>(&self, beta: f64, w: W, q: f64, extra: &[f64], tol: f64) -> Result<FunctionValue> {
        let failure: Cell<Option<Error>> = Cell::new(None);
        let worst_rel = Cell::new(0.0f64);
        let g = |t: f64| -> f64 {
            match self.reduced(t) {
                Ok((r, rel)) => {
                    worst_rel.set(worst_rel.get().max(rel));
                    r * w(t)
                }
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        };
        let full = |t: f64| g(t) * ((beta - 1.0) * t.ln()).exp();

        // choose T from the tail bound 2 f(T) T/(T − q) < tol/10
        let mut upper = (2.0 * q.max(0.0) + 40.0).min(MAX_TRUNCATION);
        let tail = |t: f64| 2.0 * full(t).abs() * t / (t - q).max(1.0);
        while tail(upper) >= 0.1 * tol && upper < MAX_TRUNCATION {
            upper = (upper * 1.25).min(MAX_TRUNCATION);
        }
        let tail_bound = tail(upper);
        if let Some(e) = failure.take() {
            return Err(e);
        }

        let mut points: Vec<f64> = extra.iter().copied().filter(|&p| p > 1e-3 && p < upper).collect();
        let q_peak = q.max(0.0);
        if q_peak > 1e-3 && q_peak < upper {
            points.push(q_peak);
        }
        let breaks = geometric_breaks(1e-3, upper, 4.0, &points);
        let r = integrate_half_line(g, beta, &breaks, false, QuadOptions::absolute(0.5 * tol, 0.0))?;
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let err = r.abs_error + tail_bound + worst_rel.get() * r.abs_integral;
        Ok(FunctionValue::new(r.value, err, Method::Quadrature))
    }

    /// ∫₀^∞ t^power φ(t) dt for power ∈ {−2, −1, 0, 1}, each inside the
    /// region where its closed form holds.
    pub fn moment(&self, power: i32, tol: f64) -> Result<FunctionValue> {
        let identity = MomentIdentity::for_power(power)?;
        if !identity.in_region(self.a, self.c) {
            return Err(Error::region(format!("moment of power {power}"), identity.region()));
        }
        let p = power as f64;
        let beta = p - self.c + 1.0;
        let q = 2.0 * self.a - self.c + p;
        self.integral(beta, |_| 1.0, q, &[], tol)
    }

    /// −∫₀^∞ tφ(t)/(x+t)² dt, which equals Δ_{a,c}/ψ².
    pub fn stieltjes_ratio(&self, x: f64, tol: f64) -> Result<FunctionValue> {
        check_x(x)?;
        let beta = 2.0 - self.c;
        let q = 2.0 * self.a - self.c + 1.0;
        let v = self.integral(beta, |t| 1.0 / ((x + t) * (x + t)), q, &[x], tol)?;
        Ok(FunctionValue::new(-v.value, v.abs_error, v.method))
    }

    /// (1 − ∫₀^∞ x²φ(t)/(x+t)² dt)/(1 + a − c), which equals Δ_a/ψ².
    pub fn stieltjes_first_shift(&self, x: f64, tol: f64) -> Result<FunctionValue> {
        check_x(x)?;
        let beta = 1.0 - self.c;
        let q = 2.0 * self.a - self.c;
        let xx = x * x;
        let v = self.integral(beta, |t| xx / ((x + t) * (x + t)), q, &[x], tol)?;
        let s = 1.0 + self.a - self.c;
        let value = (1.0 - v.value) / s;
        let err = (v.abs_error + 2.0 * f64::EPSILON * (1.0 + v.value.abs())) / s;
        Ok(FunctionValue::new(value, err, v.method))
    }
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x must be positive and finite, got {x}")));
    }
    Ok(())
}

/// Closed forms of the moments ∫ t^power φ(t) dt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MomentIdentity {
    pub power: i32,
}

impl MomentIdentity {
    pub const POWERS: [i32; 4] = [-2, -1, 0, 1];

    pub fn for_power(power: i32) -> Result<Self> {
        if MomentIdentity::POWERS.contains(&power) {
            Ok(MomentIdentity { power })
        } else {
            Err(Error::Domain(format!("no moment identity for power {power}")))
        }
    }

    pub fn id(&self) -> &'static str {
        match self.power {
            -2 => "M-2",
            -1 => "M-1",
            0 => "M0",
            _ => "M1",
        }
    }

    pub fn closed_form(&self, a: f64, c: f64) -> f64 {
        match self.power {
            -2 => (c - a) / (c * c * (c + 1.0)),
            -1 => -1.0 / c,
            0 => 1.0,
            _ => 1.0 + a - c,
        }
    }

    pub fn region(&self) -> &'static str {
        match self.power {
            -2 => "a > 1, c < -1",
            -1 => "a > 0 > c",
            _ => "a > 0, c < 1",
        }
    }

    pub fn in_region(&self, a: f64, c: f64) -> bool {
        match self.power {
            -2 => a > 1.0 && c < -1.0,
            -1 => a > 0.0 && c < 0.0,
            _ => a > 0.0 && c < 1.0,
        }
    }
}

pub fn phi(d: &WeightDensity, t: f64) -> Result<FunctionValue> {
    d.phi(t)
}

pub fn phi_moment(d: &WeightDensity, power: i32, tol: f64) -> Result<FunctionValue> {
    d.moment(power, tol)
}

pub fn stieltjes_ratio(d: &WeightDensity, x: f64, tol: f64) -> Result<FunctionValue> {
    d.stieltjes_ratio(x, tol)
}

pub fn stieltjes_first_shift(d: &WeightDensity, x: f64, tol: f64) -> Result<FunctionValue> {
    d.stieltjes_first_shift(x, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn region_is_enforced() {
        assert!(WeightDensity::new(0.0, -1.0).is_err());
        assert!(WeightDensity::new(1.0, 1.0).is_err());
        let d = WeightDensity::new(0.5, -0.5).unwrap();
        assert!(matches!(d.moment(-2, 1e-8), Err(Error::Region { .. })));
        assert!(matches!(d.moment(3, 1e-8), Err(Error::Domain(_))));
        let d = WeightDensity::new(1.0, 0.5).unwrap();
        assert!(matches!(d.moment(-1, 1e-8), Err(Error::Region { .. })));
    }

    #[test]
    fn moments_of_reference_pair() {
        let d = WeightDensity::new(2.0, -2.0).unwrap();
        for (power, expected) in [(0, 1.0), (1, 5.0), (-1, 0.5), (-2, 1.0)] {
            let m = d.moment(power, 1e-9).unwrap();
            assert!((m.value - expected).abs() < 1e-7, "power {power}: {}", m.value);
            assert!(m.abs_error < 1e-7);
        }
    }

    #[test]
    fn reference_moments() {
        let d = WeightDensity::new(3.0, -1.5).unwrap();
        assert!((d.moment(1, 1e-9).unwrap().value - 5.5).abs() < 1e-7);
        assert!((d.moment(-2, 1e-9).unwrap().value - 4.0).abs() < 1e-7);
        let d = WeightDensity::new(0.5, -0.5).unwrap();
        assert!((d.moment(-1, 1e-9).unwrap().value - 2.0).abs() < 1e-7);
    }

    #[test]
    fn integer_c_density_uses_contour_values() {
        let d = WeightDensity::new(2.0, -5.0).unwrap();
        let m = d.moment(0, 1e-9).unwrap();
        assert!((m.value - 1.0).abs() < 1e-7, "{}", m.value);
    }

    #[test]
    fn stieltjes_matches_reference_ratio() {
        let d = WeightDensity::new(2.0, -2.0).unwrap();
        for (x, expected) in [
            (0.1, -0.387_505_314_415_565_81),
            (1.0, -0.159_869_210_162_378_397),
            (10.0, -0.018_197_705_336_670_358_9),
        ] {
            let v = d.stieltjes_ratio(x, 1e-10).unwrap();
            assert!((v.value - expected).abs() < 1e-8, "x={x}: {}", v.value);
            assert!(v.value > -0.5 / x && v.value < 0.0);
        }
    }

    #[test]
    fn first_shift_bracket() {
        let d = WeightDensity::new(2.0, -1.0).unwrap();
        let upper = 1.0 / 4.0;
        let mut prev = f64::INFINITY;
        for x in [1e-2, 1e-1, 1.0, 10.0] {
            let v = d.stieltjes_first_shift(x, 1e-10).unwrap();
            assert!(v.value > 0.0 && v.value < upper, "x={x}: {}", v.value);
            assert!(v.value < prev);
            prev = v.value;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn density_is_nonnegative(a in 0.1f64..5.0, c in -5.0f64..0.95, t in 1e-4f64..80.0) {
            let d = WeightDensity::new(a, c).unwrap();
            let v = d.phi(t).unwrap();
            prop_assert!(v.value >= 0.0);
            prop_assert!(v.abs_error <= 1e-8 * v.value + 1e-300);
        }
    }
}
