//! Kummer's confluent hypergeometric function M(a, c, z) = ₁F₁(a; c; z).
//!
//! Direct power series for Re z ≥ 0; for Re z < 0 the Kummer transformation
//! M(a, c, z) = e^z M(c − a, c, −z) is applied first so the summed series has
//! (eventually) same-signed terms.

use crate::error::{Error, Result};
use crate::gamma::is_nonpositive_integer;
use crate::kernel::{FunctionValue, Method};
use crate::scalar::Scalar;
use num_complex::Complex64;

pub const MAX_TERMS: usize = 10_000;

/// Power series with stopping rule "two consecutive term magnitudes below
/// tol·|partial sum|". Returns the sum and an absolute error estimate
/// (truncation tail plus accumulated rounding).
pub(crate) fn series<T: Scalar>(a: f64, c: f64, z: T, tol: f64) -> Result<(T, f64)> {
    let zm = z.modulus();
    let mut term = T::from_real(1.0);
    let mut sum = term;
    let mut abs_sum = 1.0;
    let mut weighted_abs = 1.0;
    let mut small_run = 0;

    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let factor = (a + nf) / ((c + nf) * (nf + 1.0));
        term = term * z * factor;
        sum = sum + term;
        let tm = term.modulus();
        abs_sum += tm;
        weighted_abs += (nf + 2.0) * tm;

        if tm == 0.0 {
            // terminating series (a a nonpositive integer)
            return Ok((sum, 2.0 * f64::EPSILON * weighted_abs));
        }
        let small = tm < tol * sum.modulus() || tm < 1e-3 * f64::EPSILON * abs_sum;
        small_run = if small { small_run + 1 } else { 0 };
        if small_run >= 2 {
            let next = ((a + nf + 1.0) / ((c + nf + 1.0) * (nf + 2.0))).abs() * zm;
            let tail = if next < 1.0 { tm * next / (1.0 - next) } else { tm };
            if !sum.is_finite() {
                return Err(Error::Domain("Kummer series overflowed".into()));
            }
            return Ok((sum, tail + 2.0 * f64::EPSILON * weighted_abs));
        }
    }
    Err(Error::SeriesNonConvergence { terms: MAX_TERMS })
}

fn check_c(c: f64) -> Result<()> {
    if is_nonpositive_integer(c) {
        return Err(Error::ParameterPole { name: "c", value: c });
    }
    if !c.is_finite() {
        return Err(Error::Domain(format!("c = {c}")));
    }
    Ok(())
}

/// M(a, c, z) for complex z, summed to relative tolerance `tol`.
pub fn kummer_m_tol(a: f64, c: f64, z: Complex64, tol: f64) -> Result<FunctionValue<Complex64>> {
    check_c(c)?;
    if z.re < 0.0 {
        let (s, err) = series(c - a, c, -z, tol)?;
        let ez = z.exp();
        let value = ez * s;
        return Ok(FunctionValue::new(
            value,
            ez.norm() * err + 2.0 * f64::EPSILON * (1.0 + z.norm()) * value.norm(),
            Method::Series,
        ));
    }
    let (value, err) = series(a, c, z, tol)?;
    Ok(FunctionValue::new(value, err, Method::Series))
}

pub fn kummer_m(a: f64, c: f64, z: Complex64) -> Result<FunctionValue<Complex64>> {
    kummer_m_tol(a, c, z, f64::EPSILON)
}

/// Real-argument M(a, c, x).
pub fn kummer_m_real(a: f64, c: f64, x: f64) -> Result<FunctionValue> {
    check_c(c)?;
    if x < 0.0 {
        let (s, err) = series(c - a, c, -x, f64::EPSILON)?;
        let ex = x.exp();
        let value = ex * s;
        return Ok(FunctionValue::new(
            value,
            ex * err + 2.0 * f64::EPSILON * (1.0 + x.abs()) * value.abs(),
            Method::Series,
        ));
    }
    let (value, err) = series(a, c, x, f64::EPSILON)?;
    Ok(FunctionValue::new(value, err, Method::Series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_argument_gives_one() {
        for (a, c) in [(1.0, 1.0), (-2.5, 0.3), (7.0, -3.5)] {
            let m = kummer_m(a, c, c64(0.0, 0.0)).unwrap();
            assert_eq!(m.value, c64(1.0, 0.0));
        }
    }

    #[test]
    fn elementary_closed_forms() {
        // M(1,1,z) = e^z, M(1,2,z) = (e^z − 1)/z; oracle values by direct summation
        let m = kummer_m_real(1.0, 1.0, 1.0).unwrap();
        assert!((m.value - E).abs() < 4e-16 * E);
        let m = kummer_m_real(1.0, 2.0, 1.0).unwrap();
        assert!((m.value - (E - 1.0)).abs() < 4e-16 * E);
        let m = kummer_m_real(1.0, 1.0, -3.0).unwrap();
        assert!((m.value - (-3.0f64).exp()).abs() < 1e-15 * (-3.0f64).exp());
    }

    #[test]
    fn frozen_reference_values() {
        // 30-digit reference evaluations
        let cases = [
            (0.7, -2.5, c64(3.0, 2.0), c64(493.394_096_262_623_323_77, 541.105_602_830_480_369_37)),
            (2.3, 1.5, c64(-20.0, 0.0), c64(-0.000_200_376_750_221_387_403_9, 0.0)),
            (-3.0, 0.5, c64(4.0, 0.0), c64(6.866_666_666_666_666_666_7, 0.0)),
            (0.5, -1.5, c64(-6.0, 1.0), c64(0.110_706_836_374_585_449_56, 0.092_895_315_002_514_043_846)),
            (1.5, 0.25, c64(-30.0, 0.0), c64(0.006_363_432_609_921_855_910_7, 0.0)),
        ];
        for (a, c, z, expected) in cases {
            let m = kummer_m(a, c, z).unwrap();
            let diff = (m.value - expected).norm();
            assert!(diff < 1e-12 * expected.norm(), "M({a},{c},{z}) = {} vs {expected}", m.value);
            assert!(diff <= m.abs_error.max(1e-15 * expected.norm()) * 10.0);
        }
    }

    #[test]
    fn pole_in_c_is_rejected() {
        assert!(matches!(
            kummer_m(1.0, -2.0, c64(1.0, 0.0)),
            Err(Error::ParameterPole { name: "c", .. })
        ));
    }

    proptest! {
        #[test]
        fn kummer_transformation_is_consistent(
            a in -3.0f64..4.0, c in 0.2f64..5.0, re in 0.0f64..8.0, im in -4.0f64..4.0
        ) {
            // summing the raw series directly against the transformed route
            let z = c64(re, im);
            let direct = kummer_m(a, c, z).unwrap();
            let (s, err) = series(c - a, c, -z, f64::EPSILON).unwrap();
            let via = z.exp() * s;
            let budget = direct.abs_error + z.exp().norm() * err;
            prop_assert!((direct.value - via).norm() <= 50.0 * budget + 1e-13 * direct.value.norm());
        }
    }
}
