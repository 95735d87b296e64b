//! Unregularized incomplete Beta B_x(a, b).

use crate::error::{Error, Result};
use crate::math;

use super::quadrature;

const CF_MAX_ITER: usize = 500;
const CF_EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn complete_beta(a: f64, b: f64) -> f64 {
    math::exp(math::lgamma(a) + math::lgamma(b) - math::lgamma(a + b))
}

/// Modified Lentz evaluation of the continued fraction for I_x(a, b).
/// Returns `None` when it fails to converge.
fn beta_cf(x: f64, a: f64, b: f64) -> Option<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if math::abs(d) < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if math::abs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if math::abs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if math::abs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if math::abs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if math::abs(del - 1.0) < CF_EPS {
            return Some(h);
        }
    }
    None
}

/// Lower tail by the continued fraction, for x below the switch point.
fn lower(x: f64, a: f64, b: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    match beta_cf(x, a, b) {
        Some(cf) => Ok(math::exp(a * math::ln(x) + b * math::ln(1.0 - x)) * cf / a),
        None => by_quadrature(x, a, b),
    }
}

/// ∫₀ˣ u^{a-1}(1-u)^{b-1} du with u = s^{1/a}, which removes the u^{a-1} singularity.
fn by_quadrature(x: f64, a: f64, b: f64) -> Result<f64> {
    let top = math::pow(x, a);
    let v = quadrature::adaptive(
        |s| math::pow(1.0 - math::pow(s, 1.0 / a), b - 1.0) / a,
        0.0,
        top,
        0.0,
        1e-14,
    )?;
    Ok(v)
}

/// B_x(a, b) = ∫₀ˣ u^{a−1}(1−u)^{b−1} du.
///
/// ```
/// use legalrisk_core::special_fn::incomplete_beta;
/// assert!((incomplete_beta(0.5, 2.0, 2.0).unwrap() - 1.0 / 12.0).abs() < 1e-15);
/// ```
pub fn incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain("incomplete_beta: x outside [0, 1]"));
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain("incomplete_beta: a, b must be positive"));
    }
    if x == 1.0 {
        return Ok(complete_beta(a, b));
    }
    if x < (a + 1.0) / (a + b + 2.0) {
        lower(x, a, b)
    } else {
        Ok(complete_beta(a, b) - lower(1.0 - x, b, a)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert!((incomplete_beta(0.3, 1.0, 1.0).unwrap() - 0.3).abs() < 1e-15);
        assert!((incomplete_beta(1.0, 2.0, 5.0).unwrap() - 1.0 / 30.0).abs() < 1e-16);
        assert!((incomplete_beta(0.5, 2.0, 2.0).unwrap() - 1.0 / 12.0).abs() < 1e-16);
        assert!(incomplete_beta(1.5, 1.0, 1.0).is_err());
        assert_eq!(incomplete_beta(0.0, 2.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn matches_polynomial_antiderivative() {
        // a=3, b=4: ∫ u²(1-u)³ = u³/3 - 3u⁴/4 + 3u⁵/5 - u⁶/6
        for &x in &[0.01f64, 0.2, 0.45, 0.7, 0.99] {
            let exact = x * x * x / 3.0 - 0.75 * x.powi(4) + 0.6 * x.powi(5) - x.powi(6) / 6.0;
            let got = incomplete_beta(x, 3.0, 4.0).unwrap();
            assert!(((got - exact) / exact).abs() < 1e-12, "x={x} got={got} exact={exact}");
        }
    }

    #[test]
    fn small_a_against_quadrature() {
        for &(x, a, b) in &[(0.3, 0.2, 1.5), (0.9, 0.5, 0.7), (0.05, 0.01, 3.0)] {
            let cf = incomplete_beta(x, a, b).unwrap();
            let q = by_quadrature(x, a, b).unwrap();
            assert!(((cf - q) / q).abs() < 1e-11, "{x} {a} {b}: {cf} vs {q}");
        }
    }

    proptest! {
        #[test]
        fn reflection(x in 0.0f64..1.0, a in 0.1f64..12.0, b in 0.1f64..12.0) {
            let lhs = incomplete_beta(x, a, b).unwrap() + incomplete_beta(1.0 - x, b, a).unwrap();
            let full = complete_beta(a, b);
            prop_assert!(((lhs - full) / full).abs() < 1e-10);
        }

        #[test]
        fn monotone_in_x(x in 0.0f64..0.99, a in 0.5f64..8.0, b in 0.5f64..8.0) {
            let lo = incomplete_beta(x, a, b).unwrap();
            let hi = incomplete_beta(x + 0.01, a, b).unwrap();
            prop_assert!(hi >= lo);
        }
    }
}
