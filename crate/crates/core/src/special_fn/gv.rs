//! g_v(x) = ∫ₓ^{x̄} (Δ − C2·y^{1/p})^{pα} dy and its inverse.

use crate::error::{Error, Result};
use crate::math;

use super::beta::incomplete_beta;
use super::quadrature;
use super::roots::MAX_BISECTION;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GvParams {
    pub delta: f64,
    pub c2: f64,
    pub p: f64,
    pub alpha: f64,
}

impl GvParams {
    pub fn new(delta: f64, c2: f64, p: f64, alpha: f64) -> Result<Self> {
        if !(delta > 0.0 && c2 > 0.0 && p >= 1.0 && p.is_finite() && alpha > 1.0) {
            return Err(Error::domain(
                "GvParams: need delta > 0, c2 > 0, 1 <= p < inf, alpha > 1",
            ));
        }
        Ok(GvParams {
            delta,
            c2,
            p,
            alpha,
        })
    }

    pub fn q(&self) -> f64 {
        self.p * self.alpha
    }

    /// x̄ = (Δ/C2)^p.
    pub fn x_bar(&self) -> f64 {
        math::pow(self.delta / self.c2, self.p)
    }

    fn coef(&self) -> f64 {
        self.p * math::pow(self.delta, self.q() + self.p) / math::pow(self.c2, self.p)
    }

    /// Relative gap w = (Δ − C2·x^{1/p})/Δ, clamped to [0, 1].
    pub fn gap(&self, x: f64) -> f64 {
        let w = (self.delta - self.c2 * math::pow(x.max(0.0), 1.0 / self.p)) / self.delta;
        w.clamp(0.0, 1.0)
    }

    /// g_v as a function of the relative gap: p·Δ^{q+p}/C2^p · B_w(q+1, p).
    pub fn g_of_gap(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        self.coef() * incomplete_beta(w.min(1.0), self.q() + 1.0, self.p).unwrap_or(f64::NAN)
    }

    /// Bisection for the gap w with g_of_gap(w) = y; g_of_gap is increasing in w.
    pub fn gap_for_level(&self, y: f64) -> Result<f64> {
        let g0 = self.g_of_gap(1.0);
        if !(y >= 0.0 && y <= g0 * (1.0 + 1e-14)) {
            return Err(Error::domain("g_v_inverse: level outside [0, g_v(0)]"));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if y >= g0 {
            return Ok(1.0);
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..MAX_BISECTION {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.g_of_gap(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Beta-difference form, B₁(p, q+1) − B_u(p, q+1), evaluated as B_{1−u}(q+1, p).
pub fn g_v(x: f64, params: &GvParams) -> Result<f64> {
    let xb = params.x_bar();
    if !(x >= 0.0 && x <= xb * (1.0 + 1e-14)) {
        return Err(Error::domain("g_v: x outside [0, x_bar]"));
    }
    Ok(params.g_of_gap(params.gap(x)))
}

/// Direct adaptive quadrature of the defining integral.
pub fn g_v_direct(x: f64, params: &GvParams) -> Result<f64> {
    let xb = params.x_bar();
    if !(x >= 0.0 && x <= xb * (1.0 + 1e-14)) {
        return Err(Error::domain("g_v: x outside [0, x_bar]"));
    }
    let q = params.q();
    quadrature::adaptive(
        |y| math::pow(params.delta * params.gap(y), q),
        x.min(xb),
        xb,
        0.0,
        1e-14,
    )
}

/// x ∈ [0, x̄] with g_v(x) = y.
pub fn g_v_inverse(y: f64, params: &GvParams) -> Result<f64> {
    let w = params.gap_for_level(y)?;
    Ok(params.x_bar() * math::pow(1.0 - w, params.p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig1() -> GvParams {
        GvParams::new(3.0 - math::exp(0.5), 1.0, 2.0, 2.0).unwrap()
    }

    #[test]
    fn g0_reduces_to_power_of_delta() {
        let p = fig1();
        let g0 = g_v(0.0, &p).unwrap();
        let expect = p.delta.powi(6) / 15.0;
        assert!(((g0 - expect) / expect).abs() < 1e-13);
        assert!((g0 - 0.40587).abs() < 1e-4);
        let direct = g_v_direct(0.0, &p).unwrap();
        assert!(((g0 - direct) / direct).abs() < 1e-12);
    }

    #[test]
    fn endpoints_and_monotonicity() {
        let p = fig1();
        let xb = p.x_bar();
        assert_eq!(g_v(xb, &p).unwrap(), 0.0);
        assert!(g_v(0.0, &p).unwrap() > g_v(xb / 2.0, &p).unwrap());
        assert!(g_v(xb / 2.0, &p).unwrap() > 0.0);
        assert!(g_v(1.01 * xb, &p).is_err());
        assert_eq!(g_v_inverse(g_v(0.0, &p).unwrap(), &p).unwrap(), 0.0);
        assert_eq!(g_v_inverse(0.0, &p).unwrap(), xb);
    }

    #[test]
    fn round_trip_half_level() {
        let p = fig1();
        let g0 = g_v(0.0, &p).unwrap();
        let x = g_v_inverse(0.5 * g0, &p).unwrap();
        assert!((g_v(x, &p).unwrap() - 0.5 * g0).abs() <= 1e-12 * g0.max(1.0));
    }

    proptest! {
        #[test]
        fn beta_form_matches_direct(
            delta in 0.2f64..3.0, c2 in 0.5f64..3.0, p in 1.0f64..6.0,
            alpha in 1.05f64..3.0, frac in 0.0f64..0.97,
        ) {
            let gp = GvParams::new(delta, c2, p, alpha).unwrap();
            let x = frac * gp.x_bar();
            let a = g_v(x, &gp).unwrap();
            let b = g_v_direct(x, &gp).unwrap();
            prop_assert!(((a - b) / b).abs() < 1e-10, "{a} vs {b}");
        }

        #[test]
        fn inverse_round_trip(
            delta in 0.2f64..3.0, c2 in 0.5f64..3.0, p in 1.0f64..6.0,
            alpha in 1.05f64..3.0, frac in 0.0f64..1.0,
        ) {
            let gp = GvParams::new(delta, c2, p, alpha).unwrap();
            let x = frac * gp.x_bar();
            let back = g_v_inverse(g_v(x, &gp).unwrap(), &gp).unwrap();
            prop_assert!((back - x).abs() <= 1e-9 * gp.x_bar().max(1.0));
        }
    }
}
