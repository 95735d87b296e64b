use crate::error::{Error, Result};

pub const MAX_BISECTION: usize = 200;

/// Bisection for a monotone `f` with `f(lo)·f(hi) ≤ 0`.
///
/// Stops once `|f(x)| ≤ tol` or the bracket is narrower than `tol`.
pub fn find_root_monotone<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo * fhi < 0.0) {
        return Err(Error::Bracket { lo, hi });
    }
    let rising = flo < 0.0;
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECTION {
        mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if crate::math::abs(fm) <= tol || hi - lo <= tol {
            return Ok(mid);
        }
        if (fm < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!((find_root_monotone(|x| x - 1.0, 0.0, 2.0, 1e-14).unwrap() - 1.0).abs() < 1e-14);
        let r = find_root_monotone(|x| x * x - 2.0, 0.0, 2.0, 1e-13).unwrap();
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-10);
        assert!(matches!(
            find_root_monotone(|_| 1.0, 0.0, 1.0, 1e-12),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn decreasing_function() {
        let r = find_root_monotone(|x| 3.0 - x, 0.0, 10.0, 1e-13).unwrap();
        assert!((r - 3.0).abs() < 1e-12);
    }
}
