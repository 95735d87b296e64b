//! Dormand–Prince 5(4) with adaptive steps.

use crate::math;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One step of size h; returns (5th-order solution, error estimate per component).
pub(crate) fn step<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]>(
    f: &F,
    s: f64,
    y: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N]) {
    let mut k = [[0.0; N]; 7];
    k[0] = f(s, y);
    for i in 1..7 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(i) {
            let a = A[i][j];
            if a != 0.0 {
                for n in 0..N {
                    yi[n] += h * a * kj[n];
                }
            }
        }
        k[i] = f(s + C[i] * h, &yi);
    }
    let mut y5 = *y;
    let mut err = [0.0; N];
    for i in 0..7 {
        for n in 0..N {
            y5[n] += h * B5[i] * k[i][n];
            err[n] += h * (B5[i] - B4[i]) * k[i][n];
        }
    }
    (y5, err)
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stop {
    Reached,
    Event,
    StepFloor,
    TooManySteps,
    NonFinite,
}

/// Integrates from s0 to s_end, calling `accept` after each accepted step with the
/// new (s, y). `accept` returns false to stop early.
pub(crate) fn integrate<const N: usize, F, G>(
    f: &F,
    s0: f64,
    y0: [f64; N],
    s_end: f64,
    h0: f64,
    tol: Tolerance,
    mut accept: G,
) -> Stop
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    G: FnMut(f64, &[f64; N]) -> bool,
{
    let (mut s, mut y, mut h) = (s0, y0, h0);
    let mut steps = 0;
    while s < s_end {
        if steps >= tol.max_steps {
            return Stop::TooManySteps;
        }
        if s + h > s_end {
            h = s_end - s;
        }
        let (y5, err) = step(f, s, &y, h);
        let mut ratio = 0.0f64;
        let mut finite = true;
        for n in 0..N {
            if !y5[n].is_finite() {
                finite = false;
            }
            let sc = tol.atol + tol.rtol * math::abs(y[n]).max(math::abs(y5[n]));
            ratio = ratio.max(math::abs(err[n]) / sc);
        }
        if !finite {
            ratio = f64::INFINITY;
        }
        if ratio <= 1.0 {
            s += h;
            y = y5;
            steps += 1;
            if !accept(s, &y) {
                return Stop::Event;
            }
            let grow = if ratio == 0.0 { 5.0 } else { (0.9 * math::pow(ratio, -0.2)).min(5.0) };
            h *= grow;
        } else {
            let shrink = if ratio.is_finite() { (0.9 * math::pow(ratio, -0.25)).max(0.1) } else { 0.1 };
            h *= shrink;
            if h < tol.h_min {
                return if finite { Stop::StepFloor } else { Stop::NonFinite };
            }
        }
    }
    Stop::Reached
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let f = |_s: f64, y: &[f64; 1]| [y[0]];
        let mut last = [0.0];
        let tol = Tolerance { rtol: 1e-12, atol: 1e-14, h_min: 1e-14, max_steps: 10_000 };
        let stop = integrate(&f, 0.0, [1.0], 2.0, 1e-3, tol, |_, y| {
            last = *y;
            true
        });
        assert_eq!(stop, Stop::Reached);
        assert!((last[0] - 2.0f64.exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator() {
        let f = |_s: f64, y: &[f64; 2]| [y[1], -y[0]];
        let mut last = [0.0; 2];
        let tol = Tolerance { rtol: 1e-11, atol: 1e-13, h_min: 1e-14, max_steps: 100_000 };
        integrate(&f, 0.0, [0.0, 1.0], 10.0, 0.01, tol, |_, y| {
            last = *y;
            true
        });
        assert!((last[0] - 10.0f64.sin()).abs() < 1e-9);
    }
}
