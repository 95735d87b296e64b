//! Two-parameter shooting for the p > 1, b > 0 linear-penalty scenario.
//!
//! The BVP in the state variable x is
//! h'' = ((p−1)/(pς))·e^{−κx}·h^{1/p−1}·(h')^{(2p−1)/(p−1)}, h(0) = 0, h'(0) = χ,
//! with H' = (h')^{−1/(p−1)} giving time. h' explodes at a finite x̄. We integrate in
//! s = ln h', where every right-hand side decays as h' grows, so the explosion is
//! reached in finite s without step collapse.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

use super::ode::{self, Stop, Tolerance};

/// h' at which x̄ is declared.
pub const BLOWUP_CAP: f64 = 1e10;
const MAX_NEWTON: usize = 60;
const TARGET: f64 = 1e-12;
const ACCEPT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingProblem {
    /// |v − E[V]|.
    pub delta: f64,
    pub kappa: f64,
    pub c1: f64,
    pub b: f64,
    pub c: f64,
    pub p: f64,
    pub horizon: f64,
}

impl ShootingProblem {
    /// x̄ of the p = 1 degenerate case, used for scaling and the initial guess.
    pub fn x_scale(&self) -> f64 {
        self.delta / (self.kappa * self.c1 * (self.b + self.c * self.delta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub x: f64,
    pub h: f64,
    pub hp: f64,
    pub big_h: f64,
    /// ∫₀ˣ e^{−κy} h^{1/p−1} dy.
    pub g: f64,
}

#[derive(Debug, Clone)]
pub struct ShootingState {
    pub chi: f64,
    pub varsigma: f64,
    pub x_bar: f64,
    pub h_bar: f64,
    /// H(x̄) including the asymptotic tail.
    pub h_total: f64,
    pub g_bar: f64,
    /// u ≈ K(x̄ − x)^{−(p−1)/p} near the explosion.
    pub k_tail: f64,
    pub trace: Vec<TracePoint>,
    pub r_transversality: f64,
    pub r_time: f64,
    pub iterations: usize,
    problem: ShootingProblem,
    s_trace: Vec<f64>,
}

type State = [f64; 4];

fn rhs(prob: &ShootingProblem, vs: f64) -> impl Fn(f64, &State) -> State + '_ {
    let p = prob.p;
    let a = (p - 1.0) / (p * vs);
    move |s: f64, y: &State| {
        let u = math::exp(s);
        let (x, h) = (y[0], y[1].max(1e-300));
        let w = math::pow(u, -p / (p - 1.0));
        let dx = math::exp(prob.kappa * x) * math::pow(h, 1.0 - 1.0 / p) * w / a;
        [dx, u * dx, math::pow(u, -1.0 / (p - 1.0)) * dx, w / a]
    }
}

fn tolerance() -> Tolerance {
    Tolerance {
        rtol: 1e-12,
        atol: 1e-300,
        h_min: 1e-13,
        max_steps: 200_000,
    }
}

struct Flight {
    s: Vec<f64>,
    y: Vec<State>,
    x_bar: f64,
    h_bar: f64,
    h_total: f64,
    g_bar: f64,
    k_tail: f64,
}

fn fly(prob: &ShootingProblem, chi: f64, vs: f64) -> Option<Flight> {
    if !(chi > 0.0 && vs > 0.0 && chi.is_finite() && vs.is_finite()) {
        return None;
    }
    let p = prob.p;
    let x_scale = prob.x_scale();
    let x0 = 1e-8 * x_scale;
    let r = (2.0 * p - 1.0) / (p - 1.0);
    let a = (p - 1.0) / (p * vs) * math::pow(chi, 1.0 / p - 1.0 + r);
    let x0p = math::pow(x0, 1.0 / p);
    let u0 = chi + a * p * x0p;
    let y0: State = [
        x0,
        chi * x0 + a * p * x0 * x0p / (1.0 + 1.0 / p),
        math::pow(chi, -1.0 / (p - 1.0)) * x0,
        math::pow(chi, 1.0 / p - 1.0) * p * x0p,
    ];
    let s0 = math::ln(u0);
    let s_end = math::ln(BLOWUP_CAP);
    if !(s0 < s_end) {
        return None;
    }
    let f = rhs(prob, vs);
    let mut s_tr = Vec::with_capacity(512);
    let mut y_tr = Vec::with_capacity(512);
    s_tr.push(s0);
    y_tr.push(y0);
    let x_limit = 1e3 * x_scale;
    let t_limit = 1e6 * prob.horizon;
    let stop = ode::integrate(&f, s0, y0, s_end, 1e-3, tolerance(), |s, y| {
        s_tr.push(s);
        y_tr.push(*y);
        y[0] < x_limit && y[2] < t_limit
    });
    if stop != Stop::Reached {
        return None;
    }
    let y = *y_tr.last()?;
    let u = BLOWUP_CAP;
    let (x, h) = (y[0], y[1]);
    // local linear fit of u^{−p/(p−1)} in x: value w, slope −e^{−κx}h^{1/p−1}/ς
    let rem = vs * math::pow(u, -p / (p - 1.0)) * math::exp(prob.kappa * x) * math::pow(h, 1.0 - 1.0 / p);
    let k_tail = u * math::pow(rem, (p - 1.0) / p);
    let x_bar = x + rem;
    let h_bar = h + k_tail * p * math::pow(rem, 1.0 / p);
    let h_total = y[2] + math::pow(k_tail, -1.0 / (p - 1.0)) * p / (p + 1.0) * math::pow(rem, (p + 1.0) / p);
    let g_bar = y[3] + math::exp(-prob.kappa * x) * math::pow(h, 1.0 / p - 1.0) * rem;
    Some(Flight {
        s: s_tr,
        y: y_tr,
        x_bar,
        h_bar,
        h_total,
        g_bar,
        k_tail,
    })
}

fn residuals(prob: &ShootingProblem, fl: &Flight) -> [f64; 2] {
    let r1 = prob.delta
        - prob.kappa * prob.c1 * (prob.b * math::pow(fl.h_bar, 1.0 / prob.p) + prob.c * prob.delta * fl.x_bar);
    [r1, fl.h_total - prob.horizon]
}

fn eval(prob: &ShootingProblem, z: [f64; 2]) -> Option<([f64; 2], Flight)> {
    let fl = fly(prob, math::exp(z[0]), math::exp(z[1]))?;
    let r = residuals(prob, &fl);
    if r[0].is_finite() && r[1].is_finite() {
        Some((r, fl))
    } else {
        None
    }
}

fn norm(r: [f64; 2]) -> f64 {
    math::abs(r[0]).max(math::abs(r[1]))
}

/// Solves for (χ, ς) by damped Newton in (ln χ, ln ς) with a forward-difference
/// Jacobian, started from the best point of a coarse scan around the p → 1 guess.
pub fn shoot(prob: &ShootingProblem) -> Result<ShootingState> {
    let p = prob.p;
    if !(p > 1.0 && p.is_finite() && prob.b > 0.0 && prob.delta > 0.0 && prob.kappa > 0.0 && prob.c1 > 0.0) {
        return Err(Error::validity("shooting needs p > 1, b > 0, kappa > 0, C1 > 0, v != E[V]"));
    }
    let xd = prob.x_scale();
    let chi0 = math::pow(xd / prob.horizon, p - 1.0);
    let vs0 = math::pow(chi0, p / (p - 1.0) + 1.0 / p - 1.0) * p * math::pow(xd, 1.0 / p);
    let mut best: Option<([f64; 2], [f64; 2])> = None;
    for i in -6..=3 {
        for j in -8..=3 {
            let z = [math::ln(chi0) + 0.7 * i as f64, math::ln(vs0) + 0.7 * j as f64];
            if let Some((r, _)) = eval(prob, z) {
                if best.map_or(true, |(_, rb)| norm(r) < norm(rb)) {
                    best = Some((z, r));
                }
            }
        }
    }
    let (mut z, mut r) = best.ok_or(Error::ShootingDivergence {
        iterations: 0,
        r_transversality: f64::NAN,
        r_time: f64::NAN,
    })?;
    let mut iterations = 0;
    while iterations < MAX_NEWTON && norm(r) > TARGET {
        iterations += 1;
        let mut jac = [[0.0; 2]; 2];
        let mut ok = true;
        for k in 0..2 {
            let step = 1e-6;
            let mut zk = z;
            zk[k] += step;
            match eval(prob, zk) {
                Some((rk, _)) => {
                    jac[0][k] = (rk[0] - r[0]) / step;
                    jac[1][k] = (rk[1] - r[1]) / step;
                }
                None => ok = false,
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if !ok || det == 0.0 || !det.is_finite() {
            break;
        }
        let dz = [
            -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
        ];
        let mut lam = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let trial = [z[0] + lam * dz[0], z[1] + lam * dz[1]];
            if let Some((rt, _)) = eval(prob, trial) {
                if norm(rt) < norm(r) {
                    z = trial;
                    r = rt;
                    moved = true;
                    break;
                }
            }
            lam *= 0.5;
        }
        if !moved {
            break;
        }
    }
    if norm(r) > ACCEPT {
        return Err(Error::ShootingDivergence {
            iterations,
            r_transversality: r[0],
            r_time: r[1],
        });
    }
    let (r, fl) = eval(prob, z).ok_or(Error::ShootingDivergence {
        iterations,
        r_transversality: r[0],
        r_time: r[1],
    })?;
    let trace = fl
        .s
        .iter()
        .zip(&fl.y)
        .map(|(s, y)| TracePoint {
            x: y[0],
            h: y[1],
            hp: math::exp(*s),
            big_h: y[2],
            g: y[3],
        })
        .collect();
    Ok(ShootingState {
        chi: math::exp(z[0]),
        varsigma: math::exp(z[1]),
        x_bar: fl.x_bar,
        h_bar: fl.h_bar,
        h_total: fl.h_total,
        g_bar: fl.g_bar,
        k_tail: fl.k_tail,
        trace,
        r_transversality: r[0],
        r_time: r[1],
        iterations,
        problem: *prob,
        s_trace: fl.s,
    })
}

impl ShootingState {
    /// h'(H⁻¹(t)) for t in [0, T); +∞ at or past T. The clock is rescaled by
    /// H(x̄)/T so the explosion lands exactly on the horizon.
    pub fn hp_at_time(&self, t: f64) -> f64 {
        let p = self.problem.p;
        if t >= self.problem.horizon {
            return f64::INFINITY;
        }
        let t = t * self.h_total / self.problem.horizon;
        let first = &self.trace[0];
        if t <= first.big_h {
            return first.hp;
        }
        let last = &self.trace[self.trace.len() - 1];
        if t >= self.h_total {
            return f64::INFINITY;
        }
        if t >= last.big_h {
            // remaining time = K^{−1/(p−1)}·p/(p+1)·rem^{(p+1)/p}
            let left = self.h_total - t;
            let rem = math::pow(
                left * (p + 1.0) / (p * math::pow(self.k_tail, -1.0 / (p - 1.0))),
                p / (p + 1.0),
            );
            return self.k_tail * math::pow(rem, -(p - 1.0) / p);
        }
        let k = self.trace.partition_point(|tp| tp.big_h <= t) - 1;
        let tp = &self.trace[k];
        let y0: State = [tp.x, tp.h, tp.big_h, tp.g];
        let s0 = self.s_trace[k];
        let span = self.s_trace[k + 1] - s0;
        let f = rhs(&self.problem, self.varsigma);
        let (mut lo, mut hi) = (0.0, span);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let (y, _) = ode::step(&f, s0, &y0, mid);
            if y[2] < t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        math::exp(s0 + 0.5 * (lo + hi))
    }

    /// θ̃(t) = (h'(H⁻¹(t)))^{1/(p−1)}, magnitude only.
    pub fn theta_at(&self, t: f64) -> f64 {
        math::pow(self.hp_at_time(t), 1.0 / (self.problem.p - 1.0))
    }

    pub fn problem(&self) -> &ShootingProblem {
        &self.problem
    }

    /// μ from ς = pμ/(κbC1(p−1)).
    pub fn mu(&self) -> f64 {
        let pr = &self.problem;
        self.varsigma * pr.kappa * pr.b * pr.c1 * (pr.p - 1.0) / pr.p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_problem(p: f64) -> ShootingProblem {
        ShootingProblem {
            delta: 3.0 - math::exp(0.5),
            kappa: 1.0,
            c1: 1.0,
            b: 2.0,
            c: 1.0,
            p,
            horizon: 1.0,
        }
    }

    #[test]
    fn converges_with_tight_residuals() {
        let st = shoot(&golden_problem(2.0)).unwrap();
        assert!(st.r_transversality.abs() < 1e-8 && st.r_time.abs() < 1e-8);
        // values from an independent scipy DOP853 + fsolve prototype
        assert!((st.chi - 0.16408).abs() < 1e-4, "chi {}", st.chi);
        assert!((st.varsigma - 0.060632).abs() < 1e-5, "vs {}", st.varsigma);
        assert!((st.x_bar - 0.35069).abs() < 1e-4, "x_bar {}", st.x_bar);
    }

    #[test]
    fn trace_invariants() {
        let st = shoot(&golden_problem(1.5)).unwrap();
        assert!(st.trace.windows(2).all(|w| w[1].hp > w[0].hp && w[1].big_h >= w[0].big_h && w[1].h >= w[0].h));
        assert!(st.trace[0].h > 0.0 && st.trace[0].x < 1e-7);
    }

    #[test]
    fn time_inversion_round_trip() {
        let st = shoot(&golden_problem(1.75)).unwrap();
        for &t in &[0.0, 0.1, 0.5, 0.9, 0.999] {
            let a = st.theta_at(t);
            let b = st.theta_at(t + 1e-9);
            assert!(a.is_finite() && b >= a * (1.0 - 1e-9));
        }
        assert!(st.theta_at(1.0 - 1e-5) > st.theta_at(0.99));
    }
}
