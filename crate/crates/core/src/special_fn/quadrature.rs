//! Gauss–Legendre rules, adaptive Gauss–Kronrod and graded meshes.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

pub const ABS_TOL: f64 = 1e-10;
pub const REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

impl GaussLegendre {
    /// n-point rule on [-1, 1], nodes ascending.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                let dx = p / d;
                x -= dx;
                if math::abs(dx) < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * d * d);
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node positions mapped onto [a, b].
    pub fn mapped_nodes(&self, a: f64, b: f64) -> impl Iterator<Item = f64> + '_ {
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes.iter().map(move |x| m + h * x)
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(m + h * x);
        }
        s * h
    }

    /// Composite rule over the panels defined by `edges`.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(&self, mut f: F, edges: &[f64]) -> f64 {
        edges
            .windows(2)
            .map(|w| self.integrate(&mut f, w[0], w[1]))
            .sum()
    }
}

/// Gauss rule plus the integration matrix `s[j][k] = ∫_{-1}^{x_j} ℓ_k(x) dx`,
/// which gives running integrals at the nodes from node values alone.
#[derive(Debug, Clone)]
pub struct RunningRule {
    pub gl: GaussLegendre,
    pub s: Vec<Vec<f64>>,
}

impl RunningRule {
    pub fn new(n: usize) -> Self {
        let gl = GaussLegendre::new(n);
        let mut s = vec![vec![0.0; n]; n];
        // ℓ_k(x) = w_k Σ_m (2m+1)/2 P_m(x_k) P_m(x), exact for degree n-1.
        for (j, row) in s.iter_mut().enumerate() {
            let y = gl.nodes[j];
            let mut pm_y = Vec::with_capacity(n + 1);
            for m in 0..=n {
                pm_y.push(legendre(m, y).0);
            }
            for (k, cell) in row.iter_mut().enumerate() {
                let xk = gl.nodes[k];
                let mut acc = 0.5 * (y + 1.0);
                for m in 1..n {
                    acc += 0.5 * legendre(m, xk).0 * (pm_y[m + 1] - pm_y[m - 1]);
                }
                *cell = gl.weights[k] * acc;
            }
        }
        RunningRule { gl, s }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(m);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let d = h * XGK[i];
        let s = f(m - d) + f(m + d);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    if !k.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok((k * h, math::abs((k - g) * h)))
}

/// Adaptive Gauss–Kronrod (7/15) by interval bisection.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (whole, whole_err) = gk15(&mut f, a, b)?;
    if whole_err <= abs_tol.max(rel_tol * math::abs(whole)) {
        return Ok(whole);
    }
    let scale = math::abs(whole);
    let mut stack = vec![(a, b, 0usize)];
    let mut total = 0.0;
    let width = b - a;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err) = gk15(&mut f, lo, hi)?;
        let budget = abs_tol.max(rel_tol * scale) * ((hi - lo) / width).max(1e-3);
        if err <= budget || depth >= 100 || hi - lo <= 1e-15 * math::abs(hi).max(math::abs(lo)) {
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    Ok(total)
}

/// Edges of a mesh on [t0, t1]: `uniform` equal cells on the first `1 - fraction`
/// of the interval, then geometric refinement by `ratio` for `levels` steps toward t1.
pub fn graded_edges(t0: f64, t1: f64, uniform: usize, fraction: f64, ratio: f64, levels: usize) -> Vec<f64> {
    let len = t1 - t0;
    let split = t1 - fraction * len;
    let mut edges = Vec::with_capacity(uniform + levels + 2);
    for i in 0..uniform {
        edges.push(t0 + (split - t0) * i as f64 / uniform as f64);
    }
    let mut gap = fraction * len;
    for _ in 0..=levels {
        edges.push(t1 - gap);
        gap *= ratio;
    }
    edges.push(t1);
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let gl = GaussLegendre::new(5);
        let v = gl.integrate(|x| x.powi(8) + 3.0 * x.powi(3), 0.0, 1.0);
        assert!((v - (1.0 / 9.0 + 0.75)).abs() < 1e-14);
        let w: f64 = gl.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn running_rule_integrates_polynomials_up_to_nodes() {
        let rr = RunningRule::new(6);
        let f = |x: f64| 1.0 + x + x.powi(5);
        let vals: Vec<f64> = rr.gl.nodes.iter().map(|&x| f(x)).collect();
        for (j, &y) in rr.gl.nodes.iter().enumerate() {
            let approx: f64 = (0..6).map(|k| rr.s[j][k] * vals[k]).sum();
            let exact = |x: f64| x + x * x / 2.0 + x.powi(6) / 6.0;
            assert!((approx - (exact(y) - exact(-1.0))).abs() < 1e-13);
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let v = adaptive(|x| 1.0 / libm::sqrt(x), 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
        let e = adaptive(libm::exp, 0.0, 1.0, 1e-14, 1e-14).unwrap();
        assert!((e - (libm::exp(1.0) - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn adaptive_rejects_non_finite() {
        assert!(adaptive(|_| f64::NAN, 0.0, 1.0, 1e-10, 1e-10).is_err());
    }

    #[test]
    fn graded_edges_shape() {
        let e = graded_edges(0.0, 1.0, 10, 0.01, 0.5, 40);
        assert_eq!(e.len(), 10 + 41 + 1);
        assert!(e.windows(2).all(|w| w[1] > w[0]));
        assert!((e[10] - 0.99).abs() < 1e-15);
        assert!(1.0 - e[e.len() - 2] < 1e-13);
    }
}
