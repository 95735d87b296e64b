//! Figure-style parameter sweeps.
//!
//! Grid spec: `;`-separated entries `[dataset.]name=min:max:count`,
//! `[dataset.]name=v1|v2|...` or `name=v`. Datasets are `fig1`, `fig2`, `fig3`
//! (paths over p) and `fig3s` (surface over b, c). Names: p, c2, b, c, T, beta,
//! eta, alpha. T, beta, eta and alpha take a single value and override the base
//! config; p, c2, b and c are the swept axes.

use std::path::Path;

use rayon::prelude::*;

use legalrisk_core::equilibrium::{self, EquilibriumSolution};
use legalrisk_core::{MarketConfig, RegulatoryRegime};

use crate::config::Config;
use crate::output::{CsvFile, Header};

const NAMES: [&str; 8] = ["p", "c2", "b", "c", "T", "beta", "eta", "alpha"];
const DATASETS: [&str; 4] = ["fig1", "fig2", "fig3", "fig3s"];
/// Uniform path samples on [0, T) plus one point at T(1 − 10⁻³).
pub const PATH_POINTS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub dataset: Option<String>,
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepGrid {
    pub axes: Vec<Axis>,
}

fn parse_values(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number `{t}`"));
    if s.contains('|') {
        return s.split('|').map(num).collect();
    }
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [lo, hi, n] => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            let n: usize = n.trim().parse().map_err(|_| format!("bad count `{n}`"))?;
            if n == 0 {
                return Err("range count must be >= 1".into());
            }
            if n == 1 {
                return Ok(vec![lo]);
            }
            Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
        }
        _ => Err(format!("expected v, min:max:count or v1|v2|..., got `{s}`")),
    }
}

impl SweepGrid {
    pub fn parse(spec: &str) -> Result<Self, String> {
        let mut axes = Vec::new();
        for entry in spec.split(';').map(str::trim).filter(|e| !e.is_empty()) {
            let (lhs, rhs) = entry.split_once('=').ok_or_else(|| format!("expected name=values in `{entry}`"))?;
            let (dataset, name) = match lhs.trim().split_once('.') {
                Some((d, n)) => (Some(d.to_string()), n.to_string()),
                None => (None, lhs.trim().to_string()),
            };
            if let Some(d) = &dataset {
                if !DATASETS.contains(&d.as_str()) {
                    return Err(format!("unknown dataset `{d}`"));
                }
            }
            if !NAMES.contains(&name.as_str()) {
                return Err(format!("unknown sweep parameter `{name}`"));
            }
            let values = parse_values(rhs)?;
            if matches!(name.as_str(), "T" | "beta" | "eta" | "alpha") && values.len() != 1 {
                return Err(format!("`{name}` takes a single value"));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(format!("non-finite value in `{entry}`"));
            }
            axes.push(Axis { dataset, name, values });
        }
        Ok(SweepGrid { axes })
    }

    /// Most specific match wins: `dataset.name` over `name` over the default.
    pub fn values(&self, dataset: &str, name: &str, default: &[f64]) -> Vec<f64> {
        self.axes
            .iter()
            .rev()
            .find(|a| a.name == name && a.dataset.as_deref() == Some(dataset))
            .or_else(|| self.axes.iter().rev().find(|a| a.name == name && a.dataset.is_none()))
            .map(|a| a.values.clone())
            .unwrap_or_else(|| default.to_vec())
    }

    fn base(&self, dataset: &str, cfg: &Config) -> (RegulatoryRegime, MarketConfig) {
        let mut r = cfg.regime;
        let mut m = cfg.market.clone();
        let one = |name: &str| self.values(dataset, name, &[]).first().copied();
        if let Some(t) = one("T") {
            m.horizon_t = t;
        }
        if let Some(v) = one("beta") {
            r.beta = v;
        }
        if let Some(v) = one("eta") {
            r.eta = v;
        }
        if let Some(v) = one("alpha") {
            r.alpha = v;
        }
        (r, m)
    }
}

fn range(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Sampling times for path datasets.
pub fn path_times(horizon: f64) -> Vec<f64> {
    let mut t: Vec<f64> = (0..PATH_POINTS).map(|k| horizon * k as f64 / PATH_POINTS as f64).collect();
    t.push(horizon * (1.0 - 1e-3));
    t
}

/// Sets b so that C2 = κ·b·C1 hits `c2`.
pub fn with_c2(r: &RegulatoryRegime, c2: f64) -> RegulatoryRegime {
    RegulatoryRegime {
        b: c2 / (r.kappa * r.c1),
        ..*r
    }
}

#[derive(Debug, Clone)]
pub struct PointError {
    pub dataset: &'static str,
    pub params: Vec<(&'static str, f64)>,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct SweepData {
    /// (p, c2, path, θ(T/2))
    pub fig1: Vec<(f64, f64, Vec<f64>, f64)>,
    /// (p, c2, θ const)
    pub fig2: Vec<(f64, f64, f64)>,
    /// (p, path)
    pub fig3: Vec<(f64, Vec<f64>)>,
    /// (b, c, x̄)
    pub fig3s: Vec<(f64, f64, f64)>,
    pub errors: Vec<PointError>,
    pub times: Vec<f64>,
}

fn sample(sol: &EquilibriumSolution, times: &[f64]) -> Vec<f64> {
    times.iter().map(|t| sol.strategy.value(*t)).collect()
}

pub fn run(cfg: &Config, grid: &SweepGrid) -> SweepData {
    let mut data = SweepData::default();

    let (r1, m1) = grid.base("fig1", cfg);
    let times = path_times(m1.horizon_t);
    data.times = times.clone();
    let ps = grid.values("fig1", "p", &range(1.0, 6.0, 11));
    let cs = grid.values("fig1", "c2", &range(1.0, 3.0, 5));
    let pts: Vec<(f64, f64)> = ps.iter().flat_map(|p| cs.iter().map(move |c| (*p, *c))).collect();
    let res: Vec<_> = pts
        .par_iter()
        .map(|&(p, c2)| {
            let r = RegulatoryRegime { p, eta: 1.0, ..with_c2(&r1, c2) };
            equilibrium::solve_scenario_i(&r, &m1)
                .map(|s| (sample(&s, &times), s.strategy.value(0.5 * m1.horizon_t)))
                .map_err(|e| e.to_string())
        })
        .collect();
    for ((p, c2), r) in pts.iter().zip(res) {
        match r {
            Ok((path, half)) => data.fig1.push((*p, *c2, path, half)),
            Err(message) => data.errors.push(PointError {
                dataset: "fig1",
                params: vec![("p", *p), ("c2", *c2)],
                message,
            }),
        }
    }

    let (r2, m2) = grid.base("fig2", cfg);
    let ps = grid.values("fig2", "p", &range(1.0, 6.0, 11));
    let cs = grid.values("fig2", "c2", &range(1.0, 3.0, 5));
    let pts: Vec<(f64, f64)> = ps.iter().flat_map(|p| cs.iter().map(move |c| (*p, *c))).collect();
    let res: Vec<_> = pts
        .par_iter()
        .map(|&(p, c2)| {
            let r = RegulatoryRegime { p, eta: p * r2.alpha, ..with_c2(&r2, c2) };
            equilibrium::solve_scenario_ii(&r, &m2)
                .map(|s| s.strategy.value(0.0))
                .map_err(|e| e.to_string())
        })
        .collect();
    for ((p, c2), r) in pts.iter().zip(res) {
        match r {
            Ok(th) => data.fig2.push((*p, *c2, th)),
            Err(message) => data.errors.push(PointError {
                dataset: "fig2",
                params: vec![("p", *p), ("c2", *c2)],
                message,
            }),
        }
    }

    let (r3, m3) = grid.base("fig3", cfg);
    let t3 = path_times(m3.horizon_t);
    let ps = grid.values("fig3", "p", &[1.5, 1.75, 2.0]);
    let b = grid.values("fig3", "b", &[2.0])[0];
    let c = grid.values("fig3", "c", &[1.0])[0];
    let res: Vec<_> = ps
        .par_iter()
        .map(|&p| {
            let r = RegulatoryRegime { p, b, c, alpha: 1.0, eta: 1.0, ..r3 };
            let kind = equilibrium::detect_kind(&r).ok_or_else(|| "no solver for this point".to_string())?;
            equilibrium::solve(kind, &r, &m3)
                .map(|s| sample(&s, &t3))
                .map_err(|e| e.to_string())
        })
        .collect();
    for (p, r) in ps.iter().zip(res) {
        match r {
            Ok(path) => data.fig3.push((*p, path)),
            Err(message) => data.errors.push(PointError {
                dataset: "fig3",
                params: vec![("p", *p)],
                message,
            }),
        }
    }

    let (r4, m4) = grid.base("fig3s", cfg);
    let bs = grid.values("fig3s", "b", &range(1.0, 3.0, 5));
    let cs = grid.values("fig3s", "c", &range(0.5, 2.5, 5));
    for &b in &bs {
        for &c in &cs {
            let r = RegulatoryRegime { p: 1.0, b, c, alpha: 1.0, eta: 1.0, ..r4 };
            match equilibrium::solve_scenario_iii_degenerate(&r, &m4) {
                Ok(f) => data.fig3s.push((b, c, f.x_bar)),
                Err(e) => data.errors.push(PointError {
                    dataset: "fig3s",
                    params: vec![("b", b), ("c", c)],
                    message: e.to_string(),
                }),
            }
        }
    }
    data
}

pub fn write(dir: &Path, header: &Header, data: &SweepData) -> std::io::Result<()> {
    let mut f = CsvFile::create(&dir.join("fig1_paths.csv"), header, &["p", "c2", "t", "theta"])?;
    for (p, c2, path, _) in &data.fig1 {
        for (t, th) in data.times.iter().zip(path) {
            f.row(&[*p, *c2, *t, *th])?;
        }
    }
    f.finish()?;
    let mut f = CsvFile::create(&dir.join("fig1_surface.csv"), header, &["p", "c2", "theta_at_half_T"])?;
    for (p, c2, _, half) in &data.fig1 {
        f.row(&[*p, *c2, *half])?;
    }
    f.finish()?;
    let mut f = CsvFile::create(&dir.join("fig2_surface.csv"), header, &["p", "c2", "theta_const"])?;
    for (p, c2, th) in &data.fig2 {
        f.row(&[*p, *c2, *th])?;
    }
    f.finish()?;
    let mut f = CsvFile::create(&dir.join("fig3_paths.csv"), header, &["p", "t", "theta"])?;
    for (p, path) in &data.fig3 {
        for (t, th) in data.times.iter().zip(path) {
            f.row(&[*p, *t, *th])?;
        }
    }
    f.finish()?;
    let mut f = CsvFile::create(&dir.join("fig3_surface.csv"), header, &["b", "c", "x_bar"])?;
    for (b, c, x) in &data.fig3s {
        f.row(&[*b, *c, *x])?;
    }
    f.finish()?;
    let mut f = CsvFile::create(&dir.join("errors.csv"), header, &["dataset", "params", "error"])?;
    for e in &data.errors {
        let params = e
            .params
            .iter()
            .map(|(k, v)| format!("{k}={}", crate::output::g12(*v)))
            .collect::<Vec<_>>()
            .join(" ");
        f.row_mixed(&[e.dataset, &params, &e.message], &[])?;
    }
    f.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_parsing() {
        let g = SweepGrid::parse("p=1:6:11; fig2.c2=1|2|3; T=2").unwrap();
        assert_eq!(g.values("fig1", "p", &[]).len(), 11);
        assert_eq!(g.values("fig2", "c2", &[9.0]), vec![1.0, 2.0, 3.0]);
        assert_eq!(g.values("fig1", "c2", &[9.0]), vec![9.0]);
        assert!(SweepGrid::parse("zeta=1").is_err());
        assert!(SweepGrid::parse("T=1:2:3").is_err());
        assert!(SweepGrid::parse("fig9.p=1").is_err());
        assert!(SweepGrid::parse("p=1:2:0").is_err());
    }
}
