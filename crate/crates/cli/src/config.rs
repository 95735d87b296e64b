//! Flat `key=value` config files.
//!
//! ```text
//! # base point with a two-step sigma
//! beta=0.3
//! eta=1
//! alpha=2
//! p=2
//! T=1
//! mean_value=1.6487212707001282
//! v=3
//! sigma=0:1,0.5:2
//! support=0:0.5,2:0.5
//! ```

use std::fmt::Write as _;
use std::path::Path;

use legalrisk_core::{Aggregation, MarketConfig, RegulatoryRegime, SigmaSchedule};

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub regime: RegulatoryRegime,
    pub market: MarketConfig,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

impl Default for Config {
    /// Base point: T = 1, v = 3, E[V] = √e, β = 0.3, η = 1, α = 2, p = 2.
    fn default() -> Self {
        Config {
            regime: RegulatoryRegime {
                beta: 0.3,
                eta: 1.0,
                alpha: 2.0,
                ..RegulatoryRegime::default()
            },
            market: MarketConfig::new(1.0, 0.5f64.exp(), 3.0),
        }
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        t => t.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

fn parse_pairs(s: &str) -> Option<Vec<(f64, f64)>> {
    s.split(',')
        .map(|item| {
            let (a, b) = item.split_once(':')?;
            Some((parse_f64(a)?, parse_f64(b)?))
        })
        .collect()
}

pub fn parse(text: &str) -> Result<Config, ConfigError> {
    let mut cfg = Config::default();
    let mut seen = std::collections::HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ConfigError { line: line_no, message };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            return Err(err(format!("duplicate key `{key}`")));
        }
        let num = || parse_f64(value).ok_or_else(|| err(format!("`{key}` needs a number, got `{value}`")));
        let r = &mut cfg.regime;
        let m = &mut cfg.market;
        match key {
            "beta" => r.beta = num()?,
            "eta" => r.eta = num()?,
            "alpha" => r.alpha = num()?,
            "kappa" => r.kappa = num()?,
            "b" => r.b = num()?,
            "c" => r.c = num()?,
            "c1" => r.c1 = num()?,
            "p" => r.p = num()?,
            "aggregation" => {
                r.aggregation = value
                    .parse::<Aggregation>()
                    .map_err(|_| err(format!("aggregation must be sum, product or max, got `{value}`")))?
            }
            "T" => m.horizon_t = num()?,
            "mean_value" => m.mean_value = num()?,
            "v" => m.v = num()?,
            "sigma" => {
                m.sigma = if value.contains(':') {
                    let knots = parse_pairs(value).ok_or_else(|| err(format!("bad sigma schedule `{value}`")))?;
                    SigmaSchedule::piecewise(knots).map_err(|e| err(e.to_string()))?
                } else {
                    SigmaSchedule::constant(num()?)
                }
            }
            "N" => {
                m.population_n = value
                    .parse::<u64>()
                    .ok()
                    .filter(|n| *n >= 1)
                    .ok_or_else(|| err(format!("N must be a positive integer, got `{value}`")))?
            }
            "support" => {
                m.value_support = parse_pairs(value).ok_or_else(|| err(format!("bad support `{value}`")))?;
            }
            _ => return Err(err(format!("unknown key `{key}`"))),
        }
    }
    let m = &cfg.market;
    if !m.value_support.is_empty() {
        let total: f64 = m.value_support.iter().map(|s| s.1).sum();
        if m.value_support.iter().any(|s| s.1 <= 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(ConfigError {
                line: 0,
                message: "support probabilities must be positive and sum to 1".into(),
            });
        }
    }
    Ok(cfg)
}

pub fn load(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse(&text)
}

fn num(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

impl Config {
    /// Resolved config as `key=value` lines; `parse(render())` reproduces `self`.
    pub fn render(&self) -> Vec<String> {
        let r = &self.regime;
        let m = &self.market;
        let sigma = m
            .sigma
            .knots()
            .iter()
            .map(|(t, s)| format!("{}:{}", num(*t), num(*s)))
            .collect::<Vec<_>>()
            .join(",");
        let mut out = vec![
            format!("beta={}", num(r.beta)),
            format!("eta={}", num(r.eta)),
            format!("alpha={}", num(r.alpha)),
            format!("kappa={}", num(r.kappa)),
            format!("b={}", num(r.b)),
            format!("c={}", num(r.c)),
            format!("c1={}", num(r.c1)),
            format!("p={}", num(r.p)),
            format!("aggregation={}", r.aggregation.as_str()),
            format!("T={}", num(m.horizon_t)),
            format!("mean_value={}", num(m.mean_value)),
            format!("v={}", num(m.v)),
            format!("sigma={sigma}"),
            format!("N={}", m.population_n),
        ];
        if !m.value_support.is_empty() {
            let mut s = String::new();
            for (i, (v, p)) in m.value_support.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{}:{}", num(*v), num(*p));
            }
            out.push(format!("support={s}"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = parse("p=inf\naggregation=max # trailing\n\nsigma=0:1,0.5:2\nN=10\n").unwrap();
        assert!(c.regime.is_sup());
        assert_eq!(c.regime.aggregation, Aggregation::Max);
        assert_eq!(c.market.sigma.at(0.7), 2.0);
        assert_eq!(c.market.population_n, 10);
        assert_eq!(c.regime.beta, 0.3);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(parse("q=1").unwrap_err().line, 1);
        assert!(parse("beta=x").is_err());
        assert!(parse("beta=1\nbeta=2").is_err());
        assert!(parse("N=0").is_err());
        assert!(parse("support=0:0.5,1:0.4").is_err());
        assert!(parse("sigma=1:1").is_err());
        assert!(parse("beta=nan").is_err());
    }

    #[test]
    fn render_round_trips() {
        let c = parse("p=inf\nsupport=0:0.25,2:0.75\nsigma=0:1,0.3:0.5\nmean_value=0.1").unwrap();
        let again = parse(&c.render().join("\n")).unwrap();
        assert_eq!(c, again);
    }
}
