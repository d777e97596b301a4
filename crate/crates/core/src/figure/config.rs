use std::path::Path;

use serde::{Deserialize, Serialize};

use super::MethodSelection;
use crate::error::{Error, Result};
use crate::params::make_params;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl SweepRange {
    /// `count` evenly spaced points including both ends.
    pub fn points(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.count)
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::Config(format!("{what}: need finite min < max")));
        }
        if self.count < 2 {
            return Err(Error::Config(format!("{what}: count must be at least 2")));
        }
        Ok(())
    }
}

/// Log-spaced `β` sweep for the fixed-`μ` curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaSweep {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl BetaSweep {
    pub fn points(&self) -> Vec<f64> {
        let (a, b) = (self.min.ln(), self.max.ln());
        let mut v: Vec<f64> = linspace(a, b, self.count)
            .into_iter()
            .map(f64::exp)
            .collect();
        // pin the ends so listed betas reproduce exactly
        v[0] = self.min;
        *v.last_mut().unwrap() = self.max;
        v
    }
}

/// Replaces the `μ` sweep of one fixed-`β` curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuOverride {
    pub beta: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * (i as f64 / last)
            }
        })
        .collect()
}

fn default_beta_sweep() -> BetaSweep {
    BetaSweep {
        min: 0.001,
        max: 0.2,
        count: 201,
    }
}

fn default_overrides() -> Vec<MuOverride> {
    vec![MuOverride {
        beta: 0.001,
        min: -6000.0,
        max: -4500.0,
        count: 201,
    }]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureConfig {
    pub gamma: f64,
    pub beta_list: Vec<f64>,
    pub mu_list: Vec<f64>,
    pub mu_sweep: SweepRange,
    /// Joint-spectrum modes emitted; the hull is extended past it when the
    /// curves reach larger `N`.
    pub n_max: usize,
    pub method: MethodSelection,
    #[serde(default = "default_beta_sweep")]
    pub beta_sweep: BetaSweep,
    #[serde(default = "default_overrides")]
    pub mu_sweep_overrides: Vec<MuOverride>,
}

impl Default for FigureConfig {
    fn default() -> Self {
        let gamma = 0.6;
        let l = make_params(gamma).expect("finite gamma").lambda_scale;
        Self {
            gamma,
            beta_list: vec![0.001, 0.01, 0.02, 0.03, 0.04, 0.08, 0.2],
            mu_list: [-14.75, -9.75, -4.75, 0.25, 5.25, 10.25, 15.25]
                .iter()
                .map(|x| x * l)
                .collect(),
            mu_sweep: SweepRange {
                min: -15.0 * l,
                max: 15.0 * l,
                count: 201,
            },
            n_max: 10,
            method: MethodSelection::Exact,
            beta_sweep: default_beta_sweep(),
            mu_sweep_overrides: default_overrides(),
        }
    }
}

impl FigureConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() {
            return Err(Error::Config("gamma must be finite".into()));
        }
        if self.beta_list.is_empty() || self.beta_list.iter().any(|b| !(b.is_finite() && *b > 0.0))
        {
            return Err(Error::Config(
                "beta_list must be non-empty with positive entries".into(),
            ));
        }
        if self.mu_list.is_empty() || self.mu_list.iter().any(|m| !m.is_finite()) {
            return Err(Error::Config("mu_list must be non-empty and finite".into()));
        }
        self.mu_sweep.validate("mu_sweep")?;
        let b = self.beta_sweep;
        if !(b.min > 0.0 && b.max > b.min && b.max.is_finite() && b.count >= 2) {
            return Err(Error::Config(
                "beta_sweep: need 0 < min < max and count ≥ 2".into(),
            ));
        }
        for o in &self.mu_sweep_overrides {
            SweepRange {
                min: o.min,
                max: o.max,
                count: o.count,
            }
            .validate("mu_sweep_overrides")?;
        }
        if self.n_max == 0 || self.n_max > crate::fock::MAX_JOINT_MODES {
            return Err(Error::Config(format!(
                "n_max must lie in 1..={}",
                crate::fock::MAX_JOINT_MODES
            )));
        }
        Ok(())
    }

    /// `μ` sweep used for the fixed-`β` curve at `beta`.
    pub fn mu_points_for(&self, beta: f64) -> Vec<f64> {
        match self.mu_sweep_overrides.iter().find(|o| o.beta == beta) {
            Some(o) => linspace(o.min, o.max, o.count),
            None => self.mu_sweep.points(),
        }
    }

    /// `β` sweep for the fixed-`μ` curves: the log grid merged with the listed betas.
    pub fn beta_points(&self) -> Vec<f64> {
        let mut v = self.beta_sweep.points();
        v.extend(self.beta_list.iter().copied());
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_json() {
        let cfg = FigureConfig::default();
        let s = serde_json::to_string(&cfg).unwrap();
        assert_eq!(FigureConfig::from_json_str(&s).unwrap(), cfg);
    }

    #[test]
    fn minimal_keys_fill_defaults() {
        let s = r#"{"gamma":0.6,"beta_list":[0.1],"mu_list":[0.0],
                    "mu_sweep":{"min":-1,"max":1,"count":3},"n_max":4,"method":"both"}"#;
        let cfg = FigureConfig::from_json_str(s).unwrap();
        assert_eq!(cfg.mu_sweep.points(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(cfg.method, MethodSelection::Both);
        assert_eq!(cfg.beta_sweep.count, 201);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(FigureConfig::from_json_str("{}").is_err());
        let mut cfg = FigureConfig::default();
        cfg.beta_list.push(-1.0);
        assert!(cfg.validate().is_err());
        let mut cfg = FigureConfig::default();
        cfg.mu_sweep.count = 1;
        assert!(cfg.validate().is_err());
        let s = serde_json::to_string(&FigureConfig::default())
            .unwrap()
            .replace("\"n_max\"", "\"nmax\"");
        assert!(FigureConfig::from_json_str(&s).is_err());
    }

    #[test]
    fn sweeps() {
        let cfg = FigureConfig::default();
        let low = cfg.mu_points_for(0.001);
        assert_eq!(
            (low[0], *low.last().unwrap(), low.len()),
            (-6000.0, -4500.0, 201)
        );
        assert_eq!(cfg.mu_points_for(0.2).len(), 201);
        let b = cfg.beta_points();
        assert!(b.windows(2).all(|w| w[1] > w[0]));
        for beta in &cfg.beta_list {
            assert!(b.contains(beta));
        }
        assert_eq!((b[0], *b.last().unwrap()), (0.001, 0.2));
    }
}
