//! `(⟨N_op⟩, ⟨H⟩)` curve families and the lower boundary they live above.
//!
//! Dashed curves fix `β` and sweep `μ`; full curves fix `μ` and sweep `β`.
//! Every grand-canonical average is a convex combination of joint
//! eigenvalue pairs `(n, E)`, and `E ≥ Λn(2n−1)/4` (lowest `n` modes filled),
//! so exact points lie on or above the piecewise-linear hull through
//! `(n, Λn(2n−1)/4)`.

mod config;
mod output;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::params::{make_params, ModelParams};
use crate::thermo::{em_expectations, exact_expectations, Method, ThermoPoint, DEFAULT_TAIL_TOL};

pub use config::{BetaSweep, FigureConfig, MuOverride, SweepRange};
pub use output::{generate_figure, write_csv, write_json, CurveData, FigureData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveMode {
    FixedBeta,
    FixedMu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodSelection {
    Exact,
    EulerMaclaurin,
    Both,
}

impl MethodSelection {
    pub fn methods(self) -> &'static [Method] {
        match self {
            Self::Exact => &[Method::Exact],
            Self::EulerMaclaurin => &[Method::EulerMaclaurin],
            Self::Both => &[Method::Exact, Method::EulerMaclaurin],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub gamma: f64,
    pub mode: CurveMode,
    pub fixed_value: f64,
    pub sweep: Vec<f64>,
    pub method: MethodSelection,
}

impl CurveSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() || !self.fixed_value.is_finite() {
            return Err(domain("gamma and the fixed value must be finite"));
        }
        if self.sweep.is_empty() {
            return Err(domain("sweep is empty"));
        }
        if self.sweep.iter().any(|x| !x.is_finite()) {
            return Err(domain("sweep contains a non-finite value"));
        }
        let up = self.sweep.windows(2).all(|w| w[1] > w[0]);
        let down = self.sweep.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(domain("sweep must be strictly monotone"));
        }
        let betas_positive = match self.mode {
            CurveMode::FixedBeta => self.fixed_value > 0.0,
            CurveMode::FixedMu => self.sweep.iter().all(|&b| b > 0.0),
        };
        if !betas_positive {
            return Err(domain("beta values must be positive"));
        }
        Ok(())
    }
}

fn point(
    params: &ModelParams,
    method: Method,
    beta: f64,
    mu: f64,
    tail_tol: f64,
) -> Result<ThermoPoint> {
    match method {
        Method::Exact => exact_expectations(params, beta, mu, tail_tol),
        Method::EulerMaclaurin => em_expectations(params, beta, mu),
    }
}

/// One record per sweep point per method, in sweep order, methods grouped.
pub fn generate_curve(spec: &CurveSpec) -> Result<Vec<ThermoPoint>> {
    generate_curve_with(spec, DEFAULT_TAIL_TOL)
}

pub fn generate_curve_with(spec: &CurveSpec, tail_tol: f64) -> Result<Vec<ThermoPoint>> {
    spec.validate()?;
    let params = make_params(spec.gamma)?;
    let mut out = Vec::with_capacity(spec.sweep.len() * spec.method.methods().len());
    for &method in spec.method.methods() {
        for &x in &spec.sweep {
            let (beta, mu) = match spec.mode {
                CurveMode::FixedBeta => (spec.fixed_value, x),
                CurveMode::FixedMu => (x, spec.fixed_value),
            };
            let p = point(&params, method, beta, mu, tail_tol).map_err(|e| {
                Error::Numerical(format!("{method} point at beta = {beta}, mu = {mu}: {e}"))
            })?;
            out.push(p);
        }
    }
    Ok(out)
}

/// Lower hull through `(n, Λn(2n−1)/4)`, `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPolyline {
    pub vertices: Vec<(usize, f64)>,
}

impl BoundaryPolyline {
    pub fn segments(&self) -> impl Iterator<Item = ((usize, f64), (usize, f64))> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn max_number(&self) -> usize {
        self.vertices.last().map_or(0, |v| v.0)
    }

    /// Hull energy at a (possibly fractional) particle number.
    pub fn energy_at(&self, number: f64) -> Option<f64> {
        if !(number >= 0.0) || number > self.max_number() as f64 {
            return None;
        }
        let lo = (number.floor() as usize).min(self.max_number().saturating_sub(1));
        if self.vertices.len() == 1 {
            return Some(self.vertices[0].1);
        }
        let (a, b) = (self.vertices[lo], self.vertices[lo + 1]);
        let t = number - a.0 as f64;
        Some(a.1 + t * (b.1 - a.1))
    }
}

pub fn hull_boundary(params: &ModelParams, n_max: usize) -> Result<BoundaryPolyline> {
    if n_max == 0 {
        return Err(domain("n_max must be at least 1"));
    }
    let vertices = (0..=n_max).map(|n| (n, params.filled_energy(n))).collect();
    Ok(BoundaryPolyline { vertices })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub beta: f64,
    pub mu: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    /// `E − hull(N)` per checked point, in input order.
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub violations: Vec<Violation>,
    pub tolerance: f64,
}

impl ContainmentReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every exact point against the hull with slack `tol`.
/// Euler–Maclaurin points are approximations and are skipped.
pub fn containment_check(
    points: &[ThermoPoint],
    boundary: &BoundaryPolyline,
    tol: f64,
) -> Result<ContainmentReport> {
    let mut margins = Vec::new();
    let mut violations = Vec::new();
    for p in points.iter().filter(|p| p.method == Method::Exact) {
        let hull = boundary.energy_at(p.number).ok_or_else(|| {
            domain(format!(
                "boundary covers N ≤ {} but the point at beta = {}, mu = {} has N = {}",
                boundary.max_number(),
                p.beta,
                p.mu,
                p.number
            ))
        })?;
        let margin = p.energy - hull;
        if margin < -tol {
            violations.push(Violation {
                beta: p.beta,
                mu: p.mu,
                margin,
            });
        }
        margins.push(margin);
    }
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ContainmentReport {
        margins,
        min_margin,
        violations,
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lambda() -> f64 {
        make_params(0.6).unwrap().lambda_scale
    }

    #[test]
    fn fixed_beta_curve_increases() {
        let l = lambda();
        let spec = CurveSpec {
            gamma: 0.6,
            mode: CurveMode::FixedBeta,
            fixed_value: 0.2,
            sweep: [-14.75, -9.75, -4.75, 0.25, 5.25, 10.25, 15.25]
                .iter()
                .map(|x| x * l)
                .collect(),
            method: MethodSelection::Exact,
        };
        let pts = generate_curve(&spec).unwrap();
        assert_eq!(pts.len(), 7);
        assert!(pts.windows(2).all(|w| w[1].number > w[0].number));
    }

    #[test]
    fn fixed_mu_curve_energy_falls_with_beta() {
        let spec = CurveSpec {
            gamma: 0.6,
            mode: CurveMode::FixedMu,
            fixed_value: 0.0,
            sweep: vec![0.001, 0.01, 0.02, 0.03, 0.04, 0.08, 0.2],
            method: MethodSelection::Both,
        };
        let pts = generate_curve(&spec).unwrap();
        assert_eq!(pts.len(), 14);
        let exact: Vec<_> = pts.iter().filter(|p| p.method == Method::Exact).collect();
        assert!(exact.windows(2).all(|w| w[1].energy < w[0].energy));
    }

    #[test]
    fn empty_limit_record() {
        let spec = CurveSpec {
            gamma: 0.6,
            mode: CurveMode::FixedBeta,
            fixed_value: 1.0,
            sweep: vec![-900.0],
            method: MethodSelection::Exact,
        };
        let p = generate_curve(&spec).unwrap()[0];
        assert!(p.number < 1e-300 && p.energy < 1e-300);
    }

    #[test]
    fn invalid_specs() {
        let mut spec = CurveSpec {
            gamma: 0.6,
            mode: CurveMode::FixedMu,
            fixed_value: 0.0,
            sweep: vec![0.1, 0.05, 0.2],
            method: MethodSelection::Exact,
        };
        assert!(spec.validate().is_err());
        spec.sweep = vec![];
        assert!(spec.validate().is_err());
        spec.sweep = vec![-0.1, 0.1];
        assert!(spec.validate().is_err());
        spec.mode = CurveMode::FixedBeta;
        spec.fixed_value = 0.0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn hull_vertices() {
        let p = make_params(0.0).unwrap();
        let b = hull_boundary(&p, 4).unwrap();
        let e: Vec<f64> = b.vertices.iter().map(|v| v.1).collect();
        assert_eq!(e, vec![0.0, 0.25, 1.5, 3.75, 7.0]);
        let p = make_params(0.6).unwrap();
        let b = hull_boundary(&p, 3).unwrap();
        assert!((b.vertices[3].1 - 4.918_078_893_226_500_5).abs() < 1e-12);
        assert_eq!(b.vertices[0], (0, 0.0));
        assert!(hull_boundary(&p, 0).is_err());
        assert_eq!(b.energy_at(0.5), Some(p.lambda_scale / 8.0));
        assert_eq!(b.energy_at(3.5), None);
    }

    #[test]
    fn hull_is_convex() {
        let p = make_params(1.3).unwrap();
        let b = hull_boundary(&p, 30).unwrap();
        let slopes: Vec<f64> = b.segments().map(|(a, c)| c.1 - a.1).collect();
        assert!(slopes.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn containment_of_low_beta_points() {
        let p = make_params(0.6).unwrap();
        let spec = CurveSpec {
            gamma: 0.6,
            mode: CurveMode::FixedBeta,
            fixed_value: 0.001,
            sweep: (0..16).map(|i| -6000.0 + 100.0 * i as f64).collect(),
            method: MethodSelection::Exact,
        };
        let pts = generate_curve(&spec).unwrap();
        let b = hull_boundary(&p, 20).unwrap();
        let r = containment_check(&pts, &b, 1e-9).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
        assert!(r.min_margin >= -1e-9);

        let vac = exact_expectations(&p, 1.0, -900.0, DEFAULT_TAIL_TOL).unwrap();
        let r = containment_check(&[vac], &b, 1e-9).unwrap();
        assert_eq!(r.margins, vec![0.0]);
    }

    #[test]
    fn containment_flags_points_below_the_hull() {
        let p = make_params(0.6).unwrap();
        let mut fake = exact_expectations(&p, 0.2, 3.0, DEFAULT_TAIL_TOL).unwrap();
        fake.energy = 0.0;
        let b = hull_boundary(&p, 10).unwrap();
        let r = containment_check(&[fake], &b, 1e-9).unwrap();
        assert!(!r.passed());
        let tiny = hull_boundary(&p, 1).unwrap();
        assert!(containment_check(
            &[exact_expectations(&p, 0.01, 20.0, 1e-12).unwrap()],
            &tiny,
            1e-9
        )
        .is_err());
    }

    #[test]
    fn hull_matches_joint_spectrum_minima() {
        let p = make_params(0.6).unwrap();
        let b = hull_boundary(&p, 6).unwrap();
        let pts = crate::fock::joint_spectrum(&p, 8, 6).unwrap();
        for (n, e) in &b.vertices {
            let min = pts
                .iter()
                .filter(|q| q.number == *n)
                .map(|q| q.energy)
                .fold(f64::INFINITY, f64::min);
            assert!((min - e).abs() <= 1e-12 * e.max(1.0), "n = {n}");
        }
    }
}
