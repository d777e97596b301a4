use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{
    containment_check, generate_curve, hull_boundary, BoundaryPolyline, ContainmentReport,
    CurveMode, CurveSpec, FigureConfig,
};
use crate::error::{Error, Result};
use crate::fock::{joint_spectrum, JointSpectrumPoint};
use crate::params::make_params;
use crate::thermo::ThermoPoint;

/// Slack allowed below the hull before a point counts as a violation.
pub const CONTAINMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveData {
    pub mode: CurveMode,
    pub fixed_value: f64,
    pub points: Vec<ThermoPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureData {
    pub config: FigureConfig,
    pub curves: Vec<CurveData>,
    pub boundary: BoundaryPolyline,
    pub joint_spectrum: Vec<JointSpectrumPoint>,
    pub containment: ContainmentReport,
}

impl FigureData {
    pub fn curves_of(&self, mode: CurveMode) -> impl Iterator<Item = &CurveData> {
        self.curves.iter().filter(move |c| c.mode == mode)
    }
}

/// Fixed-`β` curves in `beta_list` order, then fixed-`μ` curves in `mu_list` order.
pub fn generate_figure(cfg: &FigureConfig) -> Result<FigureData> {
    cfg.validate()?;
    let params = make_params(cfg.gamma)?;
    let mut specs = Vec::new();
    for &beta in &cfg.beta_list {
        specs.push(CurveSpec {
            gamma: cfg.gamma,
            mode: CurveMode::FixedBeta,
            fixed_value: beta,
            sweep: cfg.mu_points_for(beta),
            method: cfg.method,
        });
    }
    let betas = cfg.beta_points();
    for &mu in &cfg.mu_list {
        specs.push(CurveSpec {
            gamma: cfg.gamma,
            mode: CurveMode::FixedMu,
            fixed_value: mu,
            sweep: betas.clone(),
            method: cfg.method,
        });
    }
    let curves = specs
        .into_iter()
        .map(|s| {
            let points = generate_curve(&s)?;
            Ok(CurveData {
                mode: s.mode,
                fixed_value: s.fixed_value,
                points,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let max_number = curves
        .iter()
        .flat_map(|c| &c.points)
        .map(|p| p.number)
        .fold(0.0_f64, f64::max);
    let reach = max_number.ceil() as usize + 1;
    let boundary = hull_boundary(&params, cfg.n_max.max(reach))?;
    let all: Vec<ThermoPoint> = curves
        .iter()
        .flat_map(|c| c.points.iter().copied())
        .collect();
    let containment = containment_check(&all, &boundary, CONTAINMENT_TOL)?;
    let joint = joint_spectrum(&params, cfg.n_max, cfg.n_max)?;
    Ok(FigureData {
        config: cfg.clone(),
        curves,
        boundary,
        joint_spectrum: joint,
        containment,
    })
}

#[derive(Serialize)]
struct CsvRow {
    method: &'static str,
    gamma: f64,
    beta: f64,
    mu: f64,
    zeta_prime: f64,
    log_z: f64,
    energy: f64,
    number: f64,
    entropy: f64,
}

/// One row per curve point, curves in figure order.
pub fn write_csv<W: Write>(data: &FigureData, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in data.curves.iter().flat_map(|c| &c.points) {
        w.serialize(CsvRow {
            method: p.method.as_str(),
            gamma: data.config.gamma,
            beta: p.beta,
            mu: p.mu,
            zeta_prime: p.zeta_prime,
            log_z: p.log_z,
            energy: p.energy,
            number: p.number,
            entropy: p.entropy,
        })
        .map_err(|e| Error::Numerical(format!("csv: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(data: &FigureData, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, data)?;
    out.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::figure::{MethodSelection, SweepRange};

    fn small() -> FigureConfig {
        FigureConfig {
            gamma: 0.6,
            beta_list: vec![0.01, 0.2],
            mu_list: vec![0.0, 5.0],
            mu_sweep: SweepRange {
                min: -10.0,
                max: 10.0,
                count: 5,
            },
            n_max: 4,
            method: MethodSelection::Both,
            beta_sweep: crate::figure::BetaSweep {
                min: 0.01,
                max: 0.2,
                count: 4,
            },
            mu_sweep_overrides: vec![],
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let data = generate_figure(&small()).unwrap();
        let mut buf = Vec::new();
        write_csv(&data, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("method,gamma,beta,mu,zeta_prime,log_z,energy,number,entropy")
        );
        // 2 curves × 5 μ + 2 curves × 4 β, each for both methods
        assert_eq!(lines.count(), 2 * (2 * 5 + 2 * 4));
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[0], "exact");
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.01);
    }

    #[test]
    fn shortest_round_trip_values() {
        let data = generate_figure(&small()).unwrap();
        let mut buf = Vec::new();
        write_csv(&data, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let parsed: Vec<f64> = text
            .lines()
            .nth(3)
            .unwrap()
            .split(',')
            .skip(1)
            .map(|x| x.parse().unwrap())
            .collect();
        let p = data.curves[0].points[2];
        assert_eq!(
            parsed,
            vec![
                0.6,
                p.beta,
                p.mu,
                p.zeta_prime,
                p.log_z,
                p.energy,
                p.number,
                p.entropy
            ]
        );
    }

    #[test]
    fn hull_reaches_every_point() {
        let data = generate_figure(&small()).unwrap();
        assert!(data.containment.passed());
        let top = data
            .curves
            .iter()
            .flat_map(|c| &c.points)
            .map(|p| p.number)
            .fold(0.0, f64::max);
        assert!(data.boundary.max_number() as f64 > top);
        assert_eq!(data.joint_spectrum.len(), 16);
    }

    #[test]
    fn json_is_deterministic() {
        let cfg = small();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_json(&generate_figure(&cfg).unwrap(), &mut a).unwrap();
        write_json(&generate_figure(&cfg).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        let back: FigureData = serde_json::from_slice(&a).unwrap();
        assert_eq!(back.curves.len(), 4);
    }
}
