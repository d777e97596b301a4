//! Grand-canonical thermodynamics of the one-particle ladder `λ_k = Λ(4k−3)/4`.
//!
//! With `x_k = βλ_k + ζ`, `ζ = −βμ`:
//!
//! ```text
//! log Z = Σ log(1 + e^{−x_k})      N = Σ f_k      E = Σ λ_k f_k      f_k = 1/(e^{x_k} + 1)
//! ```
//!
//! The exact route sums the modes until a certified geometric tail bound
//! drops below `tail_tol`. The Euler–Maclaurin route replaces the sum by the
//! integral plus two boundary corrections; with `u = e^{−ζ′}`, `c = βΛ`,
//! `ζ′ = ζ − ¾Λβ`:
//!
//! ```text
//! log Z ≈ −Li₂(−u)/c − ½ log(1+u) + c·u/(12(1+u))
//! ```
//!
//! and `E`, `N` are its analytic derivatives.

mod dilog;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::params::ModelParams;

pub use dilog::dilog;
use dilog::dilog_neg_exp;

/// Default absolute tail tolerance for the exact sums.
pub const DEFAULT_TAIL_TOL: f64 = 1e-14;

/// Hard cap on the number of modes an exact sum may visit.
pub const MAX_MODES: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    EulerMaclaurin,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::EulerMaclaurin => "euler_maclaurin",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoPoint {
    pub beta: f64,
    pub mu: f64,
    pub zeta: f64,
    pub zeta_prime: f64,
    pub log_z: f64,
    pub energy: f64,
    pub number: f64,
    pub entropy: f64,
    pub method: Method,
    /// Modes summed by the exact route; zero for Euler–Maclaurin.
    pub modes: usize,
}

/// `log(1 + e^{−x})` without overflow.
pub(crate) fn softplus_neg(x: f64) -> f64 {
    if x >= 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

/// `1/(e^x + 1)` without overflow.
pub(crate) fn fermi(x: f64) -> f64 {
    if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct Sum {
    hi: f64,
    lo: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.hi + x;
        if self.hi.abs() >= x.abs() {
            self.lo += (self.hi - t) + x;
        } else {
            self.lo += (x - t) + self.hi;
        }
        self.hi = t;
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(domain(format!(
            "beta must be positive and finite, got {beta}"
        )));
    }
    Ok(())
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(domain(format!("{name} must be finite, got {v}")));
    }
    Ok(())
}

fn check_tail_tol(tail_tol: f64) -> Result<()> {
    if !(tail_tol > 0.0) {
        return Err(domain(format!(
            "tail tolerance must be positive, got {tail_tol}"
        )));
    }
    Ok(())
}

/// Raw per-mode sums shared by the exact routes.
#[derive(Debug, Clone, Copy)]
struct ModeSums {
    log_z: f64,
    number: f64,
    energy: f64,
    /// `−Σ[f ln f + (1−f) ln(1−f)]`, summed mode by mode.
    mode_entropy: f64,
    modes: usize,
}

fn mode_sums(params: &ModelParams, beta: f64, zeta: f64, tail_tol: f64) -> Result<ModeSums> {
    check_beta(beta)?;
    check_finite("zeta", zeta)?;
    check_tail_tol(tail_tol)?;
    let step = beta * params.lambda_scale;
    let q = (-step).exp();
    let one_minus_q = -(-step).exp_m1();
    let (mut log_z, mut number, mut energy, mut entropy) = (
        Sum::default(),
        Sum::default(),
        Sum::default(),
        Sum::default(),
    );
    let mut k = 1usize;
    loop {
        let lambda = params.lambda_scale * (4 * k - 3) as f64 / 4.0;
        let x = beta * lambda + zeta;
        let f = fermi(x);
        let sp = softplus_neg(x);
        log_z.add(sp);
        number.add(f);
        energy.add(lambda * f);
        // ln f = −log(1+e^{x}), ln(1−f) = −log(1+e^{−x})
        let ln_f = -softplus_neg(-x);
        let ln_1mf = -sp;
        let one_minus_f = fermi(-x);
        let mut s = 0.0;
        if f > 0.0 {
            s -= f * ln_f;
        }
        if one_minus_f > 0.0 {
            s -= one_minus_f * ln_1mf;
        }
        entropy.add(s);

        // Every remaining term is bounded by e^{−x_j}, a geometric series
        // with ratio q starting at the next mode.
        if x > 0.0 {
            let next = (-(x + step)).exp();
            let tail = next / one_minus_q;
            let next_lambda = lambda + params.lambda_scale;
            let energy_tail = next
                * (next_lambda / one_minus_q
                    + params.lambda_scale * q / (one_minus_q * one_minus_q));
            let entropy_tail = next
                * ((x + step) / one_minus_q
                    + step * q / (one_minus_q * one_minus_q)
                    + 1.0 / one_minus_q);
            if tail < tail_tol && energy_tail < tail_tol && entropy_tail < tail_tol {
                break;
            }
        }
        k += 1;
        if k > MAX_MODES {
            return Err(Error::Numerical(format!(
                "exact sum did not reach tail tolerance {tail_tol:e} within {MAX_MODES} modes (beta = {beta})"
            )));
        }
    }
    Ok(ModeSums {
        log_z: log_z.value(),
        number: number.value(),
        energy: energy.value(),
        mode_entropy: entropy.value(),
        modes: k,
    })
}

/// `log Z` by direct summation with absolute tail error below `tail_tol`.
pub fn exact_log_z(params: &ModelParams, beta: f64, zeta: f64, tail_tol: f64) -> Result<f64> {
    Ok(mode_sums(params, beta, zeta, tail_tol)?.log_z)
}

/// Exact `(log Z, E, N, S)` at `(β, μ)`.
pub fn exact_expectations(
    params: &ModelParams,
    beta: f64,
    mu: f64,
    tail_tol: f64,
) -> Result<ThermoPoint> {
    check_finite("mu", mu)?;
    let zeta = -beta * mu;
    let sums = mode_sums(params, beta, zeta, tail_tol)?;
    let entropy = beta * (sums.energy - mu * sums.number) + sums.log_z;
    Ok(ThermoPoint {
        beta,
        mu,
        zeta,
        zeta_prime: zeta - 0.75 * params.lambda_scale * beta,
        log_z: sums.log_z,
        energy: sums.energy,
        number: sums.number,
        entropy,
        method: Method::Exact,
        modes: sums.modes,
    })
}

/// `−Σ[f_k ln f_k + (1−f_k) ln(1−f_k)]`, the entropy summed mode by mode.
pub fn mode_entropy(params: &ModelParams, beta: f64, mu: f64, tail_tol: f64) -> Result<f64> {
    check_finite("mu", mu)?;
    Ok(mode_sums(params, beta, -beta * mu, tail_tol)?.mode_entropy)
}

/// Pieces of the three-term approximation at `w = ζ′`, `c = βΛ`.
struct EmTerms {
    /// `Li₂(−e^{−w})`
    li2: f64,
    /// `log(1 + e^{−w})`
    log1p_u: f64,
    /// `u/(1+u)`
    frac: f64,
}

impl EmTerms {
    fn at(w: f64) -> Self {
        Self {
            li2: dilog_neg_exp(-w),
            log1p_u: softplus_neg(w),
            frac: fermi(w),
        }
    }
}

/// The three-term Euler–Maclaurin approximation of `log Z`.
pub fn em_log_z(params: &ModelParams, beta: f64, zeta: f64) -> Result<f64> {
    check_beta(beta)?;
    check_finite("zeta", zeta)?;
    let c = beta * params.lambda_scale;
    let w = zeta - 0.75 * params.lambda_scale * beta;
    let t = EmTerms::at(w);
    Ok(-t.li2 / c - 0.5 * t.log1p_u + c * t.frac / 12.0)
}

/// `E = −∂_β log Z` and `N = −∂_ζ log Z` of [`em_log_z`], taken analytically.
pub fn em_expectations(params: &ModelParams, beta: f64, mu: f64) -> Result<ThermoPoint> {
    check_finite("mu", mu)?;
    let zeta = -beta * mu;
    let log_z = em_log_z(params, beta, zeta)?;
    let l = params.lambda_scale;
    let c = beta * l;
    let w = zeta - 0.75 * l * beta;
    let t = EmTerms::at(w);
    let number = t.log1p_u / c - 0.5 * t.frac + c * t.frac * (1.0 - t.frac) / 12.0;
    let energy = -l * t.li2 / (c * c) - l * t.frac / 12.0 - 0.75 * l * number;
    let entropy = beta * (energy - mu * number) + log_z;
    Ok(ThermoPoint {
        beta,
        mu,
        zeta,
        zeta_prime: w,
        log_z,
        energy,
        number,
        entropy,
        method: Method::EulerMaclaurin,
        modes: 0,
    })
}
