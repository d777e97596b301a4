//! Truncations of the semi-infinite su(1,1) generators and of `Ĥ`.
//!
//! With `s_k = √((2k−1)·2k)/(2√2)` the generators are
//!
//! ```text
//! Ŝ₀ = diag(1/4, 5/4, 9/4, …)     (Ŝ₊)_{k+1,k} = s_k     Ŝ₋ = Ŝ₊ᵀ
//! ```
//!
//! and satisfy `[Ŝ₋,Ŝ₀] = Ŝ₋`, `[Ŝ₀,Ŝ₊] = Ŝ₊`, `[Ŝ₋,Ŝ₊] = Ŝ₀`. A leading
//! `M×M` block keeps the first two relations exactly; the third fails only
//! in the `(M,M)` entry, which misses `s_M²`.

mod ladder;
mod spectrum;

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::params::ModelParams;

pub use ladder::{build_biorthogonal, ground_vectors, BiorthogonalSystem};
pub use spectrum::{
    dense_spectrum, hamiltonian_spectrum, refine_tridiagonal_eigenvalues, schur_eigenvalues,
    tridiagonal_char_poly, FiniteEigensystem,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorLabel {
    S0,
    Splus,
    Sminus,
    H,
    T0,
    Tplus,
    Tminus,
    D2,
    Other,
}

impl fmt::Display for OperatorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::S0 => "S0",
            Self::Splus => "S+",
            Self::Sminus => "S-",
            Self::H => "H",
            Self::T0 => "T0",
            Self::Tplus => "T+",
            Self::Tminus => "T-",
            Self::D2 => "D2",
            Self::Other => "other",
        };
        f.write_str(s)
    }
}

/// A labelled `M×M` real block of one of the semi-infinite operators.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    pub label: OperatorLabel,
    pub entries: DMatrix<f64>,
}

impl TruncatedOperator {
    pub fn new(label: OperatorLabel, entries: DMatrix<f64>) -> Self {
        debug_assert!(entries.is_square());
        Self { label, entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn transpose(&self) -> Self {
        Self::new(OperatorLabel::Other, self.entries.transpose())
    }

    /// True when every entry outside the three central diagonals is zero.
    pub fn is_tridiagonal(&self) -> bool {
        let m = &self.entries;
        (0..m.nrows()).all(|i| {
            (0..m.ncols())
                .filter(|&j| i.abs_diff(j) > 1)
                .all(|j| m[(i, j)] == 0.0)
        })
    }
}

/// Ladder coefficient `s_k = √((2k−1)·2k/8)` linking levels `k` and `k+1`.
pub fn ladder_coefficient(k: usize) -> f64 {
    let k = k as f64;
    ((2.0 * k - 1.0) * 2.0 * k / 8.0).sqrt()
}

#[derive(Debug, Clone)]
pub struct Generators {
    pub s0: TruncatedOperator,
    pub splus: TruncatedOperator,
    pub sminus: TruncatedOperator,
}

impl Generators {
    pub fn dim(&self) -> usize {
        self.s0.dim()
    }

    /// `Ŝ₊ + Ŝ₋`, the symmetric generator of the metric.
    pub fn symmetric_sum(&self) -> DMatrix<f64> {
        &self.splus.entries + &self.sminus.entries
    }

    /// `Ŝ₊ − Ŝ₋`.
    pub fn antisymmetric_difference(&self) -> DMatrix<f64> {
        &self.splus.entries - &self.sminus.entries
    }
}

pub fn build_generators(dim: usize) -> Result<Generators> {
    if dim < 2 {
        return Err(domain(format!(
            "truncation order must be at least 2, got {dim}"
        )));
    }
    let s0 = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            (4 * (i + 1) - 3) as f64 / 4.0
        } else {
            0.0
        }
    });
    let splus = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j + 1 {
            ladder_coefficient(j + 1)
        } else {
            0.0
        }
    });
    let sminus = splus.transpose();
    Ok(Generators {
        s0: TruncatedOperator::new(OperatorLabel::S0, s0),
        splus: TruncatedOperator::new(OperatorLabel::Splus, splus),
        sminus: TruncatedOperator::new(OperatorLabel::Sminus, sminus),
    })
}

/// `Ĥ = Ŝ₀ + γ(Ŝ₊ − Ŝ₋)` truncated to `dim×dim`.
pub fn build_hamiltonian(params: &ModelParams, dim: usize) -> Result<TruncatedOperator> {
    let g = build_generators(dim)?;
    Ok(hamiltonian_from(&g, params.gamma))
}

pub(crate) fn hamiltonian_from(g: &Generators, gamma: f64) -> TruncatedOperator {
    let h = &g.s0.entries + (&g.splus.entries - &g.sminus.entries) * gamma;
    TruncatedOperator::new(OperatorLabel::H, h)
}

/// The `T̂₀, T̂₊, T̂₋` triple.
#[derive(Debug, Clone)]
pub struct TOperators {
    pub t0: TruncatedOperator,
    pub tplus: TruncatedOperator,
    pub tminus: TruncatedOperator,
}

/// Coefficients of `(Ŝ₀, Ŝ₊, Ŝ₋)` in `T̂₀`, `T̂₊` and `T̂₋`, in that order.
pub fn t_coefficients(params: &ModelParams) -> [[f64; 3]; 3] {
    let (g, l) = (params.gamma, params.lambda_scale);
    [
        [1.0 / l, g / l, -g / l],
        [-g / l, (1.0 + l) / (2.0 * l), -(1.0 - l) / (2.0 * l)],
        [g / l, -(1.0 - l) / (2.0 * l), (1.0 + l) / (2.0 * l)],
    ]
}

pub fn build_t_operators(params: &ModelParams, dim: usize) -> Result<TOperators> {
    let g = build_generators(dim)?;
    Ok(t_operators_from(&g, params))
}

pub(crate) fn t_operators_from(g: &Generators, params: &ModelParams) -> TOperators {
    let c = t_coefficients(params);
    let combo = |row: [f64; 3]| {
        &g.s0.entries * row[0] + &g.splus.entries * row[1] + &g.sminus.entries * row[2]
    };
    TOperators {
        t0: TruncatedOperator::new(OperatorLabel::T0, combo(c[0])),
        tplus: TruncatedOperator::new(OperatorLabel::Tplus, combo(c[1])),
        tminus: TruncatedOperator::new(OperatorLabel::Tminus, combo(c[2])),
    }
}

pub fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

/// Max-norm of the leading `block×block` corner of `a`.
pub fn block_max_abs(a: &DMatrix<f64>, block: usize) -> f64 {
    let b = block.min(a.nrows()).min(a.ncols());
    a.view((0, 0), (b, b))
        .iter()
        .fold(0.0, |m, x| m.max(x.abs()))
}

/// Residuals of the three su(1,1) relations `[A₋,A₀]−A₋`, `[A₀,A₊]−A₊`,
/// `[A₋,A₊]−A₀` on the leading `block×block` corner.
pub fn su11_residuals(
    zero: &DMatrix<f64>,
    plus: &DMatrix<f64>,
    minus: &DMatrix<f64>,
    block: usize,
) -> [f64; 3] {
    [
        block_max_abs(&(commutator(minus, zero) - minus), block),
        block_max_abs(&(commutator(zero, plus) - plus), block),
        block_max_abs(&(commutator(minus, plus) - zero), block),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;

    #[test]
    fn generator_entries() {
        let g = build_generators(2).unwrap();
        assert!((g.splus.entries[(1, 0)] - 0.5).abs() < 1e-15);
        assert_eq!(g.sminus.entries[(0, 1)], g.splus.entries[(1, 0)]);

        let g = build_generators(3).unwrap();
        let diag: Vec<f64> = g.s0.entries.diagonal().iter().copied().collect();
        assert_eq!(diag, vec![0.25, 1.25, 2.25]);
        assert!(build_generators(1).is_err());
    }

    #[test]
    fn commutators_on_interior_block() {
        let g = build_generators(5).unwrap();
        let r = su11_residuals(&g.s0.entries, &g.splus.entries, &g.sminus.entries, 4);
        assert!(r.iter().all(|&x| x < 1e-14), "{r:?}");
        // The last diagonal entry of [Ŝ₋,Ŝ₊] misses s_5².
        let full = su11_residuals(&g.s0.entries, &g.splus.entries, &g.sminus.entries, 5);
        assert!((full[2] - ladder_coefficient(5).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_shape() {
        let p = make_params(0.0).unwrap();
        let h = build_hamiltonian(&p, 6).unwrap();
        assert_eq!(h.entries, DMatrix::from_diagonal(&h.entries.diagonal()));

        let p = make_params(0.6).unwrap();
        let h = build_hamiltonian(&p, 2).unwrap();
        assert!((h.entries[(0, 1)] + 0.3).abs() < 1e-15);
        assert!((h.entries[(1, 0)] - 0.3).abs() < 1e-15);
        assert!(build_hamiltonian(&p, 40).unwrap().is_tridiagonal());
    }

    #[test]
    fn t_operators() {
        let p = make_params(0.0).unwrap();
        let g = build_generators(6).unwrap();
        let t = build_t_operators(&p, 6).unwrap();
        assert_eq!(t.t0.entries, g.s0.entries);
        assert_eq!(t.tplus.entries, g.splus.entries);
        assert_eq!(t.tminus.entries, g.sminus.entries);

        let p = make_params(0.6).unwrap();
        let g = build_generators(6).unwrap();
        let t = build_t_operators(&p, 6).unwrap();
        let expect = (&g.s0.entries + g.antisymmetric_difference() * 0.6) / 1.311_487_704_860_400_1;
        assert!((&t.t0.entries - expect).amax() < 1e-14);

        let h = build_hamiltonian(&p, 30).unwrap();
        let t = build_t_operators(&p, 30).unwrap();
        assert!((&h.entries / p.lambda_scale - &t.t0.entries).amax() < 1e-13);

        // Non-self-adjointness witnesses.
        assert!((&t.t0.entries - t.t0.entries.transpose()).amax() > 0.1);
        assert!((&t.tminus.entries - t.tplus.entries.transpose()).amax() > 0.1);
    }

    #[test]
    fn t_triple_satisfies_su11() {
        for gamma in [-1.5, 0.2, 0.6, 3.0] {
            let p = make_params(gamma).unwrap();
            let t = build_t_operators(&p, 12).unwrap();
            let r = su11_residuals(&t.t0.entries, &t.tplus.entries, &t.tminus.entries, 10);
            assert!(r.iter().all(|&x| x < 1e-12), "gamma {gamma}: {r:?}");
        }
    }
}
