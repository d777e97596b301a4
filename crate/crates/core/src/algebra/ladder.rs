//! Closed-form eigenvectors of `Ĥ` and `Ĥᵀ` and the ladder built on them.
//!
//! The ground vectors have components
//!
//! ```text
//! ψ̂₁[k] = (−η)^(k−1) √(1·3···(2k−3) / 2·4···(2k−2)),   ψ̆₁[k] = same with +η
//! ```
//!
//! and satisfy `Ĥψ̂₁ = (Λ/4)ψ̂₁`, `Ĥᵀψ̆₁ = (Λ/4)ψ̆₁` up to a tail of order
//! `|η|^M`. Higher eigenvectors follow from `ψ̂ₙ₊₁ ∝ T̂₊ψ̂ₙ` and
//! `ψ̆ₙ₊₁ ∝ T̂₋ᵀψ̆ₙ`, each step raising the eigenvalue by `Λ`.

use nalgebra::{DMatrix, DVector};

use super::{build_generators, hamiltonian_from, t_operators_from};
use crate::error::{domain, Error, Result};
use crate::params::ModelParams;

/// Paired right/left eigenvectors with `⟨ψ̆_n, ψ̂_n⟩ = 1` and `‖ψ̂_n‖ = 1`.
#[derive(Debug, Clone)]
pub struct BiorthogonalSystem {
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    pub right_vectors: Vec<DVector<f64>>,
    pub left_vectors: Vec<DVector<f64>>,
    /// Largest relative eigen-residual over both families.
    pub max_residual: f64,
    /// Largest deviation of the mixed Gram matrix from the identity.
    pub gram_defect: f64,
}

impl BiorthogonalSystem {
    pub fn count(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `G[m][n] = ⟨ψ̆_m, ψ̂_n⟩`.
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.count();
        DMatrix::from_fn(n, n, |i, j| {
            self.left_vectors[i].dot(&self.right_vectors[j])
        })
    }
}

/// Closed-form `(ψ̂₁, ψ̆₁)`, first component equal to one.
pub fn ground_vectors(params: &ModelParams, dim: usize) -> Result<(DVector<f64>, DVector<f64>)> {
    if dim == 0 {
        return Err(domain("vector length must be positive"));
    }
    let mut right = DVector::zeros(dim);
    let mut left = DVector::zeros(dim);
    let mut magnitude = 1.0;
    let mut power = 1.0;
    for k in 0..dim {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        right[k] = sign * power * magnitude;
        left[k] = power * magnitude;
        // ratio of consecutive double-factorial square roots: √((2k+1)/(2k+2))
        let kk = k as f64;
        magnitude *= ((2.0 * kk + 1.0) / (2.0 * kk + 2.0)).sqrt();
        power *= params.eta;
    }
    Ok((right, left))
}

fn residual(op: &DMatrix<f64>, v: &DVector<f64>, lambda: f64) -> f64 {
    (op * v - v * lambda).norm() / v.norm()
}

/// Builds the first `count` biorthogonal pairs of the `dim×dim` truncation.
///
/// Fails with [`Error::Truncation`] when the ladder vectors feel the edge of
/// the truncation strongly enough that any invariant misses `tol`.
pub fn build_biorthogonal(
    params: &ModelParams,
    dim: usize,
    count: usize,
    tol: f64,
) -> Result<BiorthogonalSystem> {
    if count == 0 {
        return Err(domain("need at least one eigenpair"));
    }
    if 2 * count > dim {
        return Err(domain(format!(
            "count {count} exceeds half the truncation order {dim}"
        )));
    }
    let g = build_generators(dim)?;
    let h = hamiltonian_from(&g, params.gamma).entries;
    let ht = h.transpose();
    let t = t_operators_from(&g, params);
    let raise = &t.tplus.entries;
    let lower_t = t.tminus.entries.transpose();

    let (mut right, mut left) = ground_vectors(params, dim)?;
    let mut rights = Vec::with_capacity(count);
    let mut lefts = Vec::with_capacity(count);
    let mut eigenvalues = Vec::with_capacity(count);
    let mut max_residual = 0.0f64;
    let mut max_level_error = 0.0f64;

    for n in 1..=count {
        if n > 1 {
            right = raise * &right;
            left = &lower_t * &left;
        }
        right /= right.norm();
        let overlap = left.dot(&right);
        if overlap == 0.0 || !overlap.is_finite() {
            return Err(Error::Numerical(format!(
                "pair {n} has vanishing overlap ⟨ψ̆,ψ̂⟩ = {overlap}"
            )));
        }
        left /= overlap;

        let lambda = left.dot(&(&h * &right));
        max_residual = max_residual
            .max(residual(&h, &right, lambda))
            .max(residual(&ht, &left, lambda));
        let exact = params.mode_energy(n)?;
        max_level_error = max_level_error.max((lambda - exact).abs() / exact.abs().max(1.0));

        eigenvalues.push(lambda);
        rights.push(right.clone());
        lefts.push(left.clone());
    }

    let mut system = BiorthogonalSystem {
        dim,
        eigenvalues,
        right_vectors: rights,
        left_vectors: lefts,
        max_residual,
        gram_defect: 0.0,
    };
    let gram = system.gram();
    system.gram_defect = (gram - DMatrix::identity(count, count)).amax();

    let achieved = system
        .max_residual
        .max(system.gram_defect)
        .max(max_level_error);
    if achieved > tol {
        return Err(Error::Truncation {
            what: format!("{count} ladder pairs at truncation {dim}"),
            achieved,
            tol,
        });
    }
    Ok(system)
}
