//! The multi-particle metric `𝖣 = ∧^k G` and its inner product.
//!
//! On `k`-particle basis states `I, J` (ascending mode lists) the compound
//! matrix has entries `det G[I, J]`, which is exactly how a one-particle map
//! acts on `e_{j₁}∧⋯∧e_{j_k}`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{FockSpace, ZERO};
use crate::error::{domain, Result};

fn modes_of(state: usize) -> Vec<usize> {
    (0..usize::BITS as usize)
        .filter(|k| state >> k & 1 == 1)
        .collect()
}

/// `∧^k G` on the given basis states (all with the same popcount `k`).
pub fn compound_lift(g: &DMatrix<Complex64>, states: &[usize]) -> DMatrix<Complex64> {
    let index: Vec<Vec<usize>> = states.iter().map(|&s| modes_of(s)).collect();
    let n = states.len();
    DMatrix::from_fn(n, n, |a, b| {
        let (rows, cols) = (&index[a], &index[b]);
        let minor = DMatrix::from_fn(rows.len(), cols.len(), |i, j| g[(rows[i], cols[j])]);
        if minor.nrows() == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            minor.determinant()
        }
    })
}

/// Components of a Fock vector on sector `k`, failing if any amplitude lies
/// outside that sector.
pub fn sector_vector(space: &FockSpace, v: &[Complex64], k: usize) -> Result<Vec<Complex64>> {
    if v.len() != space.dimension {
        return Err(domain(format!(
            "vector length {} is not 2^{}",
            v.len(),
            space.modes
        )));
    }
    if let Some(b) = (0..v.len()).find(|&b| b.count_ones() as usize != k && v[b] != ZERO) {
        return Err(domain(format!(
            "vector has weight on basis state {b:#b} outside the {k}-particle sector"
        )));
    }
    Ok(space.sector_states(k).into_iter().map(|b| v[b]).collect())
}

/// `⟨𝖣Φ, Ψ⟩` with `𝖣 = ∧^k G`, conjugate-linear in `Φ`.
///
/// `G` is the one-particle metric; for Hermitian positive definite `G` the
/// result on `Φ = Ψ ≠ 0` is real and positive.
pub fn physical_inner_fock(
    space: &FockSpace,
    metric: &DMatrix<Complex64>,
    phi: &[Complex64],
    psi: &[Complex64],
    k: usize,
) -> Result<Complex64> {
    if metric.nrows() != space.modes || metric.ncols() != space.modes {
        return Err(domain(format!(
            "one-particle metric is {}x{}, expected {m}x{m}",
            metric.nrows(),
            metric.ncols(),
            m = space.modes
        )));
    }
    let a = sector_vector(space, phi, k)?;
    let b = sector_vector(space, psi, k)?;
    let lift = compound_lift(metric, &space.sector_states(k));
    let image = &lift * nalgebra::DVector::from_vec(a);
    Ok(image.iter().zip(&b).map(|(x, y)| x.conj() * y).sum())
}
