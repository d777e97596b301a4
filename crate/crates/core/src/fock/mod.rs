//! Finite-mode fermionic Fock space in the occupation-bitmask basis.
//!
//! Basis state `b` has mode `j` occupied iff bit `j−1` of `b` is set, and
//! stands for `c†_{j₁}c†_{j₂}⋯c†_{j_k}|0⟩` with `j₁ < j₂ < ⋯ < j_k`.
//! Creating into mode `j` therefore picks up `(−1)^{#occupied modes < j}`.
//!
//! Operators are complex sparse matrices: the pseudo-fermions of a finite
//! truncation are built from a complex eigensystem whenever the truncated
//! spectrum has conjugate pairs.

mod inner;
mod pseudo;

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sprs::{CsMat, TriMat};

use crate::error::{domain, Result};
use crate::params::ModelParams;

pub use inner::{compound_lift, physical_inner_fock, sector_vector};
pub use pseudo::{
    build_pseudo_fermions, build_t_operators_fock, diagonal_form_residual, FockTOperators,
    PseudoFermionSet, TComparison,
};

/// Largest supported mode count (`2^14 = 16384` basis states).
pub const MAX_MODES: usize = 14;

/// Largest mode count accepted by [`joint_spectrum`], which stores no matrices.
pub const MAX_JOINT_MODES: usize = 24;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    pub modes: usize,
    pub dimension: usize,
}

pub fn build_fock(modes: usize) -> Result<FockSpace> {
    if modes == 0 || modes > MAX_MODES {
        return Err(domain(format!(
            "mode count must be in 1..={MAX_MODES}, got {modes}"
        )));
    }
    Ok(FockSpace {
        modes,
        dimension: 1 << modes,
    })
}

impl FockSpace {
    /// Basis states with exactly `k` particles, in ascending bitmask order.
    pub fn sector_states(&self, k: usize) -> Vec<usize> {
        (0..self.dimension)
            .filter(|b| b.count_ones() as usize == k)
            .collect()
    }

    pub fn sector_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.modes + 1];
        for b in 0..self.dimension {
            sizes[b.count_ones() as usize] += 1;
        }
        sizes
    }

    fn check_mode(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.modes {
            return Err(domain(format!("mode {j} outside 1..={}", self.modes)));
        }
        Ok(())
    }
}

/// `(−1)^{#occupied modes below mode j}` for 1-based `j`.
pub(crate) fn jw_sign(state: usize, j: usize) -> f64 {
    if (state & ((1usize << (j - 1)) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `c_i† c_j |state⟩ = sign |target⟩`, or `None` if it vanishes.
pub(crate) fn hop(state: usize, i: usize, j: usize) -> Option<(f64, usize)> {
    let jb = 1usize << (j - 1);
    if state & jb == 0 {
        return None;
    }
    let mid = state ^ jb;
    let s1 = jw_sign(mid, j);
    let ib = 1usize << (i - 1);
    if mid & ib != 0 {
        return None;
    }
    Some((s1 * jw_sign(mid, i), mid | ib))
}

/// A labelled sparse operator on a [`FockSpace`].
#[derive(Debug, Clone)]
pub struct FockOperator {
    pub label: String,
    pub modes: usize,
    pub matrix: CsMat<Complex64>,
}

impl fmt::Display for FockOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} on {} modes ({} nonzeros)",
            self.label,
            self.modes,
            self.matrix.nnz()
        )
    }
}

impl FockOperator {
    pub fn from_triplets(
        space: &FockSpace,
        label: impl Into<String>,
        triplets: TriMat<Complex64>,
    ) -> Self {
        debug_assert_eq!(triplets.shape(), (space.dimension, space.dimension));
        Self {
            label: label.into(),
            modes: space.modes,
            matrix: triplets.to_csr(),
        }
    }

    pub fn identity(space: &FockSpace) -> Self {
        Self {
            label: "I".into(),
            modes: space.modes,
            matrix: CsMat::eye(space.dimension),
        }
    }

    pub fn zero(space: &FockSpace) -> Self {
        Self {
            label: "0".into(),
            modes: space.modes,
            matrix: CsMat::zero((space.dimension, space.dimension)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    fn derived(&self, label: String, matrix: CsMat<Complex64>) -> Self {
        Self {
            label,
            modes: self.modes,
            matrix,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.derived(
            format!("({} + {})", self.label, other.label),
            &self.matrix + &other.matrix,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.derived(
            format!("({} - {})", self.label, other.label),
            &self.matrix - &other.matrix,
        )
    }

    /// Operator product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        self.derived(
            format!("{}{}", self.label, other.label),
            &self.matrix * &other.matrix,
        )
    }

    pub fn scale(&self, z: Complex64) -> Self {
        self.derived(format!("{z}·{}", self.label), self.matrix.map(|&x| x * z))
    }

    pub fn transpose(&self) -> Self {
        self.derived(
            format!("{}ᵀ", self.label),
            self.matrix.transpose_view().to_csr(),
        )
    }

    pub fn adjoint(&self) -> Self {
        self.derived(
            format!("{}†", self.label),
            self.matrix.transpose_view().to_csr().map(|z| z.conj()),
        )
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        let m = &(&self.matrix * &other.matrix) + &(&other.matrix * &self.matrix);
        self.derived(format!("{{{}, {}}}", self.label, other.label), m)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        let m = &(&self.matrix * &other.matrix) - &(&other.matrix * &self.matrix);
        self.derived(format!("[{}, {}]", self.label, other.label), m)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.matrix.data().iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(
            v.len(),
            self.dim(),
            "vector length must match the Fock dimension"
        );
        self.matrix
            .outer_iterator()
            .map(|row| row.iter().map(|(j, z)| z * v[j]).sum())
            .collect()
    }

    /// Dense block with the given row and column basis states.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<Complex64> {
        let mut col_pos = vec![usize::MAX; self.dim()];
        for (p, &c) in cols.iter().enumerate() {
            col_pos[c] = p;
        }
        let mut out = DMatrix::from_element(rows.len(), cols.len(), ZERO);
        for (r, &row) in rows.iter().enumerate() {
            if let Some(view) = self.matrix.outer_view(row) {
                for (c, z) in view.iter() {
                    if col_pos[c] != usize::MAX {
                        out[(r, col_pos[c])] += *z;
                    }
                }
            }
        }
        out
    }

    /// Largest `|⟨b′|A|b⟩|` over every column state `b` accepted by `keep`.
    pub fn max_abs_on_columns(&self, keep: impl Fn(usize) -> bool) -> f64 {
        let mut best = 0.0f64;
        for view in self.matrix.outer_iterator() {
            for (c, z) in view.iter() {
                if keep(c) {
                    best = best.max(z.norm());
                }
            }
        }
        best
    }
}

pub fn creation_op(space: &FockSpace, j: usize) -> Result<FockOperator> {
    space.check_mode(j)?;
    let bit = 1usize << (j - 1);
    let mut t = TriMat::new((space.dimension, space.dimension));
    for b in (0..space.dimension).filter(|b| b & bit == 0) {
        t.add_triplet(b | bit, b, Complex64::new(jw_sign(b, j), 0.0));
    }
    Ok(FockOperator::from_triplets(space, format!("c{j}†"), t))
}

pub fn annihilation_op(space: &FockSpace, j: usize) -> Result<FockOperator> {
    Ok(creation_op(space, j)?
        .transpose()
        .with_label(format!("c{j}")))
}

/// `N_op = Σ c_j† c_j`, diagonal with the popcount.
pub fn number_op(space: &FockSpace) -> FockOperator {
    let mut t = TriMat::new((space.dimension, space.dimension));
    for b in 1..space.dimension {
        t.add_triplet(b, b, Complex64::new(b.count_ones() as f64, 0.0));
    }
    FockOperator::from_triplets(space, "N", t)
}

/// `Σ_{ij} A_ij c_i† c_j` for a complex `n×n` coefficient matrix, `n ≤ m`.
pub fn second_quantize_complex(space: &FockSpace, a: &DMatrix<Complex64>) -> Result<FockOperator> {
    let n = a.nrows();
    if !a.is_square() {
        return Err(domain("coefficient matrix must be square"));
    }
    if n > space.modes {
        return Err(domain(format!(
            "{n}x{n} coefficients exceed {} modes",
            space.modes
        )));
    }
    let mut t = TriMat::new((space.dimension, space.dimension));
    for b in 0..space.dimension {
        for j in 1..=n {
            for i in 1..=n {
                let z = a[(i - 1, j - 1)];
                if z == ZERO {
                    continue;
                }
                if let Some((sign, target)) = hop(b, i, j) {
                    t.add_triplet(target, b, z * sign);
                }
            }
        }
    }
    Ok(FockOperator::from_triplets(space, "A", t))
}

/// `Σ_{ij} A_ij c_i† c_j` for a real coefficient matrix.
pub fn second_quantize(space: &FockSpace, a: &DMatrix<f64>) -> Result<FockOperator> {
    second_quantize_complex(space, &a.map(|x| Complex64::new(x, 0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointSpectrumPoint {
    pub energy: f64,
    pub number: usize,
    pub occupation: u64,
}

/// All `(E, N)` pairs of `H` and `N_op` over occupations of the first
/// `modes` levels with at most `n_max` particles, using `λ_k = Λ(4k−3)/4`.
pub fn joint_spectrum(
    params: &ModelParams,
    modes: usize,
    n_max: usize,
) -> Result<Vec<JointSpectrumPoint>> {
    if modes > MAX_JOINT_MODES {
        return Err(domain(format!(
            "at most {MAX_JOINT_MODES} modes can be enumerated, got {modes}"
        )));
    }
    if n_max > modes {
        return Err(domain(format!(
            "n_max {n_max} exceeds the mode count {modes}"
        )));
    }
    let levels: Vec<f64> = (1..=modes.max(1))
        .map(|k| params.lambda_scale * (4 * k - 3) as f64 / 4.0)
        .collect();
    let mut out = Vec::new();
    for occ in 0u64..(1u64 << modes) {
        let number = occ.count_ones() as usize;
        if number > n_max {
            continue;
        }
        let energy = (0..modes)
            .filter(|k| occ >> k & 1 == 1)
            .map(|k| levels[k])
            .sum();
        out.push(JointSpectrumPoint {
            energy,
            number,
            occupation: occ,
        });
    }
    Ok(out)
}
