//! Pseudo-fermions of a finite truncation and the operators built on them.
//!
//! With right eigenvectors `u_i` and bilinear-dual left eigenvectors `v_i`
//! of the `m×m` truncation (`VᵀU = I`):
//!
//! ```text
//! d_i‡ = Σ_k (u_i)_k c_k†      d_i = Σ_k (v_i)_k c_k      {d_i‡, d_j} = δ_ij
//! H = Σ_k λ_k^{(m)} d_k‡ d_k
//! ```

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{annihilation_op, creation_op, second_quantize, FockOperator, FockSpace, ONE, ZERO};
use crate::algebra::ladder_coefficient;
use crate::algebra::{build_generators, t_operators_from, FiniteEigensystem, Generators};
use crate::error::{Error, Result};
use crate::params::ModelParams;

#[derive(Debug, Clone)]
pub struct PseudoFermionSet {
    pub count: usize,
    pub d_dag: Vec<FockOperator>,
    pub d: Vec<FockOperator>,
    pub source: FiniteEigensystem,
}

fn combine(
    space: &FockSpace,
    ops: &[FockOperator],
    coeffs: impl Iterator<Item = Complex64>,
    label: String,
) -> FockOperator {
    let mut acc = FockOperator::zero(space);
    for (op, z) in ops.iter().zip(coeffs) {
        if z != ZERO {
            acc = acc.add(&op.scale(z));
        }
    }
    acc.with_label(label)
}

/// Builds `d_i‡`, `d_i` from the exact eigensystem of an `m×m` truncation.
///
/// Fails with [`Error::Precondition`] if the eigensystem does not match the
/// mode count or its bilinear Gram defect exceeds `tol`.
pub fn build_pseudo_fermions(
    space: &FockSpace,
    source: &FiniteEigensystem,
    tol: f64,
) -> Result<PseudoFermionSet> {
    let m = space.modes;
    if source.dim() != m {
        return Err(Error::Precondition(format!(
            "eigensystem has dimension {} but the space has {m} modes",
            source.dim()
        )));
    }
    if !(source.gram_defect <= tol) {
        return Err(Error::Precondition(format!(
            "biorthogonal Gram defect {:e} exceeds {tol:e}",
            source.gram_defect
        )));
    }
    let cd: Vec<_> = (1..=m)
        .map(|k| creation_op(space, k))
        .collect::<Result<_>>()?;
    let c: Vec<_> = (1..=m)
        .map(|k| annihilation_op(space, k))
        .collect::<Result<_>>()?;
    let d_dag = (0..m)
        .map(|i| {
            combine(
                space,
                &cd,
                source.right.column(i).iter().copied(),
                format!("d{}‡", i + 1),
            )
        })
        .collect();
    let d = (0..m)
        .map(|i| {
            combine(
                space,
                &c,
                source.left.column(i).iter().copied(),
                format!("d{}", i + 1),
            )
        })
        .collect();
    Ok(PseudoFermionSet {
        count: m,
        d_dag,
        d,
        source: source.clone(),
    })
}

impl PseudoFermionSet {
    /// Max-norm defects of `{d_i‡,d_j} − δ_ij`, `{d_i‡,d_j‡}` and `{d_i,d_j}`.
    pub fn anticommutator_defects(&self) -> [f64; 3] {
        let space = FockSpace {
            modes: self.count,
            dimension: 1 << self.count,
        };
        let id = FockOperator::identity(&space);
        let mut out = [0.0f64; 3];
        for i in 0..self.count {
            for j in 0..self.count {
                let mixed = self.d_dag[i].anticommutator(&self.d[j]);
                let mixed = if i == j { mixed.sub(&id) } else { mixed };
                out[0] = out[0].max(mixed.max_abs());
                out[1] = out[1].max(self.d_dag[i].anticommutator(&self.d_dag[j]).max_abs());
                out[2] = out[2].max(self.d[i].anticommutator(&self.d[j]).max_abs());
            }
        }
        out
    }

    /// `‖d_i‡ − d_i†‖` in max-norm: zero only for true fermions.
    pub fn adjoint_gap(&self, i: usize) -> f64 {
        self.d_dag[i].sub(&self.d[i].adjoint()).max_abs()
    }

    /// `d_i‡ d_i`.
    pub fn occupation(&self, i: usize) -> FockOperator {
        self.d_dag[i].compose(&self.d[i])
    }

    /// `d‡_{i₁} d‡_{i₂} ⋯ |0⟩` for the set bits of `occupation`, ascending.
    pub fn state(&self, occupation: usize) -> Vec<Complex64> {
        let mut v = vec![ZERO; 1 << self.count];
        v[0] = ONE;
        for i in (0..self.count).rev() {
            if occupation >> i & 1 == 1 {
                v = self.d_dag[i].apply(&v);
            }
        }
        v
    }

    /// `Σ_k A_{kl} d_k‡ d_l` for a complex pattern matrix.
    pub fn bilinear(&self, a: &DMatrix<Complex64>, label: impl Into<String>) -> FockOperator {
        let space = FockSpace {
            modes: self.count,
            dimension: 1 << self.count,
        };
        let mut acc = FockOperator::zero(&space);
        for k in 0..a.nrows().min(self.count) {
            for l in 0..a.ncols().min(self.count) {
                let z = a[(k, l)];
                if z != ZERO {
                    acc = acc.add(&self.d_dag[k].compose(&self.d[l]).scale(z));
                }
            }
        }
        acc.with_label(label)
    }
}

/// `‖H − Σ_k λ_k^{(m)} d_k‡ d_k‖` in max-norm, `H` the second-quantized
/// `m×m` truncation.
pub fn diagonal_form_residual(
    space: &FockSpace,
    params: &ModelParams,
    pf: &PseudoFermionSet,
) -> Result<f64> {
    let g = build_generators(space.modes.max(2))?;
    let h = crate::algebra::hamiltonian_from(&g, params.gamma).entries;
    let h = h.view((0, 0), (space.modes, space.modes)).clone_owned();
    let hf = second_quantize(space, &h)?;
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(pf.source.eigenvalues.clone()));
    Ok(hf.sub(&pf.bilinear(&diag, "Σλd‡d")).max_abs())
}

#[derive(Debug, Clone)]
pub struct FockTOperators {
    pub t0: FockOperator,
    pub tplus: FockOperator,
    pub tminus: FockOperator,
}

impl FockTOperators {
    fn as_array(&self) -> [&FockOperator; 3] {
        [&self.t0, &self.tplus, &self.tminus]
    }

    /// `[T₋,T₀]−T₋`, `[T₀,T₊]−T₊`, `[T₋,T₊]−T₀`.
    pub fn su11_defects(&self) -> [FockOperator; 3] {
        [
            self.tminus.commutator(&self.t0).sub(&self.tminus),
            self.t0.commutator(&self.tplus).sub(&self.tplus),
            self.tminus.commutator(&self.tplus).sub(&self.t0),
        ]
    }
}

/// Both realizations of the `T` triple on a finite mode set and how far
/// apart they are.
#[derive(Debug, Clone)]
pub struct TComparison {
    /// Second-quantized linear combinations of `S₀, S₊, S₋`.
    pub combination: FockTOperators,
    /// `T₀ = Σ (4k−3)/4 d_k‡d_k`, `T₊ = Σ s_k d_{k+1}‡d_k`, `T₋ = Σ s_k d_k‡d_{k+1}`.
    pub bilinear: FockTOperators,
    /// Max-norm gap between the two on the one-particle sector, per operator.
    pub sector_one_gap: [f64; 3],
    /// Relative residual of `T₊ψ₁` as an eigenvector with eigenvalue `λ₂^{(m)}`,
    /// for the combination and the bilinear `T₊`.
    pub raising_residual: [f64; 2],
    /// su(1,1) defects of the combination triple on states with mode `m` empty.
    pub combination_su11: [f64; 3],
    /// su(1,1) defects of the bilinear triple on pseudo-states with `d_m‡d_m = 0`.
    pub bilinear_su11: [f64; 3],
}

fn combination_ops(
    space: &FockSpace,
    g: &Generators,
    params: &ModelParams,
) -> Result<FockTOperators> {
    let t = t_operators_from(g, params);
    Ok(FockTOperators {
        t0: second_quantize(space, &t.t0.entries)?.with_label("T0"),
        tplus: second_quantize(space, &t.tplus.entries)?.with_label("T+"),
        tminus: second_quantize(space, &t.tminus.entries)?.with_label("T-"),
    })
}

fn bilinear_ops(pf: &PseudoFermionSet) -> FockTOperators {
    let m = pf.count;
    let t0 = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            Complex64::new((4 * (i + 1) - 3) as f64 / 4.0, 0.0)
        } else {
            ZERO
        }
    });
    let plus = DMatrix::from_fn(m, m, |i, j| {
        if i == j + 1 {
            Complex64::new(ladder_coefficient(j + 1), 0.0)
        } else {
            ZERO
        }
    });
    let minus = plus.transpose();
    FockTOperators {
        t0: pf.bilinear(&t0, "T0‡"),
        tplus: pf.bilinear(&plus, "T+‡"),
        tminus: pf.bilinear(&minus, "T-‡"),
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn eigen_residual(h: &FockOperator, v: &[Complex64], lambda: Complex64) -> f64 {
    let hv = h.apply(v);
    let r: Vec<Complex64> = hv.iter().zip(v).map(|(a, b)| a - b * lambda).collect();
    norm(&r) / norm(v)
}

pub fn build_t_operators_fock(
    space: &FockSpace,
    params: &ModelParams,
    pf: &PseudoFermionSet,
) -> Result<TComparison> {
    let m = space.modes;
    if pf.count != m || m < 2 {
        return Err(Error::Precondition(format!(
            "pseudo-fermion set has {} modes, space has {m} (need at least 2)",
            pf.count
        )));
    }
    let g = build_generators(m)?;
    let combination = combination_ops(space, &g, params)?;
    let bilinear = bilinear_ops(pf);

    let one = space.sector_states(1);
    let mut sector_one_gap = [0.0; 3];
    for (slot, (a, b)) in combination
        .as_array()
        .into_iter()
        .zip(bilinear.as_array())
        .enumerate()
    {
        sector_one_gap[slot] = (a.block(&one, &one) - b.block(&one, &one))
            .iter()
            .fold(0.0f64, |acc, z| acc.max(z.norm()));
    }

    let h = second_quantize(
        space,
        &crate::algebra::hamiltonian_from(&g, params.gamma).entries,
    )?;
    let psi1 = pf.state(1);
    let lambda2 = pf.source.eigenvalues[1];
    let raising_residual = [
        eigen_residual(&h, &combination.tplus.apply(&psi1), lambda2),
        eigen_residual(&h, &bilinear.tplus.apply(&psi1), lambda2),
    ];

    let top = 1usize << (m - 1);
    let mut combination_su11 = [0.0; 3];
    for (slot, r) in combination.su11_defects().iter().enumerate() {
        combination_su11[slot] = r.max_abs_on_columns(|b| b & top == 0);
    }
    let mut bilinear_su11 = [0.0f64; 3];
    let defects = bilinear.su11_defects();
    for occ in (0..space.dimension).filter(|o| o & top == 0) {
        let v = pf.state(occ);
        let nv = norm(&v);
        for (slot, r) in defects.iter().enumerate() {
            bilinear_su11[slot] = bilinear_su11[slot].max(norm(&r.apply(&v)) / nv);
        }
    }
    Ok(TComparison {
        combination,
        bilinear,
        sector_one_gap,
        raising_residual,
        combination_su11,
        bilinear_su11,
    })
}
