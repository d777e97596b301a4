//! The metric `D̂² = exp(2α(Ŝ₊+Ŝ₋))` that makes `Ĥ` self-adjoint.
//!
//! Conjugation by `e^{α(Ŝ₊+Ŝ₋)}` carries the `Ŝ` triple onto the `T̂` triple,
//! and `D̂²Ĥ = ĤᵀD̂²`. On an `M×M` truncation these identities only hold on a
//! leading block: the exponential of the truncated generator differs from
//! the truncated exponential, and the difference creeps inward from the edge
//! while the entries grow like `(Λ+√2|γ|)^{2k}`. [`interior_block`] fixes the
//! block used for every residual in this module.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::algebra::{
    block_max_abs, build_generators, hamiltonian_from, t_operators_from, OperatorLabel,
    TruncatedOperator,
};
use crate::error::{domain, Error, Result};
use crate::params::ModelParams;

/// Relative asymmetry accepted by [`sym_exp`].
const SYMMETRY_TOL: f64 = 1e-12;

/// Largest column-sum norm fed to the Taylor series of [`tridiagonal_exp`].
const MAX_TAYLOR_NORM: f64 = 256.0;

/// `e^{tA}` for symmetric `A` by spectral mapping.
pub fn sym_exp(a: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(domain("matrix must be square"));
    }
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let asym = (a - a.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(domain(format!(
            "matrix is not symmetric (max |A−Aᵀ| = {asym:e})"
        )));
    }
    if t == 0.0 {
        return Ok(DMatrix::identity(a.nrows(), a.ncols()));
    }
    let eig = SymmetricEigen::new(a.clone());
    let mapped = eig.eigenvalues.map(|x| (t * x).exp());
    if mapped.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical(format!("exp overflow for t = {t}")));
    }
    let v = &eig.eigenvectors;
    let out = v * DMatrix::from_diagonal(&mapped) * v.transpose();
    Ok((&out + out.transpose()) * 0.5)
}

/// `e^{tA}` for symmetric tridiagonal `A`, accurate entry by entry.
///
/// A diagonal sign similarity `J` turns `tA` into a matrix with nonnegative
/// off-diagonal entries; after shifting out the smallest diagonal entry the
/// whole Taylor/squaring pipeline adds nonnegative numbers only, so even the
/// tiny entries far from the diagonal keep full relative precision. Spectral
/// mapping only reaches absolute accuracy `eps·e^{t·λmax}`.
pub fn tridiagonal_exp(a: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(domain("matrix must be square and non-empty"));
    }
    let n = a.nrows();
    if !TruncatedOperator::new(OperatorLabel::Other, a.clone()).is_tridiagonal() {
        return Err(domain("matrix is not tridiagonal"));
    }
    if (0..n - 1).any(|i| a[(i, i + 1)] != a[(i + 1, i)]) {
        return Err(domain("matrix is not symmetric"));
    }
    if t == 0.0 {
        return Ok(DMatrix::identity(n, n));
    }
    let mut sign = vec![1.0; n];
    for i in 1..n {
        let off = t * a[(i - 1, i)];
        sign[i] = if off < 0.0 { -sign[i - 1] } else { sign[i - 1] };
    }
    let shift = (0..n).map(|i| t * a[(i, i)]).fold(f64::INFINITY, f64::min);
    let b = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            t * a[(i, i)] - shift
        } else {
            sign[i] * sign[j] * t * a[(i, j)]
        }
    });
    // With nonnegative terms the plain Taylor series has no cancellation, so
    // squaring (which doubles the relative error each time) is only used
    // once the series would need too many terms.
    let norm = b.column_iter().map(|c| c.sum()).fold(0.0, f64::max);
    let squarings = if norm > MAX_TAYLOR_NORM {
        (norm / MAX_TAYLOR_NORM).log2().ceil() as i32
    } else {
        0
    };
    let b = b / 2f64.powi(squarings);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    let mut k = 1usize;
    loop {
        term = &term * &b / k as f64;
        sum += &term;
        let tail = term.amax() * (1.0 + norm);
        if k as f64 > norm
            && (tail == 0.0 || tail <= 1e-3 * f64::EPSILON * sum.min().max(f64::MIN_POSITIVE))
        {
            break;
        }
        if k > 4 * MAX_TAYLOR_NORM as usize + 100 {
            return Err(Error::Numerical(format!(
                "exp Taylor series did not settle after {k} terms"
            )));
        }
        k += 1;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    let scale = shift.exp();
    let out = DMatrix::from_fn(n, n, |i, j| sign[i] * sign[j] * sum[(i, j)] * scale);
    if out.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical(format!("exp overflow for t = {t}")));
    }
    Ok(out)
}

/// Leading block on which metric identities are checked: `⌈M/6⌉`.
pub fn interior_block(dim: usize) -> usize {
    dim.div_ceil(6)
}

#[derive(Debug, Clone)]
pub struct MetricOperator {
    pub dim: usize,
    pub alpha: f64,
    pub d2: DMatrix<f64>,
    /// Principal square root `e^{α(Ŝ₊+Ŝ₋)}`.
    pub d: DMatrix<f64>,
    /// `e^{−α(Ŝ₊+Ŝ₋)}`.
    pub d_inv: DMatrix<f64>,
}

pub fn build_metric(params: &ModelParams, dim: usize) -> Result<MetricOperator> {
    let x = build_generators(dim)?.symmetric_sum();
    let alpha = params.alpha;
    let d2 = tridiagonal_exp(&x, 2.0 * alpha)?;
    let d = tridiagonal_exp(&x, alpha)?;
    let d_inv = tridiagonal_exp(&x, -alpha)?;
    let min_diag = d2.diagonal().min();
    if !(min_diag > 0.0) {
        return Err(Error::Numerical(format!(
            "metric lost positivity: smallest diagonal entry {min_diag:e}"
        )));
    }
    Ok(MetricOperator {
        dim,
        alpha,
        d2,
        d,
        d_inv,
    })
}

impl MetricOperator {
    pub fn as_operator(&self) -> TruncatedOperator {
        TruncatedOperator::new(OperatorLabel::D2, self.d2.clone())
    }

    /// `D Ĥ D⁻¹`, symmetric on the interior block.
    pub fn similar(&self, h: &DMatrix<f64>) -> DMatrix<f64> {
        &self.d * h * &self.d_inv
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    S0,
    Splus,
    Sminus,
}

/// `e^{−α(Ŝ₊+Ŝ₋)} X e^{α(Ŝ₊+Ŝ₋)}` for one of the three generators.
pub fn conjugate_generator(
    params: &ModelParams,
    dim: usize,
    which: Generator,
) -> Result<TruncatedOperator> {
    let metric = build_metric(params, dim)?;
    Ok(conjugate_with(&metric, which))
}

fn conjugate_with(metric: &MetricOperator, which: Generator) -> TruncatedOperator {
    let g = build_generators(metric.dim).expect("metric dimension is at least 2");
    let (x, label) = match which {
        Generator::S0 => (&g.s0.entries, OperatorLabel::T0),
        Generator::Splus => (&g.splus.entries, OperatorLabel::Tplus),
        Generator::Sminus => (&g.sminus.entries, OperatorLabel::Tminus),
    };
    TruncatedOperator::new(label, &metric.d_inv * x * &metric.d)
}

/// `⟨D²u, v⟩`.
pub fn physical_inner(metric: &MetricOperator, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    if u.len() != metric.dim || v.len() != metric.dim {
        return Err(domain(format!(
            "vector lengths {} and {} do not match metric dimension {}",
            u.len(),
            v.len(),
            metric.dim
        )));
    }
    Ok((&metric.d2 * u).dot(v))
}

/// Interior-block max-norms of every metric identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricResiduals {
    pub block: usize,
    /// `D²Ĥ − ĤᵀD²`.
    pub hermitization: f64,
    /// `D²T̂₊ − T̂₋ᵀD²`.
    pub t_adjoint: f64,
    /// `D Ĥ D⁻¹ − (D Ĥ D⁻¹)ᵀ`.
    pub similarity_asymmetry: f64,
    /// Conjugated `Ŝ₀, Ŝ₊, Ŝ₋` against `T̂₀, T̂₊, T̂₋`.
    pub conjugation: [f64; 3],
}

impl MetricResiduals {
    pub fn max(&self) -> f64 {
        self.conjugation.iter().fold(
            self.hermitization
                .max(self.t_adjoint)
                .max(self.similarity_asymmetry),
            |m, &x| m.max(x),
        )
    }
}

pub fn metric_residuals(params: &ModelParams, metric: &MetricOperator) -> MetricResiduals {
    let dim = metric.dim;
    let block = interior_block(dim);
    let g = build_generators(dim).expect("metric dimension is at least 2");
    let h = hamiltonian_from(&g, params.gamma).entries;
    let t = t_operators_from(&g, params);
    let d2 = &metric.d2;

    let hermitization = block_max_abs(&(d2 * &h - h.transpose() * d2), block);
    let t_adjoint = block_max_abs(
        &(d2 * &t.tplus.entries - t.tminus.entries.transpose() * d2),
        block,
    );
    let sim = metric.similar(&h);
    let similarity_asymmetry = block_max_abs(&(&sim - sim.transpose()), block);
    let targets = [&t.t0.entries, &t.tplus.entries, &t.tminus.entries];
    let mut conjugation = [0.0; 3];
    for (slot, (which, target)) in [Generator::S0, Generator::Splus, Generator::Sminus]
        .into_iter()
        .zip(targets)
        .enumerate()
    {
        conjugation[slot] = block_max_abs(&(conjugate_with(metric, which).entries - target), block);
    }
    MetricResiduals {
        block,
        hermitization,
        t_adjoint,
        similarity_asymmetry,
        conjugation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_biorthogonal, build_hamiltonian, dense_spectrum, ground_vectors};
    use crate::params::make_params;

    /// Independent `e^A`: Taylor series on `A/2^s`, then `s` squarings.
    fn expm_scaling_squaring(a: &DMatrix<f64>) -> DMatrix<f64> {
        let norm = a
            .row_iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let s = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as i32
        } else {
            0
        };
        let b = a / 2f64.powi(s);
        let n = a.nrows();
        let mut term = DMatrix::<f64>::identity(n, n);
        let mut sum = term.clone();
        for k in 1..30 {
            term = &term * &b / k as f64;
            sum += &term;
        }
        for _ in 0..s {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn sym_exp_trivial_cases() {
        let z = DMatrix::<f64>::zeros(4, 4);
        assert_eq!(sym_exp(&z, 3.0).unwrap(), DMatrix::identity(4, 4));
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        let e = sym_exp(&a, 1.0).unwrap();
        assert!((e[(0, 0)] - std::f64::consts::E).abs() < 1e-15);
        assert!((e[(1, 1)] - (-1.0f64).exp()).abs() < 1e-16);
        assert_eq!(e[(0, 1)], 0.0);
        let bad = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(sym_exp(&bad, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn sym_exp_matches_scaling_and_squaring() {
        let p = make_params(0.6).unwrap();
        let x = build_generators(40).unwrap().symmetric_sum();
        let t = 2.0 * p.alpha;
        let spectral = sym_exp(&x, t).unwrap();
        let oracle = expm_scaling_squaring(&(&x * t));
        // Entries reach ~1e13 on this block, so the comparison is relative.
        let scale = block_max_abs(&oracle, 20);
        let diff = block_max_abs(&(spectral - oracle), 20);
        assert!(diff <= 1e-10 * scale, "{diff:e} vs scale {scale:e}");
    }

    #[test]
    fn gamma_zero_metric_is_identity() {
        let p = make_params(0.0).unwrap();
        let m = build_metric(&p, 20).unwrap();
        assert_eq!(m.d2, DMatrix::identity(20, 20));
        let s0 = conjugate_generator(&p, 8, Generator::S0).unwrap();
        assert_eq!(s0.entries, build_generators(8).unwrap().s0.entries);
        let u = DVector::from_fn(20, |i, _| i as f64 - 3.0);
        let v = DVector::from_fn(20, |i, _| (i as f64).sin());
        assert_eq!(physical_inner(&m, &u, &v).unwrap(), u.dot(&v));
    }

    #[test]
    fn metric_entries_match_high_precision() {
        // 80-digit scaling and squaring of the 60x60 truncation.
        let p = make_params(0.6).unwrap();
        let m = build_metric(&p, 60).unwrap();
        let reference = [
            ((0, 0), 1.145_202_036_699_376_5),
            ((2, 4), 17.866_417_798_609_94),
            ((9, 9), 179_466.083_732_378_95),
            ((0, 9), 0.112_464_604_920_322_36),
            ((19, 19), 604_681_400_539.669_6),
        ];
        for ((i, j), want) in reference {
            let rel = (m.d2[(i, j)] - want).abs() / want;
            assert!(
                rel < 1e-13,
                "({i},{j}): {} vs {want}, rel {rel:e}",
                m.d2[(i, j)]
            );
        }
    }

    #[test]
    fn metric_first_entry() {
        // (D²)₁₁ = √Λ in the semi-infinite limit.
        let p = make_params(0.6).unwrap();
        let m = build_metric(&p, 60).unwrap();
        assert!((m.d2[(0, 0)] - p.lambda_scale.sqrt()).abs() < 1e-12);
        assert!((&m.d * &m.d - &m.d2).amax() / m.d2.amax() < 1e-12);
        assert!(block_max_abs(&(&m.d * &m.d_inv - DMatrix::identity(60, 60)), 10) < 1e-10);
    }

    #[test]
    fn identities_on_interior_block() {
        let p = make_params(0.6).unwrap();
        let m = build_metric(&p, 60).unwrap();
        let r = metric_residuals(&p, &m);
        assert_eq!(r.block, 10);
        assert!(r.max() <= 1e-8, "{r:?}");
    }

    #[test]
    fn metric_maps_right_seed_to_left_seed() {
        let p = make_params(0.6).unwrap();
        let m = build_metric(&p, 60).unwrap();
        let (r, l) = ground_vectors(&p, 60).unwrap();
        let image = &m.d2 * &r;
        let image = &image / image[0];
        let block = interior_block(60);
        let diff = (image - l).rows(0, block).amax();
        assert!(diff <= 1e-8, "{diff:e}");
    }

    #[test]
    fn physical_inner_products() {
        let p = make_params(0.6).unwrap();
        let m = build_metric(&p, 60).unwrap();
        let sys = build_biorthogonal(&p, 60, 2, 1e-10).unwrap();
        let (a, b) = (&sys.right_vectors[0], &sys.right_vectors[1]);
        assert!(physical_inner(&m, a, a).unwrap() > 0.0);
        let off = physical_inner(&m, a, b).unwrap();
        assert!(off.abs() <= 1e-8, "{off:e}");
        assert!(physical_inner(&m, a, &DVector::zeros(3)).is_err());
    }

    #[test]
    fn similarity_keeps_low_spectrum() {
        let p = make_params(0.6).unwrap();
        let m = build_metric(&p, 40).unwrap();
        let h = build_hamiltonian(&p, 40).unwrap().entries;
        let sim = m.similar(&h);
        let block = 2 * interior_block(40);
        let sym = sim.view((0, 0), (block, block)).clone_owned();
        let sym = (&sym + sym.transpose()) * 0.5;
        let mut ev: Vec<f64> = SymmetricEigen::new(sym)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        let exact = dense_spectrum(&TruncatedOperator::new(OperatorLabel::H, h), 2).unwrap();
        for (a, b) in ev.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }
}
