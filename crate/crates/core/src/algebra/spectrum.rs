//! Eigenvalues and eigenvectors of real tridiagonal truncations.
//!
//! A general dense solver loses digits on `Ĥ` because the truncation is far
//! from normal (its eigenvector matrix has a condition number growing like
//! `|η|^{-M}`). Schur values are therefore used only as seeds and polished
//! by Newton's method on the three-term determinant recurrence, which is
//! backward stable in the entries of `Ĥ` themselves.

use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use twofloat::TwoFloat;

use super::TruncatedOperator;
use crate::error::{domain, Error, Result};
use crate::params::ModelParams;

const SCHUR_MAX_ITER: usize = 10_000;
const NEWTON_MAX_ITER: usize = 60;
const RESCALE_AT: f64 = 1e100;
const POLISH_MAX_ITER: usize = 20;

/// Eigenvalues of a real square matrix from its real Schur form.
pub fn schur_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(domain("matrix must be square"));
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, SCHUR_MAX_ITER).ok_or_else(|| {
        Error::Numerical(format!(
            "Schur iteration did not converge within {SCHUR_MAX_ITER} sweeps on a {}x{} matrix",
            a.nrows(),
            a.ncols()
        ))
    })?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

fn tridiagonal_parts(h: &DMatrix<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    if !h.is_square() || h.nrows() == 0 {
        return Err(domain("matrix must be square and non-empty"));
    }
    let op = TruncatedOperator::new(super::OperatorLabel::Other, h.clone());
    if !op.is_tridiagonal() {
        return Err(domain("matrix is not tridiagonal"));
    }
    let n = h.nrows();
    let diag = (0..n).map(|i| h[(i, i)]).collect();
    let offprod = (0..n.saturating_sub(1))
        .map(|i| h[(i, i + 1)] * h[(i + 1, i)])
        .collect();
    Ok((diag, offprod))
}

fn char_poly_parts(diag: &[f64], offprod: &[f64], lambda: Complex64) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let (mut p_prev, mut p) = (one, diag[0] - lambda);
    let (mut d_prev, mut d) = (zero, -one);
    for k in 1..diag.len() {
        let shift = diag[k] - lambda;
        let bc = offprod[k - 1];
        let p_next = shift * p - p_prev * bc;
        let d_next = -p + shift * d - d_prev * bc;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        let size = p.norm().max(d.norm());
        if size > RESCALE_AT {
            let s = 1.0 / size;
            p *= s;
            p_prev *= s;
            d *= s;
            d_prev *= s;
        }
    }
    (p, d)
}

/// Characteristic polynomial `det(H − λ)` and its λ-derivative, both divided
/// by the same positive factor to stay in range. Only their ratio and
/// relative size are meaningful.
pub fn tridiagonal_char_poly(
    h: &DMatrix<f64>,
    lambda: Complex64,
) -> Result<(Complex64, Complex64)> {
    let (diag, offprod) = tridiagonal_parts(h)?;
    Ok(char_poly_parts(&diag, &offprod, lambda))
}

fn newton(diag: &[f64], offprod: &[f64], seed: Complex64) -> Option<Complex64> {
    let mut z = seed;
    for _ in 0..NEWTON_MAX_ITER {
        let (p, d) = char_poly_parts(diag, offprod, z);
        if p == Complex64::new(0.0, 0.0) {
            return Some(z);
        }
        if d == Complex64::new(0.0, 0.0) || !d.is_finite() {
            return None;
        }
        let step = p / d;
        z -= step;
        if !z.is_finite() {
            return None;
        }
        if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1.0) {
            return Some(z);
        }
    }
    Some(z)
}

/// Polishes approximate eigenvalues of a real tridiagonal matrix by Newton's
/// method on its determinant recurrence.
///
/// A seed whose iteration leaves the basin of its own root (drifts further
/// than half the distance to the nearest other seed) is kept unrefined.
pub fn refine_tridiagonal_eigenvalues(
    h: &DMatrix<f64>,
    seeds: &[Complex64],
) -> Result<Vec<Complex64>> {
    let (diag, offprod) = tridiagonal_parts(h)?;
    let mut out = Vec::with_capacity(seeds.len());
    for (i, &seed) in seeds.iter().enumerate() {
        let gap = seeds
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, s)| (s - seed).norm())
            .fold(f64::INFINITY, f64::min);
        let refined = match newton(&diag, &offprod, seed) {
            Some(z) if (z - seed).norm() < 0.5 * gap => z,
            _ => seed,
        };
        // Real seeds of a real matrix stay real.
        let refined = if seed.im == 0.0 {
            Complex64::new(refined.re, 0.0)
        } else {
            refined
        };
        out.push(refined);
    }
    Ok(out)
}

fn sorted_spectrum(h: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let seeds = schur_eigenvalues(h)?;
    let mut values = refine_tridiagonal_eigenvalues(h, &seeds)?;
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(values)
}

/// The `n` smallest eigenvalues of a real tridiagonal truncation, ascending.
///
/// Fails if any of the requested eigenvalues has a non-negligible imaginary
/// part (finite truncations of `Ĥ` have complex pairs at the top of the
/// spectrum once `γ` is not small).
pub fn dense_spectrum(h: &TruncatedOperator, n: usize) -> Result<Vec<f64>> {
    let dim = h.dim();
    if n == 0 || n > dim {
        return Err(domain(format!(
            "requested {n} eigenvalues of a {dim}x{dim} matrix"
        )));
    }
    let values = sorted_spectrum(&h.entries)?;
    let scale = h.entries.amax().max(1.0);
    values
        .iter()
        .take(n)
        .enumerate()
        .map(|(i, z)| {
            if z.im.abs() > 1e-9 * scale {
                Err(Error::Numerical(format!(
                    "eigenvalue {} is not real: {} {:+}i",
                    i + 1,
                    z.re,
                    z.im
                )))
            } else {
                Ok(z.re)
            }
        })
        .collect()
}

/// `det(Ĥ − λ)` and its derivative for the exact truncation `Ĥ(γ)`, in
/// double-double arithmetic. Diagonal `(4k−3)/4` and off-diagonal products
/// `−γ²(2k−1)2k/8` enter without rounding, so the only perturbation left
/// stays inside the model family.
fn hamiltonian_char_poly(gamma_sq: TwoFloat, dim: usize, lambda: TwoFloat) -> (TwoFloat, TwoFloat) {
    let zero = TwoFloat::from(0.0);
    let (mut p_prev, mut p) = (TwoFloat::from(1.0), TwoFloat::from(0.25) - lambda);
    let (mut d_prev, mut d) = (zero, TwoFloat::from(-1.0));
    for k in 1..dim {
        let shift = TwoFloat::from((4 * k + 1) as f64 / 4.0) - lambda;
        let j = k as f64;
        let coupling = gamma_sq * ((2.0 * j - 1.0) * 2.0 * j / 8.0);
        let p_next = shift * p + coupling * p_prev;
        let d_next = shift * d - p + coupling * d_prev;
        (p_prev, p, d_prev, d) = (p, p_next, d, d_next);
        let size = p.hi().abs().max(d.hi().abs());
        if size > RESCALE_AT {
            // power of two: exact
            let s = 2f64.powi(-(size.log2().ceil() as i32));
            (p_prev, p, d_prev, d) = (p_prev * s, p * s, d_prev * s, d * s);
        }
    }
    (p, d)
}

fn polish_real(gamma_sq: TwoFloat, dim: usize, seed: f64) -> f64 {
    let mut z = TwoFloat::from(seed);
    for _ in 0..POLISH_MAX_ITER {
        let (p, d) = hamiltonian_char_poly(gamma_sq, dim, z);
        if d.hi() == 0.0 || !d.hi().is_finite() || !p.hi().is_finite() {
            return seed;
        }
        let step = p / d;
        z -= step;
        if step.hi().abs() <= 1e-30 * z.hi().abs().max(1.0) {
            break;
        }
    }
    z.hi()
}

/// The `n` smallest eigenvalues of the `dim×dim` truncation of `Ĥ`.
///
/// Same seeds as [`dense_spectrum`], then a final Newton polish in
/// double-double on the exact recurrence. The truncation is strongly
/// non-normal, so rounding `γ s_k` entry by entry (as [`dense_spectrum`] has
/// to) already moves the upper levels by `~cond·ε`; the structured polish does
/// not.
pub fn hamiltonian_spectrum(params: &ModelParams, dim: usize, n: usize) -> Result<Vec<f64>> {
    let h = super::build_hamiltonian(params, dim)?;
    let rough = dense_spectrum(&h, n)?;
    let gamma_sq = TwoFloat::new_mul(params.gamma, params.gamma);
    Ok(rough
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let gap = rough
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, y)| (y - x).abs())
                .fold(f64::INFINITY, f64::min);
            let z = polish_real(gamma_sq, dim, x);
            if (z - x).abs() < 0.5 * gap {
                z
            } else {
                x
            }
        })
        .collect())
}

/// Complete eigensystem of a small real matrix in complex arithmetic.
///
/// Columns of `right` are right eigenvectors `u_i` with unit Euclidean norm;
/// columns of `left` are eigenvectors `v_i` of the transpose scaled so that
/// `VᵀU = I` (bilinear pairing, no conjugation). This is the exact
/// finite-dimensional biorthogonal system; its eigenvalues may come in
/// complex-conjugate pairs.
#[derive(Debug, Clone)]
pub struct FiniteEigensystem {
    pub eigenvalues: Vec<Complex64>,
    pub right: DMatrix<Complex64>,
    pub left: DMatrix<Complex64>,
    /// Largest relative eigen-residual over both families.
    pub max_residual: f64,
    /// `max |VᵀU − I|`.
    pub gram_defect: f64,
}

fn to_complex(a: &DMatrix<f64>) -> DMatrix<Complex64> {
    a.map(|x| Complex64::new(x, 0.0))
}

fn inverse_iteration(a: &DMatrix<Complex64>, lambda: Complex64) -> Result<DVector<Complex64>> {
    let n = a.nrows();
    let scale = lambda.norm().max(1.0);
    let mut shift = lambda;
    let mut tries = 0;
    let lu = loop {
        let shifted = a - DMatrix::<Complex64>::identity(n, n) * shift;
        let lu = shifted.lu();
        if lu.is_invertible() {
            break lu;
        }
        tries += 1;
        if tries > 8 {
            return Err(Error::Numerical(format!(
                "inverse iteration stalled at λ = {lambda}"
            )));
        }
        shift = lambda + Complex64::new(scale * f64::EPSILON * (1 << tries) as f64, 0.0);
    };
    // A fixed non-symmetric start avoids accidental orthogonality.
    let mut x = DVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.1 * i as f64, 0.0));
    for _ in 0..3 {
        x = lu
            .solve(&x)
            .ok_or_else(|| Error::Numerical("singular solve in inverse iteration".into()))?;
        let norm = x.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Numerical(format!(
                "inverse iteration diverged at λ = {lambda}"
            )));
        }
        x /= Complex64::new(norm, 0.0);
    }
    Ok(x)
}

/// Fixes the phase so the largest-modulus component is real and positive.
fn fix_phase(x: &mut DVector<Complex64>) {
    let pivot = x
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()));
    if let Some(p) = pivot {
        if p.norm() > 0.0 {
            let phase = p.conj() / p.norm();
            x.apply(|c| *c *= phase);
        }
    }
}

impl FiniteEigensystem {
    pub fn new(h: &DMatrix<f64>) -> Result<Self> {
        if !h.is_square() || h.nrows() == 0 {
            return Err(domain("matrix must be square and non-empty"));
        }
        let n = h.nrows();
        let eigenvalues =
            if TruncatedOperator::new(super::OperatorLabel::Other, h.clone()).is_tridiagonal() {
                sorted_spectrum(h)?
            } else {
                let mut v = schur_eigenvalues(h)?;
                v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
                v
            };
        let a = to_complex(h);
        let at = a.transpose();
        let mut right = DMatrix::<Complex64>::zeros(n, n);
        let mut left = DMatrix::<Complex64>::zeros(n, n);
        let mut max_residual = 0.0f64;
        for (i, &lambda) in eigenvalues.iter().enumerate() {
            let mut u = inverse_iteration(&a, lambda)?;
            fix_phase(&mut u);
            let mut v = inverse_iteration(&at, lambda)?;
            let pairing = v.dot(&u);
            if pairing.norm() < 1e-300 {
                return Err(Error::Numerical(format!(
                    "left and right eigenvectors of λ = {lambda} are bilinearly orthogonal"
                )));
            }
            v /= pairing;
            let ru = (&a * &u - &u * lambda).norm() / u.norm();
            let rv = (&at * &v - &v * lambda).norm() / v.norm();
            max_residual = max_residual.max(ru).max(rv);
            right.set_column(i, &u);
            left.set_column(i, &v);
        }
        let gram_defect = (left.transpose() * &right - DMatrix::identity(n, n))
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        Ok(Self {
            eigenvalues,
            right,
            left,
            max_residual,
            gram_defect,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// True when every eigenvalue has `|Im λ| ≤ tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.eigenvalues.iter().all(|z| z.im.abs() <= tol)
    }

    /// `Θ = conj(V)·Vᵀ`, the Hermitian positive definite matrix with
    /// `U^H Θ U = I`: the right eigenvectors are orthonormal in `⟨Θ·,·⟩`.
    /// When the spectrum is real it also satisfies `ΘH = H^H Θ`.
    pub fn metric(&self) -> DMatrix<Complex64> {
        self.left.map(|z| z.conj()) * self.left.transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_hamiltonian;
    use crate::params::make_params;

    #[test]
    fn diagonal_case() {
        let p = make_params(0.0).unwrap();
        let h = build_hamiltonian(&p, 10).unwrap();
        assert_eq!(dense_spectrum(&h, 4).unwrap(), vec![0.25, 1.25, 2.25, 3.25]);
    }

    #[test]
    fn char_poly_of_small_matrix() {
        // det([[1,2],[3,4]] − λ) = λ² − 5λ − 2, derivative 2λ − 5.
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let (p, d) = tridiagonal_char_poly(&h, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(p, Complex64::new(-6.0, 0.0));
        assert_eq!(d, Complex64::new(-3.0, 0.0));
        assert!(tridiagonal_char_poly(&DMatrix::from_element(3, 3, 1.0), p).is_err());
    }

    #[test]
    fn ground_level_at_m100() {
        let p = make_params(0.6).unwrap();
        let h = build_hamiltonian(&p, 100).unwrap();
        let ev = dense_spectrum(&h, 10).unwrap();
        assert!((ev[0] - p.lambda_scale / 4.0).abs() < 1e-10);
        for w in ev.windows(2) {
            assert!((w[1] - w[0] - p.lambda_scale).abs() < 1e-8, "{w:?}");
        }
    }

    #[test]
    fn structured_polish_reaches_the_ladder() {
        // 60-digit Newton on the same recurrence puts λ₁…λ₇ of the M=100
        // truncation within 1e-15 of Λ(4n−3)/4 and λ₈ within 5e-13.
        for gamma in [0.2, 0.6, 1.5] {
            let p = make_params(gamma).unwrap();
            let ev = hamiltonian_spectrum(&p, 100, 8).unwrap();
            for (n, e) in ev.iter().enumerate() {
                let want = p.mode_energy(n + 1).unwrap();
                assert!(
                    (e - want).abs() <= 1e-12 * want,
                    "γ={gamma} n={} {e} vs {want}",
                    n + 1
                );
            }
        }
    }

    #[test]
    fn structured_polish_agrees_with_generic_route() {
        let p = make_params(0.6).unwrap();
        let h = build_hamiltonian(&p, 30).unwrap();
        let a = dense_spectrum(&h, 6).unwrap();
        let b = hamiltonian_spectrum(&p, 30, 6).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9 * y);
        }
        let (pp, _) = hamiltonian_char_poly(TwoFloat::from(0.0), 4, TwoFloat::from(1.25));
        assert_eq!(pp.hi(), 0.0);
    }

    #[test]
    fn smallest_eigenvalue_at_m40() {
        let p = make_params(0.6).unwrap();
        let h = build_hamiltonian(&p, 40).unwrap();
        let ev = dense_spectrum(&h, 1).unwrap();
        assert!((ev[0] - 0.327_871_926_215_100_0).abs() < 1e-12);
    }

    #[test]
    fn complex_top_is_reported() {
        let p = make_params(0.6).unwrap();
        let h = build_hamiltonian(&p, 6).unwrap();
        assert!(dense_spectrum(&h, 2).is_ok());
        assert!(matches!(dense_spectrum(&h, 6), Err(Error::Numerical(_))));
    }

    #[test]
    fn finite_system_is_biorthonormal() {
        let p = make_params(0.6).unwrap();
        let h = build_hamiltonian(&p, 6).unwrap().entries;
        let sys = FiniteEigensystem::new(&h).unwrap();
        assert!(sys.gram_defect < 1e-12, "{}", sys.gram_defect);
        assert!(sys.max_residual < 1e-12, "{}", sys.max_residual);
        assert!(!sys.is_real(1e-6));
        let theta = sys.metric();
        let gram = sys.right.adjoint() * &theta * &sys.right;
        let defect = (gram - DMatrix::<Complex64>::identity(6, 6))
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(defect < 1e-10, "{defect}");
    }

    #[test]
    fn finite_metric_hermitizes_real_spectrum() {
        let p = make_params(0.1).unwrap();
        let h = build_hamiltonian(&p, 6).unwrap().entries;
        let sys = FiniteEigensystem::new(&h).unwrap();
        assert!(sys.is_real(1e-12));
        let theta = sys.metric();
        let hc = to_complex(&h);
        let r = (&theta * &hc - hc.adjoint() * &theta)
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(r < 1e-12, "{r}");
    }

    #[test]
    fn finite_system_diagonal_limit() {
        let p = make_params(0.0).unwrap();
        let h = build_hamiltonian(&p, 5).unwrap().entries;
        let sys = FiniteEigensystem::new(&h).unwrap();
        let eye = DMatrix::<Complex64>::identity(5, 5);
        assert!((&sys.right - &eye).iter().all(|z| z.norm() < 1e-15));
        assert!((&sys.left - &eye).iter().all(|z| z.norm() < 1e-15));
    }
}
