//! Real dilogarithm `Li₂(x) = Σ x^k/k²` on `x ≤ 1`.

use std::f64::consts::PI;

use crate::error::{domain, Result};

const PI2_6: f64 = PI * PI / 6.0;

fn series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = x;
    let mut k = 1.0f64;
    loop {
        let term = power / (k * k);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs().max(1e-300) {
            return sum;
        }
        power *= x;
        k += 1.0;
    }
}

/// Li₂ on the real branch. Uses the power series for `|x| ≤ 1/2` and the
/// reflection, Landen and inversion identities to get there otherwise.
pub fn dilog(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(domain("dilog of NaN"));
    }
    if x > 1.0 {
        return Err(domain(format!("dilog({x}) is off the real branch (x > 1)")));
    }
    Ok(dilog_unchecked(x))
}

fn dilog_unchecked(x: f64) -> f64 {
    if x == 1.0 {
        PI2_6
    } else if x == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else if x.abs() <= 0.5 {
        series(x)
    } else if x > 0.5 {
        PI2_6 - x.ln() * (-x).ln_1p() - series(1.0 - x)
    } else if x >= -1.0 {
        // Landen: x/(x−1) lands in (1/3, 1/2].
        let l = (-x).ln_1p();
        -series(x / (x - 1.0)) - 0.5 * l * l
    } else {
        let l = (-x).ln();
        -PI2_6 - 0.5 * l * l - dilog_unchecked(1.0 / x)
    }
}

/// `Li₂(−e^s)` without forming `e^s`, so `|s|` may be in the thousands.
pub(crate) fn dilog_neg_exp(s: f64) -> f64 {
    if s <= 0.0 {
        dilog_unchecked(-s.exp())
    } else {
        -PI2_6 - 0.5 * s * s - dilog_unchecked(-(-s).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(x: f64, terms: usize) -> f64 {
        // Sum from the small end to keep the rounding down.
        (1..=terms)
            .rev()
            .map(|k| x.powi(k as i32) / (k * k) as f64)
            .sum()
    }

    #[test]
    fn special_values() {
        assert_eq!(dilog(0.0).unwrap(), 0.0);
        assert!((dilog(1.0).unwrap() - PI2_6).abs() < 1e-15);
        assert!((dilog(-1.0).unwrap() + PI * PI / 12.0).abs() < 1e-15);
        // Li₂(1/2) = π²/12 − ln²2/2.
        let half = PI * PI / 12.0 - 0.5 * 2f64.ln().powi(2);
        assert!((dilog(0.5).unwrap() - half).abs() < 1e-15);
        assert!(dilog(1.5).is_err());
        assert!(dilog(f64::NAN).is_err());
    }

    #[test]
    fn minus_one_against_brute_force() {
        // Alternating series: the error after 10⁶ terms is below 1e−12.
        let b = brute(-1.0, 1_000_000);
        assert!((dilog(-1.0).unwrap() - b).abs() < 1e-12);
    }

    #[test]
    fn inversion_region_against_reference() {
        // mpmath.polylog(2, x), 30 digits.
        let cases = [
            (-20.0, -6.082_751_483_909_490_6),
            (-2.0, -1.436_746_366_883_680_9),
            (0.9, 1.299_714_723_004_958_8),
            (-0.7, -0.605_158_402_337_705_3),
        ];
        for (x, want) in cases {
            let got = dilog(x).unwrap();
            assert!((got - want).abs() < 1e-13, "Li2({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn neg_exp_helper_matches_direct() {
        for s in [-30.0, -2.0, -0.1, 0.0, 0.3, 1.0, 3.0] {
            let direct = dilog(-f64::exp(s)).unwrap();
            assert!(
                (dilog_neg_exp(s) - direct).abs() < 1e-12 * direct.abs().max(1.0),
                "{s}"
            );
        }
        // Large s: Li₂(−e^s) ≈ −s²/2 − π²/6.
        let s = 5000.0;
        assert!((dilog_neg_exp(s) + 0.5 * s * s + PI2_6).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn series_region_matches_brute(x in -0.5f64..0.5) {
            prop_assert!((dilog(x).unwrap() - brute(x, 80)).abs() < 1e-14);
        }

        #[test]
        fn decreasing_on_negative_axis(a in -50.0f64..0.0, b in -50.0f64..0.0) {
            prop_assume!(a < b);
            prop_assert!(dilog(a).unwrap() < dilog(b).unwrap());
        }
    }
}
