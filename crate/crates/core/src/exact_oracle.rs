//! Test-only eigenvalue oracle in exact rational arithmetic.
//!
//! `f64` matrix entries are rationals, so the LDL^T inertia count can be
//! evaluated without any rounding. Bisecting that count down to a requested
//! interval width gives eigenvalue enclosures whose only error is the final
//! interval, independent of the floating-point solver it is used to check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

/// Eigenvalues below `x`, or `None` when an exact zero pivot is hit
/// (the caller then nudges `x`).
fn count_below(diag: &[BigRational], off2: &[BigRational], x: &BigRational) -> Option<usize> {
    let mut count = 0usize;
    let mut d = &diag[0] - x;
    if d.is_zero() {
        return None;
    }
    if d.is_negative() {
        count += 1;
    }
    for i in 1..diag.len() {
        d = &diag[i] - x - &off2[i - 1] / &d;
        if d.is_zero() {
            return None;
        }
        if d.is_negative() {
            count += 1;
        }
    }
    Some(count)
}

/// All eigenvalues, each enclosed in an interval of width `width` and
/// reported as the midpoint.
pub fn eigenvalues(diag: &[f64], offdiag: &[f64], width: f64) -> Vec<f64> {
    let n = diag.len();
    let d: Vec<BigRational> = diag.iter().map(|&x| to_rational(x)).collect();
    let off2: Vec<BigRational> = offdiag
        .iter()
        .map(|&x| {
            let r = to_rational(x);
            &r * &r
        })
        .collect();

    let mut radius = 0.0f64;
    for i in 0..n {
        let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        radius = radius.max(diag[i].abs() + left + right);
    }
    let bound = to_rational(radius + 1.0);
    let target = to_rational(width);
    let nudge = BigRational::new(BigInt::one(), BigInt::from(2).pow(200));

    let count_at = |x: &BigRational| -> usize {
        let mut probe = x.clone();
        loop {
            match count_below(&d, &off2, &probe) {
                Some(c) => return c,
                None => probe += &nudge,
            }
        }
    };

    (0..n)
        .map(|k| {
            let mut lo = -bound.clone();
            let mut hi = bound.clone();
            while &hi - &lo > target {
                let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
                if count_at(&mid) <= k {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
            rational_to_f64(&mid)
        })
        .collect()
}

fn rational_to_f64(r: &BigRational) -> f64 {
    // Scale into i128 range before converting; eigenvalue magnitudes here
    // are modest so the shift never underflows the value itself.
    let scale = BigInt::from(2).pow(80);
    let scaled = (r * BigRational::from_integer(scale.clone())).to_integer();
    let approx: f64 = i128::try_from(&scaled)
        .map(|v| v as f64)
        .unwrap_or_else(|_| {
            let s = scaled.to_string();
            s.parse::<f64>().unwrap()
        });
    approx / 2f64.powi(80)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_count_on_two_by_two() {
        // [[1, -1], [-1, 3]]: eigenvalues 2 -+ sqrt(2)
        let got = eigenvalues(&[1.0, 3.0], &[-1.0], 1e-12);
        let want = [2.0 - 2f64.sqrt(), 2.0 + 2f64.sqrt()];
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).abs() < 1e-11);
        }
    }

    #[test]
    fn handles_exact_zero_offdiagonal() {
        let got = eigenvalues(&[0.5, 0.0, 0.0], &[0.0, 1.0], 1e-12);
        let want = [-1.0, 0.5, 1.0];
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).abs() < 1e-11);
        }
    }
}
