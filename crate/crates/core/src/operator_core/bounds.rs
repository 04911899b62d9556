use crate::error::{Error, Result};

/// Certified bound on `‖C − B_M‖₂` for an operator whose blocks obey
/// `‖C_{t,τ}‖₂ ≤ K gu(t−τ)^{−κ}`: `2K/(κ−1) · (M−1)^{1−κ}`.
pub fn banded_error_bound(k: f64, kappa: f64, m: usize) -> Result<f64> {
    if !(kappa > 1.0) {
        return Err(Error::Domain(format!("kappa must exceed 1, got {kappa}")));
    }
    if m < 2 {
        return Err(Error::Domain(format!("bandwidth must be at least 2, got {m}")));
    }
    Ok(2.0 * k / (kappa - 1.0) * ((m - 1) as f64).powf(1.0 - kappa))
}

fn demko_parts(a: f64, b: f64, m: usize) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("lower spectral bound must be positive, got {a}")));
    }
    if !(b >= a) {
        return Err(Error::Domain(format!("upper bound {b} below lower bound {a}")));
    }
    if m < 1 {
        return Err(Error::Domain("bandwidth must be at least 1".into()));
    }
    let sr = (b / a).sqrt();
    let rho = (sr - 1.0) / (sr + 1.0);
    Ok(((1.0 + sr).powi(2) / b, rho))
}

/// Geometric bound on the blocks of the inverse of an SPD `M`-banded
/// operator with spectrum in `[a, b]`, in the form
/// `(1+√r)²/b · ρ^{⌊|lag|/M⌋+1}`, `r = b/a`, `ρ = (√r−1)/(√r+1)`.
///
/// When `M` divides `lag` this exponent is one too large and the bound can
/// fail (tridiagonal counterexamples exist); see [`demko_bound_sharp`].
pub fn demko_bound(a: f64, b: f64, m: usize, lag: i64) -> Result<f64> {
    let (c, rho) = demko_parts(a, b, m)?;
    let e = lag.unsigned_abs() / m as u64 + 1;
    Ok(c * pow_u(rho, e))
}

/// Same bound with exponent `⌈|lag|/M⌉`, which follows from Chebyshev
/// approximation of `1/x` by a degree `⌈|lag|/M⌉ − 1` polynomial whose
/// evaluation at the operator vanishes at that lag.
pub fn demko_bound_sharp(a: f64, b: f64, m: usize, lag: i64) -> Result<f64> {
    let (c, rho) = demko_parts(a, b, m)?;
    let e = lag.unsigned_abs().div_ceil(m as u64);
    Ok(c * pow_u(rho, e))
}

fn pow_u(x: f64, e: u64) -> f64 {
    if e > i32::MAX as u64 {
        return 0.0;
    }
    x.powi(e as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn banded_error_examples() {
        assert!((banded_error_bound(1.0, 2.0, 3).unwrap() - 1.0).abs() < 1e-15);
        assert!((banded_error_bound(1.0, 3.0, 11).unwrap() - 0.01).abs() < 1e-15);
        assert!(banded_error_bound(1.0, 1.0, 5).is_err());
        assert!(banded_error_bound(1.0, 3.0, 1).is_err());
    }

    #[test]
    fn demko_examples() {
        assert_eq!(demko_bound(2.0, 2.0, 1, 3).unwrap(), 0.0);
        let v = demko_bound(1.0, 4.0, 1, 2).unwrap();
        assert!((v - 9.0 / 108.0).abs() < 1e-15);
        assert!(demko_bound(0.0, 1.0, 1, 0).is_err());
        assert!(demko_bound(2.0, 1.0, 1, 0).is_err());
        assert!(demko_bound(1.0, 2.0, 0, 0).is_err());
    }

    #[test]
    fn sharp_differs_only_on_multiples() {
        for m in 1..5usize {
            for lag in -20i64..=20 {
                let a = demko_bound(0.5, 3.0, m, lag).unwrap();
                let s = demko_bound_sharp(0.5, 3.0, m, lag).unwrap();
                if lag.unsigned_abs() % m as u64 == 0 {
                    assert!(s > a);
                } else {
                    assert_eq!(s, a);
                }
            }
        }
    }

    #[test]
    fn stated_bound_fails_on_tridiagonal_toeplitz() {
        // diag 1, off-diagonal 0.1: the lag-1 entry of the inverse of a
        // long section is ~0.1031, but the bound at lag 1, M = 1 is ~0.042.
        let n = 200;
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 1.0f64,
            1 => 0.1,
            _ => 0.0,
        });
        let inv = m.clone().try_inverse().unwrap();
        let (a, b) = (0.8, 1.2);
        let measured = inv[(100, 101)].abs();
        assert!(measured > demko_bound(a, b, 1, 1).unwrap());
        assert!(measured <= demko_bound_sharp(a, b, 1, 1).unwrap());
    }
}
