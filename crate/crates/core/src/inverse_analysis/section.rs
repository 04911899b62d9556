use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{cov_window, stationary_window, stationary_window_derivative, Family, ModelSpec};
use crate::operator_core::{inf_norm, spd_inverse, sym_eig_range, BlockWindow, EigRange};

/// Interior section of the inverse of a padded covariance window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InverseWindow {
    #[serde(skip)]
    pub base: BlockWindow,
    pub source_pad: usize,
    pub conditioning: EigRange,
    /// `‖C·D − I‖∞` on the padded window.
    pub residual: f64,
}

const RESIDUAL_TOL: f64 = 1e-8;

/// Inverts the (already padded) window `c` and keeps the interior after
/// discarding `pad` time points at each end.
pub fn finite_section_inverse(c: &BlockWindow, pad: usize) -> Result<InverseWindow> {
    if !c.is_symmetric() {
        return Err(Error::Input("finite_section_inverse needs a symmetric window".into()));
    }
    if c.len() <= 2 * pad {
        return Err(Error::Input(format!("pad {pad} leaves no interior in a window of length {}", c.len())));
    }
    let conditioning = sym_eig_range(c)?;
    if !conditioning.is_spd() {
        return Err(Error::Conditioning(format!(
            "window eigenvalue range [{:.3e}, {:.3e}] is not safely positive definite",
            conditioning.lambda_min, conditioning.lambda_max
        )));
    }
    let d = spd_inverse(c.flat())?;
    let residual = inf_norm(&(c.flat() * &d - DMatrix::identity(c.dim(), c.dim())));
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::Conditioning(format!("inverse residual {residual:.3e} exceeds {RESIDUAL_TOL:e}")));
    }
    let base = BlockWindow::from_flat_symmetrized(c.t_lo(), c.p(), d)?.interior(pad)?;
    Ok(InverseWindow {
        base,
        source_pad: pad,
        conditioning,
        residual,
    })
}

/// Declared decay exponent: `kappa`, else the tail exponent, else 4 for
/// geometrically decaying families (which satisfy every polynomial
/// envelope).
pub fn reference_kappa(model: &ModelSpec) -> f64 {
    model
        .kappa
        .or_else(|| model.tail.as_ref().map(|t| t.kappa))
        .unwrap_or(4.0)
}

/// `max(50, 25·d, 10·m)`: `d` the autoregressive order, `m` the effective
/// memory (geometric families) or `⌈2κ⌉` capped at the MA order (tv-VMA).
pub fn default_pad(model: &ModelSpec) -> usize {
    let d = match model.family {
        Family::TvVar | Family::TvArch => model.model_order(),
        _ => 0,
    };
    let m = match model.family {
        Family::TvVma => ((2.0 * reference_kappa(model)).ceil() as usize).min(model.model_order().max(1)),
        _ => model.effective_memory(),
    };
    50.max(25 * d).max(10 * m)
}

/// `D^{(N)}` on `[lo, hi]` from the covariance window padded by `pad`.
pub fn model_inverse_window(model: &ModelSpec, n: usize, lo: i64, hi: i64, pad: usize) -> Result<InverseWindow> {
    let c = cov_window(model, n, lo - pad as i64, hi + pad as i64)?;
    finite_section_inverse(&c, pad)
}

/// Inverse of the one-sided section `(C_{t,τ}; T−L ≤ t,τ ≤ T)`.
pub fn one_sided_inverse(model: &ModelSpec, n: usize, t: i64, l: usize) -> Result<InverseWindow> {
    if l < 50 {
        return Err(Error::Input(format!("one-sided depth L must be at least 50, got {l}")));
    }
    let c = cov_window(model, n, t - l as i64, t)?;
    finite_section_inverse(&c, 0)
}

/// Bottom-row blocks `[D]_{T,T−j}`, `j = 0..=J`.
pub fn bottom_row(d: &InverseWindow, j_max: usize) -> Vec<DMatrix<f64>> {
    let t = d.base.t_hi();
    (0..=j_max.min(d.base.len() - 1))
        .map(|j| d.base.block(t, t - j as i64))
        .collect()
}

/// `max_j ‖[D_L]_{T,T−j} − [D_{L+50}]_{T,T−j}‖₂` over `j ≤ J`.
pub fn bottom_row_drift(model: &ModelSpec, n: usize, t: i64, l: usize, j_max: usize) -> Result<f64> {
    let a = bottom_row(&one_sided_inverse(model, n, t, l)?, j_max);
    let b = bottom_row(&one_sided_inverse(model, n, t, l + 50)?, j_max);
    Ok(a.iter()
        .zip(&b)
        .map(|(x, y)| crate::operator_core::spectral_norm(&(x - y)).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max))
}

/// Blocks `D_r(u)` of the inverse of the frozen operator, `r = 0..=R`,
/// read from the central row of a padded Toeplitz section.
pub fn stationary_inverse_seq(model: &ModelSpec, u: f64, max_lag: usize, pad: usize) -> Result<Vec<DMatrix<f64>>> {
    let h = (max_lag + pad) as i64;
    let c = stationary_window(model, u, -h, h)?;
    let d = finite_section_inverse(&c, 0)?;
    Ok((0..=max_lag as i64).map(|r| d.base.block(0, -r)).collect())
}

/// `∂D_r(u)/∂u = −[D (∂C) D]_{0,−r}` assembled on the same section.
pub fn stationary_inverse_derivative_seq(
    model: &ModelSpec,
    u: f64,
    max_lag: usize,
    pad: usize,
) -> Result<Vec<DMatrix<f64>>> {
    let h = (max_lag + pad) as i64;
    let c = stationary_window(model, u, -h, h)?;
    let dc = stationary_window_derivative(model, u, -h, h)?;
    let d = spd_inverse(c.flat())?;
    let dd = -(&d * dc.flat() * &d);
    let w = BlockWindow::from_flat_symmetrized(-h, model.p, dd)?;
    Ok((0..=max_lag as i64).map(|r| w.block(0, -r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::CoefficientFn;

    #[test]
    fn identity_inverse() {
        let w = BlockWindow::identity(0, 29, 2).unwrap();
        for pad in [0, 5] {
            let d = finite_section_inverse(&w, pad).unwrap();
            assert!((d.base.flat() - DMatrix::identity(d.base.dim(), d.base.dim())).amax() < 1e-15);
        }
    }

    #[test]
    fn ar1_precision_tridiagonal() {
        let c = BlockWindow::toeplitz(0, 59, 1, |r| DMatrix::from_element(1, 1, 0.5f64.powi(r.unsigned_abs() as i32) / 0.75))
            .unwrap();
        let d = finite_section_inverse(&c, 10).unwrap();
        for t in 10..50i64 {
            for tau in 10..50i64 {
                let expect = match (t - tau).abs() {
                    0 => 1.25,
                    1 => -0.5,
                    _ => 0.0,
                };
                assert!((d.base.block(t, tau)[(0, 0)] - expect).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rejects_indefinite_and_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let w = BlockWindow::from_flat(0, 1, m).unwrap();
        assert!(matches!(finite_section_inverse(&w, 0), Err(Error::Conditioning(_))));
        let a = BlockWindow::from_flat(0, 1, DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0])).unwrap();
        assert!(matches!(finite_section_inverse(&a, 0), Err(Error::Input(_))));
    }

    #[test]
    fn one_sided_ar1_bottom_row() {
        let m = ModelSpec::tv_var(1, vec![CoefficientFn::scalar(0.5)], CoefficientFn::scalar(1.0));
        let d = one_sided_inverse(&m, 100, 50, 60).unwrap();
        let row = bottom_row(&d, 5);
        assert!((row[0][(0, 0)] - 1.0).abs() < 1e-8);
        assert!((row[1][(0, 0)] + 0.5).abs() < 1e-8);
        for b in &row[2..] {
            assert!(b[(0, 0)].abs() < 1e-8);
        }
        assert!(one_sided_inverse(&m, 100, 50, 40).is_err());
    }

    #[test]
    fn default_pad_policy() {
        let ar = ModelSpec::tv_var(1, vec![CoefficientFn::scalar(0.5)], CoefficientFn::scalar(1.0));
        assert_eq!(default_pad(&ar), 50);
        let ar3 = ModelSpec::tv_var(1, vec![CoefficientFn::scalar(0.1), CoefficientFn::scalar(0.1), CoefficientFn::scalar(0.1)], CoefficientFn::scalar(1.0));
        assert_eq!(default_pad(&ar3), 75);
    }
}
