use crate::error::{Error, Result};
use crate::models::{line_fit, DecayProfile};
use crate::operator_core::zeta;

use super::section::InverseWindow;

const BAND_TOL: f64 = 1e-9;

/// Decay of `‖D_{t,τ}‖` against `ζ(t−τ)`: slope of `log` norms on
/// `log ζ` over lags in `[2, L/3]`, and the max-ratio constant
/// `𝒦̂ = max_ℓ ‖D‖_ℓ / ζ(ℓ)^{κ−1}` over all lags.
///
/// A window whose off-band norms vanish is flagged through `band_limit`;
/// with no usable lag in the fit range the exponent is infinite.
pub fn inverse_decay_fit(d: &InverseWindow, kappa_ref: f64) -> Result<DecayProfile> {
    let l = d.base.len();
    if l < 12 {
        return Err(Error::Input(format!("decay fit needs at least 12 time points, got {l}")));
    }
    let lag_norms = d.base.lag_max_norms();
    let top = lag_norms.iter().copied().fold(0.0, f64::max);
    if !(top > 1e-14) {
        return Err(Error::Degenerate("inverse window is numerically zero".into()));
    }
    let last_nonzero = lag_norms.iter().rposition(|&v| v > BAND_TOL * top).unwrap_or(0);
    let band_limit = (last_nonzero < l - 1).then_some(last_nonzero);

    let hi = (l / 3).max(2);
    let mut xs = vec![];
    let mut ys = vec![];
    let mut lags = vec![];
    for (ell, &v) in lag_norms.iter().enumerate().take(hi + 1).skip(2) {
        if v > BAND_TOL * top {
            xs.push(zeta(ell as i64).ln());
            ys.push(v.ln());
            lags.push(ell);
        }
    }
    let (exponent, intercept, residuals) = if xs.len() >= 2 {
        let f = line_fit(&xs, &ys)?;
        (f.slope, f.intercept, f.residuals)
    } else {
        (f64::INFINITY, f64::NAN, vec![])
    };
    let constant = lag_norms
        .iter()
        .enumerate()
        .map(|(ell, &v)| v / zeta(ell as i64).powf(kappa_ref - 1.0))
        .fold(0.0, f64::max);
    Ok(DecayProfile {
        constant,
        exponent,
        intercept,
        fit_lags: lags,
        residuals,
        lag_norms,
        band_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inverse_analysis::model_inverse_window;
    use crate::models::{CoefficientFn, ModelSpec};

    #[test]
    fn var1_is_band_limited() {
        let m = ModelSpec::tv_var(
            1,
            vec![CoefficientFn::sinusoidal(
                nalgebra::DMatrix::from_element(1, 1, 0.4),
                nalgebra::DMatrix::from_element(1, 1, 0.2),
            )],
            CoefficientFn::scalar(1.0),
        );
        let d = model_inverse_window(&m, 100, 0, 40, 50).unwrap();
        let f = inverse_decay_fit(&d, 4.0).unwrap();
        assert_eq!(f.band_limit, Some(1));
        assert!(f.exponent.is_infinite());
    }

    #[test]
    fn zero_window_degenerate() {
        let d = InverseWindow {
            base: crate::operator_core::BlockWindow::zeros(0, 20, 1).unwrap(),
            source_pad: 0,
            conditioning: crate::operator_core::EigRange { lambda_min: 1.0, lambda_max: 1.0 },
            residual: 0.0,
        };
        assert!(matches!(inverse_decay_fit(&d, 4.0), Err(Error::Degenerate(_))));
    }
}
