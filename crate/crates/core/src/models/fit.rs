//! Log-log decay fits and the empirical smoothness constant of the
//! locally stationary approximation.

use serde::Serialize;

use super::covariance::{cov_window, rescaled, stationary_cov_seq};
use super::spec::ModelSpec;
use crate::error::{Error, Result};
use crate::exec;
use crate::operator_core::{gu, spectral_norm, zeta};

/// Ordinary least-squares line `y ≈ intercept + slope·x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub residuals: Vec<f64>,
}

pub fn line_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Fit(format!("line fit needs ≥ 2 paired points, got {}", x.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("line fit abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = x.iter().zip(y).map(|(a, b)| b - intercept - slope * a).collect();
    Ok(LineFit {
        intercept,
        slope,
        residuals,
    })
}

/// Fitted decay of lag-maximal block norms.
///
/// For covariance fits `constant = K̂ = e^{intercept}` and
/// `exponent = κ̂` in `‖C_{t,τ}‖ ≈ K̂ gu(t−τ)^{−κ̂}`. For inverse fits
/// `exponent` is the slope against `log ζ` and `constant` the max-ratio
/// envelope constant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayProfile {
    pub constant: f64,
    pub exponent: f64,
    pub intercept: f64,
    pub fit_lags: Vec<usize>,
    pub residuals: Vec<f64>,
    /// `max_{|t−τ|=ℓ} ‖W_{t,τ}‖₂` for `ℓ = 0, 1, …`.
    pub lag_norms: Vec<f64>,
    /// Set when all norms beyond this lag vanish (relative `1e-9`).
    pub band_limit: Option<usize>,
}

/// Smoothness of `C^{(N)}_{t,τ}` against `C_{t−τ}(t/N)` over a window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothnessConstants {
    pub kappa: f64,
    /// `sup ‖C^{(N)}_{t,τ} − C_{t−τ}(t/N)‖₂`.
    pub max_gap: f64,
    /// Sup of gap / `[gu^{1−κ} min(1/N, 2/gu)]`.
    pub constant_gu: f64,
    /// Sup of gap / `[gu^{1−κ} min(1/N, 2ζ)]`.
    pub constant_zeta: f64,
    /// Per-lag maxima of the gap, `ℓ = 0, 1, …`.
    pub lag_gaps: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionFit {
    pub decay: DecayProfile,
    pub smoothness: SmoothnessConstants,
}

/// Regression of `log ‖C_{t,τ}‖` on `log gu(t−τ)` over lags ≥ 2 and the
/// smoothness constants of the window. `κ` for the envelopes is the
/// model's declared exponent when present, otherwise the fitted one.
pub fn assumption_fit(model: &ModelSpec, n: usize, lo: i64, hi: i64) -> Result<AssumptionFit> {
    let w = cov_window(model, n, lo, hi)?;
    let lag_norms = w.lag_max_norms();
    let floor = 1e-14 * lag_norms[0].max(f64::MIN_POSITIVE);
    let (xs, ys, lags): (Vec<f64>, Vec<f64>, Vec<usize>) = lag_norms
        .iter()
        .enumerate()
        .skip(2)
        .filter(|(_, &v)| v > floor)
        .map(|(l, &v)| ((l as f64).ln(), v.ln(), l))
        .fold((vec![], vec![], vec![]), |(mut a, mut b, mut c), (x, y, l)| {
            a.push(x);
            b.push(y);
            c.push(l);
            (a, b, c)
        });
    if xs.len() < 4 {
        return Err(Error::Fit(format!("only {} usable lags for the decay fit", xs.len())));
    }
    let fit = line_fit(&xs, &ys)?;
    let decay = DecayProfile {
        constant: fit.intercept.exp(),
        exponent: -fit.slope,
        intercept: fit.intercept,
        fit_lags: lags,
        residuals: fit.residuals,
        band_limit: None,
        lag_norms,
    };
    let kappa = model.kappa.unwrap_or(decay.exponent);
    let l = w.len();
    let rows: Vec<Result<Vec<(usize, f64)>>> = exec::map_indexed(l, |i| {
        let t = lo + i as i64;
        let seq = stationary_cov_seq(model, rescaled(t, n), l)?;
        (lo..=hi)
            .map(|tau| {
                let r = t - tau;
                let stat = if r >= 0 {
                    seq[r as usize].clone()
                } else {
                    seq[(-r) as usize].transpose()
                };
                Ok((r.unsigned_abs() as usize, spectral_norm(&(w.block(t, tau) - stat))?))
            })
            .collect()
    });
    let nf = n as f64;
    let mut sm = SmoothnessConstants {
        kappa,
        max_gap: 0.0,
        constant_gu: 0.0,
        constant_zeta: 0.0,
        lag_gaps: vec![0.0; l],
    };
    for row in rows {
        for (lag, gap) in row? {
            let g = gu(lag as i64);
            let base = g.powf(1.0 - kappa);
            let env_gu = base * (1.0 / nf).min(2.0 / g);
            let env_zeta = base * (1.0 / nf).min(2.0 * zeta(lag as i64));
            sm.max_gap = sm.max_gap.max(gap);
            sm.constant_gu = sm.constant_gu.max(gap / env_gu);
            sm.constant_zeta = sm.constant_zeta.max(gap / env_zeta);
            sm.lag_gaps[lag] = sm.lag_gaps[lag].max(gap);
        }
    }
    Ok(AssumptionFit {
        decay,
        smoothness: sm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit_exact() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 3.0 * v).collect();
        let f = line_fit(&x, &y).unwrap();
        assert!((f.slope + 3.0).abs() < 1e-14 && (f.intercept - 2.0).abs() < 1e-14);
        assert!(line_fit(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }
}
