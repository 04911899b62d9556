use nalgebra::DMatrix;

use crate::error::Result;
use crate::exec;
use crate::models::{rescaled, ModelSpec};
use crate::operator_core::{gu, spectral_norm, zeta};

use super::gap::{GapIndex, GapReport};
use super::section::{model_inverse_window, reference_kappa, stationary_inverse_seq};

fn lag_block(seq: &[DMatrix<f64>], r: i64) -> DMatrix<f64> {
    if r >= 0 {
        seq[r as usize].clone()
    } else {
        seq[(-r) as usize].transpose()
    }
}

/// `‖D^{(N)}_{t,τ} − D_{t−τ}(t/N)‖₂` for `t, τ ∈ [lo, hi]`.
///
/// Primary envelope `ζ^{κ−2} min(1/N, 2ζ)`, alternative
/// `ζ^{κ−2} min(1/N, 2/gu)`.
pub fn inverse_smoothness_gap(model: &ModelSpec, n: usize, lo: i64, hi: i64, pad: usize) -> Result<GapReport> {
    let d = model_inverse_window(model, n, lo, hi, pad)?;
    let kappa = reference_kappa(model);
    let span = (hi - lo) as usize;
    let nf = n as f64;
    let rows: Vec<Result<Vec<(GapIndex, f64, f64, f64)>>> = exec::map_indexed(span + 1, |i| {
        let t = lo + i as i64;
        let seq = stationary_inverse_seq(model, rescaled(t, n), span, pad)?;
        (lo..=hi)
            .map(|tau| {
                let r = t - tau;
                let gap = spectral_norm(&(d.base.block(t, tau) - lag_block(&seq, r)))?;
                let z = zeta(r);
                let head = z.powf(kappa - 2.0);
                Ok((
                    GapIndex::Pair { t, tau },
                    gap,
                    head * (1.0 / nf).min(2.0 * z),
                    head * (1.0 / nf).min(2.0 / gu(r)),
                ))
            })
            .collect()
    });
    let mut idx = vec![];
    let mut meas = vec![];
    let mut bound = vec![];
    let mut alt = vec![];
    for row in rows {
        for (i, m, b, a) in row? {
            idx.push(i);
            meas.push(m);
            bound.push(b);
            alt.push(a);
        }
    }
    Ok(GapReport::new("inverse_smoothness", idx, meas, bound).with_alt(alt))
}

/// `‖D_r(u) − D_r(v)‖₂` for `0 ≤ r ≤ R` against `|u − v| ζ(r)^{κ−1}`.
pub fn inverse_lipschitz_gap(model: &ModelSpec, u: f64, v: f64, max_lag: usize, pad: usize) -> Result<GapReport> {
    let kappa = reference_kappa(model);
    let a = stationary_inverse_seq(model, u, max_lag, pad)?;
    let b = stationary_inverse_seq(model, v, max_lag, pad)?;
    let du = (u - v).abs();
    let mut idx = vec![];
    let mut meas = vec![];
    let mut bound = vec![];
    for r in 0..=max_lag {
        idx.push(GapIndex::Lag { lag: r as i64 });
        meas.push(spectral_norm(&(&a[r] - &b[r]))?);
        bound.push(du * zeta(r as i64).powf(kappa - 1.0));
    }
    Ok(GapReport::new("inverse_lipschitz", idx, meas, bound))
}
