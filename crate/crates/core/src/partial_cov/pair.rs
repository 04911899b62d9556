use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exec;
use crate::inverse_analysis::{reference_kappa, GapIndex, GapReport};
use crate::models::{cov_window, rescaled, stationary_window, ModelSpec};
use crate::operator_core::{schur_complement, spectral_norm, zeta, BlockWindow};

use super::grouped::regroup_by_component;

/// Partial covariances of components `a, b` given all other components
/// over the (padded) window, on the interior `[t_lo, t_hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialPair {
    pub a: usize,
    pub b: usize,
    pub conditioning_set: Vec<usize>,
    pub t_lo: i64,
    pub t_hi: i64,
    pub pad: usize,
    /// Component-major `2L × 2L`: rows `0..L` component `a`, `L..2L`
    /// component `b`.
    pub deltas: DMatrix<f64>,
}

impl PartialPair {
    pub fn len(&self) -> usize {
        (self.t_hi - self.t_lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `Δ_{t,τ}` as a 2×2 matrix over `(a, b)`.
    pub fn delta(&self, t: i64, tau: i64) -> DMatrix<f64> {
        let l = self.len();
        let (i, k) = ((t - self.t_lo) as usize, (tau - self.t_lo) as usize);
        DMatrix::from_fn(2, 2, |x, y| self.deltas[(x * l + i, y * l + k)])
    }
}

fn schur_over(c: &BlockWindow, set: &[usize], pad: usize) -> Result<(DMatrix<f64>, Vec<usize>)> {
    if !c.is_symmetric() {
        return Err(Error::Input("partial covariance needs a symmetric window".into()));
    }
    if c.len() <= 2 * pad {
        return Err(Error::Input(format!("pad {pad} leaves no interior in a window of length {}", c.len())));
    }
    let p = c.p();
    if set.iter().any(|&x| x >= p) {
        return Err(Error::Input(format!("component index out of range for p = {p}")));
    }
    let rest: Vec<usize> = (0..p).filter(|x| !set.contains(x)).collect();
    let g = regroup_by_component(c);
    let l = c.len();
    let full = schur_complement(&g.stacked(set, set), &g.stacked(set, &rest), &g.stacked(&rest, &rest))?;
    let keep = l - 2 * pad;
    let k = set.len();
    let mut inner = DMatrix::zeros(k * keep, k * keep);
    for i in 0..k {
        for j in 0..k {
            inner
                .view_mut((i * keep, j * keep), (keep, keep))
                .copy_from(&full.view((i * l + pad, j * l + pad), (keep, keep)));
        }
    }
    Ok((inner, rest))
}

/// `Δ^{−{a,b}} = 𝐂_{S,S} − 𝐂_{S,S'} 𝐂_{S',S'}⁻¹ 𝐂_{S',S}` with `S = {a, b}`,
/// the conditioning set restricted to the window. `pad` points at each end
/// are discarded.
pub fn partial_cov_pair(c: &BlockWindow, a: usize, b: usize, pad: usize) -> Result<PartialPair> {
    if a == b {
        return Err(Error::Input("partial pair needs two distinct components".into()));
    }
    let (deltas, rest) = schur_over(c, &[a, b], pad)?;
    Ok(PartialPair {
        a,
        b,
        conditioning_set: rest,
        t_lo: c.t_lo() + pad as i64,
        t_hi: c.t_hi() - pad as i64,
        pad,
        deltas,
    })
}

/// `ρ^{(a,a)|−{a}}_{t,τ}` on the interior as an `L × L` matrix.
pub fn self_partial_cov(c: &BlockWindow, a: usize, pad: usize) -> Result<DMatrix<f64>> {
    Ok(schur_over(c, &[a], pad)?.0)
}

fn lag_of(seq: &[DMatrix<f64>], r: i64) -> DMatrix<f64> {
    if r >= 0 {
        seq[r as usize].clone()
    } else {
        seq[(-r) as usize].transpose()
    }
}

/// Lag-indexed partial covariances of the frozen process.
#[derive(Clone, Debug, PartialEq)]
pub struct StationaryPartial {
    /// `Δ_r(u)`, `r = 0..=R`, with `Δ_r = Δ_{t,t−r}`.
    pub deltas: Vec<DMatrix<f64>>,
    /// Self-partial `ρ_r(u)` of component `a` given all others.
    pub self_a: Vec<f64>,
    /// `max_r ‖Δ_{0,−r} − Δ_{−1,−1−r}‖`: departure from Toeplitz structure
    /// caused by the finite conditioning window.
    pub drift: f64,
}

/// `Δ_r(u)` read from the centre of a Toeplitz section over
/// `[−(R+pad+1), R+pad]`.
pub fn stationary_partial_pair(
    model: &ModelSpec,
    u: f64,
    a: usize,
    b: usize,
    max_lag: usize,
    pad: usize,
) -> Result<StationaryPartial> {
    let h = (max_lag + pad) as i64;
    let c = stationary_window(model, u, -h - 1, h)?;
    let pp = partial_cov_pair(&c, a, b, pad)?;
    let sa = self_partial_cov(&c, a, pad)?;
    let deltas: Vec<DMatrix<f64>> = (0..=max_lag as i64).map(|r| pp.delta(0, -r)).collect();
    let mut drift = 0.0f64;
    for r in 0..max_lag as i64 {
        drift = drift.max(spectral_norm(&(pp.delta(0, -r) - pp.delta(-1, -1 - r)))?);
    }
    let off = (-pp.t_lo) as usize;
    let self_a = (0..=max_lag).map(|r| sa[(off, off - r)]).collect();
    Ok(StationaryPartial { deltas, self_a, drift })
}

/// Nonstationary against frozen partial covariances.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct PartialSmoothness {
    /// `‖Δ_{t,τ,N} − Δ_{t−τ}(t/N)‖₂` against `ζ^{κ−2} min(1/N, ζ)`.
    pub pair: GapReport,
    /// `|ρ_{t,τ,N} − ρ_{t−τ}(t/N)|` for the self-partial of `a`.
    pub self_a: GapReport,
}

pub fn partial_smoothness_gap(
    model: &ModelSpec,
    n: usize,
    a: usize,
    b: usize,
    lo: i64,
    hi: i64,
    pad: usize,
) -> Result<PartialSmoothness> {
    let kappa = reference_kappa(model);
    let c = cov_window(model, n, lo - pad as i64, hi + pad as i64)?;
    let pp = partial_cov_pair(&c, a, b, pad)?;
    let sa = self_partial_cov(&c, a, pad)?;
    let span = (hi - lo) as usize;
    let nf = n as f64;
    type Row = (GapIndex, f64, f64, f64);
    let rows: Vec<Result<Vec<Row>>> = exec::map_indexed(span + 1, |i| {
        let t = lo + i as i64;
        let st = stationary_partial_pair(model, rescaled(t, n), a, b, span, pad)?;
        (lo..=hi)
            .map(|tau| {
                let r = t - tau;
                let gap = spectral_norm(&(pp.delta(t, tau) - lag_of(&st.deltas, r)))?;
                let k = (tau - lo) as usize;
                let self_gap = (sa[(i, k)] - st.self_a[r.unsigned_abs() as usize]).abs();
                let z = zeta(r);
                Ok((GapIndex::Pair { t, tau }, gap, self_gap, z.powf(kappa - 2.0) * (1.0 / nf).min(z)))
            })
            .collect()
    });
    let (mut idx, mut m1, mut m2, mut bound) = (vec![], vec![], vec![], vec![]);
    for row in rows {
        for (i, g, s, e) in row? {
            idx.push(i);
            m1.push(g);
            m2.push(s);
            bound.push(e);
        }
    }
    Ok(PartialSmoothness {
        pair: GapReport::new("partial_smoothness", idx.clone(), m1, bound.clone()),
        self_a: GapReport::new("self_partial_smoothness", idx, m2, bound),
    })
}

/// `‖Δ_r(u) − Δ_r(v)‖₂` and `|ρ_r(u) − ρ_r(v)|` against `|u − v| ζ(r)^{κ−1}`.
pub fn partial_lipschitz_gap(
    model: &ModelSpec,
    u: f64,
    v: f64,
    a: usize,
    b: usize,
    max_lag: usize,
    pad: usize,
) -> Result<PartialSmoothness> {
    let kappa = reference_kappa(model);
    let x = stationary_partial_pair(model, u, a, b, max_lag, pad)?;
    let y = stationary_partial_pair(model, v, a, b, max_lag, pad)?;
    let (mut idx, mut m1, mut m2, mut bound) = (vec![], vec![], vec![], vec![]);
    for r in 0..=max_lag {
        idx.push(GapIndex::Lag { lag: r as i64 });
        m1.push(spectral_norm(&(&x.deltas[r] - &y.deltas[r]))?);
        m2.push((x.self_a[r] - y.self_a[r]).abs());
        bound.push((u - v).abs() * zeta(r as i64).powf(kappa - 1.0));
    }
    Ok(PartialSmoothness {
        pair: GapReport::new("partial_lipschitz", idx.clone(), m1, bound.clone()),
        self_a: GapReport::new("self_partial_lipschitz", idx, m2, bound),
    })
}
