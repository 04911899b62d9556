use nalgebra::{Complex, ComplexField};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::inverse_analysis::{GapIndex, GapReport};
use crate::models::{cov_window, inverse_spectral_density, rescaled, CMatrix, Family, ModelSpec};

use super::pair::{partial_cov_pair, stationary_partial_pair};

type C64 = Complex<f64>;

/// `Γ(ω;u) = f(ω;u)⁻¹`: for tv-VAR `(I − Φ̂)ᴴ Σ⁻¹ (I − Φ̂)` with
/// `Φ̂ = Σ_j Φ_j e^{−ijω}`; otherwise dense inversion of `f`.
fn gamma(model: &ModelSpec, u: f64, omega: f64) -> Result<CMatrix> {
    if model.family != Family::TvVar {
        return inverse_spectral_density(model, u, omega);
    }
    let p = model.p;
    let mut m = CMatrix::identity(p, p);
    for (j, phi) in model.phis_at(u).iter().enumerate() {
        let z = C64::from_polar(1.0, -((j + 1) as f64) * omega);
        m -= phi.map(|x| C64::new(x, 0.0)) * z;
    }
    let sinv = crate::operator_core::spd_inverse(&model.innovation_at(u))
        .map_err(|e| Error::Model(format!("innovation variance not invertible: {e}")))?;
    Ok(m.adjoint() * sinv.map(|x| C64::new(x, 0.0)) * m)
}

/// `g_{a,b}(ω;u) = −Γ^{(a,b)} / (Γ^{(a,a)} Γ^{(b,b)})^{1/2}` on the grid.
pub fn partial_spectral_coherence(model: &ModelSpec, u: f64, a: usize, b: usize, omegas: &[f64]) -> Result<Vec<C64>> {
    if a >= model.p || b >= model.p {
        return Err(Error::Input(format!("component index out of range for p = {}", model.p)));
    }
    exec::map_slice(omegas, |&w| {
        let g = gamma(model, u, w)?;
        let (ga, gb) = (g[(a, a)].re, g[(b, b)].re);
        if !(ga > 0.0 && gb > 0.0) {
            return Err(Error::Model(format!("inverse spectral density not positive at ω={w}")));
        }
        Ok(-g[(a, b)] / (ga * gb).sqrt())
    })
    .into_iter()
    .collect()
}

/// Fourier-assembled partial coherence against `g_{a,b}(ω;t/N)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoherenceConsistency {
    /// `|lhs − g|` per ω against `1/N`.
    pub report: GapReport,
    #[serde(skip)]
    pub lhs: Vec<C64>,
    #[serde(skip)]
    pub target: Vec<C64>,
    /// Largest `|Im|/|z|` of the diagonal Fourier sums before the square
    /// root.
    pub imag_residue: f64,
    pub max_lag: usize,
    pub pad: usize,
}

const IMAG_FLAG: f64 = 1e-8;

impl CoherenceConsistency {
    pub fn imag_flagged(&self) -> bool {
        self.imag_residue > IMAG_FLAG
    }
}

/// `Σ_{|r|≤R} ρ^{(a,b)}_{t,t+r} e^{irω} / (Σ ρ^{(a,a)} e^{irω} · Σ ρ^{(b,b)} e^{irω})^{1/2}`
/// with principal square roots, compared with `g_{a,b}(ω;t/N)`.
#[allow(clippy::too_many_arguments)]
pub fn coherence_consistency_gap(
    model: &ModelSpec,
    n: usize,
    t: i64,
    a: usize,
    b: usize,
    omegas: &[f64],
    max_lag: usize,
    pad: usize,
) -> Result<CoherenceConsistency> {
    let h = (max_lag + pad) as i64;
    let c = cov_window(model, n, t - h, t + h)?;
    let pp = partial_cov_pair(&c, a, b, pad)?;
    let r_max = max_lag as i64;
    let rows: Vec<[f64; 3]> = (-r_max..=r_max)
        .map(|r| {
            let d = pp.delta(t, t + r);
            [d[(0, 1)], d[(0, 0)], d[(1, 1)]]
        })
        .collect();
    let target = partial_spectral_coherence(model, rescaled(t, n), a, b, omegas)?;
    let parts: Vec<Result<(C64, f64)>> = exec::map_slice(omegas, |&w| {
        let mut s = [C64::new(0.0, 0.0); 3];
        for (k, row) in rows.iter().enumerate() {
            let r = k as i64 - r_max;
            let e = C64::from_polar(1.0, r as f64 * w);
            for i in 0..3 {
                s[i] += e * row[i];
            }
        }
        if s[1].norm() < 1e-8 || s[2].norm() < 1e-8 {
            return Err(Error::Degenerate(format!("self-partial Fourier sum vanishes at ω={w}")));
        }
        let resid = (s[1].im.abs() / s[1].norm()).max(s[2].im.abs() / s[2].norm());
        Ok((s[0] / (s[1].sqrt() * s[2].sqrt()), resid))
    });
    let mut lhs = Vec::with_capacity(omegas.len());
    let mut imag_residue = 0.0f64;
    for x in parts {
        let (z, res) = x?;
        lhs.push(z);
        imag_residue = imag_residue.max(res);
    }
    let measured: Vec<f64> = lhs.iter().zip(&target).map(|(x, y)| (x - y).modulus()).collect();
    let report = GapReport::new(
        "coherence_consistency",
        omegas.iter().map(|&omega| GapIndex::Frequency { omega }).collect(),
        measured,
        vec![1.0 / n as f64; omegas.len()],
    );
    Ok(CoherenceConsistency {
        report,
        lhs,
        target,
        imag_residue,
        max_lag,
        pad,
    })
}

/// Smallest `R ∈ {10, 20, 40, …, 320}` with `‖Δ_R(u)‖ < 1e-8`.
pub fn coherence_truncation_lag(model: &ModelSpec, u: f64, a: usize, b: usize, pad: usize) -> Result<usize> {
    let mut r = 10;
    loop {
        let s = stationary_partial_pair(model, u, a, b, r, pad)?;
        let tail = s.deltas[r].amax();
        if tail < 1e-8 || r >= 320 {
            return Ok(r);
        }
        r *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::CoefficientFn;
    use nalgebra::DMatrix;

    fn var3() -> ModelSpec {
        let a0 = DMatrix::from_row_slice(3, 3, &[0.4, 0.1, 0.0, 0.0, 0.3, 0.1, 0.1, 0.0, 0.35]);
        let a1 = DMatrix::from_row_slice(3, 3, &[0.1, 0.0, 0.0, 0.15, 0.0, 0.0, 0.0, 0.15, 0.1]);
        ModelSpec::tv_var(3, vec![CoefficientFn::sinusoidal(a0, a1)], CoefficientFn::constant(DMatrix::identity(3, 3)))
    }

    #[test]
    fn independent_components_have_zero_coherence() {
        let m = ModelSpec::tv_var(
            2,
            vec![CoefficientFn::constant(DMatrix::from_diagonal(&nalgebra::dvector![0.5, -0.3]))],
            CoefficientFn::constant(DMatrix::identity(2, 2)),
        );
        let g = partial_spectral_coherence(&m, 0.0, 0, 1, &[0.0, 1.0, 3.0]).unwrap();
        assert!(g.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn matches_dense_inversion() {
        let m = var3();
        let om = crate::models::omega_grid(17);
        let g = partial_spectral_coherence(&m, 0.3, 0, 2, &om).unwrap();
        for (z, &w) in g.iter().zip(&om) {
            let f = crate::models::local_spectral_density(&m, 0.3, w).unwrap().try_inverse().unwrap();
            let o = -f[(0, 2)] / (f[(0, 0)].re * f[(2, 2)].re).sqrt();
            assert!((z - o).norm() < 1e-10);
            assert!(z.norm() <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn frozen_consistency_small() {
        let m = var3().frozen_at(0.3);
        let om = crate::models::omega_grid(9);
        let c = coherence_consistency_gap(&m, 200, 60, 0, 1, &om, 40, 60).unwrap();
        assert!(c.report.max_measured() < 1e-8, "{}", c.report.max_measured());
        assert!(!c.imag_flagged());
    }
}
