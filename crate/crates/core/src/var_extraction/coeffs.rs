use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::inverse_analysis::finite_section_inverse;
use crate::models::{cov_window, stationary_window, ModelSpec};
use crate::operator_core::{spd_inverse, spectral_norm, BlockWindow};

/// Autoregressive coefficients `Φ_{T,1..order}` and innovation variance.
#[derive(Clone, Debug, PartialEq)]
pub struct VarCoefficients {
    pub t: i64,
    pub order: usize,
    pub phis: Vec<DMatrix<f64>>,
    pub sigma: DMatrix<f64>,
    /// One-sided depth `L` used for infinite-order coefficients.
    pub depth: Option<usize>,
    /// Change of the coefficients under `L → L + 50`.
    pub drift: Option<f64>,
    /// Max discrepancy between the inverse and normal-equation paths.
    pub path_agreement: Option<f64>,
}

const PATH_TOL: f64 = 1e-8;
pub const DRIFT_STEP: usize = 50;

impl VarCoefficients {
    pub fn phi_norms(&self) -> Result<Vec<f64>> {
        self.phis.iter().map(spectral_norm).collect()
    }

    /// `max(‖Σ − Σ'‖, max_j ‖Φ_j − Φ'_j‖)` over the common orders.
    pub fn distance(&self, other: &VarCoefficients) -> Result<f64> {
        let mut d = spectral_norm(&(&self.sigma - &other.sigma))?;
        for (a, b) in self.phis.iter().zip(&other.phis) {
            d = d.max(spectral_norm(&(a - b))?);
        }
        Ok(d)
    }
}

/// Coefficients from the bottom row of the inverse of a one-sided section
/// ending at `w.t_hi()`: `Φ_j = −D_{T,T}⁻¹ D_{T,T−j}`, `Σ = D_{T,T}⁻¹`.
pub fn bottom_row_coeffs(w: &BlockWindow, order: usize) -> Result<VarCoefficients> {
    let t = w.t_hi();
    if order >= w.len() {
        return Err(Error::Input(format!("order {order} needs a section longer than {}", w.len())));
    }
    let d = finite_section_inverse(w, 0)?;
    let sigma = spd_inverse(&d.base.block(t, t))?;
    let phis = (1..=order as i64).map(|j| -(&sigma * d.base.block(t, t - j))).collect();
    Ok(VarCoefficients {
        t,
        order,
        phis,
        sigma,
        depth: None,
        drift: None,
        path_agreement: None,
    })
}

/// Block normal equations `Σ_j Φ_j C_{T−j,T−k} = C_{T,T−k}`, `k = 1..d`,
/// on the section `[T−d, T]`.
pub fn normal_equation_coeffs(w: &BlockWindow) -> Result<VarCoefficients> {
    let t = w.t_hi();
    let d = w.len() - 1;
    let p = w.p();
    let c_tt = w.block(t, t);
    if d == 0 {
        return Ok(VarCoefficients {
            t,
            order: 0,
            phis: vec![],
            sigma: c_tt,
            depth: None,
            drift: None,
            path_agreement: None,
        });
    }
    let mut g = DMatrix::zeros(d * p, d * p);
    let mut c = DMatrix::zeros(p, d * p);
    for j in 1..=d {
        for k in 1..=d {
            g.view_mut(((j - 1) * p, (k - 1) * p), (p, p))
                .copy_from(&w.block_view(t - j as i64, t - k as i64));
        }
        c.view_mut((0, (j - 1) * p), (p, p)).copy_from(&w.block_view(t, t - j as i64));
    }
    let chol = g
        .cholesky()
        .ok_or_else(|| Error::Conditioning("past section is not positive definite".into()))?;
    let phi_row = chol.solve(&c.transpose()).transpose();
    let phis: Vec<DMatrix<f64>> = (0..d).map(|j| phi_row.view((0, j * p), (p, p)).into_owned()).collect();
    let mut sigma = c_tt;
    for (j, phi) in phis.iter().enumerate() {
        sigma -= phi * w.block(t - j as i64 - 1, t);
    }
    let sigma = (&sigma + sigma.transpose()) * 0.5;
    Ok(VarCoefficients {
        t,
        order: d,
        phis,
        sigma,
        depth: None,
        drift: None,
        path_agreement: None,
    })
}

/// Both paths on the section; errors if they disagree beyond `1e-8`.
fn dual_path(w: &BlockWindow) -> Result<VarCoefficients> {
    let d = w.len() - 1;
    let mut a = if d == 0 {
        normal_equation_coeffs(w)?
    } else {
        bottom_row_coeffs(w, d)?
    };
    let b = normal_equation_coeffs(w)?;
    let gap = a.distance(&b)?;
    if !(gap <= PATH_TOL * a.sigma.amax().max(1.0)) {
        return Err(Error::Conditioning(format!(
            "inverse and normal-equation paths disagree by {gap:.3e}"
        )));
    }
    a.path_agreement = Some(gap);
    Ok(a)
}

/// Projection of `X_T` on `X_{T−1}, …, X_{T−d}`. `d = 0` gives no
/// coefficients and `Σ = C_{T,T}`.
pub fn var_coeffs_finite(model: &ModelSpec, n: usize, t: i64, d: usize) -> Result<VarCoefficients> {
    dual_path(&cov_window(model, n, t - d as i64, t)?)
}

fn infinite_from<F>(section: F, order: usize, l: Option<usize>) -> Result<VarCoefficients>
where
    F: Fn(usize) -> Result<BlockWindow>,
{
    let l = l.unwrap_or(order + 100);
    if l < order + 50 {
        return Err(Error::Input(format!("one-sided depth {l} must be at least J + 50 = {}", order + 50)));
    }
    let mut a = bottom_row_coeffs(&section(l)?, order)?;
    let b = bottom_row_coeffs(&section(l + DRIFT_STEP)?, order)?;
    a.drift = Some(a.distance(&b)?);
    a.depth = Some(l);
    Ok(a)
}

/// `Φ_{T,1..J}` of the VAR(∞) representation from a one-sided section of
/// depth `L` (default `J + 100`), with the drift under `L → L + 50`.
pub fn var_coeffs_infinite(model: &ModelSpec, n: usize, t: i64, j: usize, l: Option<usize>) -> Result<VarCoefficients> {
    infinite_from(|l| cov_window(model, n, t - l as i64, t), j, l)
}

/// Block Yule-Walker coefficients of the frozen process at `u`.
pub fn stationary_var_coeffs(model: &ModelSpec, u: f64, d: usize) -> Result<VarCoefficients> {
    dual_path(&stationary_window(model, u, -(d as i64), 0)?)
}

/// `Φ_{1..J}(u)` of the frozen process from a long one-sided Toeplitz
/// section.
pub fn stationary_var_coeffs_infinite(model: &ModelSpec, u: f64, j: usize, l: Option<usize>) -> Result<VarCoefficients> {
    infinite_from(|l| stationary_window(model, u, -(l as i64), 0), j, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::CoefficientFn;

    fn ar1(phi: f64) -> ModelSpec {
        ModelSpec::tv_var(1, vec![CoefficientFn::scalar(phi)], CoefficientFn::scalar(1.0))
    }

    #[test]
    fn white_noise_has_no_dynamics() {
        let m = ModelSpec::tv_var(2, vec![CoefficientFn::constant(DMatrix::zeros(2, 2))], CoefficientFn::constant(DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0])));
        let v = var_coeffs_infinite(&m, 100, 10, 5, None).unwrap();
        assert!(v.phis.iter().all(|p| p.amax() < 1e-12));
        assert!((v.sigma[(0, 1)] - 0.3).abs() < 1e-10);
    }

    #[test]
    fn ar1_infinite_and_finite() {
        let v = var_coeffs_infinite(&ar1(0.5), 100, 0, 10, None).unwrap();
        assert!((v.phis[0][(0, 0)] - 0.5).abs() < 1e-8);
        assert!(v.phis[1..].iter().all(|p| p[(0, 0)].abs() < 1e-8));
        assert!((v.sigma[(0, 0)] - 1.0).abs() < 1e-8);
        assert!(v.drift.unwrap() < 1e-10);
        let f = var_coeffs_finite(&ar1(0.5), 100, 0, 1).unwrap();
        assert!((f.phis[0][(0, 0)] - 0.5).abs() < 1e-12);
        assert!(var_coeffs_infinite(&ar1(0.5), 100, 0, 10, Some(40)).is_err());
    }

    #[test]
    fn frozen_var2_recovered() {
        let phi1 = DMatrix::from_row_slice(2, 2, &[0.4, 0.1, -0.2, 0.3]);
        let phi2 = DMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.05, -0.1]);
        let m = ModelSpec::tv_var(
            2,
            vec![CoefficientFn::constant(phi1.clone()), CoefficientFn::constant(phi2.clone())],
            CoefficientFn::constant(DMatrix::identity(2, 2)),
        );
        for d in [2, 4] {
            let v = var_coeffs_finite(&m, 100, 7, d).unwrap();
            assert!((&v.phis[0] - &phi1).amax() < 1e-8);
            assert!((&v.phis[1] - &phi2).amax() < 1e-8);
            assert!(v.phis[2..].iter().all(|p| p.amax() < 1e-8));
            let s = stationary_var_coeffs(&m, 0.4, d).unwrap();
            assert!((&s.phis[0] - &phi1).amax() < 1e-8);
        }
    }

    #[test]
    fn order_zero() {
        let v = var_coeffs_finite(&ar1(0.5), 100, 0, 0).unwrap();
        assert!(v.phis.is_empty());
        assert!((v.sigma[(0, 0)] - 1.0 / 0.75).abs() < 1e-10);
    }
}
