//! Local spectral densities `f(ω;u) = Σ_r C_r(u) e^{−irω}` (no `1/2π`).

use nalgebra::{Complex, DMatrix};

use super::spec::{transfer, Family, ModelSpec};
use crate::error::{Error, Result};
use crate::exec;
use crate::operator_core::EigRange;

pub type CMatrix = DMatrix<Complex<f64>>;

fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex::new(x, 0.0))
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex::new(0.5, 0.0)
}

/// `f(ω;u)`: `A(ω)A(ω)ᴴ` with `A = Σ Ψ_j e^{−ijω}` for tv-VMA,
/// `A Σ Aᴴ` with `A = (I − Σ Φ_j e^{−ijω})⁻¹` for tv-VAR, and
/// `v(u)/|1 − Σ a_j e^{−ijω}|²` for the squared tv-ARCH process.
pub fn local_spectral_density(model: &ModelSpec, u: f64, omega: f64) -> Result<CMatrix> {
    match model.family {
        Family::TvVma => {
            let a = transfer(&model.psis_at(u), omega, 0);
            Ok(hermitian_part(&(&a * a.adjoint())))
        }
        Family::TvVar => {
            let a = var_transfer(model, u, omega)?;
            Ok(hermitian_part(&(&a * to_complex(&model.innovation_at(u)) * a.adjoint())))
        }
        Family::TvArch => {
            let v = super::covariance::arch_innovation_variance(model, u)?;
            let a: Vec<f64> = model.phis_at(u).iter().map(|m| m[(0, 0)]).collect();
            let mut z = Complex::new(1.0, 0.0);
            for (j, aj) in a.iter().enumerate() {
                z -= Complex::from_polar(*aj, -((j + 1) as f64) * omega);
            }
            if z.norm() < 1e-12 {
                return Err(Error::Model(format!("ARCH transfer singular at ω={omega}")));
            }
            Ok(DMatrix::from_element(1, 1, Complex::new(v / z.norm_sqr(), 0.0)))
        }
        Family::Sre => Err(Error::Unsupported("SRE has no closed-form spectral density".into())),
    }
}

/// `(I − Σ_j Φ_j(u) e^{−ijω})⁻¹`.
pub fn var_transfer(model: &ModelSpec, u: f64, omega: f64) -> Result<CMatrix> {
    let p = model.p;
    let m = CMatrix::identity(p, p) - transfer(&model.phis_at(u), omega, 1);
    m.try_inverse()
        .filter(|a| a.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
        .ok_or_else(|| Error::Model(format!("transfer function singular at u={u}, ω={omega}")))
}

/// `f(ω;u)⁻¹` by dense complex inversion.
pub fn inverse_spectral_density(model: &ModelSpec, u: f64, omega: f64) -> Result<CMatrix> {
    let f = local_spectral_density(model, u, omega)?;
    let inv = f
        .try_inverse()
        .ok_or_else(|| Error::Model(format!("spectral density singular at u={u}, ω={omega}")))?;
    Ok(hermitian_part(&inv))
}

/// Eigenvalues of a Hermitian matrix via its real symmetric embedding
/// `[[Re, −Im], [Im, Re]]`, whose spectrum is that of `H` doubled.
pub fn hermitian_eig_range(h: &CMatrix) -> EigRange {
    let p = h.nrows();
    let mut e = DMatrix::zeros(2 * p, 2 * p);
    for i in 0..p {
        for j in 0..p {
            let z = h[(i, j)];
            e[(i, j)] = z.re;
            e[(i + p, j + p)] = z.re;
            e[(i, j + p)] = -z.im;
            e[(i + p, j)] = z.im;
        }
    }
    let e = (&e + e.transpose()) * 0.5;
    let ev = e.symmetric_eigenvalues();
    EigRange {
        lambda_min: ev.min(),
        lambda_max: ev.max(),
    }
}

/// `(min λ_min f, max λ_max f)` over both grids.
pub fn spectral_eig_range(model: &ModelSpec, u_grid: &[f64], omega_grid: &[f64]) -> Result<EigRange> {
    if u_grid.is_empty() || omega_grid.is_empty() {
        return Err(Error::Input("spectral_eig_range needs nonempty grids".into()));
    }
    let per_u = exec::try_map_indexed(u_grid.len(), |i| {
        let mut r = EigRange {
            lambda_min: f64::INFINITY,
            lambda_max: f64::NEG_INFINITY,
        };
        for &w in omega_grid {
            let e = hermitian_eig_range(&local_spectral_density(model, u_grid[i], w)?);
            r = r.union(&e);
        }
        Ok(r)
    })?;
    Ok(per_u.iter().skip(1).fold(per_u[0], |a, b| a.union(b)))
}

/// `n` equispaced frequencies on `[0, π]`.
pub fn omega_grid(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n)
        .map(|k| std::f64::consts::PI * k as f64 / (n - 1) as f64)
        .collect()
}
