use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator_core::{band_truncate, banded_error_bound, spectral_norm, BlockWindow};

/// Truncated Neumann approximation of `C⁻¹` around the banded part `B_M`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeumannApprox {
    #[serde(skip)]
    pub approx: BlockWindow,
    pub bandwidth: usize,
    pub terms: usize,
    /// `‖B_M⁻¹‖₂`.
    pub banded_inverse_norm: f64,
    /// `‖C − B_M‖₂`.
    pub remainder_norm: f64,
    /// `q = ‖B_M⁻¹‖ ‖C − B_M‖`.
    pub contraction: f64,
    /// `‖B_M⁻¹‖ q^{terms+1} / (1 − q)`, bounds `‖approx − C⁻¹‖₂`.
    pub certificate: f64,
    /// `‖B_M⁻¹‖ · 2K/(κ−1)(M−1)^{1−κ}` when an envelope is supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope_product: Option<f64>,
}

/// `Σ_{s=0}^{terms} (−B⁻¹E)^s B⁻¹` with `E = C − B_M`. Fails with
/// `Divergence` unless `q < 1`.
pub fn neumann_inverse(c: &BlockWindow, m: usize, terms: usize) -> Result<NeumannApprox> {
    let b = band_truncate(c, m);
    let bf = b.base().flat();
    let e = c.flat() - bf;
    let binv = bf
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Conditioning(format!("banded part with M = {m} is singular")))?;
    let binv_norm = spectral_norm(&binv)?;
    let e_norm = spectral_norm(&e)?;
    let q = binv_norm * e_norm;
    if !(q < 1.0) {
        return Err(Error::Divergence { product: q });
    }
    let g = -(&binv * &e);
    let mut term = binv.clone();
    let mut sum = binv.clone();
    for _ in 0..terms {
        term = &g * &term;
        sum += &term;
    }
    let approx = if c.is_symmetric() {
        BlockWindow::from_flat_symmetrized(c.t_lo(), c.p(), sum)?
    } else {
        BlockWindow::from_flat(c.t_lo(), c.p(), sum)?
    };
    let certificate = if q == 0.0 {
        0.0
    } else {
        binv_norm * q.powi(terms as i32 + 1) / (1.0 - q)
    };
    Ok(NeumannApprox {
        approx,
        bandwidth: m,
        terms,
        banded_inverse_norm: binv_norm,
        remainder_norm: e_norm,
        contraction: q,
        certificate,
        envelope_product: None,
    })
}

/// As [`neumann_inverse`], also reporting the envelope-based contraction
/// `‖B_M⁻¹‖ · 2K/(κ−1)(M−1)^{1−κ}`.
pub fn neumann_inverse_with_envelope(
    c: &BlockWindow,
    m: usize,
    terms: usize,
    k: f64,
    kappa: f64,
) -> Result<NeumannApprox> {
    let mut out = neumann_inverse(c, m, terms)?;
    out.envelope_product = Some(out.banded_inverse_norm * banded_error_bound(k, kappa, m)?);
    Ok(out)
}

/// Spectral distance of two windows on the same index set.
pub fn window_distance(a: &BlockWindow, b: &BlockWindow) -> Result<f64> {
    let d: DMatrix<f64> = a.flat() - b.flat();
    spectral_norm(&d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toeplitz_power(len: i64, kappa: f64, scale: f64) -> BlockWindow {
        BlockWindow::toeplitz(0, len - 1, 1, |r| {
            let v = if r == 0 { 1.0 } else { scale * (r.unsigned_abs() as f64).powf(-kappa) };
            DMatrix::from_element(1, 1, v)
        })
        .unwrap()
    }

    #[test]
    fn banded_input_is_exact() {
        let c = BlockWindow::toeplitz(0, 19, 1, |r| {
            DMatrix::from_element(1, 1, match r { 0 => 2.0, -1 => 0.5, _ => 0.0 })
        })
        .unwrap();
        let n = neumann_inverse(&c, 1, 3).unwrap();
        assert_eq!(n.certificate, 0.0);
        let exact = c.flat().clone().try_inverse().unwrap();
        assert!((n.approx.flat() - exact).amax() < 1e-12);
    }

    #[test]
    fn certificate_bounds_error() {
        let c = toeplitz_power(40, 3.0, 0.3);
        let exact = c.flat().clone().try_inverse().unwrap();
        for terms in [0, 1, 3, 8] {
            let n = neumann_inverse(&c, 3, terms).unwrap();
            let err = spectral_norm(&(n.approx.flat() - &exact)).unwrap();
            assert!(err <= n.certificate * (1.0 + 1e-9) + 1e-14, "terms {terms}: {err} > {}", n.certificate);
        }
    }

    #[test]
    fn divergence_reported() {
        let c = toeplitz_power(30, 1.2, 0.9);
        assert!(matches!(neumann_inverse(&c, 1, 3), Err(Error::Divergence { .. })));
    }
}
