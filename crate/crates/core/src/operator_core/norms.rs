use nalgebra::{DMatrix, DMatrixView};
use serde::{Deserialize, Serialize};

use super::window::{is_exactly_symmetric, symmetrize};
use super::BlockWindow;
use crate::error::{Error, Result};

/// Relative eigenvalue floor below which a symmetric matrix counts as
/// singular.
pub const SPD_THRESHOLD: f64 = 1e-12;

/// Extremal eigenvalues of a symmetric operator section.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigRange {
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl EigRange {
    /// `λ_min > SPD_THRESHOLD · λ_max` with `λ_max > 0`.
    pub fn is_spd(&self) -> bool {
        self.lambda_max > 0.0 && self.lambda_min > SPD_THRESHOLD * self.lambda_max
    }

    pub fn condition_ratio(&self) -> f64 {
        self.lambda_max / self.lambda_min
    }

    pub fn contains(&self, other: &EigRange, slack: f64) -> bool {
        other.lambda_min >= self.lambda_min - slack && other.lambda_max <= self.lambda_max + slack
    }

    pub fn union(&self, other: &EigRange) -> EigRange {
        EigRange {
            lambda_min: self.lambda_min.min(other.lambda_min),
            lambda_max: self.lambda_max.max(other.lambda_max),
        }
    }
}

/// Largest singular value.
pub fn spectral_norm(a: &DMatrix<f64>) -> Result<f64> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Input("non-finite entry in spectral_norm input".into()));
    }
    Ok(spectral_norm_view(a.as_view()))
}

pub(crate) fn spectral_norm_view(a: DMatrixView<'_, f64>) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    if a.nrows() == 1 && a.ncols() == 1 {
        return a[(0, 0)].abs();
    }
    a.singular_values().max()
}

/// Maximum absolute row sum.
pub fn inf_norm(a: &DMatrix<f64>) -> f64 {
    a.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Extremal eigenvalues of the flattened window.
pub fn sym_eig_range(w: &BlockWindow) -> Result<EigRange> {
    if !w.is_symmetric() {
        return Err(Error::Input("sym_eig_range needs a symmetric window".into()));
    }
    Ok(eig_range_unchecked(w.flat()))
}

/// Extremal eigenvalues of a symmetric matrix; rejects matrices that are
/// not symmetric to `1e-12` relative.
pub fn matrix_eig_range(m: &DMatrix<f64>) -> Result<EigRange> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Input("eigen range needs a nonempty square matrix".into()));
    }
    if !is_exactly_symmetric(m) {
        let scale = m.amax().max(f64::MIN_POSITIVE);
        if (m - m.transpose()).amax() > 1e-12 * scale {
            return Err(Error::Input("matrix is not symmetric".into()));
        }
        return Ok(eig_range_unchecked(&symmetrize(m)));
    }
    Ok(eig_range_unchecked(m))
}

fn eig_range_unchecked(m: &DMatrix<f64>) -> EigRange {
    if m.nrows() == 1 {
        let v = m[(0, 0)];
        return EigRange {
            lambda_min: v,
            lambda_max: v,
        };
    }
    let ev = m.symmetric_eigenvalues();
    EigRange {
        lambda_min: ev.min(),
        lambda_max: ev.max(),
    }
}

/// Inverse of a symmetric positive definite matrix via Cholesky; the result
/// is exactly symmetric.
pub fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Conditioning("matrix is not positive definite".into()))?;
    let l = chol.l_dirty();
    let diag = l.diagonal();
    let (dmin, dmax) = (diag.min(), diag.max());
    if !(dmin > 0.0) || (dmin / dmax).powi(2) <= SPD_THRESHOLD {
        return Err(Error::Conditioning(format!(
            "Cholesky pivot ratio {:.3e} below threshold",
            (dmin / dmax).powi(2)
        )));
    }
    let inv = chol.inverse();
    Ok(symmetrize(&inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spectral_norm_identity_and_diag() {
        for n in [1, 3, 7] {
            assert!((spectral_norm(&DMatrix::identity(n, n)).unwrap() - 1.0).abs() < 1e-15);
        }
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -5.0]));
        assert!((spectral_norm(&d).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_norm_matches_power_iteration_on_gram() {
        // Oracle: power iteration on AᵀA, independent of the SVD path.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
        let g = a.transpose() * &a;
        let mut v = nalgebra::DVector::from_element(4, 1.0);
        let mut lam = 0.0;
        for _ in 0..5000 {
            let w = &g * &v;
            lam = w.norm();
            v = w / lam;
        }
        let s = spectral_norm(&a).unwrap();
        assert!((s - lam.sqrt()).abs() <= 1e-10 * s);
    }

    #[test]
    fn spectral_norm_rejects_nan() {
        let mut a = DMatrix::zeros(2, 2);
        a[(1, 1)] = f64::INFINITY;
        assert!(matches!(spectral_norm(&a), Err(Error::Input(_))));
    }

    #[test]
    fn eig_range_identity_and_block_diag() {
        let w = BlockWindow::identity(0, 9, 2).unwrap();
        let r = sym_eig_range(&w).unwrap();
        assert!((r.lambda_min - 1.0).abs() < 1e-14 && (r.lambda_max - 1.0).abs() < 1e-14);
        let d = BlockWindow::from_fn_symmetric(0, 5, 2, |t, tau| {
            if t == tau {
                DMatrix::identity(2, 2) * 2.0
            } else {
                DMatrix::zeros(2, 2)
            }
        })
        .unwrap();
        let r = sym_eig_range(&d).unwrap();
        assert!((r.lambda_min - 2.0).abs() < 1e-14 && (r.lambda_max - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ar1_section_inside_spectral_band() {
        let w = BlockWindow::toeplitz(0, 49, 1, |r| {
            DMatrix::from_element(1, 1, 0.5f64.powi(r.unsigned_abs() as i32) / 0.75)
        })
        .unwrap();
        let r = sym_eig_range(&w).unwrap();
        assert!(r.lambda_min >= 4.0 / 9.0 - 1e-12);
        assert!(r.lambda_max <= 4.0 + 1e-12);
        // Long sections approach the band edges.
        assert!(r.lambda_max > 3.9);
        assert!(r.lambda_min < 0.46);
    }

    #[test]
    fn eig_range_rejects_asymmetric() {
        let w = BlockWindow::from_flat(0, 1, DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.2, 1.0]))
            .unwrap();
        assert!(sym_eig_range(&w).is_err());
    }

    #[test]
    fn spd_inverse_roundtrip_and_singular() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let inv = spd_inverse(&m).unwrap();
        assert!((&m * &inv - DMatrix::identity(3, 3)).amax() < 1e-14);
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(spd_inverse(&s), Err(Error::Conditioning(_))));
    }
}
