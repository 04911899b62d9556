use nalgebra::DMatrix;

use super::norms::{matrix_eig_range, SPD_THRESHOLD};
use super::window::{is_exactly_symmetric, symmetrize};
use super::BlockWindow;
use crate::error::{Error, Result};

/// `A − B E⁻¹ Bᵀ` for symmetric positive definite `E`.
pub fn schur_complement(a: &DMatrix<f64>, b: &DMatrix<f64>, e: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = a.nrows();
    let m = e.nrows();
    if a.ncols() != k || e.ncols() != m || b.nrows() != k || b.ncols() != m {
        return Err(Error::Input(format!(
            "non-conformable Schur complement: A {}x{}, B {}x{}, E {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            e.nrows(),
            e.ncols()
        )));
    }
    if m == 0 {
        return Ok(a.clone());
    }
    let range = matrix_eig_range(e)?;
    if !(range.lambda_min > SPD_THRESHOLD * range.lambda_max.max(0.0)) || range.lambda_min <= 0.0 {
        return Err(Error::Conditioning(format!(
            "conditioning block has eigenvalue range [{:.3e}, {:.3e}]",
            range.lambda_min, range.lambda_max
        )));
    }
    let chol = e
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Conditioning("conditioning block is not positive definite".into()))?;
    let x = chol.solve(&b.transpose());
    let s = a - b * x;
    Ok(if is_exactly_symmetric(a) { symmetrize(&s) } else { s })
}

/// [`schur_complement`] with the conditioning block given as a window.
pub fn schur_complement_window(a: &DMatrix<f64>, b: &DMatrix<f64>, e: &BlockWindow) -> Result<DMatrix<f64>> {
    if !e.is_symmetric() {
        return Err(Error::Input("conditioning window must be symmetric".into()));
    }
    schur_complement(a, b, e.flat())
}

/// Inverse of `[[A, B], [C, D]]` assembled from its blocks:
/// `Ã = (A − B D⁻¹ C)⁻¹`, off-diagonal blocks `−Ã B D⁻¹` and `−D⁻¹ C Ã`,
/// lower-right `D⁻¹ + D⁻¹ C Ã B D⁻¹`.
pub fn block_inverse_identity(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
    d: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let (k, m) = (a.nrows(), d.nrows());
    if a.ncols() != k || d.ncols() != m || b.shape() != (k, m) || c.shape() != (m, k) {
        return Err(Error::Input("non-conformable block partition".into()));
    }
    let d_inv = d
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Conditioning("lower-right block is singular".into()))?;
    let a_t = (a - b * &d_inv * c)
        .try_inverse()
        .ok_or_else(|| Error::Conditioning("Schur complement is singular".into()))?;
    let upper_right = -(&a_t * b * &d_inv);
    let lower_left = -(&d_inv * c * &a_t);
    let lower_right = &d_inv + &d_inv * c * &a_t * b * &d_inv;
    let mut out = DMatrix::zeros(k + m, k + m);
    out.view_mut((0, 0), (k, k)).copy_from(&a_t);
    out.view_mut((0, k), (k, m)).copy_from(&upper_right);
    out.view_mut((k, 0), (m, k)).copy_from(&lower_left);
    out.view_mut((k, k), (m, m)).copy_from(&lower_right);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(seed: u64, n: usize) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        &g * g.transpose() + DMatrix::identity(n, n) * 0.5
    }

    #[test]
    fn zero_cross_term() {
        let a = random_spd(1, 3);
        let e = random_spd(2, 4);
        let s = schur_complement(&a, &DMatrix::zeros(3, 4), &e).unwrap();
        assert_eq!(s, a);
    }

    #[test]
    fn diagonal_example() {
        let a = DMatrix::identity(2, 2);
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let e = DMatrix::identity(2, 2) * 2.0;
        let s = schur_complement(&a, &b, &e).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 1.0]);
        assert!((s - expect).amax() < 1e-15);
    }

    #[test]
    fn matches_inverse_of_inverse_block() {
        let full = random_spd(9, 6);
        let inv = full.clone().try_inverse().unwrap();
        let top = inv.view((0, 0), (2, 2)).into_owned().try_inverse().unwrap();
        let s = schur_complement(
            &full.view((0, 0), (2, 2)).into_owned(),
            &full.view((0, 2), (2, 4)).into_owned(),
            &full.view((2, 2), (4, 4)).into_owned(),
        )
        .unwrap();
        assert!((s - top).amax() < 1e-9);
    }

    #[test]
    fn singular_conditioning_block() {
        let e = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let r = schur_complement(&DMatrix::identity(1, 1), &DMatrix::zeros(1, 2), &e);
        assert!(matches!(r, Err(Error::Conditioning(_))));
    }

    #[test]
    fn block_identity_matches_dense_inverse() {
        for seed in 0..10 {
            let full = random_spd(100 + seed, 7);
            let k = 3;
            let asm = block_inverse_identity(
                &full.view((0, 0), (k, k)).into_owned(),
                &full.view((0, k), (k, 4)).into_owned(),
                &full.view((k, 0), (4, k)).into_owned(),
                &full.view((k, k), (4, 4)).into_owned(),
            )
            .unwrap();
            let dense = full.try_inverse().unwrap();
            assert!((asm - dense).amax() < 1e-9);
        }
    }
}
