//! Elementary operator inequalities used as numerical checks.

use nalgebra::DMatrix;

use super::decay::gu;
use super::norms::spectral_norm_view;
use super::BlockWindow;

/// `(Σ_ℓ ‖A_ℓ‖₂²)^{1/2}`, an upper bound on the operator norm of the block
/// row `[A_1 A_2 …]`.
pub fn stacked_row_bound(blocks: &[DMatrix<f64>]) -> f64 {
    blocks
        .iter()
        .map(|b| spectral_norm_view(b.as_view()).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `max_t Σ_τ ‖W_{t,τ}‖₂`, which dominates `‖W‖₂` for symmetric `W`.
pub fn row_sum_bound(w: &BlockWindow) -> f64 {
    (w.t_lo()..=w.t_hi())
        .map(|t| {
            (w.t_lo()..=w.t_hi())
                .map(|tau| spectral_norm_view(w.block_view(t, tau)))
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// `(‖cov(Y,X)‖₂², ‖var X‖₂ · ‖var Y‖₂)`; the first never exceeds the second
/// for a jointly positive semidefinite covariance.
pub fn matrix_cauchy_schwarz(
    var_x: &DMatrix<f64>,
    var_y: &DMatrix<f64>,
    cov_yx: &DMatrix<f64>,
) -> (f64, f64) {
    let lhs = spectral_norm_view(cov_yx.as_view()).powi(2);
    let rhs = spectral_norm_view(var_x.as_view()) * spectral_norm_view(var_y.as_view());
    (lhs, rhs)
}

/// Truncated convolution sum with a certified bound on the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvolutionSum {
    pub partial: f64,
    pub tail_bound: f64,
}

impl ConvolutionSum {
    /// Upper bound on the full sum.
    pub fn upper(&self) -> f64 {
        self.partial + self.tail_bound
    }
}

/// `Σ_{|j| ≤ jmax} gu(j)^{−p} gu(j+y)^{−p}` and a bound on `|j| > jmax`.
///
/// Requires `p ≥ 2` and `jmax > 2|y| + 1`.
pub fn convolution_sum(p: u32, y: i64, jmax: i64) -> ConvolutionSum {
    assert!(p >= 2, "exponent must be at least 2");
    assert!(jmax > 2 * y.abs() + 1, "jmax too small for |y|");
    let pf = p as f64;
    let term = |j: i64| (gu(j) * gu(j + y)).powi(-(p as i32));
    // Small terms first.
    let mut s = 0.0;
    for j in (1..=jmax).rev() {
        s += term(j) + term(-j);
    }
    s += term(0);
    let jm = jmax as f64;
    let tail = 2.0 * (jm - y.abs() as f64).powf(-pf) * jm.powf(1.0 - pf) / (pf - 1.0);
    ConvolutionSum {
        partial: s,
        tail_bound: tail,
    }
}

/// `(π² + 3) · gu(y−1)^{−p}`.
pub fn convolution_envelope(p: u32, y: i64) -> f64 {
    (std::f64::consts::PI.powi(2) + 3.0) * gu(y - 1).powf(-(p as f64))
}

/// `(π² + 3) · gu(|y|−1)^{−p}`; the sum is even in `y`, the envelope above is not.
pub fn convolution_envelope_symmetric(p: u32, y: i64) -> f64 {
    convolution_envelope(p, y.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolution_at_zero_shift() {
        // y = 0, p = 2: 1 + 2 ζ_R(4) = 1 + π⁴/45.
        let c = convolution_sum(2, 0, 100_000);
        let exact = 1.0 + std::f64::consts::PI.powi(4) / 45.0;
        assert!(c.partial <= exact && exact <= c.upper());
        assert!(c.upper() - c.partial < 1e-14);
    }

    #[test]
    fn envelope_value() {
        let v = convolution_envelope(2, 3);
        assert!((v - (std::f64::consts::PI.powi(2) + 3.0) / 4.0).abs() < 1e-14);
    }
}
