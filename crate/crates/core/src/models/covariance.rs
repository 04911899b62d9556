//! Closed-form covariance windows `C^{(N)}` and local autocovariances
//! `C_r(u)`.

use nalgebra::{DMatrix, DVector};

use super::spec::{companion_spectral_radius, Family, ModelSpec};
use crate::error::{Error, Result};
use crate::exec;
use crate::operator_core::{spd_inverse, BlockWindow};

const MA_TAIL_TOL: f64 = 1e-10;
const MA_MAX_TERMS: usize = 200_000;

#[inline]
pub fn rescaled(t: i64, n: usize) -> f64 {
    t as f64 / n as f64
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Input("N must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Pad discarded around tv-VAR covariance windows: `max(50, 25·memory)`.
pub fn var_pad(model: &ModelSpec) -> usize {
    50.max(25 * model.effective_memory().max(model.model_order()))
}

/// Covariance section `(C^{(N)}_{t,τ})` over `[lo, hi]`.
///
/// tv-VMA: direct convolution sums. tv-VAR: inversion of the exact banded
/// precision section on a padded window. tv-ARCH: covariance of the squared
/// process `X_t²` by an exact forward moment recursion. SRE: unsupported.
pub fn cov_window(model: &ModelSpec, n: usize, lo: i64, hi: i64) -> Result<BlockWindow> {
    check_n(n)?;
    if hi < lo {
        return Err(Error::Input(format!("empty window [{lo}, {hi}]")));
    }
    match model.family {
        Family::TvVma => vma_window(model, n, lo, hi),
        Family::TvVar => {
            let pad = var_pad(model) as i64;
            let d = var_precision_window(model, n, lo - pad, hi + pad)?;
            let c = spd_inverse(d.flat())?;
            BlockWindow::from_flat_symmetrized(lo - pad, model.p, c)?.sub_window(lo, hi)
        }
        Family::TvArch => arch_window(model, n, lo, hi),
        Family::Sre => Err(Error::Unsupported(
            "SRE covariances are available by Monte Carlo only".into(),
        )),
    }
}

/// Single block `C^{(N)}_{t,τ}`; `cov_block(t,τ) = cov_block(τ,t)ᵀ` exactly.
pub fn cov_block(model: &ModelSpec, n: usize, t: i64, tau: i64) -> Result<DMatrix<f64>> {
    let (lo, hi) = (t.min(tau), t.max(tau));
    match model.family {
        Family::TvVma => {
            check_n(n)?;
            let a_lo = psi_row(model, rescaled(lo, n));
            let a_hi = psi_row(model, rescaled(hi, n));
            let b = vma_block(&a_lo, &a_hi, (hi - lo) as usize, model.p);
            let b = if lo == hi { (&b + b.transpose()) * 0.5 } else { b };
            Ok(if t <= tau { b } else { b.transpose() })
        }
        _ => Ok(cov_window(model, n, lo, hi)?.block(t, tau)),
    }
}

/// `[Ψ_0(u) Ψ_1(u) … Ψ_J(u)]` as one `p × (J+1)p` matrix.
fn psi_row(model: &ModelSpec, u: f64) -> DMatrix<f64> {
    hcat(&model.psis_at(u), model.p)
}

fn hcat(ms: &[DMatrix<f64>], p: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(p, ms.len() * p);
    for (j, m) in ms.iter().enumerate() {
        a.view_mut((0, j * p), (p, p)).copy_from(m);
    }
    a
}

/// `Σ_j Ψ_j(t) Ψ_{j+k}(τ)ᵀ` from the stacked rows at `t` and `τ = t + k`.
fn vma_block(a_t: &DMatrix<f64>, a_tau: &DMatrix<f64>, k: usize, p: usize) -> DMatrix<f64> {
    let terms = a_t.ncols() / p;
    if k >= terms {
        return DMatrix::zeros(p, p);
    }
    let w = (terms - k) * p;
    a_t.columns(0, w) * a_tau.columns(k * p, w).transpose()
}

fn vma_window(model: &ModelSpec, n: usize, lo: i64, hi: i64) -> Result<BlockWindow> {
    let l = (hi - lo + 1) as usize;
    let rows: Vec<DMatrix<f64>> = exec::map_indexed(l, |i| psi_row(model, rescaled(lo + i as i64, n)));
    let p = model.p;
    BlockWindow::from_fn_symmetric(lo, hi, p, |t, tau| {
        vma_block(&rows[(t - lo) as usize], &rows[(tau - lo) as usize], (tau - t) as usize, p)
    })
}

/// Exact section over `[lo, hi]` of the banded tv-VAR precision operator
/// `D_{t,τ} = Σ_s Φ̃_{s−t}(s/N)ᵀ Σ(s/N)⁻¹ Φ̃_{s−τ}(s/N)` with `Φ̃_0 = I`,
/// `Φ̃_j = −Φ_j`.
pub fn var_precision_window(model: &ModelSpec, n: usize, lo: i64, hi: i64) -> Result<BlockWindow> {
    if model.family != Family::TvVar {
        return Err(Error::Unsupported("banded precision form exists for tv-VAR only".into()));
    }
    check_n(n)?;
    let p = model.p;
    let d = model.model_order();
    let l = (hi - lo + 1) as usize;
    let s_count = l + d;
    // Per-s contributions G_s = Φ̃ᵀ Σ⁻¹ Φ̃, (d+1)p square.
    let contribs: Vec<Result<DMatrix<f64>>> = exec::map_indexed(s_count, |i| {
        let s = lo + i as i64;
        let u = rescaled(s, n);
        let sig_inv = spd_inverse(&model.innovation_at(u))?;
        let mut tilde = DMatrix::zeros(p, (d + 1) * p);
        tilde.view_mut((0, 0), (p, p)).copy_from(&DMatrix::identity(p, p));
        for (j, phi) in model.phis_at(u).iter().enumerate() {
            tilde.view_mut((0, (j + 1) * p), (p, p)).copy_from(&(-phi));
        }
        Ok(tilde.transpose() * sig_inv * tilde)
    });
    let mut out = DMatrix::zeros(l * p, l * p);
    for (i, g) in contribs.into_iter().enumerate() {
        let g = g?;
        let s = lo + i as i64;
        for a in 0..=d {
            let ta = s - a as i64;
            if ta < lo || ta > hi {
                continue;
            }
            for b in 0..=d {
                let tb = s - b as i64;
                if tb < lo || tb > hi {
                    continue;
                }
                let (ia, ib) = ((ta - lo) as usize * p, (tb - lo) as usize * p);
                let mut v = out.view_mut((ia, ib), (p, p));
                v += g.view((a * p, b * p), (p, p));
            }
        }
    }
    BlockWindow::from_flat_symmetrized(lo, p, out)
}

/// `C_r(u)` with `C_{−r}(u) = C_r(u)ᵀ`.
pub fn stationary_cov(model: &ModelSpec, u: f64, r: i64) -> Result<DMatrix<f64>> {
    let seq = stationary_cov_seq(model, u, r.unsigned_abs() as usize)?;
    let c = seq[r.unsigned_abs() as usize].clone();
    Ok(if r >= 0 { c } else { c.transpose() })
}

/// `C_0(u), …, C_R(u)`.
pub fn stationary_cov_seq(model: &ModelSpec, u: f64, max_lag: usize) -> Result<Vec<DMatrix<f64>>> {
    let p = model.p;
    match model.family {
        Family::TvVma => {
            let a = psi_row(model, u);
            Ok((0..=max_lag).map(|r| vma_block(&a, &a, r, p).transpose()).collect())
        }
        Family::TvVar => {
            let phis = model.phis_at(u);
            let sigma = model.innovation_at(u);
            let psis = ma_expansion(&phis, p, &sigma)?;
            let a = hcat(&psis, p);
            let b = hcat(&psis.iter().map(|m| m * &sigma).collect::<Vec<_>>(), p);
            // C_r = Σ_k Ψ_{k+r} Σ Ψ_kᵀ.
            Ok((0..=max_lag).map(|r| vma_block(&b, &a, r, p).transpose()).collect())
        }
        Family::TvArch => {
            let (_, s) = arch_stationary_moments(model, u)?;
            let f = arch_companion(model, u);
            let mut v = s.column(0).into_owned();
            let mut out = Vec::with_capacity(max_lag + 1);
            for _ in 0..=max_lag {
                out.push(DMatrix::from_element(1, 1, v[0]));
                v = &f * v;
            }
            Ok(out)
        }
        Family::Sre => Err(Error::Unsupported("SRE has no closed-form covariance".into())),
    }
}

/// `∂C_r(u)/∂u` for `r = 0..=R` from analytic coefficient derivatives.
pub fn stationary_cov_derivative_seq(model: &ModelSpec, u: f64, max_lag: usize) -> Result<Vec<DMatrix<f64>>> {
    let p = model.p;
    match model.family {
        Family::TvVma => {
            let a = psi_row(model, u);
            let da = hcat(&model.psi_derivatives_at(u), p);
            Ok((0..=max_lag)
                .map(|r| (vma_block(&a, &da, r, p) + vma_block(&da, &a, r, p)).transpose())
                .collect())
        }
        Family::TvVar => {
            let phis = model.phis_at(u);
            let dphis = model.phi_derivatives_at(u);
            let sigma = model.innovation_at(u);
            let dsigma = model.innovation_derivative_at(u);
            let psis = ma_expansion(&phis, p, &sigma)?;
            let mut dpsis: Vec<DMatrix<f64>> = vec![DMatrix::zeros(p, p)];
            for k in 1..psis.len() {
                let mut m = DMatrix::zeros(p, p);
                for j in 1..=phis.len().min(k) {
                    m += &dphis[j - 1] * &psis[k - j] + &phis[j - 1] * &dpsis[k - j];
                }
                dpsis.push(m);
            }
            let a = hcat(&psis, p);
            let da = hcat(&dpsis, p);
            let a_s = hcat(&psis.iter().map(|m| m * &sigma).collect::<Vec<_>>(), p);
            let da_s = hcat(&dpsis.iter().map(|m| m * &sigma).collect::<Vec<_>>(), p);
            let a_ds = hcat(&psis.iter().map(|m| m * &dsigma).collect::<Vec<_>>(), p);
            Ok((0..=max_lag)
                .map(|r| {
                    (vma_block(&a, &da_s, r, p) + vma_block(&a, &a_ds, r, p) + vma_block(&da, &a_s, r, p))
                        .transpose()
                })
                .collect())
        }
        _ => Err(Error::Unsupported(
            "analytic covariance derivatives exist for tv-VMA and tv-VAR".into(),
        )),
    }
}

/// Toeplitz section `(C_{t−τ}(u))_{t,τ ∈ [lo, hi]}` of the frozen operator.
pub fn stationary_window(model: &ModelSpec, u: f64, lo: i64, hi: i64) -> Result<BlockWindow> {
    let seq = stationary_cov_seq(model, u, (hi - lo) as usize)?;
    BlockWindow::toeplitz(lo, hi, model.p, |r| seq[r.unsigned_abs() as usize].transpose())
}

/// Toeplitz section of `∂C_{t−τ}(u)/∂u`.
pub fn stationary_window_derivative(model: &ModelSpec, u: f64, lo: i64, hi: i64) -> Result<BlockWindow> {
    let seq = stationary_cov_derivative_seq(model, u, (hi - lo) as usize)?;
    BlockWindow::toeplitz(lo, hi, model.p, |r| seq[r.unsigned_abs() as usize].transpose())
}

/// MA coefficients of `(I − Σ Φ_j z^j)⁻¹`, truncated once the certified
/// geometric tail `ρ_*^J ‖Σ‖/(1−ρ_*)` drops below `1e-10` and the last
/// coefficient is negligible. `ρ_*` is the square root of the companion
/// spectral radius, leaving room for transient growth.
pub(crate) fn ma_expansion(phis: &[DMatrix<f64>], p: usize, sigma: &DMatrix<f64>) -> Result<Vec<DMatrix<f64>>> {
    let radius = companion_spectral_radius(phis, p);
    if !(radius < 1.0) {
        return Err(Error::Model(format!("unstable autoregression (spectral radius {radius:.4})")));
    }
    let rho = radius.sqrt();
    let snorm = sigma.amax().max(1e-300) * p as f64;
    let j_cert = if rho == 0.0 {
        phis.len() + 1
    } else {
        let target = MA_TAIL_TOL * (1.0 - rho) / snorm;
        (target.ln() / rho.ln()).ceil().max(1.0) as usize
    };
    let mut psis = vec![DMatrix::identity(p, p)];
    let mut k = 1;
    loop {
        let mut m = DMatrix::zeros(p, p);
        for j in 1..=phis.len().min(k) {
            m += &phis[j - 1] * &psis[k - j];
        }
        let small = m.amax() * snorm.sqrt() < 1e-14;
        psis.push(m);
        if (k >= j_cert && small) || k >= MA_MAX_TERMS {
            break;
        }
        k += 1;
    }
    if k >= MA_MAX_TERMS {
        return Err(Error::Model("MA expansion did not converge".into()));
    }
    Ok(psis)
}

/// Companion matrix of the squared-process autoregression.
fn arch_companion(model: &ModelSpec, u: f64) -> DMatrix<f64> {
    let a: Vec<f64> = model.phis_at(u).iter().map(|m| m[(0, 0)]).collect();
    let q = a.len();
    let mut f = DMatrix::zeros(q, q);
    for (j, &x) in a.iter().enumerate() {
        f[(0, j)] = x;
    }
    for k in 0..q - 1 {
        f[(k + 1, k)] = 1.0;
    }
    f
}

/// One step of the exact first/second moment recursion of the state
/// `(Y_t, …, Y_{t−q+1})`, `Y = X²`:
/// `μ_t = F μ + e₁ a₀`, `S_t = F S Fᵀ + e₁e₁ᵀ · 2E[σ_t⁴]`.
fn arch_step(model: &ModelSpec, u: f64, mu: &DVector<f64>, s: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let f = arch_companion(model, u);
    let a0 = model.innovation_at(u)[(0, 0)];
    let row = f.row(0).transpose();
    let mean_sig2 = a0 + row.dot(mu);
    let e_sig4 = mean_sig2 * mean_sig2 + (row.transpose() * s * &row)[(0, 0)];
    let mut mu_n = &f * mu;
    mu_n[0] += a0;
    let mut s_n = &f * s * f.transpose();
    s_n[(0, 0)] += 2.0 * e_sig4;
    (mu_n, s_n)
}

fn arch_stationary_moments(model: &ModelSpec, u: f64) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let q = model.model_order();
    let mut mu = DVector::zeros(q);
    let mut s = DMatrix::zeros(q, q);
    for _ in 0..1_000_000 {
        let (m2, s2) = arch_step(model, u, &mu, &s);
        let change = (&s2 - &s).amax() + (&m2 - &mu).amax();
        let scale = s2.amax().max(1.0);
        mu = m2;
        s = s2;
        if change <= 1e-15 * scale {
            return Ok((mu, s));
        }
        if !s.amax().is_finite() {
            break;
        }
    }
    Err(Error::Model(format!("tv-ARCH fourth moments do not settle at u={u}")))
}

/// Innovation variance `2E[σ⁴]` of the frozen squared tv-ARCH process.
pub(crate) fn arch_innovation_variance(model: &ModelSpec, u: f64) -> Result<f64> {
    let (mu, s) = arch_stationary_moments(model, u)?;
    let f = arch_companion(model, u);
    let row = f.row(0).transpose();
    let m = model.innovation_at(u)[(0, 0)] + row.dot(&mu);
    Ok(2.0 * (m * m + (row.transpose() * &s * &row)[(0, 0)]))
}

fn arch_window(model: &ModelSpec, n: usize, lo: i64, hi: i64) -> Result<BlockWindow> {
    let burn = (50 * model.effective_memory()).max(400) as i64;
    let start = lo - burn;
    let (mut mu, mut s) = arch_stationary_moments(model, rescaled(start, n))?;
    let l = (hi - lo + 1) as usize;
    let mut states = Vec::with_capacity(l);
    for t in (start + 1)..=hi {
        let (m2, s2) = arch_step(model, rescaled(t, n), &mu, &s);
        mu = m2;
        s = s2;
        if t >= lo {
            states.push(s.clone());
        }
    }
    let comps: Vec<DMatrix<f64>> = (lo..=hi).map(|t| arch_companion(model, rescaled(t, n))).collect();
    // Row τ: cov(Y_t, Y_τ) for t ≥ τ by pushing S_τ e₁ forward.
    let rows: Vec<Vec<f64>> = exec::map_indexed(l, |i| {
        let mut v = states[i].column(0).into_owned();
        let mut out = Vec::with_capacity(l - i);
        out.push(v[0]);
        for f in comps.iter().skip(i + 1) {
            v = f * v;
            out.push(v[0]);
        }
        out
    });
    BlockWindow::from_fn_symmetric(lo, hi, 1, |t, tau| {
        DMatrix::from_element(1, 1, rows[(t - lo) as usize][(tau - t) as usize])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::CoefficientFn;

    fn ar1(phi: f64) -> ModelSpec {
        ModelSpec::tv_var(1, vec![CoefficientFn::scalar(phi)], CoefficientFn::scalar(1.0))
    }

    #[test]
    fn white_noise_vma() {
        let m = ModelSpec::tv_vma(2, vec![CoefficientFn::constant(DMatrix::identity(2, 2))]);
        let w = cov_window(&m, 100, 0, 9).unwrap();
        assert_eq!(w.flat(), &DMatrix::identity(20, 20));
        assert_eq!(cov_block(&m, 100, 3, 4).unwrap(), DMatrix::zeros(2, 2));
    }

    #[test]
    fn ar1_interior_matches_analytic() {
        let w = cov_window(&ar1(0.5), 200, 0, 40).unwrap();
        for t in 0..=40i64 {
            for r in 0..=(40 - t) {
                let expect = 0.5f64.powi(r as i32) / 0.75;
                assert!((w.block(t, t + r)[(0, 0)] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ar1_stationary() {
        for r in -5i64..=5 {
            let c = stationary_cov(&ar1(0.5), 0.3, r).unwrap()[(0, 0)];
            assert!((c - 0.5f64.powi(r.unsigned_abs() as i32) * 4.0 / 3.0).abs() < 1e-12);
        }
        assert!(stationary_cov(&ar1(0.5), 0.3, 60).unwrap()[(0, 0)].abs() < 1e-10);
    }

    #[test]
    fn block_symmetry_is_exact() {
        let m = ModelSpec::tv_vma(2, vec![
            CoefficientFn::constant(DMatrix::identity(2, 2)),
            CoefficientFn::sinusoidal(
                DMatrix::from_row_slice(2, 2, &[0.4, 0.1, -0.2, 0.3]),
                DMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.05, 0.1]),
            ),
        ]);
        for (t, tau) in [(3, 5), (10, 10), (7, 2)] {
            assert_eq!(cov_block(&m, 50, t, tau).unwrap(), cov_block(&m, 50, tau, t).unwrap().transpose());
        }
        let w = cov_window(&m, 50, 0, 10).unwrap();
        assert_eq!(w.block(3, 4), cov_block(&m, 50, 3, 4).unwrap());
    }

    #[test]
    fn arch_squared_process_stationary_ar1() {
        // a0 = 1, a1 = 0.3: E Y = 1/(1−0.3); Y is AR(1) with coefficient 0.3.
        let m = ModelSpec::tv_arch(CoefficientFn::scalar(1.0), vec![CoefficientFn::scalar(0.3)]);
        let c = stationary_cov_seq(&m, 0.0, 3).unwrap();
        // var Y = 2E σ⁴ / (1 − a1²) and E σ⁴ = Eσ²² + a1² var Y.
        let ey = 1.0 / 0.7;
        let var_y = 2.0 * ey * ey / (1.0 - 0.09 - 2.0 * 0.09);
        assert!((c[0][(0, 0)] - var_y).abs() < 1e-9 * var_y);
        assert!((c[2][(0, 0)] - var_y * 0.09).abs() < 1e-9 * var_y);
        let w = cov_window(&m, 100, 0, 5).unwrap();
        assert!((w.block(2, 4)[(0, 0)] - var_y * 0.09).abs() < 1e-9 * var_y);
    }

    #[test]
    fn sre_is_monte_carlo_only() {
        let m = ModelSpec::sre(
            CoefficientFn::constant(DMatrix::identity(1, 1) * 0.3),
            vec![],
            CoefficientFn::scalar(1.0),
        );
        assert!(matches!(cov_block(&m, 10, 0, 1), Err(Error::Unsupported(_))));
    }
}
