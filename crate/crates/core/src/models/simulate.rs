//! Seeded simulation and the coupled-process physical dependence estimator.

use nalgebra::{DMatrix, DVector, DVectorView};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::covariance::rescaled;
use super::spec::{Family, ModelSpec};
use crate::error::{Error, Result};
use crate::exec;

/// Realization `X_{t,N}` for `t_lo ≤ t ≤ t_hi`, stored as a `p × L` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplePath {
    pub t_lo: i64,
    pub t_hi: i64,
    pub n: usize,
    pub seed: u64,
    pub data: DMatrix<f64>,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.data.ncols()
    }
    pub fn is_empty(&self) -> bool {
        self.data.ncols() == 0
    }
    pub fn at(&self, t: i64) -> DVectorView<'_, f64> {
        self.data.column((t - self.t_lo) as usize)
    }
}

/// Burn-in length: `max(100, 10 · effective memory)`.
pub fn burn_in(model: &ModelSpec) -> usize {
    100.max(10 * model.effective_memory())
}

fn draw(rng: &mut ChaCha8Rng, p: usize) -> DVector<f64> {
    DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Symmetric square root of a positive semidefinite matrix; negative
/// eigenvalues from rounding are clamped to zero.
fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.nrows() == 1 {
        return DMatrix::from_element(1, 1, m[(0, 0)].max(0.0).sqrt());
    }
    let e = m.clone().symmetric_eigen();
    let d = e.eigenvalues.map(|x| x.max(0.0).sqrt());
    &e.eigenvectors * DMatrix::from_diagonal(&d) * e.eigenvectors.transpose()
}

fn check_simulable(model: &ModelSpec) -> Result<()> {
    model.check_structure("")?;
    match model.family {
        Family::TvVar | Family::TvArch => {
            let r = super::spec::check_grid()
                .iter()
                .map(|&u| model.companion_radius(u))
                .fold(0.0, f64::max);
            if !(r < 1.0) {
                return Err(Error::Model(format!("unstable recursion (spectral radius {r:.4})")));
            }
        }
        Family::Sre => {
            if !(model.sre_contraction() < 1.0) {
                return Err(Error::Model("SRE is not mean-square contracting".into()));
            }
        }
        Family::TvVma => {}
    }
    Ok(())
}

/// One recursion step at time `s` given past states (most recent last).
fn step(model: &ModelSpec, n: usize, s: i64, past: &[DVector<f64>], eps: &DVector<f64>) -> DVector<f64> {
    let u = rescaled(s, n);
    match model.family {
        Family::TvVar => {
            let mut x = psd_sqrt(&model.innovation_at(u)) * eps;
            for (j, phi) in model.phis_at(u).iter().enumerate() {
                if let Some(prev) = past.len().checked_sub(j + 1).map(|i| &past[i]) {
                    x += phi * prev;
                }
            }
            x
        }
        Family::TvArch => {
            let mut s2 = model.innovation_at(u)[(0, 0)];
            for (j, a) in model.phis_at(u).iter().enumerate() {
                if let Some(prev) = past.len().checked_sub(j + 1).map(|i| &past[i]) {
                    s2 += a[(0, 0)] * prev[0] * prev[0];
                }
            }
            DVector::from_element(1, s2.max(0.0).sqrt() * eps[0])
        }
        Family::Sre => {
            let mut a = model.coefficients[0].eval(u);
            for (k, l) in model.loadings.iter().enumerate() {
                a += l.eval(u) * eps[k];
            }
            let mut x = model.innovation_at(u) * eps;
            if let Some(prev) = past.last() {
                x += a * prev;
            }
            x
        }
        Family::TvVma => unreachable!("tv-VMA is a convolution, not a recursion"),
    }
}

/// Runs the recursion from zero initial state over `eps` (one innovation
/// per time, starting at `s0`) and returns the final state.
fn run_to_end(model: &ModelSpec, n: usize, s0: i64, eps: &[DVector<f64>]) -> DVector<f64> {
    let keep = model.model_order().max(1);
    let mut past: Vec<DVector<f64>> = Vec::with_capacity(keep + 1);
    let mut last = DVector::zeros(model.p);
    for (i, e) in eps.iter().enumerate() {
        last = step(model, n, s0 + i as i64, &past, e);
        past.push(last.clone());
        if past.len() > keep {
            past.remove(0);
        }
    }
    last
}

/// Simulates `X_{t,N}` on `[t_lo, t_hi]` with standard Gaussian innovations
/// drawn from a ChaCha stream seeded by `seed`, in time order.
pub fn simulate_path(model: &ModelSpec, n: usize, t_lo: i64, t_hi: i64, seed: u64) -> Result<SamplePath> {
    if t_hi < t_lo || n == 0 {
        return Err(Error::Input("simulate_path needs t_lo ≤ t_hi and N ≥ 1".into()));
    }
    check_simulable(model)?;
    let p = model.p;
    let l = (t_hi - t_lo + 1) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = DMatrix::zeros(p, l);
    match model.family {
        Family::TvVma => {
            let jmax = model.model_order();
            let eps: Vec<DVector<f64>> = (0..l + jmax).map(|_| draw(&mut rng, p)).collect();
            for i in 0..l {
                let psis = model.psis_at(rescaled(t_lo + i as i64, n));
                let mut x = DVector::zeros(p);
                for (k, psi) in psis.iter().enumerate() {
                    x += psi * &eps[i + jmax - k];
                }
                data.set_column(i, &x);
            }
        }
        _ => {
            let b = burn_in(model) as i64;
            let keep = model.model_order().max(1);
            let mut past: Vec<DVector<f64>> = Vec::with_capacity(keep + 1);
            for s in (t_lo - b)..=t_hi {
                let e = draw(&mut rng, p);
                let x = step(model, n, s, &past, &e);
                if s >= t_lo {
                    data.set_column((s - t_lo) as usize, &x);
                }
                past.push(x);
                if past.len() > keep {
                    past.remove(0);
                }
            }
        }
    }
    Ok(SamplePath {
        t_lo,
        t_hi,
        n,
        seed,
        data,
    })
}

/// Monte Carlo estimate of `‖var(X_{t,N} − X_{t,N|{t−j}})‖₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhysicalDependence {
    pub j: usize,
    pub estimate: f64,
    /// Standard error of the quadratic form along the leading eigenvector.
    pub std_error: f64,
    pub reps: usize,
}

/// Coupled simulation: each replication draws the innovations up to `t`
/// from its own stream, then reruns with `ε_{t−j}` replaced by an
/// independent copy.
pub fn physical_dep_estimate(
    model: &ModelSpec,
    n: usize,
    t: i64,
    j: usize,
    reps: usize,
    seed: u64,
) -> Result<PhysicalDependence> {
    if reps < 100 {
        return Err(Error::Input(format!("reps must be at least 100, got {reps}")));
    }
    if n == 0 {
        return Err(Error::Input("N must be at least 1".into()));
    }
    check_simulable(model)?;
    let p = model.p;
    let diffs: Vec<DVector<f64>> = exec::map_indexed(reps, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64 + 1);
        match model.family {
            Family::TvVma => {
                let jmax = model.model_order();
                let eps: Vec<DVector<f64>> = (0..=jmax).map(|_| draw(&mut rng, p)).collect();
                let alt = draw(&mut rng, p);
                if j > jmax {
                    return DVector::zeros(p);
                }
                // eps[k] is ε_{t−k}.
                let psi = &model.psis_at(rescaled(t, n))[j];
                psi * (&eps[j] - alt)
            }
            _ => {
                let span = j + burn_in(model);
                let s0 = t - span as i64;
                let mut eps: Vec<DVector<f64>> = (0..=span).map(|_| draw(&mut rng, p)).collect();
                let alt = draw(&mut rng, p);
                let x = run_to_end(model, n, s0, &eps);
                eps[span - j] = alt;
                let y = run_to_end(model, n, s0, &eps);
                x - y
            }
        }
    });
    let mut v = DMatrix::zeros(p, p);
    for d in &diffs {
        v += d * d.transpose();
    }
    v /= reps as f64;
    let (estimate, lead) = if p == 1 {
        (v[(0, 0)], DVector::from_element(1, 1.0))
    } else {
        let e = v.clone().symmetric_eigen();
        let i = e.eigenvalues.imax();
        (e.eigenvalues[i].max(0.0), e.eigenvectors.column(i).into_owned())
    };
    let q: Vec<f64> = diffs.iter().map(|d| lead.dot(d).powi(2)).collect();
    let mean = q.iter().sum::<f64>() / reps as f64;
    let var = q.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    Ok(PhysicalDependence {
        j,
        estimate,
        std_error: (var / reps as f64).sqrt(),
        reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::CoefficientFn;

    fn ar1(phi: f64, s2: f64) -> ModelSpec {
        ModelSpec::tv_var(1, vec![CoefficientFn::scalar(phi)], CoefficientFn::scalar(s2))
    }

    #[test]
    fn zero_model_gives_zero_path() {
        let m = ar1(0.0, 0.0);
        let path = simulate_path(&m, 100, 0, 50, 3).unwrap();
        assert!(path.data.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn same_seed_same_path() {
        let m = ar1(0.5, 1.0);
        let a = simulate_path(&m, 100, -5, 40, 11).unwrap();
        let b = simulate_path(&m, 100, -5, 40, 11).unwrap();
        assert_eq!(a, b);
        let c = simulate_path(&m, 100, -5, 40, 12).unwrap();
        assert_ne!(a.data, c.data);
    }

    #[test]
    fn white_noise_difference_variance() {
        let m = ModelSpec::tv_vma(2, vec![CoefficientFn::constant(DMatrix::identity(2, 2) * 1.5f64.sqrt())]);
        let e = physical_dep_estimate(&m, 100, 10, 0, 4000, 5).unwrap();
        assert!((e.estimate - 3.0).abs() < 4.0 * e.std_error + 0.1, "{e:?}");
    }

    #[test]
    fn beyond_ma_memory_is_zero() {
        let m = ModelSpec::tv_vma(1, vec![CoefficientFn::scalar(1.0), CoefficientFn::scalar(0.5)]);
        let e = physical_dep_estimate(&m, 100, 10, 3, 200, 5).unwrap();
        assert!(e.estimate <= 3.0 * e.std_error);
        assert_eq!(e.estimate, 0.0);
    }

    #[test]
    fn ar1_coupling_is_exact_geometric() {
        // X_t − X'_t = φ^j (ε − ε'), variance 2 φ^{2j}.
        let m = ar1(0.5, 1.0);
        let e = physical_dep_estimate(&m, 100, 0, 3, 4000, 9).unwrap();
        let expect = 2.0 * 0.5f64.powi(6);
        assert!((e.estimate - expect).abs() < 4.0 * e.std_error, "{e:?}");
    }
}
