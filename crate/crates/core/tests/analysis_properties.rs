use nalgebra::DMatrix;
use nonstatcov::inverse_analysis::{model_inverse_window, neumann_inverse, window_distance};
use nonstatcov::models::{cov_window, omega_grid, simulate_path, CoefficientFn, ModelSpec, PowerTail};
use nonstatcov::operator_core::{matrix_eig_range, spd_inverse};
use nonstatcov::partial_cov::{partial_cov_pair, partial_spectral_coherence, regroup_by_component, ungroup};
use nonstatcov::var_extraction::var_coeffs_finite;
use nonstatcov::BlockWindow;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn normal(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn scaled_to(m: DMatrix<f64>, norm: f64) -> DMatrix<f64> {
    let s = m.singular_values().max();
    if s == 0.0 {
        m
    } else {
        m * (norm / s)
    }
}

fn random_var(seed: u64, p: usize, d: usize) -> ModelSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = 0.85 / d as f64;
    let phis = (0..d)
        .map(|_| {
            let a0 = scaled_to(normal(&mut rng, p, p), rng.random_range(0.0..0.7) * budget);
            let a1 = scaled_to(normal(&mut rng, p, p), 0.3 * budget);
            CoefficientFn::sinusoidal(a0, a1)
        })
        .collect();
    let l = normal(&mut rng, p, p) * 0.3 + DMatrix::identity(p, p);
    ModelSpec::tv_var(p, phis, CoefficientFn::constant(&l * l.transpose()))
}

/// tv-VMA with a `k^{-4}` power tail, so covariances decay like `gu^{-4}`.
fn random_kappa4(seed: u64, p: usize) -> ModelSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = normal(&mut rng, p, p) * 0.4;
    let tail = PowerTail {
        from: 1,
        to: 60,
        kappa: 4.0,
        shape: CoefficientFn::sinusoidal(b.clone(), b * 0.3),
    };
    ModelSpec::tv_vma(p, vec![CoefficientFn::constant(DMatrix::identity(p, p))])
        .with_tail(tail)
        .with_kappa(4.0)
}

/// `Var(X_S − proj(X_S | X_R))` by least squares on the Cholesky rows.
fn regression_residual(c: &DMatrix<f64>, s: &[usize], r: &[usize]) -> DMatrix<f64> {
    let l = c.clone().cholesky().unwrap().l();
    let rows = |idx: &[usize]| DMatrix::from_fn(idx.len(), l.ncols(), |i, j| l[(idx[i], j)]);
    let ls = rows(s);
    if r.is_empty() {
        return &ls * ls.transpose();
    }
    let lr = rows(r);
    let qr = lr.transpose().qr();
    let q = qr.q();
    let resid = &ls - (&ls * &q) * q.transpose();
    &resid * resid.transpose()
}

fn random_spd_window(seed: u64, len: usize, p: usize) -> BlockWindow {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = len * p;
    let z = normal(&mut rng, n, n + 3);
    BlockWindow::from_flat_symmetrized(0, p, &z * z.transpose() / n as f64 + DMatrix::identity(n, n) * 0.05).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn inverse_residual_is_small(seed in any::<u64>(), p in 1usize..4, d in 1usize..3) {
        let m = random_var(seed, p, d);
        let w = model_inverse_window(&m, 200, 0, 59, 60).unwrap();
        prop_assert!(w.residual <= 1e-8);
    }

    #[test]
    fn var_precision_is_banded(seed in any::<u64>(), p in 1usize..4, d in 1usize..3) {
        let m = random_var(seed, p, d);
        let c = cov_window(&m, 200, 0, 39).unwrap();
        let inv = spd_inverse(c.flat()).unwrap();
        for t in 0..40usize {
            for tau in 0..40usize {
                if t.abs_diff(tau) > d {
                    let blk = inv.view((t * p, tau * p), (p, p));
                    prop_assert!(blk.amax() <= 1e-9, "lag {}: {}", t.abs_diff(tau), blk.amax());
                }
            }
        }
    }

    #[test]
    fn neumann_error_within_certificate(seed in any::<u64>(), p in 1usize..3, terms in 0usize..6) {
        let m = random_kappa4(seed, p);
        let c = cov_window(&m, 200, 0, 49).unwrap();
        let exact = BlockWindow::from_flat_symmetrized(0, p, spd_inverse(c.flat()).unwrap()).unwrap();
        let mut bw = 4;
        let a = loop {
            match neumann_inverse(&c, bw, terms) {
                Ok(a) => break a,
                Err(nonstatcov::Error::Divergence { .. }) if bw < 49 => bw *= 2,
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        };
        let err = window_distance(&a.approx, &exact).unwrap();
        prop_assert!(nonstatcov::cli_harness::checks::within_certificate(err, a.certificate), "{} > {}", err, a.certificate);
    }

    #[test]
    fn finite_order_innovation_variance_nested(seed in any::<u64>(), p in 1usize..4) {
        let m = random_kappa4(seed, p);
        let mut prev: Option<DMatrix<f64>> = None;
        for d in 0..8 {
            let v = var_coeffs_finite(&m, 200, 100, d).unwrap();
            prop_assert!(v.path_agreement.unwrap_or(0.0) <= 1e-8);
            if let Some(s) = &prev {
                let diff = s - &v.sigma;
                let lo = matrix_eig_range(&((&diff + diff.transpose()) * 0.5)).unwrap().lambda_min;
                prop_assert!(lo >= -1e-9, "d={}: {}", d, lo);
            }
            prev = Some(v.sigma);
        }
    }

    #[test]
    fn grouping_round_trip_is_bitwise(seed in any::<u64>(), len in 1usize..10, p in 1usize..5) {
        let w = random_spd_window(seed, len, p);
        let g = regroup_by_component(&w);
        let back = ungroup(&g).unwrap();
        prop_assert_eq!(&back, &w);
        prop_assert_eq!(regroup_by_component(&back), g);
    }

    #[test]
    fn partial_covariance_matches_regression_and_is_dominated(seed in any::<u64>(), len in 3usize..12, pad in 0usize..3) {
        prop_assume!(len > 2 * pad);
        let p = 3;
        let w = random_spd_window(seed, len, p);
        let pp = partial_cov_pair(&w, 0, 2, pad).unwrap();
        // Conditioning set: component 1 at every time in the window.
        let rest: Vec<usize> = (0..len).map(|t| t * p + 1).collect();
        for t in pp.t_lo..=pp.t_hi {
            for tau in pp.t_lo..=pp.t_hi {
                let s: Vec<usize> = [(t, 0), (t, 2), (tau, 0), (tau, 2)]
                    .iter()
                    .map(|&(s, c)| s as usize * p + c)
                    .collect();
                let oracle = regression_residual(w.flat(), &s, &rest);
                let cross = oracle.view((0, 2), (2, 2));
                prop_assert!((pp.delta(t, tau) - cross).amax() <= 1e-8);
            }
            let raw = DMatrix::from_fn(2, 2, |i, j| w.block(t, t)[([0, 2][i], [0, 2][j])]);
            let diff = raw - pp.delta(t, t);
            let lo = matrix_eig_range(&((&diff + diff.transpose()) * 0.5)).unwrap().lambda_min;
            prop_assert!(lo >= -1e-10);
        }
    }

    #[test]
    fn partial_coherence_bounded(seed in any::<u64>(), u in 0.0f64..1.0) {
        let m = random_var(seed, 3, 1);
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            for g in partial_spectral_coherence(&m, u, a, b, &omega_grid(65)).unwrap() {
                prop_assert!(g.norm() <= 1.0 + 1e-8);
            }
        }
    }
}

/// Residual of the finite-order projection is uncorrelated with every
/// regressor, up to Monte Carlo error.
#[test]
fn projection_residual_orthogonal_to_regressors() {
    let m = random_var(3, 2, 2);
    let (n, t, d) = (100usize, 50i64, 3usize);
    let v = var_coeffs_finite(&m, n, t, d).unwrap();
    let reps = 20_000;
    let paths: Vec<_> = (0..reps)
        .map(|r| simulate_path(&m, n, t - d as i64, t, 900 + r as u64).unwrap())
        .collect();
    for j in 1..=d {
        for a in 0..2 {
            for b in 0..2 {
                let prods: Vec<f64> = paths
                    .iter()
                    .map(|x| {
                        let mut e = x.at(t).into_owned();
                        for (k, phi) in v.phis.iter().enumerate() {
                            e -= phi * x.at(t - k as i64 - 1);
                        }
                        e[a] * x.at(t - j as i64)[b]
                    })
                    .collect();
                let mean = prods.iter().sum::<f64>() / reps as f64;
                let sd = (prods.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
                let se = sd / (reps as f64).sqrt();
                assert!(mean.abs() <= 3.0 * se, "lag {j} [{a},{b}]: {mean} vs se {se}");
            }
        }
    }
}
