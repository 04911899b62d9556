use nalgebra::DMatrix;
use nonstatcov::models::{
    check_grid, cov_block, cov_window, omega_grid, simulate_path, spectral_eig_range, stationary_window,
    CoefficientFn, ModelSpec,
};
use nonstatcov::operator_core::sym_eig_range;
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

/// tv-VAR(1) with `‖A0‖ + ‖A1‖ ≤ 0.85`, so every frozen model is stable.
fn random_var1(seed: u64, p: usize) -> ModelSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a0 = scaled_to(normal(&mut rng, p, p), rng.random_range(0.0..0.6));
    let a1 = scaled_to(normal(&mut rng, p, p), rng.random_range(0.0..0.25));
    let l = normal(&mut rng, p, p) * 0.3 + DMatrix::identity(p, p);
    ModelSpec::tv_var(p, vec![CoefficientFn::sinusoidal(a0, a1)], CoefficientFn::constant(&l * l.transpose()))
}

fn random_vma(seed: u64, p: usize, q: usize) -> ModelSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let psis = (0..=q)
        .map(|j| {
            let base = if j == 0 {
                DMatrix::identity(p, p) + normal(&mut rng, p, p) * 0.2
            } else {
                normal(&mut rng, p, p) * (0.5 / (j * j) as f64)
            };
            let amp = normal(&mut rng, p, p) * 0.1;
            CoefficientFn::sinusoidal(base, amp)
        })
        .collect();
    ModelSpec::tv_vma(p, psis)
}

fn random_model(seed: u64, p: usize, var: bool) -> ModelSpec {
    if var {
        random_var1(seed, p)
    } else {
        random_vma(seed, p, 3)
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn cov_block_transpose_symmetry(seed in any::<u64>(), p in 1usize..4, var in any::<bool>(), t in -20i64..60, tau in -20i64..60) {
        let m = random_model(seed, p, var);
        let a = cov_block(&m, 50, t, tau).unwrap();
        let b = cov_block(&m, 50, tau, t).unwrap();
        prop_assert_eq!(a, b.transpose());
    }

    #[test]
    fn covariance_windows_are_positive_definite(seed in any::<u64>(), p in 1usize..4, var in any::<bool>(), len in 20usize..120) {
        let m = random_model(seed, p, var);
        let c = cov_window(&m, 200, 0, len as i64 - 1).unwrap();
        prop_assert!(sym_eig_range(&c).unwrap().lambda_min > 0.0);
    }

    #[test]
    fn toeplitz_sections_within_spectral_band(seed in any::<u64>(), p in 1usize..4, var in any::<bool>(), u in 0.0f64..1.0) {
        let m = random_model(seed, p, var);
        let band = spectral_eig_range(&m, &[u], &omega_grid(1025)).unwrap();
        let sec = sym_eig_range(&stationary_window(&m, u, 0, 199).unwrap()).unwrap();
        prop_assert!(sec.lambda_min >= band.lambda_min - 0.05, "{:?} vs {:?}", sec, band);
        prop_assert!(sec.lambda_max <= band.lambda_max + 0.05, "{:?} vs {:?}", sec, band);
    }

    #[test]
    fn nonstationary_sections_bounded_below(seed in any::<u64>(), p in 1usize..4, var in any::<bool>()) {
        let m = random_model(seed, p, var);
        let band = spectral_eig_range(&m, &check_grid(), &omega_grid(257)).unwrap();
        prop_assert!(band.lambda_min > 0.0);
        let sec = sym_eig_range(&cov_window(&m, 200, 0, 199).unwrap()).unwrap();
        prop_assert!(sec.lambda_min >= band.lambda_min - 0.1, "{:?} vs {:?}", sec, band);
    }
}

/// Sample `E[X_t X_τᵀ]` over independent paths against `cov_block`, entry by
/// entry, with the standard error of each product mean.
fn monte_carlo_agrees(m: &ModelSpec, n: usize, lo: i64, hi: i64, reps: usize, seed: u64) {
    let p = m.p;
    let paths: Vec<_> = (0..reps)
        .map(|r| simulate_path(m, n, lo, hi, seed.wrapping_mul(1_000_003).wrapping_add(r as u64)).unwrap())
        .collect();
    let mut worst = 0.0f64;
    for t in lo..=hi {
        for tau in (t - 5).max(lo)..=t {
            let exact = cov_block(m, n, t, tau).unwrap();
            for i in 0..p {
                for j in 0..p {
                    let prods: Vec<f64> = paths.iter().map(|x| x.at(t)[i] * x.at(tau)[j]).collect();
                    let mean = prods.iter().sum::<f64>() / reps as f64;
                    let var = prods.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
                    let se = (var / reps as f64).sqrt();
                    let z = (mean - exact[(i, j)]).abs() / se;
                    worst = worst.max(z);
                    assert!(z <= 3.0, "({t},{tau})[{i},{j}]: mc {mean} vs {} ({z:.2} se)", exact[(i, j)]);
                }
            }
        }
    }
    println!("worst standardized deviation {worst:.2}");
}

#[test]
fn simulated_tv_ar1_matches_cov_block() {
    let m = ModelSpec::tv_var(
        1,
        vec![CoefficientFn::sinusoidal(DMatrix::from_element(1, 1, 0.5), DMatrix::from_element(1, 1, 0.3))],
        CoefficientFn::scalar(1.0),
    );
    monte_carlo_agrees(&m, 20, 0, 8, 20_000, 11);
}

#[test]
fn simulated_tv_vma_matches_cov_block() {
    let m = random_vma(5, 2, 2);
    monte_carlo_agrees(&m, 20, 3, 9, 20_000, 12);
}
