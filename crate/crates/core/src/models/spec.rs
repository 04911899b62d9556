use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::coefficient::CoefficientFn;
use crate::error::{Error, Result};
use crate::operator_core::{matrix_eig_range, spectral_norm};

/// Process family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `X_t = Σ_{j=0}^{J} Ψ_j(t/N) ε_{t−j}`.
    TvVma,
    /// `X_t = Σ_{j=1}^{d} Φ_j(t/N) X_{t−j} + Σ(t/N)^{1/2} ε_t`.
    TvVar,
    /// `X_t = σ_t Z_t`, `σ_t² = a_0(t/N) + Σ_j a_j(t/N) X_{t−j}²` (scalar).
    TvArch,
    /// `X_t = A(t/N, ε_t) X_{t−1} + B(t/N) ε_t` with
    /// `A(u, e) = A_0(u) + Σ_k e_k A_k(u)`.
    Sre,
}

/// Lag-indexed power-law tail of a moving-average filter:
/// `Ψ_j(u) = gu(j)^{−kappa} · shape(u)` for `from ≤ j ≤ to`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerTail {
    pub from: usize,
    pub to: usize,
    pub kappa: f64,
    pub shape: CoefficientFn,
}

/// Parametric description of a locally stationary process.
///
/// Field use by family:
///
/// | family  | `coefficients`     | `innovation_variance` | other              |
/// |---------|--------------------|-----------------------|--------------------|
/// | tv_vma  | `Ψ_0, Ψ_1, …`      | –                     | `tail`             |
/// | tv_var  | `Φ_1, …, Φ_d`      | `Σ(u)`                | –                  |
/// | tv_arch | `a_1, …, a_d`      | `a_0(u)`              | –                  |
/// | sre     | `[A_0]`            | `B(u)`                | `loadings` = `A_k` |
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    pub p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    pub coefficients: Vec<CoefficientFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub innovation_variance: Option<CoefficientFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<PowerTail>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub loadings: Vec<CoefficientFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

/// Grid of rescaled times used for invariant checks; covers more than one
/// period of unit-frequency sinusoids and the clamping points of affine
/// forms.
pub fn check_grid() -> Vec<f64> {
    (0..=600).map(|i| -1.0 + i as f64 / 200.0).collect()
}

const STABILITY_DELTA: f64 = 0.02;

impl ModelSpec {
    pub fn tv_vma(p: usize, psis: Vec<CoefficientFn>) -> Self {
        ModelSpec {
            family: Family::TvVma,
            p,
            order: None,
            coefficients: psis,
            innovation_variance: None,
            tail: None,
            loadings: Vec::new(),
            kappa: None,
        }
    }

    pub fn tv_var(p: usize, phis: Vec<CoefficientFn>, sigma: CoefficientFn) -> Self {
        ModelSpec {
            family: Family::TvVar,
            p,
            order: None,
            coefficients: phis,
            innovation_variance: Some(sigma),
            tail: None,
            loadings: Vec::new(),
            kappa: None,
        }
    }

    pub fn tv_arch(intercept: CoefficientFn, coeffs: Vec<CoefficientFn>) -> Self {
        ModelSpec {
            family: Family::TvArch,
            p: 1,
            order: None,
            coefficients: coeffs,
            innovation_variance: Some(intercept),
            tail: None,
            loadings: Vec::new(),
            kappa: None,
        }
    }

    pub fn sre(transition: CoefficientFn, loadings: Vec<CoefficientFn>, noise: CoefficientFn) -> Self {
        let p = transition.shape().0;
        ModelSpec {
            family: Family::Sre,
            p,
            order: None,
            coefficients: vec![transition],
            innovation_variance: Some(noise),
            tail: None,
            loadings,
            kappa: None,
        }
    }

    pub fn with_tail(mut self, tail: PowerTail) -> Self {
        self.tail = Some(tail);
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = Some(kappa);
        self
    }

    /// MA truncation `J` (tv-VMA) or autoregressive order `d`.
    pub fn model_order(&self) -> usize {
        match self.family {
            Family::TvVma => {
                let explicit = self.coefficients.len().saturating_sub(1);
                self.tail.as_ref().map_or(explicit, |t| explicit.max(t.to))
            }
            Family::TvVar | Family::TvArch => self.coefficients.len(),
            Family::Sre => 1,
        }
    }

    /// True when no coefficient depends on `u`.
    pub fn is_frozen(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_constant())
            && self.innovation_variance.as_ref().is_none_or(|c| c.is_constant())
            && self.tail.as_ref().is_none_or(|t| t.shape.is_constant())
            && self.loadings.iter().all(|c| c.is_constant())
    }

    /// Copy with every coefficient frozen at `u`.
    pub fn frozen_at(&self, u: f64) -> ModelSpec {
        let fr = |c: &CoefficientFn| CoefficientFn::constant(c.eval(u));
        ModelSpec {
            coefficients: self.coefficients.iter().map(fr).collect(),
            innovation_variance: self.innovation_variance.as_ref().map(fr),
            tail: self.tail.as_ref().map(|t| PowerTail {
                shape: fr(&t.shape),
                ..t.clone()
            }),
            loadings: self.loadings.iter().map(fr).collect(),
            ..self.clone()
        }
    }

    /// Stable short hash of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("model serializes");
        let digest = Sha256::digest(&json);
        hex::encode(&digest[..8])
    }

    /// Moving-average coefficients `Ψ_0 … Ψ_J` at `u` (tv-VMA only).
    pub fn psis_at(&self, u: f64) -> Vec<DMatrix<f64>> {
        let j = self.model_order();
        let mut out: Vec<DMatrix<f64>> = (0..=j).map(|_| DMatrix::zeros(self.p, self.p)).collect();
        for (k, c) in self.coefficients.iter().enumerate() {
            out[k] = c.eval(u);
        }
        if let Some(t) = &self.tail {
            let s = t.shape.eval(u);
            for (k, o) in out.iter_mut().enumerate().take(t.to + 1).skip(t.from) {
                *o += &s * (k.max(1) as f64).powf(-t.kappa);
            }
        }
        out
    }

    /// Derivatives `Ψ_j'(u)` (tv-VMA only).
    pub fn psi_derivatives_at(&self, u: f64) -> Vec<DMatrix<f64>> {
        let j = self.model_order();
        let mut out: Vec<DMatrix<f64>> = (0..=j).map(|_| DMatrix::zeros(self.p, self.p)).collect();
        for (k, c) in self.coefficients.iter().enumerate() {
            out[k] = c.derivative(u);
        }
        if let Some(t) = &self.tail {
            let s = t.shape.derivative(u);
            for (k, o) in out.iter_mut().enumerate().take(t.to + 1).skip(t.from) {
                *o += &s * (k.max(1) as f64).powf(-t.kappa);
            }
        }
        out
    }

    /// `Φ_1 … Φ_d` at `u` (tv-VAR), or `a_1 … a_d` as 1×1 (tv-ARCH).
    pub fn phis_at(&self, u: f64) -> Vec<DMatrix<f64>> {
        self.coefficients.iter().map(|c| c.eval(u)).collect()
    }

    pub fn phi_derivatives_at(&self, u: f64) -> Vec<DMatrix<f64>> {
        self.coefficients.iter().map(|c| c.derivative(u)).collect()
    }

    /// `Σ(u)` (tv-VAR), `a_0(u)` (tv-ARCH), `B(u)` (SRE).
    pub fn innovation_at(&self, u: f64) -> DMatrix<f64> {
        self.innovation_variance
            .as_ref()
            .map_or_else(|| DMatrix::identity(self.p, self.p), |c| c.eval(u))
    }

    pub fn innovation_derivative_at(&self, u: f64) -> DMatrix<f64> {
        self.innovation_variance
            .as_ref()
            .map_or_else(|| DMatrix::zeros(self.p, self.p), |c| c.derivative(u))
    }

    /// Spectral radius of the autoregressive companion matrix at `u`
    /// (tv-VAR and tv-ARCH in its squared-process form).
    pub fn companion_radius(&self, u: f64) -> f64 {
        let phis = self.phis_at(u);
        companion_spectral_radius(&phis, self.p)
    }

    /// Effective memory in time steps: the MA order for tv-VMA, otherwise
    /// `⌈1 / −log ρ⌉` for the worst contraction rate `ρ` on the check grid.
    pub fn effective_memory(&self) -> usize {
        let rho = match self.family {
            Family::TvVma => return self.model_order().max(1),
            Family::TvVar | Family::TvArch => check_grid()
                .iter()
                .map(|&u| self.companion_radius(u))
                .fold(0.0, f64::max),
            Family::Sre => self.sre_contraction().sqrt(),
        };
        memory_from_rate(rho).max(self.model_order())
    }

    /// `sup_u ‖A_0 A_0ᵀ + Σ_k A_k A_kᵀ‖₂ = sup_u ‖E[A Aᵀ]‖₂` (SRE).
    pub fn sre_contraction(&self) -> f64 {
        check_grid()
            .iter()
            .map(|&u| {
                let a0 = self.coefficients[0].eval(u);
                let mut m = &a0 * a0.transpose();
                for l in &self.loadings {
                    let a = l.eval(u);
                    m += &a * a.transpose();
                }
                spectral_norm(&m).unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    }

    /// Structural validation with JSON pointers rooted at `base`.
    pub fn check_structure(&self, base: &str) -> Result<()> {
        let p = self.p;
        if p == 0 {
            return Err(Error::config(format!("{base}/p"), "p must be positive"));
        }
        if let Some(k) = self.kappa {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::config(format!("{base}/kappa"), "kappa must be positive"));
            }
        }
        for (i, c) in self.coefficients.iter().enumerate() {
            c.check(p, &format!("{base}/coefficients/{i}"))?;
        }
        if let Some(c) = &self.innovation_variance {
            c.check(p, &format!("{base}/innovation_variance"))?;
        }
        for (i, c) in self.loadings.iter().enumerate() {
            c.check(p, &format!("{base}/loadings/{i}"))?;
        }
        let needs = |field: &str, ok: bool, msg: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::config(format!("{base}/{field}"), msg.to_string()))
            }
        };
        match self.family {
            Family::TvVma => {
                needs("coefficients", !self.coefficients.is_empty() || self.tail.is_some(), "tv_vma needs at least Ψ_0")?;
                needs("innovation_variance", self.innovation_variance.is_none(), "tv_vma takes no innovation_variance")?;
                needs("loadings", self.loadings.is_empty(), "tv_vma takes no loadings")?;
                if let Some(t) = &self.tail {
                    t.shape.check(p, &format!("{base}/tail/shape"))?;
                    needs("tail/to", t.to >= t.from, "tail range is empty")?;
                    needs("tail/kappa", t.kappa.is_finite() && t.kappa > 0.0, "tail kappa must be positive")?;
                    needs("tail/to", t.to <= 100_000, "tail too long")?;
                }
            }
            Family::TvVar => {
                needs("coefficients", !self.coefficients.is_empty(), "tv_var needs at least one Φ_j")?;
                needs("innovation_variance", self.innovation_variance.is_some(), "tv_var needs innovation_variance")?;
                needs("tail", self.tail.is_none(), "tail applies to tv_vma only")?;
                needs("loadings", self.loadings.is_empty(), "tv_var takes no loadings")?;
            }
            Family::TvArch => {
                needs("p", p == 1, "tv_arch is scalar (p = 1)")?;
                needs("coefficients", !self.coefficients.is_empty(), "tv_arch needs at least one a_j")?;
                needs("innovation_variance", self.innovation_variance.is_some(), "tv_arch needs the intercept a_0 as innovation_variance")?;
                needs("tail", self.tail.is_none(), "tail applies to tv_vma only")?;
            }
            Family::Sre => {
                needs("coefficients", self.coefficients.len() == 1, "sre takes exactly one transition matrix A_0")?;
                needs("innovation_variance", self.innovation_variance.is_some(), "sre needs the noise loading B as innovation_variance")?;
                needs("loadings", self.loadings.len() <= p, "sre takes at most p random loadings")?;
                needs("tail", self.tail.is_none(), "tail applies to tv_vma only")?;
            }
        }
        if let Some(d) = self.order {
            needs("order", d == self.model_order(), &format!("order {d} disagrees with coefficients ({})", self.model_order()))?;
        }
        Ok(())
    }

    /// Checks the family invariants on [`check_grid`]:
    /// tv-VAR stability margin and SPD `Σ(u)`; tv-VMA envelope and
    /// non-vanishing filter; tv-ARCH positivity and fourth-moment
    /// contraction; SRE mean-square contraction.
    pub fn check_invariants(&self) -> Result<()> {
        self.check_structure("")?;
        let grid = check_grid();
        match self.family {
            Family::TvVar => {
                for &u in &grid {
                    let r = self.companion_radius(u);
                    if !(r * (1.0 + STABILITY_DELTA) < 1.0) {
                        return Err(Error::Model(format!(
                            "tv-VAR companion spectral radius {r:.4} at u={u} violates the stability margin"
                        )));
                    }
                    let s = matrix_eig_range(&self.innovation_at(u))?;
                    if !s.is_spd() {
                        return Err(Error::Model(format!("Σ(u) not SPD at u={u}")));
                    }
                }
                let gamma = self.stability_margin(&grid, 64);
                if !(gamma > 0.0) {
                    return Err(Error::Model("tv-VAR transfer function singular on |z| = 1 + δ".into()));
                }
            }
            Family::TvVma => {
                if let Some(k) = self.kappa {
                    let env = self.envelope_constant(k);
                    if !env.is_finite() {
                        return Err(Error::Model("Ψ-norm envelope is not finite".into()));
                    }
                }
                let m = self.min_filter_singular_value(&grid, 64);
                if !(m > 1e-8) {
                    return Err(Error::Model(format!(
                        "tv-VMA filter nearly vanishes on |z| = 1 (σ_min = {m:.3e})"
                    )));
                }
            }
            Family::TvArch => {
                for &u in &grid {
                    let a0 = self.innovation_at(u)[(0, 0)];
                    if !(a0 > 0.0) {
                        return Err(Error::Model(format!("a_0({u}) = {a0} must be positive")));
                    }
                    let a: Vec<f64> = self.phis_at(u).iter().map(|m| m[(0, 0)]).collect();
                    if a.iter().any(|&x| x < 0.0) {
                        return Err(Error::Model(format!("negative ARCH coefficient at u={u}")));
                    }
                    let s: f64 = a.iter().sum();
                    if !(3f64.sqrt() * s < 1.0) {
                        return Err(Error::Model(format!(
                            "√3 Σ a_j(u) = {:.4} at u={u} violates the fourth-moment condition",
                            3f64.sqrt() * s
                        )));
                    }
                }
            }
            Family::Sre => {
                let rho = self.sre_contraction();
                if !(rho < 1.0) {
                    return Err(Error::Model(format!("sup_u ‖E[A Aᵀ]‖ = {rho:.4} is not below 1")));
                }
            }
        }
        Ok(())
    }

    /// Smallest `K` with `‖Ψ_j(u)‖ ≤ K gu(j)^{−κ}` on the check grid.
    pub fn envelope_constant(&self, kappa: f64) -> f64 {
        check_grid()
            .iter()
            .map(|&u| {
                self.psis_at(u)
                    .iter()
                    .enumerate()
                    .map(|(j, m)| spectral_norm(m).unwrap_or(f64::INFINITY) * (j.max(1) as f64).powf(kappa))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// `min σ_min(Σ_j Ψ_j(u) e^{−ijω})` over the grid (tv-VMA).
    pub fn min_filter_singular_value(&self, u_grid: &[f64], n_omega: usize) -> f64 {
        let mut best = f64::INFINITY;
        for &u in u_grid {
            let psis = self.psis_at(u);
            for k in 0..n_omega {
                let w = std::f64::consts::PI * k as f64 / (n_omega - 1) as f64;
                let a = transfer(&psis, w, 0);
                best = best.min(min_singular_complex(&a));
            }
        }
        best
    }

    /// `min σ_min(I − Σ_j Φ_j(u) z^j)` over the u-grid and `|z| = 1 + δ`.
    pub fn stability_margin(&self, u_grid: &[f64], n_omega: usize) -> f64 {
        let mut best = f64::INFINITY;
        let r = 1.0 + STABILITY_DELTA;
        for &u in u_grid {
            let phis = self.phis_at(u);
            for k in 0..n_omega {
                let w = 2.0 * std::f64::consts::PI * k as f64 / n_omega as f64;
                let z = Complex::from_polar(r, w);
                let mut m = DMatrix::<Complex<f64>>::identity(self.p, self.p);
                let mut zp = Complex::new(1.0, 0.0);
                for phi in &phis {
                    zp *= z;
                    m -= phi.map(|x| Complex::new(x, 0.0)) * zp;
                }
                best = best.min(min_singular_complex(&m));
            }
        }
        best
    }
}

/// `Σ_j M_j e^{−i(j + shift)ω}`.
pub(crate) fn transfer(ms: &[DMatrix<f64>], omega: f64, shift: usize) -> DMatrix<Complex<f64>> {
    let p = ms.first().map_or(0, |m| m.nrows());
    let mut a = DMatrix::<Complex<f64>>::zeros(p, p);
    for (j, m) in ms.iter().enumerate() {
        let e = Complex::from_polar(1.0, -((j + shift) as f64) * omega);
        a += m.map(|x| Complex::new(x, 0.0)) * e;
    }
    a
}

pub(crate) fn min_singular_complex(m: &DMatrix<Complex<f64>>) -> f64 {
    m.clone().svd(false, false).singular_values.min()
}

pub(crate) fn memory_from_rate(rho: f64) -> usize {
    if rho <= 0.0 {
        1
    } else if rho >= 1.0 {
        usize::MAX / 4
    } else {
        (1.0 / -rho.ln()).ceil().max(1.0) as usize
    }
}

/// Spectral radius of the block companion matrix of `Φ_1 … Φ_d`.
pub(crate) fn companion_spectral_radius(phis: &[DMatrix<f64>], p: usize) -> f64 {
    let d = phis.len();
    if d == 0 {
        return 0.0;
    }
    let n = d * p;
    let mut c = DMatrix::zeros(n, n);
    for (j, phi) in phis.iter().enumerate() {
        c.view_mut((0, j * p), (p, p)).copy_from(phi);
    }
    for k in 0..(d - 1) * p {
        c[(p + k, k)] = 1.0;
    }
    c.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ar1(phi: f64) -> ModelSpec {
        ModelSpec::tv_var(1, vec![CoefficientFn::scalar(phi)], CoefficientFn::scalar(1.0))
    }

    #[test]
    fn companion_radius_ar1() {
        assert!((ar1(0.5).companion_radius(0.3) - 0.5).abs() < 1e-14);
        assert!(ar1(0.5).check_invariants().is_ok());
        assert!(matches!(ar1(1.0).check_invariants(), Err(Error::Model(_))));
    }

    #[test]
    fn arch_conditions() {
        let ok = ModelSpec::tv_arch(CoefficientFn::scalar(1.0), vec![CoefficientFn::scalar(0.5)]);
        assert!(ok.check_invariants().is_ok());
        let bad = ModelSpec::tv_arch(CoefficientFn::scalar(1.0), vec![CoefficientFn::scalar(0.6)]);
        assert!(bad.check_invariants().is_err());
        let neg = ModelSpec::tv_arch(CoefficientFn::scalar(-1.0), vec![CoefficientFn::scalar(0.1)]);
        assert!(neg.check_invariants().is_err());
    }

    #[test]
    fn vma_filter_check() {
        // 1 + z vanishes at ω = π.
        let m = ModelSpec::tv_vma(1, vec![CoefficientFn::scalar(1.0), CoefficientFn::scalar(1.0)]);
        assert!(m.check_invariants().is_err());
        let ok = ModelSpec::tv_vma(1, vec![CoefficientFn::scalar(1.0), CoefficientFn::scalar(0.5)]);
        assert!(ok.check_invariants().is_ok());
    }

    #[test]
    fn tail_expands() {
        let m = ModelSpec::tv_vma(1, vec![CoefficientFn::scalar(1.0)]).with_tail(PowerTail {
            from: 1,
            to: 4,
            kappa: 2.0,
            shape: CoefficientFn::scalar(0.5),
        });
        let psis = m.psis_at(0.0);
        assert_eq!(psis.len(), 5);
        assert!((psis[2][(0, 0)] - 0.125).abs() < 1e-15);
        assert_eq!(m.model_order(), 4);
    }

    #[test]
    fn structure_pointers() {
        let mut m = ar1(0.5);
        m.innovation_variance = None;
        match m.check_structure("/model") {
            Err(Error::Config { pointer, .. }) => assert_eq!(pointer, "/model/innovation_variance"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        assert_eq!(ar1(0.5).hash(), ar1(0.5).hash());
        assert_ne!(ar1(0.5).hash(), ar1(0.4).hash());
    }

    #[test]
    fn json_form() {
        let json = r#"{"family":"tv_var","p":1,"coefficients":[{"form":"constant","value":[[0.5]]}],
                       "innovation_variance":{"form":"constant","value":[[1.0]]}}"#;
        let m: ModelSpec = serde_json::from_str(json).unwrap();
        assert_eq!(m, ar1(0.5));
    }
}
