use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::models::ModelSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Simulate,
    Decay,
    Invert,
    Neumann,
    Var,
    Baxter,
    Smoothness,
    Partial,
    Coherence,
    Physical,
    VerifyAll,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Decay => "decay",
            ExperimentKind::Invert => "invert",
            ExperimentKind::Neumann => "neumann",
            ExperimentKind::Var => "var",
            ExperimentKind::Baxter => "baxter",
            ExperimentKind::Smoothness => "smoothness",
            ExperimentKind::Partial => "partial",
            ExperimentKind::Coherence => "coherence",
            ExperimentKind::Physical => "physical",
            ExperimentKind::VerifyAll => "verify-all",
        }
    }
}

/// Parameter grid. Every field is optional; each experiment documents the
/// defaults it applies.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub n: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub d: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub j: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub m: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<usize>,
    /// Window lengths.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub window: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pad: Option<usize>,
    /// Fixed time index; otherwise `round(u0 · N)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u0: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub u: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_lag: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    /// One-sided depth `L`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// Lags `j` for physical dependence.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lags: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub grid: Grid,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn to_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut s = String::new();
    for seg in path.iter() {
        s.push('/');
        match seg {
            Segment::Seq { index } => s.push_str(&index.to_string()),
            Segment::Map { key } => s.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => s.push_str(variant),
            Segment::Unknown => s.push('?'),
        }
    }
    s
}

impl ExperimentConfig {
    /// Parses and validates; every failure is a config error carrying a
    /// JSON pointer.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let pointer = to_pointer(e.path());
            Error::config(if pointer == "/." { String::new() } else { pointer }, e.inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.check_structure("/model")?;
        self.model
            .check_invariants()
            .map_err(|e| Error::config("/model", e.to_string()))?;
        let g = &self.grid;
        let positive = |name: &str, v: &[usize]| -> Result<()> {
            match v.iter().position(|&x| x == 0) {
                Some(i) => Err(Error::config(format!("/grid/{name}/{i}"), "must be positive")),
                None => Ok(()),
            }
        };
        positive("n", &g.n)?;
        positive("window", &g.window)?;
        positive("m", &g.m)?;
        positive("lags", &g.lags)?;
        if let Some(u) = g.u0 {
            if !u.is_finite() {
                return Err(Error::config("/grid/u0", "must be finite"));
            }
        }
        if let Some([a, b]) = g.pair {
            if a >= self.model.p || b >= self.model.p || a == b {
                return Err(Error::config("/grid/pair", format!("need two distinct components below p = {}", self.model.p)));
            }
        }
        if let Some(k) = g.omega_points {
            if k < 2 {
                return Err(Error::config("/grid/omega_points", "need at least 2 points"));
            }
        }
        if let Some(r) = g.reps {
            if r < 100 {
                return Err(Error::config("/grid/reps", "need at least 100 replications"));
            }
        }
        use ExperimentKind::*;
        let family = self.model.family;
        match self.experiment {
            Partial | Coherence if self.model.p < 2 => {
                Err(Error::config("/model/p", "partial covariances need p >= 2"))
            }
            Physical if g.lags.is_empty() => Err(Error::config("/grid/lags", "physical needs at least one lag")),
            Neumann if g.m.is_empty() => Err(Error::config("/grid/m", "neumann needs bandwidths")),
            Baxter if g.d.is_empty() => Err(Error::config("/grid/d", "baxter needs orders")),
            Decay | Invert | Neumann | Var | Baxter | Smoothness | Partial | Coherence
                if family == crate::models::Family::Sre =>
            {
                Err(Error::config("/model/family", "SRE covariances are available by Monte Carlo only"))
            }
            _ => Ok(()),
        }
    }

    /// `sha256` of the canonical JSON form, first 8 bytes in hex.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(&Sha256::digest(text.as_bytes())[..8])
    }

    pub fn ns(&self) -> Vec<usize> {
        if self.grid.n.is_empty() {
            vec![200]
        } else {
            self.grid.n.clone()
        }
    }

    pub fn u0(&self) -> f64 {
        self.grid.u0.unwrap_or(0.3)
    }

    pub fn time_for(&self, n: usize) -> i64 {
        self.grid.t.unwrap_or_else(|| (self.u0() * n as f64).round() as i64)
    }

    pub fn pair(&self) -> (usize, usize) {
        self.grid.pair.map_or((0, 1), |[a, b]| (a, b))
    }
}
