use crate::error::{Error, Result};
use crate::models::ModelSpec;

use super::config::ExperimentConfig;

/// Bundled reproduction configs, `(name, JSON)`.
pub const REFERENCE_CONFIGS: &[(&str, &str)] = &[
    ("reference_vma_verify_all", include_str!("../../configs/reference_vma_verify_all.json")),
    ("reference_vma_decay", include_str!("../../configs/reference_vma_decay.json")),
    ("reference_vma_neumann", include_str!("../../configs/reference_vma_neumann.json")),
    ("reference_vma_baxter", include_str!("../../configs/reference_vma_baxter.json")),
    ("smoothness_vma3", include_str!("../../configs/smoothness_vma3.json")),
    ("coherence_var3", include_str!("../../configs/coherence_var3.json")),
    ("partial_var3", include_str!("../../configs/partial_var3.json")),
    ("sre_physical", include_str!("../../configs/sre_physical.json")),
    ("white_noise_decay", include_str!("../../configs/white_noise_decay.json")),
    ("ar1_var", include_str!("../../configs/ar1_var.json")),
    ("ar1_invert", include_str!("../../configs/ar1_invert.json")),
    ("ar1_simulate", include_str!("../../configs/ar1_simulate.json")),
];

pub fn reference_config(name: &str) -> Result<ExperimentConfig> {
    let (_, text) = REFERENCE_CONFIGS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Input(format!("no bundled config named {name}")))?;
    ExperimentConfig::from_json(text)
}

pub fn reference_model(name: &str) -> Result<ModelSpec> {
    Ok(reference_config(name)?.model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_bundled_configs_validate() {
        for (name, _) in REFERENCE_CONFIGS {
            reference_config(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}
