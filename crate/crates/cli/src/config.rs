//! Optional TOML run configuration; command-line flags override its values.

use std::path::Path;

/// Keys shared by the file format and the flags. All optional: anything
/// absent falls back to the flag (or its default).
#[derive(Debug, Clone, Default, serde::Deserialize)]
pub struct FileConfig {
    pub sigma_low: Option<f64>,
    pub sigma_high: Option<f64>,
    pub dim: Option<usize>,
    pub n_steps: Option<usize>,
    pub horizon: Option<f64>,
    pub n_paths: Option<usize>,
    pub seed: Option<u64>,
    pub control_kind: Option<String>,
    pub out_dir: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
    }
}
