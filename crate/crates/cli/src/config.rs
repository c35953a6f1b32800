use std::path::{Path, PathBuf};

use emomodes::classifiers::TrainConfig;
use emomodes::features::{TokenWeighting, TokenizerSpec};
use emomodes::llm::AnnotatorConfig;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub tokenizer: TokenizerSpec,
    pub weighting: TokenWeighting,
    pub embeddings: Option<PathBuf>,
}

/// Contents of the `--config` file. Relative paths inside it are resolved
/// against the file's directory.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub train: TrainConfig,
    pub annotator: AnnotatorConfig,
    pub features: FeatureConfig,
    pub threshold: Option<f64>,
    pub strict: bool,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::from(e).context(path.display()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::validation(e.to_string()).context(path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = cfg.annotator.cache_dir.as_mut() {
            resolve(p);
        }
        if let Some(p) = cfg.features.embeddings.as_mut() {
            resolve(p);
        }
        if let TokenizerSpec::Subword { path } = &mut cfg.features.tokenizer {
            resolve(path);
        }
        cfg.train.check()?;
        cfg.annotator.check()?;
        Ok(cfg)
    }

    pub fn threshold(&self, flag: Option<f64>) -> Result<f64> {
        let t = flag.or(self.threshold).unwrap_or(self.train.threshold);
        if !(t > 0.0 && t < 1.0) {
            return Err(CliError::validation(format!("threshold must lie in (0, 1), got {t}")));
        }
        Ok(t)
    }
}
