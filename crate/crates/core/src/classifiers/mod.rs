//! One-vs-rest classifiers over sparse features.
//!
//! Every label gets an independent binary model. Training fans out across
//! labels with rayon; each label's model is trained sequentially from its own
//! seeded RNG stream so results do not depend on thread scheduling.

mod boosted;
mod linear;
mod predictions;

pub use boosted::{train_boosted_ovr, Tree, TreeEnsemble, TreeNode};
pub use linear::{linear_objective, train_linear_ovr, LinearModel};
pub use predictions::{threshold_predictions, Prediction, PredictionSet, ScoreScale};

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::features::{SparseVector, Vocabulary};
use crate::labels::{Label, LabelVector, NUM_LABELS};

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("feature dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{features} feature vectors but {labels} label vectors")]
    LengthMismatch { features: usize, labels: usize },
    #[error("no training samples")]
    EmptyTrainingSet,
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate sentence `{0}` in prediction set")]
    DuplicateSentence(String),
    #[error("model file: {0}")]
    ModelFile(String),
}

pub type Result<T, E = ClassifierError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    /// Shrinkage applied to every boosted tree.
    pub learning_rate: f64,
    /// Regularization strength of the linear objective.
    pub l2: f64,
    pub seed: u64,
    pub class_weighting: bool,
    pub class_weight_cap: f64,
    pub rounds: usize,
    pub max_depth: usize,
    /// L2 penalty on boosted leaf values.
    pub tree_lambda: f64,
    pub threshold: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 10,
            learning_rate: 0.1,
            l2: 1e-4,
            seed: 0,
            class_weighting: true,
            class_weight_cap: 50.0,
            rounds: 100,
            max_depth: 6,
            tree_lambda: 1.0,
            threshold: 0.5,
        }
    }
}

impl TrainConfig {
    pub fn check(&self) -> Result<()> {
        let positive = [
            ("learning_rate", self.learning_rate),
            ("l2", self.l2),
            ("class_weight_cap", self.class_weight_cap),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ClassifierError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.tree_lambda.is_finite() && self.tree_lambda >= 0.0) {
            return Err(ClassifierError::InvalidConfig("tree_lambda must be non-negative".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(ClassifierError::InvalidConfig(format!(
                "threshold must lie in (0, 1), got {}",
                self.threshold
            )));
        }
        if self.max_depth == 0 {
            return Err(ClassifierError::InvalidConfig("max_depth must be at least 1".into()));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// Positive-class weight per label: `min(negatives / positives, cap)`, or
/// `cap` when a label has no positives.
pub fn compute_class_weights(gold: &[LabelVector], cap: f64) -> [f64; NUM_LABELS] {
    let n = gold.len();
    let mut weights = [cap; NUM_LABELS];
    for label in Label::ALL {
        let pos = gold.iter().filter(|v| v.get(label)).count();
        if pos > 0 {
            let neg = n - pos;
            weights[label.index()] = (neg as f64 / pos as f64).min(cap);
        }
    }
    weights
}

/// Class-weights file shared with external trainers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassWeightsFile {
    pub cap: f64,
    pub labels: Vec<Label>,
    pub weights: Vec<f64>,
}

impl ClassWeightsFile {
    pub fn new(weights: [f64; NUM_LABELS], cap: f64) -> Self {
        ClassWeightsFile {
            cap,
            labels: Label::ALL.to_vec(),
            weights: weights.to_vec(),
        }
    }
}

fn sample_weights(y: &[LabelVector], cfg: &TrainConfig) -> [f64; NUM_LABELS] {
    if cfg.class_weighting {
        compute_class_weights(y, cfg.class_weight_cap)
    } else {
        [1.0; NUM_LABELS]
    }
}

fn check_inputs(x: &[SparseVector], y: &[LabelVector], cfg: &TrainConfig) -> Result<usize> {
    cfg.check()?;
    if x.len() != y.len() {
        return Err(ClassifierError::LengthMismatch {
            features: x.len(),
            labels: y.len(),
        });
    }
    let first = x.first().ok_or(ClassifierError::EmptyTrainingSet)?;
    let dim = first.dim;
    for v in x {
        check_dim(dim, v)?;
    }
    Ok(dim)
}

fn check_dim(expected: usize, v: &SparseVector) -> Result<()> {
    if v.dim != expected {
        return Err(ClassifierError::DimensionMismatch {
            expected,
            found: v.dim,
        });
    }
    Ok(())
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Any trained one-vs-rest model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    Linear(LinearModel),
    Boosted(TreeEnsemble),
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Model::Linear(m) => m.dim,
            Model::Boosted(m) => m.dim,
        }
    }

    /// Raw per-label margins for one sample.
    pub fn margins(&self, x: &SparseVector) -> Result<[f64; NUM_LABELS]> {
        check_dim(self.dim(), x)?;
        Ok(match self {
            Model::Linear(m) => m.margins(x),
            Model::Boosted(m) => m.margins(x),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Linear(_) => "linear",
            Model::Boosted(_) => "boosted",
        }
    }
}

impl From<LinearModel> for Model {
    fn from(m: LinearModel) -> Self {
        Model::Linear(m)
    }
}

impl From<TreeEnsemble> for Model {
    fn from(m: TreeEnsemble) -> Self {
        Model::Boosted(m)
    }
}

/// Scores every sample with a logistic squash of the model margins.
pub fn predict<S: AsRef<str>>(
    model: &Model,
    ids: &[S],
    x: &[SparseVector],
    annotator: &str,
) -> Result<PredictionSet> {
    if ids.len() != x.len() {
        return Err(ClassifierError::LengthMismatch {
            features: x.len(),
            labels: ids.len(),
        });
    }
    let mut set = PredictionSet::new(annotator);
    for (id, v) in ids.iter().zip(x) {
        let m = model.margins(v)?;
        set.push(id.as_ref(), m.map(sigmoid))?;
    }
    Ok(set)
}

pub const MODEL_SCHEMA_VERSION: u32 = 1;

/// Self-describing model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema_version: u32,
    pub config: TrainConfig,
    pub config_hash: String,
    /// Fingerprint of the vocabulary for bag-of-tokens models.
    pub vocab_hash: Option<String>,
    /// Caller-defined description of how features were built.
    pub features: serde_json::Value,
    pub vocabulary: Option<Vocabulary>,
    pub model: Model,
}

impl ModelFile {
    pub fn new(model: Model, config: TrainConfig, vocabulary: Option<Vocabulary>, features: serde_json::Value) -> Self {
        ModelFile {
            schema_version: MODEL_SCHEMA_VERSION,
            config_hash: config.config_hash(),
            config,
            vocab_hash: vocabulary.as_ref().map(Vocabulary::fingerprint),
            features,
            vocabulary,
            model,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let json = serde_json::to_string(self).map_err(|e| ClassifierError::ModelFile(e.to_string()))?;
        fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let probe: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| ClassifierError::ModelFile(e.to_string()))?;
        let version = probe.get("schema_version").and_then(|v| v.as_u64());
        if version != Some(MODEL_SCHEMA_VERSION as u64) {
            return Err(ClassifierError::ModelFile(format!(
                "unsupported schema version {version:?}, expected {MODEL_SCHEMA_VERSION}"
            )));
        }
        let file: ModelFile = serde_json::from_value(probe).map_err(|e| ClassifierError::ModelFile(e.to_string()))?;
        if file.config_hash != file.config.config_hash() {
            return Err(ClassifierError::ModelFile("config hash does not match config".into()));
        }
        if file.vocab_hash != file.vocabulary.as_ref().map(Vocabulary::fingerprint) {
            return Err(ClassifierError::ModelFile("vocabulary hash does not match vocabulary".into()));
        }
        Ok(file)
    }
}
