//! Shared per-sentence score format of every annotator.
//!
//! JSONL, one sentence per line:
//!
//! ```json
//! {"sent_id": "d1:0", "scores": [0.9, 0.1, ...], "annotator": "linear", "config_hash": "..."}
//! ```
//!
//! `config_hash` is optional. Scores are probabilities unless the line carries
//! `"scale": "margin"`.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{sigmoid, ClassifierError, Result};
use crate::labels::{LabelVector, NUM_LABELS};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreScale {
    #[default]
    Probability,
    /// Raw margins; squashed through the logistic function before thresholding.
    Margin,
}

impl ScoreScale {
    fn is_probability(&self) -> bool {
        *self == ScoreScale::Probability
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub sent_id: String,
    pub scores: [f64; NUM_LABELS],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Line {
    sent_id: String,
    scores: Vec<f64>,
    annotator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config_hash: Option<String>,
    #[serde(default, skip_serializing_if = "ScoreScale::is_probability")]
    scale: ScoreScale,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionSet {
    pub annotator: String,
    pub config_hash: Option<String>,
    pub scale: ScoreScale,
    entries: Vec<Prediction>,
    index: HashMap<String, usize>,
}

impl PredictionSet {
    pub fn new(annotator: impl Into<String>) -> Self {
        PredictionSet {
            annotator: annotator.into(),
            ..Default::default()
        }
    }

    pub fn with_config_hash(mut self, hash: impl Into<String>) -> Self {
        self.config_hash = Some(hash.into());
        self
    }

    pub fn push(&mut self, sent_id: impl Into<String>, scores: [f64; NUM_LABELS]) -> Result<()> {
        let sent_id = sent_id.into();
        if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
            return Err(ClassifierError::Parse {
                line: self.entries.len() + 1,
                message: format!("`{sent_id}`: non-finite score {bad}"),
            });
        }
        if self.scale == ScoreScale::Probability {
            if let Some(bad) = scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
                return Err(ClassifierError::Parse {
                    line: self.entries.len() + 1,
                    message: format!("`{sent_id}`: probability {bad} outside [0, 1]"),
                });
            }
        }
        if self.index.contains_key(&sent_id) {
            return Err(ClassifierError::DuplicateSentence(sent_id));
        }
        self.index.insert(sent_id.clone(), self.entries.len());
        self.entries.push(Prediction { sent_id, scores });
        Ok(())
    }

    /// Scores from label vectors: 1.0 for set bits, 0.0 otherwise.
    pub fn push_vector(&mut self, sent_id: impl Into<String>, v: LabelVector) -> Result<()> {
        let bits = v.to_bools();
        self.push(sent_id, bits.map(|b| if b { 1.0 } else { 0.0 }))
    }

    pub fn get(&self, sent_id: &str) -> Option<&Prediction> {
        self.index.get(sent_id).map(|&i| &self.entries[i])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Prediction> {
        self.entries.iter()
    }

    /// Probability scores, squashing margins if needed.
    pub fn probabilities(&self, p: &Prediction) -> [f64; NUM_LABELS] {
        match self.scale {
            ScoreScale::Probability => p.scores,
            ScoreScale::Margin => p.scores.map(sigmoid),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_jsonl(BufReader::new(File::open(path)?))
    }

    pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Self> {
        let mut set: Option<PredictionSet> = None;
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| ClassifierError::Parse { line: line_no, message };
            let rec: Line = serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
            let scores: [f64; NUM_LABELS] = rec
                .scores
                .as_slice()
                .try_into()
                .map_err(|_| parse_err(format!("expected {NUM_LABELS} scores, found {}", rec.scores.len())))?;
            let set = set.get_or_insert_with(|| PredictionSet {
                annotator: rec.annotator.clone(),
                config_hash: rec.config_hash.clone(),
                scale: rec.scale,
                ..Default::default()
            });
            if rec.annotator != set.annotator || rec.config_hash != set.config_hash || rec.scale != set.scale {
                return Err(parse_err("provenance differs from the first line".into()));
            }
            set.push(rec.sent_id, scores).map_err(|e| match e {
                ClassifierError::Parse { message, .. } => parse_err(message),
                other => other,
            })?;
        }
        Ok(set.unwrap_or_default())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_jsonl(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for p in &self.entries {
            let line = Line {
                sent_id: p.sent_id.clone(),
                scores: p.scores.to_vec(),
                annotator: self.annotator.clone(),
                config_hash: self.config_hash.clone(),
                scale: self.scale,
            };
            serde_json::to_writer(&mut w, &line).map_err(std::io::Error::from)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// `bit_i = score_i >= t`. No derivation rules are applied.
pub fn threshold_predictions(p: &PredictionSet, t: f64) -> BTreeMap<String, LabelVector> {
    p.iter()
        .map(|pred| {
            let bits = p.probabilities(pred).map(|s| s >= t);
            (pred.sent_id.clone(), LabelVector::from_bools(&bits).expect("19 bits"))
        })
        .collect()
}
