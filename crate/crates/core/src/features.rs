//! Sentence feature vectors.
//!
//! Two kinds of inputs feed the classical classifiers: bag-of-tokens counts
//! over a vocabulary built from the training subset only, and precomputed
//! dense sentence embeddings read from TSV.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("cannot build a vocabulary from an empty training set")]
    EmptyTrainingSet,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: expected {expected} values, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("no embedding for sentence `{0}`")]
    UnknownSentence(String),
    #[error("tokenizer: {0}")]
    Tokenizer(String),
}

pub type Result<T, E = FeatureError> = std::result::Result<T, E>;

/// Splits text into tokens. Implementations must be deterministic.
pub trait Tokenizer: Send + Sync {
    fn tokenize(&self, text: &str) -> Vec<String>;
}

/// Splits on whitespace and emits every punctuation character as its own
/// token. Case is preserved.
#[derive(Debug, Clone, Copy, Default)]
pub struct BasicTokenizer;

impl Tokenizer for BasicTokenizer {
    fn tokenize(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        for chunk in text.split_whitespace() {
            let mut word = String::new();
            for c in chunk.chars() {
                if c.is_alphanumeric() {
                    word.push(c);
                } else {
                    if !word.is_empty() {
                        out.push(std::mem::take(&mut word));
                    }
                    out.push(c.to_string());
                }
            }
            if !word.is_empty() {
                out.push(word);
            }
        }
        out
    }
}

/// Whitespace-only tokenizer, mostly useful in tests.
#[derive(Debug, Clone, Copy, Default)]
pub struct WhitespaceTokenizer;

impl Tokenizer for WhitespaceTokenizer {
    fn tokenize(&self, text: &str) -> Vec<String> {
        text.split_whitespace().map(str::to_string).collect()
    }
}

/// Subword tokenizer loaded from a serialized `tokenizer.json` definition of a
/// pretrained model. Special tokens are not added.
#[cfg(feature = "subword")]
pub struct SubwordTokenizer {
    inner: tokenizers::Tokenizer,
}

#[cfg(feature = "subword")]
impl SubwordTokenizer {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let inner = tokenizers::Tokenizer::from_file(path).map_err(|e| FeatureError::Tokenizer(e.to_string()))?;
        Ok(SubwordTokenizer { inner })
    }
}

#[cfg(feature = "subword")]
impl Tokenizer for SubwordTokenizer {
    fn tokenize(&self, text: &str) -> Vec<String> {
        match self.inner.encode(text, false) {
            Ok(enc) => enc.get_tokens().to_vec(),
            Err(e) => {
                log::warn!("subword tokenization failed: {e}");
                Vec::new()
            }
        }
    }
}

/// Serializable tokenizer choice, stored alongside trained models.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TokenizerSpec {
    #[default]
    Basic,
    Whitespace,
    Subword { path: PathBuf },
}

impl TokenizerSpec {
    pub fn build(&self) -> Result<Box<dyn Tokenizer>> {
        match self {
            TokenizerSpec::Basic => Ok(Box::new(BasicTokenizer)),
            TokenizerSpec::Whitespace => Ok(Box::new(WhitespaceTokenizer)),
            #[cfg(feature = "subword")]
            TokenizerSpec::Subword { path } => Ok(Box::new(SubwordTokenizer::from_file(path)?)),
            #[cfg(not(feature = "subword"))]
            TokenizerSpec::Subword { .. } => Err(FeatureError::Tokenizer(
                "built without the `subword` feature".into(),
            )),
        }
    }
}

/// Token to column index map. Indices follow first occurrence in the
/// training sentences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl From<Vec<String>> for Vocabulary {
    fn from(tokens: Vec<String>) -> Self {
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { tokens, index }
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.tokens
    }
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Hex SHA-256 of the newline-joined token list.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for t in &self.tokens {
            h.update(t.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

/// Collects the distinct tokens of the training sentences.
pub fn build_vocabulary<'a, I>(train_sentences: I, tokenizer: &dyn Tokenizer) -> Result<Vocabulary>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut tokens = Vec::new();
    let mut index = HashMap::new();
    let mut seen_any = false;
    for text in train_sentences {
        seen_any = true;
        for tok in tokenizer.tokenize(text) {
            if !index.contains_key(&tok) {
                index.insert(tok.clone(), tokens.len());
                tokens.push(tok);
            }
        }
    }
    if !seen_any {
        return Err(FeatureError::EmptyTrainingSet);
    }
    Ok(Vocabulary { tokens, index })
}

/// Sparse feature vector with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    pub dim: usize,
    pub entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn new(dim: usize, mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_by_key(|e| e.0);
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|e| e.0 < dim && e.1.is_finite()));
        SparseVector { dim, entries }
    }

    pub fn from_dense(values: &[f64]) -> Self {
        SparseVector {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i, *v))
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1.abs()).sum()
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1 * e.1).sum()
    }

    /// Dot product with a dense weight vector of at least `dim` entries.
    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| weights[i] * v).sum()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .map_or(0.0, |k| self.entries[k].1)
    }
}

/// How token occurrences become feature values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenWeighting {
    #[default]
    Counts,
    Binary,
}

/// Bag-of-tokens vector; tokens outside the vocabulary are dropped.
pub fn vectorize(text: &str, vocab: &Vocabulary, tokenizer: &dyn Tokenizer, weighting: TokenWeighting) -> SparseVector {
    let mut counts: HashMap<usize, f64> = HashMap::new();
    for tok in tokenizer.tokenize(text) {
        if let Some(i) = vocab.get(&tok) {
            *counts.entry(i).or_insert(0.0) += 1.0;
        }
    }
    let entries = counts
        .into_iter()
        .map(|(i, c)| match weighting {
            TokenWeighting::Counts => (i, c),
            TokenWeighting::Binary => (i, 1.0),
        })
        .collect();
    SparseVector::new(vocab.len(), entries)
}

/// Precomputed sentence embeddings keyed by sentence id.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    rows: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, sent_id: &str) -> Result<&[f64]> {
        self.rows
            .get(sent_id)
            .map(Vec::as_slice)
            .ok_or_else(|| FeatureError::UnknownSentence(sent_id.to_string()))
    }

    pub fn vector(&self, sent_id: &str) -> Result<SparseVector> {
        self.get(sent_id).map(SparseVector::from_dense)
    }
}

/// Reads `sent_id<TAB>v1<TAB>...<TAB>vd` rows; `d` is fixed by the first row.
pub fn load_embedding_table(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    read_embedding_table(BufReader::new(File::open(path)?))
}

pub fn read_embedding_table<R: BufRead>(reader: R) -> Result<EmbeddingTable> {
    let mut dim = None;
    let mut rows = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let id = fields.next().unwrap_or_default().to_string();
        let values = fields
            .map(|f| {
                f.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| FeatureError::Parse {
                    line: line_no,
                    message: format!("invalid value `{f}`"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.is_empty() {
            return Err(FeatureError::Parse {
                line: line_no,
                message: "row has no values".into(),
            });
        }
        let expected = *dim.get_or_insert(values.len());
        if values.len() != expected {
            return Err(FeatureError::DimensionMismatch {
                line: line_no,
                expected,
                found: values.len(),
            });
        }
        if rows.insert(id.clone(), values).is_some() {
            return Err(FeatureError::Parse {
                line: line_no,
                message: format!("duplicate sentence id `{id}`"),
            });
        }
    }
    Ok(EmbeddingTable {
        dim: dim.unwrap_or(0),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vocabulary_from_whitespace_tokens() {
        let v = build_vocabulary(["a b", "b c"], &WhitespaceTokenizer).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v.get("a"), Some(0));
        assert_eq!(v.get("c"), Some(2));
        let again = build_vocabulary(["a b", "b c"], &WhitespaceTokenizer).unwrap();
        assert_eq!(v, again);
        assert_eq!(v.fingerprint(), again.fingerprint());
    }

    #[test]
    fn empty_training_set() {
        assert!(matches!(
            build_vocabulary(std::iter::empty(), &WhitespaceTokenizer),
            Err(FeatureError::EmptyTrainingSet)
        ));
    }

    #[test]
    fn vectorize_counts() {
        let vocab = Vocabulary::from(vec!["a".to_string(), "b".into(), "c".into()]);
        let v = vectorize("b b a", &vocab, &WhitespaceTokenizer, TokenWeighting::Counts);
        assert_eq!(v.entries, vec![(0, 1.0), (1, 2.0)]);
        let v = vectorize("b b a", &vocab, &WhitespaceTokenizer, TokenWeighting::Binary);
        assert_eq!(v.entries, vec![(0, 1.0), (1, 1.0)]);
        let oov = vectorize("x y", &vocab, &WhitespaceTokenizer, TokenWeighting::Counts);
        assert!(oov.is_empty());
        assert_eq!(oov.dim, 3);
    }

    #[test]
    fn basic_tokenizer_splits_punctuation() {
        assert_eq!(
            BasicTokenizer.tokenize("Oh, non... C'est dommage !"),
            ["Oh", ",", "non", ".", ".", ".", "C", "'", "est", "dommage", "!"]
        );
    }

    #[test]
    fn vocabulary_serde_keeps_order() {
        let v = build_vocabulary(["z y x"], &WhitespaceTokenizer).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"["z","y","x"]"#);
        let back: Vocabulary = serde_json::from_str(&json).unwrap();
        assert_eq!(back.get("x"), Some(2));
    }

    #[test]
    fn embeddings_load_and_lookup() {
        let t = read_embedding_table("s1\t1\t2\t3\t4\ns2\t0\t0\t0.5\t-1\n".as_bytes()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.dim(), 4);
        assert_eq!(t.get("s2").unwrap(), &[0.0, 0.0, 0.5, -1.0]);
        assert_eq!(t.vector("s2").unwrap().entries, vec![(2, 0.5), (3, -1.0)]);
        assert!(matches!(t.get("s3"), Err(FeatureError::UnknownSentence(_))));
    }

    #[test]
    fn embeddings_dimension_mismatch() {
        let err = read_embedding_table("s1\t1\t2\t3\t4\ns2\t1\t2\t3\n".as_bytes()).unwrap_err();
        assert!(matches!(
            err,
            FeatureError::DimensionMismatch {
                line: 2,
                expected: 4,
                found: 3
            }
        ));
        assert!(read_embedding_table("s1\tx\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn l1_norm_counts_in_vocab_tokens(train in "[a-e ]{1,30}", text in "[a-h ]{0,40}") {
            let vocab = build_vocabulary([train.as_str()], &WhitespaceTokenizer).unwrap();
            let size = vocab.len();
            let v = vectorize(&text, &vocab, &WhitespaceTokenizer, TokenWeighting::Counts);
            let in_vocab = text.split_whitespace().filter(|t| vocab.get(t).is_some()).count();
            prop_assert_eq!(v.l1_norm() as usize, in_vocab);
            prop_assert_eq!(vocab.len(), size);
            prop_assert!(v.entries.windows(2).all(|w| w[0].0 < w[1].0));
        }
    }
}
