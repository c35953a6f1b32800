//! Corpus ingestion and sentence-level gold construction.
//!
//! Corpora arrive pre-sentencized as JSONL, one document per line:
//!
//! ```json
//! {"doc_id": "d1", "genre": "journalistic", "sentences": ["...", "..."],
//!  "segments": [{"start": 0, "end": 12, "mode": "labeled", "category": "fear", "annotator": "a1"}]}
//! ```
//!
//! Segment offsets are character offsets into the sentences joined by a single
//! space. A document without a `segments` key has no gold annotation; an empty
//! list means "annotated, nothing emotional".

mod split;
mod stats;

pub use split::{assign_groups, fraction_error, grouped_split, load_split, SplitAssignment, SplitFractions, Subset};
pub use stats::{corpus_stats, CorpusStats, LabelShare, SubsetStats};

use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::labels::{compose_vector, Category, LabelVector, Mode};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate doc_id `{doc_id}`")]
    DuplicateDocId { doc_id: String, line: usize },
    #[error("document `{doc_id}`: segment [{start}, {end}) outside text of {len} characters")]
    OffsetOutOfRange {
        doc_id: String,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("document `{doc_id}`: segment belongs to document `{other}`")]
    ForeignSegment { doc_id: String, other: String },
    #[error("sentence index {index} out of range for document with {len} sentences")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("corpus has no documents")]
    EmptyCorpus,
    #[error("sentence `{0}` has no gold annotation")]
    MissingGold(String),
    #[error("invalid split fractions: {0}")]
    InvalidFractions(String),
    #[error("split: {0}")]
    InvalidSplit(String),
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Genre {
    Journalistic,
    Encyclopedic,
    Novel,
}

impl Genre {
    pub const ALL: [Genre; 3] = [Genre::Journalistic, Genre::Encyclopedic, Genre::Novel];

    pub fn name(self) -> &'static str {
        match self {
            Genre::Journalistic => "journalistic",
            Genre::Encyclopedic => "encyclopedic",
            Genre::Novel => "novel",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sentence {
    pub sent_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<LabelVector>,
}

impl Sentence {
    pub fn new(sent_id: impl Into<String>, text: impl Into<String>) -> Self {
        Sentence {
            sent_id: sent_id.into(),
            text: text.into(),
            gold: None,
        }
    }

    /// Number of maximal non-whitespace runs.
    pub fn word_count(&self) -> usize {
        self.text.split_whitespace().count()
    }
}

/// Identifier of the `index`-th sentence of a document.
pub fn sentence_id(doc_id: &str, index: usize) -> String {
    format!("{doc_id}:{index}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub doc_id: String,
    pub genre: Genre,
    pub sentences: Vec<Sentence>,
}

impl Document {
    /// Builds a document, assigning sentence ids `doc_id:0`, `doc_id:1`, ...
    pub fn new<S: Into<String>>(doc_id: impl Into<String>, genre: Genre, texts: impl IntoIterator<Item = S>) -> Self {
        let doc_id = doc_id.into();
        let sentences = texts
            .into_iter()
            .enumerate()
            .map(|(i, t)| Sentence::new(sentence_id(&doc_id, i), t))
            .collect();
        Document {
            doc_id,
            genre,
            sentences,
        }
    }

    /// Character spans `[start, end)` of each sentence in the space-joined text.
    pub fn sentence_spans(&self) -> Vec<(usize, usize)> {
        let mut spans = Vec::with_capacity(self.sentences.len());
        let mut pos = 0;
        for s in &self.sentences {
            let len = s.text.chars().count();
            spans.push((pos, pos + len));
            pos += len + 1;
        }
        spans
    }

    /// Length in characters of the space-joined text.
    pub fn text_len(&self) -> usize {
        self.sentence_spans().last().map_or(0, |&(_, end)| end)
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Sentence::word_count).sum()
    }
}

/// An expert-annotated emotional unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentAnnotation {
    pub doc_id: String,
    pub char_start: usize,
    pub char_end: usize,
    pub mode: Mode,
    pub category: Category,
    pub annotator_id: String,
}

/// A target sentence with its neighbours in the same document.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextTriple {
    pub previous: Option<String>,
    pub target: Sentence,
    pub next: Option<String>,
}

impl ContextTriple {
    pub fn new(previous: Option<&str>, target: Sentence, next: Option<&str>) -> Self {
        ContextTriple {
            previous: previous.map(str::to_string),
            target,
            next: next.map(str::to_string),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Self {
        Corpus { documents }
    }

    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.documents.iter().flat_map(|d| d.sentences.iter())
    }

    pub fn document(&self, doc_id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }

    pub fn num_texts(&self) -> usize {
        self.documents.len()
    }

    pub fn num_sentences(&self) -> usize {
        self.documents.iter().map(|d| d.sentences.len()).sum()
    }

    pub fn num_words(&self) -> usize {
        self.documents.iter().map(Document::word_count).sum()
    }

    /// Documents assigned to `subset`, in corpus order.
    pub fn subset<'a>(&'a self, split: &'a SplitAssignment, subset: Subset) -> impl Iterator<Item = &'a Document> {
        self.documents
            .iter()
            .filter(move |d| split.assignment.get(&d.doc_id) == Some(&subset))
    }

    /// Context triples for every sentence of the given documents.
    pub fn contexts<'a, I>(docs: I) -> Vec<ContextTriple>
    where
        I: IntoIterator<Item = &'a Document>,
    {
        docs.into_iter()
            .flat_map(|d| (0..d.sentences.len()).map(move |i| build_context(d, i).expect("index in range")))
            .collect()
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentRecord {
    doc_id: String,
    genre: Genre,
    sentences: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    segments: Option<Vec<SegmentRecord>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentRecord {
    start: usize,
    end: usize,
    mode: Mode,
    category: Category,
    annotator: String,
}

/// Reads a corpus JSONL file, merging segment annotations into sentence gold
/// vectors.
pub fn ingest_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let file = File::open(path)?;
    read_corpus(BufReader::new(file))
}

pub fn read_corpus<R: BufRead>(reader: R) -> Result<Corpus> {
    let mut seen = HashSet::new();
    let mut documents = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| CorpusError::Parse {
            line: line_no,
            message,
        };
        let record: DocumentRecord = serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        if !seen.insert(record.doc_id.clone()) {
            return Err(CorpusError::DuplicateDocId {
                doc_id: record.doc_id,
                line: line_no,
            });
        }
        if record.sentences.is_empty() {
            return Err(parse_err(format!("document `{}` has no sentences", record.doc_id)));
        }
        if let Some(k) = record.sentences.iter().position(|s| s.trim().is_empty()) {
            return Err(parse_err(format!("document `{}`: sentence {k} is empty", record.doc_id)));
        }
        let doc = Document::new(record.doc_id.clone(), record.genre, record.sentences);
        let doc = match record.segments {
            None => doc,
            Some(segs) => {
                let segs: Vec<SegmentAnnotation> = segs
                    .into_iter()
                    .map(|s| {
                        if s.start >= s.end {
                            return Err(parse_err(format!(
                                "segment start {} must be below end {}",
                                s.start, s.end
                            )));
                        }
                        Ok(SegmentAnnotation {
                            doc_id: record.doc_id.clone(),
                            char_start: s.start,
                            char_end: s.end,
                            mode: s.mode,
                            category: s.category,
                            annotator_id: s.annotator,
                        })
                    })
                    .collect::<Result<_>>()?;
                merge_segments(doc, &segs)?
            }
        };
        documents.push(doc);
    }
    Ok(Corpus { documents })
}

/// Writes documents back as corpus JSONL. Gold vectors are not representable
/// in this format and are dropped; use [`write_corpus_with_segments`] to keep
/// annotations.
pub fn write_corpus<W: Write>(corpus: &Corpus, mut out: W) -> Result<()> {
    for d in &corpus.documents {
        let record = DocumentRecord {
            doc_id: d.doc_id.clone(),
            genre: d.genre,
            sentences: d.sentences.iter().map(|s| s.text.clone()).collect(),
            segments: None,
        };
        serde_json::to_writer(&mut out, &record).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Writes documents with explicit segments (one list per document, aligned
/// with `corpus.documents`).
pub fn write_corpus_with_segments<W: Write>(
    corpus: &Corpus,
    segments: &[Vec<SegmentAnnotation>],
    mut out: W,
) -> Result<()> {
    for (d, segs) in corpus.documents.iter().zip(segments) {
        let record = DocumentRecord {
            doc_id: d.doc_id.clone(),
            genre: d.genre,
            sentences: d.sentences.iter().map(|s| s.text.clone()).collect(),
            segments: Some(
                segs.iter()
                    .map(|s| SegmentRecord {
                        start: s.char_start,
                        end: s.char_end,
                        mode: s.mode,
                        category: s.category,
                        annotator: s.annotator_id.clone(),
                    })
                    .collect(),
            ),
        };
        serde_json::to_writer(&mut out, &record).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Fills each sentence's gold vector from the segments overlapping it. A
/// segment spanning several sentences contributes to all of them; sentences
/// without segments get the empty vector.
pub fn merge_segments(mut doc: Document, segs: &[SegmentAnnotation]) -> Result<Document> {
    let spans = doc.sentence_spans();
    let len = doc.text_len();
    let mut modes: Vec<BTreeSet<Mode>> = vec![BTreeSet::new(); spans.len()];
    let mut cats: Vec<BTreeSet<Category>> = vec![BTreeSet::new(); spans.len()];
    for seg in segs {
        if seg.doc_id != doc.doc_id {
            return Err(CorpusError::ForeignSegment {
                doc_id: doc.doc_id.clone(),
                other: seg.doc_id.clone(),
            });
        }
        if seg.char_start >= seg.char_end || seg.char_end > len {
            return Err(CorpusError::OffsetOutOfRange {
                doc_id: doc.doc_id.clone(),
                start: seg.char_start,
                end: seg.char_end,
                len,
            });
        }
        for (i, &(start, end)) in spans.iter().enumerate() {
            if seg.char_start < end && start < seg.char_end {
                modes[i].insert(seg.mode);
                cats[i].insert(seg.category);
            }
        }
    }
    for ((sentence, m), c) in doc.sentences.iter_mut().zip(modes).zip(cats) {
        sentence.gold = Some(compose_vector(m, c));
    }
    Ok(doc)
}

/// The sentence at `index` with its previous and next sentences.
pub fn build_context(doc: &Document, index: usize) -> Result<ContextTriple> {
    let n = doc.sentences.len();
    if index >= n {
        return Err(CorpusError::IndexOutOfRange { index, len: n });
    }
    let previous = index.checked_sub(1).map(|i| doc.sentences[i].text.clone());
    let next = doc.sentences.get(index + 1).map(|s| s.text.clone());
    Ok(ContextTriple {
        previous,
        target: doc.sentences[index].clone(),
        next,
    })
}
