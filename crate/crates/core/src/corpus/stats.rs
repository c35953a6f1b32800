//! Corpus size and label distribution tables.

use std::fmt::Write as _;

use serde::Serialize;

use super::{Corpus, CorpusError, Document, Genre, Result, SplitAssignment, Subset};
use crate::labels::{Label, Mode, NUM_LABELS};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelShare {
    pub label: Label,
    pub count: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetStats {
    /// `all`, `train`, `dev` or `test`.
    pub name: String,
    pub texts: usize,
    pub sentences: usize,
    pub words: usize,
    /// Percentage of this subset's sentences in each genre.
    pub genre_percent: Vec<(Genre, f64)>,
    pub labels: Vec<LabelShare>,
}

impl SubsetStats {
    pub fn percent(&self, label: Label) -> f64 {
        self.labels[label.index()].percent
    }

    /// Sum of the four mode percentages.
    pub fn mode_percent_sum(&self) -> f64 {
        Mode::ALL.iter().map(|m| self.percent(m.label())).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub subsets: Vec<SubsetStats>,
}

impl CorpusStats {
    pub fn get(&self, name: &str) -> Option<&SubsetStats> {
        self.subsets.iter().find(|s| s.name == name)
    }

    /// Plain-text table: one row per label, one column per subset.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<14}", "");
        for s in &self.subsets {
            let _ = write!(out, "{:>10}", s.name);
        }
        out.push('\n');
        let rows = [
            ("texts", self.subsets.iter().map(|s| s.texts).collect::<Vec<_>>()),
            ("sentences", self.subsets.iter().map(|s| s.sentences).collect()),
            ("words", self.subsets.iter().map(|s| s.words).collect()),
        ];
        for (name, values) in rows {
            let _ = write!(out, "{name:<14}");
            for v in values {
                let _ = write!(out, "{v:>10}");
            }
            out.push('\n');
        }
        for g in Genre::ALL {
            let _ = write!(out, "{:<14}", format!("% {}", g.name()));
            for s in &self.subsets {
                let p = s.genre_percent.iter().find(|(x, _)| *x == g).map_or(0.0, |(_, p)| *p);
                let _ = write!(out, "{p:>10.1}");
            }
            out.push('\n');
        }
        for l in Label::ALL {
            let _ = write!(out, "{:<14}", l.name());
            for s in &self.subsets {
                let _ = write!(out, "{:>10.1}", s.percent(l));
            }
            out.push('\n');
        }
        out
    }
}

fn subset_stats<'a>(name: &str, docs: impl Iterator<Item = &'a Document>) -> Result<SubsetStats> {
    let mut texts = 0;
    let mut sentences = 0;
    let mut words = 0;
    let mut counts = [0usize; NUM_LABELS];
    let mut genre_counts = [0usize; 3];
    for d in docs {
        texts += 1;
        sentences += d.sentences.len();
        words += d.word_count();
        genre_counts[Genre::ALL.iter().position(|g| *g == d.genre).unwrap()] += d.sentences.len();
        for s in &d.sentences {
            let gold = s.gold.ok_or_else(|| CorpusError::MissingGold(s.sent_id.clone()))?;
            for l in gold.labels() {
                counts[l.index()] += 1;
            }
        }
    }
    let pct = |c: usize| if sentences == 0 { 0.0 } else { 100.0 * c as f64 / sentences as f64 };
    Ok(SubsetStats {
        name: name.to_string(),
        texts,
        sentences,
        words,
        genre_percent: Genre::ALL.iter().zip(genre_counts).map(|(g, c)| (*g, pct(c))).collect(),
        labels: Label::ALL
            .iter()
            .map(|&label| LabelShare {
                label,
                count: counts[label.index()],
                percent: pct(counts[label.index()]),
            })
            .collect(),
    })
}

/// Counts and per-label sentence percentages for the whole corpus and, when a
/// split is given, for each subset.
pub fn corpus_stats(corpus: &Corpus, split: Option<&SplitAssignment>) -> Result<CorpusStats> {
    let mut subsets = vec![subset_stats("all", corpus.documents.iter())?];
    if let Some(split) = split {
        split.check_covers(corpus)?;
        for s in Subset::ALL {
            subsets.push(subset_stats(s.name(), corpus.subset(split, s))?);
        }
    }
    Ok(CorpusStats { subsets })
}
