//! Document-grouped train/dev/test split.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Corpus, CorpusError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subset {
    Train,
    Dev,
    Test,
}

impl Subset {
    pub const ALL: [Subset; 3] = [Subset::Train, Subset::Dev, Subset::Test];

    pub fn name(self) -> &'static str {
        match self {
            Subset::Train => "train",
            Subset::Dev => "dev",
            Subset::Test => "test",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl std::str::FromStr for Subset {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Subset::Train),
            "dev" => Ok(Subset::Dev),
            "test" => Ok(Subset::Test),
            _ => Err(CorpusError::InvalidSplit(format!("unknown subset `{s}`"))),
        }
    }
}

/// Target sentence fractions for train, dev and test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitFractions {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        SplitFractions {
            train: 0.70,
            dev: 0.10,
            test: 0.20,
        }
    }
}

impl SplitFractions {
    pub fn new(train: f64, dev: f64, test: f64) -> Result<Self> {
        let f = SplitFractions { train, dev, test };
        f.check()?;
        Ok(f)
    }

    fn check(&self) -> Result<()> {
        let all = self.as_array();
        if all.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err(CorpusError::InvalidFractions(format!("{all:?} must all be positive")));
        }
        let sum: f64 = all.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(CorpusError::InvalidFractions(format!("{all:?} sum to {sum}, not 1")));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.train, self.dev, self.test]
    }
}

/// Whole-document subset assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitAssignment {
    pub seed: u64,
    pub assignment: BTreeMap<String, Subset>,
}

impl SplitAssignment {
    /// Errors unless every corpus document is assigned and no unknown
    /// document is.
    pub fn check_covers(&self, corpus: &Corpus) -> Result<()> {
        for d in &corpus.documents {
            if !self.assignment.contains_key(&d.doc_id) {
                return Err(CorpusError::InvalidSplit(format!("document `{}` is unassigned", d.doc_id)));
            }
        }
        if self.assignment.len() != corpus.documents.len() {
            let known: std::collections::HashSet<_> = corpus.documents.iter().map(|d| d.doc_id.as_str()).collect();
            let stray = self.assignment.keys().find(|k| !known.contains(k.as_str())).cloned().unwrap_or_default();
            return Err(CorpusError::InvalidSplit(format!("unknown document `{stray}`")));
        }
        Ok(())
    }

    pub fn subset_of(&self, doc_id: &str) -> Option<Subset> {
        self.assignment.get(doc_id).copied()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("split serializes");
        s.push('\n');
        s
    }
}

pub fn load_split(path: impl AsRef<Path>) -> Result<SplitAssignment> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CorpusError::InvalidSplit(e.to_string()))
}

/// Assigns whole documents to subsets so that sentence fractions approach the
/// targets. Deterministic for a fixed seed.
pub fn grouped_split(corpus: &Corpus, fractions: SplitFractions, seed: u64) -> Result<SplitAssignment> {
    if corpus.documents.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let sizes: Vec<usize> = corpus.documents.iter().map(|d| d.sentences.len()).collect();
    let groups = assign_groups(&sizes, fractions, seed)?;
    let assignment = corpus
        .documents
        .iter()
        .zip(groups)
        .map(|(d, s)| (d.doc_id.clone(), s))
        .collect();
    Ok(SplitAssignment { seed, assignment })
}

/// Core of [`grouped_split`] over group sizes: seeded shuffle, greedy
/// assignment to the subset with the largest remaining sentence deficit, then
/// single-group moves and pairwise swaps while they strictly lower the summed
/// absolute fraction error.
pub fn assign_groups(sizes: &[usize], fractions: SplitFractions, seed: u64) -> Result<Vec<Subset>> {
    fractions.check()?;
    if sizes.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let targets = fractions.as_array();
    let total: usize = sizes.iter().sum();
    let total_f = total as f64;

    let mut order: Vec<usize> = (0..sizes.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut counts = [0usize; 3];
    let mut out = vec![Subset::Train; sizes.len()];
    for &g in &order {
        let mut best = 0;
        let mut best_deficit = f64::NEG_INFINITY;
        for k in 0..3 {
            let deficit = targets[k] * total_f - counts[k] as f64;
            if deficit > best_deficit {
                best_deficit = deficit;
                best = k;
            }
        }
        counts[best] += sizes[g];
        out[g] = Subset::ALL[best];
    }

    if total == 0 {
        return Ok(out);
    }
    let error = |c: &[usize; 3]| -> f64 {
        (0..3).map(|k| (c[k] as f64 / total_f - targets[k]).abs()).sum()
    };
    let mut current = error(&counts);
    loop {
        let mut improved = false;
        for &g in &order {
            let from = out[g].index();
            for to in 0..3 {
                if to == from {
                    continue;
                }
                let mut trial = counts;
                trial[from] -= sizes[g];
                trial[to] += sizes[g];
                let e = error(&trial);
                if e < current - 1e-12 {
                    counts = trial;
                    current = e;
                    out[g] = Subset::ALL[to];
                    improved = true;
                    break;
                }
            }
        }
        if improved {
            continue;
        }
        'swap: for (i, &g) in order.iter().enumerate() {
            for &h in &order[i + 1..] {
                let (a, b) = (out[g].index(), out[h].index());
                if a == b || sizes[g] == sizes[h] {
                    continue;
                }
                let mut trial = counts;
                trial[a] = trial[a] - sizes[g] + sizes[h];
                trial[b] = trial[b] - sizes[h] + sizes[g];
                let e = error(&trial);
                if e < current - 1e-12 {
                    counts = trial;
                    current = e;
                    out.swap(g, h);
                    improved = true;
                    break 'swap;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok(out)
}

/// Summed absolute difference between achieved and target sentence fractions.
pub fn fraction_error(sizes: &[usize], groups: &[Subset], fractions: SplitFractions) -> f64 {
    let total: usize = sizes.iter().sum();
    let mut counts = [0usize; 3];
    for (s, g) in sizes.iter().zip(groups) {
        counts[g.index()] += s;
    }
    let targets = fractions.as_array();
    (0..3)
        .map(|k| (counts[k] as f64 / total as f64 - targets[k]).abs())
        .sum()
}
