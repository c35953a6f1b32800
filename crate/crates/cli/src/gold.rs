//! Sentence-level gold file written by `prepare`:
//! `{"sent_id": str, "doc_id": str, "text": str, "gold": [19 x 0|1]}` per line.

use std::collections::HashSet;
use std::io::{BufRead, Write};
use std::path::Path;

use emomodes::corpus::{Corpus, CorpusError, SplitAssignment};
use emomodes::LabelVector;
use serde::{Deserialize, Serialize};

use crate::args::SubsetArg;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldRecord {
    pub sent_id: String,
    pub doc_id: String,
    pub text: String,
    pub gold: LabelVector,
}

pub fn records(corpus: &Corpus) -> Result<Vec<GoldRecord>> {
    let mut out = Vec::new();
    for d in &corpus.documents {
        for s in &d.sentences {
            let gold = s.gold.ok_or_else(|| CorpusError::MissingGold(s.sent_id.clone()))?;
            out.push(GoldRecord {
                sent_id: s.sent_id.clone(),
                doc_id: d.doc_id.clone(),
                text: s.text.clone(),
                gold,
            });
        }
    }
    Ok(out)
}

pub fn write<W: Write>(records: &[GoldRecord], mut w: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn load(path: &Path) -> Result<Vec<GoldRecord>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::from(e).context(path.display()))?;
    read(std::io::BufReader::new(file)).map_err(|e| e.context(path.display()))
}

pub fn read<R: BufRead>(reader: R) -> Result<Vec<GoldRecord>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: GoldRecord =
            serde_json::from_str(&line).map_err(|e| CliError::validation(format!("line {}: {e}", i + 1)))?;
        if !seen.insert(r.sent_id.clone()) {
            return Err(CliError::validation(format!("line {}: duplicate sentence `{}`", i + 1, r.sent_id)));
        }
        out.push(r);
    }
    Ok(out)
}

/// Keeps the records of one subset of `split`.
pub fn restrict(records: Vec<GoldRecord>, split: &SplitAssignment, subset: SubsetArg) -> Result<Vec<GoldRecord>> {
    let Some(want) = crate::commands::subset_of(subset) else {
        return Ok(records);
    };
    let mut out = Vec::new();
    for r in records {
        match split.subset_of(&r.doc_id) {
            Some(s) if s == want => out.push(r),
            Some(_) => {}
            None => return Err(CliError::validation(format!("document `{}` is not in the split", r.doc_id))),
        }
    }
    Ok(out)
}
