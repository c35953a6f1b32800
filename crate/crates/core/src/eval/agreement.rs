use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::{EvalError, Result};

/// Who proposed the label an expert judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Human,
    Model,
    Both,
}

impl Source {
    pub const ALL: [Source; 3] = [Source::Human, Source::Model, Source::Both];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Judgment {
    pub source: Source,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementRow {
    pub source: Source,
    pub judged: usize,
    pub agreed: usize,
    /// Percentage of agreeing judgments; `None` without judgments.
    pub percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementTable {
    pub rows: Vec<AgreementRow>,
}

impl AgreementTable {
    pub fn get(&self, source: Source) -> &AgreementRow {
        self.rows.iter().find(|r| r.source == source).expect("one row per source")
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{:<8}{:>8}{:>8}{:>10}\n", "source", "judged", "agreed", "agree %");
        for r in &self.rows {
            let pct = r.percent.map_or("-".to_string(), |p| format!("{p:.1}"));
            let name = serde_json::to_value(r.source).unwrap();
            out.push_str(&format!("{:<8}{:>8}{:>8}{:>10}\n", name.as_str().unwrap(), r.judged, r.agreed, pct));
        }
        out
    }
}

pub fn expert_agreement_rate(judgments: &[Judgment]) -> Result<AgreementTable> {
    if judgments.is_empty() {
        return Err(EvalError::Empty);
    }
    let rows = Source::ALL
        .iter()
        .map(|&source| {
            let judged = judgments.iter().filter(|j| j.source == source).count();
            let agreed = judgments.iter().filter(|j| j.source == source && j.agree).count();
            AgreementRow {
                source,
                judged,
                agreed,
                percent: (judged > 0).then(|| 100.0 * agreed as f64 / judged as f64),
            }
        })
        .collect();
    Ok(AgreementTable { rows })
}

/// JSONL rows `{"source": "human"|"model"|"both", "agree": bool}`.
pub fn read_judgments<R: BufRead>(reader: R) -> Result<Vec<Judgment>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| EvalError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}
