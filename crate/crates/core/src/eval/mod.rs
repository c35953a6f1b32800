//! Evaluation: per-label precision/recall/F1, confusion matrices, Cohen's
//! kappa, mode/category cross tables, expert agreement and polarity scores.
//!
//! Conventions: precision is 0 when nothing is predicted positive, recall is 0
//! when there is no gold positive, and F1 is 0 when P + R = 0. Task averages
//! are unweighted means over the task's labels.

mod agreement;
mod confusion;
mod cross;
mod kappa;

pub use agreement::{expert_agreement_rate, read_judgments, AgreementRow, AgreementTable, Judgment, Source};
pub use confusion::{confusion_matrix, ConfusionMatrix, NONE};
pub use cross::{cooccurrence, cross_f1, CrossDirection, CrossTable};
pub use kappa::{cohen_kappa, kappa_per_label};

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::labels::{Label, LabelVector, Task};
use crate::lexicons::Polarity;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("gold and predictions cover different sentences: {0}")]
    MisalignedSets(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("no items to evaluate")]
    Empty,
    #[error("no gold sentence carries `{0}`")]
    EmptySubset(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = EvalError> = std::result::Result<T, E>;

/// True/false positive and false negative counts of one binary label.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Counts {
    pub fn from_pairs<I: IntoIterator<Item = (bool, bool)>>(pairs: I) -> Self {
        let mut c = Counts::default();
        for (g, p) in pairs {
            match (g, p) {
                (true, true) => c.tp += 1,
                (false, true) => c.fp += 1,
                (true, false) => c.fn_ += 1,
                (false, false) => {}
            }
        }
        c
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    pub fn support(&self) -> usize {
        self.tp + self.fn_
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
    pub counts: Counts,
}

impl LabelMetrics {
    pub fn new(label: impl Into<String>, counts: Counts) -> Self {
        LabelMetrics {
            label: label.into(),
            precision: counts.precision(),
            recall: counts.recall(),
            f1: counts.f1(),
            support: counts.support(),
            counts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAverage {
    pub group: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annotator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    /// Gold label the evaluated sentences were filtered on.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
    pub sentences: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub meta: ReportMeta,
    pub labels: Vec<LabelMetrics>,
    pub averages: Vec<GroupAverage>,
}

impl MetricsReport {
    pub fn get(&self, label: &str) -> Option<&LabelMetrics> {
        self.labels.iter().find(|l| l.label == label)
    }

    pub fn average(&self, group: &str) -> Option<&GroupAverage> {
        self.averages.iter().find(|a| a.group == group)
    }

    pub fn with_meta(mut self, annotator: Option<&str>, split: Option<&str>, config_hash: Option<&str>) -> Self {
        self.meta.annotator = annotator.map(str::to_string);
        self.meta.split = split.map(str::to_string);
        self.meta.config_hash = config_hash.map(str::to_string);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Aligned text table: one row per label, then one per average.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let mut header = Vec::new();
        if let Some(a) = &self.meta.annotator {
            header.push(format!("annotator={a}"));
        }
        if let Some(s) = &self.meta.split {
            header.push(format!("split={s}"));
        }
        if let Some(c) = &self.meta.condition {
            header.push(format!("condition={c}"));
        }
        header.push(format!("sentences={}", self.meta.sentences));
        let _ = writeln!(out, "# {}", header.join(" "));
        let _ = writeln!(out, "{:<16}{:>8}{:>8}{:>8}{:>9}", "label", "P", "R", "F1", "support");
        for l in &self.labels {
            let _ = writeln!(
                out,
                "{:<16}{:>8.3}{:>8.3}{:>8.3}{:>9}",
                l.label, l.precision, l.recall, l.f1, l.support
            );
        }
        for a in &self.averages {
            let _ = writeln!(
                out,
                "{:<16}{:>8.3}{:>8.3}{:>8.3}",
                format!("macro {}", a.group),
                a.precision,
                a.recall,
                a.f1
            );
        }
        out
    }
}

fn check_len<A, B>(a: &[A], b: &[B]) -> Result<()> {
    if a.len() != b.len() {
        return Err(EvalError::MisalignedSets(format!("{} gold vs {} predicted", a.len(), b.len())));
    }
    Ok(())
}

fn average(group: &str, labels: &[LabelMetrics]) -> GroupAverage {
    let n = labels.len().max(1) as f64;
    GroupAverage {
        group: group.to_string(),
        precision: labels.iter().map(|l| l.precision).sum::<f64>() / n,
        recall: labels.iter().map(|l| l.recall).sum::<f64>() / n,
        f1: labels.iter().map(|l| l.f1).sum::<f64>() / n,
    }
}

fn report_for_tasks(gold: &[LabelVector], pred: &[LabelVector], tasks: &[Task]) -> MetricsReport {
    let mut labels = Vec::new();
    let mut averages = Vec::new();
    for &task in tasks {
        let start = labels.len();
        for &label in task.labels() {
            let counts = Counts::from_pairs(gold.iter().zip(pred).map(|(g, p)| (g.get(label), p.get(label))));
            labels.push(LabelMetrics::new(label.name(), counts));
        }
        averages.push(average(task.name(), &labels[start..]));
    }
    MetricsReport {
        meta: ReportMeta {
            sentences: gold.len(),
            ..Default::default()
        },
        labels,
        averages,
    }
}

/// Per-label metrics over the 19 labels plus macro averages for tasks A-D.
pub fn prf1(gold: &[LabelVector], pred: &[LabelVector]) -> Result<MetricsReport> {
    check_len(gold, pred)?;
    Ok(report_for_tasks(gold, pred, &Task::ALL))
}

/// Metrics for `task` restricted to sentences whose gold vector sets
/// `condition`.
pub fn conditional_metrics(
    gold: &[LabelVector],
    pred: &[LabelVector],
    condition: Label,
    task: Task,
) -> Result<MetricsReport> {
    check_len(gold, pred)?;
    let (g, p): (Vec<LabelVector>, Vec<LabelVector>) =
        gold.iter().zip(pred).filter(|(g, _)| g.get(condition)).map(|(g, p)| (*g, *p)).unzip();
    if g.is_empty() {
        return Err(EvalError::EmptySubset(condition.name().to_string()));
    }
    let mut report = report_for_tasks(&g, &p, &[task]);
    report.meta.condition = Some(condition.name().to_string());
    Ok(report)
}

/// Pairs gold and predicted vectors by sentence id, in gold order. Both sides
/// must cover exactly the same sentences.
pub fn align<'a>(
    gold: impl IntoIterator<Item = (&'a str, LabelVector)>,
    pred: &BTreeMap<String, LabelVector>,
) -> Result<(Vec<String>, Vec<LabelVector>, Vec<LabelVector>)> {
    let mut ids = Vec::new();
    let mut g = Vec::new();
    let mut p = Vec::new();
    let mut seen = HashSet::new();
    for (id, v) in gold {
        let pv = pred
            .get(id)
            .ok_or_else(|| EvalError::MisalignedSets(format!("no prediction for `{id}`")))?;
        seen.insert(id.to_string());
        ids.push(id.to_string());
        g.push(v);
        p.push(*pv);
    }
    if let Some(extra) = pred.keys().find(|k| !seen.contains(*k)) {
        return Err(EvalError::MisalignedSets(format!("prediction for unknown sentence `{extra}`")));
    }
    Ok((ids, g, p))
}

/// P/R/F1 of the positive and negative classes; neutral counts as a miss for
/// both.
pub fn polarity_metrics(gold: &[Polarity], pred: &[Polarity]) -> Result<MetricsReport> {
    check_len(gold, pred)?;
    let labels: Vec<LabelMetrics> = [Polarity::Positive, Polarity::Negative]
        .iter()
        .map(|&class| {
            let counts = Counts::from_pairs(gold.iter().zip(pred).map(|(g, p)| (*g == class, *p == class)));
            LabelMetrics::new(class.name(), counts)
        })
        .collect();
    let averages = vec![average("polarity", &labels)];
    Ok(MetricsReport {
        meta: ReportMeta {
            sentences: gold.len(),
            ..Default::default()
        },
        labels,
        averages,
    })
}
