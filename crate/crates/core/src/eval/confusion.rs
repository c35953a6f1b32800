use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{check_len, Result};
use crate::labels::{LabelVector, Task};

/// Row and column name for "no label of the task".
pub const NONE: &str = "none";

/// Gold rows by predicted columns for one task, last row/column `none`.
///
/// Each sentence contributes one unit per gold label of the task (or one unit
/// to the `none` row when it has none). That unit is split evenly over the
/// sentence's predicted labels of the task, or goes to the `none` column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub task: Task,
    pub labels: Vec<String>,
    /// `counts[gold][pred]`.
    pub counts: Vec<Vec<f64>>,
}

impl ConfusionMatrix {
    pub fn get(&self, gold: &str, pred: &str) -> Option<f64> {
        let r = self.labels.iter().position(|l| l == gold)?;
        let c = self.labels.iter().position(|l| l == pred)?;
        Some(self.counts[r][c])
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().flatten().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("gold\\pred");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(&self.counts) {
            out.push_str(l);
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_table(&self) -> String {
        let width = self.labels.iter().map(String::len).max().unwrap_or(4).max(6) + 2;
        let mut out = format!("# task {}\n{:<width$}", self.task.name(), "");
        for l in &self.labels {
            let _ = write!(out, "{l:>width$}");
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(&self.counts) {
            let _ = write!(out, "{l:<width$}");
            for v in row {
                let _ = write!(out, "{v:>width$.2}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn confusion_matrix(task: Task, gold: &[LabelVector], pred: &[LabelVector]) -> Result<ConfusionMatrix> {
    check_len(gold, pred)?;
    let task_labels = task.labels();
    let k = task_labels.len();
    let mut counts = vec![vec![0.0; k + 1]; k + 1];
    for (g, p) in gold.iter().zip(pred) {
        let mut rows: Vec<usize> = (0..k).filter(|&i| g.get(task_labels[i])).collect();
        let mut cols: Vec<usize> = (0..k).filter(|&i| p.get(task_labels[i])).collect();
        if rows.is_empty() {
            rows.push(k);
        }
        if cols.is_empty() {
            cols.push(k);
        }
        let share = 1.0 / cols.len() as f64;
        for &r in &rows {
            for &c in &cols {
                counts[r][c] += share;
            }
        }
    }
    let mut labels: Vec<String> = task_labels.iter().map(|l| l.name().to_string()).collect();
    labels.push(NONE.to_string());
    Ok(ConfusionMatrix { task, labels, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::Label;

    #[test]
    fn diagonal_for_exact_single_label() {
        let gold = vec![
            LabelVector::from_labels([Label::Joy]),
            LabelVector::from_labels([Label::Fear]),
            LabelVector::EMPTY,
        ];
        let m = confusion_matrix(Task::D, &gold, &gold).unwrap();
        for (r, row) in m.counts.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                if r != c {
                    assert_eq!(*v, 0.0);
                }
            }
        }
        assert_eq!(m.get("joy", "joy"), Some(1.0));
        assert_eq!(m.get(NONE, NONE), Some(1.0));
    }

    #[test]
    fn all_false_predictions_go_to_none() {
        let gold = vec![
            LabelVector::from_labels([Label::Joy, Label::Anger]),
            LabelVector::from_labels([Label::Fear]),
        ];
        let m = confusion_matrix(Task::D, &gold, &[LabelVector::EMPTY; 2]).unwrap();
        let none = m.labels.len() - 1;
        let in_none: f64 = m.counts.iter().map(|r| r[none]).sum();
        assert_eq!(in_none, 3.0);
        assert_eq!(m.total(), 3.0);
    }

    #[test]
    fn hand_counted_modes() {
        use Label::*;
        let v = |ls: &[Label]| LabelVector::from_labels(ls.iter().copied());
        // rows: gold, cols: predicted
        let gold = vec![
            v(&[Labeled]),
            v(&[Labeled, Behavioral]),
            v(&[Suggested]),
            v(&[]),
            v(&[Displayed]),
        ];
        let pred = vec![
            v(&[Labeled, Suggested]),
            v(&[Behavioral]),
            v(&[]),
            v(&[Displayed]),
            v(&[Displayed, Labeled, Behavioral, Suggested]),
        ];
        let m = confusion_matrix(Task::B, &gold, &pred).unwrap();
        // s1: labeled -> labeled 0.5, suggested 0.5
        // s2: labeled -> behavioral 1, behavioral -> behavioral 1
        // s3: suggested -> none 1
        // s4: none -> displayed 1
        // s5: displayed -> each of 4 modes 0.25
        let expect = [
            ("labeled", "labeled", 0.5),
            ("labeled", "suggested", 0.5),
            ("labeled", "behavioral", 1.0),
            ("behavioral", "behavioral", 1.0),
            ("suggested", "none", 1.0),
            ("none", "displayed", 1.0),
            ("displayed", "displayed", 0.25),
            ("displayed", "labeled", 0.25),
            ("displayed", "behavioral", 0.25),
            ("displayed", "suggested", 0.25),
        ];
        let mut sum = 0.0;
        for (g, p, want) in expect {
            assert_eq!(m.get(g, p), Some(want), "{g} -> {p}");
            sum += want;
        }
        assert_eq!(m.total(), sum);
        assert_eq!(m.total(), 6.0);
        assert!(m.to_csv().starts_with("gold\\pred,behavioral,labeled,displayed,suggested,none\n"));
    }
}
