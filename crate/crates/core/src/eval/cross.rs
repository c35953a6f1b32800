use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{check_len, Counts, Result};
use crate::labels::{Category, LabelVector, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossDirection {
    /// Share of sentences with the category that also carry the mode.
    Cooccurrence,
    /// F1 of the mode over sentences whose gold carries the category.
    ModeGivenCategory,
    /// F1 of the category over sentences whose gold carries the mode.
    CategoryGivenMode,
}

/// Modes by categories. `None` marks cells without support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossTable {
    pub direction: CrossDirection,
    pub modes: Vec<Mode>,
    pub categories: Vec<Category>,
    pub cells: Vec<Vec<Option<f64>>>,
}

impl CrossTable {
    pub fn get(&self, mode: Mode, category: Category) -> Option<f64> {
        let r = self.modes.iter().position(|m| *m == mode)?;
        let c = self.categories.iter().position(|x| *x == category)?;
        self.cells[r][c]
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("# {}\n{:<12}", serde_json::to_value(self.direction).unwrap().as_str().unwrap(), "");
        for c in &self.categories {
            let _ = write!(out, "{:>14}", c.name());
        }
        out.push('\n');
        for (m, row) in self.modes.iter().zip(&self.cells) {
            let _ = write!(out, "{:<12}", m.name());
            for cell in row {
                match cell {
                    Some(v) => {
                        let _ = write!(out, "{v:>14.3}");
                    }
                    None => {
                        let _ = write!(out, "{:>14}", "-");
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

fn table(direction: CrossDirection, cell: impl Fn(Mode, Category) -> Option<f64>) -> CrossTable {
    CrossTable {
        direction,
        modes: Mode::ALL.to_vec(),
        categories: Category::ALL.to_vec(),
        cells: Mode::ALL
            .iter()
            .map(|&m| Category::ALL.iter().map(|&c| cell(m, c)).collect())
            .collect(),
    }
}

/// `|sentences with m and c| / |sentences with c|`, undefined for categories
/// absent from the gold set.
pub fn cooccurrence(gold: &[LabelVector]) -> CrossTable {
    table(CrossDirection::Cooccurrence, |m, c| {
        let with_c = gold.iter().filter(|v| v.get(c.label())).count();
        let both = gold.iter().filter(|v| v.get(c.label()) && v.get(m.label())).count();
        (with_c > 0).then(|| both as f64 / with_c as f64)
    })
}

/// Conditional F1 tables. A cell is undefined when the conditioning subset is
/// empty or the evaluated label has no gold positive in it.
pub fn cross_f1(gold: &[LabelVector], pred: &[LabelVector], direction: CrossDirection) -> Result<CrossTable> {
    check_len(gold, pred)?;
    let f1 = |condition: crate::labels::Label, target: crate::labels::Label| {
        let counts = Counts::from_pairs(
            gold.iter()
                .zip(pred)
                .filter(|(g, _)| g.get(condition))
                .map(|(g, p)| (g.get(target), p.get(target))),
        );
        (counts.support() > 0).then(|| counts.f1())
    };
    Ok(match direction {
        CrossDirection::Cooccurrence => cooccurrence(gold),
        CrossDirection::ModeGivenCategory => table(direction, |m, c| f1(c.label(), m.label())),
        CrossDirection::CategoryGivenMode => table(direction, |m, c| f1(m.label(), c.label())),
    })
}
