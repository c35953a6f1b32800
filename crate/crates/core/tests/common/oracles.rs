//! Brute-force counting oracles over label-name sets, written without the
//! crate's metric code.

use std::collections::{HashMap, HashSet};

use emomodes::{Category, Label, LabelVector, Mode};
use rand::Rng;

pub const TASK_A: &[&str] = &["emotional"];
pub const TASK_B: &[&str] = &["behavioral", "labeled", "displayed", "suggested"];
pub const TASK_C: &[&str] = &["basic", "complex"];
pub const TASK_D: &[&str] = &[
    "admiration",
    "other",
    "anger",
    "guilt",
    "disgust",
    "embarrassment",
    "pride",
    "jealousy",
    "joy",
    "fear",
    "surprise",
    "sadness",
];

pub type Names = HashSet<&'static str>;

pub fn names(v: &LabelVector) -> Names {
    let all = [TASK_A, TASK_B, TASK_C, TASK_D].concat();
    v.to_bools().iter().zip(all).filter(|(b, _)| **b).map(|(_, n)| n).collect()
}

/// Gold vectors derived from random (modes, categories) pairs, predictions
/// copy gold with random bit flips; 1 to 50 sentences.
pub fn random_fixture<R: Rng>(rng: &mut R) -> (Vec<LabelVector>, Vec<LabelVector>) {
    let n = rng.random_range(1..=50);
    let mut gold = Vec::with_capacity(n);
    let mut pred = Vec::with_capacity(n);
    for _ in 0..n {
        let g = if rng.random_bool(0.3) {
            LabelVector::EMPTY
        } else {
            let modes: Vec<Mode> = Mode::ALL.into_iter().filter(|_| rng.random_bool(0.35)).collect();
            let cats: Vec<Category> = Category::ALL.into_iter().filter(|_| rng.random_bool(0.15)).collect();
            emomodes::compose_vector(modes, cats)
        };
        let mut p = g;
        for label in Label::ALL {
            if rng.random_bool(0.12) {
                p.set(label, !p.get(label));
            }
        }
        gold.push(g);
        pred.push(p);
    }
    (gold, pred)
}

/// (precision, recall, f1, support) of one label.
pub fn label_prf(gold: &[Names], pred: &[Names], label: &str) -> (f64, f64, f64, usize) {
    let mut tp = 0usize;
    let mut predicted = 0usize;
    let mut actual = 0usize;
    for i in 0..gold.len() {
        let g = gold[i].contains(label);
        let p = pred[i].contains(label);
        if g && p {
            tp += 1;
        }
        if p {
            predicted += 1;
        }
        if g {
            actual += 1;
        }
    }
    let p = if predicted == 0 { 0.0 } else { tp as f64 / predicted as f64 };
    let r = if actual == 0 { 0.0 } else { tp as f64 / actual as f64 };
    let f = if tp == 0 {
        0.0
    } else {
        2.0 * tp as f64 / (predicted + actual) as f64
    };
    (p, r, f, actual)
}

/// Unweighted mean over the task's labels of (P, R, F1).
pub fn macro_prf(gold: &[Names], pred: &[Names], task: &[&str]) -> (f64, f64, f64) {
    let rows: Vec<_> = task.iter().map(|l| label_prf(gold, pred, l)).collect();
    let n = rows.len() as f64;
    (
        rows.iter().map(|r| r.0).sum::<f64>() / n,
        rows.iter().map(|r| r.1).sum::<f64>() / n,
        rows.iter().map(|r| r.2).sum::<f64>() / n,
    )
}

/// Confusion cells keyed by (gold, predicted) name, `none` for empty sides.
pub fn confusion(gold: &[Names], pred: &[Names], task: &[&'static str]) -> HashMap<(&'static str, &'static str), f64> {
    let mut cells = HashMap::new();
    for (g, p) in gold.iter().zip(pred) {
        let mut gs: Vec<&str> = task.iter().copied().filter(|l| g.contains(l)).collect();
        let mut ps: Vec<&str> = task.iter().copied().filter(|l| p.contains(l)).collect();
        if gs.is_empty() {
            gs.push("none");
        }
        if ps.is_empty() {
            ps.push("none");
        }
        for a in &gs {
            for b in &ps {
                *cells.entry((*a, *b)).or_insert(0.0) += 1.0 / ps.len() as f64;
            }
        }
    }
    cells
}

/// |S_mode ∩ S_cat| / |S_cat| over sentence-index sets.
pub fn cooccurrence(gold: &[Names], mode: &str, category: &str) -> Option<f64> {
    let with = |l: &str| -> HashSet<usize> { (0..gold.len()).filter(|&i| gold[i].contains(l)).collect() };
    let (sm, sc) = (with(mode), with(category));
    if sc.is_empty() {
        return None;
    }
    Some(sm.intersection(&sc).count() as f64 / sc.len() as f64)
}

/// Keeps sentences whose gold contains `condition`.
pub fn filter_on(gold: &[Names], pred: &[Names], condition: &str) -> (Vec<Names>, Vec<Names>) {
    gold.iter()
        .zip(pred)
        .filter(|(g, _)| g.contains(condition))
        .map(|(g, p)| (g.clone(), p.clone()))
        .unzip()
}

/// Kappa from the 2x2 table: 2(ad - bc) / ((a+b)(b+d) + (a+c)(c+d)).
pub fn kappa(x: &[bool], y: &[bool]) -> f64 {
    let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
    for (p, q) in x.iter().zip(y) {
        match (p, q) {
            (true, true) => a += 1.0,
            (true, false) => b += 1.0,
            (false, true) => c += 1.0,
            (false, false) => d += 1.0,
        }
    }
    let den = (a + b) * (b + d) + (a + c) * (c + d);
    if den == 0.0 {
        return 1.0;
    }
    2.0 * (a * d - b * c) / den
}
