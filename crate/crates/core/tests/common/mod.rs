#![allow(dead_code)]

pub mod oracles;

use std::path::PathBuf;

use emomodes::features::SparseVector;
use emomodes::{Label, LabelVector, NUM_LABELS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Every label has a dedicated indicator feature; extra noise features carry
/// small random counts.
pub fn separable_set(n: usize, seed: u64) -> (Vec<SparseVector>, Vec<LabelVector>) {
    let noise = 10;
    let dim = NUM_LABELS + noise;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let mut v = LabelVector::EMPTY;
        let mut entries = Vec::new();
        for label in Label::ALL {
            if rng.random_bool(0.3) {
                v.set(label, true);
                entries.push((label.index(), 1.0));
            }
        }
        for j in 0..noise {
            if rng.random_bool(0.2) {
                entries.push((NUM_LABELS + j, rng.random_range(1..3) as f64));
            }
        }
        x.push(SparseVector::new(dim, entries));
        y.push(v);
    }
    (x, y)
}

/// 1 positive `joy` sample per 99 negatives, with overlapping features.
pub fn imbalanced_set(seed: u64) -> (Vec<SparseVector>, Vec<LabelVector>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 6;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..400 {
        let positive = i % 100 == 0;
        let mut entries = Vec::new();
        for j in 0..dim {
            let p = if positive && j == 0 { 0.9 } else if j == 0 { 0.15 } else { 0.3 };
            if rng.random_bool(p) {
                entries.push((j, 1.0));
            }
        }
        x.push(SparseVector::new(dim, entries));
        y.push(if positive { LabelVector::from_labels([Label::Joy]) } else { LabelVector::EMPTY });
    }
    (x, y)
}

pub fn load_boosting_fixture() -> (Vec<SparseVector>, Vec<LabelVector>) {
    #[derive(serde::Deserialize)]
    struct Row {
        x: Vec<(usize, f64)>,
        y: Vec<u8>,
    }
    let text = std::fs::read_to_string(fixture("boosting_fixture.jsonl")).unwrap();
    text.lines()
        .map(|l| {
            let r: Row = serde_json::from_str(l).unwrap();
            let bits: Vec<bool> = r.y.iter().map(|&b| b == 1).collect();
            (SparseVector::new(12, r.x), LabelVector::from_bools(&bits).unwrap())
        })
        .unzip()
}

/// Counting oracle for training-set F1 of one label.
pub fn f1(gold: &[bool], pred: &[bool]) -> f64 {
    let tp = gold.iter().zip(pred).filter(|(g, p)| **g && **p).count() as f64;
    let fp = gold.iter().zip(pred).filter(|(g, p)| !**g && **p).count() as f64;
    let fn_ = gold.iter().zip(pred).filter(|(g, p)| **g && !**p).count() as f64;
    if tp == 0.0 {
        return if fp == 0.0 && fn_ == 0.0 { 1.0 } else { 0.0 };
    }
    2.0 * tp / (2.0 * tp + fp + fn_)
}
