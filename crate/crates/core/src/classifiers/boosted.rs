//! Gradient-boosted regression trees on the weighted logistic loss.
//!
//! Trees grow level by level with exact greedy splits. Feature columns are
//! kept sparse: absent entries are zeros and form one implicit bucket per
//! node, inserted at its place in the value order. A sample goes left when
//! `x[feature] <= threshold`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_inputs, sample_weights, sigmoid, Result, TrainConfig};
use crate::features::SparseVector;
use crate::labels::{Label, LabelVector, NUM_LABELS};

const MIN_GAIN: f64 = 1e-12;
const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// Regression tree rooted at node 0. Leaf values already include shrinkage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn eval(&self, x: &SparseVector) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { value } => return value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x.get(feature) <= threshold { left } else { right },
            }
        }
    }

    /// Number of split levels on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn go(nodes: &[TreeNode], i: usize) -> usize {
            match nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }

    fn scale_leaves(&mut self, factor: f64) {
        for n in &mut self.nodes {
            if let TreeNode::Leaf { value } = n {
                *value *= factor;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeEnsemble {
    pub dim: usize,
    pub shrinkage: f64,
    /// Initial margin per label: log-odds of the training base rate.
    pub base_score: Vec<f64>,
    pub trees: Vec<Vec<Tree>>,
    /// Mean weighted training loss before the first round and after each
    /// round, per label.
    pub loss_trace: Vec<Vec<f64>>,
}

impl TreeEnsemble {
    pub fn margins(&self, x: &SparseVector) -> [f64; NUM_LABELS] {
        std::array::from_fn(|k| self.base_score[k] + self.trees[k].iter().map(|t| t.eval(x)).sum::<f64>())
    }
}

pub fn train_boosted_ovr(x: &[SparseVector], y: &[LabelVector], cfg: &TrainConfig) -> Result<TreeEnsemble> {
    let dim = check_inputs(x, y, cfg)?;
    let weights = sample_weights(y, cfg);
    let columns = columns(x, dim);
    let per_label: Vec<(f64, Vec<Tree>, Vec<f64>)> = Label::ALL
        .par_iter()
        .map(|&label| {
            let targets: Vec<bool> = y.iter().map(|v| v.get(label)).collect();
            train_binary(x, &columns, &targets, weights[label.index()], cfg)
        })
        .collect();
    let mut ens = TreeEnsemble {
        dim,
        shrinkage: cfg.learning_rate,
        base_score: Vec::with_capacity(NUM_LABELS),
        trees: Vec::with_capacity(NUM_LABELS),
        loss_trace: Vec::with_capacity(NUM_LABELS),
    };
    for (base, trees, trace) in per_label {
        ens.base_score.push(base);
        ens.trees.push(trees);
        ens.loss_trace.push(trace);
    }
    Ok(ens)
}

/// Non-zero entries per feature, sorted by value then row.
fn columns(x: &[SparseVector], dim: usize) -> Vec<Vec<(f64, u32)>> {
    let mut cols = vec![Vec::new(); dim];
    for (row, v) in x.iter().enumerate() {
        for &(j, val) in &v.entries {
            if val != 0.0 {
                cols[j].push((val, row as u32));
            }
        }
    }
    for c in &mut cols {
        c.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    }
    cols
}

fn softplus(m: f64) -> f64 {
    m.max(0.0) + (-m.abs()).exp().ln_1p()
}

fn mean_loss(margin: &[f64], y: &[bool], c: &[f64]) -> f64 {
    let total: f64 = margin
        .iter()
        .zip(y)
        .zip(c)
        .map(|((&m, &yi), &ci)| ci * (softplus(m) - if yi { m } else { 0.0 }))
        .sum();
    total / margin.len() as f64
}

fn train_binary(
    x: &[SparseVector],
    columns: &[Vec<(f64, u32)>],
    y: &[bool],
    pos_weight: f64,
    cfg: &TrainConfig,
) -> (f64, Vec<Tree>, Vec<f64>) {
    let n = y.len();
    let c: Vec<f64> = y.iter().map(|&yi| if yi { pos_weight } else { 1.0 }).collect();
    let rate = (y.iter().filter(|&&b| b).count() as f64 / n as f64).clamp(1e-6, 1.0 - 1e-6);
    let base = (rate / (1.0 - rate)).ln();

    let mut margin = vec![base; n];
    let mut current = mean_loss(&margin, y, &c);
    let mut trace = vec![current];
    let mut trees = Vec::with_capacity(cfg.rounds);
    let mut g = vec![0.0; n];
    let mut h = vec![0.0; n];

    for _ in 0..cfg.rounds {
        for i in 0..n {
            let p = sigmoid(margin[i]);
            g[i] = c[i] * (p - if y[i] { 1.0 } else { 0.0 });
            h[i] = c[i] * p * (1.0 - p);
        }
        let (mut tree, leaf_of) = grow(x, columns, &g, &h, cfg);
        let leaf_value = |node: usize| match tree.nodes[node] {
            TreeNode::Leaf { value } => value,
            TreeNode::Split { .. } => unreachable!("rows end in leaves"),
        };
        let step: Vec<f64> = leaf_of.iter().map(|&l| leaf_value(l)).collect();

        // Halve the step until the loss does not increase.
        let mut factor = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = margin.iter().zip(&step).map(|(m, s)| m + factor * s).collect();
            let loss = mean_loss(&trial, y, &c);
            if loss <= current {
                accepted = Some((trial, loss));
                break;
            }
            factor *= 0.5;
        }
        match accepted {
            Some((trial, loss)) => {
                tree.scale_leaves(factor);
                margin = trial;
                current = loss;
            }
            None => tree.scale_leaves(0.0),
        }
        trace.push(current);
        trees.push(tree);
    }
    (base, trees, trace)
}

#[derive(Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

#[derive(Clone, Copy, Default)]
struct Scan {
    g: f64,
    h: f64,
    n: usize,
    last: Option<f64>,
    zero_done: bool,
    nz_g: f64,
    nz_h: f64,
    nz_n: usize,
}

fn score(g: f64, h: f64, lambda: f64) -> f64 {
    g * g / (h + lambda).max(1e-12)
}

/// Grows one tree; returns it with the leaf node reached by every row.
fn grow(
    x: &[SparseVector],
    columns: &[Vec<(f64, u32)>],
    g: &[f64],
    h: &[f64],
    cfg: &TrainConfig,
) -> (Tree, Vec<usize>) {
    let lambda = cfg.tree_lambda;
    let mut nodes = vec![TreeNode::Leaf { value: 0.0 }];
    let mut node_of = vec![0usize; g.len()];
    let mut active = vec![0usize];
    const NONE: usize = usize::MAX;

    for depth in 0..=cfg.max_depth {
        if active.is_empty() {
            break;
        }
        let mut slot_of = vec![NONE; nodes.len()];
        for (s, &node) in active.iter().enumerate() {
            slot_of[node] = s;
        }
        let mut totals = vec![(0.0, 0.0, 0usize); active.len()];
        for (i, &node) in node_of.iter().enumerate() {
            let s = slot_of[node];
            if s != NONE {
                totals[s].0 += g[i];
                totals[s].1 += h[i];
                totals[s].2 += 1;
            }
        }

        let mut best: Vec<Option<Candidate>> = vec![None; active.len()];
        if depth < cfg.max_depth {
            let mut scan = vec![Scan::default(); active.len()];
            let mut touched = Vec::new();
            for (feature, col) in columns.iter().enumerate() {
                if col.is_empty() {
                    continue;
                }
                for &s in &touched {
                    scan[s] = Scan::default();
                }
                touched.clear();
                for &(_, row) in col {
                    let s = slot_of[node_of[row as usize]];
                    if s == NONE {
                        continue;
                    }
                    if scan[s].nz_n == 0 {
                        touched.push(s);
                    }
                    scan[s].nz_g += g[row as usize];
                    scan[s].nz_h += h[row as usize];
                    scan[s].nz_n += 1;
                }
                let mut push = |s: usize, v: f64, bg: f64, bh: f64, bn: usize, scan: &mut [Scan]| {
                    if bn == 0 {
                        return;
                    }
                    let st = &mut scan[s];
                    if let Some(lv) = st.last {
                        if v > lv && st.n > 0 {
                            let (tg, th, _) = totals[s];
                            let gain = score(st.g, st.h, lambda) + score(tg - st.g, th - st.h, lambda)
                                - score(tg, th, lambda);
                            if gain > MIN_GAIN && best[s].is_none_or(|b| gain > b.gain) {
                                best[s] = Some(Candidate {
                                    gain,
                                    feature,
                                    threshold: lv + (v - lv) / 2.0,
                                });
                            }
                        }
                    }
                    st.g += bg;
                    st.h += bh;
                    st.n += bn;
                    st.last = Some(v);
                };
                let zero_bucket = |s: usize, scan: &[Scan]| {
                    let (tg, th, tn) = totals[s];
                    (tg - scan[s].nz_g, th - scan[s].nz_h, tn - scan[s].nz_n)
                };
                for &(val, row) in col {
                    let s = slot_of[node_of[row as usize]];
                    if s == NONE {
                        continue;
                    }
                    if !scan[s].zero_done && val > 0.0 {
                        let (zg, zh, zn) = zero_bucket(s, &scan);
                        push(s, 0.0, zg, zh, zn, &mut scan);
                        scan[s].zero_done = true;
                    }
                    push(s, val, g[row as usize], h[row as usize], 1, &mut scan);
                }
                for &s in &touched {
                    if !scan[s].zero_done {
                        let (zg, zh, zn) = zero_bucket(s, &scan);
                        push(s, 0.0, zg, zh, zn, &mut scan);
                        scan[s].zero_done = true;
                    }
                }
            }
        }

        let mut next = Vec::new();
        let mut children = vec![None; active.len()];
        for (s, &node) in active.iter().enumerate() {
            match best[s] {
                Some(cand) => {
                    let left = nodes.len();
                    nodes.push(TreeNode::Leaf { value: 0.0 });
                    nodes.push(TreeNode::Leaf { value: 0.0 });
                    nodes[node] = TreeNode::Split {
                        feature: cand.feature,
                        threshold: cand.threshold,
                        left,
                        right: left + 1,
                    };
                    children[s] = Some((cand, left));
                    next.push(left);
                    next.push(left + 1);
                }
                None => {
                    let (tg, th, _) = totals[s];
                    nodes[node] = TreeNode::Leaf {
                        value: -tg / (th + lambda).max(1e-12) * cfg.learning_rate,
                    };
                }
            }
        }
        for (i, node) in node_of.iter_mut().enumerate() {
            let s = slot_of[*node];
            if s == NONE {
                continue;
            }
            if let Some((cand, left)) = children[s] {
                *node = if x[i].get(cand.feature) <= cand.threshold { left } else { left + 1 };
            }
        }
        active = next;
    }
    (Tree { nodes }, node_of)
}
