//! Linear max-margin models trained with Pegasos-style stochastic subgradient
//! steps on a class-weighted hinge loss.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_inputs, sample_weights, Result, TrainConfig};
use crate::features::SparseVector;
use crate::labels::{Label, LabelVector, NUM_LABELS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub dim: usize,
    /// One weight vector per label, canonical label order.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl LinearModel {
    pub fn margins(&self, x: &SparseVector) -> [f64; NUM_LABELS] {
        std::array::from_fn(|k| x.dot(&self.weights[k]) + self.bias[k])
    }
}

/// `l2/2 * (|w|^2 + b^2) + mean_i c_i * max(0, 1 - y_i (w.x_i + b))`, with
/// `c_i = pos_weight` on positives and 1 on negatives.
pub fn linear_objective(w: &[f64], b: f64, x: &[SparseVector], y: &[bool], pos_weight: f64, l2: f64) -> f64 {
    let reg = 0.5 * l2 * (w.iter().map(|v| v * v).sum::<f64>() + b * b);
    let loss: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, &yi)| {
            let s = if yi { 1.0 } else { -1.0 };
            let c = if yi { pos_weight } else { 1.0 };
            c * (1.0 - s * (xi.dot(w) + b)).max(0.0)
        })
        .sum();
    reg + loss / x.len() as f64
}

/// Trains 19 independent linear models. Each label returns whichever of the
/// zero model, the last iterate and the average of the iterates over the
/// second half of training has the lowest objective.
pub fn train_linear_ovr(x: &[SparseVector], y: &[LabelVector], cfg: &TrainConfig) -> Result<LinearModel> {
    let dim = check_inputs(x, y, cfg)?;
    let weights = sample_weights(y, cfg);
    let per_label: Vec<(Vec<f64>, f64)> = Label::ALL
        .par_iter()
        .map(|&label| {
            let targets: Vec<bool> = y.iter().map(|v| v.get(label)).collect();
            let seed = cfg.seed ^ (label.index() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            train_binary(x, &targets, weights[label.index()], dim, cfg, seed)
        })
        .collect();
    let (weights, bias) = per_label.into_iter().unzip();
    Ok(LinearModel { dim, weights, bias })
}

/// Iterate `w = scale * v` (bias stored at index `dim`) plus a lazily
/// maintained running sum of the averaged iterates.
struct Iterate {
    v: Vec<f64>,
    scale: f64,
    sq: f64,
    // sum of averaged iterates = flushed + v * scale_sum - correction
    flushed: Vec<f64>,
    correction: Vec<f64>,
    scale_sum: f64,
    averaged: usize,
}

impl Iterate {
    fn new(len: usize) -> Self {
        Iterate {
            v: vec![0.0; len],
            scale: 1.0,
            sq: 0.0,
            flushed: vec![0.0; len],
            correction: vec![0.0; len],
            scale_sum: 0.0,
            averaged: 0,
        }
    }

    fn dot(&self, x: &SparseVector) -> f64 {
        self.scale * (x.dot(&self.v) + self.v[self.v.len() - 1])
    }

    fn add(&mut self, j: usize, delta: f64) {
        let old = self.v[j];
        self.v[j] += delta;
        self.sq += self.v[j] * self.v[j] - old * old;
        self.correction[j] += delta * self.scale_sum;
    }

    /// Moves the lazy part of the running sum into `flushed` so that `v` and
    /// `scale` may be rewritten.
    fn flush(&mut self) {
        for j in 0..self.v.len() {
            self.flushed[j] += self.v[j] * self.scale_sum - self.correction[j];
            self.correction[j] = 0.0;
        }
        self.scale_sum = 0.0;
    }

    fn fold_scale(&mut self) {
        self.flush();
        let a = self.scale;
        self.v.iter_mut().for_each(|w| *w *= a);
        self.sq = self.v.iter().map(|w| w * w).sum();
        self.scale = 1.0;
    }

    fn reset(&mut self) {
        self.flush();
        self.v.iter_mut().for_each(|w| *w = 0.0);
        self.sq = 0.0;
        self.scale = 1.0;
    }

    fn snapshot(&mut self) {
        self.scale_sum += self.scale;
        self.averaged += 1;
    }

    fn current(&self) -> Vec<f64> {
        self.v.iter().map(|w| w * self.scale).collect()
    }

    fn average(&self) -> Option<Vec<f64>> {
        (self.averaged > 0).then(|| {
            let k = self.averaged as f64;
            (0..self.v.len())
                .map(|j| (self.flushed[j] + self.v[j] * self.scale_sum - self.correction[j]) / k)
                .collect()
        })
    }
}

fn train_binary(
    x: &[SparseVector],
    y: &[bool],
    pos_weight: f64,
    dim: usize,
    cfg: &TrainConfig,
    seed: u64,
) -> (Vec<f64>, f64) {
    let lambda = cfg.l2;
    let radius = (pos_weight.max(1.0) / lambda).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut it = Iterate::new(dim + 1);

    let total = (cfg.epochs * x.len()) as u64;
    let average_from = total / 2;
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut t = 0u64;
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let s = if y[i] { 1.0 } else { -1.0 };
            let margin = s * it.dot(&x[i]);

            if t == 1 {
                it.reset();
            } else {
                it.scale *= 1.0 - 1.0 / t as f64;
            }
            if margin < 1.0 {
                let c = if y[i] { pos_weight } else { 1.0 };
                let step = eta * c * s / it.scale;
                for &(j, val) in &x[i].entries {
                    it.add(j, step * val);
                }
                it.add(dim, step);
            }
            let norm = it.scale * it.sq.max(0.0).sqrt();
            if norm > radius {
                it.scale *= radius / norm;
            }
            if it.scale < 1e-9 {
                it.fold_scale();
            }
            if t > average_from {
                it.snapshot();
            }
        }
    }

    let objective = |w: &[f64]| linear_objective(&w[..dim], w[dim], x, y, pos_weight, lambda);
    let mut best = vec![0.0; dim + 1];
    let mut best_obj = objective(&best);
    for cand in [Some(it.current()), it.average()].into_iter().flatten() {
        let obj = objective(&cand);
        if obj < best_obj {
            best_obj = obj;
            best = cand;
        }
    }
    let b = best.pop().unwrap_or(0.0);
    (best, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::compute_class_weights;

    fn point(dim: usize, idx: &[usize]) -> SparseVector {
        SparseVector::new(dim, idx.iter().map(|&i| (i, 1.0)).collect())
    }

    #[test]
    fn two_point_separable() {
        let x = vec![point(2, &[0]), point(2, &[1])];
        let y = vec![LabelVector::from_labels([Label::Joy]), LabelVector::EMPTY];
        let m = train_linear_ovr(&x, &y, &TrainConfig::default()).unwrap();
        let joy = Label::Joy.index();
        assert!(m.margins(&x[0])[joy] > 0.0);
        assert!(m.margins(&x[1])[joy] < 0.0);
    }

    #[test]
    fn deterministic() {
        let x: Vec<_> = (0..30).map(|i| point(10, &[i % 10, (i * 3 + 1) % 10])).collect();
        let y: Vec<_> = (0..30)
            .map(|i| if i % 3 == 0 { LabelVector::from_labels([Label::Anger]) } else { LabelVector::EMPTY })
            .collect();
        let cfg = TrainConfig { seed: 5, ..Default::default() };
        let a = train_linear_ovr(&x, &y, &cfg).unwrap();
        let b = train_linear_ovr(&x, &y, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn objective_not_above_zero_model() {
        let x: Vec<_> = (0..40).map(|i| point(8, &[i % 8, (i * 5 + 1) % 8])).collect();
        let y: Vec<_> = (0..40)
            .map(|i| if i % 4 == 1 { LabelVector::from_labels([Label::Fear]) } else { LabelVector::EMPTY })
            .collect();
        let cfg = TrainConfig::default();
        let m = train_linear_ovr(&x, &y, &cfg).unwrap();
        let w = compute_class_weights(&y, cfg.class_weight_cap);
        for label in Label::ALL {
            let k = label.index();
            let targets: Vec<bool> = y.iter().map(|v| v.get(label)).collect();
            let zero = linear_objective(&[0.0; 8], 0.0, &x, &targets, w[k], cfg.l2);
            let end = linear_objective(&m.weights[k], m.bias[k], &x, &targets, w[k], cfg.l2);
            assert!(end <= zero, "{label}: {end} > {zero}");
        }
    }

    #[test]
    fn dimension_mismatch() {
        let x = vec![point(2, &[0]), point(3, &[1])];
        let y = vec![LabelVector::EMPTY; 2];
        assert!(train_linear_ovr(&x, &y, &TrainConfig::default()).is_err());
    }

    #[derive(Debug, Clone)]
    enum Op {
        Add(usize, f64),
        Scale(f64),
        Fold,
        Reset,
        Snapshot,
    }

    fn arb_op() -> impl proptest::strategy::Strategy<Value = Op> {
        use proptest::prelude::*;
        prop_oneof![
            4 => (0usize..4, -3.0f64..3.0).prop_map(|(j, d)| Op::Add(j, d)),
            2 => (0.1f64..1.0).prop_map(Op::Scale),
            1 => Just(Op::Fold),
            1 => Just(Op::Reset),
            4 => Just(Op::Snapshot),
        ]
    }

    proptest::proptest! {
        #[test]
        fn lazy_average_matches_dense(ops in proptest::collection::vec(arb_op(), 1..60)) {
            let mut it = Iterate::new(4);
            let mut dense = [0.0f64; 4];
            let mut sum = [0.0f64; 4];
            let mut k = 0usize;
            for op in &ops {
                match *op {
                    Op::Add(j, d) => {
                        it.add(j, d / it.scale);
                        dense[j] += d;
                    }
                    Op::Scale(a) => {
                        it.scale *= a;
                        dense.iter_mut().for_each(|w| *w *= a);
                    }
                    Op::Fold => it.fold_scale(),
                    Op::Reset => {
                        it.reset();
                        dense = [0.0; 4];
                    }
                    Op::Snapshot => {
                        it.snapshot();
                        k += 1;
                        for j in 0..4 {
                            sum[j] += dense[j];
                        }
                    }
                }
                let cur = it.current();
                for j in 0..4 {
                    proptest::prop_assert!((cur[j] - dense[j]).abs() < 1e-9 * (1.0 + dense[j].abs()));
                }
            }
            match it.average() {
                None => proptest::prop_assert_eq!(k, 0),
                Some(avg) => {
                    for j in 0..4 {
                        let want = sum[j] / k as f64;
                        proptest::prop_assert!((avg[j] - want).abs() < 1e-8 * (1.0 + want.abs()), "{} vs {}", avg[j], want);
                    }
                }
            }
        }
    }
}
