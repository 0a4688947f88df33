//! One-vs-rest linear SVM trained by deterministic full-batch
//! subgradient descent on mean-pooled document vectors.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::num::Real;

/// Hinge-loss linear classifier settings. The loss, L2 penalty and
/// one-vs-rest scheme are fixed; only the listed knobs vary.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmConfig {
    /// Regularization parameter C of the soft-margin objective.
    pub c: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Step size decays as lr / (1 + decay * epoch).
    pub learning_rate_decay: f64,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            epochs: 200,
            learning_rate: 0.05,
            learning_rate_decay: 0.05,
            seed: 1,
        }
    }
}

/// Three binary margins; prediction is their argmax.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel<R> {
    /// One weight row per class, 3 x d.
    pub weights: Array2<R>,
    pub bias: Array1<R>,
}

impl<R: Real> SvmModel<R> {
    pub fn zeros(dim: usize) -> Self {
        SvmModel {
            weights: Array2::zeros((3, dim)),
            bias: Array1::zeros(3),
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn margins(&self, features: &[R]) -> [R; 3] {
        let x = ndarray::ArrayView1::from(features);
        let mut out = [R::ZERO; 3];
        for (c, slot) in out.iter_mut().enumerate() {
            *slot = self.weights.row(c).dot(&x) + self.bias[c];
        }
        out
    }
}

/// Mean hinge loss plus L2 penalty, summed over the three one-vs-rest
/// classifiers:
/// sum_c [ mean_i max(0, 1 - y_ic (w_c x_i + b_c)) + ||w_c||^2/(2 C N) ]
pub fn objective<R: Real>(model: &SvmModel<R>, data: &[(Vec<R>, usize)], c_param: f64) -> f64 {
    let n = data.len() as f64;
    let mut total = 0.0;
    for class in 0..3 {
        let mut hinge_sum = 0.0;
        for (x, label) in data {
            let margin = model.margins(x)[class].to_f64();
            let y = if *label == class { 1.0 } else { -1.0 };
            hinge_sum += (1.0 - y * margin).max(0.0);
        }
        let w_norm2: f64 = model
            .weights
            .row(class)
            .iter()
            .map(|w| w.to_f64() * w.to_f64())
            .sum();
        total += hinge_sum / n + w_norm2 / (2.0 * c_param * n);
    }
    total
}

/// Full-batch subgradient step for all three classifiers; returns the
/// objective value before the step.
pub fn subgradient_step<R: Real>(
    model: &mut SvmModel<R>,
    data: &[(Vec<R>, usize)],
    c_param: f64,
    learning_rate: f64,
) -> f64 {
    let n = data.len() as f64;
    let dim = model.dim();
    let before = objective(model, data, c_param);
    let mut grad_w = Array2::<R>::zeros((3, dim));
    let mut grad_b = Array1::<R>::zeros(3);

    for (x, label) in data {
        let margins = model.margins(x);
        for class in 0..3 {
            let y = if *label == class { 1.0 } else { -1.0 };
            if y * margins[class].to_f64() < 1.0 {
                let scale = R::from_f64(-y / n);
                for (g, &xv) in grad_w.row_mut(class).iter_mut().zip(x.iter()) {
                    *g += scale * xv;
                }
                grad_b[class] += scale;
            }
        }
    }
    // L2 penalty gradient: w / (C N)
    let reg = R::from_f64(1.0 / (c_param * n));
    for (g, &w) in grad_w.iter_mut().zip(model.weights.iter()) {
        *g += reg * w;
    }

    let lr = R::from_f64(learning_rate);
    for (w, &g) in model.weights.iter_mut().zip(grad_w.iter()) {
        *w -= lr * g;
    }
    for (b, &g) in model.bias.iter_mut().zip(grad_b.iter()) {
        *b -= lr * g;
    }
    before
}

/// Train on encoded documents. Demands at least two distinct labels.
pub fn train_svm_on_features<R: Real>(
    data: &[(Vec<R>, usize)],
    cfg: &SvmConfig,
) -> Result<SvmModel<R>> {
    if data.is_empty() {
        return Err(Error::format("empty training data"));
    }
    let first = data[0].1;
    if data.iter().all(|(_, label)| *label == first) {
        return Err(Error::SingleClass(
            crate::corpus::SentimentLabel::from_index(first)
                .map(|l| l.to_string())
                .unwrap_or_else(|| first.to_string()),
        ));
    }
    let dim = data[0].0.len();
    let mut model = SvmModel::zeros(dim);
    for epoch in 0..cfg.epochs {
        let lr = cfg.learning_rate / (1.0 + cfg.learning_rate_decay * epoch as f64);
        subgradient_step(&mut model, data, cfg.c, lr);
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn separable_toy() -> Vec<(Vec<f64>, usize)> {
        let mut rng = Rng::new(6);
        let mut data = Vec::new();
        for _ in 0..10 {
            data.push((
                vec![2.0 + rng.next_f64() * 0.5, 2.0 + rng.next_f64() * 0.5],
                0,
            ));
            data.push((
                vec![-2.0 - rng.next_f64() * 0.5, -2.0 - rng.next_f64() * 0.5],
                1,
            ));
        }
        data
    }

    #[test]
    fn separable_clusters_reach_full_accuracy() {
        let data = separable_toy();
        let model = train_svm_on_features(&data, &SvmConfig::default()).unwrap();
        let correct = data
            .iter()
            .filter(|(x, label)| {
                let margins = model.margins(x);
                let pred = (0..3)
                    .max_by(|&a, &b| margins[a].partial_cmp(&margins[b]).unwrap())
                    .unwrap();
                pred == *label
            })
            .count();
        assert_eq!(correct, data.len());
    }

    #[test]
    fn identical_features_collapse_to_one_label() {
        let data: Vec<(Vec<f64>, usize)> = vec![
            (vec![1.0, 1.0], 0),
            (vec![1.0, 1.0], 1),
            (vec![1.0, 1.0], 2),
            (vec![1.0, 1.0], 0),
        ];
        let model = train_svm_on_features(&data, &SvmConfig::default()).unwrap();
        let margins = model.margins(&[1.0, 1.0]);
        // Whatever the margins, every input yields the same argmax; with
        // exact ties the first class in label order wins.
        let pred = (0..3)
            .max_by(|&a, &b| margins[a].partial_cmp(&margins[b]).unwrap())
            .unwrap();
        let again = model.margins(&[1.0, 1.0]);
        let pred2 = (0..3)
            .max_by(|&a, &b| again[a].partial_cmp(&again[b]).unwrap())
            .unwrap();
        assert_eq!(pred, pred2);
    }

    #[test]
    fn single_class_data_is_rejected() {
        let data: Vec<(Vec<f64>, usize)> = vec![(vec![1.0], 1), (vec![2.0], 1)];
        assert!(matches!(
            train_svm_on_features(&data, &SvmConfig::default()),
            Err(Error::SingleClass(_))
        ));
    }

    #[test]
    fn objective_non_increasing_under_decayed_steps() {
        let data = separable_toy();
        let mut model = SvmModel::<f64>::zeros(2);
        let mut last = f64::INFINITY;
        for epoch in 0..100 {
            let lr = 0.05 / (1.0 + 0.05 * epoch as f64);
            let before = subgradient_step(&mut model, &data, 1.0, lr);
            assert!(
                before <= last + 1e-6,
                "objective rose: {last} -> {before} at epoch {epoch}"
            );
            last = before;
        }
        let final_obj = objective(&model, &data, 1.0);
        assert!(final_obj <= last + 1e-6);
    }

    #[test]
    fn subgradient_matches_finite_differences_away_from_kinks() {
        // Generic-position data: no sample sits exactly on a margin of 1.
        let data: Vec<(Vec<f64>, usize)> = vec![
            (vec![0.3, -0.7], 0),
            (vec![-0.4, 0.9], 1),
            (vec![0.8, 0.25], 2),
            (vec![-0.6, -0.2], 0),
        ];
        let mut model = SvmModel::<f64>::zeros(2);
        // Move off the all-zeros point (margins exactly 0 there is fine,
        // the kink is at margin 1) with a couple of steps.
        subgradient_step(&mut model, &data, 1.0, 0.05);
        subgradient_step(&mut model, &data, 1.0, 0.05);

        let h = 1e-6;
        let mut numeric = Array2::<f64>::zeros((3, 2));
        for c in 0..3 {
            for j in 0..2 {
                let orig = model.weights[[c, j]];
                model.weights[[c, j]] = orig + h;
                let up = objective(&model, &data, 1.0);
                model.weights[[c, j]] = orig - h;
                let down = objective(&model, &data, 1.0);
                model.weights[[c, j]] = orig;
                numeric[[c, j]] = (up - down) / (2.0 * h);
            }
        }

        // Analytic subgradient at the same point.
        let n = data.len() as f64;
        let mut analytic = Array2::<f64>::zeros((3, 2));
        for (x, label) in &data {
            let margins = model.margins(x);
            for c in 0..3 {
                let y = if *label == c { 1.0 } else { -1.0 };
                let m = margins[c];
                assert!(
                    (y * m - 1.0).abs() > 1e-4,
                    "test point too close to a hinge kink"
                );
                if y * m < 1.0 {
                    for j in 0..2 {
                        analytic[[c, j]] += -y * x[j] / n;
                    }
                }
            }
        }
        for c in 0..3 {
            for j in 0..2 {
                analytic[[c, j]] += model.weights[[c, j]] / (1.0 * n);
            }
        }

        for (a, nv) in analytic.iter().zip(numeric.iter()) {
            let denom = a.abs().max(nv.abs()).max(1e-8);
            assert!(
                (a - nv).abs() / denom < 1e-4,
                "analytic {a} vs numeric {nv}"
            );
        }
    }
}
