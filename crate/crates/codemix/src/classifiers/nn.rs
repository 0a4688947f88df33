//! Shared pieces for the neural classifiers: stable softmax, Adam,
//! parameter initialization and early stopping.

use ndarray::{Array1, Array2};

use crate::num::Real;
use crate::rng::Rng;

/// Numerically stable softmax of a logit vector.
pub fn softmax<R: Real>(logits: &[R]) -> Vec<R> {
    let max = logits
        .iter()
        .copied()
        .fold(R::from_f64(f64::NEG_INFINITY), |a, b| a.maximum(b));
    let exps: Vec<R> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum: R = exps.iter().copied().fold(R::ZERO, |a, b| a + b);
    exps.into_iter().map(|e| e / sum).collect()
}

/// Stable log-softmax; every entry is <= 0.
pub fn log_softmax<R: Real>(logits: &[R]) -> Vec<R> {
    let max = logits
        .iter()
        .copied()
        .fold(R::from_f64(f64::NEG_INFINITY), |a, b| a.maximum(b));
    let log_sum = logits
        .iter()
        .map(|&l| (l - max).exp())
        .fold(R::ZERO, |a, b| a + b)
        .ln()
        + max;
    logits.iter().map(|&l| l - log_sum).collect()
}

/// Negative log likelihood of the target class under the logits, and
/// the gradient w.r.t. the logits (softmax minus one-hot). This is the
/// shared loss of both softmax cross-entropy and log-softmax + NLL.
pub fn nll_loss_and_grad<R: Real>(logits: &[R], target: usize) -> (R, Vec<R>) {
    let log_probs = log_softmax(logits);
    let loss = -log_probs[target];
    let mut grad: Vec<R> = log_probs.iter().map(|&lp| lp.exp()).collect();
    grad[target] -= R::ONE;
    (loss, grad)
}

/// Uniform init in [-bound, bound).
pub fn uniform_init<R: Real>(shape: (usize, usize), bound: f64, rng: &mut Rng) -> Array2<R> {
    Array2::from_shape_fn(shape, |_| R::from_f64((rng.next_f64() * 2.0 - 1.0) * bound))
}

/// Adam state for one tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<R> {
    m: Array2<R>,
    v: Array2<R>,
}

/// Adam optimizer over a fixed list of tensors, bias-corrected.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam<R> {
    pub learning_rate: R,
    pub beta1: R,
    pub beta2: R,
    pub epsilon: R,
    step: i32,
    states: Vec<AdamState<R>>,
}

impl<R: Real> Adam<R> {
    pub fn new(learning_rate: f64, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Adam {
            learning_rate: R::from_f64(learning_rate),
            beta1: R::from_f64(beta1),
            beta2: R::from_f64(beta2),
            epsilon: R::from_f64(epsilon),
            step: 0,
            states: Vec::new(),
        }
    }

    /// Advance the shared step counter; call once per batch before
    /// updating the tensors.
    pub fn begin_step(&mut self) {
        self.step += 1;
    }

    /// Apply one Adam update to `param` given `grad`. `slot` identifies
    /// the tensor and must be dense from zero in a stable order.
    pub fn update(&mut self, slot: usize, param: &mut Array2<R>, grad: &Array2<R>) {
        while self.states.len() <= slot {
            self.states.push(AdamState {
                m: Array2::zeros(param.raw_dim()),
                v: Array2::zeros(param.raw_dim()),
            });
        }
        let state = &mut self.states[slot];
        let one = R::ONE;
        let b1 = self.beta1;
        let b2 = self.beta2;
        let bias1 = one - pow_i(b1, self.step);
        let bias2 = one - pow_i(b2, self.step);
        for ((p, g), (m, v)) in param
            .iter_mut()
            .zip(grad.iter())
            .zip(state.m.iter_mut().zip(state.v.iter_mut()))
        {
            *m = b1 * *m + (one - b1) * *g;
            *v = b2 * *v + (one - b2) * *g * *g;
            let m_hat = *m / bias1;
            let v_hat = *v / bias2;
            *p -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}

fn pow_i<R: Real>(base: R, exp: i32) -> R {
    let mut acc = R::ONE;
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Track validation macro-F1 and stop after `patience` epochs without
/// improvement.
#[derive(Debug)]
pub struct EarlyStopper {
    best: f64,
    since_best: usize,
    patience: usize,
}

impl EarlyStopper {
    pub fn new(patience: usize) -> Self {
        EarlyStopper {
            best: f64::NEG_INFINITY,
            since_best: 0,
            patience,
        }
    }

    /// Feed this epoch's score; returns true when the caller should
    /// snapshot the current parameters as the best so far.
    pub fn observe(&mut self, score: f64) -> bool {
        if score > self.best {
            self.best = score;
            self.since_best = 0;
            true
        } else {
            self.since_best += 1;
            false
        }
    }

    pub fn should_stop(&self) -> bool {
        self.since_best > self.patience
    }

    pub fn best(&self) -> f64 {
        self.best
    }
}

/// Gradient of a scalar function of one tensor by central finite
/// differences; the test-side oracle for the analytic backward passes.
/// `loss_at` is called with the perturbed tensor.
pub fn finite_difference<F>(base: &Array2<f64>, mut loss_at: F, h: f64) -> Array2<f64>
where
    F: FnMut(&Array2<f64>) -> f64,
{
    let mut grad = Array2::<f64>::zeros(base.raw_dim());
    let mut work = base.clone();
    for idx in 0..base.len() {
        let orig = base.as_slice().unwrap()[idx];
        work.as_slice_mut().unwrap()[idx] = orig + h;
        let up = loss_at(&work);
        work.as_slice_mut().unwrap()[idx] = orig - h;
        let down = loss_at(&work);
        work.as_slice_mut().unwrap()[idx] = orig;
        grad.as_slice_mut().unwrap()[idx] = (up - down) / (2.0 * h);
    }
    grad
}

/// Relative error between analytic and numeric gradients, using the
/// max norm with an absolute floor.
pub fn gradient_relative_error(analytic: &Array2<f64>, numeric: &Array2<f64>) -> f64 {
    let mut worst = 0.0f64;
    for (a, n) in analytic.iter().zip(numeric.iter()) {
        // The floor keeps finite-difference roundoff on near-zero
        // entries from registering as relative error.
        let denom = a.abs().max(n.abs()).max(1e-6);
        worst = worst.max((a - n).abs() / denom);
    }
    worst
}

/// Row-major flatten helper for the serializers.
pub fn to_vec_f32<R: Real>(m: &Array2<R>) -> Vec<f32> {
    m.iter().map(|v| v.to_f64() as f32).collect()
}

pub fn array1_to_vec_f32<R: Real>(m: &Array1<R>) -> Vec<f32> {
    m.iter().map(|v| v.to_f64() as f32).collect()
}
