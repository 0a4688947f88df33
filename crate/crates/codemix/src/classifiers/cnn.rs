//! Multi-kernel text CNN: for each kernel size, one-dimensional valid
//! convolutions over the padded token-vector sequence, ReLU,
//! max-over-time pooling, then a single linear layer to three logits
//! trained with NLL over log-softmax and Adam.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::num::Real;
use crate::rng::Rng;

use super::nn::{nll_loss_and_grad, uniform_init, Adam};

#[derive(Debug, Clone, PartialEq)]
pub struct CnnConfig {
    pub kernel_sizes: Vec<usize>,
    pub filters_per_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Early-stopping patience on validation macro-F1.
    pub patience: usize,
    /// Padded/truncated sequence length; at least the largest kernel.
    pub seq_len: usize,
    /// Dropout on the pooled feature vector; 0 disables.
    pub dropout: f64,
    /// L2 weight decay added to the gradients; 0 disables.
    pub weight_decay: f64,
    pub seed: u64,
}

impl Default for CnnConfig {
    fn default() -> Self {
        CnnConfig {
            kernel_sizes: vec![1, 2, 3, 4, 5],
            filters_per_size: 100,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            epochs: 20,
            batch_size: 32,
            patience: 3,
            seq_len: 64,
            dropout: 0.0,
            weight_decay: 0.0,
            seed: 1,
        }
    }
}

impl CnnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kernel_sizes.is_empty() || self.filters_per_size == 0 {
            return Err(Error::config("need at least one kernel and one filter"));
        }
        let max_k = *self.kernel_sizes.iter().max().unwrap();
        if self.seq_len < max_k {
            return Err(Error::config(format!(
                "seq_len {} is below the largest kernel size {max_k}",
                self.seq_len
            )));
        }
        Ok(())
    }

    pub fn total_features(&self) -> usize {
        self.kernel_sizes.len() * self.filters_per_size
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CnnModel<R> {
    pub kernel_sizes: Vec<usize>,
    /// One weight matrix per kernel size, filters x (k * dim).
    pub filters: Vec<Array2<R>>,
    /// One bias row per kernel size, 1 x filters.
    pub biases: Vec<Array2<R>>,
    /// 3 x total_features.
    pub head_w: Array2<R>,
    /// 1 x 3.
    pub head_b: Array2<R>,
    pub dim: usize,
    pub seq_len: usize,
}

/// Per-document forward cache needed by the backward pass.
pub struct CnnCache<R> {
    /// Pooled post-ReLU feature vector.
    pub features: Vec<R>,
    /// (position of the max, pre-ReLU value there) per pooled feature.
    pub argmax: Vec<(usize, R)>,
}

/// Gradient accumulator with the same shapes as the model.
#[derive(Debug, Clone)]
pub struct CnnGrads<R> {
    pub filters: Vec<Array2<R>>,
    pub biases: Vec<Array2<R>>,
    pub head_w: Array2<R>,
    pub head_b: Array2<R>,
}

impl<R: Real> CnnModel<R> {
    pub fn init(cfg: &CnnConfig, dim: usize, rng: &mut Rng) -> Self {
        let filters_per = cfg.filters_per_size;
        let mut filters = Vec::new();
        let mut biases = Vec::new();
        for &k in &cfg.kernel_sizes {
            let fan_in = (k * dim) as f64;
            filters.push(uniform_init((filters_per, k * dim), fan_in.sqrt().recip(), rng));
            biases.push(Array2::zeros((1, filters_per)));
        }
        let total = cfg.total_features();
        CnnModel {
            kernel_sizes: cfg.kernel_sizes.clone(),
            filters,
            biases,
            head_w: uniform_init((3, total), (total as f64).sqrt().recip(), rng),
            head_b: Array2::zeros((1, 3)),
            dim,
            seq_len: cfg.seq_len,
        }
    }

    pub fn total_features(&self) -> usize {
        self.filters.iter().map(|f| f.nrows()).sum()
    }

    fn zero_grads(&self) -> CnnGrads<R> {
        CnnGrads {
            filters: self.filters.iter().map(|f| Array2::zeros(f.raw_dim())).collect(),
            biases: self.biases.iter().map(|b| Array2::zeros(b.raw_dim())).collect(),
            head_w: Array2::zeros(self.head_w.raw_dim()),
            head_b: Array2::zeros(self.head_b.raw_dim()),
        }
    }

    /// Overlapping-window view of the document: row t holds tokens
    /// t..t+k flattened, without copying.
    fn unfold<'a>(&self, doc: &'a Array2<R>, k: usize) -> ArrayView2<'a, R> {
        let l = doc.nrows();
        let d = doc.ncols();
        debug_assert!(doc.is_standard_layout());
        let positions = l - k + 1;
        unsafe {
            ArrayView2::from_shape_ptr(
                ndarray::ShapeBuilder::strides((positions, k * d), (d, 1)),
                doc.as_ptr(),
            )
        }
    }

    /// Logits with the cache needed for backprop.
    #[allow(clippy::needless_range_loop)]
    pub fn forward_cached(&self, doc: &Array2<R>) -> (Vec<R>, CnnCache<R>) {
        assert_eq!(doc.nrows(), self.seq_len, "document must be padded to seq_len");
        assert_eq!(doc.ncols(), self.dim);
        let total = self.total_features();
        let mut features = Vec::with_capacity(total);
        let mut argmax = Vec::with_capacity(total);

        for (idx, &k) in self.kernel_sizes.iter().enumerate() {
            let unfolded = self.unfold(doc, k);
            // (positions x k*d) x (k*d x filters)
            let conv = unfolded.dot(&self.filters[idx].t());
            let bias = &self.biases[idx];
            for f in 0..conv.ncols() {
                let mut best_pos = 0;
                let mut best = conv[[0, f]] + bias[[0, f]];
                for t in 1..conv.nrows() {
                    let v = conv[[t, f]] + bias[[0, f]];
                    if v > best {
                        best = v;
                        best_pos = t;
                    }
                }
                features.push(best.maximum(R::ZERO));
                argmax.push((best_pos, best));
            }
        }

        let x = ndarray::ArrayView1::from(&features[..]);
        let mut logits = vec![R::ZERO; 3];
        for c in 0..3 {
            logits[c] = self.head_w.row(c).dot(&x) + self.head_b[[0, c]];
        }
        (logits, CnnCache { features, argmax })
    }

    pub fn forward(&self, doc: &Array2<R>) -> Vec<R> {
        self.forward_cached(doc).0
    }

    /// NLL of the target class; used by finite-difference checks.
    pub fn loss(&self, doc: &Array2<R>, target: usize) -> R {
        let logits = self.forward(doc);
        nll_loss_and_grad(&logits, target).0
    }

    /// Forward + backward for one document, accumulating parameter
    /// gradients. `feature_mask` optionally applies (inverted) dropout
    /// to the pooled features. Returns the loss.
    #[allow(clippy::needless_range_loop)]
    pub fn accumulate_gradients(
        &self,
        doc: &Array2<R>,
        target: usize,
        grads: &mut CnnGrads<R>,
        feature_mask: Option<&[R]>,
    ) -> R {
        let (logits, cache) = match feature_mask {
            None => self.forward_cached(doc),
            Some(mask) => {
                let (_, mut cache) = self.forward_cached(doc);
                for (f, m) in cache.features.iter_mut().zip(mask) {
                    *f *= *m;
                }
                let x = ndarray::ArrayView1::from(&cache.features[..]);
                let mut logits = vec![R::ZERO; 3];
                for c in 0..3 {
                    logits[c] = self.head_w.row(c).dot(&x) + self.head_b[[0, c]];
                }
                (logits, cache)
            }
        };
        let (loss, dlogits) = nll_loss_and_grad(&logits, target);

        // Head gradients and feature gradient.
        let total = cache.features.len();
        let mut dfeat = vec![R::ZERO; total];
        for c in 0..3 {
            let dl = dlogits[c];
            grads.head_b[[0, c]] += dl;
            for j in 0..total {
                grads.head_w[[c, j]] += dl * cache.features[j];
                dfeat[j] += dl * self.head_w[[c, j]];
            }
        }
        if let Some(mask) = feature_mask {
            for (g, m) in dfeat.iter_mut().zip(mask) {
                *g *= *m;
            }
        }

        // Through max-over-time and ReLU into the filters.
        let mut offset = 0;
        for (idx, &k) in self.kernel_sizes.iter().enumerate() {
            let unfolded = self.unfold(doc, k);
            let filters_per = self.filters[idx].nrows();
            for f in 0..filters_per {
                let (pos, pre_relu) = cache.argmax[offset + f];
                if pre_relu > R::ZERO {
                    let g = dfeat[offset + f];
                    if g != R::ZERO {
                        grads.biases[idx][[0, f]] += g;
                        let window = unfolded.row(pos);
                        for (j, &w) in window.iter().enumerate() {
                            grads.filters[idx][[f, j]] += g * w;
                        }
                    }
                }
            }
            offset += filters_per;
        }
        loss
    }
}

/// Train on pre-encoded documents (already padded to `cfg.seq_len`).
/// When a validation set is supplied, keeps the parameters of the best
/// validation macro-F1 epoch and stops early after `cfg.patience`
/// epochs without improvement.
pub fn train_cnn_on_encoded(
    train: &[(Array2<f32>, usize)],
    validation: Option<&[(Array2<f32>, usize)]>,
    dim: usize,
    cfg: &CnnConfig,
) -> Result<CnnModel<f32>> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::format("empty training data"));
    }
    let first = train[0].1;
    if train.iter().all(|(_, label)| *label == first) {
        return Err(Error::SingleClass(
            crate::corpus::SentimentLabel::from_index(first)
                .map(|l| l.to_string())
                .unwrap_or_else(|| first.to_string()),
        ));
    }

    let mut rng = Rng::new(cfg.seed);
    let mut model = CnnModel::<f32>::init(cfg, dim, &mut rng);
    let mut adam = Adam::<f32>::new(cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut stopper = super::nn::EarlyStopper::new(cfg.patience);
    let mut best: Option<CnnModel<f32>> = None;
    let total_features = cfg.total_features();

    for _epoch in 0..cfg.epochs {
        rng.shuffle(&mut order);
        for batch in order.chunks(cfg.batch_size) {
            let mut grads = model.zero_grads();
            for &i in batch {
                let (doc, label) = &train[i];
                if cfg.dropout > 0.0 {
                    let keep = 1.0 - cfg.dropout;
                    let mask: Vec<f32> = (0..total_features)
                        .map(|_| {
                            if rng.next_f64() < keep {
                                (1.0 / keep) as f32
                            } else {
                                0.0
                            }
                        })
                        .collect();
                    model.accumulate_gradients(doc, *label, &mut grads, Some(&mask));
                } else {
                    model.accumulate_gradients(doc, *label, &mut grads, None);
                }
            }
            let scale = 1.0 / batch.len() as f32;
            adam.begin_step();
            let wd = cfg.weight_decay as f32;
            let mut slot = 0;
            for idx in 0..model.filters.len() {
                finish_grad(&mut grads.filters[idx], &model.filters[idx], scale, wd);
                adam.update(slot, &mut model.filters[idx], &grads.filters[idx]);
                slot += 1;
                finish_grad(&mut grads.biases[idx], &model.biases[idx], scale, 0.0);
                adam.update(slot, &mut model.biases[idx], &grads.biases[idx]);
                slot += 1;
            }
            finish_grad(&mut grads.head_w, &model.head_w, scale, wd);
            adam.update(slot, &mut model.head_w, &grads.head_w);
            finish_grad(&mut grads.head_b, &model.head_b, scale, 0.0);
            adam.update(slot + 1, &mut model.head_b, &grads.head_b);
        }

        if let Some(val) = validation {
            let score = macro_f1_on_encoded(&model, val);
            if stopper.observe(score) {
                best = Some(model.clone());
            }
            if stopper.should_stop() {
                break;
            }
        }
    }
    Ok(best.unwrap_or(model))
}

fn finish_grad(grad: &mut Array2<f32>, param: &Array2<f32>, scale: f32, weight_decay: f32) {
    if weight_decay > 0.0 {
        for (g, &p) in grad.iter_mut().zip(param.iter()) {
            *g = *g * scale + weight_decay * p;
        }
    } else if scale != 1.0 {
        grad.mapv_inplace(|g| g * scale);
    }
}

pub(crate) fn macro_f1_on_encoded(model: &CnnModel<f32>, data: &[(Array2<f32>, usize)]) -> f64 {
    use crate::corpus::SentimentLabel;
    let mut golds = Vec::with_capacity(data.len());
    let mut preds = Vec::with_capacity(data.len());
    for (doc, label) in data {
        let logits = model.forward(doc);
        let pred = argmax3(&logits);
        golds.push(SentimentLabel::from_index(*label).unwrap());
        preds.push(SentimentLabel::from_index(pred).unwrap());
    }
    crate::evaluation::evaluate(&golds, &preds)
        .map(|r| r.macro_f1)
        .unwrap_or(0.0)
}

/// First maximum wins, matching the label-order tie rule.
pub fn argmax3<R: Real>(scores: &[R]) -> usize {
    let mut best = 0;
    for c in 1..scores.len() {
        if scores[c] > scores[best] {
            best = c;
        }
    }
    best
}
