//! Stacked bidirectional LSTM classifier trained from scratch with
//! plain SGD and softmax cross-entropy.
//!
//! Gate layout is [input | forget | cell | output], each `hidden`
//! wide. The document vector concatenates the top layer's output at
//! the last and first positions (2H values each), which contains the
//! final hidden state of both directions. Empty documents skip the
//! recurrence and classify through the bias path.

use ndarray::{s, Array1, Array2};

use crate::error::{Error, Result};
use crate::num::Real;
use crate::rng::Rng;

use super::cnn::argmax3;
use super::nn::{nll_loss_and_grad, uniform_init, EarlyStopper};

#[derive(Debug, Clone, PartialEq)]
pub struct BiLstmConfig {
    /// Hidden units per direction.
    pub hidden: usize,
    pub layers: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub patience: usize,
    /// Maximum tokens consumed per document.
    pub seq_len: usize,
    pub seed: u64,
}

impl Default for BiLstmConfig {
    fn default() -> Self {
        BiLstmConfig {
            hidden: 128,
            layers: 4,
            learning_rate: 1e-3,
            epochs: 20,
            batch_size: 32,
            patience: 3,
            seq_len: 64,
            seed: 1,
        }
    }
}

impl BiLstmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.layers == 0 {
            return Err(Error::config("hidden size and layer count must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmCell<R> {
    /// input -> gates, d_in x 4H
    pub w: Array2<R>,
    /// hidden -> gates, H x 4H
    pub u: Array2<R>,
    /// 1 x 4H
    pub b: Array2<R>,
}

impl<R: Real> LstmCell<R> {
    fn init(d_in: usize, hidden: usize, rng: &mut Rng) -> Self {
        let bound = (hidden as f64).sqrt().recip();
        let mut b = Array2::<R>::zeros((1, 4 * hidden));
        // Forget-gate bias starts at 1 so early training retains state.
        for j in hidden..2 * hidden {
            b[[0, j]] = R::ONE;
        }
        LstmCell {
            w: uniform_init((d_in, 4 * hidden), bound, rng),
            u: uniform_init((hidden, 4 * hidden), bound, rng),
            b,
        }
    }

    fn zeros_like(&self) -> LstmCell<R> {
        LstmCell {
            w: Array2::zeros(self.w.raw_dim()),
            u: Array2::zeros(self.u.raw_dim()),
            b: Array2::zeros(self.b.raw_dim()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiLstmModel<R> {
    /// Per layer: forward and backward cells.
    pub layers: Vec<(LstmCell<R>, LstmCell<R>)>,
    /// 3 x 4H.
    pub head_w: Array2<R>,
    /// 1 x 3.
    pub head_b: Array2<R>,
    pub hidden: usize,
    pub dim: usize,
}

/// Per-direction forward activations of one layer, all T x H.
struct DirCache<R> {
    i: Array2<R>,
    f: Array2<R>,
    g: Array2<R>,
    o: Array2<R>,
    c: Array2<R>,
    tc: Array2<R>,
    h: Array2<R>,
}

struct LayerCache<R> {
    input: Array2<R>,
    input_rev: Array2<R>,
    fwd: DirCache<R>,
    bwd: DirCache<R>,
    /// T x 2H, [forward h | time-aligned backward h].
    out: Array2<R>,
}

pub struct BiLstmGrads<R> {
    pub layers: Vec<(LstmCell<R>, LstmCell<R>)>,
    pub head_w: Array2<R>,
    pub head_b: Array2<R>,
}

impl<R: Real> BiLstmModel<R> {
    pub fn init(cfg: &BiLstmConfig, dim: usize, rng: &mut Rng) -> Self {
        let mut layers = Vec::with_capacity(cfg.layers);
        for layer in 0..cfg.layers {
            let d_in = if layer == 0 { dim } else { 2 * cfg.hidden };
            layers.push((
                LstmCell::init(d_in, cfg.hidden, rng),
                LstmCell::init(d_in, cfg.hidden, rng),
            ));
        }
        let doc_dim = 4 * cfg.hidden;
        BiLstmModel {
            layers,
            head_w: uniform_init((3, doc_dim), (doc_dim as f64).sqrt().recip(), rng),
            head_b: Array2::zeros((1, 3)),
            hidden: cfg.hidden,
            dim,
        }
    }

    pub fn zero_grads(&self) -> BiLstmGrads<R> {
        BiLstmGrads {
            layers: self
                .layers
                .iter()
                .map(|(f, b)| (f.zeros_like(), b.zeros_like()))
                .collect(),
            head_w: Array2::zeros(self.head_w.raw_dim()),
            head_b: Array2::zeros(self.head_b.raw_dim()),
        }
    }

    fn run_direction(&self, cell: &LstmCell<R>, xs: &Array2<R>) -> DirCache<R> {
        let t_len = xs.nrows();
        let h_dim = self.hidden;
        let mut cache = DirCache {
            i: Array2::zeros((t_len, h_dim)),
            f: Array2::zeros((t_len, h_dim)),
            g: Array2::zeros((t_len, h_dim)),
            o: Array2::zeros((t_len, h_dim)),
            c: Array2::zeros((t_len, h_dim)),
            tc: Array2::zeros((t_len, h_dim)),
            h: Array2::zeros((t_len, h_dim)),
        };
        let mut h_prev = Array1::<R>::zeros(h_dim);
        let mut c_prev = Array1::<R>::zeros(h_dim);
        for t in 0..t_len {
            let mut z = xs.row(t).dot(&cell.w);
            z += &h_prev.dot(&cell.u);
            z += &cell.b.row(0);
            for j in 0..h_dim {
                let i = z[j].sigmoid();
                let f = z[h_dim + j].sigmoid();
                let g = z[2 * h_dim + j].tanh();
                let o = z[3 * h_dim + j].sigmoid();
                let c = f * c_prev[j] + i * g;
                let tc = c.tanh();
                let h = o * tc;
                cache.i[[t, j]] = i;
                cache.f[[t, j]] = f;
                cache.g[[t, j]] = g;
                cache.o[[t, j]] = o;
                cache.c[[t, j]] = c;
                cache.tc[[t, j]] = tc;
                cache.h[[t, j]] = h;
            }
            h_prev.assign(&cache.h.row(t));
            c_prev.assign(&cache.c.row(t));
        }
        cache
    }

    /// Backward through one direction. `dh_seq` holds the gradient on
    /// each emitted hidden state; returns the gradient on the inputs.
    fn backprop_direction(
        &self,
        cell: &LstmCell<R>,
        xs: &Array2<R>,
        cache: &DirCache<R>,
        dh_seq: &Array2<R>,
        grads: &mut LstmCell<R>,
    ) -> Array2<R> {
        let t_len = xs.nrows();
        let h_dim = self.hidden;
        let mut dxs = Array2::<R>::zeros(xs.raw_dim());
        let mut dh_next = Array1::<R>::zeros(h_dim);
        let mut dc_next = Array1::<R>::zeros(h_dim);
        let mut dz = Array1::<R>::zeros(4 * h_dim);
        let one = R::ONE;

        for t in (0..t_len).rev() {
            for j in 0..h_dim {
                let dh = dh_seq[[t, j]] + dh_next[j];
                let o = cache.o[[t, j]];
                let tc = cache.tc[[t, j]];
                let dc = dc_next[j] + dh * o * (one - tc * tc);
                let i = cache.i[[t, j]];
                let f = cache.f[[t, j]];
                let g = cache.g[[t, j]];
                let c_prev = if t > 0 { cache.c[[t - 1, j]] } else { R::ZERO };

                let d_o = dh * tc;
                let d_i = dc * g;
                let d_g = dc * i;
                let d_f = dc * c_prev;

                dz[j] = d_i * i * (one - i);
                dz[h_dim + j] = d_f * f * (one - f);
                dz[2 * h_dim + j] = d_g * (one - g * g);
                dz[3 * h_dim + j] = d_o * o * (one - o);

                dc_next[j] = dc * f;
            }

            // Parameter gradients: outer products with the inputs.
            let x_t = xs.row(t);
            for (r, &xv) in x_t.iter().enumerate() {
                if xv != R::ZERO {
                    for (col, &dzv) in dz.iter().enumerate() {
                        grads.w[[r, col]] += xv * dzv;
                    }
                }
            }
            if t > 0 {
                let h_prev = cache.h.row(t - 1);
                for (r, &hv) in h_prev.iter().enumerate() {
                    if hv != R::ZERO {
                        for (col, &dzv) in dz.iter().enumerate() {
                            grads.u[[r, col]] += hv * dzv;
                        }
                    }
                }
            }
            for (col, &dzv) in dz.iter().enumerate() {
                grads.b[[0, col]] += dzv;
            }

            // Propagate to the inputs and the previous hidden state.
            let dx = cell.w.dot(&dz);
            dxs.row_mut(t).assign(&dx);
            dh_next = cell.u.dot(&dz);
        }
        dxs
    }

    fn forward_layers(&self, doc: &Array2<R>) -> Vec<LayerCache<R>> {
        let mut caches: Vec<LayerCache<R>> = Vec::with_capacity(self.layers.len());
        let mut input = doc.clone();
        for (fwd_cell, bwd_cell) in &self.layers {
            let t_len = input.nrows();
            let input_rev = reverse_rows(&input);
            let fwd = self.run_direction(fwd_cell, &input);
            let bwd = self.run_direction(bwd_cell, &input_rev);
            let mut out = Array2::<R>::zeros((t_len, 2 * self.hidden));
            for t in 0..t_len {
                out.slice_mut(s![t, ..self.hidden]).assign(&fwd.h.row(t));
                out.slice_mut(s![t, self.hidden..])
                    .assign(&bwd.h.row(t_len - 1 - t));
            }
            let next_input = out.clone();
            caches.push(LayerCache {
                input,
                input_rev,
                fwd,
                bwd,
                out,
            });
            input = next_input;
        }
        caches
    }

    /// Document vector: top-layer output at the last position followed
    /// by the output at the first position (4H values). Zero for empty
    /// documents.
    fn document_vector(&self, caches: &[LayerCache<R>]) -> Array1<R> {
        let width = 4 * self.hidden;
        let mut doc_vec = Array1::<R>::zeros(width);
        if let Some(top) = caches.last() {
            let t_len = top.out.nrows();
            if t_len > 0 {
                doc_vec
                    .slice_mut(s![..2 * self.hidden])
                    .assign(&top.out.row(t_len - 1));
                doc_vec
                    .slice_mut(s![2 * self.hidden..])
                    .assign(&top.out.row(0));
            }
        }
        doc_vec
    }

    fn logits_from(&self, doc_vec: &Array1<R>) -> Vec<R> {
        (0..3)
            .map(|c| self.head_w.row(c).dot(doc_vec) + self.head_b[[0, c]])
            .collect()
    }

    /// Logits for a document given as its true-length prefix (possibly
    /// zero rows).
    pub fn forward(&self, doc: &Array2<R>) -> Vec<R> {
        if doc.nrows() == 0 {
            return self.logits_from(&Array1::zeros(4 * self.hidden));
        }
        let caches = self.forward_layers(doc);
        self.logits_from(&self.document_vector(&caches))
    }

    pub fn loss(&self, doc: &Array2<R>, target: usize) -> R {
        nll_loss_and_grad(&self.forward(doc), target).0
    }

    /// Forward + backward for one document; accumulates parameter
    /// gradients and returns the loss.
    #[allow(clippy::needless_range_loop)]
    pub fn accumulate_gradients(
        &self,
        doc: &Array2<R>,
        target: usize,
        grads: &mut BiLstmGrads<R>,
    ) -> R {
        if doc.nrows() == 0 {
            let logits = self.logits_from(&Array1::zeros(4 * self.hidden));
            let (loss, dlogits) = nll_loss_and_grad(&logits, target);
            for c in 0..3 {
                grads.head_b[[0, c]] += dlogits[c];
            }
            return loss;
        }

        let caches = self.forward_layers(doc);
        let doc_vec = self.document_vector(&caches);
        let logits = self.logits_from(&doc_vec);
        let (loss, dlogits) = nll_loss_and_grad(&logits, target);

        let width = 4 * self.hidden;
        let mut ddoc = Array1::<R>::zeros(width);
        for c in 0..3 {
            let dl = dlogits[c];
            grads.head_b[[0, c]] += dl;
            for j in 0..width {
                grads.head_w[[c, j]] += dl * doc_vec[j];
                ddoc[j] += dl * self.head_w[[c, j]];
            }
        }

        // Seed the top layer's output gradient from the two positions
        // the document vector reads.
        let top_len = caches.last().unwrap().out.nrows();
        let mut dout = Array2::<R>::zeros((top_len, 2 * self.hidden));
        for j in 0..2 * self.hidden {
            dout[[top_len - 1, j]] += ddoc[j];
            dout[[0, j]] += ddoc[2 * self.hidden + j];
        }

        for (layer_idx, cache) in caches.iter().enumerate().rev() {
            let (fwd_cell, bwd_cell) = &self.layers[layer_idx];
            let (gfwd, gbwd) = &mut grads.layers[layer_idx];
            let t_len = cache.out.nrows();

            let dh_fwd = dout.slice(s![.., ..self.hidden]).to_owned();
            let mut dh_bwd_rev = Array2::<R>::zeros((t_len, self.hidden));
            for t in 0..t_len {
                for j in 0..self.hidden {
                    dh_bwd_rev[[t_len - 1 - t, j]] = dout[[t, self.hidden + j]];
                }
            }

            let dx_fwd = self.backprop_direction(fwd_cell, &cache.input, &cache.fwd, &dh_fwd, gfwd);
            let dx_bwd_rev =
                self.backprop_direction(bwd_cell, &cache.input_rev, &cache.bwd, &dh_bwd_rev, gbwd);

            if layer_idx > 0 {
                let mut dinput = dx_fwd;
                for t in 0..t_len {
                    for j in 0..dinput.ncols() {
                        dinput[[t, j]] += dx_bwd_rev[[t_len - 1 - t, j]];
                    }
                }
                dout = dinput;
            }
        }
        loss
    }
}

fn reverse_rows<R: Real>(m: &Array2<R>) -> Array2<R> {
    let t_len = m.nrows();
    let mut rev = Array2::<R>::zeros(m.raw_dim());
    for t in 0..t_len {
        rev.row_mut(t).assign(&m.row(t_len - 1 - t));
    }
    rev
}

/// Train on documents given as true-length prefixes (rows x dim).
pub fn train_bilstm_on_encoded(
    train: &[(Array2<f32>, usize)],
    validation: Option<&[(Array2<f32>, usize)]>,
    dim: usize,
    cfg: &BiLstmConfig,
) -> Result<BiLstmModel<f32>> {
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
    let mut model = BiLstmModel::<f32>::init(cfg, dim, &mut rng);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut stopper = EarlyStopper::new(cfg.patience);
    let mut best: Option<BiLstmModel<f32>> = None;
    let lr = cfg.learning_rate as f32;

    for _epoch in 0..cfg.epochs {
        rng.shuffle(&mut order);
        for batch in order.chunks(cfg.batch_size) {
            let mut grads = model.zero_grads();
            for &idx in batch {
                let (doc, label) = &train[idx];
                model.accumulate_gradients(doc, *label, &mut grads);
            }
            let scale = lr / batch.len() as f32;
            for (layer, (gf, gb)) in model.layers.iter_mut().zip(&grads.layers) {
                sgd_step(&mut layer.0, gf, scale);
                sgd_step(&mut layer.1, gb, scale);
            }
            model
                .head_w
                .zip_mut_with(&grads.head_w, |p, &g| *p -= scale * g);
            model
                .head_b
                .zip_mut_with(&grads.head_b, |p, &g| *p -= scale * g);
        }

        if let Some(val) = validation {
            let score = macro_f1_on_prefix_encoded(&model, val);
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

fn sgd_step(cell: &mut LstmCell<f32>, grads: &LstmCell<f32>, scale: f32) {
    cell.w.zip_mut_with(&grads.w, |p, &g| *p -= scale * g);
    cell.u.zip_mut_with(&grads.u, |p, &g| *p -= scale * g);
    cell.b.zip_mut_with(&grads.b, |p, &g| *p -= scale * g);
}

pub(crate) fn macro_f1_on_prefix_encoded(
    model: &BiLstmModel<f32>,
    data: &[(Array2<f32>, usize)],
) -> f64 {
    use crate::corpus::SentimentLabel;
    let mut golds = Vec::with_capacity(data.len());
    let mut preds = Vec::with_capacity(data.len());
    for (doc, label) in data {
        let pred = argmax3(&model.forward(doc));
        golds.push(SentimentLabel::from_index(*label).unwrap());
        preds.push(SentimentLabel::from_index(pred).unwrap());
    }
    crate::evaluation::evaluate(&golds, &preds)
        .map(|r| r.macro_f1)
        .unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::nn::{finite_difference, gradient_relative_error, softmax};

    fn tiny_cfg(hidden: usize, layers: usize) -> BiLstmConfig {
        BiLstmConfig {
            hidden,
            layers,
            seq_len: 8,
            ..BiLstmConfig::default()
        }
    }

    fn random_doc(l: usize, d: usize, rng: &mut Rng) -> Array2<f64> {
        Array2::from_shape_fn((l, d), |_| rng.next_gaussian() * 0.6)
    }

    #[test]
    fn forward_shapes_and_softmax_rows() {
        let mut rng = Rng::new(2);
        let cfg = tiny_cfg(5, 2);
        let model = BiLstmModel::<f64>::init(&cfg, 4, &mut rng);
        for l in [1usize, 3, 7] {
            let doc = random_doc(l, 4, &mut rng);
            let logits = model.forward(&doc);
            assert_eq!(logits.len(), 3);
            let probs = softmax(&logits);
            let sum: f64 = probs.iter().sum();
            assert!((sum - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn empty_document_takes_bias_path() {
        let mut rng = Rng::new(3);
        let cfg = tiny_cfg(4, 2);
        let mut model = BiLstmModel::<f64>::init(&cfg, 5, &mut rng);
        model.head_b[[0, 0]] = 0.3;
        model.head_b[[0, 1]] = -0.1;
        model.head_b[[0, 2]] = 1.7;
        let doc = Array2::<f64>::zeros((0, 5));
        let logits = model.forward(&doc);
        assert_eq!(logits, vec![0.3, -0.1, 1.7]);
    }

    #[test]
    fn gradients_match_finite_differences_single_layer() {
        // The contract instance: 2 tokens, d=4, hidden=3, 1 layer.
        let mut rng = Rng::new(11);
        let cfg = tiny_cfg(3, 1);
        let model = BiLstmModel::<f64>::init(&cfg, 4, &mut rng);
        let doc = random_doc(2, 4, &mut rng);
        check_all_gradients(&model, &doc, 0);
    }

    #[test]
    fn gradients_match_finite_differences_stacked_bidirectional() {
        let mut rng = Rng::new(13);
        let cfg = tiny_cfg(3, 2);
        let model = BiLstmModel::<f64>::init(&cfg, 3, &mut rng);
        let doc = random_doc(4, 3, &mut rng);
        check_all_gradients(&model, &doc, 2);
    }

    fn check_all_gradients(model: &BiLstmModel<f64>, doc: &Array2<f64>, target: usize) {
        let mut grads = model.zero_grads();
        model.accumulate_gradients(doc, target, &mut grads);
        let h = 1e-5;

        for layer in 0..model.layers.len() {
            for dir in 0..2 {
                for tensor in 0..3 {
                    let pick = |m: &BiLstmModel<f64>| -> Array2<f64> {
                        let cell = if dir == 0 {
                            &m.layers[layer].0
                        } else {
                            &m.layers[layer].1
                        };
                        match tensor {
                            0 => cell.w.clone(),
                            1 => cell.u.clone(),
                            _ => cell.b.clone(),
                        }
                    };
                    let base = pick(model);
                    let numeric = finite_difference(
                        &base,
                        |cand| {
                            let mut m = model.clone();
                            {
                                let cell = if dir == 0 {
                                    &mut m.layers[layer].0
                                } else {
                                    &mut m.layers[layer].1
                                };
                                match tensor {
                                    0 => cell.w = cand.clone(),
                                    1 => cell.u = cand.clone(),
                                    _ => cell.b = cand.clone(),
                                }
                            }
                            m.loss(doc, target)
                        },
                        h,
                    );
                    let analytic = {
                        let cell = if dir == 0 {
                            &grads.layers[layer].0
                        } else {
                            &grads.layers[layer].1
                        };
                        match tensor {
                            0 => cell.w.clone(),
                            1 => cell.u.clone(),
                            _ => cell.b.clone(),
                        }
                    };
                    let err = gradient_relative_error(&analytic, &numeric);
                    assert!(
                        err < 1e-4,
                        "layer {layer} dir {dir} tensor {tensor}: gradient error {err}"
                    );
                }
            }
        }

        let numeric = finite_difference(
            &model.head_w,
            |cand| {
                let mut m = model.clone();
                m.head_w = cand.clone();
                m.loss(doc, target)
            },
            h,
        );
        let err = gradient_relative_error(&grads.head_w, &numeric);
        assert!(err < 1e-4, "head_w gradient error {err}");

        let numeric = finite_difference(
            &model.head_b,
            |cand| {
                let mut m = model.clone();
                m.head_b = cand.clone();
                m.loss(doc, target)
            },
            h,
        );
        let err = gradient_relative_error(&grads.head_b, &numeric);
        assert!(err < 1e-4, "head_b gradient error {err}");
    }

    #[test]
    fn learns_order_sensitive_toy_problem() {
        // Class depends on whether the spike comes first or last — mean
        // pooling cannot solve this, recurrence can.
        let mut rng = Rng::new(7);
        let mut data = Vec::new();
        for i in 0..40 {
            let class = i % 2;
            let mut doc = Array2::<f32>::zeros((4, 2));
            if class == 0 {
                doc[[0, 0]] = 1.0;
                doc[[3, 1]] = 1.0;
            } else {
                doc[[0, 1]] = 1.0;
                doc[[3, 0]] = 1.0;
            }
            for v in doc.iter_mut() {
                *v += 0.05 * (rng.next_f32() - 0.5);
            }
            data.push((doc, class));
        }
        let cfg = BiLstmConfig {
            hidden: 8,
            layers: 1,
            learning_rate: 0.05,
            epochs: 120,
            batch_size: 8,
            seq_len: 4,
            ..BiLstmConfig::default()
        };
        let model = train_bilstm_on_encoded(&data, None, 2, &cfg).unwrap();
        let correct = data
            .iter()
            .filter(|(doc, label)| argmax3(&model.forward(doc)) == *label)
            .count();
        assert!(correct >= 38, "{correct}/40");
    }

    #[test]
    fn single_class_data_is_rejected() {
        let data: Vec<(Array2<f32>, usize)> = (0..4)
            .map(|_| (Array2::<f32>::zeros((3, 2)), 0usize))
            .collect();
        let cfg = BiLstmConfig {
            hidden: 3,
            layers: 1,
            seq_len: 3,
            ..BiLstmConfig::default()
        };
        assert!(matches!(
            train_bilstm_on_encoded(&data, None, 2, &cfg),
            Err(crate::error::Error::SingleClass(_))
        ));
    }

    #[test]
    fn deterministic_training() {
        let mut rng = Rng::new(23);
        let data: Vec<(Array2<f32>, usize)> = (0..12)
            .map(|i| {
                (
                    Array2::from_shape_fn((3, 4), |_| rng.next_f32()),
                    i % 3,
                )
            })
            .collect();
        let cfg = BiLstmConfig {
            hidden: 4,
            layers: 2,
            epochs: 3,
            seq_len: 3,
            ..BiLstmConfig::default()
        };
        let a = train_bilstm_on_encoded(&data, None, 4, &cfg).unwrap();
        let b = train_bilstm_on_encoded(&data, None, 4, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
