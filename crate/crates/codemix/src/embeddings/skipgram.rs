//! Skip-gram with negative sampling over subword-composed vectors.
//!
//! Workers share the embedding tables without locks; racy updates are
//! tolerated by contract. One worker plus a fixed seed is the
//! deterministic mode used by tests. Frozen rows are enforced at the
//! single write site.

use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};
use std::thread;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::num::{dot, Real};
use crate::rng::Rng;

use super::matrix::{EmbeddingMatrix, EmbeddingModel};
use super::subword::SubwordIndex;
use super::vocab::Vocabulary;

/// Trainer hyperparameters. Defaults mirror the common reference
/// settings for this family of models.
#[derive(Debug, Clone, PartialEq)]
pub struct SkipGramConfig {
    pub dimension: usize,
    pub window: usize,
    pub negative: usize,
    pub epochs: usize,
    pub learning_rate: f32,
    pub min_count: u64,
    /// Frequent-word subsampling threshold; 0 disables.
    pub subsample: f64,
    pub seed: u64,
    /// Number of lock-free workers; 1 is the deterministic mode.
    pub workers: usize,
    pub subword: SubwordIndex,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        SkipGramConfig {
            dimension: 300,
            window: 5,
            negative: 5,
            epochs: 5,
            learning_rate: 0.05,
            min_count: 5,
            subsample: 1e-4,
            seed: 1,
            workers: 1,
            subword: SubwordIndex::default(),
        }
    }
}

impl SkipGramConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0
            || self.window == 0
            || self.learning_rate <= 0.0
            || self.workers == 0
        {
            return Err(Error::config(
                "dimension, window, learning_rate and workers must be positive",
            ));
        }
        Ok(())
    }
}

/// Linear decay to zero over the scheduled token count.
pub fn learning_rate_at(initial: f32, processed: u64, total_scheduled: u64) -> f32 {
    let remaining = 1.0 - processed as f64 / total_scheduled.max(1) as f64;
    initial * remaining.max(0.0) as f32
}

/// Walker alias table for sampling the unigram distribution raised to
/// the 3/4 power.
pub struct AliasTable {
    ids: Vec<u32>,
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    /// `weights` pairs ids with non-negative weights; zero-weight ids
    /// are never sampled. Returns `None` when nothing has mass.
    pub fn new(weights: &[(u32, f64)]) -> Option<AliasTable> {
        let positive: Vec<(u32, f64)> = weights.iter().copied().filter(|&(_, w)| w > 0.0).collect();
        if positive.is_empty() {
            return None;
        }
        let n = positive.len();
        let total: f64 = positive.iter().map(|&(_, w)| w).sum();
        let mut scaled: Vec<f64> = positive.iter().map(|&(_, w)| w * n as f64 / total).collect();
        let ids: Vec<u32> = positive.iter().map(|&(id, _)| id).collect();

        let mut prob = vec![0.0; n];
        let mut alias = vec![0u32; n];
        let mut small: Vec<usize> = Vec::new();
        let mut large: Vec<usize> = Vec::new();
        for (i, &s) in scaled.iter().enumerate() {
            if s < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while !small.is_empty() && !large.is_empty() {
            let s = small.pop().unwrap();
            let l = *large.last().unwrap();
            prob[s] = scaled[s];
            alias[s] = l as u32;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        for i in small.into_iter().chain(large) {
            prob[i] = 1.0;
        }
        Some(AliasTable { ids, prob, alias })
    }

    pub fn from_counts_pow(counts: &[u64], power: f64) -> Option<AliasTable> {
        let weights: Vec<(u32, f64)> = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as u32, (c as f64).powf(power)))
            .collect();
        AliasTable::new(&weights)
    }

    pub fn sample(&self, rng: &mut Rng) -> u32 {
        let slot = rng.next_below(self.prob.len());
        if rng.next_f64() < self.prob[slot] {
            self.ids[slot]
        } else {
            self.ids[self.alias[slot] as usize]
        }
    }
}

/// Reference formulation of the pairwise objective, shared between the
/// finite-difference tests and the trainer-equivalence test.
pub mod reference {
    use super::*;

    /// -log sig(v.u_pos) - sum_neg log sig(-v.u_neg)
    pub fn pair_loss<R: Real>(center: &[R], positive: &[R], negatives: &[Vec<R>]) -> R {
        let mut loss = -dot(center, positive).sigmoid().ln();
        for neg in negatives {
            loss -= (-dot(center, neg)).sigmoid().ln();
        }
        loss
    }

    pub struct PairGradients<R> {
        pub center: Vec<R>,
        pub positive: Vec<R>,
        pub negatives: Vec<Vec<R>>,
    }

    /// Analytic gradients of [`pair_loss`].
    pub fn pair_gradients<R: Real>(
        center: &[R],
        positive: &[R],
        negatives: &[Vec<R>],
    ) -> PairGradients<R> {
        let dim = center.len();
        let mut grad = PairGradients {
            center: vec![R::ZERO; dim],
            positive: vec![R::ZERO; dim],
            negatives: negatives.iter().map(|_| vec![R::ZERO; dim]).collect(),
        };
        let coeff_pos = dot(center, positive).sigmoid() - R::ONE;
        for k in 0..dim {
            grad.center[k] += coeff_pos * positive[k];
            grad.positive[k] = coeff_pos * center[k];
        }
        for (neg, gneg) in negatives.iter().zip(grad.negatives.iter_mut()) {
            let coeff = dot(center, neg).sigmoid();
            for k in 0..dim {
                grad.center[k] += coeff * neg[k];
                gneg[k] = coeff * center[k];
            }
        }
        grad
    }
}

/// One skip-gram update for a composed center vector against a positive
/// target and sampled negatives. Target rows are accessed through the
/// closures so the same math serves the lock-free trainer and plain
/// in-memory tests. Returns the pair loss.
///
/// `grad_center` receives alpha times the negated loss gradient, ready
/// to be added to the center's component rows.
#[allow(clippy::too_many_arguments)]
fn pair_update(
    center: &[f32],
    positive: usize,
    negatives: &[usize],
    alpha: f32,
    read_u: &mut dyn FnMut(usize, &mut [f32]),
    apply_u: &mut dyn FnMut(usize, f32, &[f32]),
    grad_center: &mut [f32],
    u_buf: &mut [f32],
) -> f64 {
    grad_center.iter_mut().for_each(|g| *g = 0.0);
    let mut loss = 0.0f64;

    read_u(positive, u_buf);
    let s = dot(center, u_buf).sigmoid();
    let g = (1.0 - s) * alpha;
    for (gc, &u) in grad_center.iter_mut().zip(u_buf.iter()) {
        *gc += g * u;
    }
    apply_u(positive, g, center);
    loss -= (s.max(1e-12) as f64).ln();

    for &neg in negatives {
        read_u(neg, u_buf);
        let s = dot(center, u_buf).sigmoid();
        let g = -s * alpha;
        for (gc, &u) in grad_center.iter_mut().zip(u_buf.iter()) {
            *gc += g * u;
        }
        apply_u(neg, g, center);
        loss -= ((1.0 - s).max(1e-12) as f64).ln();
    }
    loss
}

#[inline]
fn load_f32(cells: &[AtomicU32], i: usize) -> f32 {
    f32::from_bits(cells[i].load(Ordering::Relaxed))
}

#[inline]
fn store_f32(cells: &[AtomicU32], i: usize, v: f32) {
    cells[i].store(v.to_bits(), Ordering::Relaxed);
}

/// View an exclusively borrowed f32 slice as atomic cells. AtomicU32
/// has the same size, alignment and bit validity as u32/f32, and the
/// exclusive borrow guarantees the region stays valid for the lifetime.
fn atomic_cells(data: &mut [f32]) -> &[AtomicU32] {
    unsafe { std::slice::from_raw_parts(data.as_mut_ptr() as *const AtomicU32, data.len()) }
}

struct TrainContext<'a> {
    input: &'a [AtomicU32],
    output: &'a [AtomicU32],
    freeze: &'a [bool],
    /// Per vocabulary word: its own input row followed by its subword
    /// bucket rows.
    component_rows: &'a [Vec<u32>],
    counts: &'a [u64],
    alias: &'a AliasTable,
    dim: usize,
    cfg: &'a SkipGramConfig,
    total_tokens: u64,
    total_scheduled: u64,
    processed: &'a AtomicU64,
}

impl TrainContext<'_> {
    fn read_input_row(&self, row: usize, buf: &mut [f32]) {
        let off = row * self.dim;
        for (k, b) in buf.iter_mut().enumerate() {
            *b = load_f32(self.input, off + k);
        }
    }

    fn compose_center(&self, word: usize, buf: &mut [f32], tmp: &mut [f32]) {
        let rows = &self.component_rows[word];
        buf.iter_mut().for_each(|v| *v = 0.0);
        for &row in rows {
            self.read_input_row(row as usize, tmp);
            for (b, &t) in buf.iter_mut().zip(tmp.iter()) {
                *b += t;
            }
        }
        let inv = 1.0 / rows.len() as f32;
        buf.iter_mut().for_each(|v| *v *= inv);
    }

    /// Scatter the accumulated center gradient into the component rows,
    /// skipping frozen ones. The mean composition distributes 1/n of
    /// the gradient to each component.
    fn scatter_center(&self, word: usize, grad: &[f32]) {
        let rows = &self.component_rows[word];
        let inv = 1.0 / rows.len() as f32;
        for &row in rows {
            let row = row as usize;
            if self.freeze[row] {
                continue;
            }
            let off = row * self.dim;
            for (k, &g) in grad.iter().enumerate() {
                let cur = load_f32(self.input, off + k);
                store_f32(self.input, off + k, cur + inv * g);
            }
        }
    }

    fn keep_token(&self, word: u32, rng: &mut Rng) -> bool {
        if self.cfg.subsample <= 0.0 {
            return true;
        }
        let f = self.counts[word as usize] as f64;
        let cut = self.cfg.subsample * self.total_tokens as f64;
        if f <= cut {
            return true;
        }
        let r = cut / f;
        let keep = r.sqrt() + r;
        rng.next_f64() < keep
    }
}

fn run_worker(ctx: &TrainContext, sentences: &[Vec<u32>], mut rng: Rng) -> f64 {
    let dim = ctx.dim;
    let mut center = vec![0.0f32; dim];
    let mut tmp = vec![0.0f32; dim];
    let mut grad = vec![0.0f32; dim];
    let mut u_buf = vec![0.0f32; dim];
    let mut sen: Vec<u32> = Vec::new();
    let mut negatives: Vec<usize> = Vec::with_capacity(ctx.cfg.negative);
    let mut loss_sum = 0.0f64;

    for _epoch in 0..ctx.cfg.epochs {
        for sentence in sentences {
            let before = ctx
                .processed
                .fetch_add(sentence.len() as u64, Ordering::Relaxed);
            let alpha =
                learning_rate_at(ctx.cfg.learning_rate, before, ctx.total_scheduled);
            if alpha <= 0.0 {
                continue;
            }

            sen.clear();
            for &w in sentence {
                if ctx.keep_token(w, &mut rng) {
                    sen.push(w);
                }
            }

            for i in 0..sen.len() {
                let span = 1 + rng.next_below(ctx.cfg.window);
                let start = i.saturating_sub(span);
                let end = (i + span + 1).min(sen.len());
                for j in start..end {
                    if j == i {
                        continue;
                    }
                    let center_word = sen[i] as usize;
                    let positive = sen[j] as usize;

                    negatives.clear();
                    for _ in 0..ctx.cfg.negative {
                        // A candidate equal to the positive target is
                        // re-drawn a few times, then the slot is skipped.
                        for _attempt in 0..10 {
                            let cand = ctx.alias.sample(&mut rng) as usize;
                            if cand != positive {
                                negatives.push(cand);
                                break;
                            }
                        }
                    }

                    ctx.compose_center(center_word, &mut center, &mut tmp);
                    let out = ctx.output;
                    let off_dim = ctx.dim;
                    loss_sum += pair_update(
                        &center,
                        positive,
                        &negatives,
                        alpha,
                        &mut |row, buf: &mut [f32]| {
                            let off = row * off_dim;
                            for (k, b) in buf.iter_mut().enumerate() {
                                *b = load_f32(out, off + k);
                            }
                        },
                        &mut |row, scale, vec: &[f32]| {
                            let off = row * off_dim;
                            for (k, &v) in vec.iter().enumerate() {
                                let cur = load_f32(out, off + k);
                                store_f32(out, off + k, cur + scale * v);
                            }
                        },
                        &mut grad,
                        &mut u_buf,
                    );
                    ctx.scatter_center(center_word, &grad);
                }
            }
        }
    }
    loss_sum
}

/// Summary of one training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainReport {
    pub sentences: usize,
    pub tokens: u64,
    pub epochs: usize,
    pub loss: f64,
}

/// Train subword skip-gram embeddings from scratch.
pub fn train_skipgram(corpus: &Corpus, cfg: &SkipGramConfig) -> Result<(EmbeddingModel, TrainReport)> {
    cfg.validate()?;
    let vocab = Vocabulary::build(corpus, cfg.min_count)?;
    let mut rng = Rng::new(cfg.seed);
    let matrix = EmbeddingMatrix::init(
        vocab.len(),
        cfg.subword.bucket_count,
        cfg.dimension,
        &mut rng,
    );
    let mut model = EmbeddingModel {
        vocab,
        subwords: cfg.subword,
        matrix,
    };
    let report = train_in_place(&mut model, corpus, cfg, rng)?;
    Ok((model, report))
}

/// Extend pre-trained word vectors with new-corpus words and retrain.
///
/// Every row belonging to a pre-trained word is frozen: it contributes
/// to other rows' gradients as fixed context but receives no updates.
/// The dimension comes from the pre-trained model; `cfg.dimension` is
/// ignored. New words and subword buckets are trainable.
pub fn incremental_retrain(
    pretrained: &EmbeddingModel,
    corpus: &Corpus,
    cfg: &SkipGramConfig,
) -> Result<(EmbeddingModel, TrainReport)> {
    cfg.validate()?;
    if pretrained.matrix.bucket_rows() > 0 {
        return Err(Error::config(
            "incremental retraining expects a plain word-vector model without subword buckets",
        ));
    }
    if corpus.is_empty() {
        return Err(Error::format("retraining corpus is empty"));
    }
    let dim = pretrained.dim();

    let mut counts: std::collections::HashMap<&str, u64> = std::collections::HashMap::new();
    for sentence in corpus.sentences() {
        for token in sentence {
            *counts.entry(token.as_str()).or_insert(0) += 1;
        }
    }

    let mut vocab = pretrained.vocab.clone();
    for id in 0..vocab.len() {
        let c = counts.get(vocab.word(id)).copied().unwrap_or(0);
        vocab.set_count(id, c);
    }
    let mut new_words: Vec<(&str, u64)> = counts
        .iter()
        .filter(|&(w, &c)| c >= cfg.min_count.max(1) && !vocab.contains(w))
        .map(|(&w, &c)| (w, c))
        .collect();
    new_words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let frozen_rows = vocab.len();
    for (word, count) in new_words {
        vocab.append(word.to_string(), count);
    }

    let mut rng = Rng::new(cfg.seed);
    let mut matrix =
        EmbeddingMatrix::init(vocab.len(), cfg.subword.bucket_count, dim, &mut rng);
    matrix.input[..frozen_rows * dim]
        .copy_from_slice(&pretrained.matrix.input[..frozen_rows * dim]);
    matrix.freeze_rows(0..frozen_rows);

    let mut model = EmbeddingModel {
        vocab,
        subwords: cfg.subword,
        matrix,
    };
    let report = train_in_place(&mut model, corpus, cfg, rng)?;
    Ok((model, report))
}

fn train_in_place(
    model: &mut EmbeddingModel,
    corpus: &Corpus,
    cfg: &SkipGramConfig,
    worker_seed_source: Rng,
) -> Result<TrainReport> {
    let vocab_len = model.vocab.len();
    let sentences: Vec<Vec<u32>> = corpus
        .sentences()
        .map(|tokens| {
            tokens
                .iter()
                .filter_map(|t| model.vocab.id(t))
                .map(|id| id as u32)
                .collect::<Vec<u32>>()
        })
        .filter(|s| !s.is_empty())
        .collect();
    let total_tokens: u64 = sentences.iter().map(|s| s.len() as u64).sum();

    let component_rows: Vec<Vec<u32>> = (0..vocab_len)
        .map(|id| {
            let mut rows = vec![id as u32];
            if model.subwords.is_enabled() {
                for bucket in model.subwords.bucket_ids(model.vocab.word(id)) {
                    rows.push((vocab_len + bucket) as u32);
                }
            }
            rows
        })
        .collect();

    let report_base = TrainReport {
        sentences: sentences.len(),
        tokens: total_tokens,
        epochs: cfg.epochs,
        loss: 0.0,
    };
    if cfg.epochs == 0 || total_tokens == 0 {
        return Ok(report_base);
    }

    let alias = AliasTable::from_counts_pow(model.vocab.counts(), 0.75)
        .ok_or_else(|| Error::format("no words available for negative sampling"))?;

    let dim = model.matrix.dim();
    let counts = model.vocab.counts().to_vec();
    let processed = AtomicU64::new(0);
    let matrix = &mut model.matrix;
    let input_cells = atomic_cells(&mut matrix.input);
    let output_cells = atomic_cells(&mut matrix.output);

    let ctx = TrainContext {
        input: input_cells,
        output: output_cells,
        freeze: &matrix.freeze_mask,
        component_rows: &component_rows,
        counts: &counts,
        alias: &alias,
        dim,
        cfg,
        total_tokens,
        total_scheduled: cfg.epochs as u64 * total_tokens,
        processed: &processed,
    };

    let workers = cfg.workers.max(1).min(sentences.len().max(1));
    let loss = if workers == 1 {
        run_worker(&ctx, &sentences, worker_seed_source.fork(0))
    } else {
        let chunk = sentences.len().div_ceil(workers);
        thread::scope(|scope| {
            let handles: Vec<_> = sentences
                .chunks(chunk)
                .enumerate()
                .map(|(w, slice)| {
                    let rng = worker_seed_source.fork(w as u64);
                    let ctx = &ctx;
                    scope.spawn(move || run_worker(ctx, slice, rng))
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).sum()
        })
    };

    Ok(TrainReport {
        loss,
        ..report_base
    })
}
