//! Binary container for trained classifiers: magic, version, kind,
//! the embedding identity hash, the config, then the parameter tensors
//! as little-endian f32 with explicit shapes.

use std::io::{Read, Write};

use ndarray::{Array1, Array2};

use crate::binio::{HashingReader, HashingWriter};
use crate::error::{Error, Result};

use super::bilstm::{BiLstmConfig, BiLstmModel, LstmCell};
use super::cnn::{CnnConfig, CnnModel};
use super::svm::{SvmConfig, SvmModel};
use super::{ClassifierParams, TrainedClassifier};

const MAGIC: &[u8; 4] = b"CMXC";
const VERSION: u32 = 1;

fn put_tensor(w: &mut HashingWriter<impl Write>, t: &Array2<f32>) -> Result<()> {
    w.put_u32(t.nrows() as u32)?;
    w.put_u32(t.ncols() as u32)?;
    let flat: Vec<f32> = t.iter().copied().collect();
    w.put_f32s(&flat)
}

fn take_tensor(r: &mut HashingReader<impl Read>) -> Result<Array2<f32>> {
    let rows = r.take_u32()? as usize;
    let cols = r.take_u32()? as usize;
    let data = r.take_f32s(rows * cols)?;
    Array2::from_shape_vec((rows, cols), data)
        .map_err(|_| Error::format("bad tensor shape in classifier file"))
}

fn put_array1(w: &mut HashingWriter<impl Write>, t: &Array1<f32>) -> Result<()> {
    w.put_u32(1)?;
    w.put_u32(t.len() as u32)?;
    let flat: Vec<f32> = t.iter().copied().collect();
    w.put_f32s(&flat)
}

fn take_array1(r: &mut HashingReader<impl Read>) -> Result<Array1<f32>> {
    let t = take_tensor(r)?;
    if t.nrows() != 1 {
        return Err(Error::format("expected a 1 x n tensor"));
    }
    Ok(t.row(0).to_owned())
}

pub fn save_classifier(clf: &TrainedClassifier, writer: impl Write) -> Result<u64> {
    let mut w = HashingWriter::new(writer);
    w.put(MAGIC)?;
    w.put_u32(VERSION)?;
    w.put_u64(clf.embedding_hash)?;
    match &clf.params {
        ClassifierParams::Svm(model, cfg) => {
            w.put_u8(0)?;
            w.put_f64(cfg.c)?;
            w.put_u64(cfg.epochs as u64)?;
            w.put_f64(cfg.learning_rate)?;
            w.put_f64(cfg.learning_rate_decay)?;
            w.put_u64(cfg.seed)?;
            put_tensor(&mut w, &model.weights)?;
            put_array1(&mut w, &model.bias)?;
        }
        ClassifierParams::BiLstm(model, cfg) => {
            w.put_u8(1)?;
            w.put_u64(cfg.hidden as u64)?;
            w.put_u64(cfg.layers as u64)?;
            w.put_f64(cfg.learning_rate)?;
            w.put_u64(cfg.epochs as u64)?;
            w.put_u64(cfg.batch_size as u64)?;
            w.put_u64(cfg.patience as u64)?;
            w.put_u64(cfg.seq_len as u64)?;
            w.put_u64(cfg.seed)?;
            w.put_u64(model.dim as u64)?;
            w.put_u32(model.layers.len() as u32)?;
            for (fwd, bwd) in &model.layers {
                for cell in [fwd, bwd] {
                    put_tensor(&mut w, &cell.w)?;
                    put_tensor(&mut w, &cell.u)?;
                    put_tensor(&mut w, &cell.b)?;
                }
            }
            put_tensor(&mut w, &model.head_w)?;
            put_tensor(&mut w, &model.head_b)?;
        }
        ClassifierParams::Cnn(model, cfg) => {
            w.put_u8(2)?;
            w.put_u32(cfg.kernel_sizes.len() as u32)?;
            for &k in &cfg.kernel_sizes {
                w.put_u64(k as u64)?;
            }
            w.put_u64(cfg.filters_per_size as u64)?;
            w.put_f64(cfg.learning_rate)?;
            w.put_f64(cfg.beta1)?;
            w.put_f64(cfg.beta2)?;
            w.put_f64(cfg.epsilon)?;
            w.put_u64(cfg.epochs as u64)?;
            w.put_u64(cfg.batch_size as u64)?;
            w.put_u64(cfg.patience as u64)?;
            w.put_u64(cfg.seq_len as u64)?;
            w.put_f64(cfg.dropout)?;
            w.put_f64(cfg.weight_decay)?;
            w.put_u64(cfg.seed)?;
            w.put_u64(model.dim as u64)?;
            w.put_u32(model.filters.len() as u32)?;
            for (filter, bias) in model.filters.iter().zip(&model.biases) {
                put_tensor(&mut w, filter)?;
                put_tensor(&mut w, bias)?;
            }
            put_tensor(&mut w, &model.head_w)?;
            put_tensor(&mut w, &model.head_b)?;
        }
    }
    Ok(w.hash.0)
}

pub fn load_classifier(reader: impl Read) -> Result<TrainedClassifier> {
    let mut r = HashingReader::new(reader);
    let mut magic = [0u8; 4];
    r.take(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::format("not a classifier file (bad magic)"));
    }
    let version = r.take_u32()?;
    if version != VERSION {
        return Err(Error::format(format!(
            "unsupported classifier version {version}"
        )));
    }
    let embedding_hash = r.take_u64()?;
    let kind = r.take_u8()?;
    let params = match kind {
        0 => {
            let cfg = SvmConfig {
                c: r.take_f64()?,
                epochs: r.take_u64()? as usize,
                learning_rate: r.take_f64()?,
                learning_rate_decay: r.take_f64()?,
                seed: r.take_u64()?,
            };
            let weights = take_tensor(&mut r)?;
            let bias = take_array1(&mut r)?;
            ClassifierParams::Svm(SvmModel { weights, bias }, cfg)
        }
        1 => {
            let cfg = BiLstmConfig {
                hidden: r.take_u64()? as usize,
                layers: r.take_u64()? as usize,
                learning_rate: r.take_f64()?,
                epochs: r.take_u64()? as usize,
                batch_size: r.take_u64()? as usize,
                patience: r.take_u64()? as usize,
                seq_len: r.take_u64()? as usize,
                seed: r.take_u64()?,
            };
            let dim = r.take_u64()? as usize;
            let n_layers = r.take_u32()? as usize;
            let mut layers = Vec::with_capacity(n_layers);
            for _ in 0..n_layers {
                let mut cells = Vec::with_capacity(2);
                for _ in 0..2 {
                    cells.push(LstmCell {
                        w: take_tensor(&mut r)?,
                        u: take_tensor(&mut r)?,
                        b: take_tensor(&mut r)?,
                    });
                }
                let bwd = cells.pop().unwrap();
                let fwd = cells.pop().unwrap();
                layers.push((fwd, bwd));
            }
            let head_w = take_tensor(&mut r)?;
            let head_b = take_tensor(&mut r)?;
            ClassifierParams::BiLstm(
                BiLstmModel {
                    layers,
                    head_w,
                    head_b,
                    hidden: cfg.hidden,
                    dim,
                },
                cfg,
            )
        }
        2 => {
            let n_kernels = r.take_u32()? as usize;
            let mut kernel_sizes = Vec::with_capacity(n_kernels);
            for _ in 0..n_kernels {
                kernel_sizes.push(r.take_u64()? as usize);
            }
            let cfg = CnnConfig {
                kernel_sizes: kernel_sizes.clone(),
                filters_per_size: r.take_u64()? as usize,
                learning_rate: r.take_f64()?,
                beta1: r.take_f64()?,
                beta2: r.take_f64()?,
                epsilon: r.take_f64()?,
                epochs: r.take_u64()? as usize,
                batch_size: r.take_u64()? as usize,
                patience: r.take_u64()? as usize,
                seq_len: r.take_u64()? as usize,
                dropout: r.take_f64()?,
                weight_decay: r.take_f64()?,
                seed: r.take_u64()?,
            };
            let dim = r.take_u64()? as usize;
            let n_filter_sets = r.take_u32()? as usize;
            let mut filters = Vec::with_capacity(n_filter_sets);
            let mut biases = Vec::with_capacity(n_filter_sets);
            for _ in 0..n_filter_sets {
                filters.push(take_tensor(&mut r)?);
                biases.push(take_tensor(&mut r)?);
            }
            let head_w = take_tensor(&mut r)?;
            let head_b = take_tensor(&mut r)?;
            ClassifierParams::Cnn(
                CnnModel {
                    kernel_sizes,
                    filters,
                    biases,
                    head_w,
                    head_b,
                    dim,
                    seq_len: cfg.seq_len,
                },
                cfg,
            )
        }
        other => {
            return Err(Error::format(format!("unknown classifier kind {other}")));
        }
    };
    Ok(TrainedClassifier {
        params,
        embedding_hash,
    })
}
