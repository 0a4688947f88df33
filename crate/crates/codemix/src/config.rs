//! Run configuration: a line-oriented `key = value` file with
//! stage-scoped `[section]` headers. Command-line flags override file
//! values; every run writes its fully resolved configuration next to
//! its outputs so the run can be reproduced from the snapshot alone.

use std::fmt::Write as _;
use std::path::Path;

use crate::alignment::AlignmentConfig;
use crate::binio::fnv1a64;
use crate::classifiers::{BiLstmConfig, CnnConfig, SvmConfig};
use crate::embeddings::SkipGramConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    /// Force single-worker training and seeded sampling everywhere.
    pub deterministic: bool,
    /// Worker threads for embedding training (ignored when
    /// deterministic).
    pub workers: usize,
    pub verbose: bool,
    pub skipgram: SkipGramConfig,
    pub alignment: AlignmentConfig,
    pub svm: SvmConfig,
    pub bilstm: BiLstmConfig,
    pub cnn: CnnConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            deterministic: false,
            workers: 1,
            verbose: false,
            skipgram: SkipGramConfig::default(),
            alignment: AlignmentConfig::default(),
            svm: SvmConfig::default(),
            bilstm: BiLstmConfig::default(),
            cnn: CnnConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Parse over the defaults; unknown keys and sections are errors.
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                if !matches!(
                    section.as_str(),
                    "embeddings" | "alignment" | "svm" | "bilstm" | "cnn"
                ) {
                    return Err(Error::config(format!(
                        "unknown section [{section}] at line {}",
                        idx + 1
                    )));
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("expected `key = value` at line {}: {raw:?}", idx + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            self.apply_key(&section, key, value).map_err(|e| {
                Error::config(format!("line {}: {e}", idx + 1))
            })?;
        }
        Ok(())
    }

    fn apply_key(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse::<T>()
                .map_err(|_| Error::config(format!("bad value {value:?} for {key}")))
        }
        fn flag(key: &str, value: &str) -> Result<bool> {
            match value {
                "true" | "1" | "yes" | "on" => Ok(true),
                "false" | "0" | "no" | "off" => Ok(false),
                _ => Err(Error::config(format!("bad boolean {value:?} for {key}"))),
            }
        }

        match (section, key) {
            ("", "seed") => self.seed = num(key, value)?,
            ("", "deterministic") => self.deterministic = flag(key, value)?,
            ("", "workers") => self.workers = num(key, value)?,
            ("", "verbose") => self.verbose = flag(key, value)?,

            ("embeddings", "dimension") => self.skipgram.dimension = num(key, value)?,
            ("embeddings", "window") => self.skipgram.window = num(key, value)?,
            ("embeddings", "negative") => self.skipgram.negative = num(key, value)?,
            ("embeddings", "epochs") => self.skipgram.epochs = num(key, value)?,
            ("embeddings", "learning_rate") => self.skipgram.learning_rate = num(key, value)?,
            ("embeddings", "min_count") => self.skipgram.min_count = num(key, value)?,
            ("embeddings", "subsample") => self.skipgram.subsample = num(key, value)?,
            ("embeddings", "n_min") => self.skipgram.subword.n_min = num(key, value)?,
            ("embeddings", "n_max") => self.skipgram.subword.n_max = num(key, value)?,
            ("embeddings", "buckets") => self.skipgram.subword.bucket_count = num(key, value)?,

            ("alignment", "csls_k") => self.alignment.csls_k = num(key, value)?,
            ("alignment", "vocab_cutoff") => self.alignment.vocab_cutoff = num(key, value)?,
            ("alignment", "convergence_threshold") => {
                self.alignment.convergence_threshold = num(key, value)?
            }
            ("alignment", "keep_prob_initial") => {
                self.alignment.keep_prob_initial = num(key, value)?
            }
            ("alignment", "keep_prob_multiplier") => {
                self.alignment.keep_prob_multiplier = num(key, value)?
            }
            ("alignment", "max_iterations") => self.alignment.max_iterations = num(key, value)?,
            ("alignment", "advanced_transforms") => {
                self.alignment.advanced_transforms = flag(key, value)?
            }

            ("svm", "c") => self.svm.c = num(key, value)?,
            ("svm", "epochs") => self.svm.epochs = num(key, value)?,
            ("svm", "learning_rate") => self.svm.learning_rate = num(key, value)?,
            ("svm", "learning_rate_decay") => self.svm.learning_rate_decay = num(key, value)?,

            ("bilstm", "hidden") => self.bilstm.hidden = num(key, value)?,
            ("bilstm", "layers") => self.bilstm.layers = num(key, value)?,
            ("bilstm", "learning_rate") => self.bilstm.learning_rate = num(key, value)?,
            ("bilstm", "epochs") => self.bilstm.epochs = num(key, value)?,
            ("bilstm", "batch_size") => self.bilstm.batch_size = num(key, value)?,
            ("bilstm", "patience") => self.bilstm.patience = num(key, value)?,
            ("bilstm", "seq_len") => self.bilstm.seq_len = num(key, value)?,

            ("cnn", "kernel_sizes") => {
                let sizes: Result<Vec<usize>> = value
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::config(format!("bad kernel size {t:?}")))
                    })
                    .collect();
                self.cnn.kernel_sizes = sizes?;
            }
            ("cnn", "filters") => self.cnn.filters_per_size = num(key, value)?,
            ("cnn", "learning_rate") => self.cnn.learning_rate = num(key, value)?,
            ("cnn", "beta1") => self.cnn.beta1 = num(key, value)?,
            ("cnn", "beta2") => self.cnn.beta2 = num(key, value)?,
            ("cnn", "epsilon") => self.cnn.epsilon = num(key, value)?,
            ("cnn", "epochs") => self.cnn.epochs = num(key, value)?,
            ("cnn", "batch_size") => self.cnn.batch_size = num(key, value)?,
            ("cnn", "patience") => self.cnn.patience = num(key, value)?,
            ("cnn", "seq_len") => self.cnn.seq_len = num(key, value)?,
            ("cnn", "dropout") => self.cnn.dropout = num(key, value)?,
            ("cnn", "weight_decay") => self.cnn.weight_decay = num(key, value)?,

            _ => {
                return Err(Error::config(format!(
                    "unknown key {key:?} in section {:?}",
                    if section.is_empty() { "(global)" } else { section }
                )))
            }
        }
        Ok(())
    }

    /// Push the global seed/determinism settings into each stage
    /// config. Call after all overrides are applied.
    pub fn resolve(&mut self) {
        self.skipgram.seed = self.seed;
        self.skipgram.workers = if self.deterministic { 1 } else { self.workers };
        self.alignment.seed = self.seed;
        self.svm.seed = self.seed;
        self.bilstm.seed = self.seed;
        self.cnn.seed = self.seed;
    }

    /// Canonical serialization: parsing it back yields an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "deterministic = {}", self.deterministic);
        let _ = writeln!(out, "workers = {}", self.workers);
        let _ = writeln!(out, "verbose = {}", self.verbose);
        let _ = writeln!(out, "\n[embeddings]");
        let _ = writeln!(out, "dimension = {}", self.skipgram.dimension);
        let _ = writeln!(out, "window = {}", self.skipgram.window);
        let _ = writeln!(out, "negative = {}", self.skipgram.negative);
        let _ = writeln!(out, "epochs = {}", self.skipgram.epochs);
        let _ = writeln!(out, "learning_rate = {}", self.skipgram.learning_rate);
        let _ = writeln!(out, "min_count = {}", self.skipgram.min_count);
        let _ = writeln!(out, "subsample = {}", self.skipgram.subsample);
        let _ = writeln!(out, "n_min = {}", self.skipgram.subword.n_min);
        let _ = writeln!(out, "n_max = {}", self.skipgram.subword.n_max);
        let _ = writeln!(out, "buckets = {}", self.skipgram.subword.bucket_count);
        let _ = writeln!(out, "\n[alignment]");
        let _ = writeln!(out, "csls_k = {}", self.alignment.csls_k);
        let _ = writeln!(out, "vocab_cutoff = {}", self.alignment.vocab_cutoff);
        let _ = writeln!(
            out,
            "convergence_threshold = {}",
            self.alignment.convergence_threshold
        );
        let _ = writeln!(out, "keep_prob_initial = {}", self.alignment.keep_prob_initial);
        let _ = writeln!(
            out,
            "keep_prob_multiplier = {}",
            self.alignment.keep_prob_multiplier
        );
        let _ = writeln!(out, "max_iterations = {}", self.alignment.max_iterations);
        let _ = writeln!(
            out,
            "advanced_transforms = {}",
            self.alignment.advanced_transforms
        );
        let _ = writeln!(out, "\n[svm]");
        let _ = writeln!(out, "c = {}", self.svm.c);
        let _ = writeln!(out, "epochs = {}", self.svm.epochs);
        let _ = writeln!(out, "learning_rate = {}", self.svm.learning_rate);
        let _ = writeln!(out, "learning_rate_decay = {}", self.svm.learning_rate_decay);
        let _ = writeln!(out, "\n[bilstm]");
        let _ = writeln!(out, "hidden = {}", self.bilstm.hidden);
        let _ = writeln!(out, "layers = {}", self.bilstm.layers);
        let _ = writeln!(out, "learning_rate = {}", self.bilstm.learning_rate);
        let _ = writeln!(out, "epochs = {}", self.bilstm.epochs);
        let _ = writeln!(out, "batch_size = {}", self.bilstm.batch_size);
        let _ = writeln!(out, "patience = {}", self.bilstm.patience);
        let _ = writeln!(out, "seq_len = {}", self.bilstm.seq_len);
        let _ = writeln!(out, "\n[cnn]");
        let kernels: Vec<String> = self.cnn.kernel_sizes.iter().map(|k| k.to_string()).collect();
        let _ = writeln!(out, "kernel_sizes = {}", kernels.join(","));
        let _ = writeln!(out, "filters = {}", self.cnn.filters_per_size);
        let _ = writeln!(out, "learning_rate = {}", self.cnn.learning_rate);
        let _ = writeln!(out, "beta1 = {}", self.cnn.beta1);
        let _ = writeln!(out, "beta2 = {}", self.cnn.beta2);
        let _ = writeln!(out, "epsilon = {}", self.cnn.epsilon);
        let _ = writeln!(out, "epochs = {}", self.cnn.epochs);
        let _ = writeln!(out, "batch_size = {}", self.cnn.batch_size);
        let _ = writeln!(out, "patience = {}", self.cnn.patience);
        let _ = writeln!(out, "seq_len = {}", self.cnn.seq_len);
        let _ = writeln!(out, "dropout = {}", self.cnn.dropout);
        let _ = writeln!(out, "weight_decay = {}", self.cnn.weight_decay);
        out
    }

    pub fn hash(&self) -> u64 {
        fnv1a64(self.to_text().as_bytes())
    }

    /// Write the resolved snapshot next to an output file.
    pub fn write_snapshot(&self, output: &Path) -> Result<std::path::PathBuf> {
        let mut snapshot = output.as_os_str().to_owned();
        snapshot.push(".config");
        let path = std::path::PathBuf::from(snapshot);
        std::fs::write(&path, self.to_text())?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_text() {
        let cfg = RunConfig::default();
        let text = cfg.to_text();
        let parsed = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg, parsed);
        assert_eq!(cfg.hash(), parsed.hash());
    }

    #[test]
    fn overrides_apply_per_section() {
        let text = "seed = 9\ndeterministic = true\n[embeddings]\ndimension = 32\nbuckets = 100\n[cnn]\nkernel_sizes = 1,2,3\nfilters = 7\n";
        let mut cfg = RunConfig::parse(text).unwrap();
        cfg.resolve();
        assert_eq!(cfg.seed, 9);
        assert!(cfg.deterministic);
        assert_eq!(cfg.skipgram.dimension, 32);
        assert_eq!(cfg.skipgram.subword.bucket_count, 100);
        assert_eq!(cfg.cnn.kernel_sizes, vec![1, 2, 3]);
        assert_eq!(cfg.cnn.filters_per_size, 7);
        assert_eq!(cfg.skipgram.seed, 9);
        assert_eq!(cfg.skipgram.workers, 1);
        assert_eq!(cfg.cnn.seed, 9);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("nonsense = 1\n").is_err());
        assert!(RunConfig::parse("[embeddings]\ntypo_dimension = 5\n").is_err());
        assert!(RunConfig::parse("[made_up_section]\nx = 1\n").is_err());
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let cfg = RunConfig::parse("# a comment\n\nseed = 4\n").unwrap();
        assert_eq!(cfg.seed, 4);
    }

    #[test]
    fn snapshot_differs_when_config_differs() {
        let a = RunConfig::default();
        let b = RunConfig {
            seed: 2,
            ..RunConfig::default()
        };
        assert_ne!(a.hash(), b.hash());
    }
}
