//! Command implementations behind the `codemix` binary.
//!
//! Exit codes: 0 success, 1 domain error, 2 I/O error, 64 usage error.
//! Every command writes a resolved-config snapshot (`<output>.config`)
//! and a run log (`<output>.log`, timings and config hash) next to its
//! primary output. The log carries timings and is therefore excluded
//! from byte-reproducibility; everything else is deterministic given
//! `--deterministic` and a fixed seed.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::alignment::{
    self, merge_aligned, normalize_embeddings, project_full, self_learning_align, word_matrix,
};
use crate::classifiers::{
    load_classifier, save_classifier, train_bilstm, train_cnn, train_svm, write_predictions,
    ClassifierKind, TrainedClassifier,
};
use crate::config::RunConfig;
use crate::corpus::{
    filter_devanagari, parse_task_file, parse_task_file_infer, tokenize, Corpus, LabeledTweet,
    SentimentLabel, Split,
};
use crate::embeddings::{
    incremental_retrain, load_model, load_pretrained, model_hash, save_model, save_vec,
    train_skipgram, EmbeddingModel,
};
use crate::error::{Error, Result};
use crate::evaluation::{self, MetricsReport};

#[derive(Parser, Debug)]
#[command(
    name = "codemix",
    version,
    about = "Sentiment analysis toolkit for romanized code-mixed text"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Configuration file (`key = value` with `[sections]`); flags
    /// override file values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Random seed applied to every stage.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Single-worker, fully seeded mode: two runs produce byte-identical
    /// primary outputs.
    #[arg(long, global = true)]
    pub deterministic: bool,

    /// Worker threads for embedding training.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[arg(long, short = 'v', global = true)]
    pub verbose: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Filter Devanagari tweets out of a raw collection and tokenize.
    Prepare {
        /// Raw tweets: plain text (one per line) or JSON lines with a
        /// "text" field; detected automatically.
        #[arg(long)]
        input: PathBuf,
        /// Cleaned corpus: one tokenized tweet per line.
        #[arg(long)]
        output: PathBuf,
    },
    /// Train subword skip-gram embeddings on a cleaned corpus.
    TrainEmbeddings {
        /// Cleaned corpus file.
        #[arg(long)]
        input: PathBuf,
        /// Native embedding model output.
        #[arg(long)]
        output: PathBuf,
        /// Also export word vectors in `.vec` text format.
        #[arg(long)]
        vec: Option<PathBuf>,
    },
    /// Extend pre-trained vectors with new-corpus words; original rows
    /// stay frozen.
    Retrain {
        /// Pre-trained vectors (`.vec` text format).
        #[arg(long)]
        pretrained: PathBuf,
        /// Cleaned corpus file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        vec: Option<PathBuf>,
    },
    /// Project two embedding spaces into one via unsupervised
    /// self-learning and merge them.
    Align {
        /// Source embeddings (native model or `.vec`).
        #[arg(long)]
        source: PathBuf,
        /// Target embeddings (native model or `.vec`).
        #[arg(long)]
        target: PathBuf,
        /// Joint merged model (primary output).
        #[arg(long)]
        output: PathBuf,
        /// Projected source model.
        #[arg(long)]
        output_source: Option<PathBuf>,
        /// Induced dictionary as word pairs.
        #[arg(long)]
        dictionary: Option<PathBuf>,
        /// Source-side mapping matrix.
        #[arg(long)]
        mapping: Option<PathBuf>,
    },
    /// Train a sentence classifier on task-format data.
    TrainClassifier {
        /// svm, bilstm or cnn.
        #[arg(long)]
        kind: String,
        /// Embedding model (native or `.vec`).
        #[arg(long)]
        embeddings: PathBuf,
        /// Labeled training file in the shared-task format.
        #[arg(long)]
        train: PathBuf,
        /// Labeled validation file for early stopping.
        #[arg(long)]
        validation: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Predict labels for a task-format file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        /// Task-format file, labeled or not; labels are ignored.
        #[arg(long)]
        input: PathBuf,
        /// Records `<id>\t<label>\t<s_pos>\t<s_neg>\t<s_neu>`.
        #[arg(long)]
        output: PathBuf,
    },
    /// Score predictions against gold labels.
    Evaluate {
        /// Labeled task-format file.
        #[arg(long)]
        gold: PathBuf,
        /// Prediction records produced by `predict`.
        #[arg(long)]
        predictions: PathBuf,
        /// Plain-text report (also printed to stdout).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Comma-separated report.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Row name in the report.
        #[arg(long, default_value = "system")]
        system: String,
    },
    /// Compose a full system end to end.
    Pipeline {
        /// h-ind (align with pre-trained vectors) or h-ext
        /// (incrementally retrain pre-trained vectors).
        #[arg(long)]
        system: String,
        /// Labeled training file.
        #[arg(long)]
        train: PathBuf,
        /// Labeled validation file.
        #[arg(long)]
        validation: PathBuf,
        /// Cleaned unlabeled corpus for embedding training; falls back
        /// to the training text when absent.
        #[arg(long)]
        unlabeled: Option<PathBuf>,
        /// Pre-trained English vectors (`.vec`). Required for h-ind;
        /// optional for h-ext (absent means train from scratch on the
        /// corpus, standing in for unavailable pre-trained vectors).
        #[arg(long)]
        pretrained: Option<PathBuf>,
        /// Classifier kind: svm, bilstm or cnn.
        #[arg(long, default_value = "cnn")]
        kind: String,
        /// Output directory.
        #[arg(long)]
        outdir: PathBuf,
    },
}

/// Parse argv and run; returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Io(_) => 2,
                _ => 1,
            }
        }
    }
}

fn resolved_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.deterministic {
        cfg.deterministic = true;
    }
    if let Some(workers) = cli.workers {
        cfg.workers = workers;
    }
    if cli.verbose {
        cfg.verbose = true;
    }
    cfg.resolve();
    Ok(cfg)
}

struct RunLog {
    command: String,
    config_hash: u64,
    lines: Vec<String>,
    started: Instant,
    verbose: bool,
}

impl RunLog {
    fn new(command: &str, cfg: &RunConfig) -> Self {
        RunLog {
            command: command.to_string(),
            config_hash: cfg.hash(),
            lines: Vec::new(),
            started: Instant::now(),
            verbose: cfg.verbose,
        }
    }

    fn note(&mut self, line: impl Into<String>) {
        let line = line.into();
        if self.verbose {
            eprintln!("[codemix] {line}");
        }
        self.lines.push(line);
    }

    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f()?;
        self.note(format!("stage {name}: {} ms", start.elapsed().as_millis()));
        Ok(out)
    }

    fn write_next_to(&self, output: &Path) -> Result<()> {
        let mut text = String::new();
        let _ = writeln!(text, "command = {}", self.command);
        let _ = writeln!(text, "config_hash = {:#018x}", self.config_hash);
        for line in &self.lines {
            let _ = writeln!(text, "{line}");
        }
        let _ = writeln!(text, "total: {} ms", self.started.elapsed().as_millis());
        let mut path = output.as_os_str().to_owned();
        path.push(".log");
        std::fs::write(PathBuf::from(path), text)?;
        Ok(())
    }
}

fn open_reader(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

fn create_writer(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Load an embedding model from either the native container or a
/// `.vec` text file, detected by the magic bytes.
pub fn load_embeddings_any(path: &Path) -> Result<(EmbeddingModel, u64)> {
    let mut reader = open_reader(path)?;
    let head = reader.fill_buf()?;
    if head.starts_with(b"CMXE") {
        load_model(reader)
    } else {
        let loaded = load_pretrained(reader)?;
        for warning in &loaded.warnings {
            eprintln!("warning: {warning}");
        }
        let hash = model_hash(&loaded.model);
        Ok((loaded.model, hash))
    }
}

fn read_labeled(path: &Path, split: Split) -> Result<Corpus> {
    parse_task_file(open_reader(path)?, split)
}

fn execute(cli: Cli) -> Result<()> {
    let cfg = resolved_config(&cli)?;
    match cli.command {
        Command::Prepare { input, output } => cmd_prepare(&cfg, &input, &output),
        Command::TrainEmbeddings { input, output, vec } => {
            cmd_train_embeddings(&cfg, &input, &output, vec.as_deref())
        }
        Command::Retrain {
            pretrained,
            input,
            output,
            vec,
        } => cmd_retrain(&cfg, &pretrained, &input, &output, vec.as_deref()),
        Command::Align {
            source,
            target,
            output,
            output_source,
            dictionary,
            mapping,
        } => cmd_align(
            &cfg,
            &source,
            &target,
            &output,
            output_source.as_deref(),
            dictionary.as_deref(),
            mapping.as_deref(),
        ),
        Command::TrainClassifier {
            kind,
            embeddings,
            train,
            validation,
            output,
        } => cmd_train_classifier(
            &cfg,
            &kind,
            &embeddings,
            &train,
            validation.as_deref(),
            &output,
        ),
        Command::Predict {
            model,
            embeddings,
            input,
            output,
        } => cmd_predict(&cfg, &model, &embeddings, &input, &output),
        Command::Evaluate {
            gold,
            predictions,
            output,
            csv,
            system,
        } => cmd_evaluate(
            &cfg,
            &gold,
            &predictions,
            output.as_deref(),
            csv.as_deref(),
            &system,
        ),
        Command::Pipeline {
            system,
            train,
            validation,
            unlabeled,
            pretrained,
            kind,
            outdir,
        } => cmd_pipeline(
            &cfg,
            &system,
            &train,
            &validation,
            unlabeled.as_deref(),
            pretrained.as_deref(),
            &kind,
            &outdir,
        ),
    }
}

/// Extract the tweet text from one raw input line. JSON records must
/// carry a string "text" field.
fn raw_line_text(line: &str, jsonl: bool, lineno: usize) -> Result<String> {
    if !jsonl {
        return Ok(line.to_string());
    }
    let value: serde_json::Value = serde_json::from_str(line)
        .map_err(|e| Error::parse(lineno, format!("bad JSON record: {e}")))?;
    value
        .get("text")
        .and_then(|t| t.as_str())
        .map(str::to_owned)
        .ok_or_else(|| Error::parse(lineno, "JSON record has no string \"text\" field".to_string()))
}

fn cmd_prepare(cfg: &RunConfig, input: &Path, output: &Path) -> Result<()> {
    let mut log = RunLog::new("prepare", cfg);
    let reader = open_reader(input)?;

    let mut raw: Vec<(usize, String)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        raw.push((idx + 1, line));
    }
    // A leading '{' on the first record switches to JSON-lines mode.
    let jsonl = raw
        .first()
        .map(|(_, l)| l.trim_start().starts_with('{'))
        .unwrap_or(false);

    let mut texts = Vec::with_capacity(raw.len());
    for (lineno, line) in &raw {
        texts.push(raw_line_text(line, jsonl, *lineno)?);
    }
    let total = texts.len();

    let kept_texts = filter_devanagari(&texts);
    let mut writer = create_writer(output)?;
    let mut kept = 0usize;
    for text in &kept_texts {
        let tokens = tokenize(text);
        if tokens.is_empty() {
            continue;
        }
        kept += 1;
        writeln!(writer, "{}", tokens.join(" "))?;
    }
    writer.flush()?;

    log.note(format!("input = {}", input.display()));
    log.note(format!("mode = {}", if jsonl { "jsonl" } else { "text" }));
    log.note(format!("kept {kept} of {total}"));
    println!("kept {kept} of {total}");
    cfg.write_snapshot(output)?;
    log.write_next_to(output)?;
    Ok(())
}

fn cmd_train_embeddings(
    cfg: &RunConfig,
    input: &Path,
    output: &Path,
    vec: Option<&Path>,
) -> Result<()> {
    let mut log = RunLog::new("train-embeddings", cfg);
    let corpus = Corpus::from_cleaned_text(open_reader(input)?)?;
    log.note(format!("sentences = {}", corpus.len()));

    let (model, report) = log.stage("train", || train_skipgram(&corpus, &cfg.skipgram))?;
    log.note(format!(
        "vocabulary = {}, tokens = {}, loss = {:.4}",
        model.vocab.len(),
        report.tokens,
        report.loss
    ));

    let hash = log.stage("save", || save_model(&model, create_writer(output)?))?;
    log.note(format!("model_hash = {hash:#018x}"));
    if let Some(vec_path) = vec {
        save_vec(&model, create_writer(vec_path)?)?;
    }
    println!(
        "trained {} word vectors (dim {})",
        model.vocab.len(),
        model.dim()
    );
    cfg.write_snapshot(output)?;
    log.write_next_to(output)?;
    Ok(())
}

fn cmd_retrain(
    cfg: &RunConfig,
    pretrained: &Path,
    input: &Path,
    output: &Path,
    vec: Option<&Path>,
) -> Result<()> {
    let mut log = RunLog::new("retrain", cfg);
    let loaded = log.stage("load-pretrained", || load_pretrained(open_reader(pretrained)?))?;
    for warning in &loaded.warnings {
        eprintln!("warning: {warning}");
    }
    let corpus = Corpus::from_cleaned_text(open_reader(input)?)?;
    log.note(format!(
        "pretrained = {} words, corpus = {} sentences",
        loaded.model.vocab.len(),
        corpus.len()
    ));

    let (model, report) = log.stage("retrain", || {
        incremental_retrain(&loaded.model, &corpus, &cfg.skipgram)
    })?;
    let new_words = model.vocab.len() - loaded.model.vocab.len();
    log.note(format!(
        "new words = {new_words}, frozen rows = {}, loss = {:.4}",
        model.matrix.frozen_count(),
        report.loss
    ));

    let hash = log.stage("save", || save_model(&model, create_writer(output)?))?;
    log.note(format!("model_hash = {hash:#018x}"));
    if let Some(vec_path) = vec {
        save_vec(&model, create_writer(vec_path)?)?;
    }
    println!(
        "retrained: {} words total, {new_words} new, {} frozen",
        model.vocab.len(),
        model.matrix.frozen_count()
    );
    cfg.write_snapshot(output)?;
    log.write_next_to(output)?;
    Ok(())
}

fn cmd_align(
    cfg: &RunConfig,
    source: &Path,
    target: &Path,
    output: &Path,
    output_source: Option<&Path>,
    dictionary: Option<&Path>,
    mapping: Option<&Path>,
) -> Result<()> {
    let mut log = RunLog::new("align", cfg);
    let (mut src, _) = log.stage("load-source", || load_embeddings_any(source))?;
    let (mut trg, _) = log.stage("load-target", || load_embeddings_any(target))?;
    if src.dim() != trg.dim() {
        return Err(Error::DimensionMismatch {
            expected: src.dim(),
            got: trg.dim(),
        });
    }

    let zero_src = normalize_embeddings(&mut src.matrix);
    let zero_trg = normalize_embeddings(&mut trg.matrix);
    if zero_src + zero_trg > 0 {
        eprintln!("warning: {zero_src} source and {zero_trg} target rows have zero norm");
    }

    let cutoff = cfg.alignment.vocab_cutoff;
    let x = word_matrix(&src, cutoff);
    let z = word_matrix(&trg, cutoff);
    if x.nrows() < cutoff || z.nrows() < cutoff {
        eprintln!(
            "warning: cutoff {cutoff} clamped to {} source / {} target rows",
            x.nrows(),
            z.nrows()
        );
    }
    log.note(format!(
        "induction over {} x {} rows, dim {}",
        x.nrows(),
        z.nrows(),
        src.dim()
    ));

    let outcome = log.stage("self-learning", || {
        self_learning_align(&x, &z, &cfg.alignment)
    })?;
    if !outcome.converged {
        eprintln!(
            "warning: alignment hit max_iterations = {} before converging; using best state",
            cfg.alignment.max_iterations
        );
    }
    log.note(format!(
        "iterations = {}, objective = {:.6}, converged = {}, dictionary = {} pairs",
        outcome.iterations,
        outcome.objective,
        outcome.converged,
        outcome.dictionary.pairs().len()
    ));

    log.stage("project", || {
        project_full(&mut src.matrix, &outcome.w_source)?;
        project_full(&mut trg.matrix, &outcome.w_target)
    })?;

    let merged = merge_aligned(&src, &trg)?;
    let hash = log.stage("save", || save_model(&merged, create_writer(output)?))?;
    log.note(format!("joint model: {} words, hash = {hash:#018x}", merged.vocab.len()));

    if let Some(path) = output_source {
        save_model(&src, create_writer(path)?)?;
    }
    if let Some(path) = dictionary {
        alignment::write_dictionary(
            &outcome.dictionary,
            &src.vocab,
            &trg.vocab,
            create_writer(path)?,
        )?;
    }
    if let Some(path) = mapping {
        alignment::write_mapping(&outcome.w_source, create_writer(path)?)?;
    }
    println!(
        "aligned in {} iterations (objective {:.4}); joint vocabulary {}",
        outcome.iterations,
        outcome.objective,
        merged.vocab.len()
    );
    cfg.write_snapshot(output)?;
    log.write_next_to(output)?;
    Ok(())
}

fn cmd_train_classifier(
    cfg: &RunConfig,
    kind: &str,
    embeddings: &Path,
    train: &Path,
    validation: Option<&Path>,
    output: &Path,
) -> Result<()> {
    let mut log = RunLog::new("train-classifier", cfg);
    let kind: ClassifierKind = kind
        .parse()
        .map_err(|_| Error::config(format!("unknown classifier kind {kind:?}")))?;
    let (model, _) = log.stage("load-embeddings", || load_embeddings_any(embeddings))?;
    let train_corpus = read_labeled(train, Split::Train)?;
    let val_corpus = validation
        .map(|p| read_labeled(p, Split::Validation))
        .transpose()?;
    log.note(format!(
        "train = {} tweets, validation = {}",
        train_corpus.len(),
        val_corpus.as_ref().map(|c| c.len()).unwrap_or(0)
    ));

    let clf = log.stage("train", || match kind {
        ClassifierKind::Svm => train_svm(&train_corpus, &model, &cfg.svm),
        ClassifierKind::BiLstm => {
            train_bilstm(&train_corpus, val_corpus.as_ref(), &model, &cfg.bilstm)
        }
        ClassifierKind::Cnn => train_cnn(&train_corpus, val_corpus.as_ref(), &model, &cfg.cnn),
    })?;

    log.stage("save", || {
        save_classifier(&clf, create_writer(output)?).map(|_| ())
    })?;
    println!("trained {} classifier", clf.kind().as_str());
    cfg.write_snapshot(output)?;
    log.write_next_to(output)?;
    Ok(())
}

fn predict_corpus(
    clf: &TrainedClassifier,
    embeddings: &EmbeddingModel,
    corpus: &Corpus,
) -> Vec<(String, SentimentLabel, [f64; 3])> {
    corpus
        .tweets
        .iter()
        .map(|tweet| {
            let (label, scores) = clf.predict(tweet, embeddings);
            (tweet.id.clone(), label, scores)
        })
        .collect()
}

fn cmd_predict(
    cfg: &RunConfig,
    model: &Path,
    embeddings: &Path,
    input: &Path,
    output: &Path,
) -> Result<()> {
    let mut log = RunLog::new("predict", cfg);
    let clf = load_classifier(open_reader(model)?)?;
    let (emb, emb_hash) = load_embeddings_any(embeddings)?;
    if clf.embedding_hash != emb_hash {
        eprintln!(
            "warning: classifier was trained against embedding model {:#018x}, got {:#018x}",
            clf.embedding_hash, emb_hash
        );
    }
    let corpus = parse_task_file_infer(open_reader(input)?)?;
    log.note(format!("tweets = {}", corpus.len()));

    let records = log.stage("predict", || Ok(predict_corpus(&clf, &emb, &corpus)))?;
    write_predictions(&records, create_writer(output)?)?;
    println!("predicted {} tweets with {}", records.len(), clf.kind().as_str());
    cfg.write_snapshot(output)?;
    log.write_next_to(output)?;
    Ok(())
}

fn report_for(
    gold: &Corpus,
    records: &[(String, SentimentLabel, [f64; 3])],
) -> Result<MetricsReport> {
    let mut by_id: std::collections::HashMap<&str, SentimentLabel> = std::collections::HashMap::new();
    for tweet in &gold.tweets {
        let label = tweet
            .label
            .ok_or_else(|| Error::format(format!("gold tweet {} has no label", tweet.id)))?;
        by_id.insert(tweet.id.as_str(), label);
    }
    let mut golds = Vec::with_capacity(records.len());
    let mut preds = Vec::with_capacity(records.len());
    for (id, pred, _) in records {
        let gold_label = by_id
            .get(id.as_str())
            .ok_or_else(|| Error::format(format!("prediction for unknown tweet id {id}")))?;
        golds.push(*gold_label);
        preds.push(*pred);
    }
    if golds.len() != by_id.len() {
        eprintln!(
            "warning: {} gold tweets but {} predictions",
            by_id.len(),
            golds.len()
        );
    }
    evaluation::evaluate(&golds, &preds)
}

fn cmd_evaluate(
    cfg: &RunConfig,
    gold: &Path,
    predictions: &Path,
    output: Option<&Path>,
    csv: Option<&Path>,
    system: &str,
) -> Result<()> {
    let mut log = RunLog::new("evaluate", cfg);
    let gold_corpus = parse_task_file_infer(open_reader(gold)?)?;
    if !gold_corpus.tweets.iter().all(|t| t.label.is_some()) {
        return Err(Error::format("gold file must be fully labeled"));
    }
    let records = crate::classifiers::read_predictions(open_reader(predictions)?)?;
    let report = report_for(&gold_corpus, &records)?;
    log.note(format!(
        "evaluated = {}, macro_f1 = {:.4}",
        report.total, report.macro_f1
    ));

    let results = vec![(system.to_string(), report)];
    let table = evaluation::report_table(&results);
    print!("{table}");
    if let Some(path) = output {
        let mut w = create_writer(path)?;
        w.write_all(table.as_bytes())?;
        w.flush()?;
        cfg.write_snapshot(path)?;
        log.write_next_to(path)?;
    }
    if let Some(path) = csv {
        let mut w = create_writer(path)?;
        w.write_all(evaluation::report_csv(&results).as_bytes())?;
        w.flush()?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_pipeline(
    cfg: &RunConfig,
    system: &str,
    train: &Path,
    validation: &Path,
    unlabeled: Option<&Path>,
    pretrained: Option<&Path>,
    kind: &str,
    outdir: &Path,
) -> Result<()> {
    let mut log = RunLog::new("pipeline", cfg);
    let kind_parsed: ClassifierKind = kind
        .parse()
        .map_err(|_| Error::config(format!("unknown classifier kind {kind:?}")))?;
    std::fs::create_dir_all(outdir)?;

    let train_corpus = read_labeled(train, Split::Train)?;
    let val_corpus = read_labeled(validation, Split::Validation)?;
    let embed_corpus = match unlabeled {
        Some(path) => Corpus::from_cleaned_text(open_reader(path)?)?,
        None => {
            // Train embeddings on the task training text itself.
            let tweets = train_corpus
                .tweets
                .iter()
                .map(|t| LabeledTweet::new(t.id.clone(), t.tokens.clone()))
                .collect();
            Corpus::new(tweets, Split::Unlabeled)?
        }
    };
    log.note(format!(
        "train = {}, validation = {}, embedding corpus = {}",
        train_corpus.len(),
        val_corpus.len(),
        embed_corpus.len()
    ));

    let embeddings_path = outdir.join("embeddings.cmxe");
    let model = match system.to_ascii_lowercase().as_str() {
        "h-ind" | "hind" => {
            let pretrained_path = pretrained.ok_or_else(|| {
                Error::config("h-ind needs --pretrained English vectors to align against")
            })?;
            let mut hinglish = log.stage("train-embeddings", || {
                Ok(train_skipgram(&embed_corpus, &cfg.skipgram)?.0)
            })?;
            let loaded = load_pretrained(open_reader(pretrained_path)?)?;
            let mut english = loaded.model;

            normalize_embeddings(&mut hinglish.matrix);
            normalize_embeddings(&mut english.matrix);
            let x = word_matrix(&hinglish, cfg.alignment.vocab_cutoff);
            let z = word_matrix(&english, cfg.alignment.vocab_cutoff);
            let outcome = log.stage("align", || self_learning_align(&x, &z, &cfg.alignment))?;
            if !outcome.converged {
                eprintln!("warning: alignment stopped at max_iterations; using best state");
            }
            log.note(format!(
                "alignment objective = {:.6} after {} iterations",
                outcome.objective, outcome.iterations
            ));
            project_full(&mut hinglish.matrix, &outcome.w_source)?;
            project_full(&mut english.matrix, &outcome.w_target)?;
            merge_aligned(&hinglish, &english)?
        }
        "h-ext" | "hext" => match pretrained {
            Some(path) => {
                let loaded = load_pretrained(open_reader(path)?)?;
                log.stage("retrain", || {
                    Ok(incremental_retrain(&loaded.model, &embed_corpus, &cfg.skipgram)?.0)
                })?
            }
            None => log.stage("train-embeddings", || {
                Ok(train_skipgram(&embed_corpus, &cfg.skipgram)?.0)
            })?,
        },
        other => {
            return Err(Error::config(format!(
                "unknown system {other:?}; expected h-ind or h-ext"
            )))
        }
    };
    save_model(&model, create_writer(&embeddings_path)?)?;

    let clf = log.stage("train-classifier", || match kind_parsed {
        ClassifierKind::Svm => train_svm(&train_corpus, &model, &cfg.svm),
        ClassifierKind::BiLstm => train_bilstm(&train_corpus, Some(&val_corpus), &model, &cfg.bilstm),
        ClassifierKind::Cnn => train_cnn(&train_corpus, Some(&val_corpus), &model, &cfg.cnn),
    })?;
    save_classifier(&clf, create_writer(&outdir.join("classifier.cmxc"))?)?;

    let records = log.stage("predict", || Ok(predict_corpus(&clf, &model, &val_corpus)))?;
    write_predictions(&records, create_writer(&outdir.join("predictions.tsv"))?)?;

    let report = report_for(&val_corpus, &records)?;
    let system_name = format!("{}-{}", system.to_ascii_lowercase(), kind_parsed.as_str());
    let results = vec![(system_name, report.clone())];
    let table = evaluation::report_table(&results);
    let csv = evaluation::report_csv(&results);
    std::fs::write(outdir.join("report.txt"), &table)?;
    std::fs::write(outdir.join("report.csv"), csv)?;
    print!("{table}");
    log.note(format!("validation macro_f1 = {:.4}", report.macro_f1));

    let marker = outdir.join("run");
    cfg.write_snapshot(&marker)?;
    log.write_next_to(&marker)?;
    Ok(())
}
