//! Thin command-line front end over the library. Every subcommand is a small
//! wiring of corpus loading, one library call, and serialized output; the
//! `examples/` directory shows the same capabilities as library code.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use weaksent::corpus::{Corpus, CorpusFormat};
use weaksent::error::{Error, Result};
use weaksent::evaluation::{evaluate_runs, EvalMethod, Lexicon};
use weaksent::extraction::{
    builtin_adjectives, default_rules, extract_opinion_words, fallback_extract, load_parses,
    ExtractionRecord,
};
use weaksent::model::{load_checkpoint, save_checkpoint, EncoderKind};
use weaksent::pretrain::{compute_pseudo_labels, pretrain_classifier, KeywordSpec};
use weaksent::training::{
    grid_search, predict, train, GridSpec, OptimizerKind, TrainConfig,
};

#[derive(Parser)]
#[command(name = "weaksent", about = "Weakly supervised sentiment classification", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Corpus statistics as a single JSON record on stdout.
    Stats {
        #[arg(long)]
        corpus: PathBuf,
        /// Extraction records to attach before computing statistics.
        #[arg(long)]
        extractions: Option<PathBuf>,
    },
    /// Extract opinion words from dependency parses.
    Extract {
        #[arg(long)]
        corpus: PathBuf,
        /// Parse file: blank-line-separated blocks, first line the document
        /// id, then `index<TAB>token<TAB>pos<TAB>head<TAB>relation` rows.
        #[arg(long)]
        parses: PathBuf,
        /// Use the built-in adjective list for documents without a parse.
        #[arg(long)]
        fallback: bool,
        /// Output file (line-delimited JSON); stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Keyword pseudo-labeling plus classifier pretraining only.
    Pretrain {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        keywords: KeywordArgs,
        #[command(flatten)]
        config: ConfigFlags,
        /// Checkpoint output path.
        #[arg(long)]
        output: PathBuf,
    },
    /// Full training: pretrain, then mini-batch ascent on the variational
    /// objective, optionally with the pairwise posterior regularizer.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        extractions: PathBuf,
        #[command(flatten)]
        keywords: KeywordArgs,
        #[command(flatten)]
        config: ConfigFlags,
        /// Checkpoint output path.
        #[arg(long)]
        output: PathBuf,
        /// Per-step training log, one JSON record per line.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Score a method against gold labels over one or more seeds.
    Evaluate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        extractions: Option<PathBuf>,
        /// lexicon | keyword-pretrain | variational | variational-pr
        #[arg(long)]
        method: String,
        #[command(flatten)]
        keywords: KeywordArgs,
        #[command(flatten)]
        config: ConfigFlags,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        /// Positive / negative word lists for the lexicon baseline.
        #[arg(long)]
        lexicon_positive: Option<PathBuf>,
        #[arg(long)]
        lexicon_negative: Option<PathBuf>,
        /// Write the full result record as JSON here as well.
        #[arg(long)]
        results: Option<PathBuf>,
    },
    /// Two-stage hyperparameter search for the regularizer.
    Grid {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        extractions: PathBuf,
        /// Gold-labeled development corpus used for selection.
        #[arg(long)]
        dev: PathBuf,
        #[command(flatten)]
        keywords: KeywordArgs,
        #[command(flatten)]
        config: ConfigFlags,
        #[arg(long, value_delimiter = ',')]
        gamma1: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        gamma2: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        beta: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        #[arg(long)]
        results: Option<PathBuf>,
    },
    /// Predict labels for a corpus with a saved checkpoint.
    Predict {
        #[arg(long)]
        corpus: PathBuf,
        /// Extraction records matching the ones used at training time; the
        /// checkpoint's vocabulary hashes are verified against the corpus.
        #[arg(long)]
        extractions: Option<PathBuf>,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct KeywordArgs {
    /// JSON file mapping class label -> keyword list.
    #[arg(long)]
    keywords: Option<PathBuf>,
    /// Built-in keyword set: yelp | imdb | amazon.
    #[arg(long)]
    preset: Option<String>,
}

impl KeywordArgs {
    fn resolve(&self, class_labels: &[String]) -> Result<KeywordSpec> {
        match (&self.keywords, self.preset.as_deref()) {
            (Some(path), None) => KeywordSpec::load(path, class_labels),
            (None, Some("yelp")) => Ok(KeywordSpec::yelp()),
            (None, Some("imdb")) => Ok(KeywordSpec::imdb()),
            (None, Some("amazon")) => Ok(KeywordSpec::amazon()),
            (None, Some(other)) => Err(Error::InvalidConfig(format!(
                "unknown keyword preset `{other}`"
            ))),
            (None, None) => Err(Error::InvalidConfig(
                "need --keywords FILE or --preset NAME".into(),
            )),
            (Some(_), Some(_)) => Err(Error::InvalidConfig(
                "--keywords and --preset are mutually exclusive".into(),
            )),
        }
    }
}

/// Training configuration: defaults, overlaid by an optional JSON config
/// file, overlaid by any individually set flags.
#[derive(Args)]
struct ConfigFlags {
    /// JSON file with a full training configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// bag | conv
    #[arg(long)]
    encoder: Option<String>,
    #[arg(long)]
    embedding_dim: Option<usize>,
    #[arg(long)]
    opinion_dim: Option<usize>,
    #[arg(long)]
    pretrain_epochs: Option<usize>,
    #[arg(long)]
    pretrain_lr: Option<f64>,
    /// sgd | adam
    #[arg(long)]
    optimizer: Option<String>,
    /// Regularizer weight; 0 disables the regularizer.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
}

impl ConfigFlags {
    fn resolve(&self) -> Result<TrainConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = read_file(path)?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?
            }
            None => TrainConfig::default(),
        };
        macro_rules! overlay {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$field = v; })*
            };
        }
        overlay!(alpha, negatives, batch_size, lr, epochs, seed, opinion_dim, pretrain_epochs, pretrain_lr);
        if let Some(enc) = &self.encoder {
            let dim = self.embedding_dim.unwrap_or(100);
            cfg.encoder = match enc.as_str() {
                "bag" => EncoderKind::Bag { dim },
                "conv" => EncoderKind::conv_default(dim),
                other => {
                    return Err(Error::InvalidConfig(format!("unknown encoder `{other}`")))
                }
            };
        } else if let Some(dim) = self.embedding_dim {
            cfg.encoder = EncoderKind::Bag { dim };
        }
        if let Some(opt) = &self.optimizer {
            cfg.optimizer = match opt.as_str() {
                "sgd" => OptimizerKind::Sgd,
                "adam" => OptimizerKind::adam_default(),
                other => {
                    return Err(Error::InvalidConfig(format!("unknown optimizer `{other}`")))
                }
            };
        }
        if self.beta.is_some()
            || self.gamma1.is_some()
            || self.gamma2.is_some()
            || self.delta.is_some()
        {
            let mut pr = cfg.pr.take().unwrap_or_default();
            if let Some(v) = self.beta {
                pr.beta = v;
            }
            if let Some(v) = self.gamma1 {
                pr.gamma1 = v;
            }
            if let Some(v) = self.gamma2 {
                pr.gamma2 = v;
            }
            if let Some(v) = self.delta {
                pr.delta = v;
            }
            cfg.pr = Some(pr);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| Error::Io {
            path: p.display().to_string(),
            source: e,
        }),
        None => {
            print!("{content}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

#[derive(Deserialize)]
struct StoredExtraction {
    id: String,
    opinion_words: Vec<String>,
}

fn attach_extractions(corpus: &mut Corpus, path: &Path) -> Result<()> {
    let mut by_id: HashMap<String, Vec<String>> = HashMap::new();
    for (lineno, line) in read_file(path)?.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: StoredExtraction =
            serde_json::from_str(line).map_err(|e| Error::MalformedRecord {
                line: lineno + 1,
                reason: e.to_string(),
            })?;
        by_id.insert(rec.id, rec.opinion_words);
    }
    corpus.set_opinion_words(&by_id);
    Ok(())
}

fn run_extract(
    corpus: &Corpus,
    parses_path: &Path,
    fallback: bool,
    output: Option<&Path>,
) -> Result<()> {
    let parses = load_parses(parses_path)?;
    let rules = default_rules();
    let adjectives = builtin_adjectives();
    let mut lines = String::new();
    for doc in &corpus.documents {
        let record = match parses.get(&doc.id) {
            Some(sentences) => {
                let mut words = std::collections::BTreeSet::new();
                for s in sentences {
                    words.extend(extract_opinion_words(s, &rules));
                }
                ExtractionRecord {
                    id: doc.id.clone(),
                    opinion_words: words.into_iter().collect(),
                    method: "parse",
                }
            }
            None if fallback => ExtractionRecord {
                id: doc.id.clone(),
                opinion_words: fallback_extract(doc, &adjectives).into_iter().collect(),
                method: "fallback",
            },
            None => ExtractionRecord {
                id: doc.id.clone(),
                opinion_words: Vec::new(),
                method: "parse",
            },
        };
        lines.push_str(&serde_json::to_string(&record).expect("serializable record"));
        lines.push('\n');
    }
    write_output(output, &lines)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Stats {
            corpus,
            extractions,
        } => {
            let mut c = Corpus::load(&corpus, CorpusFormat::JsonLines)?;
            if let Some(path) = extractions {
                attach_extractions(&mut c, &path)?;
            }
            println!("{}", serde_json::to_string(&c.stats()).unwrap());
        }
        Command::Extract {
            corpus,
            parses,
            fallback,
            output,
        } => {
            let c = Corpus::load(&corpus, CorpusFormat::JsonLines)?;
            run_extract(&c, &parses, fallback, output.as_deref())?;
        }
        Command::Pretrain {
            corpus,
            keywords,
            config,
            output,
        } => {
            let c = Corpus::load(&corpus, CorpusFormat::JsonLines)?;
            let spec = keywords.resolve(&c.class_labels)?;
            let cfg = config.resolve()?;
            let view = c.train_view();
            let (pseudo, counts) = compute_pseudo_labels(view.documents, &spec)?;
            let mut params = weaksent::model::ModelParams::init(
                &cfg.encoder,
                view.token_vocab.len(),
                view.opinion_vocab.len().max(1),
                view.class_labels.len(),
                cfg.opinion_dim,
                cfg.seed,
            );
            let metrics = pretrain_classifier(
                view,
                &pseudo,
                &mut params,
                cfg.pretrain_epochs,
                cfg.pretrain_lr,
            )?;
            save_checkpoint(
                &output,
                &params,
                &c.class_labels,
                &c.token_vocab,
                &c.opinion_vocab,
            )?;
            eprintln!(
                "pseudo-labeled per class: {counts:?}; final loss {:.4}; pseudo accuracy {:.4}",
                metrics.final_loss, metrics.pseudo_accuracy
            );
        }
        Command::Train {
            corpus,
            extractions,
            keywords,
            config,
            output,
            log,
        } => {
            let mut c = Corpus::load(&corpus, CorpusFormat::JsonLines)?;
            attach_extractions(&mut c, &extractions)?;
            let spec = keywords.resolve(&c.class_labels)?;
            let cfg = config.resolve()?;
            let report = train(c.train_view(), &spec, &cfg)?;
            if let Some(log_path) = log {
                let mut lines = String::new();
                for step in &report.per_step {
                    lines.push_str(&serde_json::to_string(step).unwrap());
                    lines.push('\n');
                }
                write_output(Some(&log_path), &lines)?;
            }
            save_checkpoint(
                &output,
                &report.params,
                &c.class_labels,
                &c.token_vocab,
                &c.opinion_vocab,
            )?;
            let last = report.per_epoch.last();
            eprintln!(
                "trained {} epochs in {:.2}s; final J {}; skipped {} documents",
                report.per_epoch.len(),
                report.wall_time_secs,
                last.map_or("n/a".into(), |e| format!("{:.6}", e.j)),
                report.skipped_docs
            );
        }
        Command::Evaluate {
            corpus,
            extractions,
            method,
            keywords,
            config,
            seeds,
            lexicon_positive,
            lexicon_negative,
            results,
        } => {
            let mut c = Corpus::load(&corpus, CorpusFormat::JsonLines)?;
            if let Some(path) = extractions {
                attach_extractions(&mut c, &path)?;
            }
            let cfg = config.resolve()?;
            let lexicon = match (&lexicon_positive, &lexicon_negative) {
                (Some(p), Some(n)) => {
                    let (lex, dropped) = Lexicon::load(p, n)?;
                    if !dropped.is_empty() {
                        eprintln!("dropped {} conflicting lexicon entries", dropped.len());
                    }
                    Some(lex)
                }
                (None, None) => None,
                _ => {
                    return Err(Error::InvalidConfig(
                        "need both --lexicon-positive and --lexicon-negative".into(),
                    ))
                }
            };
            let spec;
            let eval_method = match method.as_str() {
                "lexicon" => EvalMethod::Lexicon(lexicon.as_ref().ok_or_else(|| {
                    Error::InvalidConfig("lexicon method needs word lists".into())
                })?),
                "keyword-pretrain" => {
                    spec = keywords.resolve(&c.class_labels)?;
                    EvalMethod::KeywordPretrain(&spec)
                }
                "variational" => {
                    spec = keywords.resolve(&c.class_labels)?;
                    EvalMethod::Variational(&spec)
                }
                "variational-pr" => {
                    spec = keywords.resolve(&c.class_labels)?;
                    EvalMethod::VariationalPr(&spec)
                }
                other => {
                    return Err(Error::InvalidConfig(format!("unknown method `{other}`")))
                }
            };
            let result = evaluate_runs(eval_method, &c, &cfg, &seeds);
            println!("method            mean      std       ties");
            println!(
                "{:<17} {:<9.4} {:<9.4} {}",
                result.method, result.mean, result.std, result.tie_count
            );
            println!("\nclass       precision  recall    f1");
            for row in &result.per_class {
                println!(
                    "{:<11} {:<10.4} {:<9.4} {:.4}",
                    row.class, row.precision, row.recall, row.f1
                );
            }
            for failure in &result.failures {
                eprintln!("failure: {failure}");
            }
            if let Some(path) = results {
                write_output(Some(&path), &serde_json::to_string_pretty(&result).unwrap())?;
            }
        }
        Command::Grid {
            corpus,
            extractions,
            dev,
            keywords,
            config,
            gamma1,
            gamma2,
            beta,
            seeds,
            results,
        } => {
            let mut c = Corpus::load(&corpus, CorpusFormat::JsonLines)?;
            attach_extractions(&mut c, &extractions)?;
            let dev_corpus = Corpus::load(&dev, CorpusFormat::JsonLines)?;
            let spec = keywords.resolve(&c.class_labels)?;
            let cfg = config.resolve()?;
            let mut grid = GridSpec::default();
            if let Some(v) = gamma1 {
                grid.gamma1 = v;
            }
            if let Some(v) = gamma2 {
                grid.gamma2 = v;
            }
            if let Some(v) = beta {
                grid.beta = v;
            }
            grid.seeds = seeds;
            let result = grid_search(&c, &dev_corpus, &spec, &cfg, &grid)?;
            println!("gamma1  gamma2  beta    mean_f1  std_f1");
            for row in result.stage1.iter().chain(&result.stage2) {
                println!(
                    "{:<7.2} {:<7.2} {:<7.2} {:<8.4} {:.4}",
                    row.gamma1, row.gamma2, row.beta, row.mean_f1, row.std_f1
                );
            }
            println!(
                "best: gamma1 {} gamma2 {} beta {} (dev F1 {:.4})",
                result.best.gamma1, result.best.gamma2, result.best.beta, result.best.mean_f1
            );
            if let Some(path) = results {
                write_output(Some(&path), &serde_json::to_string_pretty(&result).unwrap())?;
            }
        }
        Command::Predict {
            corpus,
            extractions,
            checkpoint,
            output,
        } => {
            let mut c = Corpus::load(&corpus, CorpusFormat::JsonLines)?;
            if let Some(path) = extractions {
                attach_extractions(&mut c, &path)?;
            }
            let ckpt = load_checkpoint(&checkpoint, &c.token_vocab, &c.opinion_vocab)?;
            let mut lines = String::new();
            for p in predict(c.train_view(), &ckpt.params)? {
                let label = &ckpt.class_labels[p.label];
                lines.push_str(&format!(
                    "{}\n",
                    serde_json::json!({ "id": p.id, "label": label, "tied": p.tied })
                ));
            }
            write_output(output.as_deref(), &lines)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
