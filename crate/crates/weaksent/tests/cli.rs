//! Smoke tests for the command-line surface: each subcommand runs end to
//! end on a small synthetic corpus written to disk.

use std::fs;
use std::path::Path;
use std::process::Command;

use weaksent::corpus::Corpus;
use weaksent::synthetic::{generate, SyntheticConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_weaksent"))
}

fn small_corpus() -> (Corpus, weaksent::pretrain::KeywordSpec) {
    generate(&SyntheticConfig {
        num_docs: 80,
        ..SyntheticConfig::default()
    })
}

fn write_corpus(corpus: &Corpus, path: &Path) {
    let mut out = String::new();
    for (i, doc) in corpus.documents.iter().enumerate() {
        let label = corpus
            .gold_label(i)
            .map(|c| corpus.class_labels[c].clone())
            .unwrap();
        out.push_str(
            &serde_json::json!({ "id": doc.id, "text": doc.text, "label": label }).to_string(),
        );
        out.push('\n');
    }
    fs::write(path, out).unwrap();
}

fn write_extractions(corpus: &Corpus, path: &Path) {
    let mut out = String::new();
    for doc in &corpus.documents {
        let words: Vec<&str> = doc
            .opinion_words
            .iter()
            .map(|&w| corpus.opinion_vocab.word(w).unwrap())
            .collect();
        out.push_str(&serde_json::json!({ "id": doc.id, "opinion_words": words }).to_string());
        out.push('\n');
    }
    fs::write(path, out).unwrap();
}

fn write_keywords(spec: &weaksent::pretrain::KeywordSpec, corpus: &Corpus, path: &Path) {
    let map: serde_json::Map<String, serde_json::Value> = corpus
        .class_labels
        .iter()
        .zip(spec.per_class.iter())
        .map(|(label, words)| (label.clone(), serde_json::json!(words)))
        .collect();
    fs::write(path, serde_json::Value::Object(map).to_string()).unwrap();
}

#[test]
fn stats_reports_corpus_shape() {
    let dir = tempfile::tempdir().unwrap();
    let (corpus, _) = small_corpus();
    let corpus_path = dir.path().join("corpus.jsonl");
    write_corpus(&corpus, &corpus_path);

    let out = bin()
        .args(["stats", "--corpus"])
        .arg(&corpus_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["num_docs"], 80);
    assert_eq!(record["extraction_run"], false);
}

#[test]
fn extract_emits_golden_word() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_path = dir.path().join("corpus.jsonl");
    fs::write(
        &corpus_path,
        r#"{"id":"d1","text":"they have delicious food"}"#.to_string() + "\n",
    )
    .unwrap();
    let parses_path = dir.path().join("parses.tsv");
    fs::write(
        &parses_path,
        "d1\n0\tthey\tPRON\t1\tnsubj\n1\thave\tVERB\t-1\troot\n2\tdelicious\tADJ\t3\tamod\n3\tfood\tNOUN\t1\tdobj\n",
    )
    .unwrap();
    let out_path = dir.path().join("extractions.jsonl");

    let out = bin()
        .args(["extract", "--corpus"])
        .arg(&corpus_path)
        .arg("--parses")
        .arg(&parses_path)
        .arg("--output")
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let record: serde_json::Value =
        serde_json::from_str(fs::read_to_string(&out_path).unwrap().lines().next().unwrap())
            .unwrap();
    assert_eq!(record["id"], "d1");
    assert_eq!(record["opinion_words"], serde_json::json!(["delicious"]));
}

#[test]
fn train_then_predict_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (corpus, keywords) = small_corpus();
    let corpus_path = dir.path().join("corpus.jsonl");
    let extractions_path = dir.path().join("extractions.jsonl");
    let keywords_path = dir.path().join("keywords.json");
    write_corpus(&corpus, &corpus_path);
    write_extractions(&corpus, &extractions_path);
    write_keywords(&keywords, &corpus, &keywords_path);

    let checkpoint = dir.path().join("model.json");
    let log = dir.path().join("train.log");
    let out = bin()
        .args(["train", "--corpus"])
        .arg(&corpus_path)
        .arg("--extractions")
        .arg(&extractions_path)
        .arg("--keywords")
        .arg(&keywords_path)
        .args(["--epochs", "2", "--embedding-dim", "16", "--opinion-dim", "8"])
        .arg("--output")
        .arg(&checkpoint)
        .arg("--log")
        .arg(&log)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(checkpoint.exists());
    // every log line is a standalone JSON record
    let log_text = fs::read_to_string(&log).unwrap();
    assert!(!log_text.is_empty());
    for line in log_text.lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }

    let predictions = dir.path().join("predictions.jsonl");
    let out = bin()
        .args(["predict", "--corpus"])
        .arg(&corpus_path)
        .arg("--extractions")
        .arg(&extractions_path)
        .arg("--checkpoint")
        .arg(&checkpoint)
        .arg("--output")
        .arg(&predictions)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines: Vec<String> = fs::read_to_string(&predictions)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    assert_eq!(lines.len(), corpus.documents.len());
    let first: serde_json::Value = serde_json::from_str(&lines[0]).unwrap();
    assert!(first["label"].is_string());
}

#[test]
fn evaluate_writes_result_record() {
    let dir = tempfile::tempdir().unwrap();
    let (corpus, keywords) = small_corpus();
    let corpus_path = dir.path().join("corpus.jsonl");
    let extractions_path = dir.path().join("extractions.jsonl");
    let keywords_path = dir.path().join("keywords.json");
    write_corpus(&corpus, &corpus_path);
    write_extractions(&corpus, &extractions_path);
    write_keywords(&keywords, &corpus, &keywords_path);

    let results = dir.path().join("results.json");
    let out = bin()
        .args(["evaluate", "--corpus"])
        .arg(&corpus_path)
        .arg("--extractions")
        .arg(&extractions_path)
        .args(["--method", "keyword-pretrain"])
        .arg("--keywords")
        .arg(&keywords_path)
        .args(["--seeds", "0,1", "--embedding-dim", "16", "--opinion-dim", "8"])
        .arg("--results")
        .arg(&results)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let record: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&results).unwrap()).unwrap();
    assert_eq!(record["per_seed_f1"].as_array().unwrap().len(), 2);
    assert!(record["mean"].as_f64().unwrap() > 0.0);
}

#[test]
fn config_file_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let (corpus, keywords) = small_corpus();
    let corpus_path = dir.path().join("corpus.jsonl");
    let extractions_path = dir.path().join("extractions.jsonl");
    let keywords_path = dir.path().join("keywords.json");
    write_corpus(&corpus, &corpus_path);
    write_extractions(&corpus, &extractions_path);
    write_keywords(&keywords, &corpus, &keywords_path);

    // config file says 1 epoch; the flag bumps it to 2, which shows up as
    // more optimization steps in the log
    let config = weaksent::training::TrainConfig {
        encoder: weaksent::model::EncoderKind::Bag { dim: 16 },
        opinion_dim: 8,
        epochs: 1,
        ..weaksent::training::TrainConfig::default()
    };
    let config_path = dir.path().join("config.json");
    fs::write(&config_path, serde_json::to_string(&config).unwrap()).unwrap();

    let run = |extra: &[&str]| -> usize {
        let log = dir.path().join(format!("train-{}.log", extra.len()));
        let out = bin()
            .args(["train", "--corpus"])
            .arg(&corpus_path)
            .arg("--extractions")
            .arg(&extractions_path)
            .arg("--keywords")
            .arg(&keywords_path)
            .arg("--config")
            .arg(&config_path)
            .args(extra)
            .arg("--output")
            .arg(dir.path().join(format!("model-{}.json", extra.len())))
            .arg("--log")
            .arg(&log)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read_to_string(&log).unwrap().lines().count()
    };
    let base_steps = run(&[]);
    let doubled_steps = run(&["--epochs", "2"]);
    assert_eq!(doubled_steps, 2 * base_steps);
}
