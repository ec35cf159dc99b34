//! Load a small line-delimited corpus and print its statistics record.
//!
//!     cargo run --example corpus_stats

use std::collections::HashMap;
use std::io::Cursor;

use weaksent::corpus::{default_class_labels, Corpus};

fn main() {
    let raw = r#"{"id":"r1","text":"The room is big and the food is delicious","label":"positive"}
{"id":"r2","text":"Horrible service, the worst experience","label":"negative"}
{"id":"r3","text":"I feel comfortable here"}
"#;
    let corpus = Corpus::from_reader(Cursor::new(raw.as_bytes()), &default_class_labels())
        .expect("valid corpus");

    println!("before extraction: {:?}", corpus.stats());

    // attach opinion words (normally produced by the extraction module)
    let mut corpus = corpus;
    let mut extracted = HashMap::new();
    extracted.insert("r1".to_string(), vec!["big".to_string(), "delicious".to_string()]);
    extracted.insert("r2".to_string(), vec!["horrible".to_string(), "worst".to_string()]);
    extracted.insert("r3".to_string(), vec!["comfortable".to_string()]);
    corpus.set_opinion_words(&extracted);

    println!("after extraction:  {:?}", corpus.stats());
    println!(
        "as JSON: {}",
        serde_json::to_string(&corpus.stats()).unwrap()
    );

    for (i, doc) in corpus.documents.iter().enumerate() {
        println!(
            "{}: tokens={:?} gold={:?}",
            doc.id,
            doc.tokens,
            corpus.gold_label(i)
        );
    }
}
