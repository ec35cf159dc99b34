//! Rule-based opinion-word extraction from dependency parses, plus the
//! adjective-list fallback for unparsed documents.
//!
//!     cargo run --example extract_opinion_words

use weaksent::corpus::{tokenize, Document};
use weaksent::extraction::{
    builtin_adjectives, default_rules, extract_opinion_words, fallback_extract, ParsedSentence,
    Pos,
};

fn sentence(
    tokens: &[&str],
    pos: &[&str],
    heads: &[i64],
    relations: &[&str],
) -> ParsedSentence {
    ParsedSentence {
        tokens: tokens.iter().map(|s| s.to_string()).collect(),
        pos: pos.iter().map(|t| Pos::parse(t)).collect(),
        heads: heads
            .iter()
            .map(|&h| if h < 0 { None } else { Some(h as usize) })
            .collect(),
        relations: relations.iter().map(|s| s.to_string()).collect(),
    }
}

fn main() {
    let rules = default_rules();

    // one sentence per rule: adjectival modifier, nominal subject,
    // direct object of a preference verb, open clausal complement
    let parses = [
        (
            "they have delicious food",
            sentence(
                &["they", "have", "delicious", "food"],
                &["OTHER", "VERB", "ADJ", "NOUN"],
                &[1, -1, 3, 1],
                &["nsubj", "root", "amod", "dobj"],
            ),
        ),
        (
            "the room is big",
            sentence(
                &["the", "room", "is", "big"],
                &["OTHER", "NOUN", "VERB", "ADJ"],
                &[1, 3, 3, -1],
                &["det", "nsubj", "cop", "root"],
            ),
        ),
        (
            "i like it",
            sentence(
                &["i", "like", "it"],
                &["OTHER", "VERB", "OTHER"],
                &[1, -1, 1],
                &["nsubj", "root", "dobj"],
            ),
        ),
        (
            "i feel comfortable",
            sentence(
                &["i", "feel", "comfortable"],
                &["OTHER", "VERB", "ADJ"],
                &[1, -1, 1],
                &["nsubj", "root", "xcomp"],
            ),
        ),
    ];

    for (text, parse) in &parses {
        let words = extract_opinion_words(parse, &rules);
        println!("{text:<28} -> {:?}", words.iter().collect::<Vec<_>>());
    }

    // no parse available: intersect tokens with a small adjective list
    let doc = Document {
        id: "unparsed".into(),
        text: "the food was terrific but the room was awful".into(),
        tokens: tokenize("the food was terrific but the room was awful"),
        pseudo_label: None,
        opinion_words: Vec::new(),
    };
    let fallback = fallback_extract(&doc, &builtin_adjectives());
    println!(
        "fallback on {:?} -> {:?}",
        doc.text,
        fallback.iter().collect::<Vec<_>>()
    );
}
