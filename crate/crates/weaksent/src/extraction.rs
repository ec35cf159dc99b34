//! Rule-based opinion-word extraction over precomputed dependency parses,
//! with an adjective-list fallback for corpora without parses.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Serialize;

use crate::corpus::Document;
use crate::error::{Error, Result};

/// Coarse part-of-speech tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pos {
    Adj,
    Noun,
    Verb,
    Other,
}

impl Pos {
    pub fn parse(tag: &str) -> Pos {
        match tag.to_ascii_uppercase().as_str() {
            "ADJ" => Pos::Adj,
            "NOUN" => Pos::Noun,
            "VERB" => Pos::Verb,
            _ => Pos::Other,
        }
    }
}

/// One dependency-parsed sentence. `heads[i]` is the 0-based index of the
/// head of token `i`, or `None` for the root.
#[derive(Debug, Clone)]
pub struct ParsedSentence {
    pub tokens: Vec<String>,
    pub pos: Vec<Pos>,
    pub heads: Vec<Option<usize>>,
    pub relations: Vec<String>,
}

impl ParsedSentence {
    pub fn validate(&self) -> Result<()> {
        let n = self.tokens.len();
        if self.pos.len() != n || self.heads.len() != n || self.relations.len() != n {
            return Err(Error::InvalidConfig(
                "parsed sentence field lengths differ".into(),
            ));
        }
        for h in self.heads.iter().flatten() {
            if *h >= n {
                return Err(Error::InvalidConfig(format!(
                    "head index {h} out of range for sentence of length {n}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HeadConstraint {
    None,
    MustBeAdjective,
    WordList(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailConstraint {
    None,
    MustBeNoun,
}

/// Which end of a matching dependency edge is the opinion word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractTarget {
    Head,
    Dependent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionRule {
    pub rule_id: u8,
    /// Dependency relation label as it appears in the parse file.
    pub relation: &'static str,
    pub head_constraint: HeadConstraint,
    pub tail_constraint: TailConstraint,
    pub extract: ExtractTarget,
}

/// The four extraction rules: adjectival modifier, nominal subject with an
/// adjective head and noun tail, direct object under like/dislike/love/hate,
/// and open clausal complement under seem/look/feel/smell/taste.
pub fn default_rules() -> Vec<ExtractionRule> {
    vec![
        ExtractionRule {
            rule_id: 1,
            relation: "amod",
            head_constraint: HeadConstraint::None,
            tail_constraint: TailConstraint::None,
            extract: ExtractTarget::Dependent,
        },
        ExtractionRule {
            rule_id: 2,
            relation: "nsubj",
            head_constraint: HeadConstraint::MustBeAdjective,
            tail_constraint: TailConstraint::MustBeNoun,
            extract: ExtractTarget::Head,
        },
        ExtractionRule {
            rule_id: 3,
            relation: "dobj",
            head_constraint: HeadConstraint::WordList(
                ["like", "dislike", "love", "hate"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            ),
            tail_constraint: TailConstraint::None,
            extract: ExtractTarget::Head,
        },
        ExtractionRule {
            rule_id: 4,
            relation: "xcomp",
            head_constraint: HeadConstraint::WordList(
                ["seem", "look", "feel", "smell", "taste"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            ),
            tail_constraint: TailConstraint::None,
            extract: ExtractTarget::Dependent,
        },
    ]
}

/// Apply the rules to one parsed sentence and return the extracted words.
/// Rule order never matters: the result is a union.
pub fn extract_opinion_words(
    parse: &ParsedSentence,
    rules: &[ExtractionRule],
) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for (dep_idx, head_idx) in parse.heads.iter().enumerate() {
        let Some(head_idx) = *head_idx else { continue };
        let relation = parse.relations[dep_idx].as_str();
        for rule in rules {
            if rule.relation != relation {
                continue;
            }
            let head_ok = match &rule.head_constraint {
                HeadConstraint::None => true,
                HeadConstraint::MustBeAdjective => parse.pos[head_idx] == Pos::Adj,
                HeadConstraint::WordList(words) => {
                    let head = parse.tokens[head_idx].to_lowercase();
                    words.iter().any(|w| *w == head)
                }
            };
            let tail_ok = match rule.tail_constraint {
                TailConstraint::None => true,
                TailConstraint::MustBeNoun => parse.pos[dep_idx] == Pos::Noun,
            };
            if head_ok && tail_ok {
                let word = match rule.extract {
                    ExtractTarget::Head => &parse.tokens[head_idx],
                    ExtractTarget::Dependent => &parse.tokens[dep_idx],
                };
                out.insert(word.to_lowercase());
            }
        }
    }
    out
}

/// Load parses from a file of blank-line-separated blocks. The first line of
/// a block is the document id; each following row is tab-separated:
/// `index<TAB>token<TAB>pos<TAB>head-index<TAB>relation`, head `-1` = root.
pub fn load_parses(path: &Path) -> Result<HashMap<String, Vec<ParsedSentence>>> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let reader = BufReader::new(file);
    let mut map: HashMap<String, Vec<ParsedSentence>> = HashMap::new();

    let mut doc_id: Option<String> = None;
    let mut tokens = Vec::new();
    let mut pos = Vec::new();
    let mut heads = Vec::new();
    let mut relations = Vec::new();

    let mut flush = |doc_id: &mut Option<String>,
                     tokens: &mut Vec<String>,
                     pos: &mut Vec<Pos>,
                     heads: &mut Vec<Option<usize>>,
                     relations: &mut Vec<String>|
     -> Result<()> {
        if let Some(id) = doc_id.take() {
            if !tokens.is_empty() {
                let sentence = ParsedSentence {
                    tokens: std::mem::take(tokens),
                    pos: std::mem::take(pos),
                    heads: std::mem::take(heads),
                    relations: std::mem::take(relations),
                };
                sentence.validate()?;
                map.entry(id).or_default().push(sentence);
            }
        }
        Ok(())
    };

    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        if line.trim().is_empty() {
            flush(&mut doc_id, &mut tokens, &mut pos, &mut heads, &mut relations)?;
            continue;
        }
        if doc_id.is_none() {
            doc_id = Some(line.trim().to_string());
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(Error::ColumnMismatch {
                line: lineno + 1,
                expected: 5,
                found: cols.len(),
            });
        }
        let head: i64 = cols[3].parse().map_err(|_| Error::MalformedRecord {
            line: lineno + 1,
            reason: format!("bad head index `{}`", cols[3]),
        })?;
        tokens.push(cols[1].to_string());
        pos.push(Pos::parse(cols[2]));
        heads.push(if head < 0 { None } else { Some(head as usize) });
        // unknown relation labels are kept verbatim; they just never match
        relations.push(cols[4].to_string());
    }
    flush(&mut doc_id, &mut tokens, &mut pos, &mut heads, &mut relations)?;
    Ok(map)
}

/// Lower-fidelity substitute for parse-based extraction: intersect document
/// tokens with an adjective list.
pub fn fallback_extract(document: &Document, adjective_list: &BTreeSet<String>) -> BTreeSet<String> {
    document
        .tokens
        .iter()
        .filter(|t| adjective_list.contains(*t))
        .cloned()
        .collect()
}

/// Small built-in adjective list for the fallback path.
pub fn builtin_adjectives() -> BTreeSet<String> {
    [
        "amazing", "awesome", "awful", "bad", "beautiful", "big", "bland", "boring", "cheap",
        "clean", "cold", "comfortable", "cozy", "delicious", "dirty", "disappointing", "dull",
        "excellent", "expensive", "fantastic", "fresh", "friendly", "good", "great", "horrible",
        "hot", "large", "lovely", "mediocre", "nasty", "nice", "noisy", "old", "perfect", "poor",
        "pretty", "quiet", "rude", "slow", "small", "spacious", "stale", "tasty", "terrible",
        "terrific", "ugly", "warm", "wonderful", "worst",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// One output record of an extraction run.
#[derive(Debug, Serialize)]
pub struct ExtractionRecord {
    pub id: String,
    pub opinion_words: Vec<String>,
    /// "parse" or "fallback"; fallback output is lower fidelity.
    pub method: &'static str,
}
