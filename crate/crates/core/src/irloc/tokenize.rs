use std::collections::HashSet;
use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};

use crate::minij::{check::BUILTINS, KEYWORDS};

const STOPWORDS: &str = include_str!("../../data/stopwords.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenizeMode {
    /// Natural-language bug report text.
    Report,
    /// MiniJ source; builtin names (`assert`, `print`, `len`) are noise here.
    Code,
}

fn stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| STOPWORDS.lines().map(str::trim).filter(|l| !l.is_empty()).collect())
}

fn stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

fn dropped(term: &str, mode: TokenizeMode) -> bool {
    term.len() < 2
        || term.bytes().all(|b| b.is_ascii_digit())
        || stopwords().contains(term)
        || KEYWORDS.contains(&term)
        || (mode == TokenizeMode::Code && BUILTINS.contains(&term))
}

/// Splits an identifier on underscores, lower-to-upper case changes, acronym
/// boundaries (`HTTPServer` -> `HTTP`, `Server`) and letter/digit changes.
pub fn split_identifier(word: &str) -> Vec<String> {
    let chars: Vec<char> = word.chars().collect();
    let mut parts = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c == '_' {
            if !cur.is_empty() {
                parts.push(std::mem::take(&mut cur));
            }
            continue;
        }
        if let Some(&prev) = cur.chars().last().as_ref() {
            let next = chars.get(i + 1).copied();
            let boundary = (prev.is_lowercase() && c.is_uppercase())
                || (prev.is_alphabetic() && c.is_ascii_digit())
                || (prev.is_ascii_digit() && c.is_alphabetic())
                || (prev.is_uppercase() && c.is_uppercase() && next.is_some_and(char::is_lowercase));
            if boundary {
                parts.push(std::mem::take(&mut cur));
            }
        }
        cur.push(c);
    }
    if !cur.is_empty() {
        parts.push(cur);
    }
    parts
}

/// Lowercased, stop-word filtered, stemmed terms. Compound identifiers are
/// kept alongside their parts. The result is a multiset in text order.
pub fn tokenize(text: &str, mode: TokenizeMode) -> Vec<String> {
    let mut out = Vec::new();
    for word in text.split(|c: char| !(c.is_alphanumeric() || c == '_')) {
        if word.is_empty() {
            continue;
        }
        let parts = split_identifier(word);
        let mut terms: Vec<String> = Vec::with_capacity(parts.len() + 1);
        if parts.len() > 1 {
            terms.push(
                parts
                    .iter()
                    .filter(|p| !p.chars().all(|c| c.is_ascii_digit()))
                    .map(|p| p.to_lowercase())
                    .collect::<String>(),
            );
        }
        terms.extend(parts.iter().map(|p| p.to_lowercase()));
        for t in terms {
            if !dropped(&t, mode) {
                let stemmed = stemmer().stem(&t).into_owned();
                if stemmed.len() >= 2 {
                    out.push(stemmed);
                }
            }
        }
    }
    out
}
