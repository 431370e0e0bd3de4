//! Bug-report-driven localization with a tf-idf vector space model.
//!
//! Files are ranked by cosine similarity to the report; statements of the
//! top files are then scored by `file_score * cosine(report, statement)`.
//! Ties are broken by path, then statement index.

mod tokenize;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use tokenize::{split_identifier, tokenize, TokenizeMode};

use crate::corpus::{BugReport, Corpus, StatementId};
use crate::minij::locate::stmt_at;
use crate::minij::unparse::stmt_head;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LocalizeError {
    #[error("no documents to index")]
    EmptyCorpus,
    #[error("bug report '{0}' has no usable terms")]
    EmptyQuery(String),
    #[error("index has {found:?} granularity, {needed:?} needed")]
    WrongGranularity { found: Granularity, needed: Granularity },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Granularity {
    File,
    Statement,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DocId {
    File(String),
    Statement(StatementId),
}

impl DocId {
    pub fn path(&self) -> &str {
        match self {
            DocId::File(p) => p,
            DocId::Statement(s) => &s.path,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IndexedDocument {
    pub doc_id: DocId,
    pub term_weights: BTreeMap<String, f64>,
    pub norm: f64,
}

#[derive(Clone, Debug)]
pub struct Index {
    pub granularity: Granularity,
    /// Documents with at least one non-zero weight.
    pub docs: Vec<IndexedDocument>,
    /// Every candidate document, including those dropped for lack of terms.
    pub all_ids: Vec<DocId>,
    pub idf: BTreeMap<String, f64>,
    pub n_docs: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub source_report_id: String,
    pub tokens: Vec<String>,
}

impl Query {
    pub fn from_report(report: &BugReport) -> Result<Query, LocalizeError> {
        let tokens = tokenize(&report.text(), TokenizeMode::Report);
        if tokens.is_empty() {
            return Err(LocalizeError::EmptyQuery(report.id.clone()));
        }
        Ok(Query { source_report_id: report.id.clone(), tokens })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedLocation {
    pub statement: StatementId,
    pub score: f64,
    pub file_score: f64,
    pub rank: usize,
}

/// CSV with header `rank,path,statement_index,score,file_score`.
pub fn locations_csv(locations: &[RankedLocation]) -> String {
    let mut out = String::from("rank,path,statement_index,score,file_score\n");
    for l in locations {
        out.push_str(&format!(
            "{},{},{},{:.6},{:.6}\n",
            l.rank, l.statement.path, l.statement.index, l.score, l.file_score
        ));
    }
    out
}

fn term_counts(tokens: &[String]) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for t in tokens {
        *counts.entry(t.clone()).or_insert(0) += 1;
    }
    counts
}

/// Builds an index from pre-tokenized documents. Documents without tokens
/// do not count towards N and are not stored.
pub fn build_index_from_tokens(
    granularity: Granularity,
    docs: Vec<(DocId, Vec<String>)>,
) -> Result<Index, LocalizeError> {
    if docs.is_empty() {
        return Err(LocalizeError::EmptyCorpus);
    }
    let all_ids: Vec<DocId> = docs.iter().map(|(id, _)| id.clone()).collect();
    let counted: Vec<(DocId, BTreeMap<String, usize>)> = docs
        .into_iter()
        .filter(|(_, toks)| !toks.is_empty())
        .map(|(id, toks)| (id, term_counts(&toks)))
        .collect();
    let n_docs = counted.len();
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for (_, counts) in &counted {
        for t in counts.keys() {
            *df.entry(t.clone()).or_insert(0) += 1;
        }
    }
    let idf: BTreeMap<String, f64> = df
        .into_iter()
        .map(|(t, d)| {
            let w = if d == n_docs { 0.0 } else { (n_docs as f64 / d as f64).ln() };
            (t, w)
        })
        .collect();
    let docs = counted
        .into_iter()
        .filter_map(|(doc_id, counts)| {
            let term_weights: BTreeMap<String, f64> = counts
                .into_iter()
                .map(|(t, tf)| {
                    let w = tf as f64 * idf[&t];
                    (t, w)
                })
                .filter(|(_, w)| *w > 0.0)
                .collect();
            let norm = term_weights.values().map(|w| w * w).sum::<f64>().sqrt();
            (norm > 0.0).then_some(IndexedDocument { doc_id, term_weights, norm })
        })
        .collect();
    Ok(Index { granularity, docs, all_ids, idf, n_docs })
}

/// Indexes the production files (or their statements) of a corpus.
pub fn build_index(corpus: &Corpus, granularity: Granularity) -> Result<Index, LocalizeError> {
    let mut docs = Vec::new();
    for f in &corpus.sources {
        match granularity {
            Granularity::File => {
                docs.push((DocId::File(f.path.clone()), tokenize(&f.raw_text, TokenizeMode::Code)));
            }
            Granularity::Statement => {
                let unit = corpus.unit(&f.path).expect("unit for source file");
                for (s, loc) in f.statements.iter().zip(&f.locations) {
                    let stmt = stmt_at(unit, loc).expect("indexed statement exists");
                    docs.push((DocId::Statement(s.id()), tokenize(&stmt_head(stmt), TokenizeMode::Code)));
                }
            }
        }
    }
    build_index_from_tokens(granularity, docs)
}

impl Index {
    fn query_vector(&self, query: &Query) -> (BTreeMap<String, f64>, f64) {
        let weights: BTreeMap<String, f64> = term_counts(&query.tokens)
            .into_iter()
            .filter_map(|(t, tf)| {
                let idf = *self.idf.get(&t)?;
                let w = tf as f64 * idf;
                (w > 0.0).then_some((t, w))
            })
            .collect();
        let norm = weights.values().map(|w| w * w).sum::<f64>().sqrt();
        (weights, norm)
    }

    fn cosines(&self, query: &Query) -> BTreeMap<DocId, f64> {
        let (qv, qnorm) = self.query_vector(query);
        let mut out = BTreeMap::new();
        if qnorm == 0.0 {
            return out;
        }
        for d in &self.docs {
            let dot: f64 = qv
                .iter()
                .filter_map(|(t, qw)| d.term_weights.get(t).map(|dw| qw * dw))
                .sum();
            if dot > 0.0 {
                out.insert(d.doc_id.clone(), (dot / (qnorm * d.norm)).clamp(0.0, 1.0));
            }
        }
        out
    }
}

fn by_score_then_id(a: &(DocId, f64), b: &(DocId, f64)) -> Ordering {
    b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0))
}

/// The `k` files most similar to the query, best first.
pub fn rank_files(index: &Index, query: &Query, k: usize) -> Result<Vec<(String, f64)>, LocalizeError> {
    if index.granularity != Granularity::File {
        return Err(LocalizeError::WrongGranularity { found: index.granularity, needed: Granularity::File });
    }
    if query.tokens.is_empty() {
        return Err(LocalizeError::EmptyQuery(query.source_report_id.clone()));
    }
    let cos = index.cosines(query);
    let mut scored: Vec<(DocId, f64)> =
        index.all_ids.iter().map(|id| (id.clone(), cos.get(id).copied().unwrap_or(0.0))).collect();
    scored.sort_by(by_score_then_id);
    Ok(scored.into_iter().take(k).map(|(id, s)| (id.path().to_string(), s)).collect())
}

/// Scores every statement of `files` and returns the best `n`.
pub fn rank_statements(
    index: &Index,
    query: &Query,
    files: &[(String, f64)],
    n: usize,
) -> Result<Vec<RankedLocation>, LocalizeError> {
    if index.granularity != Granularity::Statement {
        return Err(LocalizeError::WrongGranularity {
            found: index.granularity,
            needed: Granularity::Statement,
        });
    }
    let file_scores: BTreeMap<&str, f64> = files.iter().map(|(p, s)| (p.as_str(), *s)).collect();
    let cos = index.cosines(query);
    let mut scored: Vec<(StatementId, f64, f64)> = index
        .all_ids
        .iter()
        .filter_map(|id| {
            let DocId::Statement(sid) = id else { return None };
            let fs = *file_scores.get(sid.path.as_str())?;
            let c = cos.get(id).copied().unwrap_or(0.0);
            Some((sid.clone(), fs * c, fs))
        })
        .collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0))
    });
    Ok(scored
        .into_iter()
        .take(n)
        .enumerate()
        .map(|(i, (statement, score, file_score))| RankedLocation { statement, score, file_score, rank: i + 1 })
        .collect())
}

/// File and statement indexes for one corpus.
#[derive(Clone, Debug)]
pub struct Localizer {
    pub files: Index,
    pub statements: Index,
}

impl Localizer {
    pub fn new(corpus: &Corpus) -> Result<Localizer, LocalizeError> {
        Ok(Localizer {
            files: build_index(corpus, Granularity::File)?,
            statements: build_index(corpus, Granularity::Statement)?,
        })
    }

    /// Ranked statements for a report. When `scope` is given, files outside
    /// it are discarded after file ranking and before the statement cut.
    pub fn localize(
        &self,
        report: &BugReport,
        top_files: usize,
        top_statements: usize,
        scope: Option<&BTreeSet<String>>,
    ) -> Result<Vec<RankedLocation>, LocalizeError> {
        let query = Query::from_report(report)?;
        let mut files = rank_files(&self.files, &query, top_files)?;
        if let Some(scope) = scope {
            files.retain(|(p, _)| scope.contains(p));
        }
        rank_statements(&self.statements, &query, &files, top_statements)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn file(p: &str) -> DocId {
        DocId::File(p.into())
    }

    fn query(s: &str) -> Query {
        Query { source_report_id: "R".into(), tokens: toks(s) }
    }

    #[test]
    fn ubiquitous_terms_weigh_nothing() {
        let idx = build_index_from_tokens(Granularity::File, vec![
            (file("a"), toks("shared alpha")),
            (file("b"), toks("shared beta")),
        ])
        .unwrap();
        assert_eq!(idx.idf["shared"], 0.0);
        assert!(idx.docs.iter().all(|d| !d.term_weights.contains_key("shared")));
    }

    #[test]
    fn tf_times_natural_log_idf() {
        let idx = build_index_from_tokens(Granularity::File, vec![
            (file("a"), toks("x x x y")),
            (file("b"), toks("y")),
        ])
        .unwrap();
        let a = idx.docs.iter().find(|d| d.doc_id == file("a")).unwrap();
        assert!((a.term_weights["x"] - 3.0 * 2f64.ln()).abs() < 1e-12);
        assert!((a.term_weights["x"] - 2.0794).abs() < 1e-4);
        // "b" only has the ubiquitous term and is dropped.
        assert_eq!(idx.docs.len(), 1);
        assert_eq!(idx.all_ids.len(), 2);
    }

    #[test]
    fn empty_corpus_is_rejected() {
        assert_eq!(
            build_index_from_tokens(Granularity::File, vec![]).unwrap_err(),
            LocalizeError::EmptyCorpus
        );
    }

    #[test]
    fn identical_document_scores_one() {
        let idx = build_index_from_tokens(Granularity::File, vec![
            (file("a"), toks("parse date format")),
            (file("b"), toks("account balance")),
            (file("c"), toks("queue push")),
        ])
        .unwrap();
        let ranked = rank_files(&idx, &query("parse date format"), 3).unwrap();
        assert_eq!(ranked[0].0, "a");
        assert!((ranked[0].1 - 1.0).abs() < 1e-12);
        assert_eq!(ranked[1], ("b".to_string(), 0.0));
        assert_eq!(ranked[2], ("c".to_string(), 0.0));
    }

    #[test]
    fn disjoint_query_ties_break_by_path() {
        let idx = build_index_from_tokens(Granularity::File, vec![
            (file("z"), toks("one")),
            (file("m"), toks("two")),
        ])
        .unwrap();
        let ranked = rank_files(&idx, &query("nothing"), 5).unwrap();
        assert_eq!(ranked, vec![("m".to_string(), 0.0), ("z".to_string(), 0.0)]);
    }

    #[test]
    fn statement_score_is_file_score_times_cosine() {
        let sid = |i| DocId::Statement(StatementId { path: "a".into(), index: i });
        let idx = build_index_from_tokens(Granularity::Statement, vec![
            (sid(0), toks("parse date")),
            (sid(1), toks("balance")),
            (sid(2), toks("queue")),
        ])
        .unwrap();
        let q = query("parse date");
        let ranked = rank_statements(&idx, &q, &[("a".to_string(), 1.0)], 10).unwrap();
        assert_eq!(ranked[0].statement.index, 0);
        assert!((ranked[0].score - 1.0).abs() < 1e-12);
        assert_eq!(ranked[0].rank, 1);
        assert_eq!(ranked[1].score, 0.0);
        assert_eq!(ranked.iter().map(|r| r.rank).collect::<Vec<_>>(), vec![1, 2, 3]);

        let half = rank_statements(&idx, &q, &[("a".to_string(), 0.5)], 1).unwrap();
        assert!((half[0].score - 0.5).abs() < 1e-12);
    }

    #[test]
    fn granularity_is_checked() {
        let idx = build_index_from_tokens(Granularity::File, vec![(file("a"), toks("x"))]).unwrap();
        assert!(rank_statements(&idx, &query("x"), &[], 1).is_err());
    }
}
