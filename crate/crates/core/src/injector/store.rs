//! On-disk mutant layout: `<dir>/<mutant_id>/` holding the mutated file at
//! its corpus-relative path, `diff.patch` and `meta.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Mutant, MutantSource, MutantStatus};
use crate::corpus::StatementId;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: malformed meta.json: {reason}")]
    Malformed { path: String, reason: String },
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.display().to_string(), source }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantMeta {
    pub mutant_id: String,
    pub source: MutantSource,
    pub statement: StatementId,
    pub pattern_id: String,
    pub rank: usize,
    pub donor: Option<String>,
    pub project: String,
    pub report_id: Option<String>,
    pub node: Vec<usize>,
    pub location_rank: Option<usize>,
    /// Number of mutants asked for in the run that produced this one.
    pub requested: usize,
}

/// Writes each mutant into its own directory under `dir`.
pub fn write_mutants(dir: &Path, mutants: &[Mutant], requested: usize) -> Result<(), StoreError> {
    for m in mutants {
        let root = dir.join(&m.mutant_id);
        let file = root.join(m.path());
        fs::create_dir_all(file.parent().unwrap_or(&root)).map_err(io(&root))?;
        fs::write(&file, &m.mutated_source).map_err(io(&file))?;
        let patch = root.join("diff.patch");
        fs::write(&patch, &m.diff).map_err(io(&patch))?;
        let meta = MutantMeta {
            mutant_id: m.mutant_id.clone(),
            source: m.source,
            statement: m.statement.clone(),
            pattern_id: m.pattern_id.clone(),
            rank: m.rank,
            donor: m.donor.clone(),
            project: m.project.clone(),
            report_id: m.report_id.clone(),
            node: m.node.clone(),
            location_rank: m.location_rank,
            requested,
        };
        let mut json = serde_json::to_string_pretty(&meta).expect("meta serializes");
        json.push('\n');
        let meta_path = root.join("meta.json");
        fs::write(&meta_path, json).map_err(io(&meta_path))?;
    }
    Ok(())
}

/// Loads every mutant found below `dir` (any depth), with the size of the
/// request that produced it. Sorted by (source, project, report, rank).
pub fn read_mutants(dir: &Path) -> Result<Vec<(Mutant, usize)>, StoreError> {
    let mut metas: Vec<PathBuf> = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| StoreError::Io { path: dir.display().to_string(), source: e.into() })?;
        if entry.file_type().is_file() && entry.file_name() == "meta.json" {
            metas.push(entry.into_path());
        }
    }
    let mut out = Vec::new();
    for meta_path in metas {
        let root = meta_path.parent().expect("meta.json has a parent");
        let text = fs::read_to_string(&meta_path).map_err(io(&meta_path))?;
        let meta: MutantMeta = serde_json::from_str(&text).map_err(|e| StoreError::Malformed {
            path: meta_path.display().to_string(),
            reason: e.to_string(),
        })?;
        let file = root.join(&meta.statement.path);
        let mutated_source = fs::read_to_string(&file).map_err(io(&file))?;
        let patch = root.join("diff.patch");
        let diff = fs::read_to_string(&patch).map_err(io(&patch))?;
        let mutant = Mutant {
            mutant_id: meta.mutant_id,
            source: meta.source,
            project: meta.project,
            report_id: meta.report_id,
            statement: meta.statement,
            node: meta.node,
            pattern_id: meta.pattern_id,
            donor: meta.donor,
            rank: meta.rank,
            location_rank: meta.location_rank,
            status: MutantStatus::Viable,
            mutated_source,
            diff,
        };
        out.push((mutant, meta.requested));
    }
    out.sort_by(|(a, _), (b, _)| {
        (a.source, &a.project, &a.report_id, a.rank).cmp(&(b.source, &b.project, &b.report_id, b.rank))
    });
    Ok(out)
}
