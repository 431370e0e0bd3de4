//! Fault patterns: inverted fix patterns matched against statement ASTs.
//!
//! Matching walks a statement breadth-first (the statement itself, then its
//! own expressions level by level; nested statements are separate locations)
//! and yields one [`PatternApplication`] per (node, pattern, donor).
//! Applying one produces a new unit that differs at exactly one site.

mod catalog;
mod matcher;
mod scope;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalog::{Catalog, CatalogError, Category, Families, FaultPattern, PatternKind};
pub use matcher::{match_patterns, match_statement, MatchContext};

use crate::corpus::StatementId;
use crate::minij::ast::{Block, Expr, Stmt};
use crate::minij::locate::{function_at_mut, parent_block_mut, stmt_at, stmt_at_mut, StmtLoc};
use crate::minij::{unparse_stmt, unparse_unit, Unit};

/// Upper bound on donors tried per (node, pattern).
pub const DONOR_CAP: usize = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("application leaves the source text unchanged")]
    NoOpMutant,
    #[error("statement {0} no longer matches the application")]
    StaleApplication(StatementId),
}

/// The concrete change an application makes.
#[derive(Clone, Debug, PartialEq)]
pub enum Edit {
    /// Replace the expression at a node path of the statement.
    ReplaceExpr { path: Vec<usize>, with: Expr },
    /// Replace the statement by zero or more statements.
    ReplaceStmt(Vec<Stmt>),
    /// Exchange the statement with its next sibling.
    SwapWithNext,
    /// Replace the body of the enclosing function.
    ReplaceBody(Block),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatternApplication {
    pub statement: StatementId,
    pub location: StmtLoc,
    /// Path from the statement root to the target node; empty for the
    /// statement itself. The first index selects one of the statement's own
    /// expressions, later ones select expression children.
    pub node: Vec<usize>,
    pub kind: PatternKind,
    pub priority: u32,
    /// Position of the target node in breadth-first order.
    pub bfs_index: usize,
    pub donor_index: usize,
    /// Human-readable description of the donor, if the pattern takes one.
    pub donor: Option<String>,
    /// Canonical text of the statement at matching time.
    pub anchor: String,
    pub edit: Edit,
}

impl PatternApplication {
    pub fn pattern_id(&self) -> &'static str {
        self.kind.id()
    }

    pub fn descriptor(&self) -> ApplicationDescriptor {
        ApplicationDescriptor {
            statement: self.statement.clone(),
            node: self.node.clone(),
            pattern_id: self.pattern_id().to_string(),
            donor: self.donor.clone(),
        }
    }
}

/// Serializable summary of an application.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplicationDescriptor {
    pub statement: StatementId,
    pub node: Vec<usize>,
    pub pattern_id: String,
    pub donor: Option<String>,
}

/// Resolves a node path inside a statement.
pub fn node_at<'a>(stmt: &'a Stmt, path: &[usize]) -> Option<&'a Expr> {
    let (first, rest) = path.split_first()?;
    let mut e = stmt.exprs().into_iter().nth(*first)?;
    for &i in rest {
        e = e.children().into_iter().nth(i)?;
    }
    Some(e)
}

pub fn node_at_mut<'a>(stmt: &'a mut Stmt, path: &[usize]) -> Option<&'a mut Expr> {
    let (first, rest) = path.split_first()?;
    let mut e = stmt.exprs_mut().into_iter().nth(*first)?;
    for &i in rest {
        e = e.children_mut().into_iter().nth(i)?;
    }
    Some(e)
}

/// Applies `app` to a copy of `unit`. The input is left untouched.
pub fn apply_pattern(unit: &Unit, app: &PatternApplication) -> Result<Unit, PatternError> {
    let stale = || PatternError::StaleApplication(app.statement.clone());
    let current = stmt_at(unit, &app.location).ok_or_else(stale)?;
    if unparse_stmt(current) != app.anchor {
        return Err(stale());
    }
    let mut out = unit.clone();
    match &app.edit {
        Edit::ReplaceExpr { path, with } => {
            let stmt = stmt_at_mut(&mut out, &app.location).ok_or_else(stale)?;
            *node_at_mut(stmt, path).ok_or_else(stale)? = with.clone();
        }
        Edit::ReplaceStmt(stmts) => {
            let i = app.location.index_in_block();
            let block = parent_block_mut(&mut out, &app.location).ok_or_else(stale)?;
            block.stmts.splice(i..=i, stmts.iter().cloned());
        }
        Edit::SwapWithNext => {
            let i = app.location.index_in_block();
            let block = parent_block_mut(&mut out, &app.location).ok_or_else(stale)?;
            if i + 1 >= block.stmts.len() {
                return Err(stale());
            }
            block.stmts.swap(i, i + 1);
        }
        Edit::ReplaceBody(body) => {
            function_at_mut(&mut out, app.location.item).ok_or_else(stale)?.body = body.clone();
        }
    }
    if unparse_unit(&out) == unparse_unit(unit) {
        return Err(PatternError::NoOpMutant);
    }
    Ok(out)
}
