//! MiniJ: the small statically typed language that fault injection targets.
//!
//! The grammar lives in `docs/minij-grammar.ebnf`. A [`Program`] is a set of
//! source units (production files plus test files) sharing one function
//! namespace; functions overload by arity.

pub mod ast;
pub mod check;
pub mod interp;
mod lexer;
pub mod locate;
mod parser;
pub mod unparse;

use thiserror::Error;

pub use ast::{Span, Stmt, Type, Unit};
pub use check::Symbols;
pub use interp::{run_tests, run_tests_budgeted, Outcome, StepBudget, TestVerdict};
pub use lexer::KEYWORDS;
pub use parser::{parse_expr, parse_stmt};
pub use unparse::{unparse_expr, unparse_stmt, unparse_unit};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{path}:{line}:{col}: {message}")]
pub struct TypeError {
    pub path: String,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl TypeError {
    pub(crate) fn at(path: &str, span: Span, message: String) -> TypeError {
        TypeError { path: path.to_string(), line: span.start_line, col: span.start_col, message }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ExecutionError {
    #[error("no test named '{0}'")]
    UnknownTest(String),
    #[error("interpreter fault: {0}")]
    Internal(String),
}

pub fn parse(text: &str) -> Result<Unit, ParseError> {
    parser::parse_unit(text)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SourceUnit {
    pub path: String,
    pub unit: Unit,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Program {
    pub units: Vec<SourceUnit>,
}

impl Program {
    pub fn single(path: &str, unit: Unit) -> Program {
        Program { units: vec![SourceUnit { path: path.to_string(), unit }] }
    }

    /// Type checks every unit and fills in expression types.
    pub fn check(&mut self) -> Result<Symbols, TypeError> {
        let symbols = Symbols::collect(self)?;
        for su in &mut self.units {
            check::check_unit(&su.path, &mut su.unit, &symbols)?;
        }
        Ok(symbols)
    }

    pub fn unit(&self, path: &str) -> Option<&Unit> {
        self.units.iter().find(|u| u.path == path).map(|u| &u.unit)
    }

    /// Copy of the program with one unit swapped out.
    pub fn with_unit(&self, path: &str, unit: Unit) -> Program {
        let units = self
            .units
            .iter()
            .map(|su| {
                if su.path == path {
                    SourceUnit { path: su.path.clone(), unit: unit.clone() }
                } else {
                    su.clone()
                }
            })
            .collect();
        Program { units }
    }

    /// Names of zero-argument `test_*` functions, in unit then item order.
    pub fn test_names(&self) -> Vec<String> {
        self.units
            .iter()
            .flat_map(|su| su.unit.functions())
            .filter(|f| f.name.starts_with("test_") && f.params.is_empty())
            .map(|f| f.name.clone())
            .collect()
    }
}

/// Checks a program without keeping the annotations.
pub fn typecheck(program: &Program) -> Result<(), TypeError> {
    program.clone().check().map(|_| ())
}

/// Checks a single replacement unit against an already checked program.
/// Only the replaced unit is re-examined, which is sound as long as the
/// replacement keeps the unit's function signatures and globals.
pub fn check_replacement(
    path: &str,
    unit: &mut Unit,
    symbols: &Symbols,
) -> Result<(), TypeError> {
    check::check_unit(path, unit, symbols)
}
