//! Variables visible at a statement, used to pick donors.

use std::collections::BTreeSet;

use crate::minij::ast::{Expr, ExprKind, Stmt, StmtKind, Type};
use crate::minij::locate::{function_at, StmtLoc};
use crate::minij::{Symbols, Unit};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScopeVar {
    pub name: String,
    pub ty: Type,
    /// Declaration sequence number; larger is nearer to the statement.
    /// Globals share 0.
    pub order: usize,
}

/// Visible variables, nearest declaration first, then by name.
pub fn visible_at(unit: &Unit, symbols: &Symbols, loc: &StmtLoc) -> Vec<ScopeVar> {
    let mut vars: Vec<ScopeVar> = symbols
        .globals
        .iter()
        .map(|(name, ty)| ScopeVar { name: name.clone(), ty: ty.clone(), order: 0 })
        .collect();
    let Some(f) = function_at(unit, loc.item) else { return vars };
    let mut order = 0;
    let mut declare = |vars: &mut Vec<ScopeVar>, name: &str, ty: &Type| {
        order += 1;
        vars.retain(|v| v.name != name);
        vars.push(ScopeVar { name: name.to_string(), ty: ty.clone(), order });
    };
    for p in &f.params {
        declare(&mut vars, &p.name, &p.ty);
    }
    let mut block = &f.body;
    let mut parent: Option<&Stmt> = None;
    for step in &loc.steps {
        if let Some(p) = parent {
            if let StmtKind::Try { binding, .. } = &p.kind {
                if step.slot == 1 {
                    declare(&mut vars, binding, &Type::Str);
                }
            }
            let Some(b) = p.child_blocks().into_iter().nth(step.slot) else { break };
            block = b;
        }
        for s in block.stmts.iter().take(step.index) {
            if let StmtKind::Decl { ty, name, .. } = &s.kind {
                declare(&mut vars, name, ty);
            }
        }
        let Some(s) = block.stmts.get(step.index) else { break };
        parent = Some(s);
    }
    vars.sort_by(|a, b| b.order.cmp(&a.order).then_with(|| a.name.cmp(&b.name)));
    vars
}

pub fn free_vars(e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    e.walk(&mut |n| {
        if let ExprKind::Var(v) = &n.kind {
            out.insert(v.clone());
        }
    });
    out
}

pub fn has_side_effects(e: &Expr) -> bool {
    let mut found = false;
    e.walk(&mut |n| {
        if matches!(n.kind, ExprKind::IncDec { .. }) {
            found = true;
        }
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minij::locate::statement_locations;
    use crate::minij::{parse, Program};

    #[test]
    fn nearest_first_with_globals_last() {
        let src = "int g = 1;\nint f(int a, int b) { int c = 0; try { int d = 1; } catch (e) { int z = 2; return a; } return c; }";
        let mut program = Program::single("a.mj", parse(src).unwrap());
        let symbols = program.check().unwrap();
        let unit = program.unit("a.mj").unwrap();
        let locs = statement_locations(unit);
        // pre-order: c, try, d, z, return a, return c
        let at = |i: usize| -> Vec<String> {
            visible_at(unit, &symbols, &locs[i]).into_iter().map(|v| v.name).collect()
        };
        assert_eq!(at(0), vec!["b", "a", "g"]);
        assert_eq!(at(2), vec!["c", "b", "a", "g"]);
        assert_eq!(at(4), vec!["z", "e", "c", "b", "a", "g"]);
        assert_eq!(at(5), vec!["c", "b", "a", "g"]);
    }
}
