//! Statement addressing within a unit.
//!
//! Statements are numbered in pre-order over function bodies, in item order.
//! A `StmtLoc` records how to reach a numbered statement structurally so
//! that it can be read or edited in place.

use super::ast::*;

/// One hop: which child block of the previous statement (ignored for the
/// first hop, which always starts at the function body) and which statement
/// within it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub slot: usize,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StmtLoc {
    pub item: usize,
    pub steps: Vec<Step>,
}

impl StmtLoc {
    /// Position of the statement inside its parent block.
    pub fn index_in_block(&self) -> usize {
        self.steps.last().map(|s| s.index).unwrap_or(0)
    }
}

pub fn statement_locations(unit: &Unit) -> Vec<StmtLoc> {
    let mut out = Vec::new();
    for (item, it) in unit.items.iter().enumerate() {
        if let Item::Function(f) = it {
            let mut prefix = Vec::new();
            collect(&f.body, item, 0, &mut prefix, &mut out);
        }
    }
    out
}

fn collect(block: &Block, item: usize, slot: usize, prefix: &mut Vec<Step>, out: &mut Vec<StmtLoc>) {
    for (index, stmt) in block.stmts.iter().enumerate() {
        prefix.push(Step { slot, index });
        out.push(StmtLoc { item, steps: prefix.clone() });
        for (child_slot, child) in stmt.child_blocks().into_iter().enumerate() {
            collect(child, item, child_slot, prefix, out);
        }
        prefix.pop();
    }
}

pub fn function_at(unit: &Unit, item: usize) -> Option<&Function> {
    match unit.items.get(item)? {
        Item::Function(f) => Some(f),
        Item::Global(_) => None,
    }
}

pub fn function_at_mut(unit: &mut Unit, item: usize) -> Option<&mut Function> {
    match unit.items.get_mut(item)? {
        Item::Function(f) => Some(f),
        Item::Global(_) => None,
    }
}

fn child_block(stmt: &Stmt, slot: usize) -> Option<&Block> {
    stmt.child_blocks().into_iter().nth(slot)
}

/// The block directly containing the addressed statement.
pub fn parent_block<'a>(unit: &'a Unit, loc: &StmtLoc) -> Option<&'a Block> {
    let mut block = &function_at(unit, loc.item)?.body;
    for w in loc.steps.windows(2) {
        let stmt = block.stmts.get(w[0].index)?;
        block = child_block(stmt, w[1].slot)?;
    }
    Some(block)
}

pub fn parent_block_mut<'a>(unit: &'a mut Unit, loc: &StmtLoc) -> Option<&'a mut Block> {
    let mut block = &mut function_at_mut(unit, loc.item)?.body;
    for w in loc.steps.windows(2) {
        let stmt = block.stmts.get_mut(w[0].index)?;
        block = stmt.child_block_mut(w[1].slot)?;
    }
    Some(block)
}

pub fn stmt_at<'a>(unit: &'a Unit, loc: &StmtLoc) -> Option<&'a Stmt> {
    parent_block(unit, loc)?.stmts.get(loc.index_in_block())
}

pub fn stmt_at_mut<'a>(unit: &'a mut Unit, loc: &StmtLoc) -> Option<&'a mut Stmt> {
    let i = loc.index_in_block();
    parent_block_mut(unit, loc)?.stmts.get_mut(i)
}

/// Every statement of the unit in pre-order, paired with its location.
pub fn statements(unit: &Unit) -> Vec<(StmtLoc, &Stmt)> {
    statement_locations(unit)
        .into_iter()
        .map(|loc| {
            let s = stmt_at(unit, &loc).expect("location derived from this unit");
            (loc, s)
        })
        .collect()
}
