use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::catalog::{Catalog, PatternKind};
use super::scope::{free_vars, has_side_effects, visible_at, ScopeVar};
use super::{Edit, PatternApplication, DONOR_CAP};
use crate::corpus::{Corpus, StatementId};
use crate::minij::ast::*;
use crate::minij::check::{assignable, Signature, BUILTINS};
use crate::minij::locate::{function_at, parent_block, statement_locations, stmt_at, StmtLoc};
use crate::minij::{unparse_expr, unparse_stmt, Symbols};

/// Per-file state shared by all statements of a unit.
pub struct MatchContext<'a> {
    pub path: &'a str,
    pub unit: &'a Unit,
    pub symbols: &'a Symbols,
    locations: Vec<StmtLoc>,
    literals: Vec<Expr>,
    /// Item index of each function defined in the unit, keyed by (name, arity).
    items: BTreeMap<(String, usize), usize>,
}

impl<'a> MatchContext<'a> {
    /// `unit` must be type checked so that expressions carry types.
    pub fn new(path: &'a str, unit: &'a Unit, symbols: &'a Symbols) -> MatchContext<'a> {
        let locations = statement_locations(unit);
        let mut literals: Vec<Expr> = Vec::new();
        let mut seen = BTreeSet::new();
        let mut note = |e: &Expr| {
            e.walk(&mut |n| {
                if n.is_literal() && seen.insert(unparse_expr(n)) {
                    literals.push(n.clone());
                }
            });
        };
        for item in &unit.items {
            match item {
                Item::Global(g) => g.init.iter().for_each(&mut note),
                Item::Function(_) => {}
            }
        }
        for loc in &locations {
            let s = stmt_at(unit, loc).expect("location derived from unit");
            s.exprs().into_iter().for_each(&mut note);
        }
        let items = unit
            .items
            .iter()
            .enumerate()
            .filter_map(|(i, it)| match it {
                Item::Function(f) => Some(((f.name.clone(), f.params.len()), i)),
                Item::Global(_) => None,
            })
            .collect();
        MatchContext { path, unit, symbols, locations, literals, items }
    }

    pub fn statement_count(&self) -> usize {
        self.locations.len()
    }

    pub fn location(&self, index: usize) -> Option<&StmtLoc> {
        self.locations.get(index)
    }

    /// Functions of this unit usable as donors from the function at `item`,
    /// nearest definition first, then by name.
    fn donor_functions(&self, item: usize, pred: impl Fn(&Signature) -> bool) -> Vec<&'a Signature> {
        let mut v: Vec<(usize, &Signature)> = self
            .symbols
            .functions
            .values()
            .filter(|s| s.origin.as_deref() == Some(self.path))
            .filter(|s| !s.name.starts_with("test_"))
            .filter_map(|s| {
                let at = *self.items.get(&(s.name.clone(), s.params.len()))?;
                (at != item && pred(s)).then_some((at.abs_diff(item), s))
            })
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.name.cmp(&b.1.name)));
        v.into_iter().map(|(_, s)| s).collect()
    }
}

/// All applications for one statement of a corpus file.
pub fn match_patterns(corpus: &Corpus, catalog: &Catalog, stmt: &StatementId) -> Vec<PatternApplication> {
    let Some(unit) = corpus.unit(&stmt.path) else { return Vec::new() };
    let cx = MatchContext::new(&stmt.path, unit, &corpus.symbols);
    match_statement(&cx, catalog, stmt.index)
}

/// All applications for the statement with pre-order `index`, ordered by
/// breadth-first node position, then pattern priority, then donor order.
pub fn match_statement(cx: &MatchContext<'_>, catalog: &Catalog, index: usize) -> Vec<PatternApplication> {
    let Some(loc) = cx.location(index) else { return Vec::new() };
    let stmt = stmt_at(cx.unit, loc).expect("location derived from unit");
    let func = function_at(cx.unit, loc.item).expect("statements live in functions");
    let scope = visible_at(cx.unit, cx.symbols, loc);
    let mut m = Matcher {
        cx,
        catalog,
        loc,
        stmt,
        func,
        scope,
        id: StatementId { path: cx.path.to_string(), index },
        anchor: unparse_stmt(stmt),
        out: Vec::new(),
    };
    m.statement_level();
    m.expression_level();
    let mut out = m.out;
    out.sort_by_key(|a| (a.bfs_index, a.priority, a.donor_index));
    out
}

struct Matcher<'c, 'a> {
    cx: &'c MatchContext<'a>,
    catalog: &'c Catalog,
    loc: &'c StmtLoc,
    stmt: &'a Stmt,
    func: &'a Function,
    scope: Vec<ScopeVar>,
    id: StatementId,
    anchor: String,
    out: Vec<PatternApplication>,
}

fn var(v: &ScopeVar) -> Expr {
    Expr::typed(ExprKind::Var(v.name.clone()), v.ty.clone())
}

fn lit(kind: ExprKind, ty: Type) -> Expr {
    Expr::typed(kind, ty)
}

fn neg_one() -> Expr {
    Expr::typed(
        ExprKind::Unary { op: UnaryOp::Neg, operand: Box::new(lit(ExprKind::Int(1), Type::Int)) },
        Type::Int,
    )
}

fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) })
}

fn is_builtin(name: &str) -> bool {
    BUILTINS.contains(&name)
}

/// Keeps the first occurrence of each distinct text, up to the donor cap.
fn distinct(exprs: impl IntoIterator<Item = Expr>, exclude: &[String]) -> Vec<Expr> {
    let mut seen: BTreeSet<String> = exclude.iter().cloned().collect();
    let mut out = Vec::new();
    for e in exprs {
        if out.len() == DONOR_CAP {
            break;
        }
        if seen.insert(unparse_expr(&e)) {
            out.push(e);
        }
    }
    out
}

fn integral(v: f64) -> Option<i64> {
    (v.is_finite() && v.fract() == 0.0 && v.abs() < 9.0e15).then_some(v as i64)
}

impl<'c, 'a> Matcher<'c, 'a> {
    fn emit(&mut self, kind: PatternKind, bfs: usize, node: &[usize], donor: Option<String>, edit: Edit) {
        if !self.catalog.is_enabled(kind) {
            return;
        }
        let donor_index = self.out.iter().filter(|a| a.bfs_index == bfs && a.kind == kind).count();
        self.out.push(PatternApplication {
            statement: self.id.clone(),
            location: self.loc.clone(),
            node: node.to_vec(),
            kind,
            priority: self.catalog.priority(kind),
            bfs_index: bfs,
            donor_index,
            donor,
            anchor: self.anchor.clone(),
            edit,
        });
    }

    fn replace(&mut self, kind: PatternKind, bfs: usize, path: &[usize], with: Expr, donor: Option<String>) {
        self.emit(kind, bfs, path, donor, Edit::ReplaceExpr { path: path.to_vec(), with });
    }

    fn in_scope(&self, e: &Expr) -> bool {
        free_vars(e).iter().all(|n| self.scope.iter().any(|v| &v.name == n))
    }

    /// Statements of the enclosing function, pre-order.
    fn function_statements(&self) -> Vec<&'a Stmt> {
        self.cx
            .locations
            .iter()
            .filter(|l| l.item == self.loc.item)
            .map(|l| stmt_at(self.cx.unit, l).expect("location derived from unit"))
            .collect()
    }

    /// Boolean variables in scope, then side-effect-free boolean expressions
    /// of the enclosing function that only use visible variables.
    fn bool_pool(&self) -> Vec<Expr> {
        let mut pool: Vec<Expr> = self.scope.iter().filter(|v| v.ty == Type::Bool).map(var).collect();
        for s in self.function_statements() {
            for e in s.exprs() {
                e.walk(&mut |n| {
                    if n.ty == Some(Type::Bool) && !n.is_literal() && !matches!(n.kind, ExprKind::Var(_)) {
                        pool.push(n.clone());
                    }
                });
            }
        }
        pool.into_iter().filter(|e| !has_side_effects(e) && self.in_scope(e)).collect()
    }

    fn synth_args(&self, params: &[Type]) -> Option<Vec<Expr>> {
        params
            .iter()
            .map(|p| {
                self.scope
                    .iter()
                    .find(|v| assignable(&v.ty, p))
                    .map(var)
                    .or_else(|| p.default_literal().map(|k| lit(k, p.clone())))
            })
            .collect()
    }

    fn around(&self, extra: Stmt) -> [(String, Vec<Stmt>); 2] {
        let me = self.stmt.clone();
        [("after", vec![me.clone(), extra.clone()]), ("before", vec![extra, me])]
            .map(|(w, v)| (w.to_string(), v))
    }

    fn statement_level(&mut self) {
        use PatternKind::*;
        let root: &[usize] = &[];

        let calls: Vec<Stmt> = self
            .cx
            .donor_functions(self.loc.item, |s| s.ret == Type::Void)
            .into_iter()
            .filter_map(|s| {
                let args = self.synth_args(&s.params)?;
                Some(Stmt::new(StmtKind::Expr(Expr::new(ExprKind::Call { name: s.name.clone(), args }))))
            })
            .take(DONOR_CAP)
            .collect();
        for call in calls {
            for (w, stmts) in self.around(call.clone()) {
                let d = format!("{w}: {}", unparse_stmt(&call));
                self.emit(InsertMethodCall, 0, root, Some(d), Edit::ReplaceStmt(stmts));
            }
        }

        let values: Vec<Option<Expr>> = if self.func.ret == Type::Void {
            vec![None]
        } else {
            let ret = self.func.ret.clone();
            let default = ret.default_literal().map(|k| lit(k, ret.clone()));
            let vars = self.scope.iter().filter(|v| assignable(&v.ty, &ret)).map(var);
            distinct(default.into_iter().chain(vars), &[]).into_iter().map(Some).collect()
        };
        for v in values {
            let ret = Stmt::new(StmtKind::Return(v));
            for (w, stmts) in self.around(ret.clone()) {
                let d = format!("{w}: {}", unparse_stmt(&ret));
                self.emit(InsertReturn, 0, root, Some(d), Edit::ReplaceStmt(stmts));
            }
        }

        let mut binding = "e".to_string();
        let mut k = 0;
        while self.scope.iter().any(|v| v.name == binding) {
            k += 1;
            binding = format!("e{k}");
        }
        let wrapped = Stmt::new(StmtKind::Try {
            body: Block { stmts: vec![self.stmt.clone()] },
            binding,
            handler: Block::default(),
        });
        self.emit(WrapTryCatch, 0, root, None, Edit::ReplaceStmt(vec![wrapped]));

        let conds = distinct(
            [lit(ExprKind::Bool(false), Type::Bool), lit(ExprKind::Bool(true), Type::Bool)]
                .into_iter()
                .chain(self.bool_pool()),
            &[],
        );
        for c in conds {
            let d = unparse_expr(&c);
            let wrapped = Stmt::new(StmtKind::If {
                cond: c,
                then_block: Block { stmts: vec![self.stmt.clone()] },
                else_block: None,
            });
            self.emit(WrapIf, 0, root, Some(d), Edit::ReplaceStmt(vec![wrapped]));
        }

        if let StmtKind::Decl { ty, name, init } = &self.stmt.kind {
            let other = match ty {
                Type::Int => Some(Type::Float),
                Type::Float => Some(Type::Int),
                _ => None,
            };
            if let Some(t) = other {
                let d = t.to_string();
                let s = Stmt::new(StmtKind::Decl { ty: t, name: name.clone(), init: init.clone() });
                self.emit(ChangeDeclaredType, 0, root, Some(d), Edit::ReplaceStmt(vec![s]));
            }
        }

        if let StmtKind::Assign { target, op, value } = &self.stmt.kind {
            for alt in self.catalog.families.assignment_alternatives(*op) {
                let s = Stmt::new(StmtKind::Assign { target: target.clone(), op: alt, value: value.clone() });
                self.emit(AssignmentOperator, 0, root, Some(alt.symbol().into()), Edit::ReplaceStmt(vec![s]));
            }
        }

        let has_next = parent_block(self.cx.unit, self.loc)
            .is_some_and(|b| self.loc.index_in_block() + 1 < b.stmts.len());
        if has_next {
            self.emit(MoveStatement, 0, root, None, Edit::SwapWithNext);
        }

        self.emit(RemoveStatement, 0, root, None, Edit::ReplaceStmt(Vec::new()));

        let body = match &self.func.ret {
            Type::Void => Some(Block::default()),
            t => t.default_literal().map(|k| Block {
                stmts: vec![Stmt::new(StmtKind::Return(Some(lit(k, t.clone()))))],
            }),
        };
        if let Some(body) = body {
            let d = format!("{}/{}", self.func.name, self.func.params.len());
            self.emit(RemoveMethod, 0, root, Some(d), Edit::ReplaceBody(body));
        }
    }

    fn expression_level(&mut self) {
        let mut queue: VecDeque<(Vec<usize>, &'a Expr, Option<&'a Expr>)> = self
            .stmt
            .exprs()
            .into_iter()
            .enumerate()
            .map(|(i, e)| (vec![i], e, None))
            .collect();
        let mut bfs = 0;
        while let Some((path, e, parent)) = queue.pop_front() {
            bfs += 1;
            self.node(bfs, &path, e, parent);
            for (i, c) in e.children().into_iter().enumerate() {
                let mut p = path.clone();
                p.push(i);
                queue.push_back((p, c, Some(e)));
            }
        }
    }

    fn node(&mut self, bfs: usize, path: &[usize], e: &'a Expr, parent: Option<&'a Expr>) {
        use PatternKind::*;
        let text = unparse_expr(e);

        if path.len() == 1 && matches!(self.stmt.kind, StmtKind::Return(Some(_))) {
            self.return_donors(bfs, path, &text);
        }

        let condition_slot = match parent {
            None => matches!(self.stmt.kind, StmtKind::If { .. } | StmtKind::While { .. }),
            Some(p) => matches!(p.kind, ExprKind::Binary { op, .. } if op.is_logical()),
        };
        if condition_slot && e.ty == Some(Type::Bool) && !e.is_literal() {
            let donors = distinct(self.bool_pool(), &[text.clone()]);
            for d in donors {
                for op in [BinOp::And, BinOp::Or] {
                    let desc = format!("{} {}", op.symbol(), unparse_expr(&d));
                    self.replace(InsertConditionalExpr, bfs, path, binary(op, e.clone(), d.clone()), Some(desc));
                }
            }
        }

        if let Some(Expr { kind: ExprKind::Call { name, args }, .. }) = parent {
            if !is_builtin(name) {
                self.argument_donors(bfs, path, e, name, args, &text);
            }
        }

        match &e.kind {
            ExprKind::Binary { op, lhs, rhs } => self.binary_node(bfs, path, e, *op, lhs, rhs, parent),
            ExprKind::Unary { op, operand } => {
                self.replace(UnaryOperator, bfs, path, (**operand).clone(), Some(format!("drop {}", op.symbol())));
            }
            ExprKind::IncDec { op, target } => {
                for alt in self.catalog.families.increment_alternatives(*op) {
                    let with = Expr::new(ExprKind::IncDec { op: alt, target: target.clone() });
                    self.replace(UnaryOperator, bfs, path, with, Some(alt.symbol().into()));
                }
            }
            ExprKind::Cast { ty, expr } => {
                let other = match ty {
                    Type::Int => Type::Float,
                    _ => Type::Int,
                };
                let d = other.to_string();
                let with = Expr::new(ExprKind::Cast { ty: other, expr: expr.clone() });
                self.replace(ChangeCastType, bfs, path, with, Some(d));
            }
            ExprKind::Int(_) | ExprKind::Float(_) | ExprKind::Str(_) | ExprKind::Bool(_) => {
                for d in self.literal_donors(e) {
                    let desc = unparse_expr(&d);
                    self.replace(ReplaceLiteral, bfs, path, d, Some(desc));
                }
            }
            ExprKind::Var(name) => {
                let ty = e.ty.clone();
                let donors: Vec<Expr> = self
                    .scope
                    .iter()
                    .filter(|v| Some(&v.ty) == ty.as_ref() && &v.name != name)
                    .take(DONOR_CAP)
                    .map(var)
                    .collect();
                for d in donors {
                    let desc = unparse_expr(&d);
                    self.replace(ReplaceVariable, bfs, path, d, Some(desc));
                }
            }
            ExprKind::Call { name, args } if !is_builtin(name) => self.call_node(bfs, path, name, args),
            _ => {}
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn binary_node(
        &mut self,
        bfs: usize,
        path: &[usize],
        e: &Expr,
        op: BinOp,
        lhs: &Expr,
        rhs: &Expr,
        parent: Option<&Expr>,
    ) {
        use PatternKind::*;
        let rebuild = |op: BinOp| binary(op, lhs.clone(), rhs.clone());
        let alternatives = self.catalog.families.binary_alternatives(op);
        if op.is_logical() {
            self.replace(RemoveConditionalExpr, bfs, path, lhs.clone(), Some("keep left".into()));
            self.replace(RemoveConditionalExpr, bfs, path, rhs.clone(), Some("keep right".into()));
            for &alt in &alternatives {
                self.replace(ChangeConditionalOperator, bfs, path, rebuild(alt), Some(alt.symbol().into()));
            }
            for &alt in &alternatives {
                self.replace(ConditionalOperator, bfs, path, rebuild(alt), Some(alt.symbol().into()));
            }
        }
        if op.is_arithmetic() {
            for &alt in &alternatives {
                self.replace(ArithmeticOperator, bfs, path, rebuild(alt), Some(alt.symbol().into()));
            }
        }
        if op.is_relational() {
            for &alt in &alternatives {
                self.replace(RelationalOperator, bfs, path, rebuild(alt), Some(alt.symbol().into()));
            }
        }
        if op.is_bitwise() {
            for &alt in &alternatives {
                self.replace(BitwiseOperator, bfs, path, rebuild(alt), Some(alt.symbol().into()));
            }
        }
        if op == BinOp::Div {
            if let Some((with, d)) = defloat(rhs) {
                self.replace(FloatDivisorCast, bfs, path, binary(op, lhs.clone(), with), Some(d));
            }
            if let Some((with, d)) = defloat(lhs) {
                self.replace(FloatDividendCast, bfs, path, binary(op, with, rhs.clone()), Some(d));
            }
        }
        if op == BinOp::Mul {
            for (a, b) in [(lhs, rhs), (rhs, lhs)] {
                if let Some(with) = mul_to_div(a, b) {
                    let d = unparse_expr(&with);
                    self.replace(FloatMulToIntDiv, bfs, path, with, Some(d));
                }
            }
        }
        let in_chain = parent.is_some_and(|p| matches!(p.kind, ExprKind::Binary { op, .. } if op.is_arithmetic()));
        if op.is_arithmetic() && !in_chain {
            if let Some(with) = swap_outer_operands(e) {
                let d = unparse_expr(&with);
                self.replace(OperandOrder, bfs, path, with, Some(d));
            }
        }
    }

    fn literal_donors(&self, e: &Expr) -> Vec<Expr> {
        let text = unparse_expr(e);
        let pool = |pred: fn(&ExprKind) -> bool| -> Vec<Expr> {
            self.cx.literals.iter().filter(|l| pred(&l.kind)).cloned().collect()
        };
        let candidates: Vec<Expr> = match &e.kind {
            ExprKind::Int(_) => {
                let mut v = pool(|k| matches!(k, ExprKind::Int(_)));
                v.extend([lit(ExprKind::Int(0), Type::Int), lit(ExprKind::Int(1), Type::Int), neg_one()]);
                v
            }
            ExprKind::Float(_) => {
                let mut v = pool(|k| matches!(k, ExprKind::Float(_)));
                v.extend([lit(ExprKind::Float(0.0), Type::Float), lit(ExprKind::Float(1.0), Type::Float)]);
                v
            }
            ExprKind::Str(_) => {
                let mut v = pool(|k| matches!(k, ExprKind::Str(_)));
                v.push(lit(ExprKind::Str(String::new()), Type::Str));
                v
            }
            ExprKind::Bool(b) => vec![lit(ExprKind::Bool(!b), Type::Bool)],
            _ => Vec::new(),
        };
        distinct(candidates, &[text])
    }

    fn return_donors(&mut self, bfs: usize, path: &[usize], text: &str) {
        let ret = self.func.ret.clone();
        let mut candidates: Vec<Expr> = Vec::new();
        for s in self.function_statements() {
            if let StmtKind::Return(Some(r)) = &s.kind {
                candidates.push(r.clone());
            }
        }
        candidates.extend(self.scope.iter().filter(|v| assignable(&v.ty, &ret)).map(var));
        candidates.extend(ret.default_literal().map(|k| lit(k, ret.clone())));
        let candidates: Vec<Expr> = candidates
            .into_iter()
            .filter(|c| !has_side_effects(c) && self.in_scope(c))
            .filter(|c| c.ty.as_ref().is_none_or(|t| assignable(t, &ret)))
            .collect();
        for d in distinct(candidates, &[text.to_string()]) {
            let desc = unparse_expr(&d);
            self.replace(PatternKind::ReplaceReturnExpr, bfs, path, d, Some(desc));
        }
    }

    fn argument_donors(&mut self, bfs: usize, path: &[usize], e: &Expr, name: &str, args: &[Expr], text: &str) {
        use PatternKind::*;
        let pos = *path.last().expect("argument has a parent");
        if let Some(ty) = &e.ty {
            let siblings = args.iter().filter(|a| a.ty.as_ref() == Some(ty) && !has_side_effects(a)).cloned();
            let vars = self.scope.iter().filter(|v| &v.ty == ty).map(var);
            for d in distinct(siblings.chain(vars), &[text.to_string()]) {
                let desc = unparse_expr(&d);
                self.replace(ReplaceArgument, bfs, path, d, Some(desc));
            }
        }
        if let Some(sig) = self.cx.symbols.function(name, args.len() - 1) {
            let rest: Vec<Expr> =
                args.iter().enumerate().filter(|(i, _)| *i != pos).map(|(_, a)| a.clone()).collect();
            let fits = rest
                .iter()
                .zip(&sig.params)
                .all(|(a, p)| a.ty.as_ref().is_some_and(|t| assignable(t, p)));
            if fits {
                let with = Expr::new(ExprKind::Call { name: name.to_string(), args: rest });
                let mut call_path = path.to_vec();
                call_path.pop();
                self.emit(RemoveArgument, bfs, path, Some(format!("drop #{pos}")), Edit::ReplaceExpr {
                    path: call_path,
                    with,
                });
            }
        }
    }

    fn call_node(&mut self, bfs: usize, path: &[usize], name: &str, args: &[Expr]) {
        use PatternKind::*;
        let arity = args.len();
        let Some(current) = self.cx.symbols.function(name, arity) else { return };
        let current = current.clone();
        let swaps: Vec<String> = self
            .cx
            .donor_functions(self.loc.item, |s| {
                s.name != name && s.params == current.params && s.ret == current.ret
            })
            .into_iter()
            .take(DONOR_CAP)
            .map(|s| s.name.clone())
            .collect();
        for other in swaps {
            let with = Expr::new(ExprKind::Call { name: other.clone(), args: args.to_vec() });
            self.replace(ReplaceMethodCall, bfs, path, with, Some(other));
        }
        if let Some(sig) = self.cx.symbols.function(name, arity + 1) {
            let fits = args
                .iter()
                .zip(&sig.params)
                .all(|(a, p)| a.ty.as_ref().is_some_and(|t| assignable(t, p)));
            let last = sig.params[arity].clone();
            if fits {
                let vars = self.scope.iter().filter(|v| assignable(&v.ty, &last)).map(var);
                let default = last.default_literal().map(|k| lit(k, last.clone()));
                for extra in distinct(vars.chain(default), &[]) {
                    let desc = unparse_expr(&extra);
                    let mut new_args = args.to_vec();
                    new_args.push(extra);
                    let with = Expr::new(ExprKind::Call { name: name.to_string(), args: new_args });
                    self.replace(AddArgument, bfs, path, with, Some(desc));
                }
            }
        }
    }
}

/// Drops a float cast, or turns an integral float literal into an int one.
fn defloat(e: &Expr) -> Option<(Expr, String)> {
    match &e.kind {
        ExprKind::Cast { ty: Type::Float, expr } => Some(((**expr).clone(), "remove cast".into())),
        ExprKind::Float(v) => {
            let i = integral(*v)?;
            Some((Expr::typed(ExprKind::Int(i), Type::Int), format!("{i}")))
        }
        _ => None,
    }
}

/// `(1.0 / d) * n` becomes `n / d`; `c * x` with `1/c` a whole number `k`
/// becomes `x / k`.
fn mul_to_div(factor: &Expr, other: &Expr) -> Option<Expr> {
    match &factor.kind {
        ExprKind::Binary { op: BinOp::Div, lhs, rhs } if matches!(lhs.kind, ExprKind::Float(v) if v == 1.0) => {
            Some(binary(BinOp::Div, other.clone(), (**rhs).clone()))
        }
        ExprKind::Float(c) if *c > 0.0 && *c < 1.0 => {
            let k = integral(1.0 / c).filter(|k| *k >= 2)?;
            Some(binary(BinOp::Div, other.clone(), Expr::typed(ExprKind::Int(k), Type::Int)))
        }
        _ => None,
    }
}

/// Exchanges the leftmost and rightmost operands of an arithmetic chain.
fn swap_outer_operands(e: &Expr) -> Option<Expr> {
    fn outer(e: &Expr, left: bool) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = e;
        while let ExprKind::Binary { op, lhs, rhs } = &cur.kind {
            if !op.is_arithmetic() {
                break;
            }
            path.push(if left { 0 } else { 1 });
            cur = if left { lhs } else { rhs };
        }
        path
    }
    fn at_mut<'e>(e: &'e mut Expr, path: &[usize]) -> &'e mut Expr {
        path.iter().fold(e, |e, &i| e.children_mut().into_iter().nth(i).expect("path inside chain"))
    }
    let (lp, rp) = (outer(e, true), outer(e, false));
    let mut out = e.clone();
    let l = at_mut(&mut out, &lp).clone();
    let r = std::mem::replace(at_mut(&mut out, &rp), l.clone());
    *at_mut(&mut out, &lp) = r;
    (unparse_expr(&out) != unparse_expr(e)).then_some(out)
}
