//! Static checking for MiniJ. This is the "compiler" of the injection loop:
//! a mutant that fails here is stillborn.

use std::collections::BTreeMap;

use super::ast::*;
use super::{Program, TypeError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub name: String,
    pub params: Vec<Type>,
    pub ret: Type,
    /// Path of the unit defining the function; `None` for builtins.
    pub origin: Option<String>,
}

/// Program-wide names: functions keyed by (name, arity) and global variables.
#[derive(Clone, Debug, Default)]
pub struct Symbols {
    pub functions: BTreeMap<(String, usize), Signature>,
    pub globals: BTreeMap<String, Type>,
}

pub const BUILTINS: &[&str] = &["assert", "print", "len"];

impl Symbols {
    pub fn collect(program: &Program) -> Result<Symbols, TypeError> {
        let mut symbols = Symbols::default();
        for su in &program.units {
            for item in &su.unit.items {
                match item {
                    Item::Function(f) => {
                        let err = |m: String| TypeError::at(&su.path, f.span, m);
                        if BUILTINS.contains(&f.name.as_str()) {
                            return Err(err(format!("function '{}' shadows a builtin", f.name)));
                        }
                        let key = (f.name.clone(), f.params.len());
                        if symbols.functions.contains_key(&key) {
                            return Err(err(format!(
                                "duplicate function '{}' with {} parameter(s)",
                                f.name,
                                f.params.len()
                            )));
                        }
                        if f.params.iter().any(|p| p.ty == Type::Void) {
                            return Err(err("parameter of type void".into()));
                        }
                        symbols.functions.insert(key, Signature {
                            name: f.name.clone(),
                            params: f.params.iter().map(|p| p.ty.clone()).collect(),
                            ret: f.ret.clone(),
                            origin: Some(su.path.clone()),
                        });
                    }
                    Item::Global(g) => {
                        if g.ty == Type::Void {
                            return Err(TypeError::at(&su.path, g.span, "global of type void".into()));
                        }
                        if symbols.globals.insert(g.name.clone(), g.ty.clone()).is_some() {
                            return Err(TypeError::at(
                                &su.path,
                                g.span,
                                format!("duplicate global '{}'", g.name),
                            ));
                        }
                    }
                }
            }
        }
        Ok(symbols)
    }

    pub fn function(&self, name: &str, arity: usize) -> Option<&Signature> {
        self.functions.get(&(name.to_string(), arity))
    }

    /// All arities under which `name` is defined.
    pub fn overloads<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Signature> + 'a {
        self.functions.values().filter(move |s| s.name == name)
    }
}

/// Widening: identical types, or int into float.
pub fn assignable(from: &Type, to: &Type) -> bool {
    from == to || (*from == Type::Int && *to == Type::Float)
}

/// Checks and annotates one unit against program-wide symbols.
pub fn check_unit(path: &str, unit: &mut Unit, symbols: &Symbols) -> Result<(), TypeError> {
    for item in &mut unit.items {
        match item {
            Item::Global(g) => {
                let mut cx = Checker { path, symbols, scopes: Vec::new(), ret: Type::Void };
                if let Some(init) = &mut g.init {
                    let t = cx.expr(init)?;
                    if !assignable(&t, &g.ty) {
                        return Err(cx.err(init.span, format!("cannot initialize {} with {}", g.ty, t)));
                    }
                }
            }
            Item::Function(f) => {
                let mut cx = Checker {
                    path,
                    symbols,
                    scopes: vec![f.params.iter().map(|p| (p.name.clone(), p.ty.clone())).collect()],
                    ret: f.ret.clone(),
                };
                let mut seen = Vec::new();
                for p in &f.params {
                    if seen.contains(&&p.name) {
                        return Err(cx.err(f.span, format!("duplicate parameter '{}'", p.name)));
                    }
                    seen.push(&p.name);
                }
                cx.block(&mut f.body, false)?;
                if f.ret != Type::Void && !block_returns(&f.body) {
                    return Err(cx.err(
                        f.span,
                        format!("function '{}' may finish without returning {}", f.name, f.ret),
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Whether every path through the block ends in `return` or `throw`.
pub fn block_returns(block: &Block) -> bool {
    block.stmts.iter().any(stmt_returns)
}

fn stmt_returns(stmt: &Stmt) -> bool {
    match &stmt.kind {
        StmtKind::Return(_) | StmtKind::Throw(_) => true,
        StmtKind::If { then_block, else_block: Some(e), .. } => {
            block_returns(then_block) && block_returns(e)
        }
        StmtKind::While { cond, .. } => matches!(cond.kind, ExprKind::Bool(true)),
        StmtKind::Try { body, handler, .. } => block_returns(body) && block_returns(handler),
        StmtKind::Block(b) => block_returns(b),
        _ => false,
    }
}

struct Checker<'a> {
    path: &'a str,
    symbols: &'a Symbols,
    scopes: Vec<Vec<(String, Type)>>,
    ret: Type,
}

impl Checker<'_> {
    fn err(&self, span: Span, message: String) -> TypeError {
        TypeError::at(self.path, span, message)
    }

    fn lookup(&self, name: &str) -> Option<Type> {
        for scope in self.scopes.iter().rev() {
            if let Some((_, t)) = scope.iter().rev().find(|(n, _)| n == name) {
                return Some(t.clone());
            }
        }
        self.symbols.globals.get(name).cloned()
    }

    fn local_visible(&self, name: &str) -> bool {
        self.scopes.iter().any(|s| s.iter().any(|(n, _)| n == name))
    }

    fn block(&mut self, block: &mut Block, new_scope: bool) -> Result<(), TypeError> {
        if new_scope {
            self.scopes.push(Vec::new());
        }
        let res = block.stmts.iter_mut().try_for_each(|s| self.stmt(s));
        if new_scope {
            self.scopes.pop();
        }
        res
    }

    fn stmt(&mut self, stmt: &mut Stmt) -> Result<(), TypeError> {
        let span = stmt.span;
        match &mut stmt.kind {
            StmtKind::Decl { ty, name, init } => {
                if *ty == Type::Void {
                    return Err(self.err(span, "variable of type void".into()));
                }
                if self.local_visible(name) {
                    return Err(self.err(span, format!("variable '{name}' is already defined")));
                }
                if let Some(init) = init {
                    let t = self.expr(init)?;
                    if !assignable(&t, ty) {
                        return Err(self.err(init.span, format!("cannot initialize {ty} '{name}' with {t}")));
                    }
                }
                self.scopes.last_mut().expect("inside a function").push((name.clone(), ty.clone()));
            }
            StmtKind::Assign { target, op, value } => {
                if !is_lvalue(target) {
                    return Err(self.err(target.span, "left side of assignment is not assignable".into()));
                }
                let tt = self.expr(target)?;
                let vt = self.expr(value)?;
                let result = match op.binary() {
                    None => vt,
                    Some(bop) => binary_type(bop, &tt, &vt).ok_or_else(|| {
                        self.err(span, format!("operator '{}' cannot combine {tt} and {vt}", op.symbol()))
                    })?,
                };
                if !assignable(&result, &tt) {
                    return Err(self.err(value.span, format!("cannot assign {result} to {tt}")));
                }
            }
            StmtKind::Expr(e) => {
                if !matches!(e.kind, ExprKind::Call { .. } | ExprKind::IncDec { .. }) {
                    return Err(self.err(span, "expression is not a statement".into()));
                }
                self.expr(e)?;
            }
            StmtKind::If { cond, then_block, else_block } => {
                self.condition(cond)?;
                self.block(then_block, true)?;
                if let Some(e) = else_block {
                    self.block(e, true)?;
                }
            }
            StmtKind::While { cond, body } => {
                self.condition(cond)?;
                self.block(body, true)?;
            }
            StmtKind::Return(e) => match (e, &self.ret) {
                (None, Type::Void) => {}
                (None, t) => return Err(self.err(span, format!("missing return value of type {t}"))),
                (Some(e), Type::Void) => {
                    return Err(self.err(e.span, "void function cannot return a value".into()))
                }
                (Some(e), t) => {
                    let t = t.clone();
                    let et = self.expr(e)?;
                    if !assignable(&et, &t) {
                        return Err(self.err(e.span, format!("cannot return {et} from function returning {t}")));
                    }
                }
            },
            StmtKind::Throw(e) => {
                let t = self.expr(e)?;
                if t != Type::Str {
                    return Err(self.err(e.span, format!("throw needs a string, found {t}")));
                }
            }
            StmtKind::Try { body, binding, handler } => {
                self.block(body, true)?;
                if self.local_visible(binding) {
                    return Err(self.err(span, format!("variable '{binding}' is already defined")));
                }
                self.scopes.push(vec![(binding.clone(), Type::Str)]);
                let res = self.block(handler, false);
                self.scopes.pop();
                res?;
            }
            StmtKind::Block(b) => self.block(b, true)?,
            StmtKind::Empty => {}
        }
        Ok(())
    }

    fn condition(&mut self, cond: &mut Expr) -> Result<(), TypeError> {
        let t = self.expr(cond)?;
        if t != Type::Bool {
            return Err(self.err(cond.span, format!("condition must be bool, found {t}")));
        }
        Ok(())
    }

    fn expr(&mut self, e: &mut Expr) -> Result<Type, TypeError> {
        let span = e.span;
        let t = match &mut e.kind {
            ExprKind::Int(_) => Type::Int,
            ExprKind::Float(_) => Type::Float,
            ExprKind::Bool(_) => Type::Bool,
            ExprKind::Str(_) => Type::Str,
            ExprKind::Var(name) => self
                .lookup(name)
                .ok_or_else(|| self.err(span, format!("unknown variable '{name}'")))?,
            ExprKind::Index { array, index } => {
                let at = self.expr(array)?;
                let it = self.expr(index)?;
                if it != Type::Int {
                    return Err(self.err(index.span, format!("array index must be int, found {it}")));
                }
                match at {
                    Type::Array(elem) => *elem,
                    other => return Err(self.err(array.span, format!("cannot index into {other}"))),
                }
            }
            ExprKind::Unary { op, operand } => {
                let t = self.expr(operand)?;
                let op = *op;
                match (op, &t) {
                    (UnaryOp::Neg, Type::Int | Type::Float) => t,
                    (UnaryOp::Not, Type::Bool) => t,
                    _ => return Err(self.err(span, format!("operator '{}' cannot apply to {t}", op.symbol()))),
                }
            }
            ExprKind::IncDec { target, .. } => {
                if !is_lvalue(target) {
                    return Err(self.err(span, "increment target is not assignable".into()));
                }
                let t = self.expr(target)?;
                if !t.is_numeric() {
                    return Err(self.err(span, format!("cannot increment {t}")));
                }
                t
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let lt = self.expr(lhs)?;
                let rt = self.expr(rhs)?;
                binary_type(*op, &lt, &rt).ok_or_else(|| {
                    self.err(span, format!("operator '{}' cannot combine {lt} and {rt}", op.symbol()))
                })?
            }
            ExprKind::Cast { ty, expr } => {
                let t = self.expr(expr)?;
                if !(ty.is_numeric() && t.is_numeric()) {
                    return Err(self.err(span, format!("cannot cast {t} to {ty}")));
                }
                ty.clone()
            }
            ExprKind::Call { name, args } => {
                let mut arg_types = Vec::with_capacity(args.len());
                for a in args.iter_mut() {
                    arg_types.push(self.expr(a)?);
                }
                self.call_type(span, name, &arg_types)?
            }
            ExprKind::NewArray { elem, len } => {
                let lt = self.expr(len)?;
                if lt != Type::Int {
                    return Err(self.err(len.span, format!("array length must be int, found {lt}")));
                }
                if *elem == Type::Void {
                    return Err(self.err(span, "array of void".into()));
                }
                Type::Array(Box::new(elem.clone()))
            }
            ExprKind::ArrayLit(elems) => {
                let mut ts = Vec::with_capacity(elems.len());
                for el in elems.iter_mut() {
                    ts.push(self.expr(el)?);
                }
                let elem = if ts.iter().all(Type::is_numeric) && ts.contains(&Type::Float) {
                    Type::Float
                } else {
                    ts[0].clone()
                };
                if let Some(bad) = ts.iter().find(|t| !assignable(t, &elem)) {
                    return Err(self.err(span, format!("array literal mixes {elem} and {bad}")));
                }
                Type::Array(Box::new(elem))
            }
        };
        e.ty = Some(t.clone());
        Ok(t)
    }

    fn call_type(&self, span: Span, name: &str, args: &[Type]) -> Result<Type, TypeError> {
        match (name, args) {
            ("assert", [Type::Bool]) => return Ok(Type::Void),
            ("assert", _) => return Err(self.err(span, "assert takes one bool".into())),
            ("print", [t]) if *t != Type::Void => return Ok(Type::Void),
            ("print", _) => return Err(self.err(span, "print takes one value".into())),
            ("len", [Type::Array(_) | Type::Str]) => return Ok(Type::Int),
            ("len", _) => return Err(self.err(span, "len takes an array or a string".into())),
            _ => {}
        }
        let sig = self.symbols.function(name, args.len()).ok_or_else(|| {
            self.err(span, format!("no function '{name}' taking {} argument(s)", args.len()))
        })?;
        for (i, (a, p)) in args.iter().zip(&sig.params).enumerate() {
            if !assignable(a, p) {
                return Err(self.err(span, format!("argument {} of '{name}': expected {p}, found {a}", i + 1)));
            }
        }
        Ok(sig.ret.clone())
    }
}

pub fn is_lvalue(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Var(_) => true,
        ExprKind::Index { array, .. } => is_lvalue(array) || matches!(array.kind, ExprKind::Call { .. }),
        _ => false,
    }
}

/// Result type of a binary operator, or `None` when ill-typed.
pub fn binary_type(op: BinOp, l: &Type, r: &Type) -> Option<Type> {
    use Type::*;
    match op {
        BinOp::Add if *l == Str && *r == Str => Some(Str),
        BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Rem => match (l, r) {
            (Int, Int) => Some(Int),
            (Int | Float, Int | Float) => Some(Float),
            _ => None,
        },
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
            (l.is_numeric() && r.is_numeric()).then_some(Bool)
        }
        BinOp::Eq | BinOp::Ne => {
            let ok = (l.is_numeric() && r.is_numeric()) || (l == r && matches!(l, Bool | Str));
            ok.then_some(Bool)
        }
        BinOp::And | BinOp::Or => (*l == Bool && *r == Bool).then_some(Bool),
        BinOp::BitAnd | BinOp::BitOr | BinOp::BitXor | BinOp::Shl | BinOp::Shr => {
            (*l == Int && *r == Int).then_some(Int)
        }
    }
}
