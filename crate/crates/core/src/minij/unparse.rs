//! Canonical pretty printer. Output re-parses to a structurally equal tree.

use super::ast::*;

const INDENT: &str = "    ";

pub fn unparse_unit(unit: &Unit) -> String {
    let mut out = String::new();
    for (i, item) in unit.items.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match item {
            Item::Global(g) => {
                out.push_str(&format!("{} {}", g.ty, g.name));
                if let Some(init) = &g.init {
                    out.push_str(" = ");
                    out.push_str(&unparse_expr(init));
                }
                out.push_str(";\n");
            }
            Item::Function(f) => {
                let params: Vec<String> =
                    f.params.iter().map(|p| format!("{} {}", p.ty, p.name)).collect();
                out.push_str(&format!("{} {}({}) ", f.ret, f.name, params.join(", ")));
                write_block(&mut out, &f.body, 0);
                out.push('\n');
            }
        }
    }
    out
}

pub fn unparse_stmt(stmt: &Stmt) -> String {
    let mut out = String::new();
    write_stmt(&mut out, stmt, 0);
    out
}

/// The statement without its nested blocks: `if (c)`, `while (c)`, `try`,
/// or the full text for simple statements.
pub fn stmt_head(stmt: &Stmt) -> String {
    match &stmt.kind {
        StmtKind::If { cond, .. } => format!("if ({})", unparse_expr(cond)),
        StmtKind::While { cond, .. } => format!("while ({})", unparse_expr(cond)),
        StmtKind::Try { binding, .. } => format!("try catch ({binding})"),
        StmtKind::Block(_) => String::new(),
        _ => unparse_stmt(stmt),
    }
}

fn write_block(out: &mut String, block: &Block, depth: usize) {
    if block.stmts.is_empty() {
        out.push_str("{ }");
        return;
    }
    out.push_str("{\n");
    for s in &block.stmts {
        for _ in 0..=depth {
            out.push_str(INDENT);
        }
        write_stmt(out, s, depth + 1);
        out.push('\n');
    }
    for _ in 0..depth {
        out.push_str(INDENT);
    }
    out.push('}');
}

fn write_stmt(out: &mut String, stmt: &Stmt, depth: usize) {
    match &stmt.kind {
        StmtKind::Decl { ty, name, init } => {
            out.push_str(&format!("{ty} {name}"));
            if let Some(init) = init {
                out.push_str(" = ");
                out.push_str(&unparse_expr(init));
            }
            out.push(';');
        }
        StmtKind::Assign { target, op, value } => {
            out.push_str(&format!(
                "{} {} {};",
                unparse_expr(target),
                op.symbol(),
                unparse_expr(value)
            ));
        }
        StmtKind::Expr(e) => {
            out.push_str(&unparse_expr(e));
            out.push(';');
        }
        StmtKind::If { cond, then_block, else_block } => {
            out.push_str(&format!("if ({}) ", unparse_expr(cond)));
            write_block(out, then_block, depth);
            if let Some(else_block) = else_block {
                out.push_str(" else ");
                match else_block.stmts.as_slice() {
                    [only @ Stmt { kind: StmtKind::If { .. }, .. }] => write_stmt(out, only, depth),
                    _ => write_block(out, else_block, depth),
                }
            }
        }
        StmtKind::While { cond, body } => {
            out.push_str(&format!("while ({}) ", unparse_expr(cond)));
            write_block(out, body, depth);
        }
        StmtKind::Return(None) => out.push_str("return;"),
        StmtKind::Return(Some(e)) => out.push_str(&format!("return {};", unparse_expr(e))),
        StmtKind::Throw(e) => out.push_str(&format!("throw {};", unparse_expr(e))),
        StmtKind::Try { body, binding, handler } => {
            out.push_str("try ");
            write_block(out, body, depth);
            out.push_str(&format!(" catch ({binding}) "));
            write_block(out, handler, depth);
        }
        StmtKind::Block(b) => write_block(out, b, depth),
        StmtKind::Empty => out.push(';'),
    }
}

const UNARY_PREC: u8 = 11;
const POSTFIX_PREC: u8 = 12;

fn prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary { op, .. } => op.precedence(),
        ExprKind::Unary { .. } | ExprKind::Cast { .. } => UNARY_PREC,
        ExprKind::IncDec { op, .. } if op.is_prefix() => UNARY_PREC,
        _ => POSTFIX_PREC,
    }
}

pub fn unparse_expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Int(v) => v.to_string(),
        ExprKind::Float(v) => format_float(*v),
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::Str(s) => quote(s),
        ExprKind::Var(name) => name.clone(),
        ExprKind::Index { array, index } => {
            format!("{}[{}]", wrap(array, POSTFIX_PREC), unparse_expr(index))
        }
        ExprKind::Unary { op, operand } => {
            let inner = wrap(operand, UNARY_PREC);
            // `- -x` must not lex as a decrement.
            if *op == UnaryOp::Neg && inner.starts_with('-') {
                format!("-({inner})")
            } else {
                format!("{}{}", op.symbol(), inner)
            }
        }
        ExprKind::IncDec { op, target } => {
            let t = wrap(target, POSTFIX_PREC);
            match op {
                IncDecOp::PreInc => format!("++{t}"),
                IncDecOp::PreDec => format!("--{t}"),
                IncDecOp::PostInc => format!("{t}++"),
                IncDecOp::PostDec => format!("{t}--"),
            }
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            format!("{} {} {}", wrap(lhs, p), op.symbol(), wrap(rhs, p + 1))
        }
        ExprKind::Cast { ty, expr } => format!("({ty}) {}", wrap(expr, UNARY_PREC)),
        ExprKind::Call { name, args } => {
            let args: Vec<String> = args.iter().map(unparse_expr).collect();
            format!("{name}({})", args.join(", "))
        }
        ExprKind::NewArray { elem, len } => {
            // `new int[n][]` is the shape for arrays of arrays.
            let mut base = elem.clone();
            let mut dims = 0;
            while let Type::Array(inner) = base {
                base = *inner;
                dims += 1;
            }
            format!("new {base}[{}]{}", unparse_expr(len), "[]".repeat(dims))
        }
        ExprKind::ArrayLit(elems) => {
            let elems: Vec<String> = elems.iter().map(unparse_expr).collect();
            format!("[{}]", elems.join(", "))
        }
    }
}

fn wrap(e: &Expr, min_prec: u8) -> String {
    let s = unparse_expr(e);
    if prec(e) < min_prec {
        format!("({s})")
    } else {
        s
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v:?}")
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::super::parser::{parse_expr, parse_unit};
    use super::*;

    fn roundtrip_expr(src: &str) -> String {
        let e = parse_expr(src).unwrap();
        let printed = unparse_expr(&e);
        assert_eq!(parse_expr(&printed).unwrap(), e, "{src} -> {printed}");
        printed
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(roundtrip_expr("a + (b * c)"), "a + b * c");
        assert_eq!(roundtrip_expr("(a + b) * c"), "(a + b) * c");
        assert_eq!(roundtrip_expr("a - (b - c)"), "a - (b - c)");
        assert_eq!(roundtrip_expr("(a - b) - c"), "a - b - c");
        assert_eq!(roundtrip_expr("(float) (a / b)"), "(float) (a / b)");
    }

    #[test]
    fn negation_does_not_fuse_into_decrement() {
        assert_eq!(roundtrip_expr("-(-x)"), "-(-x)");
        assert_eq!(roundtrip_expr("-(--x)"), "-(--x)");
        assert_eq!(roundtrip_expr("a - -b"), "a - -b");
    }

    #[test]
    fn floats_print_with_a_fraction() {
        assert_eq!(roundtrip_expr("10d"), "10.0");
        assert_eq!(roundtrip_expr("0.5"), "0.5");
        assert_eq!(roundtrip_expr("1e20"), "1e20");
    }

    #[test]
    fn unit_fixpoint() {
        let src = "int g = 3;\nvoid f(int[] a) { if (a[0] > 1) { a[0]--; } else if (g == 2) { } else { ; } \
                   try { throw \"x\\n\"; } catch (e) { print(e); } }";
        let unit = parse_unit(src).unwrap();
        let once = unparse_unit(&unit);
        let again = parse_unit(&once).unwrap();
        assert_eq!(again, unit);
        assert_eq!(unparse_unit(&again), once);
    }
}
