use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::ParseError;

pub fn parse_unit(src: &str) -> Result<Unit, ParseError> {
    let mut p = Parser::new(src)?;
    let mut items = Vec::new();
    while !p.at_eof() {
        items.push(p.item()?);
    }
    Ok(Unit { items })
}

/// Parses exactly one statement (surrounding whitespace allowed).
pub fn parse_stmt(src: &str) -> Result<Stmt, ParseError> {
    let mut p = Parser::new(src)?;
    let s = p.stmt()?;
    if !p.at_eof() {
        return Err(p.error("trailing input after statement"));
    }
    Ok(s)
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if !p.at_eof() {
        return Err(p.error("trailing input after expression"));
    }
    Ok(e)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

const TYPE_KEYWORDS: &[&str] = &["int", "float", "bool", "string"];

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<Span, ParseError> {
        if self.is_sym(s) {
            Ok(self.bump().span)
        } else {
            Err(self.error(format!("expected '{s}', found {}", describe(self.peek()))))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            other => Err(self.error(format!("expected identifier, found {}", describe(&other)))),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let s = self.span();
        ParseError { line: s.start_line, col: s.start_col, message: message.into() }
    }

    fn at_type(&self) -> bool {
        matches!(self.peek(), Tok::Sym(s) if TYPE_KEYWORDS.contains(s))
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let base = match self.peek() {
            Tok::Sym("int") => Type::Int,
            Tok::Sym("float") => Type::Float,
            Tok::Sym("bool") => Type::Bool,
            Tok::Sym("string") => Type::Str,
            Tok::Sym("void") => Type::Void,
            other => return Err(self.error(format!("expected type, found {}", describe(other)))),
        };
        self.bump();
        let mut ty = base;
        while self.is_sym("[") && matches!(self.peek_at(1), Tok::Sym("]")) {
            self.bump();
            self.bump();
            ty = Type::Array(Box::new(ty));
        }
        Ok(ty)
    }

    fn item(&mut self) -> Result<Item, ParseError> {
        let start = self.span();
        let ty = self.ty()?;
        let name = self.ident()?;
        if self.eat("(") {
            let mut params = Vec::new();
            if !self.is_sym(")") {
                loop {
                    let pty = self.ty()?;
                    let pname = self.ident()?;
                    params.push(Param { ty: pty, name: pname });
                    if !self.eat(",") {
                        break;
                    }
                }
            }
            self.expect(")")?;
            let body = self.block()?;
            Ok(Item::Function(Function {
                ret: ty,
                name,
                params,
                body,
                span: start.join(self.prev_span()),
            }))
        } else {
            let init = if self.eat("=") { Some(self.expr()?) } else { None };
            let end = self.expect(";")?;
            Ok(Item::Global(Global { ty, name, init, span: start.join(end) }))
        }
    }

    fn block(&mut self) -> Result<Block, ParseError> {
        self.expect("{")?;
        let mut stmts = Vec::new();
        while !self.is_sym("}") {
            if self.at_eof() {
                return Err(self.error("unexpected end of input, expected '}'"));
            }
            stmts.push(self.stmt()?);
        }
        self.bump();
        Ok(Block { stmts })
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let start = self.span();
        let kind = match self.peek() {
            Tok::Sym("{") => StmtKind::Block(self.block()?),
            Tok::Sym(";") => {
                self.bump();
                StmtKind::Empty
            }
            Tok::Sym("if") => {
                self.bump();
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                let then_block = self.block()?;
                let else_block = if self.eat("else") {
                    if self.is_sym("if") {
                        Some(Block { stmts: vec![self.stmt()?] })
                    } else {
                        Some(self.block()?)
                    }
                } else {
                    None
                };
                StmtKind::If { cond, then_block, else_block }
            }
            Tok::Sym("while") => {
                self.bump();
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                StmtKind::While { cond, body: self.block()? }
            }
            Tok::Sym("return") => {
                self.bump();
                let e = if self.is_sym(";") { None } else { Some(self.expr()?) };
                self.expect(";")?;
                StmtKind::Return(e)
            }
            Tok::Sym("throw") => {
                self.bump();
                let e = self.expr()?;
                self.expect(";")?;
                StmtKind::Throw(e)
            }
            Tok::Sym("try") => {
                self.bump();
                let body = self.block()?;
                self.expect("catch")?;
                self.expect("(")?;
                let binding = self.ident()?;
                self.expect(")")?;
                let handler = self.block()?;
                StmtKind::Try { body, binding, handler }
            }
            _ if self.at_type() => {
                let ty = self.ty()?;
                let name = self.ident()?;
                let init = if self.eat("=") { Some(self.expr()?) } else { None };
                self.expect(";")?;
                StmtKind::Decl { ty, name, init }
            }
            _ => {
                let e = self.expr()?;
                let op = match self.peek() {
                    Tok::Sym(s) => AssignOp::from_symbol(s),
                    _ => None,
                };
                let kind = if let Some(op) = op {
                    self.bump();
                    let value = self.expr()?;
                    StmtKind::Assign { target: e, op, value }
                } else {
                    StmtKind::Expr(e)
                };
                self.expect(";")?;
                kind
            }
        };
        Ok(Stmt { kind, span: start.join(self.prev_span()) })
    }

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary(1)
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym(s) => BinOp::from_symbol(s),
                _ => None,
            };
            let Some(op) = op.filter(|op| op.precedence() >= min_prec) else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr {
                kind: ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) },
                span,
                ty: None,
            };
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        let kind = match self.peek() {
            Tok::Sym("-") => {
                self.bump();
                ExprKind::Unary { op: UnaryOp::Neg, operand: Box::new(self.unary()?) }
            }
            Tok::Sym("!") => {
                self.bump();
                ExprKind::Unary { op: UnaryOp::Not, operand: Box::new(self.unary()?) }
            }
            Tok::Sym("++") => {
                self.bump();
                ExprKind::IncDec { op: IncDecOp::PreInc, target: Box::new(self.unary()?) }
            }
            Tok::Sym("--") => {
                self.bump();
                ExprKind::IncDec { op: IncDecOp::PreDec, target: Box::new(self.unary()?) }
            }
            Tok::Sym("(")
                if matches!(self.peek_at(1), Tok::Sym("int" | "float"))
                    && matches!(self.peek_at(2), Tok::Sym(")")) =>
            {
                self.bump();
                let ty = self.ty()?;
                self.expect(")")?;
                ExprKind::Cast { ty, expr: Box::new(self.unary()?) }
            }
            _ => return self.postfix(),
        };
        Ok(Expr { kind, span: start.join(self.prev_span()), ty: None })
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        loop {
            let kind = if self.eat("[") {
                let index = self.expr()?;
                self.expect("]")?;
                ExprKind::Index { array: Box::new(e), index: Box::new(index) }
            } else if self.eat("++") {
                ExprKind::IncDec { op: IncDecOp::PostInc, target: Box::new(e) }
            } else if self.eat("--") {
                ExprKind::IncDec { op: IncDecOp::PostDec, target: Box::new(e) }
            } else {
                return Ok(e);
            };
            let span = first_span(&kind).join(self.prev_span());
            e = Expr { kind, span, ty: None };
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        let kind = match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                ExprKind::Int(v)
            }
            Tok::Float(v) => {
                self.bump();
                ExprKind::Float(v)
            }
            Tok::Str(s) => {
                self.bump();
                ExprKind::Str(s)
            }
            Tok::Sym("true") => {
                self.bump();
                ExprKind::Bool(true)
            }
            Tok::Sym("false") => {
                self.bump();
                ExprKind::Bool(false)
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat("(") {
                    let args = self.args(")")?;
                    ExprKind::Call { name, args }
                } else {
                    ExprKind::Var(name)
                }
            }
            Tok::Sym("(") => {
                self.bump();
                let mut inner = self.expr()?;
                let end = self.expect(")")?;
                inner.span = start.join(end);
                return Ok(inner);
            }
            Tok::Sym("new") => {
                self.bump();
                let mut elem = match self.peek() {
                    Tok::Sym("int") => Type::Int,
                    Tok::Sym("float") => Type::Float,
                    Tok::Sym("bool") => Type::Bool,
                    Tok::Sym("string") => Type::Str,
                    other => return Err(self.error(format!("expected element type, found {}", describe(other)))),
                };
                self.bump();
                self.expect("[")?;
                let len = self.expr()?;
                self.expect("]")?;
                while self.is_sym("[") && matches!(self.peek_at(1), Tok::Sym("]")) {
                    self.bump();
                    self.bump();
                    elem = Type::Array(Box::new(elem));
                }
                ExprKind::NewArray { elem, len: Box::new(len) }
            }
            Tok::Sym("[") => {
                self.bump();
                let elems = self.args("]")?;
                if elems.is_empty() {
                    return Err(self.error("array literal needs at least one element"));
                }
                ExprKind::ArrayLit(elems)
            }
            other => return Err(self.error(format!("expected expression, found {}", describe(&other)))),
        };
        Ok(Expr { kind, span: start.join(self.prev_span()), ty: None })
    }

    fn args(&mut self, close: &str) -> Result<Vec<Expr>, ParseError> {
        let mut args = Vec::new();
        if !self.is_sym(close) {
            loop {
                args.push(self.expr()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(close)?;
        Ok(args)
    }
}

fn first_span(kind: &ExprKind) -> Span {
    match kind {
        ExprKind::Index { array, .. } => array.span,
        ExprKind::IncDec { target, .. } => target.span,
        _ => Span::default(),
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier '{s}'"),
        Tok::Int(v) => format!("integer {v}"),
        Tok::Float(v) => format!("float {v}"),
        Tok::Str(_) => "string literal".to_string(),
        Tok::Sym(s) => format!("'{s}'"),
        Tok::Eof => "end of input".to_string(),
    }
}
