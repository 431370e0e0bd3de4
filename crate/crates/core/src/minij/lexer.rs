use super::ast::Span;
use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Float(f64),
    Str(String),
    /// Keywords and punctuation.
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub const KEYWORDS: &[&str] = &[
    "int", "float", "bool", "string", "void", "if", "else", "while", "return", "true", "false",
    "new", "throw", "try", "catch",
];

// Longest first so that multi-character operators win.
const SYMBOLS: &[&str] = &[
    "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "+", "-",
    "*", "/", "%", "<", ">", "=", "!", "&", "|", "^", "(", ")", "{", "}", "[", "]", ";", ",",
];

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, message: message.into() }
    }
}

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor { src, pos: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        skip_trivia(&mut cur)?;
        let (start, line, col) = (cur.pos, cur.line, cur.col);
        let Some(c) = cur.peek() else {
            out.push(Token {
                tok: Tok::Eof,
                span: Span { start, end: start, start_line: line, start_col: col, end_line: line, end_col: col },
            });
            return Ok(out);
        };
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while cur.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                cur.bump();
            }
            let word = &src[start..cur.pos];
            match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Sym(k),
                None => Tok::Ident(word.to_string()),
            }
        } else if c.is_ascii_digit() {
            lex_number(&mut cur)?
        } else if c == '"' {
            lex_string(&mut cur)?
        } else {
            let rest = &src[cur.pos..];
            let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) else {
                return Err(cur.error(format!("unexpected character '{c}'")));
            };
            for _ in 0..sym.len() {
                cur.bump();
            }
            Tok::Sym(sym)
        };
        out.push(Token {
            tok,
            span: Span {
                start,
                end: cur.pos,
                start_line: line,
                start_col: col,
                end_line: cur.line,
                end_col: cur.col,
            },
        });
    }
}

fn skip_trivia(cur: &mut Cursor<'_>) -> Result<(), ParseError> {
    loop {
        match (cur.peek(), cur.peek_at(1)) {
            (Some(c), _) if c.is_whitespace() => {
                cur.bump();
            }
            (Some('/'), Some('/')) => {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
            }
            (Some('/'), Some('*')) => {
                let err = cur.error("unterminated block comment");
                cur.bump();
                cur.bump();
                loop {
                    match (cur.peek(), cur.peek_at(1)) {
                        (Some('*'), Some('/')) => {
                            cur.bump();
                            cur.bump();
                            break;
                        }
                        (Some(_), _) => {
                            cur.bump();
                        }
                        (None, _) => return Err(err),
                    }
                }
            }
            _ => return Ok(()),
        }
    }
}

fn lex_number(cur: &mut Cursor<'_>) -> Result<Tok, ParseError> {
    let start = cur.pos;
    let err_pos = cur.error("");
    while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
        cur.bump();
    }
    let mut is_float = false;
    if cur.peek() == Some('.') && cur.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
        is_float = true;
        cur.bump();
        while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            cur.bump();
        }
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let sign = matches!(cur.peek_at(1), Some('+' | '-'));
        let digit_at = if sign { 2 } else { 1 };
        if cur.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
            is_float = true;
            for _ in 0..digit_at {
                cur.bump();
            }
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
        }
    }
    let text = &cur.src[start..cur.pos];
    // `10d` / `10f` style float suffixes.
    if matches!(cur.peek(), Some('d' | 'f' | 'D' | 'F'))
        && !cur.peek_at(1).is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
    {
        cur.bump();
        is_float = true;
    }
    if cur.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
        return Err(cur.error("malformed number literal"));
    }
    if is_float {
        text.parse::<f64>()
            .map(Tok::Float)
            .map_err(|_| ParseError { message: format!("invalid float literal '{text}'"), ..err_pos })
    } else {
        text.parse::<i64>()
            .map(Tok::Int)
            .map_err(|_| ParseError { message: format!("integer literal '{text}' out of range"), ..err_pos })
    }
}

fn lex_string(cur: &mut Cursor<'_>) -> Result<Tok, ParseError> {
    let err = cur.error("unterminated string literal");
    cur.bump();
    let mut s = String::new();
    loop {
        match cur.bump() {
            Some('"') => return Ok(Tok::Str(s)),
            Some('\\') => match cur.bump() {
                Some('n') => s.push('\n'),
                Some('t') => s.push('\t'),
                Some('"') => s.push('"'),
                Some('\\') => s.push('\\'),
                Some(c) => return Err(cur.error(format!("unknown escape '\\{c}'"))),
                None => return Err(err),
            },
            Some('\n') | None => return Err(err),
            Some(c) => s.push(c),
        }
    }
}
