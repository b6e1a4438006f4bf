//! Recursive-descent parser for the symbol language.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' integer)? | '-' factor
//! atom   := number | ident | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers are `x`/`xi` when `d = 1` (also accepted as `x1`/`xi1`), otherwise
//! `x1..xd` and `xi1..xid`. A number suffixed with `i` is imaginary. Matrix symbols
//! nest rows as `[[e, e], [e, e]]`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symbol::expr::{Func, Node, SymbolExpr};

const MAX_EXPONENT: u32 = 1000;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, imaginary: bool, integral: bool },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn syntax(pos: usize, message: impl Into<String>) -> Error {
    Error::Syntax { position: pos, message: message.into() }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, pos: start });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let mut integral = true;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                integral = false;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    integral = false;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let literal: String = chars[start..i].iter().collect();
            let value: f64 = literal.parse().map_err(|_| syntax(start, format!("malformed number `{literal}`")))?;
            let mut imaginary = false;
            if i < chars.len()
                && chars[i] == 'i'
                && !chars.get(i + 1).is_some_and(|n| n.is_ascii_alphanumeric() || *n == '_')
            {
                imaginary = true;
                i += 1;
            }
            out.push(Token { tok: Tok::Num { value, imaginary, integral }, pos: start });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), pos: start });
            continue;
        }
        return Err(syntax(start, format!("unexpected character `{c}`")));
    }
    out.push(Token { tok: Tok::End, pos: chars.len() });
    Ok(out)
}

/// Resolves a variable name to its index, or reports why it cannot.
fn resolve_variable(name: &str, dims: usize) -> Result<usize> {
    let (base, offset) = if let Some(rest) = name.strip_prefix("xi") {
        (rest, dims)
    } else if let Some(rest) = name.strip_prefix('x') {
        (rest, 0)
    } else {
        return Err(Error::UnknownIdentifier(name.into()));
    };
    if base.is_empty() {
        if dims == 1 {
            return Ok(offset);
        }
        return Err(Error::DimensionMismatch(format!("`{name}` is ambiguous for d = {dims}; use an indexed name")));
    }
    if !base.chars().all(|c| c.is_ascii_digit()) || base.starts_with('0') {
        return Err(Error::UnknownIdentifier(name.into()));
    }
    let index: usize = base.parse().map_err(|_| Error::UnknownIdentifier(name.into()))?;
    if index > dims {
        return Err(Error::DimensionMismatch(format!("`{name}` used with d = {dims}")));
    }
    Ok(offset + index - 1)
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    dims: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn pos(&self) -> usize {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Node::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Node> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Node::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump().tok {
            Tok::Num { value, imaginary: false, integral: true } if value <= MAX_EXPONENT as f64 => {
                Ok(Node::Pow(Box::new(base), value as u32))
            }
            _ => Err(syntax(pos, format!("exponent must be an integer in 0..={MAX_EXPONENT}"))),
        }
    }

    fn atom(&mut self) -> Result<Node> {
        let token = self.bump();
        match token.tok {
            Tok::Num { value, imaginary, .. } => {
                Ok(Node::Const(if imaginary { Complex64::new(0.0, value) } else { Complex64::new(value, 0.0) }))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Node::Func(func, Box::new(arg)));
                }
                resolve_variable(&name, self.dims).map(Node::Var)
            }
            Tok::End => Err(syntax(token.pos, "unexpected end of input")),
            other => Err(syntax(token.pos, format!("unexpected token {other:?}"))),
        }
    }
}

fn parser(text: &str, dims: usize) -> Result<Parser> {
    if dims == 0 {
        return Err(Error::DimensionMismatch("d must be positive".into()));
    }
    Ok(Parser { tokens: tokenize(text)?, at: 0, dims })
}

pub(crate) fn parse_expr(text: &str, dims: usize) -> Result<SymbolExpr> {
    let mut p = parser(text, dims)?;
    let root = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.pos(), "unexpected trailing input"));
    }
    SymbolExpr::new(dims, root)
}

/// Parses `[[e, e], [e, e]]` into row-major entries plus the side length.
pub(crate) fn parse_matrix(text: &str, dims: usize) -> Result<(usize, Vec<SymbolExpr>)> {
    let mut p = parser(text, dims)?;
    p.expect(Tok::LBracket, "`[`")?;
    let mut rows: Vec<Vec<SymbolExpr>> = Vec::new();
    loop {
        p.expect(Tok::LBracket, "`[` opening a matrix row")?;
        let mut row = Vec::new();
        loop {
            row.push(SymbolExpr::new(dims, p.expr()?)?);
            match p.peek() {
                Tok::Comma => {
                    p.bump();
                }
                Tok::RBracket => {
                    p.bump();
                    break;
                }
                _ => return Err(syntax(p.pos(), "expected `,` or `]` in matrix row")),
            }
        }
        rows.push(row);
        match p.peek() {
            Tok::Comma => {
                p.bump();
            }
            Tok::RBracket => {
                p.bump();
                break;
            }
            _ => return Err(syntax(p.pos(), "expected `,` or `]` after matrix row")),
        }
    }
    if *p.peek() != Tok::End {
        return Err(syntax(p.pos(), "unexpected trailing input"));
    }
    let k = rows.len();
    if rows.iter().any(|r| r.len() != k) {
        return Err(syntax(0, "matrix symbol must be square"));
    }
    Ok((k, rows.into_iter().flatten().collect()))
}
