//! Concrete syntax for types and terms.
//!
//! ```text
//! type ::= arrow
//! arrow ::= atom ('->' arrow)?
//! atom ::= 'bot' | '(' type ')'
//!
//! term ::= binder | app
//! binder ::= ('\' | 'λ' | 'mu' | 'μ') ident (':' type)? '.' term
//! app ::= atom+ binder?
//! atom ::= ident | '(' term ')'
//! ```
//!
//! Application is left-associative and binder bodies extend as far right as
//! possible. `--` starts a line comment. The printer emits ASCII with the
//! fewest parentheses that re-parse to the same tree.

use std::fmt;

use thiserror::Error;

use crate::term::{BinderKind, Name, Term, Type};

const KEYWORDS: &[&str] = &["mu", "bot"];

/// Byte range into the parsed text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{message} at {}..{}", span.start, span.end)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(Name),
    Lambda,
    Mu,
    Bot,
    Dot,
    Colon,
    Comma,
    Arrow,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Lambda => f.write_str("`\\`"),
            Tok::Mu => f.write_str("`mu`"),
            Tok::Bot => f.write_str("`bot`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::with_capacity(bytes.len() / 2 + 1);
    let mut names: Vec<Name> = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let single = match bytes[i] {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'\\' => Some(Tok::Lambda),
            b'.' => Some(Tok::Dot),
            b':' => Some(Tok::Colon),
            b',' => Some(Tok::Comma),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            toks.push((tok, SourceSpan::new(start, i)));
            continue;
        }
        if bytes[i] == b'-' {
            match bytes.get(i + 1) {
                Some(b'>') => {
                    i += 2;
                    toks.push((Tok::Arrow, SourceSpan::new(start, i)));
                }
                Some(b'-') => {
                    while i < bytes.len() && bytes[i] != b'\n' {
                        i += 1;
                    }
                }
                _ => {
                    return Err(ParseError {
                        span: SourceSpan::new(start, start + 1),
                        message: "unknown token `-`".into(),
                    })
                }
            }
            continue;
        }
        if is_ident_start(bytes[i] as char) {
            while i < bytes.len() && is_ident_continue(bytes[i] as char) {
                i += 1;
            }
            let word = &src[start..i];
            let tok = match word {
                "mu" => Tok::Mu,
                "bot" => Tok::Bot,
                _ => match names.iter().find(|n| &***n == word) {
                    Some(n) => Tok::Ident(n.clone()),
                    None => {
                        let n = Name::from(word);
                        names.push(n.clone());
                        Tok::Ident(n)
                    }
                },
            };
            toks.push((tok, SourceSpan::new(start, i)));
            continue;
        }
        let c = src[i..].chars().next().expect("char boundary");
        i += c.len_utf8();
        let tok = match c {
            'λ' => Tok::Lambda,
            'μ' | 'µ' => Tok::Mu,
            c if c.is_whitespace() => continue,
            c => return Err(ParseError { span: SourceSpan::new(start, i), message: format!("unknown token `{c}`") }),
        };
        toks.push((tok, SourceSpan::new(start, i)));
    }
    toks.push((Tok::Eof, SourceSpan::new(src.len(), src.len())));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { span: self.span(), message: message.into() })
    }

    fn expect(&mut self, tok: Tok) -> Result<SourceSpan, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            self.error(format!("expected {tok}, found {}", self.peek()))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            Tok::RParen => self.error("unbalanced `)`"),
            t => self.error(format!("unexpected {t}")),
        }
    }

    fn ident(&mut self) -> Result<Name, ParseError> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            Tok::Mu | Tok::Bot => {
                let span = self.span();
                let word = if *self.peek() == Tok::Mu { "mu" } else { "bot" };
                Err(ParseError { span, message: format!("keyword `{word}` used as identifier") })
            }
            t => self.error(format!("expected identifier, found {t}")),
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let dom = match self.peek() {
            Tok::Bot => {
                self.bump();
                Type::Bot
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen).or_else(|_| self.error("unbalanced `(` in type"))?;
                t
            }
            t => return self.error(format!("expected a type, found {t}")),
        };
        if *self.peek() == Tok::Arrow {
            self.bump();
            Ok(Type::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen)
    }

    fn starts_binder(&self) -> bool {
        matches!(self.peek(), Tok::Lambda | Tok::Mu)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if self.starts_binder() {
            return self.binder();
        }
        let mut acc = match self.atom()? {
            Some(t) => t,
            None if *self.peek() == Tok::Bot => return self.ident().map(Term::Var),
            None => return self.error(format!("expected a term, found {}", self.peek())),
        };
        loop {
            if self.starts_binder() {
                let b = self.binder()?;
                return Ok(Term::app(acc, b));
            }
            match self.atom()? {
                Some(t) => acc = Term::app(acc, t),
                None => return Ok(acc),
            }
        }
    }

    fn binder(&mut self) -> Result<Term, ParseError> {
        let (tok, binder_span) = self.bump();
        let kind = if tok == Tok::Lambda { BinderKind::Lam } else { BinderKind::Mu };
        let name = self.ident()?;
        let annot = if *self.peek() == Tok::Colon {
            self.bump();
            Some(self.ty()?)
        } else {
            None
        };
        self.expect(Tok::Dot)?;
        if matches!(self.peek(), Tok::Eof | Tok::RParen) {
            return Err(ParseError {
                span: SourceSpan::new(binder_span.start, self.span().end),
                message: "dangling binder: missing body".into(),
            });
        }
        let body = self.term()?;
        Ok(Term::binder(kind, name, annot, body))
    }

    fn atom(&mut self) -> Result<Option<Term>, ParseError> {
        if !self.starts_atom() {
            return Ok(None);
        }
        if *self.peek() == Tok::LParen {
            let open = self.bump().1;
            let t = self.term()?;
            if *self.peek() != Tok::RParen {
                return Err(ParseError {
                    span: SourceSpan::new(open.start, self.span().end),
                    message: format!("unbalanced `(`: found {}", self.peek()),
                });
            }
            self.bump();
            return Ok(Some(t));
        }
        Ok(Some(Term::Var(self.ident()?)))
    }
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_type(text: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parses `name:Type, name:Type, ...` (possibly empty).
pub fn parse_bindings(text: &str) -> Result<Vec<(Name, Type)>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    if *p.peek() == Tok::Eof {
        return Ok(out);
    }
    loop {
        let name = p.ident()?;
        p.expect(Tok::Colon)?;
        out.push((name, p.ty()?));
        match p.peek() {
            Tok::Comma => {
                p.bump();
            }
            _ => break,
        }
    }
    p.expect_eof()?;
    Ok(out)
}

pub fn print_term(m: &Term) -> String {
    m.to_string()
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Bot => f.write_str("bot"),
            Type::Arrow(a, b) => {
                if a.as_arrow().is_some() {
                    write!(f, "({a}) -> {b}")
                } else {
                    write!(f, "{a} -> {b}")
                }
            }
        }
    }
}

fn write_annot(f: &mut fmt::Formatter<'_>, ann: &Option<Type>) -> fmt::Result {
    match ann {
        None => Ok(()),
        Some(t @ Type::Arrow(..)) => write!(f, ":({t})"),
        Some(t) => write!(f, ":{t}"),
    }
}

/// `rightmost`: nothing follows this term inside its enclosing group, so a
/// binder may appear without parentheses.
fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, rightmost: bool) -> fmt::Result {
    match t {
        Term::Var(x) => f.write_str(x),
        Term::Lam(x, ann, b) | Term::Mu(x, ann, b) => {
            if !rightmost {
                f.write_str("(")?;
            }
            f.write_str(if matches!(t, Term::Lam(..)) { "\\" } else { "mu " })?;
            f.write_str(x)?;
            write_annot(f, ann)?;
            f.write_str(". ")?;
            write_term(f, b, true)?;
            if !rightmost {
                f.write_str(")")?;
            }
            Ok(())
        }
        Term::App(fun, arg) => {
            match &**fun {
                Term::App(..) => write_term(f, fun, false)?,
                Term::Var(x) => f.write_str(x)?,
                _ => {
                    f.write_str("(")?;
                    write_term(f, fun, true)?;
                    f.write_str(")")?;
                }
            }
            f.write_str(" ")?;
            match &**arg {
                Term::App(..) => {
                    f.write_str("(")?;
                    write_term(f, arg, true)?;
                    f.write_str(")")
                }
                _ => write_term(f, arg, rightmost),
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, true)
    }
}

/// Identifier check used by printers of generated names.
pub fn is_valid_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if is_ident_start(c)) && cs.all(is_ident_continue) && !KEYWORDS.contains(&s)
}
