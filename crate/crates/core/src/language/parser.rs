//! Recursive-descent parser for the surface syntax.
//!
//! ```text
//! prop   := term { "|" term }
//! term   := factor { "&" factor }
//! factor := "!" factor | "(" prop ")" | atom
//! atom   := "state(" IDENT ")" | "prop(" IDENT "," IDENT ")"
//! ```
//!
//! Whitespace is ignored between tokens; `&` and `|` associate to the left.

use super::{Entity, Proposition, SymbolKind};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEnd(&'static str),
    #[error("unexpected `{found}`, expected {expected}")]
    UnexpectedChar { found: char, expected: &'static str },
    #[error("expected `state(..)` or `prop(..)`, found `{0}`")]
    UnknownKeyword(String),
    #[error("undeclared identifier `{0}`")]
    Undeclared(String),
    #[error("`{name}` is a {found}, expected a {expected}")]
    WrongKind { name: String, expected: SymbolKind, found: SymbolKind },
    #[error("expected a single atom")]
    ExpectedAtom,
}

/// A parse failure at a byte offset of the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at position {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    entity: &'a Entity,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { position: self.pos, kind }
    }

    fn unexpected(&mut self, expected: &'static str) -> ParseError {
        match self.peek() {
            Some(found) => self.error(ParseErrorKind::UnexpectedChar { found, expected }),
            None => self.error(ParseErrorKind::UnexpectedEnd(expected)),
        }
    }

    fn expect(&mut self, ch: char, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(ch) {
            self.pos += ch.len_utf8();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn ident(&mut self) -> Result<(usize, &'a str), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest
            .char_indices()
            .find(|&(i, c)| {
                !(c.is_ascii_alphabetic() || c == '_' || (i > 0 && c.is_ascii_digit()))
            })
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 {
            return Err(self.unexpected("an identifier"));
        }
        self.pos += len;
        Ok((start, &rest[..len]))
    }

    fn symbol(&self, at: usize, name: &str, expected: SymbolKind) -> Result<(), ParseError> {
        match self.entity.kind_of(name) {
            None => Err(ParseError { position: at, kind: ParseErrorKind::Undeclared(name.into()) }),
            Some(found) if found != expected => Err(ParseError {
                position: at,
                kind: ParseErrorKind::WrongKind { name: name.into(), expected, found },
            }),
            Some(_) => Ok(()),
        }
    }

    fn prop(&mut self) -> Result<Proposition, ParseError> {
        let mut left = self.term()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            left = left.or(self.term()?);
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<Proposition, ParseError> {
        let mut left = self.factor()?;
        while self.peek() == Some('&') {
            self.pos += 1;
            left = left.and(self.factor()?);
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<Proposition, ParseError> {
        match self.peek() {
            Some('!') => {
                self.pos += 1;
                Ok(self.factor()?.negate())
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.prop()?;
                self.expect(')', "`)`")?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.atom(),
            _ => Err(self.unexpected("`!`, `(` or an atom")),
        }
    }

    fn atom(&mut self) -> Result<Proposition, ParseError> {
        let (at, keyword) = self.ident()?;
        match keyword {
            "state" => {
                self.expect('(', "`(`")?;
                let (at, name) = self.ident()?;
                self.symbol(at, name, SymbolKind::State)?;
                self.expect(')', "`)`")?;
                Ok(Proposition::state(self.entity.state(name).expect("checked above")))
            }
            "prop" => {
                self.expect('(', "`(`")?;
                let (p_at, property) = self.ident()?;
                self.symbol(p_at, property, SymbolKind::Property)?;
                self.expect(',', "`,`")?;
                let (c_at, context) = self.ident()?;
                self.symbol(c_at, context, SymbolKind::Context)?;
                self.expect(')', "`)`")?;
                Ok(Proposition::prop(
                    self.entity.property(property).expect("checked above"),
                    self.entity.context(context).expect("checked above"),
                ))
            }
            other => Err(ParseError {
                position: at,
                kind: ParseErrorKind::UnknownKeyword(other.into()),
            }),
        }
    }
}

/// Parses `text` against the identifiers declared by `entity`.
pub fn parse_proposition(text: &str, entity: &Entity) -> Result<Proposition, ParseError> {
    let mut parser = Parser { src: text, pos: 0, entity };
    let prop = parser.prop()?;
    match parser.peek() {
        None => Ok(prop),
        Some(_) => Err(parser.unexpected("`&`, `|` or end of input")),
    }
}
