//! Named alphabets and the word-literal grammar.
//!
//! ```text
//! word    := "1" | factor*
//! factor  := atom ("^" int)?
//! atom    := ident | "1" | "[" word "," word "]" | "(" word ")"
//! ident   := [A-Za-z_][A-Za-z0-9_']*
//! int     := "-"? [0-9]+
//! ```
//! Whitespace between tokens is ignored.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freewords::{commutator, Generator, Word, MAX_GENERATORS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymbolKind {
    Constant,
    Variable,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolError {
    #[error("symbol '{0}' declared twice")]
    Duplicate(String),
    #[error("invalid symbol name '{0}'")]
    BadName(String),
    #[error("more than {MAX_GENERATORS} constant generators")]
    TooManyConstants,
    #[error("too many symbols")]
    TooManySymbols,
}

/// Declared generators and variables sharing one id space.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
    kinds: Vec<SymbolKind>,
    #[serde(skip)]
    index: HashMap<String, u16>,
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Alphabet with the given constants followed by the given variables.
    pub fn with(constants: &[&str], variables: &[&str]) -> Result<Self, SymbolError> {
        let mut a = Alphabet::new();
        for c in constants {
            a.add_constant(c)?;
        }
        for v in variables {
            a.add_variable(v)?;
        }
        Ok(a)
    }

    fn add(&mut self, name: &str, kind: SymbolKind) -> Result<u16, SymbolError> {
        if !valid_name(name) {
            return Err(SymbolError::BadName(name.to_string()));
        }
        if self.index.contains_key(name) {
            return Err(SymbolError::Duplicate(name.to_string()));
        }
        if kind == SymbolKind::Constant && self.constant_count() >= MAX_GENERATORS {
            return Err(SymbolError::TooManyConstants);
        }
        let id = u16::try_from(self.names.len()).map_err(|_| SymbolError::TooManySymbols)?;
        self.names.push(name.to_string());
        self.kinds.push(kind);
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_constant(&mut self, name: &str) -> Result<u16, SymbolError> {
        self.add(name, SymbolKind::Constant)
    }

    pub fn add_variable(&mut self, name: &str) -> Result<u16, SymbolError> {
        self.add(name, SymbolKind::Variable)
    }

    /// Adds a variable named `stem` or `stem<k>` for the least free `k`.
    pub fn fresh_variable(&mut self, stem: &str) -> u16 {
        let mut k = 1usize;
        loop {
            let name = format!("{stem}{k}");
            if !self.index.contains_key(&name) {
                return self.add_variable(&name).expect("fresh name is valid");
            }
            k += 1;
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: u16) -> &str {
        &self.names[id as usize]
    }

    pub fn kind(&self, id: u16) -> SymbolKind {
        self.kinds[id as usize]
    }

    pub fn is_variable(&self, id: u16) -> bool {
        self.kinds[id as usize] == SymbolKind::Variable
    }

    pub fn lookup(&self, name: &str) -> Option<u16> {
        self.index.get(name).copied()
    }

    pub fn constants(&self) -> Vec<u16> {
        (0..self.names.len() as u16)
            .filter(|&i| !self.is_variable(i))
            .collect()
    }

    pub fn variables(&self) -> Vec<u16> {
        (0..self.names.len() as u16)
            .filter(|&i| self.is_variable(i))
            .collect()
    }

    pub fn constant_count(&self) -> usize {
        self.kinds
            .iter()
            .filter(|k| **k == SymbolKind::Constant)
            .count()
    }

    /// Rebuilds the name index; needed after deserialization.
    pub fn reindex(&mut self) {
        self.index = self
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u16))
            .collect();
    }

    pub fn show(&self, w: &Word) -> String {
        w.display_with(|id| self.name(id))
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, ParseError> {
        parse_word_with(text, &|name| self.lookup(name))
    }
}

/// A parse failure with a 1-based column inside the parsed text.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

struct Parser<'a, F: Fn(&str) -> Option<u16>> {
    src: &'a [u8],
    pos: usize,
    resolve: &'a F,
}

impl<F: Fn(&str) -> Option<u16>> Parser<'_, F> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn word(&mut self) -> Result<Word, ParseError> {
        let mut parts: Vec<Word> = Vec::new();
        while let Some(c) = self.peek() {
            if c == b']' || c == b',' || c == b')' {
                break;
            }
            parts.push(self.factor()?);
        }
        Ok(Word::product(parts.iter()))
    }

    fn factor(&mut self) -> Result<Word, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.int()?;
            Ok(base.pow(exp))
        } else {
            Ok(base)
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if digits == self.pos {
            self.pos = start;
            return self.err("expected integer exponent");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match text.parse::<i64>() {
            Ok(v) if v.unsigned_abs() <= 1_000_000 => Ok(v),
            _ => {
                self.pos = start;
                self.err("exponent out of range")
            }
        }
    }

    fn atom(&mut self) -> Result<Word, ParseError> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let x = self.word()?;
                self.expect(b',')?;
                let y = self.word()?;
                self.expect(b']')?;
                Ok(commutator(&x, &y))
            }
            Some(b'(') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(b')')?;
                Ok(w)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Word::empty())
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric()
                        || self.src[self.pos] == b'_'
                        || self.src[self.pos] == b'\'')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match (self.resolve)(name) {
                    Some(id) => Ok(Word::generator(Generator::pos(id))),
                    None => {
                        self.pos = start;
                        self.err(format!("undeclared symbol '{name}'"))
                    }
                }
            }
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses a whole word literal; trailing input is rejected.
pub fn parse_word_with<F: Fn(&str) -> Option<u16>>(
    text: &str,
    resolve: &F,
) -> Result<Word, ParseError> {
    if !text.is_ascii() {
        let column = text.chars().take_while(|c| c.is_ascii()).count() + 1;
        return Err(ParseError {
            column,
            message: "non-ASCII character".into(),
        });
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        resolve,
    };
    let w = p.word()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_powers_and_commutators() {
        let al = Alphabet::with(&["a", "b"], &["x"]).unwrap();
        let w = al.parse_word("a b^-3 a^-1").unwrap();
        assert_eq!(w.len(), 5);
        assert_eq!(al.show(&w), "a b^-3 a^-1");
        let c = al.parse_word("[a,b]").unwrap();
        assert_eq!(al.show(&c), "a^-1 b^-1 a b");
        let g = al.parse_word("(a b)^2 x").unwrap();
        assert_eq!(al.show(&g), "a b a b x");
        assert!(al.parse_word("1").unwrap().is_empty());
        assert!(al.parse_word("  ").unwrap().is_empty());
    }

    #[test]
    fn reports_positions() {
        let al = Alphabet::with(&["a"], &[]).unwrap();
        let e = al.parse_word("a q").unwrap_err();
        assert_eq!(e.column, 3);
        let e = al.parse_word("a )").unwrap_err();
        assert_eq!(e.column, 3);
        assert!(al.parse_word("a^").is_err());
        assert!(al.parse_word("[a a").is_err());
    }

    #[test]
    fn declarations() {
        let mut al = Alphabet::new();
        al.add_constant("a").unwrap();
        assert!(matches!(al.add_variable("a"), Err(SymbolError::Duplicate(_))));
        assert!(matches!(al.add_variable("1x"), Err(SymbolError::BadName(_))));
        let v = al.fresh_variable("x");
        assert_eq!(al.name(v), "x1");
        let v2 = al.fresh_variable("x");
        assert_eq!(al.name(v2), "x2");
        for i in 1..MAX_GENERATORS {
            al.add_constant(&format!("c{i}")).unwrap();
        }
        assert_eq!(al.add_constant("overflow"), Err(SymbolError::TooManyConstants));
    }
}
