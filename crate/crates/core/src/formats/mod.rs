//! Text formats: signatures (`.hsf`), interactions (`.hif`), multi-traces
//! (`.htf`) and configurations (`.hcf`).
//!
//! Whitespace is insignificant outside identifiers. Every error carries a
//! 1-based line and column.

use std::fmt;

use thiserror::Error;

pub mod hcf;
pub mod hif;
pub mod hsf;
pub mod htf;

pub use hcf::{parse_hcf, serialize_hcf, ConfigFile};
pub use hif::{parse_hif, serialize_hif};
pub use hsf::{parse_hsf, serialize_hsf};
pub use htf::{parse_htf, serialize_htf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Loc {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{loc}: {kind}")]
pub struct ParseError {
    pub loc: Loc,
    pub kind: ErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ErrorKind {
    #[error("unexpected character `{0}`")]
    BadChar(char),
    #[error("expected {expected}, found {found}")]
    Expected { expected: String, found: String },
    #[error("duplicate identifier `{0}`")]
    Duplicate(String),
    #[error("undeclared lifeline `{0}`")]
    UnknownLifeline(String),
    #[error("undeclared message `{0}`")]
    UnknownMessage(String),
    #[error("`{op}` takes {expected} argument(s), got {got}")]
    Arity { op: String, expected: String, got: usize },
    #[error("lifeline `{0}` belongs to several co-localizations")]
    OverlappingColocs(String),
    #[error("action on `{0}` lies outside its co-localization")]
    ActionOutsideColoc(String),
    #[error("cannot infer the co-localization of an empty component")]
    EmptyAnyComponent,
    #[error("co-localizations do not match the expected partition")]
    PartitionMismatch,
    #[error("unknown option `{name}`, expected one of: {expected}")]
    UnknownOption { name: String, expected: String },
    #[error("invalid value `{value}` for `{option}`")]
    BadValue { option: String, value: String },
    #[error("option `{0}` given twice")]
    Repeated(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Word(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const SYMBOLS: [&str; 17] = [
    "->|", "--", "->", "@", "{", "}", "(", ")", "[", "]", ",", ";", "=", "!", "?", ".", "#",
];

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

pub(crate) fn lex(text: &str) -> Result<Vec<(Tok, Loc)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let loc = Loc { line, column };
        if c == '\n' {
            line += 1;
            column = 1;
            k += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            k += 1;
            continue;
        }
        let negative = c == '-' && chars.get(k + 1).is_some_and(|d| d.is_ascii_digit());
        if is_word_char(c) || negative {
            let start = k;
            k += 1;
            while k < chars.len() && is_word_char(chars[k]) {
                k += 1;
            }
            column += k - start;
            out.push((Tok::Word(chars[start..k].iter().collect()), loc));
            continue;
        }
        let sym = SYMBOLS.iter().find(|s| {
            s.chars()
                .enumerate()
                .all(|(j, sc)| chars.get(k + j) == Some(&sc))
        });
        match sym {
            Some(s) => {
                let n = s.chars().count();
                k += n;
                column += n;
                out.push((Tok::Sym(s), loc));
            }
            None => {
                return Err(ParseError {
                    loc,
                    kind: ErrorKind::BadChar(c),
                })
            }
        }
    }
    out.push((Tok::Eof, Loc { line, column }));
    Ok(out)
}

pub(crate) struct Parser {
    toks: Vec<(Tok, Loc)>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    pub(crate) fn loc(&self) -> Loc {
        self.toks[self.pos].1
    }

    pub(crate) fn bump(&mut self) -> (Tok, Loc) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub(crate) fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(crate) fn error<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError {
            loc: self.loc(),
            kind: ErrorKind::Expected {
                expected: expected.to_string(),
                found: self.peek().to_string(),
            },
        })
    }

    pub(crate) fn fail<T>(&self, loc: Loc, kind: ErrorKind) -> Result<T, ParseError> {
        Err(ParseError { loc, kind })
    }

    pub(crate) fn expect_sym(&mut self, s: &str) -> Result<Loc, ParseError> {
        if self.at_sym(s) {
            Ok(self.bump().1)
        } else {
            self.error(&format!("`{s}`"))
        }
    }

    pub(crate) fn expect_word(&mut self, what: &str) -> Result<(String, Loc), ParseError> {
        match self.peek() {
            Tok::Word(_) => match self.bump() {
                (Tok::Word(w), loc) => Ok((w, loc)),
                _ => unreachable!(),
            },
            _ => self.error(what),
        }
    }

    pub(crate) fn bump_word(&mut self) -> String {
        match self.bump().0 {
            Tok::Word(w) => w,
            other => panic!("bump_word on {other}"),
        }
    }

    pub(crate) fn expect_eof(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            self.error("end of input")
        }
    }
}
