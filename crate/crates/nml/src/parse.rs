//! Concrete formula syntax: parser and printer.
//!
//! Grammar (ASCII, whitespace insignificant between tokens):
//!
//! ```text
//! formula := or ( ("->" | "~>") formula )?        right-associative
//! or      := and ( "|" and )*
//! and     := unary ( "&" unary )*
//! unary   := ("!" | "~" | "delta" | "nabla" | "box" | "dia" | "heart")* primary
//! primary := ident | "bot" | "top" | "(" formula ")"
//! ident   := [a-z][a-z0-9_]*   excluding the keywords above plus bot/top
//! ```
//!
//! `!x` is sugar for `x -> bot`, `~x` for `x ~> bot`, `top` for `bot -> bot`.
//! The printer resugars `!` and `~` (but not `top`) and emits minimal
//! parentheses; `parse(pretty(f))` returns `f` exactly.

use crate::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl ParseError {
    fn new(offset: usize, expected: &[&str], found: impl Into<String>) -> Self {
        ParseError {
            offset,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: found.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Bot,
    Top,
    Delta,
    Nabla,
    BoxKw,
    Dia,
    Heart,
    Bang,
    Tilde,
    Arrow,
    MaxArrow,
    Amp,
    Pipe,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier `{name}`"),
            Tok::Bot => "`bot`".into(),
            Tok::Top => "`top`".into(),
            Tok::Delta => "`delta`".into(),
            Tok::Nabla => "`nabla`".into(),
            Tok::BoxKw => "`box`".into(),
            Tok::Dia => "`dia`".into(),
            Tok::Heart => "`heart`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::MaxArrow => "`~>`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            b'&' => {
                toks.push((Tok::Amp, i));
                i += 1;
            }
            b'|' => {
                toks.push((Tok::Pipe, i));
                i += 1;
            }
            b'!' => {
                toks.push((Tok::Bang, i));
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    return Err(ParseError::new(i, &["`->`"], "`-`"));
                }
            }
            b'~' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::MaxArrow, i));
                    i += 2;
                } else {
                    toks.push((Tok::Tilde, i));
                    i += 1;
                }
            }
            b'a'..=b'z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_lowercase()
                        || bytes[i].is_ascii_digit()
                        || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "bot" => Tok::Bot,
                    "top" => Tok::Top,
                    "delta" => Tok::Delta,
                    "nabla" => Tok::Nabla,
                    "box" => Tok::BoxKw,
                    "dia" => Tok::Dia,
                    "heart" => Tok::Heart,
                    _ => Tok::Ident(word.to_string()),
                };
                toks.push((tok, start));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return Err(ParseError::new(
                    i,
                    &["identifier", "operator"],
                    format!("`{ch}`"),
                ));
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn found(&self) -> String {
        self.toks
            .get(self.pos)
            .map_or("end of input".to_string(), |(t, _)| t.describe())
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        self.pos += 1;
        t
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        match self.peek() {
            Some(Tok::Arrow) => {
                self.bump();
                Ok(Formula::imp(lhs, self.formula()?))
            }
            Some(Tok::MaxArrow) => {
                self.bump();
                Ok(Formula::max_imp(lhs, self.formula()?))
            }
            _ => Ok(lhs),
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.bump();
                Ok(Formula::neg(self.unary()?))
            }
            Some(Tok::Tilde) => {
                self.bump();
                Ok(Formula::max_neg(self.unary()?))
            }
            Some(Tok::Delta) => {
                self.bump();
                Ok(Formula::delta(self.unary()?))
            }
            Some(Tok::Nabla) => {
                self.bump();
                Ok(Formula::nabla(self.unary()?))
            }
            Some(Tok::BoxKw) => {
                self.bump();
                Ok(Formula::box_(self.unary()?))
            }
            Some(Tok::Dia) => {
                self.bump();
                Ok(Formula::dia(self.unary()?))
            }
            Some(Tok::Heart) => {
                self.bump();
                Ok(Formula::heart(self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let Tok::Ident(name) = self.bump() else {
                    unreachable!()
                };
                Ok(Formula::Atom(name))
            }
            Some(Tok::Bot) => {
                self.bump();
                Ok(Formula::Bot)
            }
            Some(Tok::Top) => {
                self.bump();
                Ok(Formula::top())
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.formula()?;
                if self.peek() == Some(&Tok::RParen) {
                    self.bump();
                    Ok(inner)
                } else {
                    Err(ParseError::new(self.offset(), &["`)`"], self.found()))
                }
            }
            _ => Err(ParseError::new(
                self.offset(),
                &["identifier", "`bot`", "`top`", "`(`", "prefix operator"],
                self.found(),
            )),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.formula()?;
    if p.pos < p.toks.len() {
        return Err(ParseError::new(p.offset(), &["end of input"], p.found()));
    }
    Ok(f)
}

// binding strengths: implication 0, | 1, & 2, prefix operators 3, atoms 4
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Imp(_, r) | Formula::MaxImp(_, r) if **r == Formula::Bot => 3,
        Formula::Imp(..) | Formula::MaxImp(..) => 0,
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        Formula::Delta(_)
        | Formula::Nabla(_)
        | Formula::Box_(_)
        | Formula::Dia(_)
        | Formula::Heart(_) => 3,
        Formula::Atom(_) | Formula::Bot => 4,
    }
}

fn write_at(f: &Formula, min_level: u8, out: &mut String) {
    let parens = level(f) < min_level;
    if parens {
        out.push('(');
    }
    match f {
        Formula::Atom(name) => out.push_str(name),
        Formula::Bot => out.push_str("bot"),
        Formula::Imp(l, r) if **r == Formula::Bot => {
            out.push('!');
            write_at(l, 3, out);
        }
        Formula::MaxImp(l, r) if **r == Formula::Bot => {
            out.push('~');
            write_at(l, 3, out);
        }
        Formula::Imp(l, r) => {
            write_at(l, 1, out);
            out.push_str(" -> ");
            write_at(r, 0, out);
        }
        Formula::MaxImp(l, r) => {
            write_at(l, 1, out);
            out.push_str(" ~> ");
            write_at(r, 0, out);
        }
        Formula::Or(l, r) => {
            write_at(l, 1, out);
            out.push_str(" | ");
            write_at(r, 2, out);
        }
        Formula::And(l, r) => {
            write_at(l, 2, out);
            out.push_str(" & ");
            write_at(r, 3, out);
        }
        Formula::Delta(c) => {
            out.push_str("delta ");
            write_at(c, 3, out);
        }
        Formula::Nabla(c) => {
            out.push_str("nabla ");
            write_at(c, 3, out);
        }
        Formula::Box_(c) => {
            out.push_str("box ");
            write_at(c, 3, out);
        }
        Formula::Dia(c) => {
            out.push_str("dia ");
            write_at(c, 3, out);
        }
        Formula::Heart(c) => {
            out.push_str("heart ");
            write_at(c, 3, out);
        }
    }
    if parens {
        out.push(')');
    }
}

/// Minimal-parenthesization text; `parse(pretty(f))` equals `f` structurally.
pub fn pretty(f: &Formula) -> String {
    let mut out = String::new();
    write_at(f, 0, &mut out);
    out
}
