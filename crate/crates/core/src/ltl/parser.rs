use std::collections::BTreeSet;

use super::LtlFormula;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Not,
    And,
    Or,
    Implies,
    Next,
    Eventually,
    Always,
    Until,
    Release,
    True,
    False,
    Ident(String),
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::End => "end of input".into(),
        other => format!("{other:?}"),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let two = |s: &str| text[i..].starts_with(s);
        let (tok, len) = match c {
            b'(' => (Tok::LParen, 1),
            b')' => (Tok::RParen, 1),
            b'!' | b'~' => (Tok::Not, 1),
            b'&' if two("&&") => (Tok::And, 2),
            b'&' => (Tok::And, 1),
            b'|' if two("||") => (Tok::Or, 2),
            b'|' => (Tok::Or, 1),
            b'-' if two("->") => (Tok::Implies, 2),
            b'<' if two("<>") => (Tok::Eventually, 2),
            b'[' if two("[]") => (Tok::Always, 2),
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let end = text[i..]
                    .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                    .map_or(text.len(), |k| i + k);
                let word = &text[i..end];
                let tok = match word {
                    "X" => Tok::Next,
                    "F" => Tok::Eventually,
                    "G" => Tok::Always,
                    "U" => Tok::Until,
                    "R" => Tok::Release,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word.to_string()),
                };
                (tok, end - i)
            }
            _ => {
                return Err(Error::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{}`", text[i..].chars().next().unwrap()),
                })
            }
        };
        out.push((tok, i));
        i += len;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    ap: Option<&'a BTreeSet<String>>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn implication(&mut self) -> Result<LtlFormula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implication()?;
            return Ok(LtlFormula::or(LtlFormula::not(lhs), rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<LtlFormula> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = LtlFormula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<LtlFormula> {
        let mut lhs = self.binary()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = LtlFormula::and(lhs, self.binary()?);
        }
        Ok(lhs)
    }

    fn binary(&mut self) -> Result<LtlFormula> {
        let lhs = self.unary()?;
        match self.peek() {
            Tok::Until => {
                self.bump();
                Ok(LtlFormula::until(lhs, self.binary()?))
            }
            Tok::Release => {
                self.bump();
                Ok(LtlFormula::release(lhs, self.binary()?))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<LtlFormula> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                if let Tok::Ident(_) = self.peek() {
                    let p = self.ident()?;
                    return Ok(LtlFormula::NegAtom(p));
                }
                Ok(LtlFormula::not(self.unary()?))
            }
            Tok::Next => {
                self.bump();
                Ok(LtlFormula::next(self.unary()?))
            }
            Tok::Eventually => {
                self.bump();
                Ok(LtlFormula::eventually(self.unary()?))
            }
            Tok::Always => {
                self.bump();
                Ok(LtlFormula::always(self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.bump() {
            Tok::Ident(p) => {
                if let Some(ap) = self.ap {
                    if !ap.contains(&p) {
                        return Err(Error::UnknownProposition(p));
                    }
                }
                Ok(p)
            }
            t => self.error(format!("expected proposition, found {}", describe(&t))),
        }
    }

    fn primary(&mut self) -> Result<LtlFormula> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(LtlFormula::True)
            }
            Tok::False => {
                self.bump();
                Ok(LtlFormula::False)
            }
            Tok::Ident(_) => Ok(LtlFormula::Atom(self.ident()?)),
            Tok::LParen => {
                self.bump();
                let f = self.implication()?;
                if *self.peek() != Tok::RParen {
                    return self.error(format!("expected `)`, found {}", describe(self.peek())));
                }
                self.bump();
                Ok(f)
            }
            t => self.error(format!("expected operand, found {}", describe(&t))),
        }
    }
}

/// Parses formula text. When `ap` is given, every proposition must be in it.
pub fn parse_ltl(text: &str, ap: Option<&BTreeSet<String>>) -> Result<LtlFormula> {
    let toks = lex(text)?;
    if toks.len() == 1 {
        return Err(Error::Syntax { pos: 0, msg: "empty formula".into() });
    }
    let mut p = Parser { toks, at: 0, ap };
    let f = p.implication()?;
    if *p.peek() != Tok::End {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    Ok(f)
}
