//! Recursive-descent parser for the ASCII formula grammar.
//!
//! Precedence, tightest first: `!`, `&`, `|`, `->` (right associative),
//! `<->`. Quantifiers `forall x.` / `exists x.` extend as far right as
//! possible. `#` starts a comment running to the end of the line.

use crate::structures::Signature;

use super::formula::{Formula, Term, RESERVED_PREFIX};
use super::LogicError;

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept `_v<digits>` identifiers produced by formula rewriting.
    pub allow_reserved: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Equals,
    Less,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DArrow => "`<->`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Less => "`<`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str, opts: ParseOptions) -> Result<Vec<(Tok, usize)>, LogicError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b',' => out.push((Tok::Comma, start)),
            b'.' => out.push((Tok::Dot, start)),
            b'!' => out.push((Tok::Bang, start)),
            b'&' => out.push((Tok::Amp, start)),
            b'|' => out.push((Tok::Pipe, start)),
            b'=' => out.push((Tok::Equals, start)),
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((Tok::Arrow, start));
                i += 1;
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                out.push((Tok::DArrow, start));
                i += 2;
            }
            b'<' => out.push((Tok::Less, start)),
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i + 1;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let word = &text[i..j];
                if c == b'_' {
                    let reserved = word.len() > RESERVED_PREFIX.len()
                        && word.starts_with(RESERVED_PREFIX)
                        && word[RESERVED_PREFIX.len()..].bytes().all(|b| b.is_ascii_digit());
                    if !reserved {
                        return Err(LogicError::Syntax {
                            position: start,
                            message: format!("identifier `{word}` must start with a letter"),
                        });
                    }
                    if !opts.allow_reserved {
                        return Err(LogicError::ReservedIdentifier {
                            position: start,
                            name: word.to_string(),
                        });
                    }
                }
                out.push((Tok::Ident(word.to_string()), start));
                i = j;
                continue;
            }
            other => {
                let ch = text[i..].chars().next().unwrap_or(other as char);
                return Err(LogicError::Syntax {
                    position: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: String) -> Result<T, LogicError> {
        Err(LogicError::Syntax {
            position: self.offset(),
            message,
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), LogicError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", tok.describe(), self.peek().describe()))
        }
    }

    fn iff(&mut self) -> Result<Formula, LogicError> {
        let mut left = self.implication()?;
        while *self.peek() == Tok::DArrow {
            self.bump();
            let right = self.implication()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula, LogicError> {
        let left = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.implication()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, LogicError> {
        let mut left = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let right = self.conjunction()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, LogicError> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(word) if word == "forall" || word == "exists" => {
                self.bump();
                let var = match self.bump() {
                    Tok::Ident(v) if !is_keyword(&v) => v,
                    other => {
                        self.pos -= 1;
                        return self.error(format!(
                            "expected a variable after `{word}`, found {}",
                            other.describe()
                        ));
                    }
                };
                self.expect(Tok::Dot)?;
                let body = self.iff()?;
                Ok(if word == "forall" {
                    Formula::forall(var, body)
                } else {
                    Formula::exists(var, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, LogicError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(word) if word == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(word) if word == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(word) if !is_keyword(&word) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let mut args = Vec::new();
                    loop {
                        match self.bump() {
                            Tok::Ident(v) if !is_keyword(&v) => args.push(Term::Var(v)),
                            other => {
                                self.pos -= 1;
                                return self.error(format!("expected a term, found {}", other.describe()));
                            }
                        }
                        match self.peek() {
                            Tok::Comma => {
                                self.bump();
                            }
                            Tok::RParen => {
                                self.bump();
                                break;
                            }
                            other => return self.error(format!("expected `,` or `)`, found {}", other.describe())),
                        }
                    }
                    return Ok(Formula::atom_terms(word, args));
                }
                let left = Term::Var(word);
                let op = self.bump();
                let right = match self.bump() {
                    Tok::Ident(v) if !is_keyword(&v) => Term::Var(v),
                    other => {
                        self.pos -= 1;
                        return self.error(format!("expected a term, found {}", other.describe()));
                    }
                };
                match op {
                    Tok::Equals => Ok(Formula::Eq(left, right)),
                    Tok::Less => Ok(Formula::atom_terms("<", vec![left, right])),
                    other => {
                        self.pos -= 2;
                        self.error(format!("expected `=`, `<` or `(`, found {}", other.describe()))
                    }
                }
            }
            other => self.error(format!("expected a formula, found {}", other.describe())),
        }
    }
}

fn is_keyword(w: &str) -> bool {
    matches!(w, "forall" | "exists" | "true" | "false")
}

/// Parses without a signature: every term is a variable, relations unchecked.
pub fn parse_with(text: &str, opts: ParseOptions) -> Result<Formula, LogicError> {
    let toks = lex(text, opts)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.iff()?;
    if *p.peek() != Tok::End {
        return p.error(format!("unexpected {} after formula", p.peek().describe()));
    }
    Ok(f)
}

pub fn parse_unchecked(text: &str) -> Result<Formula, LogicError> {
    parse_with(text, ParseOptions::default())
}

/// Parses and binds against `signature` (arity checks, constant resolution).
pub fn parse(text: &str, signature: &Signature) -> Result<Formula, LogicError> {
    parse_unchecked(text)?.bind(signature)
}
