use thiserror::Error;

use super::ast::{CapFormula, Coalition, PathFormula, TemporalFormula};
use crate::model::GameStructure;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown {kind} `{name}` at offset {pos}")]
    Unknown {
        pos: usize,
        kind: &'static str,
        name: String,
    },
    #[error("temporal operator `{op}` at offset {pos} must follow a strategic operator <<...>>")]
    TemporalOutsideStrategic { pos: usize, op: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Open,
    Close,
    Comma,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Eq,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Open => "`<<`".into(),
            Tok::Close => "`>>`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::End => "end of input".into(),
        }
    }

    fn starts_formula(&self) -> bool {
        matches!(self, Tok::Ident(_) | Tok::LParen | Tok::Bang | Tok::Open)
    }
}

const TEMPORAL_KEYWORDS: [&str; 5] = ["N", "U", "R", "F", "G"];

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = bytes.get(i..i + 2);
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b',' => Tok::Comma,
            b'!' => Tok::Bang,
            b'&' => Tok::Amp,
            b'|' => Tok::Pipe,
            b'=' => Tok::Eq,
            b'<' if two == Some(b"<<") => {
                i += 1;
                Tok::Open
            }
            b'>' if two == Some(b">>") => {
                i += 1;
                Tok::Close
            }
            b'-' if two == Some(b"->") => {
                i += 1;
                Tok::Arrow
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(FormulaError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'g> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    g: &'g GameStructure,
}

impl<'g> Parser<'g> {
    fn new(text: &str, g: &'g GameStructure) -> Result<Self, FormulaError> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
            g,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    /// Error for an unexpected token; bare temporal keywords get their own
    /// diagnosis.
    fn unexpected(&self, wanted: &str) -> FormulaError {
        match self.peek() {
            Tok::Ident(s) if TEMPORAL_KEYWORDS.contains(&s.as_str()) => {
                FormulaError::TemporalOutsideStrategic {
                    pos: self.pos(),
                    op: s.clone(),
                }
            }
            t => FormulaError::Syntax {
                pos: self.pos(),
                msg: format!("expected {wanted}, found {}", t.describe()),
            },
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), FormulaError> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    fn ident(&mut self, wanted: &str) -> Result<(usize, String), FormulaError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((pos, s))
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn finish(&mut self) -> Result<(), FormulaError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn implication(&mut self) -> Result<PathFormula, FormulaError> {
        let l = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let r = self.implication()?;
            return Ok(PathFormula::implies(l, r));
        }
        Ok(l)
    }

    fn disjunction(&mut self) -> Result<PathFormula, FormulaError> {
        let mut l = self.conjunction()?;
        while self.eat(&Tok::Pipe) {
            let r = self.conjunction()?;
            l = PathFormula::or(l, r);
        }
        Ok(l)
    }

    fn conjunction(&mut self) -> Result<PathFormula, FormulaError> {
        let mut l = self.unary()?;
        while self.eat(&Tok::Amp) {
            let r = self.unary()?;
            l = PathFormula::and(l, r);
        }
        Ok(l)
    }

    fn unary(&mut self) -> Result<PathFormula, FormulaError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(PathFormula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.implication()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Open => {
                self.bump();
                let y = self.coalition()?;
                let t = self.temporal()?;
                Ok(PathFormula::strat(y, t))
            }
            Tok::Ident(s) if s == "K" && *self.peek2() == Tok::LBracket => {
                self.bump();
                self.bump();
                let (apos, name) = self.ident("an agent")?;
                let a = self.g.agent_id(&name).ok_or(FormulaError::Unknown {
                    pos: apos,
                    kind: "agent",
                    name,
                })?;
                self.expect(Tok::RBracket)?;
                self.expect(Tok::LParen)?;
                let f = self.cap_disjunction()?;
                self.expect(Tok::RParen)?;
                Ok(PathFormula::know(a, f))
            }
            Tok::Ident(s) => {
                if matches!(s.as_str(), "N" | "F" | "G") && self.peek2().starts_formula() {
                    return Err(FormulaError::TemporalOutsideStrategic { pos, op: s });
                }
                self.bump();
                match s.as_str() {
                    "true" => Ok(PathFormula::truth()),
                    "false" => Ok(PathFormula::falsity()),
                    _ => self
                        .g
                        .prop_id(&s)
                        .map(PathFormula::atom)
                        .ok_or(FormulaError::Unknown {
                            pos,
                            kind: "proposition",
                            name: s,
                        }),
                }
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn coalition(&mut self) -> Result<Coalition, FormulaError> {
        let mut agents = Vec::new();
        if self.eat(&Tok::Close) {
            return Ok(Coalition::empty());
        }
        loop {
            let (pos, name) = self.ident("an agent")?;
            agents.push(self.g.agent_id(&name).ok_or(FormulaError::Unknown {
                pos,
                kind: "agent",
                name,
            })?);
            if self.eat(&Tok::Close) {
                return Ok(Coalition::new(agents));
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn temporal(&mut self) -> Result<TemporalFormula, FormulaError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) if s == "N" => {
                self.bump();
                Ok(TemporalFormula::Next(self.unary()?))
            }
            Tok::Ident(s) if s == "F" => {
                self.bump();
                Ok(TemporalFormula::eventually(self.unary()?))
            }
            Tok::Ident(s) if s == "G" => {
                self.bump();
                Ok(TemporalFormula::always(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let l = self.implication()?;
                self.expect(Tok::RParen)?;
                match self.bump() {
                    Tok::Ident(s) if s == "U" => Ok(TemporalFormula::Until(l, self.unary()?)),
                    Tok::Ident(s) if s == "R" => Ok(TemporalFormula::Release(l, self.unary()?)),
                    t => Err(FormulaError::Syntax {
                        pos: self.toks[self.at - 1].0,
                        msg: format!("expected `U` or `R`, found {}", t.describe()),
                    }),
                }
            }
            t => Err(FormulaError::Syntax {
                pos,
                msg: format!(
                    "expected a temporal operator (N, F, G, or (..) U/R ..), found {}",
                    t.describe()
                ),
            }),
        }
    }

    fn cap_disjunction(&mut self) -> Result<CapFormula, FormulaError> {
        let mut l = self.cap_conjunction()?;
        while self.eat(&Tok::Pipe) {
            let r = self.cap_conjunction()?;
            l = CapFormula::or(l, r);
        }
        Ok(l)
    }

    fn cap_conjunction(&mut self) -> Result<CapFormula, FormulaError> {
        let mut l = self.cap_unary()?;
        while self.eat(&Tok::Amp) {
            let r = self.cap_unary()?;
            l = CapFormula::and(l, r);
        }
        Ok(l)
    }

    fn cap_unary(&mut self) -> Result<CapFormula, FormulaError> {
        if self.eat(&Tok::Bang) {
            return Ok(CapFormula::not(self.cap_unary()?));
        }
        if self.eat(&Tok::LParen) {
            let f = self.cap_disjunction()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        let (apos, agent) = self.ident("an agent")?;
        let a = self.g.agent_id(&agent).ok_or(FormulaError::Unknown {
            pos: apos,
            kind: "agent",
            name: agent,
        })?;
        self.expect(Tok::Eq)?;
        let (cpos, cap) = self.ident("a capacity")?;
        let c = self.g.capacity_id(&cap).ok_or(FormulaError::Unknown {
            pos: cpos,
            kind: "capacity",
            name: cap,
        })?;
        Ok(CapFormula::has(a, c))
    }
}

/// Parses a path formula, resolving names against `g`.
pub fn parse_formula(text: &str, g: &GameStructure) -> Result<PathFormula, FormulaError> {
    let mut p = Parser::new(text, g)?;
    let f = p.implication()?;
    p.finish()?;
    Ok(f)
}

/// Parses a capacity-assignment formula such as `opp=lefty & !obs=normal`.
pub fn parse_cap_formula(text: &str, g: &GameStructure) -> Result<CapFormula, FormulaError> {
    let mut p = Parser::new(text, g)?;
    let f = p.cap_disjunction()?;
    p.finish()?;
    Ok(f)
}
