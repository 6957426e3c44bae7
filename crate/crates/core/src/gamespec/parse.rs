use super::{Span, SpecError, SpecErrorKind, Spanned};

/// `head: item, item` entry of a block section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub head: Spanned<String>,
    /// Second key, used by `protocol` (`agent @ state`).
    pub at: Option<Spanned<String>>,
    pub items: Vec<Spanned<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionLine {
    pub from: Spanned<String>,
    pub actions: Vec<Spanned<String>>,
    pub to: Spanned<String>,
}

/// The syntax tree of a game file; names are not resolved yet.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GameDocument {
    pub name: Option<Spanned<String>>,
    pub agents: Option<Spanned<Vec<Spanned<String>>>>,
    pub capacities: Option<Spanned<Vec<Line>>>,
    pub actions: Option<Spanned<Vec<Line>>>,
    pub states: Option<Spanned<Vec<Spanned<String>>>>,
    pub init: Option<Spanned<Spanned<String>>>,
    pub props: Option<Spanned<Vec<Spanned<String>>>>,
    pub labels: Option<Spanned<Vec<Line>>>,
    pub protocol: Option<Spanned<Vec<Line>>>,
    pub transitions: Option<Spanned<Vec<TransitionLine>>>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    Agents,
    Capacities,
    Actions,
    States,
    Init,
    Props,
    Labels,
    Protocol,
    Transitions,
    Game,
}

impl Section {
    fn from_keyword(kw: &str) -> Option<Section> {
        Some(match kw {
            "agents" => Section::Agents,
            "capacities" => Section::Capacities,
            "actions" => Section::Actions,
            "states" => Section::States,
            "init" => Section::Init,
            "props" => Section::Props,
            "labels" => Section::Labels,
            "protocol" => Section::Protocol,
            "transitions" => Section::Transitions,
            _ => return None,
        })
    }
}

/// Character cursor over one line, tracking columns.
struct Cursor {
    chars: Vec<char>,
    at: usize,
    line: usize,
}

impl Cursor {
    fn new(text: &str, line: usize) -> Self {
        Cursor {
            chars: text.chars().collect(),
            at: 0,
            line,
        }
    }

    fn span(&self) -> Span {
        Span {
            line: self.line,
            col: self.at + 1,
        }
    }

    fn skip_ws(&mut self) {
        while self.at < self.chars.len() && self.chars[self.at].is_whitespace() {
            self.at += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.at).copied()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        let want: Vec<char> = s.chars().collect();
        if self.chars[self.at..].starts_with(&want) {
            self.at += want.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SpecError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{c}`")))
        }
    }

    fn unexpected(&mut self, wanted: &str) -> SpecError {
        let found = match self.peek() {
            Some(c) => format!("`{c}`"),
            None => "end of line".to_string(),
        };
        SpecError::syntax(self.span(), format!("expected {wanted}, found {found}"))
    }

    fn ident(&mut self) -> Result<Spanned<String>, SpecError> {
        self.skip_ws();
        let span = self.span();
        let start = self.at;
        match self.chars.get(self.at) {
            Some(c) if c.is_ascii_alphabetic() || *c == '_' => {}
            _ => return Err(self.unexpected("an identifier")),
        }
        while self.at < self.chars.len()
            && (self.chars[self.at].is_ascii_alphanumeric() || self.chars[self.at] == '_')
        {
            self.at += 1;
        }
        Ok(Spanned::new(self.chars[start..self.at].iter().collect(), span))
    }

    /// Comma-separated identifiers up to the end of the line (possibly none).
    fn ident_list(&mut self) -> Result<Vec<Spanned<String>>, SpecError> {
        let mut out = Vec::new();
        if self.at_end() {
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            if self.at_end() {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn finish(&mut self) -> Result<(), SpecError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }
}

fn set_once<T>(slot: &mut Option<Spanned<T>>, value: T, span: Span, kw: &str) -> Result<(), SpecError> {
    if slot.is_some() {
        return Err(SpecError::new(
            span,
            SpecErrorKind::Duplicate {
                kind: "section",
                name: kw.to_string(),
            },
        ));
    }
    *slot = Some(Spanned::new(value, span));
    Ok(())
}

/// Parses the text of a game file. LF and CRLF line endings are accepted.
pub fn parse_game(text: &str) -> Result<GameDocument, SpecError> {
    let mut doc = GameDocument::default();
    let mut current: Option<Section> = None;
    for (n, raw) in text.split('\n').enumerate() {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let body = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if body.trim().is_empty() {
            continue;
        }
        let mut cur = Cursor::new(body, n + 1);
        let indented = body.starts_with(|c: char| c.is_whitespace());
        if !indented {
            let header = cur.ident()?;
            let span = header.span;
            if header.value == "game" {
                let name = cur.ident()?;
                cur.finish()?;
                if doc.name.is_some() {
                    return Err(SpecError::new(
                        span,
                        SpecErrorKind::Duplicate {
                            kind: "section",
                            name: "game".into(),
                        },
                    ));
                }
                doc.name = Some(name);
                current = Some(Section::Game);
                continue;
            }
            let section = Section::from_keyword(&header.value).ok_or_else(|| {
                SpecError::syntax(span, format!("unknown section `{}`", header.value))
            })?;
            cur.expect(':')?;
            let kw = header.value.as_str();
            match section {
                Section::Agents => set_once(&mut doc.agents, cur.ident_list()?, span, kw)?,
                Section::States => set_once(&mut doc.states, cur.ident_list()?, span, kw)?,
                Section::Props => set_once(&mut doc.props, cur.ident_list()?, span, kw)?,
                Section::Init => {
                    let q = cur.ident()?;
                    cur.finish()?;
                    set_once(&mut doc.init, q, span, kw)?;
                }
                Section::Capacities => {
                    cur.finish()?;
                    set_once(&mut doc.capacities, Vec::new(), span, kw)?
                }
                Section::Actions => {
                    cur.finish()?;
                    set_once(&mut doc.actions, Vec::new(), span, kw)?
                }
                Section::Labels => {
                    cur.finish()?;
                    set_once(&mut doc.labels, Vec::new(), span, kw)?
                }
                Section::Protocol => {
                    cur.finish()?;
                    set_once(&mut doc.protocol, Vec::new(), span, kw)?
                }
                Section::Transitions => {
                    cur.finish()?;
                    set_once(&mut doc.transitions, Vec::new(), span, kw)?
                }
                Section::Game => unreachable!(),
            }
            current = Some(section);
            continue;
        }

        let block = |slot: &mut Option<Spanned<Vec<Line>>>, line: Line| {
            slot.as_mut().expect("section opened").value.push(line)
        };
        match current {
            None | Some(Section::Game) | Some(Section::Init) => {
                cur.skip_ws();
                return Err(SpecError::syntax(
                    cur.span(),
                    "indented line outside of a block section",
                ));
            }
            Some(Section::Agents) => {
                let items = cur.ident_list()?;
                doc.agents.as_mut().expect("open").value.extend(items);
            }
            Some(Section::States) => {
                let items = cur.ident_list()?;
                doc.states.as_mut().expect("open").value.extend(items);
            }
            Some(Section::Props) => {
                let items = cur.ident_list()?;
                doc.props.as_mut().expect("open").value.extend(items);
            }
            Some(Section::Capacities) => block(&mut doc.capacities, keyed_line(&mut cur, false)?),
            Some(Section::Actions) => block(&mut doc.actions, keyed_line(&mut cur, false)?),
            Some(Section::Labels) => block(&mut doc.labels, keyed_line(&mut cur, false)?),
            Some(Section::Protocol) => block(&mut doc.protocol, keyed_line(&mut cur, true)?),
            Some(Section::Transitions) => {
                let from = cur.ident()?;
                cur.expect('(')?;
                let mut actions = Vec::new();
                if !cur.eat(')') {
                    loop {
                        actions.push(cur.ident()?);
                        if cur.eat(')') {
                            break;
                        }
                        cur.expect(',')?;
                    }
                }
                if !cur.eat_str("->") {
                    return Err(cur.unexpected("`->`"));
                }
                let to = cur.ident()?;
                cur.finish()?;
                doc.transitions
                    .as_mut()
                    .expect("open")
                    .value
                    .push(TransitionLine { from, actions, to });
            }
        }
    }
    Ok(doc)
}

/// `head: items` or, with `at`, `head @ second: items`.
fn keyed_line(cur: &mut Cursor, with_at: bool) -> Result<Line, SpecError> {
    let head = cur.ident()?;
    let at = if with_at {
        cur.expect('@')?;
        Some(cur.ident()?)
    } else {
        None
    };
    cur.expect(':')?;
    let items = cur.ident_list()?;
    Ok(Line { head, at, items })
}
