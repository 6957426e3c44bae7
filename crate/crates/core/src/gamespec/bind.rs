use std::collections::{BTreeMap, BTreeSet};

use super::parse::{parse_game, GameDocument, Line};
use super::{Span, SpecError, SpecErrorKind, SpecErrors, Spanned};
use crate::model::{
    ActionId, AgentId, GameBuilder, GameStructure, JointAction, ModelError, StateId, Violation,
    RESERVED_PROPS,
};
use crate::trace::{validate_path, Path};

/// Parses and binds in one go.
pub fn load_game(text: &str) -> Result<GameStructure, SpecErrors> {
    let doc = parse_game(text)?;
    bind_game(&doc)
}

struct Binder {
    b: GameBuilder,
    errors: Vec<SpecError>,
}

impl Binder {
    fn err(&mut self, span: Span, kind: SpecErrorKind) {
        self.errors.push(SpecError::new(span, kind));
    }

    fn unknown(&mut self, s: &Spanned<String>, kind: &'static str) {
        self.err(
            s.span,
            SpecErrorKind::Unknown {
                kind,
                name: s.value.clone(),
            },
        );
    }

    fn model(&mut self, span: Span, r: Result<impl Sized, ModelError>) {
        if let Err(e) = r {
            let kind = match e {
                ModelError::Duplicate { kind, name } => SpecErrorKind::Duplicate { kind, name },
                other => SpecErrorKind::Invalid(other.to_string()),
            };
            self.err(span, kind);
        }
    }

    fn agent(&mut self, s: &Spanned<String>) -> Option<AgentId> {
        let id = self.b.agent_id(&s.value);
        if id.is_none() {
            self.unknown(s, "agent");
        }
        id
    }

    fn state(&mut self, s: &Spanned<String>) -> Option<StateId> {
        let id = self.b.state_id(&s.value);
        if id.is_none() {
            self.unknown(s, "state");
        }
        id
    }

    fn action(&mut self, s: &Spanned<String>) -> Option<ActionId> {
        let id = self.b.action_id(&s.value);
        if id.is_none() {
            self.unknown(s, "action");
        }
        id
    }
}

fn missing(section: &'static str, at: Span) -> SpecError {
    SpecError::new(at, SpecErrorKind::MissingSection(section))
}

/// Resolves all names of `doc`, builds the structure and validates it. Any
/// violation of the structural invariants is reported with the span of the
/// declaration it concerns; binding succeeds only on a clean report.
pub fn bind_game(doc: &GameDocument) -> Result<GameStructure, SpecErrors> {
    let origin = Span { line: 1, col: 1 };
    let name = doc.name.as_ref().ok_or_else(|| missing("game", origin))?;
    let at = name.span;
    let agents = doc.agents.as_ref().ok_or_else(|| missing("agents", at))?;
    let capacities = doc.capacities.as_ref().ok_or_else(|| missing("capacities", at))?;
    let actions = doc.actions.as_ref().ok_or_else(|| missing("actions", at))?;
    let states = doc.states.as_ref().ok_or_else(|| missing("states", at))?;
    let labels = doc.labels.as_ref().ok_or_else(|| missing("labels", at))?;
    let protocol = doc.protocol.as_ref().ok_or_else(|| missing("protocol", at))?;
    let transitions = doc.transitions.as_ref().ok_or_else(|| missing("transitions", at))?;

    let mut bd = Binder {
        b: GameBuilder::new(name.value.clone()),
        errors: Vec::new(),
    };

    let mut agent_spans = BTreeMap::new();
    for a in &agents.value {
        let r = bd.b.add_agent(&a.value);
        if let Ok(id) = &r {
            agent_spans.insert(*id, a.span);
        }
        bd.model(a.span, r);
    }
    for q in &states.value {
        let r = bd.b.add_state(&q.value);
        bd.model(q.span, r);
    }
    if let Some(props) = &doc.props {
        for p in &props.value {
            let r = bd.b.add_prop(&p.value);
            bd.model(p.span, r);
        }
    }

    // Capacities and actions are declared by use.
    let mut seen_cap_lines = BTreeSet::new();
    for Line { head, items, .. } in &actions.value {
        if !seen_cap_lines.insert(head.value.clone()) {
            bd.err(
                head.span,
                SpecErrorKind::Duplicate {
                    kind: "actions line for capacity",
                    name: head.value.clone(),
                },
            );
            continue;
        }
        let c = match bd.b.capacity_id(&head.value) {
            Some(c) => c,
            None => bd.b.add_capacity(&head.value).expect("fresh name"),
        };
        for x in items {
            let id = match bd.b.action_id(&x.value) {
                Some(id) => id,
                None => bd.b.add_action(&x.value).expect("fresh name"),
            };
            bd.b.allow(c, id);
        }
    }
    let mut seen_agent_lines = BTreeSet::new();
    for Line { head, items, .. } in &capacities.value {
        let Some(a) = bd.agent(head) else { continue };
        if !seen_agent_lines.insert(a) {
            bd.err(
                head.span,
                SpecErrorKind::Duplicate {
                    kind: "capacities line for agent",
                    name: head.value.clone(),
                },
            );
            continue;
        }
        for c in items {
            let id = match bd.b.capacity_id(&c.value) {
                Some(id) => id,
                None => bd.b.add_capacity(&c.value).expect("fresh name"),
            };
            bd.b.grant(a, id);
        }
    }

    if let Some(init) = &doc.init {
        if let Some(q) = bd.state(&init.value) {
            bd.b.set_init(Some(q));
        }
    }

    let mut seen_label_lines = BTreeSet::new();
    for Line { head, items, .. } in &labels.value {
        let Some(q) = bd.state(head) else { continue };
        if !seen_label_lines.insert(q) {
            bd.err(
                head.span,
                SpecErrorKind::Duplicate {
                    kind: "labels line for state",
                    name: head.value.clone(),
                },
            );
            continue;
        }
        for p in items {
            let id = match bd.b.prop_id(&p.value) {
                Some(id) => id,
                None if doc.props.is_some() => {
                    bd.unknown(p, "proposition");
                    continue;
                }
                None => {
                    if RESERVED_PROPS.contains(&p.value.as_str()) {
                        bd.err(
                            p.span,
                            SpecErrorKind::Invalid(format!("`{}` is reserved", p.value)),
                        );
                        continue;
                    }
                    bd.b.add_prop(&p.value).expect("fresh name")
                }
            };
            bd.b.label(q, id);
        }
    }

    let mut protocol_spans: BTreeMap<(AgentId, StateId), Span> = BTreeMap::new();
    for Line { head, at, items } in &protocol.value {
        let a = bd.agent(head);
        let q = bd.state(at.as_ref().expect("protocol lines have a state"));
        let (Some(a), Some(q)) = (a, q) else { continue };
        if protocol_spans.contains_key(&(a, q)) {
            bd.err(
                head.span,
                SpecErrorKind::Duplicate {
                    kind: "protocol line",
                    name: format!("{} @ {}", head.value, at.as_ref().unwrap().value),
                },
            );
            continue;
        }
        protocol_spans.insert((a, q), head.span);
        let xs: Vec<ActionId> = items.iter().filter_map(|x| bd.action(x)).collect();
        bd.b.set_protocol(a, q, xs);
    }

    let k = agents.value.len();
    let mut transition_spans: BTreeMap<(StateId, JointAction), Span> = BTreeMap::new();
    for t in &transitions.value {
        let from = bd.state(&t.from);
        let to = bd.state(&t.to);
        if t.actions.len() != k {
            bd.err(
                t.from.span,
                SpecErrorKind::Invalid(format!(
                    "transition lists {} actions, expected one per agent ({k})",
                    t.actions.len()
                )),
            );
            continue;
        }
        let xs: Option<Vec<ActionId>> = t.actions.iter().map(|x| bd.action(x)).collect();
        let (Some(from), Some(to), Some(xs)) = (from, to, xs) else { continue };
        let joint = JointAction::new(xs);
        if transition_spans.contains_key(&(from, joint.clone())) {
            bd.err(
                t.from.span,
                SpecErrorKind::Duplicate {
                    kind: "transition from",
                    name: t.from.value.clone(),
                },
            );
            continue;
        }
        transition_spans.insert((from, joint.clone()), t.from.span);
        bd.b.set_transition(from, joint, to);
    }

    if !bd.errors.is_empty() {
        return Err(SpecErrors(bd.errors));
    }
    let g = bd
        .b
        .build()
        .map_err(|e| SpecError::new(at, SpecErrorKind::Invalid(e.to_string())))?;

    let report = g.validate();
    if report.is_clean() {
        return Ok(g);
    }
    let errors = report
        .violations
        .iter()
        .map(|v| {
            let span = match v {
                Violation::NoCapacities { agent } => agent_spans[agent],
                Violation::ProtocolOutsideCapacities { agent, state, .. }
                | Violation::CapacityStarved { agent, state, .. } => protocol_spans
                    .get(&(*agent, *state))
                    .copied()
                    .unwrap_or(protocol.span),
                Violation::MissingTransition { .. } => transitions.span,
                Violation::UnavailableTransition { state, joint } => transition_spans
                    .get(&(*state, joint.clone()))
                    .copied()
                    .unwrap_or(transitions.span),
            };
            SpecError::new(span, SpecErrorKind::Invalid(v.describe(&g)))
        })
        .collect();
    Err(SpecErrors(errors))
}

/// Parses a path literal such as `s0 (watch,swingL) s1` and checks it against
/// `g`.
pub fn parse_path(text: &str, g: &GameStructure) -> Result<Path, SpecError> {
    let at = |i: usize| Span { line: 1, col: i + 1 };
    let mut toks: Vec<(usize, String)> = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        if matches!(c, '(' | ')' | ',') {
            toks.push((i, c.to_string()));
            continue;
        }
        if !(c.is_ascii_alphanumeric() || c == '_') {
            return Err(SpecError::syntax(at(i), format!("unexpected character `{c}`")));
        }
        let mut s = c.to_string();
        while let Some(&(_, d)) = chars.peek() {
            if d.is_ascii_alphanumeric() || d == '_' {
                s.push(d);
                chars.next();
            } else {
                break;
            }
        }
        toks.push((i, s));
    }

    let mut it = toks.into_iter().peekable();
    let state = |tok: Option<(usize, String)>| -> Result<StateId, SpecError> {
        match tok {
            Some((i, s)) => g.state_id(&s).ok_or(SpecError::new(
                at(i),
                SpecErrorKind::Unknown {
                    kind: "state",
                    name: s,
                },
            )),
            None => Err(SpecError::syntax(at(text.len()), "expected a state")),
        }
    };
    let mut path = Path::new(state(it.next())?);
    while let Some((i, open)) = it.next() {
        if open != "(" {
            return Err(SpecError::syntax(at(i), format!("expected `(`, found `{open}`")));
        }
        let mut xs = Vec::new();
        loop {
            match it.next() {
                Some((j, s)) if s != "(" && s != ")" && s != "," => {
                    xs.push(g.action_id(&s).ok_or(SpecError::new(
                        at(j),
                        SpecErrorKind::Unknown {
                            kind: "action",
                            name: s,
                        },
                    ))?);
                }
                Some((j, s)) => {
                    return Err(SpecError::syntax(at(j), format!("expected an action, found `{s}`")))
                }
                None => return Err(SpecError::syntax(at(text.len()), "unterminated joint action")),
            }
            match it.next() {
                Some((_, s)) if s == "," => continue,
                Some((_, s)) if s == ")" => break,
                Some((j, s)) => {
                    return Err(SpecError::syntax(at(j), format!("expected `,` or `)`, found `{s}`")))
                }
                None => return Err(SpecError::syntax(at(text.len()), "unterminated joint action")),
            }
        }
        if xs.len() != g.agent_count() {
            return Err(SpecError::new(
                at(i),
                SpecErrorKind::Invalid(format!(
                    "joint action has {} components, expected {}",
                    xs.len(),
                    g.agent_count()
                )),
            ));
        }
        let to = state(it.next())?;
        path.push(JointAction::new(xs), to);
    }
    if !validate_path(g, &path) {
        return Err(SpecError::new(
            at(0),
            SpecErrorKind::Invalid("path does not follow the protocol and transition function".into()),
        ));
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const HAND: &str = include_str!("../../fixtures/hand.game");

    #[test]
    fn hand_fixture_binds() {
        let g = load_game(HAND).unwrap();
        assert_eq!(g.agent_count(), 2);
        assert_eq!(g.state_count(), 3);
        assert_eq!(g.init(), g.state_id("s0"));
        assert!(g.validate().is_clean());
    }

    #[test]
    fn omitted_transition_is_reported() {
        let text = HAND.replace("  s1 (watch, serve) -> s0\n", "");
        let errs = load_game(&text).unwrap_err();
        assert_eq!(errs.0.len(), 1);
        assert!(errs.0[0].to_string().contains("o undefined for available joint action"));
        // Span of the `transitions:` header.
        assert_eq!(errs.0[0].span.col, 1);
    }

    #[test]
    fn swing_left_only_protocol_is_reported_at_its_line() {
        let text = HAND
            .replace("  opp @ s1: serve\n", "  opp @ s1: swingL\n")
            .replace("  s1 (watch, serve) -> s0\n", "  s1 (watch, swingL) -> s0\n");
        let errs = load_game(&text).unwrap_err();
        let line = HAND.lines().position(|l| l == "  opp @ s1: serve").unwrap() + 1;
        assert_eq!(errs.0.len(), 1, "{errs}");
        assert_eq!(errs.0[0].span, Span { line, col: 3 });
        assert!(errs.0[0].to_string().contains("∩γ(righty)=∅"));
    }

    #[test]
    fn name_errors_have_spans() {
        let text = HAND.replace("  obs @ s2: watch", "  obs @ s9: watch");
        let errs = load_game(&text).unwrap_err();
        assert!(matches!(
            &errs.0[0].kind,
            SpecErrorKind::Unknown { kind: "state", name } if name == "s9"
        ));
        assert_eq!(errs.0[0].span.col, 9);

        let text = HAND.replace("states: s0, s1, s2", "states: s0, s1, s2, s1");
        let errs = load_game(&text).unwrap_err();
        assert!(matches!(&errs.0[0].kind, SpecErrorKind::Duplicate { .. }));

        let text = HAND.replace("protocol:", "proto:");
        assert!(load_game(&text).is_err());

        let text = HAND.replace("labels:\n  s0: start\n  s1: leftHit\n  s2: rightHit\n", "");
        let errs = load_game(&text).unwrap_err();
        assert_eq!(errs.0[0].kind, SpecErrorKind::MissingSection("labels"));
    }

    #[test]
    fn path_literals() {
        let g = fixtures::hand();
        let p = parse_path("s0 (watch,swingL) s1", &g).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.display(&g).to_string(), "s0 (watch,swingL) s1");
        assert!(parse_path("s0 (watch,swingL) s2", &g).is_err());
        assert!(parse_path("s0 (watch) s1", &g).is_err());
        assert!(parse_path("s0 (watch,swingL", &g).is_err());
        assert_eq!(parse_path("  s2 ", &g).unwrap().len(), 1);
    }
}
