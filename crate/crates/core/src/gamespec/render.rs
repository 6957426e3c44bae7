use std::fmt::Write;

use itertools::Itertools;

use crate::model::GameStructure;

/// Renders `g` in the game file format. Actions outside every `γ(c)` have no
/// place in the format and are dropped; such actions can never be played.
pub fn render_game(g: &GameStructure) -> String {
    let mut out = String::new();
    let name = if g.name().is_empty() { "game" } else { g.name() };
    // Infallible: writing to a String.
    let _ = write_game(&mut out, g, name);
    out
}

fn write_game(out: &mut String, g: &GameStructure, name: &str) -> std::fmt::Result {
    writeln!(out, "game {name}")?;
    writeln!(out)?;
    writeln!(out, "agents: {}", g.agents().map(|a| g.agent_name(a)).join(", "))?;
    writeln!(out)?;
    writeln!(out, "capacities:")?;
    for a in g.agents() {
        writeln!(
            out,
            "  {}: {}",
            g.agent_name(a),
            g.capacities_of(a).iter().map(|c| g.capacity_name(*c)).join(", ")
        )?;
    }
    writeln!(out)?;
    writeln!(out, "actions:")?;
    for c in g.capacities() {
        let xs = g.actions_of(c).iter().map(|x| g.action_name(*x)).sorted().join(", ");
        if xs.is_empty() {
            writeln!(out, "  {}:", g.capacity_name(c))?;
        } else {
            writeln!(out, "  {}: {xs}", g.capacity_name(c))?;
        }
    }
    writeln!(out)?;
    writeln!(out, "states: {}", g.states().map(|q| g.state_name(q)).join(", "))?;
    if let Some(q) = g.init() {
        writeln!(out, "init: {}", g.state_name(q))?;
    }
    writeln!(out, "props: {}", g.props().map(|p| g.prop_name(p)).join(", "))?;
    writeln!(out)?;
    writeln!(out, "labels:")?;
    for q in g.states() {
        let ps = g.labels(q).iter().map(|p| g.prop_name(*p)).join(", ");
        if ps.is_empty() {
            writeln!(out, "  {}:", g.state_name(q))?;
        } else {
            writeln!(out, "  {}: {ps}", g.state_name(q))?;
        }
    }
    writeln!(out)?;
    writeln!(out, "protocol:")?;
    for a in g.agents() {
        for q in g.states() {
            let xs = g.protocol(a, q).iter().map(|x| g.action_name(*x)).sorted().join(", ");
            writeln!(out, "  {} @ {}: {xs}", g.agent_name(a), g.state_name(q))?;
        }
    }
    writeln!(out)?;
    writeln!(out, "transitions:")?;
    // Action ids depend on declaration order, so lines are ordered by name.
    let lines = g
        .transitions()
        .map(|(q, joint, t)| (q, joint.as_slice().iter().map(|x| g.action_name(*x)).collect::<Vec<_>>(), t))
        .sorted();
    for (q, names, t) in lines {
        writeln!(out, "  {} ({}) -> {}", g.state_name(q), names.join(", "), g.state_name(t))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gamespec::load_game;

    #[test]
    fn fixtures_round_trip() {
        for g in [fixtures::hand(), fixtures::mix()] {
            let text = render_game(&g);
            let back = load_game(&text).unwrap();
            assert!(g.isomorphic(&back));
            assert_eq!(render_game(&back), text);
        }
    }

    #[test]
    fn empty_labels_survive() {
        let g = fixtures::hand();
        let s2 = g.state_id("s2").unwrap();
        let emptied = load_game(&render_game(&g).replace("  s2: rightHit", "  s2:")).unwrap();
        assert!(emptied.labels(s2).is_empty());
        let again = load_game(&render_game(&emptied)).unwrap();
        assert!(again.labels(s2).is_empty());
        assert!(again.isomorphic(&emptied));
        // Still declared even though no state carries it.
        assert!(again.prop_id("rightHit").is_some());
    }
}
