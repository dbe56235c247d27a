//! Graphviz renderings of nerves, groupoid presentations and 1-span
//! diagrams. Output is deterministic: everything is emitted in index order.

use std::fmt::Write;

use crate::family::SimplicialFamily;
use crate::groupoid::GroupoidPresentation;
use crate::simplicial::TruncSSet;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// The 1-skeleton: vertices `S0`, an arc `d1 l -> d0 l` per 1-simplex.
/// Degenerate 1-simplices are dashed.
pub fn nerve_dot(name: &str, s: &TruncSSet) -> String {
    let mut out = format!("digraph {} {{\n", quote(name));
    for v in &s.s0 {
        let _ = writeln!(out, "  {};", quote(v));
    }
    for l in 0..s.s1.len() {
        let style = if s.is_degenerate1(l) { ", style=dashed" } else { "" };
        let _ = writeln!(
            out,
            "  {} -> {} [label={}{}];",
            quote(&s.s0[s.src(l)]),
            quote(&s.s0[s.tgt(l)]),
            quote(&s.s1[l]),
            style
        );
    }
    let _ = writeln!(out, "  // {} 2-simplices", s.s2.len());
    out.push_str("}\n");
    out
}

/// Objects as nodes, generators as arcs; relations are listed as comments
/// and counted in the graph label.
pub fn presentation_dot(name: &str, p: &GroupoidPresentation) -> String {
    let mut out = format!("digraph {} {{\n", quote(name));
    let _ = writeln!(out, "  label={};", quote(&format!("{} relations", p.relations.len())));
    for o in &p.objects {
        let _ = writeln!(out, "  {};", quote(o));
    }
    for (g, gen) in p.generators.iter().enumerate() {
        let identity = p.identities.get(gen.src).copied().flatten() == Some(g);
        let style = if identity { ", style=dotted" } else { "" };
        let _ = writeln!(
            out,
            "  {} -> {} [label={}{}];",
            quote(&p.objects[gen.src]),
            quote(&p.objects[gen.tgt]),
            quote(&gen.label),
            style
        );
    }
    for r in &p.relations {
        let _ = writeln!(out, "  // {} = {}", p.word_label(&r.lhs), p.word_label(&r.rhs));
    }
    out.push_str("}\n");
    out
}

/// One box per 1-simplex `l`, labelled with the size of its vertex object
/// `(H_1)_l`, with legs to the components over `d1 l` and `d0 l`.
pub fn spans_dot(name: &str, f: &SimplicialFamily) -> String {
    let s = f.sset();
    let mut out = format!("digraph {} {{\n", quote(name));
    for (i, v) in s.s0.iter().enumerate() {
        let size = f.component(0, i).total_size();
        let _ = writeln!(out, "  {} [label={}];", quote(&format!("U:{v}")), quote(&format!("{v} ({size})")));
    }
    for l in 0..s.s1.len() {
        let id = quote(&format!("S:{}", s.s1[l]));
        let size = f.component(1, l).total_size();
        let _ = writeln!(out, "  {id} [shape=box, label={}];", quote(&format!("{} ({size})", s.s1[l])));
        let _ = writeln!(out, "  {id} -> {} [label=\"d1\"];", quote(&format!("U:{}", s.s0[s.src(l)])));
        let _ = writeln!(out, "  {id} -> {} [label=\"d0\"];", quote(&format!("U:{}", s.s0[s.tgt(l)])));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::cech_simplicial_family;
    use crate::fixtures;
    use crate::groupoid::fundamental_presentation;

    #[test]
    fn nerve_of_full_cover_has_four_arcs() {
        let f = cech_simplicial_family(&fixtures::full_nerve_cover()).unwrap();
        let d = nerve_dot("n", f.sset());
        assert_eq!(d.matches(" -> ").count(), 4);
        assert_eq!(d.matches("dashed").count(), 2);
        assert!(d.starts_with("digraph \"n\" {"));
    }

    #[test]
    fn labels_are_escaped() {
        assert_eq!(quote("a\"b"), "\"a\\\"b\"");
    }

    #[test]
    fn presentation_and_spans_render() {
        let f = cech_simplicial_family(&fixtures::swap_cover()).unwrap();
        let p = fundamental_presentation(f.sset());
        let d = presentation_dot("g", &p);
        assert_eq!(d.matches(" -> ").count(), p.generators.len());
        assert_eq!(d.matches("  // ").count(), p.relations.len());
        let s = spans_dot("s", &f.family);
        assert_eq!(s.matches("shape=box").count(), f.sset().s1.len());
    }
}
