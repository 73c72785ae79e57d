use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde_json::{json, Value};

use super::conditions::{delay_conditions_for, injectivity_conditions_for};
use super::cycles::{classify_cycle, s_to_r_intersection, unique_cycles, OrientedCycle};
use super::graph::{DsrGraph, Vertex};
use crate::exact::format_rational;

/// Extra drawing instructions for DOT output.
#[derive(Clone, Debug, Default)]
pub struct DotOptions {
    pub title: Option<String>,
    /// Edge sets to draw in red.
    pub highlight: Vec<Vec<usize>>,
}

pub fn export_dot(g: &DsrGraph, opts: &DotOptions) -> String {
    let highlighted: BTreeSet<usize> = opts.highlight.iter().flatten().copied().collect();
    let mut out = String::new();
    let _ = writeln!(out, "digraph dsr {{");
    if let Some(t) = &opts.title {
        let _ = writeln!(out, "  label=\"{}\";", escape(t));
    }
    for (i, name) in g.species_names().iter().enumerate() {
        let _ = writeln!(out, "  s{i} [label=\"{}\", shape=circle];", escape(name));
    }
    for (k, node) in g.rnodes().iter().enumerate() {
        let _ = writeln!(out, "  r{k} [label=\"{}\", shape=box];", escape(&node.label));
    }
    for (e, edge) in g.edges().iter().enumerate() {
        let mut attrs = vec![format!("label=\"{}\"", format_rational(&edge.label))];
        if !edge.directed {
            attrs.insert(0, "dir=none".into());
        }
        if highlighted.contains(&e) {
            attrs.push("color=red".into());
            attrs.push("penwidth=2".into());
        }
        let (from, to) = if edge.directed {
            (format!("r{}", edge.rnode), format!("s{}", edge.snode))
        } else {
            (format!("s{}", edge.snode), format!("r{}", edge.rnode))
        };
        let _ = writeln!(out, "  {from} -> {to} [{}];", attrs.join(", "));
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Structured description of a graph's cycles, their classes and the
/// unordered pairs of distinct cycles with an S-to-R intersection.
pub fn cycle_report(g: &DsrGraph, cycles: &[OrientedCycle]) -> Value {
    let unique = unique_cycles(cycles);
    let rep: HashMap<&[usize], usize> = unique
        .iter()
        .enumerate()
        .map(|(pos, &i)| (cycles[i].edge_set(), pos))
        .collect();
    let mut pairs = BTreeSet::new();
    for i in 0..cycles.len() {
        for j in i + 1..cycles.len() {
            if s_to_r_intersection(&cycles[i], &cycles[j]) {
                let a = rep[cycles[i].edge_set()];
                let b = rep[cycles[j].edge_set()];
                pairs.insert((a.min(b), a.max(b)));
            }
        }
    }
    let cycle_values: Vec<Value> = unique
        .iter()
        .enumerate()
        .map(|(pos, &i)| {
            let c = &cycles[i];
            let k = classify_cycle(c);
            let orientations = cycles.iter().filter(|d| d.edge_set() == c.edge_set()).count();
            json!({
                "index": pos,
                "vertices": c.vertices.iter().map(|&v| vertex_json(g, v)).collect::<Vec<_>>(),
                "edges": c.steps.iter().map(|s| s.edge).collect::<Vec<_>>(),
                "c_pairs": k.c_pairs,
                "e_cycle": k.e_cycle,
                "o_cycle": k.o_cycle,
                "s_cycle": k.s_cycle,
                "alternating_product": format_rational(&c.alternating_product),
                "contains_bispecies_production_edge": c.contains_bispecies_production_edge,
                "orientations": orientations,
            })
        })
        .collect();
    let inj = injectivity_conditions_for(cycles);
    let del = delay_conditions_for(cycles);
    json!({
        "schema_version": 1,
        "snodes": g.species_names(),
        "rnodes": g.rnodes().iter().map(|r| r.label.clone()).collect::<Vec<_>>(),
        "edges": g.edges().iter().map(|e| json!({
            "snode": e.snode,
            "rnode": e.rnode,
            "directed": e.directed,
            "label": format_rational(&e.label),
        })).collect::<Vec<_>>(),
        "bispecies_production_edges": g.bispecies_production_edges(),
        "oriented_cycle_count": cycles.len(),
        "cycles": cycle_values,
        "s_to_r_pairs": pairs.into_iter().map(|(a, b)| [a, b]).collect::<Vec<_>>(),
        "injectivity": {
            "all_cycles_o_or_s": inj.all_cycles_o_or_s,
            "no_e_cycle_s_to_r": inj.no_e_cycle_s_to_r,
        },
        "delay_stability": {
            "no_bpe_cycle": del.no_bpe_cycle,
            "all_s_cycles": del.all_s_cycles,
            "no_s_to_r": del.no_s_to_r,
        },
    })
}

fn vertex_json(g: &DsrGraph, v: Vertex) -> Value {
    match v {
        Vertex::S(i) => json!({"kind": "S", "index": i, "name": g.species_names()[i]}),
        Vertex::R(k) => json!({"kind": "R", "index": k, "name": g.rnodes()[k].label}),
    }
}
