use std::collections::HashMap;

use num::One;

use super::graph::{DsrError, DsrGraph, Vertex};
use crate::exact::Rational;

pub const DEFAULT_CYCLE_BUDGET: usize = 1_000_000;

/// One traversed edge of a cycle; `from_species` is true when the edge is
/// walked from its S-node to its R-node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub edge: usize,
    pub from_species: bool,
}

/// A closed simple walk in the DSR graph, compatible with edge directions.
///
/// Vertex `k` of the walk is the tail of step `k`; the walk starts at its
/// lowest-numbered S-node.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedCycle {
    pub vertices: Vec<Vertex>,
    pub steps: Vec<Step>,
    pub c_pair_count: usize,
    pub alternating_product: Rational,
    pub contains_bispecies_production_edge: bool,
    edge_set: Vec<usize>,
    forward_mask: Vec<u64>,
    backward_mask: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CycleClass {
    pub c_pairs: usize,
    pub e_cycle: bool,
    pub o_cycle: bool,
    pub s_cycle: bool,
}

impl OrientedCycle {
    /// Builds a cycle from a vertex sequence (first vertex not repeated).
    ///
    /// Returns `None` if consecutive vertices are not joined by an edge
    /// traversable in that direction.
    pub fn from_vertices(g: &DsrGraph, vertices: &[Vertex]) -> Option<Self> {
        let len = vertices.len();
        if len < 4 || !len.is_multiple_of(2) {
            return None;
        }
        let start = (0..len)
            .filter(|&i| matches!(vertices[i], Vertex::S(_)))
            .min_by_key(|&i| vertices[i])?;
        let vertices: Vec<Vertex> = (0..len).map(|k| vertices[(start + k) % len]).collect();
        let mut steps = Vec::with_capacity(len);
        for k in 0..len {
            let (a, b) = (vertices[k], vertices[(k + 1) % len]);
            let step = match (a, b) {
                (Vertex::S(s), Vertex::R(r)) => {
                    let e = g.edge_between(s, r)?;
                    if g.edge(e).directed {
                        return None;
                    }
                    Step { edge: e, from_species: true }
                }
                (Vertex::R(r), Vertex::S(s)) => Step { edge: g.edge_between(s, r)?, from_species: false },
                _ => return None,
            };
            steps.push(step);
        }
        let mut seen = vertices.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != len {
            return None;
        }
        let words = g.edges().len().div_ceil(64).max(1);
        let mut forward_mask = vec![0u64; words];
        let mut backward_mask = vec![0u64; words];
        for st in &steps {
            let mask = if st.from_species { &mut forward_mask } else { &mut backward_mask };
            mask[st.edge / 64] |= 1 << (st.edge % 64);
        }
        let mut c_pair_count = 0;
        for k in (1..len).step_by(2) {
            if g.is_c_pair(steps[k - 1].edge, steps[k].edge) {
                c_pair_count += 1;
            }
        }
        let mut alternating_product = Rational::one();
        for (k, st) in steps.iter().enumerate() {
            let label = &g.edge(st.edge).label;
            if k % 2 == 0 {
                alternating_product *= label;
            } else {
                alternating_product /= label;
            }
        }
        let contains_bispecies_production_edge = steps.iter().any(|st| g.is_bispecies_production_edge(st.edge));
        let mut edge_set: Vec<usize> = steps.iter().map(|s| s.edge).collect();
        edge_set.sort_unstable();
        Some(Self {
            vertices,
            steps,
            c_pair_count,
            alternating_product,
            contains_bispecies_production_edge,
            edge_set,
            forward_mask,
            backward_mask,
        })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Sorted edge ids, the orientation-free identity of the cycle.
    pub fn edge_set(&self) -> &[usize] {
        &self.edge_set
    }

    pub fn species(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .vertices
            .iter()
            .filter_map(|v| match v {
                Vertex::S(i) => Some(*i),
                Vertex::R(_) => None,
            })
            .collect();
        s.sort_unstable();
        s
    }

    fn traverses(&self, edge: usize, from_species: bool) -> bool {
        let mask = if from_species { &self.forward_mask } else { &self.backward_mask };
        mask.get(edge / 64).is_some_and(|w| w & (1 << (edge % 64)) != 0)
    }
}

pub fn classify_cycle(c: &OrientedCycle) -> CycleClass {
    assert!(c.len().is_multiple_of(2), "cycles of a bipartite graph have even length");
    CycleClass {
        c_pairs: c.c_pair_count,
        e_cycle: c.c_pair_count.is_multiple_of(2),
        o_cycle: c.c_pair_count % 2 == 1,
        s_cycle: c.alternating_product.is_one(),
    }
}

/// Whether two oriented cycles have an S-to-R intersection.
///
/// The shared edges are those both cycles traverse in the same direction.
/// They qualify when there is at least one and every connected piece is a
/// path with an odd number of edges.
pub fn s_to_r_intersection(c1: &OrientedCycle, c2: &OrientedCycle) -> bool {
    if c1.edge_set == c2.edge_set {
        return false;
    }
    let shared: Vec<bool> = c1.steps.iter().map(|st| c2.traverses(st.edge, st.from_species)).collect();
    let len = shared.len();
    let Some(gap) = shared.iter().position(|&b| !b) else {
        return false;
    };
    let mut any = false;
    let mut run = 0;
    for k in 1..=len {
        if shared[(gap + k) % len] {
            run += 1;
        } else {
            if run > 0 {
                if run % 2 == 0 {
                    return false;
                }
                any = true;
            }
            run = 0;
        }
    }
    any
}

/// Indices of the first oriented cycle for each distinct edge set.
pub fn unique_cycles(cycles: &[OrientedCycle]) -> Vec<usize> {
    let mut seen = HashMap::new();
    (0..cycles.len())
        .filter(|&i| seen.insert(cycles[i].edge_set.clone(), i).is_none())
        .collect()
}

pub fn enumerate_cycles(g: &DsrGraph) -> Result<Vec<OrientedCycle>, DsrError> {
    enumerate_cycles_with_budget(g, DEFAULT_CYCLE_BUDGET)
}

/// All oriented simple cycles, found by Johnson's circuit enumeration on the
/// digraph in which every undirected edge becomes a pair of opposite arcs.
pub fn enumerate_cycles_with_budget(g: &DsrGraph, budget: usize) -> Result<Vec<OrientedCycle>, DsrError> {
    let nv = g.n_vertices();
    let mut out_arcs = vec![Vec::new(); nv];
    for edge in g.edges() {
        let s = g.vertex_id(Vertex::S(edge.snode));
        let r = g.vertex_id(Vertex::R(edge.rnode));
        out_arcs[r].push(s);
        if !edge.directed {
            out_arcs[s].push(r);
        }
    }
    for a in &mut out_arcs {
        a.sort_unstable();
    }
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut search = Johnson::new(&out_arcs, budget);
    for s in 0..nv {
        let comp = scc_containing(&out_arcs, s);
        if comp.iter().filter(|&&b| b).count() < 2 {
            continue;
        }
        search.run(s, &comp, &mut found)?;
    }
    Ok(found
        .into_iter()
        .map(|ids| {
            let vs: Vec<Vertex> = ids.iter().map(|&v| g.vertex(v)).collect();
            OrientedCycle::from_vertices(g, &vs).expect("enumerated circuits are valid cycles")
        })
        .collect())
}

struct Johnson<'a> {
    arcs: &'a [Vec<usize>],
    blocked: Vec<bool>,
    blocked_by: Vec<Vec<usize>>,
    stack: Vec<usize>,
    budget: usize,
    count: usize,
}

impl<'a> Johnson<'a> {
    fn new(arcs: &'a [Vec<usize>], budget: usize) -> Self {
        let n = arcs.len();
        Self {
            arcs,
            blocked: vec![false; n],
            blocked_by: vec![Vec::new(); n],
            stack: Vec::new(),
            budget,
            count: 0,
        }
    }

    fn run(&mut self, start: usize, comp: &[bool], found: &mut Vec<Vec<usize>>) -> Result<(), DsrError> {
        for v in 0..self.arcs.len() {
            if comp[v] {
                self.blocked[v] = false;
                self.blocked_by[v].clear();
            }
        }
        self.circuit(start, start, comp, found)?;
        Ok(())
    }

    fn circuit(&mut self, v: usize, start: usize, comp: &[bool], found: &mut Vec<Vec<usize>>) -> Result<bool, DsrError> {
        let mut closed = false;
        self.stack.push(v);
        self.blocked[v] = true;
        for &w in &self.arcs[v] {
            if !comp[w] {
                continue;
            }
            if w == start {
                closed = true;
                if self.stack.len() > 2 {
                    self.count += 1;
                    if self.count > self.budget {
                        return Err(DsrError::Overflow(self.budget));
                    }
                    found.push(self.stack.clone());
                }
            } else if !self.blocked[w] && self.circuit(w, start, comp, found)? {
                closed = true;
            }
        }
        if closed {
            self.unblock(v);
        } else {
            for &w in &self.arcs[v] {
                if comp[w] && !self.blocked_by[w].contains(&v) {
                    self.blocked_by[w].push(v);
                }
            }
        }
        self.stack.pop();
        Ok(closed)
    }

    fn unblock(&mut self, v: usize) {
        let mut work = vec![v];
        while let Some(u) = work.pop() {
            if !self.blocked[u] {
                continue;
            }
            self.blocked[u] = false;
            work.extend(std::mem::take(&mut self.blocked_by[u]));
        }
    }
}

/// Membership mask of the strongly connected component of `s` within the
/// subgraph induced by vertices `>= s`.
fn scc_containing(arcs: &[Vec<usize>], s: usize) -> Vec<bool> {
    let n = arcs.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut work = vec![s];
        while let Some(u) = work.pop() {
            if forward {
                for &w in &arcs[u] {
                    if w >= s && !seen[w] {
                        seen[w] = true;
                        work.push(w);
                    }
                }
            } else {
                for w in s..n {
                    if !seen[w] && arcs[w].contains(&u) {
                        seen[w] = true;
                        work.push(w);
                    }
                }
            }
        }
        seen
    };
    let fwd = reach(true);
    let bwd = reach(false);
    fwd.iter().zip(&bwd).map(|(&a, &b)| a && b).collect()
}
