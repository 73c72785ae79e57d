//! Independent reference implementation of the cycle machinery, working on
//! vertex ids and the raw edge list only.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use delaystab::dsr::{DsrGraph, OrientedCycle, Side, Vertex};
use delaystab::exact::Rational;
use num::One;

/// Arcs (tail, head, edge) a cycle may traverse.
pub fn arcs(g: &DsrGraph) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for (e, edge) in g.edges().iter().enumerate() {
        let s = g.vertex_id(Vertex::S(edge.snode));
        let r = g.vertex_id(Vertex::R(edge.rnode));
        out.push((r, s, e));
        if !edge.directed {
            out.push((s, r, e));
        }
    }
    out
}

/// Every oriented simple cycle as a vertex sequence starting at its
/// smallest vertex id.
pub fn cycles(g: &DsrGraph) -> BTreeSet<Vec<usize>> {
    let arcs = arcs(g);
    let n = g.n_vertices();
    let mut out = BTreeSet::new();
    for start in 0..n {
        let mut path = vec![start];
        let mut on_path = vec![false; n];
        on_path[start] = true;
        dfs(&arcs, start, &mut path, &mut on_path, &mut out);
    }
    out
}

fn dfs(
    arcs: &[(usize, usize, usize)],
    start: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut BTreeSet<Vec<usize>>,
) {
    let tail = *path.last().unwrap();
    for &(_, b, _) in arcs.iter().filter(|a| a.0 == tail) {
        if b == start && path.len() >= 4 {
            out.insert(canonical(path));
        } else if b > start && !on_path[b] {
            path.push(b);
            on_path[b] = true;
            dfs(arcs, start, path, on_path, out);
            on_path[b] = false;
            path.pop();
        }
    }
}

pub fn canonical(vs: &[usize]) -> Vec<usize> {
    let i = (0..vs.len()).min_by_key(|&i| vs[i]).unwrap();
    (0..vs.len()).map(|k| vs[(i + k) % vs.len()]).collect()
}

pub fn edge_of(g: &DsrGraph, a: usize, b: usize) -> usize {
    let (s, r) = match (g.vertex(a), g.vertex(b)) {
        (Vertex::S(s), Vertex::R(r)) | (Vertex::R(r), Vertex::S(s)) => (s, r),
        _ => panic!("not bipartite"),
    };
    g.edge_between(s, r).unwrap()
}

pub fn edges(g: &DsrGraph, c: &[usize]) -> Vec<usize> {
    (0..c.len()).map(|k| edge_of(g, c[k], c[(k + 1) % c.len()])).collect()
}

pub fn is_s_cycle(g: &DsrGraph, c: &[usize]) -> bool {
    let mut num = Rational::one();
    let mut den = Rational::one();
    for (k, e) in edges(g, c).into_iter().enumerate() {
        if k % 2 == 0 {
            num *= g.edge(e).label.clone();
        } else {
            den *= g.edge(e).label.clone();
        }
    }
    num == den
}

pub fn has_bpe(g: &DsrGraph, c: &[usize]) -> bool {
    edges(g, c).into_iter().any(|e| {
        let edge = g.edge(e);
        let node = &g.rnodes()[edge.rnode];
        edge.directed && !node.reversible && node.reactants.support().count() == 2
    })
}

fn arc_set(c: &[usize]) -> HashSet<(usize, usize)> {
    (0..c.len()).map(|k| (c[k], c[(k + 1) % c.len()])).collect()
}

/// Shared arcs of two oriented cycles (same direction in both).
pub fn shared(c1: &[usize], c2: &[usize]) -> Vec<(usize, usize)> {
    let b = arc_set(c2);
    let mut v: Vec<_> = arc_set(c1).into_iter().filter(|a| b.contains(a)).collect();
    v.sort_unstable();
    v
}

pub fn s_to_r(g: &DsrGraph, c1: &[usize], c2: &[usize]) -> bool {
    let e1: BTreeSet<usize> = edges(g, c1).into_iter().collect();
    let e2: BTreeSet<usize> = edges(g, c2).into_iter().collect();
    if e1 == e2 {
        return false;
    }
    let shared = shared(c1, c2);
    if shared.is_empty() {
        return false;
    }
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    fn find(p: &mut BTreeMap<usize, usize>, x: usize) -> usize {
        let y = *p.entry(x).or_insert(x);
        if y == x {
            x
        } else {
            let r = find(p, y);
            p.insert(x, r);
            r
        }
    }
    let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
    for &(a, b) in &shared {
        *degree.entry(a).or_default() += 1;
        *degree.entry(b).or_default() += 1;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent.insert(ra, rb);
    }
    let mut comp_edges: BTreeMap<usize, usize> = BTreeMap::new();
    let mut comp_vertices: BTreeMap<usize, usize> = BTreeMap::new();
    for &(a, _) in &shared {
        let r = find(&mut parent, a);
        *comp_edges.entry(r).or_default() += 1;
    }
    for &v in degree.keys().collect::<Vec<_>>() {
        let r = find(&mut parent, v);
        *comp_vertices.entry(r).or_default() += 1;
    }
    comp_edges.iter().all(|(r, &m)| m + 1 == comp_vertices[r] && m % 2 == 1)
        && degree.values().all(|&d| d <= 2)
}

pub fn any_s_to_r(g: &DsrGraph, cs: &[Vec<usize>]) -> bool {
    cs.iter().any(|a| cs.iter().any(|b| s_to_r(g, a, b)))
}

/// Unordered pairs of distinct edges at one R-node with both species
/// on the reactant side of an irreversible node, or on one side of a
/// reversible node.
pub fn c_pairs(g: &DsrGraph) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for (i, a) in g.edges().iter().enumerate() {
        for (j, b) in g.edges().iter().enumerate().skip(i + 1) {
            if a.rnode != b.rnode {
                continue;
            }
            let node = &g.rnodes()[a.rnode];
            let ok = if node.reversible {
                a.side == b.side
            } else {
                a.side == Side::Reactant && b.side == Side::Reactant
            };
            if ok {
                out.insert((a.rnode, i, j));
            }
        }
    }
    out
}

/// Library cycle as canonical vertex-id sequence.
pub fn as_ids(g: &DsrGraph, c: &OrientedCycle) -> Vec<usize> {
    canonical(&c.vertices.iter().map(|&v| g.vertex_id(v)).collect::<Vec<_>>())
}
