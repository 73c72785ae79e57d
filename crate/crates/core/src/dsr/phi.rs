use super::cycles::OrientedCycle;
use super::graph::{DsrError, DsrGraph, Vertex};
use crate::modnet::ModifiedNetwork;

/// Graph homomorphism from the modified DSR graph onto the original one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiMap {
    /// Original R-node for each modified R-node.
    pub rnode_map: Vec<usize>,
    /// Original edge for each modified edge.
    pub edge_map: Vec<usize>,
}

/// What a modified-graph cycle becomes under the homomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PhiImage {
    /// A cycle of the original graph, as a vertex sequence.
    Cycle(Vec<Vertex>),
    /// A c-pair: two distinct edges meeting at one R-node.
    CPair { rnode: usize, edges: (usize, usize) },
    /// Any other closed walk.
    Other(Vec<Vertex>),
}

pub fn build_phi(orig: &DsrGraph, modified: &DsrGraph, m: &ModifiedNetwork) -> Result<PhiMap, DsrError> {
    let mismatch = |msg: String| Err(DsrError::StructuralMismatch(msg));
    if orig.species_names() != modified.species_names() {
        return mismatch("species differ".into());
    }
    let mut rnode_map = Vec::with_capacity(modified.n_rnodes());
    for (k, node) in modified.rnodes().iter().enumerate() {
        let targets: Vec<Option<usize>> = node
            .reactions
            .iter()
            .map(|&r| m.rate_formulas.get(r).and_then(|f| orig.rnode_of_reaction(f.parent())))
            .collect();
        match targets.as_slice() {
            [Some(t), rest @ ..] if rest.iter().all(|x| *x == Some(*t)) => rnode_map.push(*t),
            _ => return mismatch(format!("modified R-node {k} has no consistent parent R-node")),
        }
    }
    let mut edge_map = Vec::with_capacity(modified.edges().len());
    for (e, edge) in modified.edges().iter().enumerate() {
        let target = rnode_map[edge.rnode];
        let Some(oe) = orig.edge_between(edge.snode, target) else {
            return mismatch(format!("modified edge {e} has no image"));
        };
        let o = orig.edge(oe);
        if o.label != edge.label {
            return mismatch(format!("edge {e} label {} maps to label {}", edge.label, o.label));
        }
        if !edge.directed && o.directed {
            return mismatch(format!("undirected edge {e} maps to a directed edge"));
        }
        edge_map.push(oe);
    }
    let mut hit_r = vec![false; orig.n_rnodes()];
    rnode_map.iter().for_each(|&k| hit_r[k] = true);
    if let Some(k) = hit_r.iter().position(|&h| !h) {
        return mismatch(format!("original R-node {k} is not in the image"));
    }
    let mut hit_e = vec![false; orig.edges().len()];
    edge_map.iter().for_each(|&e| hit_e[e] = true);
    if let Some(e) = hit_e.iter().position(|&h| !h) {
        return mismatch(format!("original edge {e} is not in the image"));
    }
    Ok(PhiMap { rnode_map, edge_map })
}

impl PhiMap {
    pub fn map_vertex(&self, v: Vertex) -> Vertex {
        match v {
            Vertex::S(i) => Vertex::S(i),
            Vertex::R(k) => Vertex::R(self.rnode_map[k]),
        }
    }

    pub fn is_isomorphism(&self) -> bool {
        let mut r = self.rnode_map.clone();
        r.sort_unstable();
        r.dedup();
        let mut e = self.edge_map.clone();
        e.sort_unstable();
        e.dedup();
        r.len() == self.rnode_map.len() && e.len() == self.edge_map.len()
    }

    pub fn image(&self, orig: &DsrGraph, c: &OrientedCycle) -> PhiImage {
        let vs: Vec<Vertex> = c.vertices.iter().map(|&v| self.map_vertex(v)).collect();
        let mut sorted = vs.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() == vs.len() {
            return PhiImage::Cycle(vs);
        }
        if let [Vertex::S(x), Vertex::R(r1), Vertex::S(y), Vertex::R(r2)] = vs[..] {
            if r1 == r2 && x != y {
                let e1 = orig.edge_between(x, r1).expect("homomorphic image edge");
                let e2 = orig.edge_between(y, r1).expect("homomorphic image edge");
                return PhiImage::CPair { rnode: r1, edges: (e1.min(e2), e1.max(e2)) };
            }
        }
        PhiImage::Other(vs)
    }
}
