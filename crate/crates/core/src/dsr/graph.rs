use std::collections::HashMap;

use thiserror::Error;

use crate::exact::Rational;
use crate::netcore::{Complex, FlowClass, ReactionNetwork};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DsrError {
    #[error("reaction {0} is a one-step catalysis; its DSR graph would be a multigraph")]
    OneStepCatalysis(usize),
    #[error("cycle enumeration exceeded its budget of {0} cycles")]
    Overflow(usize),
    #[error("structural mismatch between modified and original graphs: {0}")]
    StructuralMismatch(String),
}

/// Which complex of an R-node a species belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Reactant,
    Product,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RNode {
    /// One reaction, or the two reactions of a reversible pair (lower index first).
    pub reactions: Vec<usize>,
    pub reversible: bool,
    pub reactants: Complex,
    pub products: Complex,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub snode: usize,
    pub rnode: usize,
    /// Directed edges always point from the R-node to the S-node.
    pub directed: bool,
    pub label: Rational,
    pub side: Side,
}

/// A vertex of the DSR graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    S(usize),
    R(usize),
}

/// Bipartite species/reaction graph with stoichiometric edge labels.
#[derive(Clone, Debug)]
pub struct DsrGraph {
    species_names: Vec<String>,
    rnodes: Vec<RNode>,
    edges: Vec<Edge>,
    s_adj: Vec<Vec<usize>>,
    r_adj: Vec<Vec<usize>>,
    edge_index: HashMap<(usize, usize), usize>,
    rnode_of_reaction: Vec<Option<usize>>,
}

pub fn build_dsr(net: &ReactionNetwork) -> Result<DsrGraph, DsrError> {
    if let Some(r) = net.reactions().iter().position(|r| r.is_one_step_catalysis()) {
        return Err(DsrError::OneStepCatalysis(r));
    }
    let names = net.species_names().to_vec();
    let mut rnodes = Vec::new();
    let mut rnode_of_reaction = vec![None; net.n_reactions()];
    for (r, rx) in net.reactions().iter().enumerate() {
        if rx.classify_flow() != FlowClass::Interior {
            continue;
        }
        let partner = net.partner(r);
        if partner.is_some_and(|p| p < r) {
            rnode_of_reaction[r] = rnode_of_reaction[partner.unwrap()];
            continue;
        }
        let reactions: Vec<usize> = std::iter::once(r).chain(partner).collect();
        let arrow = if partner.is_some() { "<->" } else { "->" };
        let label = format!(
            "{} {arrow} {}",
            rx.reactant.display_with(&names),
            rx.product.display_with(&names)
        );
        rnode_of_reaction[r] = Some(rnodes.len());
        rnodes.push(RNode {
            reactions,
            reversible: partner.is_some(),
            reactants: rx.reactant.clone(),
            products: rx.product.clone(),
            label,
        });
    }
    let mut edges = Vec::new();
    for (k, node) in rnodes.iter().enumerate() {
        for (s, c) in node.reactants.iter() {
            edges.push(Edge { snode: s, rnode: k, directed: false, label: c.clone(), side: Side::Reactant });
        }
        for (s, c) in node.products.iter() {
            edges.push(Edge { snode: s, rnode: k, directed: !node.reversible, label: c.clone(), side: Side::Product });
        }
    }
    Ok(DsrGraph::from_parts(names, rnodes, edges, rnode_of_reaction))
}

impl DsrGraph {
    fn from_parts(
        species_names: Vec<String>,
        rnodes: Vec<RNode>,
        edges: Vec<Edge>,
        rnode_of_reaction: Vec<Option<usize>>,
    ) -> Self {
        let mut s_adj = vec![Vec::new(); species_names.len()];
        let mut r_adj = vec![Vec::new(); rnodes.len()];
        let mut edge_index = HashMap::new();
        for (e, edge) in edges.iter().enumerate() {
            s_adj[edge.snode].push(e);
            r_adj[edge.rnode].push(e);
            edge_index.insert((edge.snode, edge.rnode), e);
        }
        Self { species_names, rnodes, edges, s_adj, r_adj, edge_index, rnode_of_reaction }
    }

    pub fn n_snodes(&self) -> usize {
        self.species_names.len()
    }

    pub fn n_rnodes(&self) -> usize {
        self.rnodes.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_snodes() + self.n_rnodes()
    }

    pub fn species_names(&self) -> &[String] {
        &self.species_names
    }

    pub fn rnodes(&self) -> &[RNode] {
        &self.rnodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edge_between(&self, snode: usize, rnode: usize) -> Option<usize> {
        self.edge_index.get(&(snode, rnode)).copied()
    }

    pub fn snode_edges(&self, s: usize) -> &[usize] {
        &self.s_adj[s]
    }

    pub fn rnode_edges(&self, r: usize) -> &[usize] {
        &self.r_adj[r]
    }

    /// The R-node carrying reaction `r`, if it is not a generalized flow.
    pub fn rnode_of_reaction(&self, r: usize) -> Option<usize> {
        self.rnode_of_reaction.get(r).copied().flatten()
    }

    /// Dense vertex id: S-nodes first, then R-nodes.
    pub fn vertex_id(&self, v: Vertex) -> usize {
        match v {
            Vertex::S(i) => i,
            Vertex::R(k) => self.n_snodes() + k,
        }
    }

    pub fn vertex(&self, id: usize) -> Vertex {
        if id < self.n_snodes() {
            Vertex::S(id)
        } else {
            Vertex::R(id - self.n_snodes())
        }
    }

    pub fn vertex_name(&self, v: Vertex) -> String {
        match v {
            Vertex::S(i) => self.species_names[i].clone(),
            Vertex::R(k) => self.rnodes[k].label.clone(),
        }
    }

    /// Whether two edges meeting at an R-node form a c-pair there.
    ///
    /// For a reversible R-node both species must lie in the same complex.
    pub fn is_c_pair(&self, e1: usize, e2: usize) -> bool {
        let (a, b) = (&self.edges[e1], &self.edges[e2]);
        if a.rnode != b.rnode || e1 == e2 {
            return false;
        }
        if self.rnodes[a.rnode].reversible {
            a.side == b.side
        } else {
            a.side == Side::Reactant && b.side == Side::Reactant
        }
    }

    /// Directed edges out of irreversible R-nodes with exactly two reactant species.
    pub fn bispecies_production_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.is_bispecies_production_edge(e)).collect()
    }

    pub fn is_bispecies_production_edge(&self, e: usize) -> bool {
        let edge = &self.edges[e];
        let node = &self.rnodes[edge.rnode];
        edge.directed && !node.reversible && node.reactants.support_len() == 2
    }

    /// Number of c-pairs in the whole graph.
    pub fn c_pair_count(&self) -> usize {
        (0..self.n_rnodes())
            .map(|k| {
                let es = &self.r_adj[k];
                let mut count = 0;
                for i in 0..es.len() {
                    for j in i + 1..es.len() {
                        if self.is_c_pair(es[i], es[j]) {
                            count += 1;
                        }
                    }
                }
                count
            })
            .sum()
    }
}
