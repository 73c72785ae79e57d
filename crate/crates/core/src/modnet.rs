//! The modified network: every multi-reactant reaction is split into one
//! reaction per reactant species.

use crate::exact::int;
use crate::netcore::{power, Binding, Complex, NetworkError, Origin, Reaction, ReactionNetwork};

/// How a modified reaction's rate constant depends on its parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RateFormula {
    /// Same constant as the parent.
    Copy { parent: usize },
    /// `kappa_parent * (x*)^exponents`, with `exponents = y - y_pivot e_pivot`.
    Split { parent: usize, pivot: usize, exponents: Complex },
}

impl RateFormula {
    pub fn parent(&self) -> usize {
        match self {
            RateFormula::Copy { parent } | RateFormula::Split { parent, .. } => *parent,
        }
    }

    pub fn pivot(&self) -> Option<usize> {
        match self {
            RateFormula::Copy { .. } => None,
            RateFormula::Split { pivot, .. } => Some(*pivot),
        }
    }

    /// Evaluates the formula numerically.
    pub fn evaluate(&self, kappa: &[f64], x_star: &[f64]) -> f64 {
        match self {
            RateFormula::Copy { parent } => kappa[*parent],
            RateFormula::Split { parent, exponents, .. } => {
                kappa[*parent]
                    * exponents
                        .to_f64_terms()
                        .iter()
                        .map(|&(s, e)| power(x_star[s], e))
                        .product::<f64>()
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ModifiedNetwork {
    pub network: ReactionNetwork,
    pub rate_formulas: Vec<RateFormula>,
    /// Modified reaction indices produced from each original reaction.
    pub children: Vec<Vec<usize>>,
    /// Groups of modified reactions that coincide as reactions; kept distinct.
    pub duplicates: Vec<Vec<usize>>,
}

pub fn build_modified_network(net: &ReactionNetwork) -> ModifiedNetwork {
    let names = net.species_names();
    let mut reactions = Vec::new();
    let mut formulas = Vec::new();
    let mut children = Vec::with_capacity(net.n_reactions());
    for (r, rx) in net.reactions().iter().enumerate() {
        let mut kids = Vec::new();
        if rx.reactant.support_len() <= 1 {
            kids.push(reactions.len());
            reactions.push(rx.clone().with_origin(Origin::ModifiedCopy { parent: r }));
            formulas.push(RateFormula::Copy { parent: r });
        } else {
            let parent_rate = rx.rate.name.clone().unwrap_or_else(|| format!("k{}", r + 1));
            for (i, yi) in rx.reactant.iter() {
                let rest = rx.reactant.without(i);
                let reactant = Complex::single(i, yi.clone());
                let product = rx.product.plus(&rest);
                let rate = Binding::symbol(format!("{parent_rate}__{}", names[i]));
                kids.push(reactions.len());
                reactions.push(
                    Reaction::new(reactant, product)
                        .with_rate(rate)
                        .with_delay(rx.delay.clone())
                        .with_origin(Origin::ModifiedSplit { parent: r, pivot: i }),
                );
                formulas.push(RateFormula::Split { parent: r, pivot: i, exponents: rest });
            }
        }
        children.push(kids);
    }
    let pairs: Vec<(usize, usize)> = net
        .reversible_pairs()
        .iter()
        .filter(|&&(a, b)| {
            matches!(formulas[children[a][0]], RateFormula::Copy { .. })
                && matches!(formulas[children[b][0]], RateFormula::Copy { .. })
        })
        .map(|&(a, b)| (children[a][0], children[b][0]))
        .collect();
    let mut duplicates: Vec<Vec<usize>> = Vec::new();
    for (k, rx) in reactions.iter().enumerate() {
        if duplicates.iter().any(|g| g.contains(&k)) {
            continue;
        }
        let group: Vec<usize> = (k..reactions.len())
            .filter(|&j| reactions[j].reactant == rx.reactant && reactions[j].product == rx.product)
            .collect();
        if group.len() > 1 {
            duplicates.push(group);
        }
    }
    let network = ReactionNetwork::with_pairs(names.to_vec(), reactions, pairs, false)
        .unwrap_or_else(|e: NetworkError| unreachable!("modified network is well formed: {e}"));
    ModifiedNetwork { network, rate_formulas: formulas, children, duplicates }
}

/// Numeric modified rate constants at the state `x_star`.
pub fn evaluate_modified_rates(m: &ModifiedNetwork, kappa: &[f64], x_star: &[f64]) -> Vec<f64> {
    m.rate_formulas.iter().map(|f| f.evaluate(kappa, x_star)).collect()
}

impl ModifiedNetwork {
    /// Text form of each rate formula, for example `k3 * x^1 * y^2`.
    pub fn formula_text(&self, original: &ReactionNetwork, k: usize) -> String {
        let f = &self.rate_formulas[k];
        let parent = f.parent();
        let base = original
            .reaction(parent)
            .rate
            .name
            .clone()
            .unwrap_or_else(|| format!("k{}", parent + 1));
        match f {
            RateFormula::Copy { .. } => base,
            RateFormula::Split { exponents, .. } => {
                let names = original.species_names();
                let mut s = base;
                for (i, e) in exponents.iter() {
                    if e == &int(1) {
                        s.push_str(&format!(" * {}*", names[i]));
                    } else {
                        s.push_str(&format!(" * {}*^{}", names[i], crate::exact::format_rational(e)));
                    }
                }
                s
            }
        }
    }
}
