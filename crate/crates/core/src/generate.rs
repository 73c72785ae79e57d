//! Seeded random networks for property tests and benchmarks.

use rand::RngExt;
use rand_chacha::ChaCha8Rng;

use crate::netcore::{Complex, Reaction, ReactionNetwork};
use crate::random::stream_rng;

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub max_species: usize,
    pub max_reactions: usize,
    /// Largest stoichiometric coefficient.
    pub max_coeff: i64,
    /// Probability that a reaction is emitted together with its reverse.
    pub reversible_probability: f64,
    /// Restrict to networks satisfying N2, N3 and N4.
    pub structural: bool,
    /// Append an outflow `X -> 0` for every species, so that N1 holds.
    pub outflows: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            max_species: 5,
            max_reactions: 8,
            max_coeff: 2,
            reversible_probability: 0.3,
            structural: true,
            outflows: false,
        }
    }
}

fn random_complex(rng: &mut ChaCha8Rng, n: usize, max_species: usize, exclude: &[usize], max_coeff: i64) -> Complex {
    let pool: Vec<usize> = (0..n).filter(|s| !exclude.contains(s)).collect();
    let k = rng.random_range(0..=max_species.min(pool.len()));
    let mut chosen = pool;
    for i in 0..k {
        let j = rng.random_range(i..chosen.len());
        chosen.swap(i, j);
    }
    let terms: Vec<(usize, i64)> = chosen[..k].iter().map(|&s| (s, rng.random_range(1..=max_coeff))).collect();
    Complex::from_ints(&terms)
}

fn random_reaction(rng: &mut ChaCha8Rng, n: usize, cfg: &GeneratorConfig) -> Reaction {
    loop {
        let reactant = random_complex(rng, n, if cfg.structural { 2 } else { n }, &[], cfg.max_coeff);
        let exclude: Vec<usize> = if cfg.structural { reactant.support().collect() } else { Vec::new() };
        let product = random_complex(rng, n, 2, &exclude, cfg.max_coeff);
        if reactant != product {
            return Reaction::new(reactant, product);
        }
    }
}

/// A random network drawn from stream `index` of `seed`.
pub fn random_network(seed: u64, index: u64, cfg: &GeneratorConfig) -> ReactionNetwork {
    let mut rng = stream_rng(seed, index);
    let n = rng.random_range(1..=cfg.max_species.max(1));
    let budget = cfg.max_reactions.saturating_sub(if cfg.outflows { n } else { 0 }).max(1);
    let target = rng.random_range(1..=budget);
    let mut reactions = Vec::new();
    let mut pairs = Vec::new();
    while reactions.len() < target {
        let rx = random_reaction(&mut rng, n, cfg);
        let bispecies_pair = rx.is_bispecies() || rx.product.support_len() == 2;
        let reverse_present = reactions
            .iter()
            .any(|r: &Reaction| r.reactant == rx.product && r.product == rx.reactant);
        if cfg.structural && bispecies_pair && reverse_present {
            continue;
        }
        let reversible = reactions.len() + 2 <= target
            && rng.random::<f64>() < cfg.reversible_probability
            && !(cfg.structural && bispecies_pair);
        if reversible {
            let back = Reaction::new(rx.product.clone(), rx.reactant.clone());
            pairs.push((reactions.len(), reactions.len() + 1));
            reactions.push(rx);
            reactions.push(back);
        } else {
            reactions.push(rx);
        }
    }
    if cfg.outflows {
        for s in 0..n {
            reactions.push(Reaction::new(Complex::from_ints(&[(s, 1)]), Complex::zero()));
        }
    }
    let species = (0..n).map(|i| format!("X{}", i + 1)).collect();
    ReactionNetwork::with_pairs(species, reactions, pairs, true).expect("generated network is well formed")
}
