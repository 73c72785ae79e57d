use std::collections::{BTreeMap, HashMap};

use num::complex::Complex64;
use thiserror::Error;

use super::complex::Complex;
use crate::exact::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("duplicate species name `{0}`")]
    DuplicateSpecies(String),
    #[error("reaction {reaction} references unknown species index {species}")]
    UnknownSpecies { reaction: usize, species: usize },
    #[error("reaction {0} has identical reactant and product complexes")]
    ReactantEqualsProduct(usize),
    #[error("reaction {reaction}: rate constant must be positive, got {value}")]
    NonPositiveRate { reaction: usize, value: f64 },
    #[error("reaction {reaction}: delay must be nonnegative, got {value}")]
    NegativeDelay { reaction: usize, value: f64 },
    #[error("invalid reversible pair ({0}, {1})")]
    InvalidPair(usize, usize),
    #[error("reaction {reaction} has no numeric {what}")]
    MissingValue { reaction: usize, what: &'static str },
    #[error("{what} has length {got}, expected {expected}")]
    LengthMismatch { what: &'static str, got: usize, expected: usize },
    #[error("{what}[{index}] = {value} is out of range")]
    OutOfRange { what: &'static str, index: usize, value: f64 },
    #[error("history is undefined at t = {0}")]
    HistoryOutOfDomain(f64),
}

/// A symbolic parameter with an optional numeric value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Binding {
    pub name: Option<String>,
    pub value: Option<f64>,
}

pub type RateBinding = Binding;
pub type DelayBinding = Binding;

impl Binding {
    /// Unnamed and unvalued.
    pub fn free() -> Self {
        Self::default()
    }

    pub fn numeric(value: f64) -> Self {
        Self { name: None, value: Some(value) }
    }

    pub fn symbol(name: impl Into<String>) -> Self {
        Self { name: Some(name.into()), value: None }
    }

    pub fn named(name: impl Into<String>, value: f64) -> Self {
        Self { name: Some(name.into()), value: Some(value) }
    }

    /// The default delay of a reaction that does not specify one.
    pub fn no_delay() -> Self {
        Self::numeric(0.0)
    }

    pub fn is_literal_zero(&self) -> bool {
        self.name.is_none() && self.value == Some(0.0)
    }
}

/// Where a reaction came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Parsed,
    ModifiedCopy { parent: usize },
    ModifiedSplit { parent: usize, pivot: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowClass {
    GeneralizedInflow,
    GeneralizedOutflow,
    Interior,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reaction {
    pub reactant: Complex,
    pub product: Complex,
    pub rate: RateBinding,
    pub delay: DelayBinding,
    pub origin: Origin,
}

impl Reaction {
    /// A reaction with a free rate and no delay.
    pub fn new(reactant: Complex, product: Complex) -> Self {
        Self {
            reactant,
            product,
            rate: Binding::free(),
            delay: Binding::no_delay(),
            origin: Origin::Parsed,
        }
    }

    pub fn with_rate(mut self, rate: RateBinding) -> Self {
        self.rate = rate;
        self
    }

    pub fn with_delay(mut self, delay: DelayBinding) -> Self {
        self.delay = delay;
        self
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = origin;
        self
    }

    pub fn is_autocatalytic(&self) -> bool {
        self.reactant
            .iter()
            .any(|(s, c)| self.product.get(s).is_some_and(|p| p > c))
    }

    pub fn is_one_step_catalysis(&self) -> bool {
        self.reactant.supports_intersect(&self.product)
    }

    pub fn classify_flow(&self) -> FlowClass {
        if self.reactant.is_zero() && self.product.support_len() == 1 {
            FlowClass::GeneralizedInflow
        } else if self.product.is_zero() && self.reactant.support_len() == 1 {
            FlowClass::GeneralizedOutflow
        } else {
            FlowClass::Interior
        }
    }

    pub fn is_bispecies(&self) -> bool {
        self.reactant.support_len() == 2
    }

    /// Exact reaction vector `y' - y`.
    pub fn reaction_vector(&self, n: usize) -> Vec<Rational> {
        (0..n)
            .map(|i| self.product.coeff(i) - self.reactant.coeff(i))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Species {
    pub id: usize,
    pub name: String,
}

/// Species plus an ordered list of reactions and their reversible pairing.
#[derive(Clone, Debug)]
pub struct ReactionNetwork {
    species: Vec<Species>,
    names: Vec<String>,
    reactions: Vec<Reaction>,
    pairs: Vec<(usize, usize)>,
    partner: Vec<Option<usize>>,
}

impl ReactionNetwork {
    /// Builds a network and pairs mutually reverse reactions automatically.
    pub fn new(species: Vec<String>, reactions: Vec<Reaction>) -> Result<Self, NetworkError> {
        Self::with_pairs(species, reactions, Vec::new(), true)
    }

    /// Builds a network with the given pairs; when `auto_pair_rest` is set,
    /// remaining unpaired reactions are paired greedily by complex equality.
    pub fn with_pairs(
        species: Vec<String>,
        reactions: Vec<Reaction>,
        pairs: Vec<(usize, usize)>,
        auto_pair_rest: bool,
    ) -> Result<Self, NetworkError> {
        let mut seen = HashMap::new();
        for (i, name) in species.iter().enumerate() {
            if seen.insert(name.clone(), i).is_some() {
                return Err(NetworkError::DuplicateSpecies(name.clone()));
            }
        }
        let n = species.len();
        for (r, rx) in reactions.iter().enumerate() {
            for s in rx.reactant.support().chain(rx.product.support()) {
                if s >= n {
                    return Err(NetworkError::UnknownSpecies { reaction: r, species: s });
                }
            }
            if rx.reactant == rx.product {
                return Err(NetworkError::ReactantEqualsProduct(r));
            }
            if let Some(v) = rx.rate.value {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(NetworkError::NonPositiveRate { reaction: r, value: v });
                }
            }
            if let Some(v) = rx.delay.value {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(NetworkError::NegativeDelay { reaction: r, value: v });
                }
            }
        }
        let mut partner = vec![None; reactions.len()];
        let mut normalized = Vec::new();
        for (a, b) in pairs {
            let (a, b) = (a.min(b), a.max(b));
            let valid = a != b
                && b < reactions.len()
                && partner[a].is_none()
                && partner[b].is_none()
                && reactions[a].reactant == reactions[b].product
                && reactions[a].product == reactions[b].reactant;
            if !valid {
                return Err(NetworkError::InvalidPair(a, b));
            }
            partner[a] = Some(b);
            partner[b] = Some(a);
            normalized.push((a, b));
        }
        if auto_pair_rest {
            for i in 0..reactions.len() {
                if partner[i].is_some() {
                    continue;
                }
                let found = (i + 1..reactions.len()).find(|&j| {
                    partner[j].is_none()
                        && reactions[j].reactant == reactions[i].product
                        && reactions[j].product == reactions[i].reactant
                });
                if let Some(j) = found {
                    partner[i] = Some(j);
                    partner[j] = Some(i);
                    normalized.push((i, j));
                }
            }
        }
        normalized.sort_unstable();
        Ok(Self {
            species: species
                .iter()
                .enumerate()
                .map(|(id, name)| Species { id, name: name.clone() })
                .collect(),
            names: species,
            reactions,
            pairs: normalized,
            partner,
        })
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), Vec::new()).expect("empty network is valid")
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    pub fn n_reactions(&self) -> usize {
        self.reactions.len()
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn species_names(&self) -> &[String] {
        &self.names
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn reaction(&self, r: usize) -> &Reaction {
        &self.reactions[r]
    }

    /// Reversible pairs `(r, r')` with `r < r'`, sorted.
    pub fn reversible_pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn partner(&self, r: usize) -> Option<usize> {
        self.partner[r]
    }

    pub fn is_reversible(&self, r: usize) -> bool {
        self.partner[r].is_some()
    }

    /// Human-readable form of reaction `r`.
    pub fn describe_reaction(&self, r: usize) -> String {
        let rx = &self.reactions[r];
        format!(
            "{} -> {}",
            rx.reactant.display_with(&self.names),
            rx.product.display_with(&self.names)
        )
    }

    /// Equality of everything except reaction provenance.
    pub fn structurally_eq(&self, other: &Self) -> bool {
        self.names == other.names
            && self.pairs == other.pairs
            && self.reactions.len() == other.reactions.len()
            && self.reactions.iter().zip(&other.reactions).all(|(a, b)| {
                a.reactant == b.reactant
                    && a.product == b.product
                    && a.rate == b.rate
                    && a.delay == b.delay
            })
    }

    /// Names of symbolic parameters that lack a numeric value.
    pub fn free_parameters(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .reactions
            .iter()
            .flat_map(|r| [&r.rate, &r.delay])
            .filter(|b| b.value.is_none())
            .filter_map(|b| b.name.clone())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Numeric values of named parameters, as carried by the reactions.
    pub fn parameter_values(&self) -> BTreeMap<String, f64> {
        self.reactions
            .iter()
            .flat_map(|r| [&r.rate, &r.delay])
            .filter_map(|b| Some((b.name.clone()?, b.value?)))
            .collect()
    }

    /// Rate constants, with named parameters overridable by `overrides`.
    pub fn resolve_rates(&self, overrides: &HashMap<String, f64>) -> Result<Vec<f64>, NetworkError> {
        self.resolve(overrides, |r| &r.rate, "rate constant")
    }

    /// Delays, with named parameters overridable by `overrides`.
    pub fn resolve_delays(&self, overrides: &HashMap<String, f64>) -> Result<Vec<f64>, NetworkError> {
        self.resolve(overrides, |r| &r.delay, "delay")
    }

    fn resolve(
        &self,
        overrides: &HashMap<String, f64>,
        pick: impl Fn(&Reaction) -> &Binding,
        what: &'static str,
    ) -> Result<Vec<f64>, NetworkError> {
        self.reactions
            .iter()
            .enumerate()
            .map(|(r, rx)| {
                let b = pick(rx);
                b.name
                    .as_ref()
                    .and_then(|n| overrides.get(n).copied())
                    .or(b.value)
                    .ok_or(NetworkError::MissingValue { reaction: r, what })
            })
            .collect()
    }

    /// Exact stoichiometric matrix rows, one per reaction.
    pub fn reaction_vectors(&self) -> Vec<Vec<Rational>> {
        let n = self.n_species();
        self.reactions.iter().map(|r| r.reaction_vector(n)).collect()
    }
}

/// Numeric assignment used by every matrix evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalContext {
    pub x: Vec<f64>,
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    pub lambda: Option<Complex64>,
}

impl EvalContext {
    pub fn new(net: &ReactionNetwork, x: Vec<f64>, kappa: Vec<f64>) -> Result<Self, NetworkError> {
        check_vec("x", &x, net.n_species(), |v| v > 0.0)?;
        check_vec("kappa", &kappa, net.n_reactions(), |v| v > 0.0)?;
        Ok(Self { x, kappa, tau: vec![0.0; net.n_reactions()], lambda: None })
    }

    pub fn with_tau(mut self, tau: Vec<f64>) -> Result<Self, NetworkError> {
        check_vec("tau", &tau, self.kappa.len(), |v| v >= 0.0)?;
        self.tau = tau;
        Ok(self)
    }

    pub fn with_lambda(mut self, lambda: Complex64) -> Self {
        self.lambda = Some(lambda);
        self
    }
}

fn check_vec(
    what: &'static str,
    v: &[f64],
    expected: usize,
    ok: impl Fn(f64) -> bool,
) -> Result<(), NetworkError> {
    if v.len() != expected {
        return Err(NetworkError::LengthMismatch { what, got: v.len(), expected });
    }
    match v.iter().position(|&a| !(a.is_finite() && ok(a))) {
        Some(index) => Err(NetworkError::OutOfRange { what, index, value: v[index] }),
        None => Ok(()),
    }
}
