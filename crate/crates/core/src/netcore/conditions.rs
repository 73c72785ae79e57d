use num::{Signed, Zero};

use super::network::{FlowClass, ReactionNetwork};
use crate::exact::{determinant, Rational};

pub const DEFAULT_SUBSET_BUDGET: u64 = 1_000_000;

/// What a structural check points at when it fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Species(usize),
    Reaction(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionCheck {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl ConditionCheck {
    fn from_failure(failure: Option<Witness>) -> Self {
        Self { holds: failure.is_none(), witness: failure }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum N1Prime {
    Satisfied { subset: Vec<usize>, product: Rational },
    Unsatisfied { subsets_checked: u64 },
    Undecided { budget: u64 },
}

impl N1Prime {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, N1Prime::Satisfied { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub n1: ConditionCheck,
    pub n2: ConditionCheck,
    pub n3: ConditionCheck,
    pub n4: ConditionCheck,
    pub n1_prime: N1Prime,
}

impl ConditionReport {
    pub fn n2_to_n4(&self) -> bool {
        self.n2.holds && self.n3.holds && self.n4.holds
    }

    pub fn outflow_condition(&self) -> bool {
        self.n1.holds || self.n1_prime.is_satisfied()
    }
}

pub fn check_structural_conditions(net: &ReactionNetwork) -> ConditionReport {
    check_structural_conditions_with_budget(net, DEFAULT_SUBSET_BUDGET)
}

pub fn check_structural_conditions_with_budget(net: &ReactionNetwork, budget: u64) -> ConditionReport {
    let rx = net.reactions();
    let n1 = (0..net.n_species())
        .find(|&s| {
            !rx.iter().any(|r| {
                r.classify_flow() == FlowClass::GeneralizedOutflow && r.reactant.contains(s)
            })
        })
        .map(Witness::Species);
    let n2 = rx.iter().position(|r| r.is_one_step_catalysis()).map(Witness::Reaction);
    let n3 = rx.iter().position(|r| r.reactant.support_len() > 2).map(Witness::Reaction);
    let n4 = (0..rx.len())
        .find(|&r| net.is_reversible(r) && rx[r].is_bispecies())
        .map(Witness::Reaction);
    ConditionReport {
        n1: ConditionCheck::from_failure(n1),
        n2: ConditionCheck::from_failure(n2),
        n3: ConditionCheck::from_failure(n3),
        n4: ConditionCheck::from_failure(n4),
        n1_prime: search_n1_prime(net, budget),
    }
}

/// `det(y_1..y_n) * det(y_1 - y'_1 .. y_n - y'_n)` for the chosen reactions.
pub fn n1_prime_determinant_product(net: &ReactionNetwork, subset: &[usize]) -> Rational {
    let n = net.n_species();
    let ys: Vec<Vec<Rational>> = subset.iter().map(|&r| net.reaction(r).reactant.to_dense(n)).collect();
    let diffs: Vec<Vec<Rational>> = subset
        .iter()
        .map(|&r| {
            let rx = net.reaction(r);
            (0..n).map(|i| rx.reactant.coeff(i) - rx.product.coeff(i)).collect()
        })
        .collect();
    determinant(&transpose(&ys)) * determinant(&transpose(&diffs))
}

fn transpose(cols: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = cols.len();
    (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
}

fn search_n1_prime(net: &ReactionNetwork, budget: u64) -> N1Prime {
    let n = net.n_species();
    let test = |subset: &[usize]| {
        let p = n1_prime_determinant_product(net, subset);
        p.is_positive().then_some(p)
    };
    let outflows: Option<Vec<usize>> = (0..n)
        .map(|s| {
            net.reactions().iter().position(|r| {
                r.classify_flow() == FlowClass::GeneralizedOutflow && r.reactant.contains(s)
            })
        })
        .collect();
    if let Some(subset) = outflows {
        if let Some(product) = test(&subset) {
            return N1Prime::Satisfied { subset, product };
        }
    }
    let candidates: Vec<usize> = (0..net.n_reactions())
        .filter(|&r| !net.reaction(r).reactant.is_zero())
        .collect();
    if candidates.len() < n {
        return N1Prime::Unsatisfied { subsets_checked: 0 };
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut checked = 0u64;
    loop {
        if checked >= budget {
            return N1Prime::Undecided { budget };
        }
        checked += 1;
        let subset: Vec<usize> = idx.iter().map(|&k| candidates[k]).collect();
        let ys: Vec<Vec<Rational>> = subset.iter().map(|&r| net.reaction(r).reactant.to_dense(n)).collect();
        if !determinant(&ys).is_zero() {
            if let Some(product) = test(&subset) {
                return N1Prime::Satisfied { subset, product };
            }
        }
        if !next_combination(&mut idx, candidates.len()) {
            return N1Prime::Unsatisfied { subsets_checked: checked };
        }
    }
}

fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    let Some(pos) = (0..k).rev().find(|&i| idx[i] < m - k + i) else {
        return false;
    };
    idx[pos] += 1;
    for j in pos + 1..k {
        idx[j] = idx[j - 1] + 1;
    }
    true
}
