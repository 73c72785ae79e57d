//! Reaction networks, structural predicates and mass-action right-hand sides.

mod complex;
mod conditions;
mod cst;
mod kinetics;
mod network;

pub use complex::{Complex, ComplexDisplay};
pub use conditions::{
    check_structural_conditions, check_structural_conditions_with_budget, n1_prime_determinant_product,
    ConditionCheck, ConditionReport, N1Prime, Witness, DEFAULT_SUBSET_BUDGET,
};
pub use cst::{make_cst_network, CstError, CstKind};
pub use kinetics::{delay_rhs, mass_action_rhs, monomial, stoichiometric_subspace_rank, CompiledNetwork};
pub use network::{
    Binding, DelayBinding, EvalContext, FlowClass, NetworkError, Origin, RateBinding, Reaction, ReactionNetwork,
    Species,
};

pub(crate) use kinetics::power;
