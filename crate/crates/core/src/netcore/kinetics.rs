use super::network::{EvalContext, NetworkError, ReactionNetwork};
use crate::exact::rank;

/// Floating-point view of a network's stoichiometry, shared by the numeric modules.
#[derive(Clone, Debug)]
pub struct CompiledNetwork {
    pub n: usize,
    pub reactants: Vec<Vec<(usize, f64)>>,
    pub products: Vec<Vec<(usize, f64)>>,
}

impl CompiledNetwork {
    pub fn new(net: &ReactionNetwork) -> Self {
        Self {
            n: net.n_species(),
            reactants: net.reactions().iter().map(|r| r.reactant.to_f64_terms()).collect(),
            products: net.reactions().iter().map(|r| r.product.to_f64_terms()).collect(),
        }
    }

    pub fn n_reactions(&self) -> usize {
        self.reactants.len()
    }

    /// `x^y` for reaction `r`'s reactant complex.
    pub fn monomial(&self, r: usize, x: &[f64]) -> f64 {
        monomial(&self.reactants[r], x)
    }

    /// Reaction rates `kappa_r x^{y_r}`.
    pub fn rates(&self, kappa: &[f64], x: &[f64]) -> Vec<f64> {
        (0..self.n_reactions()).map(|r| kappa[r] * self.monomial(r, x)).collect()
    }

    pub fn rhs_into(&self, kappa: &[f64], x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..self.n_reactions() {
            let v = kappa[r] * self.monomial(r, x);
            for &(s, c) in &self.products[r] {
                out[s] += v * c;
            }
            for &(s, c) in &self.reactants[r] {
                out[s] -= v * c;
            }
        }
    }
}

pub fn monomial(terms: &[(usize, f64)], x: &[f64]) -> f64 {
    terms.iter().map(|&(s, c)| power(x[s], c)).product()
}

pub(crate) fn power(base: f64, exp: f64) -> f64 {
    if exp == exp.trunc() && exp.abs() <= 64.0 {
        base.powi(exp as i32)
    } else {
        base.powf(exp)
    }
}

/// `sum_r kappa_r x^{y_r} (y'_r - y_r)`.
pub fn mass_action_rhs(net: &ReactionNetwork, ctx: &EvalContext) -> Vec<f64> {
    let c = CompiledNetwork::new(net);
    let mut out = vec![0.0; c.n];
    c.rhs_into(&ctx.kappa, &ctx.x, &mut out);
    out
}

/// Delay mass-action right-hand side at time `t`, reading past states from `history`.
///
/// The current state is `history(t)`; reaction `r` produces at the rate it
/// consumed `tau_r` time units earlier.
pub fn delay_rhs<H>(net: &ReactionNetwork, history: H, t: f64, ctx: &EvalContext) -> Result<Vec<f64>, NetworkError>
where
    H: Fn(f64) -> Option<Vec<f64>>,
{
    let c = CompiledNetwork::new(net);
    let now = history(t).ok_or(NetworkError::HistoryOutOfDomain(t))?;
    let mut out = vec![0.0; c.n];
    for r in 0..c.n_reactions() {
        let consumed = ctx.kappa[r] * c.monomial(r, &now);
        let produced = if ctx.tau[r] == 0.0 {
            consumed
        } else {
            let s = t - ctx.tau[r];
            let past = history(s).ok_or(NetworkError::HistoryOutOfDomain(s))?;
            ctx.kappa[r] * c.monomial(r, &past)
        };
        for &(s, y) in &c.products[r] {
            out[s] += produced * y;
        }
        for &(s, y) in &c.reactants[r] {
            out[s] -= consumed * y;
        }
    }
    Ok(out)
}

/// Dimension of the span of all reaction vectors, computed exactly.
pub fn stoichiometric_subspace_rank(net: &ReactionNetwork) -> usize {
    rank(&net.reaction_vectors())
}
