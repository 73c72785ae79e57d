use thiserror::Error;

use super::complex::Complex;
use super::network::{Binding, NetworkError, Reaction, ReactionNetwork};
use crate::exact::{int, Rational};
use num::Signed;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CstKind {
    Sequestration,
    Transmutation,
}

#[derive(Debug, Error)]
pub enum CstError {
    #[error("kinds, a and b must share a length of at least 2 (got {kinds}, {a}, {b})")]
    LengthMismatch { kinds: usize, a: usize, b: usize },
    #[error("coefficient {0} is not positive")]
    NonPositive(usize),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Cyclic sequestration-transmutation network on species `X1..Xn`.
///
/// Reaction `i` couples `a_i X_i` with `b_{i+1} X_{i+1}` (indices cyclic).
/// With `fully_open`, every species also gets `0 -> X_i` and `X_i -> 0`,
/// listed after the cycle reactions as inflow, outflow per species.
pub fn make_cst_network(
    kinds: &[CstKind],
    a: &[Rational],
    b: &[Rational],
    fully_open: bool,
) -> Result<ReactionNetwork, CstError> {
    let n = kinds.len();
    if n < 2 || a.len() != n || b.len() != n {
        return Err(CstError::LengthMismatch { kinds: n, a: a.len(), b: b.len() });
    }
    if let Some(i) = a.iter().chain(b).position(|c| !c.is_positive()) {
        return Err(CstError::NonPositive(i));
    }
    let species: Vec<String> = (1..=n).map(|i| format!("X{i}")).collect();
    let mut reactions = Vec::new();
    for i in 0..n {
        let next = (i + 1) % n;
        let left = Complex::single(i, a[i].clone());
        let right = Complex::single(next, b[next].clone());
        let (reactant, product) = match kinds[i] {
            CstKind::Sequestration => (left.plus(&right), Complex::zero()),
            CstKind::Transmutation => (left, right),
        };
        reactions.push(Reaction::new(reactant, product).with_rate(Binding::symbol(format!("k{}", i + 1))));
    }
    if fully_open {
        for (i, name) in species.iter().enumerate() {
            let x = Complex::single(i, int(1));
            reactions.push(Reaction::new(Complex::zero(), x.clone()).with_rate(Binding::symbol(format!("kin_{name}"))));
            reactions.push(Reaction::new(x, Complex::zero()).with_rate(Binding::symbol(format!("kout_{name}"))));
        }
    }
    Ok(ReactionNetwork::new(species, reactions)?)
}
