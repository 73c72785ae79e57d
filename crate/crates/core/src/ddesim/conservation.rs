use thiserror::Error;

use super::dde::{hermite, History, Trajectory};
use crate::exact::{nullspace, rank, to_f64};
use crate::netcore::{CompiledNetwork, ReactionNetwork};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConservationError {
    #[error("the reaction vectors span the whole space; there is no conservation relation")]
    FullRank,
    #[error("direction is not orthogonal to reaction {reaction} (inner product {value:e})")]
    NotOrthogonal { reaction: usize, value: f64 },
    #[error("direction has length {got}, expected {expected}")]
    Length { got: usize, expected: usize },
}

/// Basis of the orthogonal complement of the stoichiometric subspace.
pub fn conservation_directions(net: &ReactionNetwork) -> Vec<Vec<f64>> {
    nullspace(&net.reaction_vectors(), net.n_species())
        .iter()
        .map(|v| v.iter().map(to_f64).collect())
        .collect()
}

const GAUSS_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

fn gauss(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    GAUSS_NODES.iter().zip(GAUSS_WEIGHTS).map(|(&z, w)| w * f(m + r * z)).sum::<f64>() * r
}

/// Maximum drift over the grid of the delayed conservation quantity
/// `<w, x(t) + sum_r kappa_r (int_{t - tau_r}^t x(s)^{y_r} ds) y_r>`.
pub fn conservation_residual(
    net: &ReactionNetwork,
    kappa: &[f64],
    tau: &[f64],
    traj: &Trajectory,
    history: &History,
    direction: &[f64],
) -> Result<f64, ConservationError> {
    let n = net.n_species();
    if direction.len() != n {
        return Err(ConservationError::Length { got: direction.len(), expected: n });
    }
    if rank(&net.reaction_vectors()) == n {
        return Err(ConservationError::FullRank);
    }
    let wnorm = direction.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for (r, v) in net.reaction_vectors().iter().enumerate() {
        let dot: f64 = v.iter().zip(direction).map(|(q, w)| to_f64(q) * w).sum();
        if dot.abs() > 1e-12 * wnorm {
            return Err(ConservationError::NotOrthogonal { reaction: r, value: dot });
        }
    }
    let c = CompiledNetwork::new(net);
    let m = traj.times.len();
    let mut buf = vec![0.0; n];
    // Cumulative integral of each monomial along the stored solution.
    let mut cumulative = vec![vec![0.0; c.n_reactions()]; m];
    for k in 1..m {
        for r in 0..c.n_reactions() {
            let piece = gauss(traj.times[k - 1], traj.times[k], |s| {
                hermite(
                    traj.times[k - 1],
                    &traj.states[k - 1],
                    &traj.derivs[k - 1],
                    traj.times[k],
                    &traj.states[k],
                    &traj.derivs[k],
                    s,
                    &mut buf,
                );
                c.monomial(r, &buf)
            });
            cumulative[k][r] = cumulative[k - 1][r] + piece;
        }
    }
    let dt = traj.dt;
    let history_integral = |r: usize, a: f64| -> f64 {
        let pieces = ((-a) / dt).ceil().max(1.0) as usize;
        let h = -a / pieces as f64;
        (0..pieces)
            .map(|p| gauss(a + p as f64 * h, a + (p + 1) as f64 * h, |s| c.monomial(r, &history.at(s))))
            .sum()
    };
    // Integral of monomial r from 0 to s within the trajectory.
    let integral_to = |r: usize, s: f64, buf: &mut Vec<f64>| -> f64 {
        if s < 0.0 {
            return -history_integral(r, s);
        }
        let k = match traj.times.binary_search_by(|p| p.total_cmp(&s)) {
            Ok(k) => return cumulative[k][r],
            Err(k) => k - 1,
        };
        cumulative[k][r]
            + gauss(traj.times[k], s, |u| {
                hermite(
                    traj.times[k],
                    &traj.states[k],
                    &traj.derivs[k],
                    traj.times[k + 1],
                    &traj.states[k + 1],
                    &traj.derivs[k + 1],
                    u,
                    buf,
                );
                c.monomial(r, buf)
            })
    };
    let weights: Vec<f64> = (0..c.n_reactions())
        .map(|r| c.reactants[r].iter().map(|&(i, y)| direction[i] * y).sum())
        .collect();
    let quantity = |k: usize, buf: &mut Vec<f64>| -> f64 {
        let t = traj.times[k];
        let mut q: f64 = traj.states[k].iter().zip(direction).map(|(x, w)| x * w).sum();
        for r in 0..c.n_reactions() {
            if tau[r] > 0.0 && weights[r] != 0.0 {
                let window = cumulative[k][r] - integral_to(r, t - tau[r], buf);
                q += kappa[r] * window * weights[r];
            }
        }
        q
    };
    let mut work = vec![0.0; n];
    let q0 = quantity(0, &mut work);
    Ok((0..m).map(|k| (quantity(k, &mut work) - q0).abs()).fold(0.0, f64::max))
}
