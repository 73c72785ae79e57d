use super::dde::{DdeIntegrator, History, SimError};
use crate::jacobian::monomial_partial;
use crate::netcore::{CompiledNetwork, ReactionNetwork};

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceOptions {
    /// Absolute tolerance on `max_i |x_i(T) - x*_i|`.
    pub tol: f64,
    pub t_initial: f64,
    pub t_cap: f64,
    /// Step size; `None` picks one from the linearization at `x*`.
    pub dt: Option<f64>,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self { tol: 1e-6, t_initial: 50.0, t_cap: 1e4, dt: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub t_final: f64,
    pub error: f64,
    pub dt: f64,
    pub steps: usize,
    /// Whether the error sampled over the second half of the run kept decreasing.
    pub monotone_tail: bool,
}

/// A step size of `min(0.05, 0.5 / L)` where `L` bounds the row sums of the
/// consumption and production parts of the Jacobian at `x`.
pub fn suggest_dt(net: &ReactionNetwork, kappa: &[f64], x: &[f64]) -> f64 {
    let c = CompiledNetwork::new(net);
    let mut rows = vec![0.0; c.n];
    for r in 0..c.n_reactions() {
        for &(j, _) in &c.reactants[r] {
            let d = (kappa[r] * monomial_partial(&c.reactants[r], x, j)).abs();
            for &(i, y) in c.reactants[r].iter().chain(&c.products[r]) {
                rows[i] += d * y;
            }
        }
    }
    let bound = rows.into_iter().fold(0.0, f64::max);
    if bound > 0.0 { (0.5 / bound).min(0.05) } else { 0.05 }
}

/// Integrates from `history` and doubles the horizon until the state is within
/// `tol` of `x_star` or the horizon cap is reached.
pub fn check_convergence(
    net: &ReactionNetwork,
    kappa: &[f64],
    tau: &[f64],
    x_star: &[f64],
    history: History,
    opts: &ConvergenceOptions,
) -> Result<ConvergenceReport, SimError> {
    let dt = opts.dt.unwrap_or_else(|| suggest_dt(net, kappa, x_star));
    let mut integ = DdeIntegrator::new(net, kappa, tau, history, dt)?.with_window(0.0);
    let dist = |x: &[f64]| x.iter().zip(x_star).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let mut horizon = opts.t_initial.max(dt);
    let mut samples: Vec<(f64, f64)> = Vec::new();
    loop {
        let start = integ.time();
        let chunks = 64;
        for k in 1..=chunks {
            integ.advance_to(start + (horizon - start) * k as f64 / chunks as f64)?;
            samples.push((integ.time(), dist(integ.state())));
        }
        let error = dist(integ.state());
        if error < opts.tol || horizon >= opts.t_cap {
            let half = horizon / 2.0;
            let tail: Vec<f64> = samples.iter().filter(|(t, _)| *t >= half).map(|&(_, e)| e).collect();
            let monotone_tail = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-15);
            return Ok(ConvergenceReport {
                converged: error < opts.tol,
                t_final: integ.time(),
                error,
                dt,
                steps: integ.steps(),
                monotone_tail,
            });
        }
        horizon = (horizon * 2.0).min(opts.t_cap);
    }
}
