use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::jacobian::jacobian_compiled;
use crate::netcore::{CompiledNetwork, EvalContext, NetworkError, ReactionNetwork};

const MAX_RELAX_STEPS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriumError {
    #[error("Newton iteration did not converge after {iterations} iterations (relative residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("Jacobian is singular at iteration {iteration}")]
    JacobianSingular { iteration: usize },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumOptions {
    pub max_iterations: usize,
    /// Converged when `|f_i| < tol * scale` for the flux scale of the state.
    pub tol: f64,
    /// Time horizon of the ODE relaxation used when Newton fails from `x0`.
    pub relax_time: f64,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        Self { max_iterations: 200, tol: 1e-12, relax_time: 200.0 }
    }
}

/// Largest total flux through any species, `max_i sum_r rate_r (y_ri + y'_ri)`.
pub fn flux_scale(c: &CompiledNetwork, kappa: &[f64], x: &[f64]) -> f64 {
    let mut s = vec![0.0; c.n];
    for r in 0..c.n_reactions() {
        let v = kappa[r] * c.monomial(r, x);
        for &(i, y) in c.reactants[r].iter().chain(&c.products[r]) {
            s[i] += v * y;
        }
    }
    s.into_iter().fold(0.0, f64::max)
}

/// Residual `max|f|` relative to the flux scale.
pub fn relative_residual(c: &CompiledNetwork, kappa: &[f64], x: &[f64]) -> f64 {
    let mut f = vec![0.0; c.n];
    c.rhs_into(kappa, x, &mut f);
    let norm = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = flux_scale(c, kappa, x);
    if scale > 0.0 { norm / scale } else { norm }
}

pub fn find_equilibrium(net: &ReactionNetwork, kappa: &[f64], x0: &[f64]) -> Result<Vec<f64>, EquilibriumError> {
    find_equilibrium_with(net, kappa, x0, &EquilibriumOptions::default())
}

/// Damped Newton iteration in logarithmic coordinates, which keeps every
/// iterate positive; falls back to ODE relaxation followed by Newton.
pub fn find_equilibrium_with(
    net: &ReactionNetwork,
    kappa: &[f64],
    x0: &[f64],
    opts: &EquilibriumOptions,
) -> Result<Vec<f64>, EquilibriumError> {
    EvalContext::new(net, x0.to_vec(), kappa.to_vec())?;
    let c = CompiledNetwork::new(net);
    match newton(&c, kappa, x0, opts) {
        Ok(x) => Ok(x),
        Err(first) => {
            let relaxed = relax(&c, kappa, x0, opts.relax_time);
            if relaxed.iter().all(|v| v.is_finite() && *v > 0.0 && *v <= 1e150) {
                newton(&c, kappa, &relaxed, opts).map_err(|_| first)
            } else {
                Err(first)
            }
        }
    }
}

fn newton(c: &CompiledNetwork, kappa: &[f64], x0: &[f64], opts: &EquilibriumOptions) -> Result<Vec<f64>, EquilibriumError> {
    let n = c.n;
    let mut x = x0.to_vec();
    let mut f = vec![0.0; n];
    let norm = |f: &[f64]| f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    c.rhs_into(kappa, &x, &mut f);
    let mut res = norm(&f);
    for it in 0..opts.max_iterations {
        let scale = flux_scale(c, kappa, &x).max(f64::MIN_POSITIVE);
        if res < opts.tol * scale {
            return Ok(x);
        }
        let ctx = EvalContext { x: x.clone(), kappa: kappa.to_vec(), tau: vec![0.0; kappa.len()], lambda: None };
        let j = jacobian_compiled(c, &ctx);
        let jl = DMatrix::from_fn(n, n, |a, b| j[(a, b)] * x[b]);
        let rhs = DVector::from_iterator(n, f.iter().map(|v| -v));
        let Some(du) = jl.lu().solve(&rhs) else {
            return Err(EquilibriumError::JacobianSingular { iteration: it });
        };
        if du.iter().any(|v| !v.is_finite()) {
            return Err(EquilibriumError::JacobianSingular { iteration: it });
        }
        let cap = du.amax().max(1e-300);
        let mut alpha: f64 = (2.0 / cap).min(1.0);
        let mut trial = vec![0.0; n];
        let mut ft = vec![0.0; n];
        let mut accepted = false;
        for _ in 0..60 {
            for k in 0..n {
                trial[k] = x[k] * (alpha * du[k]).exp();
            }
            c.rhs_into(kappa, &trial, &mut ft);
            let rt = norm(&ft);
            if rt.is_finite() && rt < (1.0 - 1e-4 * alpha) * res {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
        x.copy_from_slice(&trial);
        f.copy_from_slice(&ft);
        res = norm(&f);
    }
    let scale = flux_scale(c, kappa, &x).max(f64::MIN_POSITIVE);
    if res < opts.tol * scale {
        Ok(x)
    } else {
        Err(EquilibriumError::NonConvergence { iterations: opts.max_iterations, residual: res / scale })
    }
}

/// Classical RK4 integration of the ODE system from `x0` over `[0, t_end]`.
pub fn integrate_ode(c: &CompiledNetwork, kappa: &[f64], x0: &[f64], t_end: f64, dt: f64) -> Vec<f64> {
    let n = c.n;
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    while t < t_end - 1e-12 * t_end.max(1.0) {
        let h = dt.min(t_end - t);
        c.rhs_into(kappa, &x, &mut k1);
        (0..n).for_each(|i| tmp[i] = x[i] + 0.5 * h * k1[i]);
        c.rhs_into(kappa, &tmp, &mut k2);
        (0..n).for_each(|i| tmp[i] = x[i] + 0.5 * h * k2[i]);
        c.rhs_into(kappa, &tmp, &mut k3);
        (0..n).for_each(|i| tmp[i] = x[i] + h * k3[i]);
        c.rhs_into(kappa, &tmp, &mut k4);
        (0..n).for_each(|i| x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        t += h;
    }
    x
}

fn relax(c: &CompiledNetwork, kappa: &[f64], x0: &[f64], horizon: f64) -> Vec<f64> {
    let mut x = x0.to_vec();
    let mut t = 0.0;
    for _ in 0..MAX_RELAX_STEPS {
        if t >= horizon {
            break;
        }
        let ctx = EvalContext { x: x.clone(), kappa: kappa.to_vec(), tau: vec![0.0; kappa.len()], lambda: None };
        let j = jacobian_compiled(c, &ctx);
        let bound = (0..c.n).map(|i| j.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(1e-12, f64::max);
        let h = (0.5 / bound).min(1.0).min(horizon - t);
        x = integrate_ode(c, kappa, &x, h, h);
        if x.iter().any(|v| !v.is_finite() || *v <= 0.0 || *v > 1e150) {
            return x;
        }
        t += h;
    }
    x
}
