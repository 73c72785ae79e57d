use nalgebra::DMatrix;
use num::complex::Complex64;

use crate::modnet::{build_modified_network, evaluate_modified_rates};
use crate::netcore::{power, CompiledNetwork, EvalContext, ReactionNetwork};

/// `d x^y / d x_j = y_j x^{y - e_j}`, zero when `y_j = 0`.
pub(crate) fn monomial_partial(terms: &[(usize, f64)], x: &[f64], j: usize) -> f64 {
    let Some(&(_, yj)) = terms.iter().find(|&&(s, _)| s == j) else {
        return 0.0;
    };
    let mut v = yj;
    for &(s, c) in terms {
        v *= if s == j { power(x[s], c - 1.0) } else { power(x[s], c) };
    }
    v
}

/// Visits every nonzero `kappa_r d x^{y_r}/d x_j` as `(r, j, value)`.
fn for_each_partial(c: &CompiledNetwork, ctx: &EvalContext, mut f: impl FnMut(usize, usize, f64)) {
    for r in 0..c.n_reactions() {
        for &(j, _) in &c.reactants[r] {
            let d = ctx.kappa[r] * monomial_partial(&c.reactants[r], &ctx.x, j);
            f(r, j, d);
        }
    }
}

pub fn jacobian(net: &ReactionNetwork, ctx: &EvalContext) -> DMatrix<f64> {
    jacobian_compiled(&CompiledNetwork::new(net), ctx)
}

pub(crate) fn jacobian_compiled(c: &CompiledNetwork, ctx: &EvalContext) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(c.n, c.n);
    for_each_partial(c, ctx, |r, j, d| {
        for &(i, p) in &c.products[r] {
            m[(i, j)] += d * p;
        }
        for &(i, y) in &c.reactants[r] {
            m[(i, j)] -= d * y;
        }
    });
    m
}

/// `J_lambda`; a missing `ctx.lambda` is read as zero.
pub fn jlambda(net: &ReactionNetwork, ctx: &EvalContext) -> DMatrix<Complex64> {
    let c = CompiledNetwork::new(net);
    let lambda = ctx.lambda.unwrap_or_default();
    let mut m = DMatrix::from_element(c.n, c.n, Complex64::new(0.0, 0.0));
    for_each_partial(&c, ctx, |r, j, d| {
        let lag = if ctx.tau[r] == 0.0 { Complex64::new(1.0, 0.0) } else { (-lambda * ctx.tau[r]).exp() };
        for &(i, p) in &c.products[r] {
            m[(i, j)] += lag * (d * p);
        }
        for &(i, y) in &c.reactants[r] {
            m[(i, j)] -= d * y;
        }
    });
    m
}

pub fn modified_jacobian(net: &ReactionNetwork, ctx: &EvalContext) -> DMatrix<f64> {
    modified_jacobian_compiled(&CompiledNetwork::new(net), ctx)
}

pub(crate) fn modified_jacobian_compiled(c: &CompiledNetwork, ctx: &EvalContext) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(c.n, c.n);
    for_each_partial(c, ctx, |r, j, d| {
        for &(i, p) in &c.products[r] {
            m[(i, j)] += d * p;
        }
        for &(i, y) in &c.reactants[r] {
            if i == j {
                m[(i, j)] -= d * y;
            } else {
                m[(i, j)] += d * y;
            }
        }
    });
    m
}

/// `det(J_lambda - lambda I)` at the given point.
pub fn char_fn(net: &ReactionNetwork, x_star: &[f64], kappa: &[f64], tau: &[f64], lambda: Complex64) -> Complex64 {
    CharacteristicFunction::new(net, x_star, kappa, tau).eval(lambda)
}

/// The characteristic function with its delay-independent parts precomputed.
#[derive(Clone, Debug)]
pub struct CharacteristicFunction {
    n: usize,
    base: DMatrix<f64>,
    delayed: Vec<(f64, DMatrix<f64>)>,
}

impl CharacteristicFunction {
    pub fn new(net: &ReactionNetwork, x_star: &[f64], kappa: &[f64], tau: &[f64]) -> Self {
        let c = CompiledNetwork::new(net);
        let n = c.n;
        let mut base = DMatrix::zeros(n, n);
        let mut delayed: Vec<(f64, DMatrix<f64>)> = Vec::new();
        for r in 0..c.n_reactions() {
            for &(j, _) in &c.reactants[r] {
                let d = kappa[r] * monomial_partial(&c.reactants[r], x_star, j);
                for &(i, y) in &c.reactants[r] {
                    base[(i, j)] -= d * y;
                }
                let target = if tau[r] == 0.0 {
                    &mut base
                } else {
                    let pos = match delayed.iter().position(|(t, _)| *t == tau[r]) {
                        Some(p) => p,
                        None => {
                            delayed.push((tau[r], DMatrix::zeros(n, n)));
                            delayed.len() - 1
                        }
                    };
                    &mut delayed[pos].1
                };
                for &(i, p) in &c.products[r] {
                    target[(i, j)] += d * p;
                }
            }
        }
        Self { n, base, delayed }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn matrix(&self, lambda: Complex64) -> DMatrix<Complex64> {
        let mut m = self.base.map(|v| Complex64::new(v, 0.0));
        for (tau, p) in &self.delayed {
            let lag = (-lambda * *tau).exp();
            m.zip_apply(p, |a, b| *a += lag * b);
        }
        for i in 0..self.n {
            m[(i, i)] -= lambda;
        }
        m
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        if self.n == 0 {
            return Complex64::new(1.0, 0.0);
        }
        self.matrix(lambda).determinant()
    }
}

/// `max |J~(x*, kappa) - J_mod(x*; kappa~)|` over all entries.
pub fn verify_modified_correspondence(net: &ReactionNetwork, kappa: &[f64], x_star: &[f64]) -> f64 {
    let m = build_modified_network(net);
    let kt = evaluate_modified_rates(&m, kappa, x_star);
    let orig = CompiledNetwork::new(net);
    let modc = CompiledNetwork::new(&m.network);
    let ctx_o = ctx_unchecked(x_star, kappa);
    let ctx_m = ctx_unchecked(x_star, &kt);
    let a = modified_jacobian_compiled(&orig, &ctx_o);
    let b = jacobian_compiled(&modc, &ctx_m);
    (a - b).amax()
}

pub(crate) fn ctx_unchecked(x: &[f64], kappa: &[f64]) -> EvalContext {
    EvalContext { x: x.to_vec(), kappa: kappa.to_vec(), tau: vec![0.0; kappa.len()], lambda: None }
}
