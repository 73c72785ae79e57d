use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::netcore::{CompiledNetwork, ReactionNetwork};

pub const POSITIVITY_TOLERANCE: f64 = -1e-9;
const BREAKPOINT_DEPTH: usize = 5;
const MAX_BREAKPOINTS: usize = 100_000;
const PROVISIONAL_ITERATIONS: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("species {species} reached {value:e} at t = {t}, below the positivity tolerance")]
    Negativity { t: f64, species: usize, value: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

/// Initial data on `[-max tau, 0]`.
#[derive(Clone)]
pub enum History {
    Constant(Vec<f64>),
    Function(Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>),
}

impl History {
    pub fn function(f: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static) -> Self {
        History::Function(Arc::new(f))
    }

    pub fn at(&self, t: f64) -> Vec<f64> {
        match self {
            History::Constant(v) => v.clone(),
            History::Function(f) => f(t),
        }
    }
}

impl std::fmt::Debug for History {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            History::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            History::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// Stored solution: grid times, states, and derivatives for cubic Hermite
/// interpolation between grid points.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub derivs: Vec<Vec<f64>>,
    pub dt: f64,
    pub method: &'static str,
}

pub(crate) fn hermite(t0: f64, x0: &[f64], f0: &[f64], t1: f64, x1: &[f64], f1: &[f64], s: f64, out: &mut [f64]) {
    let h = t1 - t0;
    let th = (s - t0) / h;
    let th2 = th * th;
    let th3 = th2 * th;
    let h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
    let h10 = th3 - 2.0 * th2 + th;
    let h01 = -2.0 * th3 + 3.0 * th2;
    let h11 = th3 - th2;
    for i in 0..out.len() {
        out[i] = h00 * x0[i] + h10 * h * f0[i] + h01 * x1[i] + h11 * h * f1[i];
    }
}

impl Trajectory {
    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one point")
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least one point")
    }

    /// State at `t` within the grid range, by cubic Hermite interpolation.
    pub fn interpolate(&self, t: f64) -> Option<Vec<f64>> {
        let (first, last) = (self.times[0], self.final_time());
        if !(first..=last).contains(&t) {
            return None;
        }
        let i = match self.times.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(i) => return Some(self.states[i].clone()),
            Err(i) => i - 1,
        };
        let mut out = vec![0.0; self.states[i].len()];
        hermite(
            self.times[i],
            &self.states[i],
            &self.derivs[i],
            self.times[i + 1],
            &self.states[i + 1],
            &self.derivs[i + 1],
            t,
            &mut out,
        );
        Some(out)
    }

    pub fn min_state(&self) -> f64 {
        self.states.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// CSV with a `t` column followed by one column per species.
    pub fn to_csv(&self, names: &[String]) -> String {
        let mut out = String::from("t");
        for n in names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{t}");
            for v in x {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Method-of-steps integrator for the delay mass-action system.
///
/// Steps are classical RK4 with base size `dt`, shortened to land on every
/// point `sum_k m_k tau_k` up to a fixed depth. Delayed states come from the
/// stored solution through cubic Hermite interpolation; a delay shorter than
/// the current step reads a provisional interpolant of that step, refined by
/// fixed-point iteration.
pub struct DdeIntegrator {
    c: CompiledNetwork,
    kappa: Vec<f64>,
    tau: Vec<f64>,
    history: History,
    dt: f64,
    times: VecDeque<f64>,
    states: VecDeque<Vec<f64>>,
    derivs: VecDeque<Vec<f64>>,
    breakpoints: Vec<f64>,
    breakpoint_horizon: f64,
    window: Option<f64>,
    steps: usize,
}

struct Provisional {
    x1: Vec<f64>,
    f1: Vec<f64>,
    h: f64,
}

impl DdeIntegrator {
    pub fn new(net: &ReactionNetwork, kappa: &[f64], tau: &[f64], history: History, dt: f64) -> Result<Self, SimError> {
        let c = CompiledNetwork::new(net);
        if kappa.len() != c.n_reactions() || tau.len() != c.n_reactions() {
            return Err(SimError::InvalidInput("kappa and tau must have one entry per reaction".into()));
        }
        if kappa.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            return Err(SimError::InvalidInput("rate constants must be positive".into()));
        }
        if tau.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(SimError::InvalidInput("delays must be nonnegative".into()));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SimError::InvalidInput("dt must be positive".into()));
        }
        let x0 = history.at(0.0);
        if x0.len() != c.n || x0.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(SimError::InvalidInput("history must be a positive vector with one entry per species".into()));
        }
        let mut me = Self {
            c,
            kappa: kappa.to_vec(),
            tau: tau.to_vec(),
            history,
            dt,
            times: VecDeque::new(),
            states: VecDeque::new(),
            derivs: VecDeque::new(),
            breakpoints: Vec::new(),
            breakpoint_horizon: 0.0,
            window: None,
            steps: 0,
        };
        let f0 = me.rhs(0.0, &x0, None);
        me.times.push_back(0.0);
        me.states.push_back(x0);
        me.derivs.push_back(f0);
        Ok(me)
    }

    /// Keep only the stored points needed by the delays (plus `extra` time).
    pub fn with_window(mut self, extra: f64) -> Self {
        self.window = Some(extra.max(0.0));
        self
    }

    pub fn time(&self) -> f64 {
        *self.times.back().expect("nonempty")
    }

    pub fn state(&self) -> &[f64] {
        self.states.back().expect("nonempty")
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn max_delay(&self) -> f64 {
        self.tau.iter().copied().fold(0.0, f64::max)
    }

    pub fn into_trajectory(self) -> Trajectory {
        Trajectory {
            times: self.times.into(),
            states: self.states.into(),
            derivs: self.derivs.into(),
            dt: self.dt,
            method: "method of steps, RK4 with cubic Hermite history",
        }
    }

    fn ensure_breakpoints(&mut self, horizon: f64) {
        if horizon <= self.breakpoint_horizon {
            return;
        }
        let horizon = horizon.max(2.0 * self.breakpoint_horizon);
        let mut delays: Vec<f64> = self.tau.iter().copied().filter(|t| *t > 0.0).collect();
        delays.sort_by(f64::total_cmp);
        delays.dedup();
        let mut all = vec![0.0];
        let mut level = vec![0.0];
        for _ in 0..BREAKPOINT_DEPTH {
            let mut next: Vec<f64> = level
                .iter()
                .flat_map(|b| delays.iter().map(move |d| b + d))
                .filter(|v| *v <= horizon)
                .collect();
            next.sort_by(f64::total_cmp);
            next.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
            all.extend(&next);
            level = next;
            if all.len() > MAX_BREAKPOINTS || level.is_empty() {
                break;
            }
        }
        all.sort_by(f64::total_cmp);
        all.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
        all.truncate(MAX_BREAKPOINTS);
        self.breakpoints = all;
        self.breakpoint_horizon = horizon;
    }

    /// State at a time not later than the current step start, or inside the
    /// step being taken via the provisional interpolant.
    fn lookup(&self, s: f64, prov: Option<&Provisional>, out: &mut [f64]) {
        let t_now = self.time();
        if s > t_now {
            let x0 = self.state();
            let f0 = self.derivs.back().expect("nonempty");
            match prov {
                Some(p) => hermite(t_now, x0, f0, t_now + p.h, &p.x1, &p.f1, s, out),
                None => {
                    for i in 0..out.len() {
                        out[i] = x0[i] + (s - t_now) * f0[i];
                    }
                }
            }
            return;
        }
        if s < 0.0 {
            out.copy_from_slice(&self.history.at(s));
            return;
        }
        if s <= self.times[0] {
            out.copy_from_slice(&self.states[0]);
            return;
        }
        let i = match self.times.binary_search_by(|p| p.total_cmp(&s)) {
            Ok(i) => {
                out.copy_from_slice(&self.states[i]);
                return;
            }
            Err(i) => i - 1,
        };
        hermite(
            self.times[i],
            &self.states[i],
            &self.derivs[i],
            self.times[i + 1],
            &self.states[i + 1],
            &self.derivs[i + 1],
            s,
            out,
        );
    }

    /// Right-hand side at time `t` with current state `x`; returns whether
    /// any delayed read fell inside the current step.
    fn rhs_flagged(&self, t: f64, x: &[f64], prov: Option<&Provisional>, out: &mut [f64]) -> bool {
        let c = &self.c;
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut past = vec![0.0; c.n];
        let t_now = self.times.back().copied().unwrap_or(0.0);
        let mut in_step = false;
        for r in 0..c.n_reactions() {
            let consumed = self.kappa[r] * c.monomial(r, x);
            for &(s, y) in &c.reactants[r] {
                out[s] -= consumed * y;
            }
            let produced = if self.tau[r] == 0.0 {
                consumed
            } else {
                let s = t - self.tau[r];
                if s > t_now {
                    in_step = true;
                }
                if self.times.is_empty() {
                    past.copy_from_slice(&self.history.at(s));
                } else {
                    self.lookup(s, prov, &mut past);
                }
                self.kappa[r] * c.monomial(r, &past)
            };
            for &(s, y) in &c.products[r] {
                out[s] += produced * y;
            }
        }
        in_step
    }

    fn rhs(&self, t: f64, x: &[f64], prov: Option<&Provisional>) -> Vec<f64> {
        let mut out = vec![0.0; self.c.n];
        self.rhs_flagged(t, x, prov, &mut out);
        out
    }

    fn step(&mut self, h: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.c.n;
        let t = self.time();
        let x = self.state().to_vec();
        let k1 = self.derivs.back().expect("nonempty").clone();
        let (mut k2, mut k3, mut k4, mut f1) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mut tmp = vec![0.0; n];
        let mut x1 = vec![0.0; n];
        let mut prov: Option<Provisional> = None;
        for _ in 0..PROVISIONAL_ITERATIONS {
            let p = prov.as_ref();
            (0..n).for_each(|i| tmp[i] = x[i] + 0.5 * h * k1[i]);
            let mut inside = self.rhs_flagged(t + 0.5 * h, &tmp, p, &mut k2);
            (0..n).for_each(|i| tmp[i] = x[i] + 0.5 * h * k2[i]);
            inside |= self.rhs_flagged(t + 0.5 * h, &tmp, p, &mut k3);
            (0..n).for_each(|i| tmp[i] = x[i] + h * k3[i]);
            inside |= self.rhs_flagged(t + h, &tmp, p, &mut k4);
            let prev = x1.clone();
            (0..n).for_each(|i| x1[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
            inside |= self.rhs_flagged(t + h, &x1, p, &mut f1);
            if !inside {
                break;
            }
            let change = prev.iter().zip(&x1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let scale = x1.iter().map(|v| v.abs()).fold(1.0, f64::max);
            if prov.is_some() && change <= 1e-15 * scale {
                break;
            }
            prov = Some(Provisional { x1: x1.clone(), f1: f1.clone(), h });
        }
        (x1, f1)
    }

    /// Integrates up to time `t_end`.
    pub fn advance_to(&mut self, t_end: f64) -> Result<(), SimError> {
        self.ensure_breakpoints(t_end);
        let tol = 1e-9 * self.dt;
        let mut bp_idx = self.breakpoints.partition_point(|&b| b <= self.time() + tol);
        while self.time() < t_end - tol {
            let t = self.time();
            while bp_idx < self.breakpoints.len() && self.breakpoints[bp_idx] <= t + tol {
                bp_idx += 1;
            }
            let mut target = t + self.dt;
            if let Some(&bp) = self.breakpoints.get(bp_idx) {
                if target >= bp - tol {
                    target = bp;
                }
            }
            if target >= t_end - tol {
                target = t_end;
            }
            let (x1, f1) = self.step(target - t);
            if x1.iter().any(|v| !v.is_finite()) {
                return Err(SimError::NonFinite { t: target });
            }
            if let Some((i, &v)) = x1.iter().enumerate().find(|(_, v)| **v < POSITIVITY_TOLERANCE) {
                return Err(SimError::Negativity { t: target, species: i, value: v });
            }
            self.times.push_back(target);
            self.states.push_back(x1);
            self.derivs.push_back(f1);
            self.steps += 1;
            if let Some(extra) = self.window {
                let keep_from = target - self.max_delay() - extra - 2.0 * self.dt;
                while self.times.len() > 2 && self.times[1] < keep_from {
                    self.times.pop_front();
                    self.states.pop_front();
                    self.derivs.pop_front();
                }
            }
        }
        Ok(())
    }
}

pub fn simulate_dde(
    net: &ReactionNetwork,
    kappa: &[f64],
    tau: &[f64],
    history: History,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, SimError> {
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(SimError::InvalidInput("t_end must be nonnegative".into()));
    }
    let mut integ = DdeIntegrator::new(net, kappa, tau, history, dt)?;
    integ.advance_to(t_end)?;
    Ok(integ.into_trajectory())
}
