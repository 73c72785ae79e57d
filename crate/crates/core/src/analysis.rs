//! End-to-end delay stability analysis of a network.
//!
//! [`analyze`] runs the structural conditions, builds the DSR graph, checks
//! the three cycle conditions and, whenever the structural preconditions
//! hold, recomputes the graph verdict independently on the modified network.
//! Optional numeric cross-checks sample principal minors, simulate the delay
//! system and scan characteristic roots.

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::ddesim::{
    check_convergence, find_equilibrium, scan_characteristic_roots, ConvergenceOptions, History, Rect,
    ScanOptions,
};
use crate::dsr::{
    build_dsr, build_phi, classify_cycle, delay_conditions_for, enumerate_cycles_with_budget, has_s_to_r_intersection,
    DelayConditions, DsrError, DsrGraph, OrientedCycle, DEFAULT_CYCLE_BUDGET,
};
use crate::exact::format_rational;
use crate::jacobian::{is_p0_sampled, p0_report_json, P0Options, P0Report, SamplingError};
use crate::modnet::{build_modified_network, ModifiedNetwork};
use crate::netcore::{
    check_structural_conditions_with_budget, stoichiometric_subspace_rank, ConditionCheck, ConditionReport, N1Prime,
    ReactionNetwork, Witness, DEFAULT_SUBSET_BUDGET,
};
use crate::random::{log_uniform_vec, stream_rng, uniform};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("graph verdict mismatch: modified graph gives {modified}, original graph gives {original}")]
    CrossCheckMismatch { modified: bool, original: bool },
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precondition {
    /// Neither N1 nor N1' holds.
    N1,
    N2,
    N3,
    N4,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotDecidedReason {
    N1PrimeBudget { budget: u64 },
    CycleBudget { budget: usize },
    BispeciesProductionEdgeCycle { cycle: Vec<String> },
    NonSCycle { cycle: Vec<String>, product: String },
    SToRIntersection { first: Vec<String>, second: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    DelayStable,
    NotDecided(NotDecidedReason),
    PreconditionFailed(Precondition),
}

impl Verdict {
    pub fn is_delay_stable(&self) -> bool {
        matches!(self, Verdict::DelayStable)
    }

    pub fn label(&self) -> String {
        match self {
            Verdict::DelayStable => "DelayStable".into(),
            Verdict::NotDecided(r) => format!("NotDecided({})", r.label()),
            Verdict::PreconditionFailed(p) => format!("PreconditionFailed({p:?})"),
        }
    }
}

impl NotDecidedReason {
    pub fn label(&self) -> &'static str {
        match self {
            NotDecidedReason::N1PrimeBudget { .. } => "N1PrimeBudget",
            NotDecidedReason::CycleBudget { .. } => "CycleBudget",
            NotDecidedReason::BispeciesProductionEdgeCycle { .. } => "BispeciesProductionEdgeCycle",
            NotDecidedReason::NonSCycle { .. } => "NonSCycle",
            NotDecidedReason::SToRIntersection { .. } => "SToRIntersection",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisOptions {
    /// Samples for the P0 scans of `-J` and `-J~`; zero disables them.
    pub numeric_samples: usize,
    /// Number of DDE convergence runs; zero disables them.
    pub simulations: usize,
    /// Characteristic-root scans, one per simulated parameter draw.
    pub root_scans: bool,
    pub seed: u64,
    pub cycle_budget: usize,
    pub subset_budget: u64,
    pub kappa_range: (f64, f64),
    pub tau_range: (f64, f64),
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            numeric_samples: 0,
            simulations: 0,
            root_scans: false,
            seed: 0,
            cycle_budget: DEFAULT_CYCLE_BUDGET,
            subset_budget: DEFAULT_SUBSET_BUDGET,
            kappa_range: (0.1, 10.0),
            tau_range: (0.0, 5.0),
        }
    }
}

/// Result of recomputing the graph verdict on the modified network.
#[derive(Clone, Debug, PartialEq)]
pub enum CrossCheck {
    Skipped(String),
    Agree { holds: bool, modified_cycles: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationRun {
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    pub converged: bool,
    pub error: f64,
    pub t_final: f64,
    pub winding: Option<i64>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NumericChecks {
    pub p0_jacobian: Option<P0Report>,
    pub p0_modified: Option<P0Report>,
    pub simulations: Vec<SimulationRun>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub species: Vec<String>,
    pub reactions: Vec<String>,
    pub rank: usize,
    pub conditions: ConditionReport,
    pub graph: Option<DsrGraph>,
    pub cycles: Vec<OrientedCycle>,
    pub delay_conditions: Option<DelayConditions>,
    pub modified: ModifiedNetwork,
    pub cross_check: CrossCheck,
    pub numeric: NumericChecks,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
}

fn cycle_names(g: &DsrGraph, c: &OrientedCycle) -> Vec<String> {
    c.vertices.iter().map(|&v| g.vertex_name(v)).collect()
}

/// Conditions (i) and (ii) on the modified graph, with its oriented cycle count.
fn modified_side(net: &ReactionNetwork, m: &ModifiedNetwork, budget: usize) -> Result<(bool, usize), DsrError> {
    let orig = build_dsr(net)?;
    let g = build_dsr(&m.network)?;
    build_phi(&orig, &g, m)?;
    let cycles = enumerate_cycles_with_budget(&g, budget)?;
    let all_s = cycles.iter().all(|c| classify_cycle(c).s_cycle);
    Ok((all_s && !has_s_to_r_intersection(&cycles), cycles.len()))
}

pub fn analyze(net: &ReactionNetwork, opts: &AnalysisOptions) -> Result<StabilityReport, AnalysisError> {
    let conditions = check_structural_conditions_with_budget(net, opts.subset_budget);
    let modified = build_modified_network(net);
    let rank = stoichiometric_subspace_rank(net);
    let mut warnings = Vec::new();
    if rank < net.n_species() {
        warnings.push(format!(
            "stoichiometric subspace has rank {rank} < {}; equilibria are not isolated and numeric checks of convergence are skipped",
            net.n_species()
        ));
    }
    let mut report = StabilityReport {
        species: net.species_names().to_vec(),
        reactions: (0..net.n_reactions()).map(|r| net.describe_reaction(r)).collect(),
        rank,
        conditions: conditions.clone(),
        graph: None,
        cycles: Vec::new(),
        delay_conditions: None,
        modified,
        cross_check: CrossCheck::Skipped("structural conditions N2-N4 do not all hold".into()),
        numeric: NumericChecks::default(),
        verdict: Verdict::DelayStable,
        warnings,
    };

    let precondition = if !conditions.n2.holds {
        Some(Precondition::N2)
    } else if !conditions.n3.holds {
        Some(Precondition::N3)
    } else if !conditions.n4.holds {
        Some(Precondition::N4)
    } else {
        None
    };

    let graph = match build_dsr(net) {
        Ok(g) => Some(g),
        Err(DsrError::OneStepCatalysis(_)) => None,
        Err(e) => return Err(AnalysisError::Internal(e.to_string())),
    };
    let mut cycle_overflow = false;
    if let Some(g) = &graph {
        match enumerate_cycles_with_budget(g, opts.cycle_budget) {
            Ok(c) => report.cycles = c,
            Err(DsrError::Overflow(_)) => cycle_overflow = true,
            Err(e) => return Err(AnalysisError::Internal(e.to_string())),
        }
        if !cycle_overflow {
            report.delay_conditions = Some(delay_conditions_for(&report.cycles));
        }
    }

    if precondition.is_none() {
        report.cross_check = match (&report.delay_conditions, modified_side(net, &report.modified, opts.cycle_budget)) {
            (Some(d), Ok((lhs, count))) => {
                if lhs != d.all_hold() {
                    return Err(AnalysisError::CrossCheckMismatch { modified: lhs, original: d.all_hold() });
                }
                CrossCheck::Agree { holds: lhs, modified_cycles: count }
            }
            (None, _) => CrossCheck::Skipped("cycle budget exceeded on the original graph".into()),
            (Some(_), Err(DsrError::Overflow(_))) => {
                CrossCheck::Skipped("cycle budget exceeded on the modified graph".into())
            }
            (Some(_), Err(e)) => return Err(AnalysisError::Internal(e.to_string())),
        };
    }

    report.verdict = if let Some(p) = precondition {
        Verdict::PreconditionFailed(p)
    } else if !conditions.n1.holds && !conditions.n1_prime.is_satisfied() {
        match conditions.n1_prime {
            N1Prime::Undecided { budget } => Verdict::NotDecided(NotDecidedReason::N1PrimeBudget { budget }),
            _ => Verdict::PreconditionFailed(Precondition::N1),
        }
    } else if cycle_overflow {
        Verdict::NotDecided(NotDecidedReason::CycleBudget { budget: opts.cycle_budget })
    } else {
        let g = graph.as_ref().ok_or_else(|| AnalysisError::Internal("DSR graph missing under N2".into()))?;
        let d = report.delay_conditions.as_ref().expect("conditions computed with the graph");
        let cyc = |i: usize| cycle_names(g, &report.cycles[i]);
        if let Some(i) = d.bpe_witness {
            Verdict::NotDecided(NotDecidedReason::BispeciesProductionEdgeCycle { cycle: cyc(i) })
        } else if let Some(i) = d.s_cycle_witness {
            Verdict::NotDecided(NotDecidedReason::NonSCycle {
                cycle: cyc(i),
                product: format_rational(&report.cycles[i].alternating_product),
            })
        } else if let Some((i, j)) = d.s_to_r_witness {
            Verdict::NotDecided(NotDecidedReason::SToRIntersection { first: cyc(i), second: cyc(j) })
        } else {
            Verdict::DelayStable
        }
    };
    report.graph = graph;
    report.numeric = numeric_checks(net, rank, opts)?;
    Ok(report)
}

fn numeric_checks(net: &ReactionNetwork, rank: usize, opts: &AnalysisOptions) -> Result<NumericChecks, AnalysisError> {
    let mut out = NumericChecks::default();
    if opts.numeric_samples > 0 && net.n_species() > 0 {
        let base = P0Options { samples: opts.numeric_samples, seed: opts.seed, ..P0Options::default() };
        out.p0_jacobian = Some(is_p0_sampled(net, &base)?);
        out.p0_modified = Some(is_p0_sampled(net, &P0Options { use_modified: true, ..base })?);
    }
    if opts.simulations == 0 {
        return Ok(out);
    }
    if rank < net.n_species() {
        out.notes.push("simulations skipped: the network has a conservation relation".into());
        return Ok(out);
    }
    out.simulations = (0..opts.simulations)
        .into_par_iter()
        .map(|i| simulation_run(net, opts, i))
        .collect();
    Ok(out)
}

fn simulation_run(net: &ReactionNetwork, opts: &AnalysisOptions, i: usize) -> SimulationRun {
    let mut rng = stream_rng(opts.seed ^ 0x5d1a_7e5c, i as u64);
    let kappa = log_uniform_vec(&mut rng, net.n_reactions(), opts.kappa_range.0, opts.kappa_range.1);
    let tau: Vec<f64> = (0..net.n_reactions()).map(|_| uniform(&mut rng, opts.tau_range.0, opts.tau_range.1)).collect();
    let mut run = SimulationRun {
        kappa: kappa.clone(),
        tau: tau.clone(),
        converged: false,
        error: f64::NAN,
        t_final: 0.0,
        winding: None,
        failure: None,
    };
    let x_star = match find_equilibrium(net, &kappa, &vec![1.0; net.n_species()]) {
        Ok(x) => x,
        Err(e) => {
            run.failure = Some(format!("equilibrium: {e}"));
            return run;
        }
    };
    let start: Vec<f64> = x_star.iter().map(|v| 1.1 * v).collect();
    match check_convergence(net, &kappa, &tau, &x_star, History::Constant(start), &ConvergenceOptions::default()) {
        Ok(c) => {
            run.converged = c.converged;
            run.error = c.error;
            run.t_final = c.t_final;
        }
        Err(e) => run.failure = Some(format!("simulation: {e}")),
    }
    if opts.root_scans {
        let rect = Rect { re_min: 0.0, re_max: 50.0, im_min: 0.0, im_max: 200.0 };
        match scan_characteristic_roots(net, &x_star, &kappa, &tau, rect, &ScanOptions::default()) {
            Ok(s) => run.winding = Some(s.winding),
            Err(e) => run.failure = Some(format!("root scan: {e}")),
        }
    }
    run
}

fn check_json(c: &ConditionCheck) -> Value {
    let witness = c.witness.as_ref().map(|w| match w {
        Witness::Species(s) => json!({"species": s}),
        Witness::Reaction(r) => json!({"reaction": r}),
    });
    json!({"holds": c.holds, "witness": witness})
}

impl StabilityReport {
    pub fn to_json(&self) -> Value {
        let c = &self.conditions;
        let n1_prime = match &c.n1_prime {
            N1Prime::Satisfied { subset, product } => {
                json!({"status": "satisfied", "subset": subset, "product": format_rational(product)})
            }
            N1Prime::Unsatisfied { subsets_checked } => {
                json!({"status": "unsatisfied", "subsets_checked": subsets_checked})
            }
            N1Prime::Undecided { budget } => json!({"status": "undecided", "budget": budget}),
        };
        let graph = self.graph.as_ref().map(|g| {
            let d = self.delay_conditions.as_ref();
            let names = |i: Option<usize>| i.map(|i| cycle_names(g, &self.cycles[i]));
            json!({
                "snodes": g.n_snodes(),
                "rnodes": g.n_rnodes(),
                "edges": g.edges().len(),
                "oriented_cycles": self.cycles.len(),
                "conditions": d.map(|d| json!({
                    "a_no_bispecies_production_edge_cycle": {"holds": d.no_bpe_cycle, "witness": names(d.bpe_witness)},
                    "b_all_s_cycles": {"holds": d.all_s_cycles, "witness": names(d.s_cycle_witness)},
                    "c_no_s_to_r_intersection": {
                        "holds": d.no_s_to_r,
                        "witness": d.s_to_r_witness.map(|(i, j)| [cycle_names(g, &self.cycles[i]), cycle_names(g, &self.cycles[j])]),
                    },
                })),
            })
        });
        let cross = match &self.cross_check {
            CrossCheck::Skipped(why) => json!({"status": "skipped", "reason": why}),
            CrossCheck::Agree { holds, modified_cycles } => {
                json!({"status": "agree", "holds": holds, "modified_oriented_cycles": modified_cycles})
            }
        };
        let verdict = match &self.verdict {
            Verdict::DelayStable => json!({"kind": "DelayStable"}),
            Verdict::PreconditionFailed(p) => json!({"kind": "PreconditionFailed", "which": format!("{p:?}")}),
            Verdict::NotDecided(r) => {
                let detail = match r {
                    NotDecidedReason::N1PrimeBudget { budget } => json!({"budget": budget}),
                    NotDecidedReason::CycleBudget { budget } => json!({"budget": budget}),
                    NotDecidedReason::BispeciesProductionEdgeCycle { cycle } => json!({"cycle": cycle}),
                    NotDecidedReason::NonSCycle { cycle, product } => json!({"cycle": cycle, "product": product}),
                    NotDecidedReason::SToRIntersection { first, second } => json!({"cycles": [first, second]}),
                };
                json!({"kind": "NotDecided", "reason": r.label(), "detail": detail})
            }
        };
        let sims: Vec<Value> = self
            .numeric
            .simulations
            .iter()
            .map(|s| {
                json!({
                    "kappa": s.kappa, "tau": s.tau, "converged": s.converged,
                    "error": if s.error.is_finite() { json!(s.error) } else { Value::Null },
                    "t_final": s.t_final, "winding": s.winding, "failure": s.failure,
                })
            })
            .collect();
        json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "network": {
                "species": self.species,
                "reactions": self.reactions,
                "rank": self.rank,
            },
            "structural_conditions": {
                "n1": check_json(&c.n1),
                "n2": check_json(&c.n2),
                "n3": check_json(&c.n3),
                "n4": check_json(&c.n4),
                "n1_prime": n1_prime,
            },
            "dsr": graph,
            "modified_network": {
                "reactions": self.modified.network.n_reactions(),
                "duplicate_groups": self.modified.duplicates.len(),
            },
            "cross_check": cross,
            "numeric": {
                "p0_jacobian": self.numeric.p0_jacobian.as_ref().map(p0_report_json),
                "p0_modified_jacobian": self.numeric.p0_modified.as_ref().map(p0_report_json),
                "simulations": sims,
                "notes": self.numeric.notes,
            },
            "warnings": self.warnings,
            "verdict": verdict,
        })
    }
}
