use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use super::matrices::{ctx_unchecked, jacobian_compiled, modified_jacobian_compiled};
use super::minors::{mask_to_subset, principal_minors, MinorError};
use crate::netcore::{CompiledNetwork, ReactionNetwork};
use crate::random::{log_uniform_vec, stream_rng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("at least one sample is required")]
    NoSamples,
    #[error(transparent)]
    Minor(#[from] MinorError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingRanges {
    pub x: (f64, f64),
    pub kappa: (f64, f64),
}

impl Default for SamplingRanges {
    fn default() -> Self {
        Self { x: (1e-2, 1e2), kappa: (1e-2, 1e2) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct P0Options {
    pub use_modified: bool,
    pub samples: usize,
    pub ranges: SamplingRanges,
    /// Relative tolerance; a `k x k` minor may dip to `-tol * max|M|^k`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for P0Options {
    fn default() -> Self {
        Self { use_modified: false, samples: 1000, ranges: SamplingRanges::default(), tol: 1e-9, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum P0Verdict {
    /// No sampled point violated the P0 property.
    Consistent,
    Refuted,
}

/// A principal minor of `-J` (or `-J~`) at one sampled point.
#[derive(Clone, Debug, PartialEq)]
pub struct MinorRecord {
    pub sample: usize,
    pub x: Vec<f64>,
    pub kappa: Vec<f64>,
    pub subset: Vec<usize>,
    pub value: f64,
    /// `value / max|M|^k`.
    pub scaled: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct P0Report {
    pub verdict: P0Verdict,
    pub options: P0Options,
    pub worst_minor: Option<MinorRecord>,
    pub witness: Option<MinorRecord>,
    /// Every sampled diagonal entry of `-M` was strictly positive.
    pub diagonal_positive: bool,
    /// Every sampled `det(-M)` was strictly positive.
    pub det_positive: bool,
    pub min_scaled_det: f64,
}

struct SampleOutcome {
    worst: Option<MinorRecord>,
    violation: Option<MinorRecord>,
    diagonal_positive: bool,
    scaled_det: f64,
}

/// Samples `(x, kappa)` log-uniformly and checks the principal minors of `-J`
/// (or `-J~` with `use_modified`).
pub fn is_p0_sampled(net: &ReactionNetwork, opts: &P0Options) -> Result<P0Report, SamplingError> {
    if opts.samples == 0 {
        return Err(SamplingError::NoSamples);
    }
    let c = CompiledNetwork::new(net);
    let outcomes: Vec<Result<SampleOutcome, MinorError>> = (0..opts.samples)
        .into_par_iter()
        .map(|i| sample_once(&c, opts, i))
        .collect();
    let mut report = P0Report {
        verdict: P0Verdict::Consistent,
        options: opts.clone(),
        worst_minor: None,
        witness: None,
        diagonal_positive: true,
        det_positive: true,
        min_scaled_det: f64::INFINITY,
    };
    for o in outcomes {
        let o = o?;
        report.diagonal_positive &= o.diagonal_positive;
        report.det_positive &= o.scaled_det > 0.0;
        report.min_scaled_det = report.min_scaled_det.min(o.scaled_det);
        if let Some(w) = o.worst {
            if report.worst_minor.as_ref().is_none_or(|b| w.scaled < b.scaled) {
                report.worst_minor = Some(w);
            }
        }
        if report.witness.is_none() && o.violation.is_some() {
            report.verdict = P0Verdict::Refuted;
            report.witness = o.violation;
        }
    }
    Ok(report)
}

fn sample_once(c: &CompiledNetwork, opts: &P0Options, i: usize) -> Result<SampleOutcome, MinorError> {
    let mut rng = stream_rng(opts.seed, i as u64);
    let x = log_uniform_vec(&mut rng, c.n, opts.ranges.x.0, opts.ranges.x.1);
    let kappa = log_uniform_vec(&mut rng, c.n_reactions(), opts.ranges.kappa.0, opts.ranges.kappa.1);
    let ctx = ctx_unchecked(&x, &kappa);
    let m = -if opts.use_modified { modified_jacobian_compiled(c, &ctx) } else { jacobian_compiled(c, &ctx) };
    let norm = m.amax().max(f64::MIN_POSITIVE);
    let minors = principal_minors(&m)?;
    let mut worst: Option<MinorRecord> = None;
    let mut violation = None;
    for (mask, value) in minors.iter() {
        let k = mask.count_ones() as i32;
        let scaled = value / norm.powi(k);
        let record = || MinorRecord {
            sample: i,
            x: x.clone(),
            kappa: kappa.clone(),
            subset: mask_to_subset(mask),
            value,
            scaled,
        };
        if worst.as_ref().is_none_or(|w| scaled < w.scaled) {
            worst = Some(record());
        }
        if violation.is_none() && scaled < -opts.tol {
            violation = Some(record());
        }
    }
    let n = c.n;
    let full = if n == 0 { 1.0 } else { minors.get((1 << n) - 1) / norm.powi(n as i32) };
    Ok(SampleOutcome {
        worst,
        violation,
        diagonal_positive: (0..n).all(|i| m[(i, i)] > 0.0),
        scaled_det: full,
    })
}

pub fn p0_report_json(r: &P0Report) -> Value {
    let rec = |m: &Option<MinorRecord>| {
        m.as_ref().map(|m| {
            json!({
                "sample": m.sample,
                "x": m.x,
                "kappa": m.kappa,
                "subset": m.subset,
                "value": m.value,
                "scaled": m.scaled,
            })
        })
    };
    json!({
        "verdict": match r.verdict { P0Verdict::Consistent => "consistent", P0Verdict::Refuted => "refuted" },
        "matrix": if r.options.use_modified { "-J~" } else { "-J" },
        "samples": r.options.samples,
        "seed": r.options.seed,
        "ranges": { "x": [r.options.ranges.x.0, r.options.ranges.x.1], "kappa": [r.options.ranges.kappa.0, r.options.ranges.kappa.1] },
        "tol": r.options.tol,
        "worst_minor": rec(&r.worst_minor),
        "witness": rec(&r.witness),
        "diagonal_positive": r.diagonal_positive,
        "det_positive": r.det_positive,
        "min_scaled_det": r.min_scaled_det,
    })
}
