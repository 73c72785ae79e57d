#![allow(dead_code)]

pub mod dsr_oracle;
pub mod matrix_oracle;

use delaystab::netcore::ReactionNetwork;
use delaystab::parser::parse_network;
use delaystab::random::{log_uniform_vec, stream_rng};
use rand_chacha::ChaCha8Rng;

pub fn load(name: &str) -> ReactionNetwork {
    let path = format!("{}/../../networks/{name}.crn", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_network(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn net(text: &str) -> ReactionNetwork {
    parse_network(text).unwrap_or_else(|e| panic!("{text:?}: {e}"))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, 0)
}

pub fn draw(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    log_uniform_vec(rng, n, 1e-2, 1e2)
}

/// Root of a continuous function with a sign change on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// DNA equilibrium `(S, D)` from the positive root of the quadratic in `S`,
/// with rates ordered as in `networks/dna.crn`.
pub fn dna_equilibrium(k: &[f64]) -> [f64; 2] {
    let (k1, k2, k3, k4, k5) = (k[0], k[1], k[2], k[3], k[4]);
    let q = |s: f64| 2.0 * k1 * k3 * s * s + k5 * (k2 + k3) * s - k4 * (k2 + k3);
    let mut hi = 1.0;
    while q(hi) < 0.0 {
        hi *= 2.0;
    }
    let s = bisect(q, 0.0, hi);
    [s, k1 * s * s / (k2 + k3)]
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
