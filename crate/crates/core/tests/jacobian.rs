mod common;

use common::matrix_oracle::{cofactor_det, submatrix};
use common::{draw, load, net, rng};
use delaystab::generate::{random_network, GeneratorConfig};
use delaystab::jacobian::*;
use delaystab::netcore::{check_structural_conditions, mass_action_rhs, EvalContext, ReactionNetwork};
use delaystab::random::log_uniform_vec;
use nalgebra::DMatrix;
use num::complex::Complex64;
use proptest::prelude::*;

fn ctx(n: &ReactionNetwork, x: &[f64], k: &[f64]) -> EvalContext {
    EvalContext::new(n, x.to_vec(), k.to_vec()).unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Reaction order in the three-species file: k1, k4, k2, k3, k5, k6.
fn three_species_kappa(k: &[f64; 6]) -> Vec<f64> {
    vec![k[0], k[3], k[1], k[2], k[4], k[5]]
}

#[test]
fn three_species_determinant_closed_form() {
    let n = load("three_species");
    let mut g = rng(11);
    for _ in 0..100 {
        let x = draw(&mut g, 3);
        let k: [f64; 6] = draw(&mut g, 6).try_into().unwrap();
        let j = jacobian(&n, &ctx(&n, &x, &three_species_kappa(&k)));
        let [k1, k2, k3, _k4, k5, k6] = k;
        let (xx, yy) = (x[0], x[1]);
        let expected = -k3 * (k1 * k2 + k1 * k5 * xx + k2 * k5 * yy + k2 * k6 + 2.0 * k5 * k6 * xx);
        assert!(rel_close(j.determinant(), expected, 1e-9), "{} vs {expected}", j.determinant());
    }
}

#[test]
fn three_species_modified_minors_closed_form() {
    let n = load("three_species");
    let mut g = rng(12);
    for _ in 0..100 {
        let x = draw(&mut g, 3);
        let k: [f64; 6] = draw(&mut g, 6).try_into().unwrap();
        let m = -modified_jacobian(&n, &ctx(&n, &x, &three_species_kappa(&k)));
        let [k1, k2, k3, _k4, k5, k6] = k;
        let (xx, yy) = (x[0], x[1]);
        assert!(rel_close(m[(0, 1)], -k5 * xx, 1e-12));
        assert!(rel_close(m[(1, 0)], -(k5 * yy + k6), 1e-12));
        let minors = principal_minors(&m).unwrap();
        let expected = [
            (vec![0, 1], k1 * k2 + k1 * k5 * xx + k2 * k5 * yy + k2 * k6),
            (vec![0, 2], k3 * (k1 + k5 * yy + k6)),
            (vec![1, 2], k3 * (k2 + k5 * xx)),
        ];
        for (subset, value) in expected {
            assert!(rel_close(minors.of_subset(&subset), value, 1e-9), "{subset:?}");
        }
    }
}

#[test]
fn single_outflow_jacobian() {
    let n = net("X -> 0 : k=3");
    let j = jacobian(&n, &ctx(&n, &[0.4], &[3.0]));
    assert_eq!(j, DMatrix::from_element(1, 1, -3.0));
}

#[test]
fn jacobian_matches_central_differences() {
    let h = 1e-6;
    for name in ["three_species", "modified_example", "sr_intro", "dna"] {
        let n = load(name);
        let mut g = rng(5);
        for _ in 0..20 {
            let x = log_uniform_vec(&mut g, n.n_species(), 0.5, 2.0);
            let k = log_uniform_vec(&mut g, n.n_reactions(), 0.5, 2.0);
            let j = jacobian(&n, &ctx(&n, &x, &k));
            for col in 0..n.n_species() {
                let (mut up, mut down) = (x.clone(), x.clone());
                up[col] += h;
                down[col] -= h;
                let fu = mass_action_rhs(&n, &ctx(&n, &up, &k));
                let fd = mass_action_rhs(&n, &ctx(&n, &down, &k));
                for row in 0..n.n_species() {
                    let fdiff = (fu[row] - fd[row]) / (2.0 * h);
                    assert!((fdiff - j[(row, col)]).abs() < 1e-5, "{name} ({row},{col})");
                }
            }
        }
    }
}

#[test]
fn modified_example_matches_displayed_matrix() {
    let n = load("modified_example");
    let mut g = rng(31);
    for _ in 0..50 {
        let p = draw(&mut g, 4);
        let k = draw(&mut g, 4);
        let (x, y, z) = (p[0], p[1], p[2]);
        let (k1, k2, k3, k4) = (k[0], k[1], k[2], k[3]);
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                -k1 * y - k3 * y * y * z,
                k1 * x + 2.0 * k3 * x * y * z,
                2.0 * k2 * z + k3 * x * y * y,
                0.0,
                k1 * y + 2.0 * k3 * y * y * z,
                -k1 * x - 4.0 * k3 * x * y * z,
                2.0 * k2 * z + 2.0 * k3 * x * y * y,
                0.0,
                2.0 * k1 * y + k3 * y * y * z,
                2.0 * k1 * x + 2.0 * k3 * x * y * z,
                -4.0 * k2 * z - k3 * x * y * y,
                0.0,
                k3 * y * y * z,
                2.0 * k3 * x * y * z,
                k3 * x * y * y,
                -k4,
            ],
        );
        let got = modified_jacobian(&n, &ctx(&n, &p, &k));
        for (a, b) in got.iter().zip(expected.iter()) {
            assert!(rel_close(*a, *b, 1e-12) || (a.abs() < 1e-300 && *b == 0.0), "{got} vs {expected}");
        }
    }
}

#[test]
fn modified_correspondence_on_example() {
    let n = load("modified_example");
    let mut g = rng(32);
    for _ in 0..100 {
        let x = log_uniform_vec(&mut g, 4, 0.5, 2.0);
        let k = log_uniform_vec(&mut g, 4, 0.5, 2.0);
        assert!(verify_modified_correspondence(&n, &k, &x) <= 1e-12);
    }
}

#[test]
fn modified_correspondence_is_exact_without_bispecies() {
    let n = load("dna");
    let mut g = rng(33);
    for _ in 0..20 {
        let x = draw(&mut g, 2);
        let k = draw(&mut g, 5);
        assert_eq!(verify_modified_correspondence(&n, &k, &x), 0.0);
        let c = ctx(&n, &x, &k);
        assert_eq!(modified_jacobian(&n, &c), jacobian(&n, &c));
    }
}

#[test]
fn modified_correspondence_on_random_networks() {
    let cfg = GeneratorConfig::default();
    let mut g = rng(34);
    for i in 0..100 {
        let n = random_network(77, i, &cfg);
        let x = draw(&mut g, n.n_species());
        let k = draw(&mut g, n.n_reactions());
        let scale = modified_jacobian(&n, &ctx(&n, &x, &k)).amax().max(1.0);
        assert!(verify_modified_correspondence(&n, &k, &x) <= 1e-10 * scale, "network {i}");
    }
}

#[test]
fn dna_jlambda_entries() {
    let n = load("dna");
    let mut g = rng(40);
    for _ in 0..20 {
        let x = draw(&mut g, 2);
        let k = draw(&mut g, 5);
        let tau = [1.3, 0.7, 0.0, 0.0, 0.0];
        let lambda = Complex64::new(0.4, 1.9);
        let c = ctx(&n, &x, &k).with_tau(tau.to_vec()).unwrap().with_lambda(lambda);
        let m = jlambda(&n, &c);
        let s = x[0];
        let e1 = (-lambda * tau[0]).exp();
        let e2 = (-lambda * tau[1]).exp();
        let expected = [
            Complex64::new(-4.0 * k[0] * s - k[4], 0.0),
            2.0 * k[1] * e2,
            2.0 * k[0] * s * e1,
            Complex64::new(-k[1] - k[2], 0.0),
        ];
        let got = [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]];
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).norm() <= 1e-12 * b.norm());
        }
    }
}

#[test]
fn jlambda_reduces_to_jacobian() {
    let n = load("three_species");
    let x = [0.3, 1.7, 2.2];
    let k = [1.0, 2.0, 0.5, 0.8, 1.5, 0.9];
    let base = jacobian(&n, &ctx(&n, &x, &k)).map(|v| Complex64::new(v, 0.0));
    let zero_tau = ctx(&n, &x, &k).with_lambda(Complex64::new(3.0, -2.0));
    assert_eq!(jlambda(&n, &zero_tau), base);
    let zero_lambda = ctx(&n, &x, &k).with_tau(vec![1.0; 6]).unwrap().with_lambda(Complex64::new(0.0, 0.0));
    assert_eq!(jlambda(&n, &zero_lambda), base);
}

#[test]
fn dna_characteristic_function_closed_form() {
    let n = load("dna");
    let mut g = rng(41);
    for _ in 0..100 {
        let x = draw(&mut g, 2);
        let k = draw(&mut g, 5);
        let tau = [0.9, 2.1, 0.0, 0.0, 0.0];
        let lambda = Complex64::new(g_uniform(&mut g, -1.0, 3.0), g_uniform(&mut g, -5.0, 5.0));
        let s = x[0];
        let (k1, k2, k3, k5) = (k[0], k[1], k[2], k[4]);
        let expected = lambda * lambda + lambda * (4.0 * k1 * s + k2 + k3 + k5) + (4.0 * k1 * s + k5) * (k2 + k3)
            - 4.0 * k1 * k2 * s * (-lambda * (tau[0] + tau[1])).exp();
        let got = char_fn(&n, &x, &k, &tau, lambda);
        let scale = (lambda * lambda).norm() + (4.0 * k1 * s + k5) * (k2 + k3 + lambda.norm()) + expected.norm();
        assert!((got - expected).norm() <= 1e-9 * scale, "{got} vs {expected}");
    }
}

fn g_uniform(g: &mut rand_chacha::ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    delaystab::random::uniform(g, lo, hi)
}

#[test]
fn zero_delay_characteristic_function_is_eigen_polynomial() {
    for name in ["three_species", "modified_example", "sr_intro"] {
        let n = load(name);
        let mut g = rng(42);
        for _ in 0..20 {
            let x = log_uniform_vec(&mut g, n.n_species(), 0.2, 5.0);
            let k = log_uniform_vec(&mut g, n.n_reactions(), 0.2, 5.0);
            let tau = vec![0.0; n.n_reactions()];
            let eig = jacobian(&n, &ctx(&n, &x, &k)).complex_eigenvalues();
            let f = CharacteristicFunction::new(&n, &x, &k, &tau);
            for lambda in [Complex64::new(0.3, 0.0), Complex64::new(-1.0, 2.5), Complex64::new(4.0, -0.7)] {
                let product: Complex64 = eig.iter().map(|mu| mu - lambda).product();
                assert!((f.eval(lambda) - product).norm() <= 1e-8 * product.norm().max(1.0), "{name}");
            }
            for mu in eig.iter() {
                let scale: f64 = eig.iter().map(|v| v.norm() + 1.0).product();
                assert!(f.eval(*mu).norm() <= 1e-8 * scale, "{name}: root {mu}");
            }
        }
    }
}

#[test]
fn characteristic_function_sign_for_large_real_argument() {
    for name in ["three_species", "modified_example", "dna"] {
        let n = load(name);
        let x = vec![1.0; n.n_species()];
        let k = vec![1.0; n.n_reactions()];
        let tau = vec![0.5; n.n_reactions()];
        let v = char_fn(&n, &x, &k, &tau, Complex64::new(1e4, 0.0));
        let sign = if n.n_species().is_multiple_of(2) { 1.0 } else { -1.0 };
        assert!(v.re * sign > 0.0 && v.im.abs() < 1e-6 * v.re.abs(), "{name}");
    }
}

#[test]
fn identity_minors_are_one() {
    let m = principal_minors(&DMatrix::identity(5, 5)).unwrap();
    assert!(m.iter().all(|(_, v)| v == 1.0));
    assert_eq!(m.iter().count(), 31);
}

#[test]
fn minor_limits_are_enforced() {
    assert!(matches!(
        principal_minors_with_limit(&DMatrix::identity(3, 3), 2),
        Err(MinorError::TooLarge { size: 3, limit: 2 })
    ));
    assert!(matches!(principal_minors(&DMatrix::zeros(2, 3)), Err(MinorError::NotSquare { .. })));
}

#[test]
fn minors_match_cofactor_oracle() {
    let mut g = rng(50);
    for n in 1..=6 {
        for _ in 0..20 {
            let data: Vec<f64> = (0..n * n).map(|_| g_uniform(&mut g, -3.0, 3.0)).collect();
            let m = DMatrix::from_row_slice(n, n, &data);
            let minors = principal_minors(&m).unwrap();
            for (mask, value) in minors.iter() {
                let subset = mask_to_subset(mask);
                let oracle = cofactor_det(&submatrix(&m, &subset));
                let scale: f64 = subset.iter().map(|&i| (0..n).map(|j| m[(i, j)].abs()).sum::<f64>()).product();
                assert!((value - oracle).abs() <= 1e-10 * scale.max(1.0), "n={n} {subset:?}");
            }
        }
    }
}

#[test]
fn three_species_modified_matrix_is_p0() {
    let n = load("three_species");
    let report = is_p0_sampled(&n, &P0Options { use_modified: true, samples: 1000, seed: 9, ..P0Options::default() })
        .unwrap();
    assert_eq!(report.verdict, P0Verdict::Consistent);
    assert!(report.worst_minor.as_ref().unwrap().value > 0.0);
    assert!(report.diagonal_positive && report.det_positive);
    let json = p0_report_json(&report);
    assert_eq!(json["verdict"], "consistent");
    assert_eq!(json["samples"], 1000);
}

#[test]
fn sampling_needs_samples() {
    let n = load("dna");
    let err = is_p0_sampled(&n, &P0Options { samples: 0, ..P0Options::default() }).unwrap_err();
    assert_eq!(err, SamplingError::NoSamples);
}

#[test]
fn sampling_is_reproducible() {
    let n = load("sr_intro");
    let opts = P0Options { samples: 50, seed: 4, ..P0Options::default() };
    assert_eq!(is_p0_sampled(&n, &opts).unwrap(), is_p0_sampled(&n, &opts).unwrap());
}

#[test]
fn refutation_witnesses_reevaluate() {
    for name in ["sr_intro", "bispecies_counterexample", "modified_example"] {
        let n = load(name);
        for use_modified in [false, true] {
            let opts = P0Options { use_modified, samples: 300, seed: 1, ..P0Options::default() };
            let report = is_p0_sampled(&n, &opts).unwrap();
            let records = report.witness.iter().chain(report.worst_minor.iter());
            for w in records {
                let c = ctx(&n, &w.x, &w.kappa);
                let m = -if use_modified { modified_jacobian(&n, &c) } else { jacobian(&n, &c) };
                let oracle = cofactor_det(&submatrix(&m, &w.subset));
                assert!((oracle - w.value).abs() <= 1e-9 * oracle.abs().max(m.amax().powi(w.subset.len() as i32)));
            }
            if report.verdict == P0Verdict::Refuted {
                assert!(report.witness.as_ref().unwrap().scaled < -opts.tol);
            }
        }
    }
}

fn outflow_network(seed: u64) -> ReactionNetwork {
    let cfg = GeneratorConfig { outflows: true, max_reactions: 9, ..GeneratorConfig::default() };
    random_network(seed, 0, &cfg)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn modified_diagonal_equals_jacobian_diagonal(seed in any::<u64>(), s2 in any::<u64>()) {
        let n = random_network(seed, 0, &GeneratorConfig { structural: false, ..GeneratorConfig::default() });
        let mut g = rng(s2);
        let c = ctx(&n, &draw(&mut g, n.n_species()), &draw(&mut g, n.n_reactions()));
        let (j, jt) = (jacobian(&n, &c), modified_jacobian(&n, &c));
        for i in 0..n.n_species() {
            prop_assert_eq!(j[(i, i)], jt[(i, i)]);
        }
        if n.reactions().iter().all(|r| r.reactant.support_len() <= 1) {
            prop_assert_eq!(j, jt);
        }
    }

    #[test]
    fn jacobian_is_linear_in_reactions(seed in any::<u64>(), s2 in any::<u64>(), cut in 0usize..8) {
        let n = random_network(seed, 0, &GeneratorConfig { structural: false, ..GeneratorConfig::default() });
        let cut = cut.min(n.n_reactions());
        let species = n.species_names().to_vec();
        let (a, b) = n.reactions().split_at(cut);
        let na = ReactionNetwork::new(species.clone(), a.to_vec()).unwrap();
        let nb = ReactionNetwork::new(species, b.to_vec()).unwrap();
        let mut g = rng(s2);
        let x = draw(&mut g, n.n_species());
        let k = draw(&mut g, n.n_reactions());
        let whole = ctx(&n, &x, &k);
        let (ca, cb) = (ctx(&na, &x, &k[..cut]), ctx(&nb, &x, &k[cut..]));
        let tol = 1e-12 * jacobian(&n, &whole).amax().max(1.0);
        prop_assert!((jacobian(&n, &whole) - jacobian(&na, &ca) - jacobian(&nb, &cb)).amax() <= tol);
        prop_assert!((modified_jacobian(&n, &whole) - modified_jacobian(&na, &ca) - modified_jacobian(&nb, &cb)).amax() <= tol);
    }

    #[test]
    fn characteristic_function_is_conjugate_symmetric(seed in any::<u64>(), re in -2.0f64..2.0, im in -5.0f64..5.0) {
        let n = random_network(seed, 0, &GeneratorConfig::default());
        let mut g = rng(seed);
        let x = draw(&mut g, n.n_species());
        let k = draw(&mut g, n.n_reactions());
        let tau = log_uniform_vec(&mut g, n.n_reactions(), 0.1, 3.0);
        let f = CharacteristicFunction::new(&n, &x, &k, &tau);
        let z = Complex64::new(re, im);
        let (a, b) = (f.eval(z.conj()), f.eval(z).conj());
        prop_assert!((a - b).norm() <= 1e-9 * a.norm().max(1e-300));
    }

    #[test]
    fn injectivity_graph_conditions_give_p0(seed in any::<u64>()) {
        use delaystab::dsr::{build_dsr, check_injectivity_conditions, check_delay_stability_conditions};
        let n = outflow_network(seed);
        prop_assert!(check_structural_conditions(&n).n1.holds);
        let g = build_dsr(&n).unwrap();
        if check_injectivity_conditions(&g).unwrap().all_hold() {
            let r = is_p0_sampled(&n, &P0Options { samples: 100, seed, ..P0Options::default() }).unwrap();
            prop_assert_eq!(r.verdict, P0Verdict::Consistent);
            prop_assert!(r.det_positive);
        }
        let r = is_p0_sampled(&n, &P0Options { use_modified: true, samples: 100, seed, ..P0Options::default() }).unwrap();
        prop_assert!(r.diagonal_positive);
        if check_delay_stability_conditions(&g).unwrap().all_hold() {
            prop_assert_eq!(r.verdict, P0Verdict::Consistent);
            prop_assert!(r.det_positive);
        }
    }
}
