mod common;

use common::{draw, dna_equilibrium, load, max_abs_diff, net, rng};
use delaystab::exact::{int, rat, Rational};
use delaystab::generate::{random_network, GeneratorConfig};
use delaystab::netcore::*;
use num::Signed;
use proptest::prelude::*;

fn rx(text: &str) -> Reaction {
    net(text).reactions()[0].clone()
}

#[test]
fn autocatalysis_examples() {
    assert!(rx("X -> 2 X").is_autocatalytic());
    assert!(!rx("X + Y -> 2 Z").is_autocatalytic());
    assert!(!rx("X + Y -> X + Z").is_autocatalytic());
}

#[test]
fn one_step_catalysis_examples() {
    assert!(rx("X + Y -> 2 X").is_one_step_catalysis());
    assert!(!rx("2 S -> D").is_one_step_catalysis());
    assert!(!rx("0 -> X").is_one_step_catalysis());
}

#[test]
fn flow_classification() {
    assert_eq!(rx("X -> 0").classify_flow(), FlowClass::GeneralizedOutflow);
    assert_eq!(rx("0 -> Y").classify_flow(), FlowClass::GeneralizedInflow);
    assert_eq!(rx("X + Y -> 0").classify_flow(), FlowClass::Interior);
    assert_eq!(rx("0 -> X + Y").classify_flow(), FlowClass::Interior);
    assert_eq!(rx("3 X -> 0").classify_flow(), FlowClass::GeneralizedOutflow);
}

#[test]
fn dna_satisfies_all_structural_conditions() {
    let r = check_structural_conditions(&load("dna"));
    assert!(r.n1.holds && r.n2.holds && r.n3.holds && r.n4.holds);
    assert!(r.n1_prime.is_satisfied());
}

#[test]
fn structural_witnesses_point_at_offenders() {
    let r = check_structural_conditions(&net("X + Y -> 2 X\nX -> 0\nY -> 0"));
    assert!(!r.n2.holds);
    assert_eq!(r.n2.witness, Some(Witness::Reaction(0)));
    let r = check_structural_conditions(&net("X + Y + Z -> W"));
    assert_eq!(r.n3.witness, Some(Witness::Reaction(0)));
    let r = check_structural_conditions(&net("X + Y <-> Z"));
    assert!(!r.n4.holds);
    let r = check_structural_conditions(&net("X -> Y\nY -> 0"));
    assert_eq!(r.n1.witness, Some(Witness::Species(0)));
}

fn transmutation_cst(n: usize, fully_open: bool) -> ReactionNetwork {
    let ones = vec![int(1); n];
    make_cst_network(&vec![CstKind::Transmutation; n], &ones, &ones, fully_open).unwrap()
}

#[test]
fn fully_open_cst_satisfies_all_conditions() {
    let net = transmutation_cst(3, true);
    assert_eq!(net.n_reactions(), 9);
    let r = check_structural_conditions(&net);
    assert!(r.n1.holds && r.n2_to_n4());
}

#[test]
fn cst_two_species_pattern() {
    let a = [int(2), int(3)];
    let b = [int(5), int(7)];
    let net = make_cst_network(&[CstKind::Sequestration, CstKind::Transmutation], &a, &b, false).unwrap();
    assert_eq!(net.describe_reaction(0), "2 X1 + 7 X2 -> 0");
    assert_eq!(net.describe_reaction(1), "3 X2 -> 5 X1");
}

#[test]
fn cst_rejects_mismatched_lengths() {
    let err = make_cst_network(&[CstKind::Sequestration], &[int(1)], &[int(1)], true);
    assert!(matches!(err, Err(CstError::LengthMismatch { .. })));
}

/// Open CST with only `X_n -> 0` as outflow.
fn cst_single_outflow(kinds: &[CstKind], a: &[Rational], b: &[Rational]) -> ReactionNetwork {
    let n = kinds.len();
    let base = make_cst_network(kinds, a, b, false).unwrap();
    let mut reactions = base.reactions().to_vec();
    reactions.push(Reaction::new(Complex::single(n - 1, int(1)), Complex::zero()));
    ReactionNetwork::new(base.species_names().to_vec(), reactions).unwrap()
}

#[test]
fn cst_with_single_outflow_satisfies_n1_prime_only() {
    let kinds = [CstKind::Transmutation, CstKind::Sequestration, CstKind::Transmutation];
    let a = [rat(2, 1), rat(3, 2), rat(5, 1)];
    let b = [rat(1, 3), rat(4, 1), rat(7, 2)];
    let net = cst_single_outflow(&kinds, &a, &b);
    let r = check_structural_conditions(&net);
    assert!(!r.n1.holds);
    let N1Prime::Satisfied { subset, product } = &r.n1_prime else {
        panic!("expected N1' to hold: {:?}", r.n1_prime);
    };
    assert!(product.is_positive());
    assert_eq!(&n1_prime_determinant_product(&net, subset), product);
    let expected = (a[0].clone() * a[1].clone()).pow(2);
    let cycle_subset: Vec<usize> = vec![0, 1, 3];
    assert_eq!(n1_prime_determinant_product(&net, &cycle_subset), expected);
}

#[test]
fn n1_prime_budget_reports_undecided() {
    let r = check_structural_conditions_with_budget(&transmutation_cst(3, false), 0);
    assert!(matches!(r.n1_prime, N1Prime::Undecided { .. }));
}

#[test]
fn rhs_examples() {
    let n = net("0 -> X");
    let ctx = EvalContext::new(&n, vec![4.2], vec![1.0]).unwrap();
    assert_eq!(mass_action_rhs(&n, &ctx), vec![1.0]);
    let n = net("X -> Y");
    let ctx = EvalContext::new(&n, vec![3.0, 1.0], vec![2.0]).unwrap();
    assert_eq!(mass_action_rhs(&n, &ctx), vec![-6.0, 6.0]);
}

#[test]
fn dna_rhs_vanishes_at_quadratic_root() {
    let dna = load("dna");
    let mut g = rng(1);
    for _ in 0..50 {
        let k = draw(&mut g, 5);
        let x = dna_equilibrium(&k);
        let ctx = EvalContext::new(&dna, x.to_vec(), k).unwrap();
        let f = mass_action_rhs(&dna, &ctx);
        assert!(f.iter().all(|v| v.abs() < 1e-10), "{f:?}");
    }
}

#[test]
fn dna_delay_rhs_at_unit_history() {
    let dna = load("dna");
    let ctx = EvalContext::new(&dna, vec![1.0, 1.0], vec![1.0; 5])
        .unwrap()
        .with_tau(vec![1.0, 1.0, 0.0, 0.0, 0.0])
        .unwrap();
    let f = delay_rhs(&dna, |_| Some(vec![1.0, 1.0]), 0.0, &ctx).unwrap();
    assert_eq!(f, vec![0.0, -1.0]);
}

#[test]
fn delay_rhs_reports_history_domain() {
    let n = net("X -> Y : k=1, tau=2");
    let ctx = EvalContext::new(&n, vec![1.0, 1.0], vec![1.0]).unwrap().with_tau(vec![2.0]).unwrap();
    let err = delay_rhs(&n, |t| (t >= -1.0).then(|| vec![1.0, 1.0]), 0.0, &ctx).unwrap_err();
    assert_eq!(err, NetworkError::HistoryOutOfDomain(-2.0));
}

#[test]
fn delay_rhs_at_constant_equilibrium_is_zero() {
    let dna = load("dna");
    let k = vec![0.7, 1.3, 0.2, 2.0, 0.9];
    let x = dna_equilibrium(&k);
    let ctx = EvalContext::new(&dna, x.to_vec(), k).unwrap().with_tau(vec![1.0, 3.0, 0.0, 0.5, 2.0]).unwrap();
    let f = delay_rhs(&dna, |_| Some(x.to_vec()), 10.0, &ctx).unwrap();
    assert!(f.iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn subspace_rank_examples() {
    assert_eq!(stoichiometric_subspace_rank(&transmutation_cst(4, true)), 4);
    assert_eq!(stoichiometric_subspace_rank(&net("X -> Y")), 1);
    assert_eq!(stoichiometric_subspace_rank(&ReactionNetwork::empty()), 0);
}

#[test]
fn eval_context_rejects_nonpositive_input() {
    let n = net("X -> Y");
    assert!(EvalContext::new(&n, vec![0.0, 1.0], vec![1.0]).is_err());
    assert!(EvalContext::new(&n, vec![1.0, 1.0], vec![-1.0]).is_err());
    assert!(EvalContext::new(&n, vec![1.0], vec![1.0]).is_err());
    let ctx = EvalContext::new(&n, vec![1.0, 1.0], vec![1.0]).unwrap();
    assert!(ctx.with_tau(vec![-0.1]).is_err());
}

#[test]
fn network_rejects_reactant_equal_product() {
    let x = Complex::from_ints(&[(0, 1)]);
    let err = ReactionNetwork::new(vec!["X".into()], vec![Reaction::new(x.clone(), x)]).unwrap_err();
    assert_eq!(err, NetworkError::ReactantEqualsProduct(0));
}

#[test]
fn reverse_reactions_are_paired() {
    let n = net("X -> Y\nY -> X\nY -> 0");
    assert_eq!(n.reversible_pairs(), &[(0, 1)]);
    assert!(n.is_reversible(1) && !n.is_reversible(2));
}

#[test]
fn rhs_matches_finite_difference_of_ode_flow() {
    let n = load("three_species");
    let c = CompiledNetwork::new(&n);
    let k = vec![1.1, 0.4, 0.9, 2.0, 1.5, 0.7];
    let x = vec![0.8, 1.2, 0.5];
    let ctx = EvalContext::new(&n, x.clone(), k.clone()).unwrap();
    let f = mass_action_rhs(&n, &ctx);
    for dt in [1e-3, 1e-4] {
        let later = delaystab::ddesim::integrate_ode(&c, &k, &x, dt, dt);
        let fd: Vec<f64> = later.iter().zip(&x).map(|(a, b)| (a - b) / dt).collect();
        assert!(max_abs_diff(&fd, &f) < 10.0 * dt);
    }
}

fn arb_network() -> impl Strategy<Value = ReactionNetwork> {
    (any::<u64>(), any::<bool>(), any::<bool>()).prop_map(|(seed, structural, outflows)| {
        let cfg = GeneratorConfig { structural, outflows, ..GeneratorConfig::default() };
        random_network(seed, 0, &cfg)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn no_one_step_catalysis_implies_non_autocatalytic(n in arb_network()) {
        let r = check_structural_conditions(&n);
        if r.n2.holds {
            prop_assert!(n.reactions().iter().all(|r| !r.is_autocatalytic()));
        }
    }

    #[test]
    fn n1_implies_n1_prime(seed in any::<u64>()) {
        let cfg = GeneratorConfig { outflows: true, ..GeneratorConfig::default() };
        let n = random_network(seed, 1, &cfg);
        let r = check_structural_conditions(&n);
        prop_assert!(r.n1.holds);
        prop_assert!(r.n1_prime.is_satisfied());
    }

    #[test]
    fn flows_are_never_catalytic(n in arb_network()) {
        for r in n.reactions() {
            if r.classify_flow() != FlowClass::Interior {
                prop_assert!(!r.is_autocatalytic() && !r.is_one_step_catalysis());
            }
        }
    }

    #[test]
    fn zero_delay_rhs_equals_ode_rhs(n in arb_network(), seed in any::<u64>()) {
        let mut g = rng(seed);
        let x = draw(&mut g, n.n_species());
        let k = draw(&mut g, n.n_reactions());
        let ctx = EvalContext::new(&n, x.clone(), k).unwrap();
        let lhs = delay_rhs(&n, |_| Some(x.clone()), 0.0, &ctx).unwrap();
        prop_assert_eq!(lhs, mass_action_rhs(&n, &ctx));
    }
}
