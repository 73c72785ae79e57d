mod common;

use std::collections::BTreeMap;

use common::{draw, load, net, rng};
use delaystab::dsr::build_dsr;
use delaystab::generate::{random_network, GeneratorConfig};
use delaystab::modnet::{build_modified_network, evaluate_modified_rates, RateFormula};
use delaystab::netcore::ReactionNetwork;
use proptest::prelude::*;

/// Reaction text mapped to the multiset of rate formulas attached to it.
fn display(m: &delaystab::modnet::ModifiedNetwork, original: &ReactionNetwork) -> BTreeMap<String, Vec<String>> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for k in 0..m.network.n_reactions() {
        out.entry(m.network.describe_reaction(k)).or_default().push(m.formula_text(original, k));
    }
    out.values_mut().for_each(|v| v.sort());
    out
}

#[test]
fn modified_example_matches_displayed_system() {
    let original = load("modified_example");
    let m = build_modified_network(&original);
    let expected: BTreeMap<String, Vec<String>> = [
        ("W -> 0", "k4"),
        ("2 Z -> X + Y", "k2"),
        ("X -> Y + 2 Z", "k1 * Y*"),
        ("Y -> X + 2 Z", "k1 * X*"),
        ("X -> 2 Y + Z + W", "k3 * Y*^2 * Z*"),
        ("2 Y -> X + Z + W", "k3 * X* * Z*"),
        ("Z -> X + 2 Y + W", "k3 * X* * Y*^2"),
    ]
    .into_iter()
    .map(|(r, f)| (r.to_string(), vec![f.to_string()]))
    .collect();
    assert_eq!(display(&m, &original), expected);
}

#[test]
fn numeric_split_rate_at_sample_point() {
    let original = load("modified_example");
    let m = build_modified_network(&original);
    let rates = evaluate_modified_rates(&m, &[1.0; 4], &[2.0, 3.0, 5.0, 7.0]);
    let k = (0..m.network.n_reactions())
        .find(|&k| m.rate_formulas[k].parent() == 2 && m.rate_formulas[k].pivot() == Some(1))
        .unwrap();
    assert_eq!(rates[k], 10.0);
}

#[test]
fn single_reaction_split_rates() {
    let original = net("2 A + 3 B + C -> D");
    let m = build_modified_network(&original);
    assert_eq!(m.network.n_reactions(), 3);
    let x = [1.7, 0.6, 2.3, 1.0];
    let kappa = 0.8;
    let rates = evaluate_modified_rates(&m, &[kappa], &x);
    let pivot_a = kappa * x[1].powi(3) * x[2];
    assert!((rates[0] - pivot_a).abs() < 1e-14 * pivot_a);
    assert_eq!(m.network.describe_reaction(0), "2 A -> 3 B + C + D");
}

#[test]
fn unit_state_leaves_rates_unchanged() {
    let original = load("modified_example");
    let m = build_modified_network(&original);
    let kappa = [0.3, 1.9, 4.4, 0.7];
    let rates = evaluate_modified_rates(&m, &kappa, &[1.0; 4]);
    for (k, f) in m.rate_formulas.iter().enumerate() {
        assert_eq!(rates[k], kappa[f.parent()]);
    }
}

#[test]
fn single_species_reactions_are_copied_verbatim() {
    let original = load("dna");
    let m = build_modified_network(&original);
    assert!(m.network.structurally_eq(&original));
    assert!(m.rate_formulas.iter().all(|f| matches!(f, RateFormula::Copy { .. })));
    assert_eq!(m.network.reversible_pairs(), original.reversible_pairs());
}

#[test]
fn repeated_reactions_are_retained() {
    let original = net("X + Y -> 0\nX -> Y");
    let m = build_modified_network(&original);
    let texts: Vec<String> = (0..3).map(|k| m.network.describe_reaction(k)).collect();
    assert_eq!(texts, ["X -> Y", "Y -> X", "X -> Y"]);
    assert_eq!(m.duplicates, vec![vec![0, 2]]);
    assert_eq!(build_dsr(&m.network).unwrap().n_rnodes(), 3);
}

fn arb_network() -> impl Strategy<Value = ReactionNetwork> {
    (any::<u64>(), any::<bool>()).prop_map(|(seed, structural)| {
        random_network(seed, 0, &GeneratorConfig { structural, ..GeneratorConfig::default() })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn split_count_formula(n in arb_network()) {
        let m = build_modified_network(&n);
        let expected: usize = n.reactions().iter().map(|r| r.reactant.support_len().max(1)).sum();
        prop_assert_eq!(m.network.n_reactions(), expected);
        for (r, kids) in m.children.iter().enumerate() {
            let pivots: Vec<Option<usize>> = kids.iter().map(|&k| m.rate_formulas[k].pivot()).collect();
            if n.reaction(r).reactant.support_len() >= 2 {
                let support: Vec<Option<usize>> = n.reaction(r).reactant.support().map(Some).collect();
                prop_assert_eq!(pivots, support);
            }
        }
    }

    #[test]
    fn modified_reactants_have_at_most_one_species(n in arb_network()) {
        let m = build_modified_network(&n);
        prop_assert!(m.network.reactions().iter().all(|r| r.reactant.support_len() <= 1));
    }

    #[test]
    fn construction_ignores_parameters(n in arb_network(), seed in any::<u64>()) {
        let a = build_modified_network(&n);
        let mut g = rng(seed);
        let kappa = draw(&mut g, n.n_reactions());
        let x = draw(&mut g, n.n_species());
        let _ = evaluate_modified_rates(&a, &kappa, &x);
        let b = build_modified_network(&n);
        prop_assert!(a.network.structurally_eq(&b.network));
        prop_assert_eq!(a.rate_formulas, b.rate_formulas);
    }

    #[test]
    fn rates_match_exponent_vector_oracle(n in arb_network(), seed in any::<u64>()) {
        let m = build_modified_network(&n);
        let mut g = rng(seed);
        let kappa = draw(&mut g, n.n_reactions());
        let x = draw(&mut g, n.n_species());
        let rates = evaluate_modified_rates(&m, &kappa, &x);
        for (k, f) in m.rate_formulas.iter().enumerate() {
            let parent = n.reaction(f.parent());
            let mut expected = kappa[f.parent()];
            if let Some(p) = f.pivot() {
                for (s, c) in parent.reactant.iter() {
                    if s != p {
                        expected *= x[s].powf(delaystab::exact::to_f64(c));
                    }
                }
            }
            prop_assert!((rates[k] - expected).abs() <= 1e-12 * expected);
        }
    }
}
