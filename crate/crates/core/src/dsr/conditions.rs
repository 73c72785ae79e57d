use super::cycles::{classify_cycle, enumerate_cycles, s_to_r_intersection, OrientedCycle};
use super::graph::{DsrError, DsrGraph};

/// Outcome of the injectivity conditions on a cycle list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectivityConditions {
    pub all_cycles_o_or_s: bool,
    pub no_e_cycle_s_to_r: bool,
    /// A cycle that is neither an o-cycle nor an s-cycle.
    pub cycle_witness: Option<usize>,
    /// Two e-cycles with an S-to-R intersection.
    pub pair_witness: Option<(usize, usize)>,
}

impl InjectivityConditions {
    pub fn all_hold(&self) -> bool {
        self.all_cycles_o_or_s && self.no_e_cycle_s_to_r
    }
}

/// Outcome of conditions (a), (b), (c) for delay stability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelayConditions {
    pub no_bpe_cycle: bool,
    pub all_s_cycles: bool,
    pub no_s_to_r: bool,
    pub bpe_witness: Option<usize>,
    pub s_cycle_witness: Option<usize>,
    pub s_to_r_witness: Option<(usize, usize)>,
}

impl DelayConditions {
    pub fn all_hold(&self) -> bool {
        self.no_bpe_cycle && self.all_s_cycles && self.no_s_to_r
    }
}

pub fn check_injectivity_conditions(g: &DsrGraph) -> Result<InjectivityConditions, DsrError> {
    Ok(injectivity_conditions_for(&enumerate_cycles(g)?))
}

pub fn check_delay_stability_conditions(g: &DsrGraph) -> Result<DelayConditions, DsrError> {
    Ok(delay_conditions_for(&enumerate_cycles(g)?))
}

pub fn injectivity_conditions_for(cycles: &[OrientedCycle]) -> InjectivityConditions {
    let cycle_witness = cycles.iter().position(|c| {
        let k = classify_cycle(c);
        !(k.o_cycle || k.s_cycle)
    });
    let e_cycles: Vec<usize> = (0..cycles.len()).filter(|&i| classify_cycle(&cycles[i]).e_cycle).collect();
    let pair_witness = first_intersecting_pair(cycles, &e_cycles);
    InjectivityConditions {
        all_cycles_o_or_s: cycle_witness.is_none(),
        no_e_cycle_s_to_r: pair_witness.is_none(),
        cycle_witness,
        pair_witness,
    }
}

pub fn delay_conditions_for(cycles: &[OrientedCycle]) -> DelayConditions {
    let bpe_witness = cycles.iter().position(|c| c.contains_bispecies_production_edge);
    let s_cycle_witness = cycles.iter().position(|c| !classify_cycle(c).s_cycle);
    let all: Vec<usize> = (0..cycles.len()).collect();
    let s_to_r_witness = first_intersecting_pair(cycles, &all);
    DelayConditions {
        no_bpe_cycle: bpe_witness.is_none(),
        all_s_cycles: s_cycle_witness.is_none(),
        no_s_to_r: s_to_r_witness.is_none(),
        bpe_witness,
        s_cycle_witness,
        s_to_r_witness,
    }
}

/// Whether any pair of the given cycles has an S-to-R intersection.
pub fn has_s_to_r_intersection(cycles: &[OrientedCycle]) -> bool {
    let all: Vec<usize> = (0..cycles.len()).collect();
    first_intersecting_pair(cycles, &all).is_some()
}

fn first_intersecting_pair(cycles: &[OrientedCycle], among: &[usize]) -> Option<(usize, usize)> {
    for (a, &i) in among.iter().enumerate() {
        for &j in &among[a + 1..] {
            if s_to_r_intersection(&cycles[i], &cycles[j]) {
                return Some((i, j));
            }
        }
    }
    None
}
