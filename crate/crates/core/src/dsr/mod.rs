//! DSR graphs: construction, oriented cycle enumeration and classification,
//! the cycle conditions for injectivity and delay stability, the
//! homomorphism from the modified graph, and DOT/JSON export.

mod conditions;
mod cycles;
mod export;
mod graph;
mod phi;

pub use conditions::{
    check_delay_stability_conditions, check_injectivity_conditions, delay_conditions_for, has_s_to_r_intersection,
    injectivity_conditions_for, DelayConditions, InjectivityConditions,
};
pub use cycles::{
    classify_cycle, enumerate_cycles, enumerate_cycles_with_budget, s_to_r_intersection, unique_cycles, CycleClass,
    OrientedCycle, Step, DEFAULT_CYCLE_BUDGET,
};
pub use export::{cycle_report, export_dot, DotOptions};
pub use graph::{build_dsr, DsrError, DsrGraph, Edge, RNode, Side, Vertex};
pub use phi::{build_phi, PhiImage, PhiMap};
