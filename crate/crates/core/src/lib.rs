//! Delay stability analysis for mass-action reaction networks.
//!
//! The crate decides delay stability from the DSR graph of a network and
//! backs every verdict with numerical cross-checks:
//!
//! * [`netcore`]: networks, structural conditions, right-hand sides.
//! * [`parser`]: the `.crn` text format.
//! * [`modnet`]: the modified network and its rate constants.
//! * [`dsr`]: DSR graphs, cycles and the graph conditions.
//! * [`jacobian`]: Jacobians, principal minors, P0 sampling.
//! * [`ddesim`]: equilibria, DDE integration, characteristic roots.
//! * [`analysis`]: the end-to-end stability report.

pub mod analysis;
pub mod ddesim;
pub mod dsr;
pub mod exact;
pub mod generate;
pub mod jacobian;
pub mod modnet;
pub mod netcore;
pub mod parser;
pub mod random;
