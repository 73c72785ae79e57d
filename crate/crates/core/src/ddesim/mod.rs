//! Numerical validation: equilibria, delay integration, convergence checks,
//! conservation residuals and characteristic-root scans.

mod conservation;
mod convergence;
mod dde;
mod equilibrium;
mod roots;

pub use conservation::{conservation_directions, conservation_residual, ConservationError};
pub use convergence::{check_convergence, suggest_dt, ConvergenceOptions, ConvergenceReport};
pub use dde::{simulate_dde, DdeIntegrator, History, SimError, Trajectory, POSITIVITY_TOLERANCE};
pub use equilibrium::{
    find_equilibrium, find_equilibrium_with, flux_scale, integrate_ode, relative_residual, EquilibriumError,
    EquilibriumOptions,
};
pub use roots::{
    scan_characteristic_roots, scan_roots, winding_number, RefinedRoot, Rect, RootScanResult, ScanError, ScanOptions,
};
