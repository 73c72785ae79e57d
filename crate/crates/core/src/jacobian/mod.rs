//! Jacobian matrices of mass-action systems and principal-minor tests.

mod matrices;
mod minors;
mod sampling;

pub use matrices::{
    char_fn, jacobian, jlambda, modified_jacobian, verify_modified_correspondence, CharacteristicFunction,
};
pub use minors::{
    lu_determinant, mask_to_subset, principal_minors, principal_minors_with_limit, MinorError, PrincipalMinors,
    DEFAULT_MINOR_LIMIT,
};
pub use sampling::{is_p0_sampled, p0_report_json, MinorRecord, P0Options, P0Report, P0Verdict, SamplingError, SamplingRanges};

pub(crate) use matrices::{jacobian_compiled, monomial_partial};
