//! Manufactured solutions, error norms, convergence studies and the
//! structural identity checks.

pub mod convergence;
pub mod errors;
pub mod identities;
pub mod manufactured;

pub use convergence::{convergence_study, fit_rate, Axis, ConvergenceReport, StudyRow};
pub use errors::{discrete_error, ErrorValues, SpatialErrors};
pub use identities::{verify_identities, IdentityReport, VerifyOptions};
pub use manufactured::{apply_a, apply_m0, apply_m1, FieldJet, ManufacturedCase, Profile, Wave};
