//! Verification: PDE residuals on the reconstructed patch, Hölder and
//! convergence estimators, identity suites, the ideal-gas dual-path check
//! and the run report.

pub mod crosscheck;
pub mod holder;
pub mod identities;
pub mod report;
pub mod residuals;
pub mod suite;
