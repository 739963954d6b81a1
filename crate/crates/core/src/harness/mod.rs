//! Manufactured cases, empirical Hölder estimates, the commutation check and
//! run reports.

pub mod cases;
pub mod commute;
pub mod hoelder;
pub mod report;

pub use cases::{build_case, shipped_case, ManufacturedCase, TermSpec, SHIPPED_CASES};
pub use commute::{run_commute_check, smooth_test_form, CommuteReport};
pub use hoelder::{hoelder_seminorm, lambda_sup_norm, HoelderReport};
pub use report::{oracle_error, origin_excluding_probes, run_solve, FileConfig, Format, SolveReport};
