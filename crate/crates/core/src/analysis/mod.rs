//! Error oracles, calyx certificates, sweeps and invariant checks.

pub mod certify;
pub mod fit;
pub mod oracles;
pub mod sweep;
pub mod verify;

pub use certify::{certify_calyx, CalyxCertificate};
pub use fit::{fit_line, fit_log_log, LineFit};
pub use oracles::{
    convex_bound, lipschitz_separation_bound, oracle_linear_error, oracle_nparticle_linear_error,
    oracle_quadratic_bounds, QuadraticBounds,
};
pub use sweep::{sweep_alpha, sweep_n, SweepParam, SweepReport, SweepRow};
pub use verify::{verify_invariants, InvariantCheck, InvariantReport};
