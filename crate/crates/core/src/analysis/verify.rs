use std::fmt;

use crate::dynamics::{integrate, Integrator, SimConfig, SimOutcome};
use crate::error::Result;
use crate::objective::Objective;

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Worst violation observed; zero means the identity held exactly.
    pub worst_residual: f64,
    pub threshold: f64,
}

impl fmt::Display for InvariantCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<22} {}  worst residual {:.6e} (threshold {:.6e})",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.worst_residual,
            self.threshold
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub checks: Vec<InvariantCheck>,
    pub outcome: SimOutcome,
}

impl InvariantReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Residual threshold for the exact gap decay.
pub fn gap_decay_threshold(cfg: &SimConfig) -> f64 {
    let gap0 = crate::dynamics::spread(&cfg.initial_positions);
    match cfg.integrator {
        Integrator::Rk4 => 1e-8 * gap0.max(1.0),
        // first-order global error, bounded by lambda dt t e^{-lambda t} / 2 <= lambda dt / (2e)
        Integrator::Euler => 0.5 * cfg.lambda * cfg.dt * gap0 + 1e-12,
    }
}

/// Runs the dynamics with every step observed and reports the a-priori
/// identities: exact gap decay, order preservation, consensus point inside
/// the hull, the bound on the drift of the average, and uniform boundedness.
///
/// Violations are reported, not raised; only configuration or evaluation
/// errors produce `Err`.
pub fn verify_invariants(obj: &Objective, cfg: &SimConfig) -> Result<InvariantReport> {
    let run = integrate(obj, cfg, false, true)?;
    let r = &run.residuals;
    let scale = 1.0 + cfg.initial_positions.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let check = |name, worst: f64, threshold: f64| InvariantCheck {
        name,
        passed: worst <= threshold,
        worst_residual: worst.max(0.0),
        threshold,
    };
    let gap_thr = gap_decay_threshold(cfg);
    let checks = vec![
        check("gap_decay", r.gap_decay, gap_thr),
        check("order_preservation", r.order, 1e-12 * scale),
        check("hull_containment", r.hull, 1e-12 * scale),
        check("average_bound", -r.average_slack, 1e-8),
        check("uniform_boundedness", r.uniform_excess, 10.0 * cfg.dt),
    ];
    Ok(InvariantReport {
        checks,
        outcome: run.outcome,
    })
}
