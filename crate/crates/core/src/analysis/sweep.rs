//! Parameter sweeps over `alpha` and the particle count, with rate fits.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use super::certify::{certify_calyx, CalyxCertificate, DEFAULT_GRID};
use super::fit::{fit_line, fit_log_log, LineFit};
use super::oracles::{convex_bound, lipschitz_separation_bound, oracle_nparticle_linear_error, oracle_quadratic_bounds};
use crate::dynamics::{reduced_two_particle, simulate, SimConfig, SimOutcome};
use crate::error::{Error, Result};
use crate::objective::{builtin_objective, Objective, ObjectiveKind};

/// Rows whose error is at most this multiple of `gap_tol` are left out of the fit.
pub const NOISE_FLOOR_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Alpha,
    N,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::Alpha => "alpha",
            SweepParam::N => "N",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub x_inf: f64,
    pub abs_error: f64,
    pub bound_lower: Option<f64>,
    pub bound_upper: Option<f64>,
    /// Exact error when a closed form is known for this configuration.
    pub oracle: Option<f64>,
}

impl SweepRow {
    pub fn oracle_mismatch(&self) -> Option<f64> {
        self.oracle.map(|o| (self.abs_error - o).abs())
    }

    /// True when every attached bound holds up to `tol`.
    pub fn within_bounds(&self, tol: f64) -> bool {
        self.bound_lower.is_none_or(|l| l <= self.abs_error + tol)
            && self.bound_upper.is_none_or(|u| self.abs_error <= u + tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub param_name: SweepParam,
    pub rows: Vec<SweepRow>,
    /// `None` when fewer than two rows lie above the noise floor.
    pub fitted_slope: Option<f64>,
    pub slope_stderr: Option<f64>,
    /// Number of rows that entered the fit.
    pub fit_points: usize,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

impl SweepReport {
    fn from_rows(param_name: SweepParam, rows: Vec<SweepRow>, gap_tol: f64) -> Self {
        let kept: Vec<&SweepRow> = rows
            .iter()
            .filter(|r| r.abs_error > NOISE_FLOOR_FACTOR * gap_tol)
            .collect();
        let xs: Vec<f64> = kept.iter().map(|r| r.param).collect();
        let ys: Vec<f64> = kept.iter().map(|r| r.abs_error).collect();
        let fit: Option<LineFit> = match param_name {
            SweepParam::Alpha => fit_log_log(&xs, &ys),
            SweepParam::N => {
                let ln_n: Vec<f64> = xs.iter().map(|n| n.ln()).collect();
                fit_line(&ln_n, &ys)
            }
        };
        Self {
            param_name,
            fitted_slope: fit.map(|f| f.slope),
            slope_stderr: fit.map(|f| f.slope_stderr),
            fit_points: kept.len(),
            rows,
        }
    }

    /// CSV with columns `param,x_inf,abs_error,bound_lower,bound_upper,oracle,oracle_mismatch`
    /// and a trailing `#` comment carrying the fit.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "param,x_inf,abs_error,bound_lower,bound_upper,oracle,oracle_mismatch")?;
        for r in &self.rows {
            let param = match self.param_name {
                SweepParam::Alpha => format!("{:.16e}", r.param),
                SweepParam::N => format!("{}", r.param as u64),
            };
            writeln!(
                w,
                "{param},{:.16e},{:.16e},{},{},{},{}",
                r.x_inf,
                r.abs_error,
                opt(r.bound_lower),
                opt(r.bound_upper),
                opt(r.oracle),
                opt(r.oracle_mismatch())
            )?;
        }
        match (self.fitted_slope, self.slope_stderr) {
            (Some(s), Some(e)) => writeln!(w, "# fitted_slope={s:.16e},slope_stderr={e:.16e}"),
            _ => writeln!(w, "# fitted_slope=undefined,slope_stderr=undefined"),
        }
    }

    /// Two whitespace-separated columns for plotting: `log10 alpha, log10 error`
    /// for alpha sweeps, `ln N, error` for particle-count sweeps.
    pub fn write_plot_data<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        match self.param_name {
            SweepParam::Alpha => {
                writeln!(w, "# log10_alpha log10_abs_error")?;
                for r in self.rows.iter().filter(|r| r.abs_error > 0.0) {
                    writeln!(w, "{:.16e} {:.16e}", r.param.log10(), r.abs_error.log10())?;
                }
            }
            SweepParam::N => {
                writeln!(w, "# ln_N abs_error")?;
                for r in &self.rows {
                    writeln!(w, "{:.16e} {:.16e}", r.param.ln(), r.abs_error)?;
                }
            }
        }
        Ok(())
    }
}

fn check_increasing(field: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::config(field, "grid is empty"));
    }
    if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::config(field, "grid values must be positive and finite"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config(field, "grid must be strictly increasing"));
    }
    Ok(())
}

/// Closed-form references for one sweep point.
struct Reference {
    lower: Option<f64>,
    upper: Option<f64>,
    oracle: Option<f64>,
}

/// Which closed forms apply to a given objective and starting configuration.
struct References {
    kind: ObjectiveKind,
    x_star: f64,
    positions: Vec<f64>,
    certificate: Option<CalyxCertificate>,
}

impl References {
    fn new(obj: &Objective, cfg: &SimConfig, x_star: f64) -> Self {
        let mut positions = cfg.initial_positions.clone();
        positions.sort_by(f64::total_cmp);
        let kind = obj.kind().clone();
        let straddles = positions.len() == 2 && positions[0] < x_star && x_star < positions[1];
        let closed_form = matches!(kind, ObjectiveKind::Linear | ObjectiveKind::Quadratic { .. });
        let certificate = if straddles && !closed_form {
            certify_calyx(obj, DEFAULT_GRID).ok()
        } else {
            None
        };
        Self {
            kind,
            x_star,
            positions,
            certificate,
        }
    }

    fn at(&self, alpha: f64) -> Reference {
        let p = &self.positions;
        let n = p.len();
        let lowest_on_min = p[0] == self.x_star;
        let mut r = Reference {
            lower: None,
            upper: None,
            oracle: None,
        };
        match self.kind {
            ObjectiveKind::Linear => {
                let top = p[n - 1];
                let j = p.iter().filter(|&&x| x == self.x_star).count();
                if lowest_on_min && p[j..].iter().all(|&x| x == top) && j < n {
                    r.oracle = Some(oracle_nparticle_linear_error(alpha, n, j, top - self.x_star));
                }
                if n == 2 && lowest_on_min {
                    r.upper = Some(lipschitz_separation_bound(alpha, 1.0));
                }
            }
            ObjectiveKind::Quadratic { curvature, .. } if n == 2 => {
                if lowest_on_min {
                    let b = oracle_quadratic_bounds(alpha * curvature, p[1] - self.x_star);
                    r.lower = Some(b.lower);
                    r.upper = Some(b.upper);
                } else if p[0] < self.x_star && self.x_star < p[1] {
                    r.upper = Some(convex_bound(alpha, 2.0 * curvature));
                }
            }
            _ => {
                if let Some(cert) = &self.certificate {
                    r.upper = cert.bound(alpha);
                }
            }
        }
        r
    }
}

fn run(obj: &Objective, cfg: &SimConfig) -> Result<SimOutcome> {
    if cfg.n() == 2 {
        reduced_two_particle(obj, cfg)
    } else {
        simulate(obj, cfg)
    }
}

/// Runs one simulation per `alpha` (the reduced solver when `N = 2`) and fits
/// the log-log slope of the error against `alpha`.
///
/// Rows are computed in parallel on the current rayon pool; their order
/// follows `alphas`.
pub fn sweep_alpha(obj: &Objective, base_cfg: &SimConfig, alphas: &[f64]) -> Result<SweepReport> {
    let x_star = obj.known_minimizer().ok_or(Error::MissingMinimizer)?;
    check_increasing("alphas", alphas)?;
    base_cfg.validate_for(obj)?;
    let refs = References::new(obj, base_cfg, x_star);
    let rows = alphas
        .par_iter()
        .map(|&alpha| {
            let out = run(obj, &base_cfg.with_alpha(alpha))?;
            let reference = refs.at(alpha);
            Ok(SweepRow {
                param: alpha,
                x_inf: out.x_inf_estimate,
                abs_error: (out.x_inf_estimate - x_star).abs(),
                bound_lower: reference.lower,
                bound_upper: reference.upper,
                oracle: reference.oracle,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport::from_rows(SweepParam::Alpha, rows, base_cfg.gap_tol))
}

/// Linear objective on `[0, width]` with `j` particles at `0` and `N - j` at
/// `width`, for each `N` in `ns`. Each row carries the closed-form error; the
/// fit regresses the error on `ln N`.
pub fn sweep_n(alpha: f64, width: f64, ns: &[usize], j: usize, base_cfg: &SimConfig) -> Result<SweepReport> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::config("alpha", "must be positive"));
    }
    let as_f: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    check_increasing("ns", &as_f)?;
    if let Some(&n) = ns.iter().find(|&&n| n < 2 || j == 0 || j >= n) {
        return Err(Error::config("j", format!("need 1 <= j < N, got j = {j}, N = {n}")));
    }
    let obj = builtin_objective("linear", &[0.0, width])?;
    let rows = ns
        .par_iter()
        .map(|&n| {
            let mut positions = vec![0.0; j];
            positions.resize(n, width);
            let cfg = SimConfig {
                alpha,
                initial_positions: positions,
                ..base_cfg.clone()
            };
            let out = simulate(&obj, &cfg)?;
            Ok(SweepRow {
                param: n as f64,
                x_inf: out.x_inf_estimate,
                abs_error: out.x_inf_estimate.abs(),
                bound_lower: None,
                bound_upper: None,
                oracle: Some(oracle_nparticle_linear_error(alpha, n, j, width)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport::from_rows(SweepParam::N, rows, base_cfg.gap_tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_sweep_rate() {
        let obj = builtin_objective("linear", &[]).unwrap();
        let cfg = SimConfig::new(1.0, 1.0, vec![0.0, 1.0]);
        let rep = sweep_alpha(&obj, &cfg, &[10.0, 100.0, 1e3, 1e4]).unwrap();
        let s = rep.fitted_slope.unwrap();
        assert!((-1.05..=-0.95).contains(&s), "slope {s}");
        for r in &rep.rows {
            assert!(r.oracle_mismatch().unwrap() < 1e-8);
            assert!(r.within_bounds(10.0 * cfg.gap_tol));
        }
    }

    #[test]
    fn quadratic_sweep_rate_and_sandwich() {
        let obj = builtin_objective("quadratic", &[]).unwrap();
        let cfg = SimConfig::new(1.0, 1.0, vec![0.0, 1.0]);
        let rep = sweep_alpha(&obj, &cfg, &[10.0, 100.0, 1e3, 1e4]).unwrap();
        let s = rep.fitted_slope.unwrap();
        assert!((-0.6..=-0.4).contains(&s), "slope {s}");
        for r in rep.rows.iter().filter(|r| r.param > 10.0) {
            assert!(r.within_bounds(10.0 * cfg.gap_tol), "{r:?}");
        }
    }

    #[test]
    fn single_point_has_no_slope() {
        let obj = builtin_objective("linear", &[]).unwrap();
        let cfg = SimConfig::new(1.0, 1.0, vec![0.0, 1.0]);
        let rep = sweep_alpha(&obj, &cfg, &[10.0]).unwrap();
        assert!(rep.fitted_slope.is_none());
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("# fitted_slope=undefined,slope_stderr=undefined\n"));
    }

    #[test]
    fn rows_at_noise_floor_are_not_fitted() {
        // particles start on either side of the minimizer of an even function
        let obj = builtin_objective("quadratic", &[-1.0, 1.0]).unwrap();
        let cfg = SimConfig::new(1.0, 1.0, vec![-0.5, 0.5]);
        let rep = sweep_alpha(&obj, &cfg, &[1.0, 10.0]).unwrap();
        assert_eq!(rep.fit_points, 0);
        assert!(rep.fitted_slope.is_none());
    }

    #[test]
    fn grid_validation() {
        let obj = builtin_objective("linear", &[]).unwrap();
        let cfg = SimConfig::new(1.0, 1.0, vec![0.0, 1.0]);
        assert!(sweep_alpha(&obj, &cfg, &[]).is_err());
        assert!(sweep_alpha(&obj, &cfg, &[10.0, 10.0]).is_err());
        assert!(sweep_alpha(&obj, &cfg, &[-1.0, 10.0]).is_err());
        assert!(sweep_n(5.0, 1.0, &[2, 4], 2, &cfg).is_err());
    }

    #[test]
    fn n_sweep_matches_closed_form() {
        let cfg = SimConfig::new(1.0, 5.0, vec![0.0, 1.0]);
        let rep = sweep_n(5.0, 1.0, &[2, 4, 8], 1, &cfg).unwrap();
        for r in &rep.rows {
            assert!(r.oracle_mismatch().unwrap() < 1e-6);
        }
        assert!(rep.rows.windows(2).all(|w| w[1].abs_error > w[0].abs_error));
        let two = super::super::oracles::oracle_linear_error(5.0, 1.0);
        assert!((rep.rows[0].abs_error - two).abs() < 1e-6);
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("2,"));
    }
}
