use std::io::Write;

use super::config::ExperimentConfig;
use super::output::{commit, opt6, sig6, Artifact};
use super::{CommonArgs, EXIT_INCOMPLETE, EXIT_OK};
use crate::analysis::{self, CalyxCertificate, SweepParam, SweepReport};
use crate::dynamics::{self, StopReason, Trajectory};
use crate::error::{Error, Result};

fn trajectory_artifact(traj: &Trajectory) -> Result<Artifact> {
    Artifact::build("trajectory.csv", |w| traj.write_csv(w))
}

pub fn simulate(cfg: &ExperimentConfig, args: &CommonArgs) -> Result<u8> {
    let obj = cfg.build_objective()?;
    let mut sim = cfg.sim_config(None, None)?;
    sim.record_trajectory = true;
    if args.trajectory {
        sim.sample_stride = 1;
    }
    let out = dynamics::simulate(&obj, &sim)?;
    let mut artifacts = Vec::new();
    if let Some(traj) = &out.trajectory {
        artifacts.push(trajectory_artifact(traj)?);
    }
    commit(&args.out, &artifacts)?;
    println!(
        "x_inf_estimate={} error_to_minimizer={} stop_reason={} final_gap={} t_final={} steps={}",
        sig6(out.x_inf_estimate),
        opt6(out.error_to_minimizer),
        out.stop_reason,
        sig6(out.final_gap),
        sig6(out.t_final),
        out.steps
    );
    Ok(match out.stop_reason {
        StopReason::GapConverged => EXIT_OK,
        StopReason::TMaxReached => EXIT_INCOMPLETE,
    })
}

fn report_artifacts(report: &SweepReport, stem: &str, plot: bool) -> Result<Vec<Artifact>> {
    let mut v = vec![Artifact::build(&format!("{stem}.csv"), |w| report.write_csv(w))?];
    if plot {
        v.push(Artifact::build(&format!("{stem}_plot.dat"), |w| report.write_plot_data(w))?);
    }
    Ok(v)
}

fn print_report(report: &SweepReport) -> u8 {
    println!(
        "{:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
        report.param_name, "x_inf", "abs_error", "bound_lower", "bound_upper", "oracle_diff"
    );
    for r in &report.rows {
        let param = match report.param_name {
            SweepParam::Alpha => sig6(r.param),
            SweepParam::N => format!("{}", r.param as u64),
        };
        println!(
            "{:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
            param,
            sig6(r.x_inf),
            sig6(r.abs_error),
            opt6(r.bound_lower),
            opt6(r.bound_upper),
            opt6(r.oracle_mismatch())
        );
    }
    match (report.fitted_slope, report.slope_stderr) {
        (Some(s), Some(e)) => {
            println!("fitted_slope={} slope_stderr={} fit_points={}", sig6(s), sig6(e), report.fit_points);
            EXIT_OK
        }
        _ => {
            println!(
                "fitted_slope=undefined ({} point(s) above the noise floor, need 2)",
                report.fit_points
            );
            EXIT_INCOMPLETE
        }
    }
}

pub fn sweep_alpha(cfg: &ExperimentConfig, args: &CommonArgs) -> Result<u8> {
    let section = cfg
        .sweep_alpha
        .as_ref()
        .ok_or_else(|| Error::config("sweep_alpha", "section is missing"))?;
    let obj = cfg.build_objective()?;
    let base = cfg.sim_config(Some(section.alphas[0]), None)?;
    let report = analysis::sweep_alpha(&obj, &base, &section.alphas)?;
    commit(&args.out, &report_artifacts(&report, "sweep_alpha", args.emit_plot_data)?)?;
    Ok(print_report(&report))
}

pub fn sweep_n(cfg: &ExperimentConfig, args: &CommonArgs) -> Result<u8> {
    let s = cfg
        .sweep_n
        .as_ref()
        .ok_or_else(|| Error::config("sweep_n", "section is missing"))?;
    let base = cfg.sim_config(Some(s.alpha), Some(vec![0.0, s.width]))?;
    let report = analysis::sweep_n(s.alpha, s.width, &s.ns, s.j, &base).map_err(|e| match e {
        Error::InvalidConfig { field, reason } => Error::InvalidConfig {
            field: format!("sweep_n.{field}"),
            reason,
        },
        other => other,
    })?;
    commit(&args.out, &report_artifacts(&report, "sweep_n", args.emit_plot_data)?)?;
    Ok(print_report(&report))
}

fn certificate_fields(c: &CalyxCertificate) -> [(&'static str, f64); 12] {
    [
        ("x_star", c.x_star),
        ("domain_lo", c.domain.0),
        ("domain_hi", c.domain.1),
        ("r1", c.r1),
        ("c1", c.c1),
        ("C1", c.big_c1),
        ("f_star", c.f_star),
        ("f1", c.f1),
        ("delta", c.delta),
        ("r2", c.r2),
        ("c2", c.c2),
        ("alpha0", c.alpha0),
    ]
}

pub fn certify(cfg: &ExperimentConfig, args: &CommonArgs) -> Result<u8> {
    let obj = cfg.build_objective()?;
    let cert = analysis::certify_calyx(&obj, cfg.grid_n())?;
    let alphas = &cfg.certify.alphas;

    let mut artifacts = vec![Artifact::build("certificate.csv", |w| {
        writeln!(w, "field,value")?;
        for (k, v) in certificate_fields(&cert) {
            writeln!(w, "{k},{v:.16e}")?;
        }
        Ok(())
    })?];
    if !alphas.is_empty() {
        artifacts.push(Artifact::build("certificate_bounds.csv", |w| {
            writeln!(w, "alpha,bound")?;
            for &a in alphas {
                let b = cert.bound(a).map(|b| format!("{b:.16e}")).unwrap_or_default();
                writeln!(w, "{a:.16e},{b}")?;
            }
            Ok(())
        })?);
        if args.emit_plot_data {
            artifacts.push(Artifact::build("certificate_bounds_plot.dat", |w| {
                writeln!(w, "# log10_alpha log10_bound")?;
                for &a in alphas {
                    if let Some(b) = cert.bound(a) {
                        writeln!(w, "{:.16e} {:.16e}", a.log10(), b.log10())?;
                    }
                }
                Ok(())
            })?);
        }
    }
    commit(&args.out, &artifacts)?;

    for (k, v) in certificate_fields(&cert) {
        println!("{k:>10} = {}", sig6(v));
    }
    println!("rate_constant = {}", sig6(cert.rate_constant()));
    for &a in alphas {
        match cert.bound(a) {
            Some(b) => println!("B({}) = {}", sig6(a), sig6(b)),
            None => println!("B({}) = undefined (alpha <= alpha0)", sig6(a)),
        }
    }
    println!("note: {}", CalyxCertificate::THRESHOLD_NOTE);
    Ok(EXIT_OK)
}

pub fn verify(cfg: &ExperimentConfig, args: &CommonArgs) -> Result<u8> {
    let obj = cfg.build_objective()?;
    let mut sim = cfg.sim_config(None, None)?;
    if args.trajectory {
        sim.sample_stride = 1;
    }
    let report = analysis::verify_invariants(&obj, &sim)?;
    let mut artifacts = vec![Artifact::build("verify.csv", |w| {
        writeln!(w, "invariant,passed,worst_residual,threshold")?;
        for c in &report.checks {
            writeln!(w, "{},{},{:.16e},{:.16e}", c.name, c.passed, c.worst_residual, c.threshold)?;
        }
        Ok(())
    })?];
    if args.trajectory {
        if let Some(traj) = &report.outcome.trajectory {
            artifacts.push(trajectory_artifact(traj)?);
        }
    }
    commit(&args.out, &artifacts)?;
    for c in &report.checks {
        println!("{c}");
    }
    println!("stop_reason={} t_final={}", report.outcome.stop_reason, sig6(report.outcome.t_final));
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_INCOMPLETE })
}
