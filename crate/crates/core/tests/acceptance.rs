//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails or exceeds its time budget.

use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cbo_core::analysis::{certify_calyx, oracle_quadratic_bounds, sweep_alpha, verify_invariants};
use cbo_core::objective::table_objective;
use cbo_core::{builtin_objective, reduced_two_particle, simulate, weights, Objective, SimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    title: &'static str,
    budget: Option<Duration>,
    check: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (n - 1) as f64))
        .collect()
}

fn linear_exact() -> Outcome {
    let obj = builtin_objective("linear", &[0.0, 1.0]).map_err(err)?;
    let mut worst = 0.0f64;
    for alpha in [1.0, 10.0, 100.0, 1000.0] {
        let out = reduced_two_particle(&obj, &SimConfig::new(1.0, alpha, vec![0.0, 1.0])).map_err(err)?;
        let exact = (2f64.ln() - (1.0 + (-alpha).exp()).ln()) / alpha;
        let diff = (out.x_inf_estimate - exact).abs();
        ensure(diff < 1e-6, || format!("alpha={alpha}: |{} - {exact}| = {diff:e}", out.x_inf_estimate))?;
        worst = worst.max(diff);
    }
    Ok(format!("max deviation {worst:.2e}"))
}

fn linear_rate() -> Outcome {
    let obj = builtin_objective("linear", &[0.0, 1.0]).map_err(err)?;
    let base = SimConfig::new(1.0, 10.0, vec![0.0, 1.0]);
    let rep = sweep_alpha(&obj, &base, &[10.0, 100.0, 1000.0, 10000.0]).map_err(err)?;
    let slope = rep.fitted_slope.ok_or("slope undefined")?;
    ensure((-1.05..=-0.95).contains(&slope), || format!("slope {slope}"))?;
    Ok(format!("slope {slope:.5}"))
}

fn quadratic_rate() -> Outcome {
    let obj = builtin_objective("quadratic", &[0.0, 1.0]).map_err(err)?;
    let base = SimConfig::new(1.0, 10.0, vec![0.0, 1.0]);
    let rep = sweep_alpha(&obj, &base, &[10.0, 100.0, 1000.0, 10000.0]).map_err(err)?;
    let slope = rep.fitted_slope.ok_or("slope undefined")?;
    ensure((-0.6..=-0.4).contains(&slope), || format!("slope {slope}"))?;
    for row in rep.rows.iter().filter(|r| r.param >= 100.0) {
        let b = oracle_quadratic_bounds(row.param, 1.0);
        ensure(b.lower <= row.abs_error && row.abs_error <= b.upper, || {
            format!("alpha={}: {} not in [{}, {}]", row.param, row.abs_error, b.lower, b.upper)
        })?;
    }
    Ok(format!("slope {slope:.5}, sandwich holds for alpha >= 100"))
}

fn n_particle() -> Outcome {
    let obj = builtin_objective("linear", &[0.0, 1.0]).map_err(err)?;
    let alpha = 5.0;
    let mut prev = f64::NEG_INFINITY;
    let mut worst = 0.0f64;
    for n in [2usize, 4, 8, 16, 32] {
        let mut xs = vec![1.0; n];
        xs[0] = 0.0;
        let out = simulate(&obj, &SimConfig::new(1.0, alpha, xs)).map_err(err)?;
        let e = out.error_to_minimizer.ok_or("no minimizer")?;
        let nf = n as f64;
        let exact = (nf / (1.0 + (nf - 1.0) * (-alpha).exp())).ln() / alpha;
        ensure((e - exact).abs() < 1e-6, || format!("N={n}: {e} vs {exact}"))?;
        ensure(e > prev, || format!("N={n}: error {e} not above {prev}"))?;
        worst = worst.max((e - exact).abs());
        prev = e;
    }
    Ok(format!("max deviation {worst:.2e}, strictly increasing"))
}

fn random_objective(rng: &mut ChaCha8Rng) -> Objective {
    let pick = rng.gen_range(0..6);
    let obj = match pick {
        0 => builtin_objective("linear", &[]),
        1 => builtin_objective("quadratic", &[-1.0, 2.0]),
        2 => builtin_objective("shifted-quadratic", &[0.0, 1.0, rng.gen_range(0.1..0.9), rng.gen_range(0.5..5.0)]),
        3 => builtin_objective("double-well", &[]),
        4 => builtin_objective("rastrigin1d", &[]),
        _ => table_objective(vec![(-1.0, 2.0), (-0.3, 0.4), (0.2, 0.0), (0.6, 0.9), (1.0, 0.5)]),
    };
    obj.expect("builtin")
}

fn a_priori() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let (mut gap, mut order, mut avg) = (0.0f64, 0.0f64, 0.0f64);
    for case in 0..10 {
        let obj = random_objective(&mut rng);
        let (a, b) = obj.domain();
        let n = rng.gen_range(2..=8);
        let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(a..=b)).collect();
        let alpha = 10f64.powf(rng.gen_range(-1.0..3.0));
        let lambda = rng.gen_range(0.5..2.0);
        let cfg = SimConfig {
            dt: 1e-3,
            ..SimConfig::new(lambda, alpha, xs)
        };
        let rep = verify_invariants(&obj, &cfg).map_err(err)?;
        let get = |name| rep.get(name).expect("check present");
        let g = get("gap_decay").worst_residual;
        ensure(g <= 1e-8, || format!("case {case}: gap residual {g:e}"))?;
        ensure(get("order_preservation").passed, || format!("case {case}: order violated"))?;
        // residual is the negated slack, clamped at zero
        let r = get("average_bound").worst_residual;
        ensure(r <= 1e-8, || format!("case {case}: average bound slack {:e}", -r))?;
        gap = gap.max(g);
        order = order.max(get("order_preservation").worst_residual);
        avg = avg.max(r);
    }
    Ok(format!(
        "gap residual {gap:.2e}, order residual {order:.2e}, average bound residual {avg:.2e}"
    ))
}

fn cross_solver() -> Outcome {
    let table: Vec<f64> = vec![-1.0, 2.0, -0.5, 0.3, 0.0, 0.0, 0.7, 0.4, 1.0, 1.5];
    let setups: Vec<(&str, Vec<f64>, Vec<f64>)> = vec![
        ("linear", vec![], vec![0.0, 1.0]),
        ("quadratic", vec![-1.0, 1.0], vec![-0.4, 0.9]),
        ("shifted-quadratic", vec![], vec![0.1, 0.8]),
        ("double-well", vec![], vec![0.1, 0.9]),
        ("rastrigin1d", vec![], vec![-3.3, 2.1]),
        ("custom-table", table, vec![-0.9, 0.8]),
    ];
    let mut configs = Vec::new();
    for (name, params, xs) in &setups {
        for alpha in [1.0, 1e2, 1e4] {
            configs.push((*name, params.clone(), 1.0, alpha, xs.clone()));
        }
    }
    configs.push(("double-well", vec![], 0.5, 1e4, vec![0.3, 0.95]));
    configs.push(("rastrigin1d", vec![-1.5, 1.5, 1.0, 0.0], 3.0, 1e2, vec![-1.2, 0.7]));

    let mut worst = 0.0f64;
    for (name, params, lambda, alpha, xs) in &configs {
        let obj = builtin_objective(name, params).map_err(err)?;
        let cfg = SimConfig::new(*lambda, *alpha, xs.clone());
        let a = simulate(&obj, &cfg).map_err(err)?.x_inf_estimate;
        let b = reduced_two_particle(&obj, &cfg).map_err(err)?.x_inf_estimate;
        ensure((a - b).abs() < 1e-8, || format!("{name} alpha={alpha}: {a} vs {b}"))?;
        worst = worst.max((a - b).abs());
    }
    Ok(format!("{} configurations, max disagreement {worst:.2e}", configs.len()))
}

fn certificate_soundness() -> Outcome {
    let obj = builtin_objective("double-well", &[]).map_err(err)?;
    let cert = certify_calyx(&obj, 10_000).map_err(err)?;
    ensure((cert.alpha0 * cert.r2 * cert.c2 - 1.0).abs() < 1e-12, || "alpha0 r2 c2 != 1".into())?;
    ensure(cert.r2 <= cert.r1, || format!("r2 {} > r1 {}", cert.r2, cert.r1))?;
    let x = cert.x_star;
    let pairs = [
        (0.0, 1.0),
        (0.05, 0.8),
        (0.2, 0.9),
        (0.25, 0.76),
        (0.5, 1.0),
        (0.7, 0.8),
        (0.74, 0.76),
        (0.1, 0.99),
        (0.3, 0.751),
        (0.749, 1.0),
    ];
    // twenty points in (alpha0, 1e6 alpha0], excluding alpha0 itself
    let alphas: Vec<f64> = (1..=20)
        .map(|k| cert.alpha0 * 10f64.powf(6.0 * k as f64 / 20.0))
        .collect();
    let mut worst = 0.0f64;
    for &(x1, x2) in &pairs {
        ensure(x1 < x && x < x2, || format!("pair ({x1}, {x2}) does not straddle {x}"))?;
        for &alpha in &alphas {
            let out = simulate(&obj, &SimConfig::new(1.0, alpha, vec![x1, x2])).map_err(err)?;
            let e = out.error_to_minimizer.ok_or("no minimizer")?;
            let bound = cert.bound(alpha).ok_or("bound undefined above alpha0")?;
            ensure(e <= bound, || format!("({x1}, {x2}) alpha={alpha:e}: {e:e} > {bound:e}"))?;
            worst = worst.max(e / bound);
        }
    }
    Ok(format!("alpha0 {:.4e}, worst error/bound {worst:.3e}", cert.alpha0))
}

fn degenerate_mean() -> Outcome {
    let obj = builtin_objective("double-well", &[]).map_err(err)?;
    let mut worst = 0.0f64;
    for xs in [vec![0.0, 1.0], vec![0.05, 0.9, 0.31, 0.77, 0.5]] {
        let cfg = SimConfig::new(1.0, 0.0, xs.clone());
        let out = simulate(&obj, &cfg).map_err(err)?;
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let d = (out.x_inf_estimate - mean).abs();
        ensure(d <= cfg.gap_tol, || format!("N={}: {} vs mean {mean}", xs.len(), out.x_inf_estimate))?;
        worst = worst.max(d);
    }
    Ok(format!("max deviation {worst:.2e}"))
}

fn weights_stability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let objectives = [
        Objective::new(0.0, 1.0, |x| 1e3 * x).map_err(err)?,
        Objective::new(-1.0, 1.0, |x: f64| 1e3 * (7.0 * x).sin().powi(2)).map_err(err)?,
        Objective::new(0.0, 1.0, |x: f64| if x < 0.5 { 0.0 } else { 1e3 }).map_err(err)?,
    ];
    let mut alphas = vec![0.0];
    alphas.extend(log_grid(-3.0, 6.0, 19));
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for obj in &objectives {
        let (a, b) = obj.domain();
        for &alpha in &alphas {
            for _ in 0..20 {
                let n = rng.gen_range(2..=64);
                let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(a..=b)).collect();
                let w = weights(obj, alpha, &xs).map_err(err)?;
                let psi = w.as_slice();
                ensure(psi.iter().all(|p| p.is_finite() && *p >= 0.0), || {
                    format!("alpha={alpha}: bad entry in {psi:?}")
                })?;
                let dev = (psi.iter().sum::<f64>() - 1.0).abs();
                ensure(dev <= 1e-12, || format!("alpha={alpha}: sum off by {dev:e}"))?;
                worst = worst.max(dev);
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} weight vectors, max |sum - 1| {worst:.2e}"))
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        title: "linear exact formula",
        budget: Some(Duration::from_secs(1)),
        check: linear_exact,
    },
    Criterion {
        title: "alpha^-1 rate, linear",
        budget: Some(Duration::from_secs(5)),
        check: linear_rate,
    },
    Criterion {
        title: "alpha^-1/2 rate, quadratic",
        budget: Some(Duration::from_secs(10)),
        check: quadratic_rate,
    },
    Criterion {
        title: "N-particle closed form",
        budget: Some(Duration::from_secs(10)),
        check: n_particle,
    },
    Criterion {
        title: "a-priori identities",
        budget: Some(Duration::from_secs(30)),
        check: a_priori,
    },
    Criterion {
        title: "cross-solver equivalence",
        budget: Some(Duration::from_secs(30)),
        check: cross_solver,
    },
    Criterion {
        title: "certificate soundness",
        budget: Some(Duration::from_secs(60)),
        check: certificate_soundness,
    },
    Criterion {
        title: "alpha = 0 arithmetic mean",
        budget: Some(Duration::from_secs(1)),
        check: degenerate_mean,
    },
    Criterion {
        title: "weight stability",
        budget: None,
        check: weights_stability,
    },
];

fn main() -> ExitCode {
    // a filter argument from `cargo test <name>` that matches nothing here skips the suite
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !filter.is_empty() && !filter.iter().any(|f| "acceptance".contains(f.as_str())) {
        return ExitCode::SUCCESS;
    }
    let mut failures = 0;
    for (i, c) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(c.check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let over = c.budget.is_some_and(|b| elapsed > b);
        let budget = c.budget.map_or(String::new(), |b| format!(" / {} s", b.as_secs()));
        let (status, detail) = match (&result, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over time budget; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "[{status}] {}. {:<28} {:>7.3} s{budget:<7} {detail}",
            i + 1,
            c.title,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failures, CRITERIA.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
