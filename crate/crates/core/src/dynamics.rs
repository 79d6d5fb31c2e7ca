//! Particle dynamics `x_i' = -lambda (x_i - m(x))` and its two-particle reduction.
//!
//! [`simulate`] advances the full ensemble with a fixed-step explicit scheme
//! until every pairwise gap falls below `gap_tol`. [`reduced_two_particle`]
//! uses the exact gap `tau = (x2 - x1) e^{-lambda t}` as the independent
//! variable, which turns the two-particle system into the scalar equation
//! `dx1/dtau = -psi_2(x1, x1 + tau)`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::objective::{check_alpha, softmax_neg_into, Objective};

/// Domain excursions up to this size are clamped; larger ones abort.
pub const EXCURSION_CLAMP: f64 = 1e-9;
/// A particle has crossed the minimizer once it sits beyond it by more than this.
pub const CROSSING_EPS: f64 = 1e-12;
/// Number of fixed steps the reduced solver takes between the initial gap and `gap_tol`.
pub const REDUCED_STEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    Euler,
    #[default]
    Rk4,
}

impl FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euler" => Ok(Integrator::Euler),
            "rk4" => Ok(Integrator::Rk4),
            other => Err(Error::config("integrator", format!("expected euler or rk4, got `{other}`"))),
        }
    }
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Integrator::Euler => "euler",
            Integrator::Rk4 => "rk4",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub lambda: f64,
    pub alpha: f64,
    pub initial_positions: Vec<f64>,
    pub integrator: Integrator,
    pub dt: f64,
    /// Stop once the largest pairwise gap is below this.
    pub gap_tol: f64,
    pub t_max: f64,
    /// Record every k-th step in the trajectory.
    pub sample_stride: usize,
    pub record_trajectory: bool,
}

impl SimConfig {
    /// RK4 with `dt = 1e-3 / lambda`, `gap_tol = 1e-10` and `t_max = 200 / lambda`.
    pub fn new(lambda: f64, alpha: f64, initial_positions: Vec<f64>) -> Self {
        Self {
            lambda,
            alpha,
            initial_positions,
            integrator: Integrator::Rk4,
            dt: 1e-3 / lambda,
            gap_tol: 1e-10,
            t_max: 200.0 / lambda,
            sample_stride: 1,
            record_trajectory: false,
        }
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self {
            alpha,
            ..self.clone()
        }
    }

    pub fn with_positions(&self, initial_positions: Vec<f64>) -> Self {
        Self {
            initial_positions,
            ..self.clone()
        }
    }

    pub fn n(&self) -> usize {
        self.initial_positions.len()
    }

    /// Checks the configuration on its own, without an objective.
    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(field, format!("must be a positive finite number, got {v}")))
            }
        };
        positive("lambda", self.lambda)?;
        positive("dt", self.dt)?;
        positive("gap_tol", self.gap_tol)?;
        positive("t_max", self.t_max)?;
        check_alpha(self.alpha)?;
        if self.sample_stride == 0 {
            return Err(Error::config("sample_stride", "must be at least 1"));
        }
        if self.initial_positions.len() < 2 {
            return Err(Error::config(
                "initial_positions",
                format!("need at least 2 particles, got {}", self.initial_positions.len()),
            ));
        }
        if let Some(x) = self.initial_positions.iter().find(|x| !x.is_finite()) {
            return Err(Error::config("initial_positions", format!("non-finite entry {x}")));
        }
        if self.dt * self.lambda >= 1.0 {
            return Err(Error::config(
                "dt",
                format!("dt * lambda = {} must be < 1", self.dt * self.lambda),
            ));
        }
        Ok(())
    }

    /// Checks the configuration against the objective's domain as well.
    pub fn validate_for(&self, obj: &Objective) -> Result<()> {
        self.validate()?;
        let (lo, hi) = obj.domain();
        if let Some(&x) = self.initial_positions.iter().find(|&&x| !obj.contains(x)) {
            return Err(Error::OutsideDomain { x, lo, hi });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    GapConverged,
    TMaxReached,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::GapConverged => "gap_converged",
            StopReason::TMaxReached => "t_max_reached",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub consensus_values: Vec<f64>,
}

impl Trajectory {
    fn push(&mut self, t: f64, x: &[f64], m: f64) {
        if self.times.last().is_some_and(|&last| t <= last) {
            return;
        }
        self.times.push(t);
        self.states.push(x.to_vec());
        self.consensus_values.push(m);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Writes `t,x_1,...,x_N,m,gap_max` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.states.first().map_or(0, Vec::len);
        let mut header = String::from("t");
        for i in 1..=n {
            header.push_str(&format!(",x_{i}"));
        }
        header.push_str(",m,gap_max");
        writeln!(w, "{header}")?;
        for ((t, x), m) in self.times.iter().zip(&self.states).zip(&self.consensus_values) {
            write!(w, "{t:.16e}")?;
            for xi in x {
                write!(w, ",{xi:.16e}")?;
            }
            writeln!(w, ",{m:.16e},{:.16e}", spread(x))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub x_inf_estimate: f64,
    pub final_gap: f64,
    pub stop_reason: StopReason,
    pub error_to_minimizer: Option<f64>,
    pub t_final: f64,
    pub steps: usize,
    /// Per particle, the first step time at which it sat strictly beyond the
    /// known minimizer on the side opposite to where it started. Empty when
    /// the objective has no known minimizer.
    pub crossing_times: Vec<Option<f64>>,
    pub trajectory: Option<Trajectory>,
}

/// `x0_gap * exp(-lambda t)`, the exact evolution of any pairwise difference.
pub fn analytic_gap(x0_gap: f64, lambda: f64, t: f64) -> f64 {
    x0_gap * (-lambda * t).exp()
}

pub(crate) fn spread(x: &[f64]) -> f64 {
    let (lo, hi) = bounds(x);
    hi - lo
}

fn bounds(x: &[f64]) -> (f64, f64) {
    x.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Evaluates the vector field and keeps scratch space between calls.
struct Field<'a> {
    obj: &'a Objective,
    alpha: f64,
    lambda: f64,
    fvals: Vec<f64>,
    psi: Vec<f64>,
}

impl<'a> Field<'a> {
    fn new(obj: &'a Objective, alpha: f64, lambda: f64, n: usize) -> Self {
        Self {
            obj,
            alpha,
            lambda,
            fvals: vec![0.0; n],
            psi: vec![0.0; n],
        }
    }

    /// Consensus point of `x`: (raw weighted sum, value clamped to the hull).
    fn consensus(&mut self, x: &[f64]) -> Result<(f64, f64)> {
        for (fv, &xi) in self.fvals.iter_mut().zip(x) {
            let v = self.obj.eval_unchecked(xi);
            if !v.is_finite() {
                return Err(Error::NonFiniteObjective { x: xi });
            }
            *fv = v;
        }
        softmax_neg_into(self.alpha, &self.fvals, &mut self.psi);
        // Summing offsets from x[0] keeps equal positions exactly fixed.
        let base = x[0];
        let raw = base
            + x.iter()
                .zip(&self.psi)
                .map(|(&xi, &p)| p * (xi - base))
                .sum::<f64>();
        let (lo, hi) = bounds(x);
        Ok((raw, raw.clamp(lo, hi)))
    }

    fn velocity(&mut self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let (_, m) = self.consensus(x)?;
        for (v, &xi) in out.iter_mut().zip(x) {
            *v = -self.lambda * (xi - m);
        }
        Ok(())
    }
}

struct Stepper {
    k: [Vec<f64>; 4],
    stage: Vec<f64>,
}

impl Stepper {
    fn new(n: usize) -> Self {
        Self {
            k: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            stage: vec![0.0; n],
        }
    }

    fn advance(&mut self, field: &mut Field<'_>, integrator: Integrator, dt: f64, x: &mut [f64]) -> Result<()> {
        match integrator {
            Integrator::Euler => {
                field.velocity(x, &mut self.k[0])?;
                for (xi, ki) in x.iter_mut().zip(&self.k[0]) {
                    *xi += dt * ki;
                }
            }
            Integrator::Rk4 => {
                let [k1, k2, k3, k4] = &mut self.k;
                field.velocity(x, k1)?;
                for ((s, &xi), &ki) in self.stage.iter_mut().zip(x.iter()).zip(k1.iter()) {
                    *s = xi + 0.5 * dt * ki;
                }
                field.velocity(&self.stage, k2)?;
                for ((s, &xi), &ki) in self.stage.iter_mut().zip(x.iter()).zip(k2.iter()) {
                    *s = xi + 0.5 * dt * ki;
                }
                field.velocity(&self.stage, k3)?;
                for ((s, &xi), &ki) in self.stage.iter_mut().zip(x.iter()).zip(k3.iter()) {
                    *s = xi + dt * ki;
                }
                field.velocity(&self.stage, k4)?;
                for (i, xi) in x.iter_mut().enumerate() {
                    *xi += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
        }
        Ok(())
    }
}

fn confine(obj: &Objective, x: &mut [f64], t: f64, step: usize) -> Result<()> {
    let (lo, hi) = obj.domain();
    for xi in x.iter_mut() {
        if !xi.is_finite() {
            return Err(Error::NonFinitePosition { step });
        }
        let excess = (lo - *xi).max(*xi - hi);
        if excess > EXCURSION_CLAMP {
            return Err(Error::DomainExcursion { t, excess });
        }
        if excess > 0.0 {
            *xi = xi.clamp(lo, hi);
        }
    }
    Ok(())
}

/// One explicit step of size `cfg.dt` from `positions`.
pub fn step(obj: &Objective, cfg: &SimConfig, positions: &[f64]) -> Result<Vec<f64>> {
    cfg.validate()?;
    if positions.is_empty() {
        return Err(Error::EmptyPositions);
    }
    let (lo, hi) = obj.domain();
    if let Some(&x) = positions.iter().find(|&&x| !obj.contains(x)) {
        return Err(Error::OutsideDomain { x, lo, hi });
    }
    let mut field = Field::new(obj, cfg.alpha, cfg.lambda, positions.len());
    let mut stepper = Stepper::new(positions.len());
    let mut x = positions.to_vec();
    stepper.advance(&mut field, cfg.integrator, cfg.dt, &mut x)?;
    confine(obj, &mut x, cfg.dt, 1)?;
    Ok(x)
}

/// Worst residuals of the a-priori identities seen along a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Residuals {
    /// max over pairs of |(x_i - x_j)(t) - (x_i - x_j)(0) e^{-lambda t}|
    pub gap_decay: f64,
    /// largest amount by which two initially ordered particles swapped
    pub order: f64,
    /// largest distance of the raw consensus point outside the hull
    pub hull: f64,
    /// smallest value of |x̄0| + G (1 - e^{-lambda t}) - |x̄_t|
    pub average_slack: f64,
    /// largest value of |x_i(t)| - (|x̄0| + G)
    pub uniform_excess: f64,
}

/// Mean computed as offsets from the first entry, exact for equal entries.
fn offset_mean(x: &[f64]) -> f64 {
    let base = x[0];
    base + x.iter().map(|v| v - base).sum::<f64>() / x.len() as f64
}

/// Tracks the a-priori identities along a run.
struct Monitor {
    x0: Vec<f64>,
    order: Vec<usize>,
    mean0_abs: f64,
    gap0: f64,
    lambda: f64,
    minimizer: Option<f64>,
    side0: Vec<f64>,
    crossings: Vec<Option<f64>>,
    res: Residuals,
}

impl Monitor {
    fn new(x0: &[f64], lambda: f64, minimizer: Option<f64>) -> Self {
        let mut order: Vec<usize> = (0..x0.len()).collect();
        order.sort_by(|&a, &b| x0[a].total_cmp(&x0[b]));
        let mean0 = offset_mean(x0);
        let (side0, crossings) = match minimizer {
            Some(xs) => x0
                .iter()
                .map(|&x| {
                    let d = x - xs;
                    if d.abs() <= CROSSING_EPS {
                        // starting on the minimizer counts as having reached it
                        (0.0, Some(0.0))
                    } else {
                        (d.signum(), None)
                    }
                })
                .unzip(),
            None => (Vec::new(), Vec::new()),
        };
        Self {
            x0: x0.to_vec(),
            order,
            mean0_abs: mean0.abs(),
            gap0: spread(x0),
            lambda,
            minimizer,
            side0,
            crossings,
            res: Residuals {
                average_slack: f64::INFINITY,
                ..Residuals::default()
            },
        }
    }

    fn observe(&mut self, t: f64, x: &[f64], m_raw: f64) -> &Residuals {
        let decay = (-self.lambda * t).exp();
        let (dlo, dhi) = x
            .iter()
            .zip(&self.x0)
            .map(|(&xi, &x0i)| xi - x0i * decay)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)));
        let r = &mut self.res;
        r.gap_decay = r.gap_decay.max(dhi - dlo);

        for w in self.order.windows(2) {
            r.order = r.order.max(x[w[0]] - x[w[1]]);
        }

        let (lo, hi) = bounds(x);
        r.hull = r.hull.max(lo - m_raw).max(m_raw - hi);

        let mean = offset_mean(x);
        let slack = self.mean0_abs + self.gap0 * (1.0 - decay) - mean.abs();
        r.average_slack = r.average_slack.min(slack);
        let reach = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        r.uniform_excess = r.uniform_excess.max(reach - (self.mean0_abs + self.gap0));

        if let Some(xs) = self.minimizer {
            for ((c, &side), &xi) in self.crossings.iter_mut().zip(&self.side0).zip(x) {
                if c.is_none() && side * (xs - xi) > CROSSING_EPS {
                    *c = Some(t);
                }
            }
        }
        &self.res
    }
}

/// Abort thresholds for the in-run guard.
struct Guard {
    gap: f64,
    order: f64,
    uniform: f64,
}

impl Guard {
    fn new(cfg: &SimConfig, x0: &[f64]) -> Self {
        let gap0 = spread(x0);
        let scale = 1.0 + x0.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let h = cfg.lambda * cfg.dt;
        let rel = match cfg.integrator {
            Integrator::Euler => 0.5 * h,
            Integrator::Rk4 => h.powi(4),
        };
        Self {
            gap: gap0 * rel + 1e-9 * scale,
            order: 1e-12 * scale,
            uniform: 10.0 * cfg.dt,
        }
    }

    fn check(&self, r: &Residuals, t: f64) -> Result<()> {
        let fail = |name, residual| Err(Error::InvariantViolation { name, t, residual });
        if r.gap_decay > self.gap {
            return fail("gap_decay", r.gap_decay);
        }
        if r.order > self.order {
            return fail("order_preservation", r.order);
        }
        if r.average_slack < -self.gap {
            return fail("average_bound", -r.average_slack);
        }
        if r.uniform_excess > self.uniform {
            return fail("uniform_boundedness", r.uniform_excess);
        }
        Ok(())
    }
}

pub(crate) struct Run {
    pub outcome: SimOutcome,
    pub residuals: Residuals,
}

/// Shared integration loop. With `guard` set, invariant violations abort.
pub(crate) fn integrate(obj: &Objective, cfg: &SimConfig, guard: bool, record: bool) -> Result<Run> {
    cfg.validate_for(obj)?;
    let n = cfg.n();
    let mut x = cfg.initial_positions.clone();
    let mut field = Field::new(obj, cfg.alpha, cfg.lambda, n);
    let mut stepper = Stepper::new(n);
    let mut monitor = Monitor::new(&x, cfg.lambda, obj.known_minimizer());
    let limits = guard.then(|| Guard::new(cfg, &x));
    let mut traj = record.then(Trajectory::default);

    let mut steps = 0usize;
    let mut t = 0.0;
    let (m_raw, m) = field.consensus(&x)?;
    monitor.observe(t, &x, m_raw);
    if let Some(tr) = traj.as_mut() {
        tr.push(t, &x, m);
    }
    let mut m_last = m;
    let t_stop = cfg.t_max * (1.0 - 1e-12);

    let stop_reason = loop {
        if spread(&x) < cfg.gap_tol {
            break StopReason::GapConverged;
        }
        if t >= t_stop {
            break StopReason::TMaxReached;
        }
        stepper.advance(&mut field, cfg.integrator, cfg.dt, &mut x)?;
        steps += 1;
        t = steps as f64 * cfg.dt;
        confine(obj, &mut x, t, steps)?;
        let (m_raw, m) = field.consensus(&x)?;
        m_last = m;
        let res = monitor.observe(t, &x, m_raw);
        if let Some(g) = &limits {
            g.check(res, t)?;
        }
        if let Some(tr) = traj.as_mut() {
            if steps.is_multiple_of(cfg.sample_stride) {
                tr.push(t, &x, m);
            }
        }
    };
    if let Some(tr) = traj.as_mut() {
        tr.push(t, &x, m_last);
    }

    let x_inf = m_last;
    Ok(Run {
        outcome: SimOutcome {
            x_inf_estimate: x_inf,
            final_gap: spread(&x),
            stop_reason,
            error_to_minimizer: obj.known_minimizer().map(|xs| (x_inf - xs).abs()),
            t_final: t,
            steps,
            crossing_times: monitor.crossings.clone(),
            trajectory: traj,
        },
        residuals: monitor.res,
    })
}

/// Integrates the ensemble until consensus (or `t_max`), checking the
/// a-priori identities at every step.
pub fn simulate(obj: &Objective, cfg: &SimConfig) -> Result<SimOutcome> {
    integrate(obj, cfg, true, cfg.record_trajectory).map(|r| r.outcome)
}

/// `psi_2` for two particles at `x1 < x2`, as a logistic in the objective gap.
#[inline]
fn psi_upper(obj: &Objective, alpha: f64, x1: f64, x2: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Ok(0.5);
    }
    let f1 = obj.eval_unchecked(x1);
    let f2 = obj.eval_unchecked(x2);
    if !f1.is_finite() {
        return Err(Error::NonFiniteObjective { x: x1 });
    }
    if !f2.is_finite() {
        return Err(Error::NonFiniteObjective { x: x2 });
    }
    let z = alpha * (f2 - f1);
    Ok(if z > 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    })
}

/// Two-particle solver in the gap variable, using [`REDUCED_STEPS`] steps.
pub fn reduced_two_particle(obj: &Objective, cfg: &SimConfig) -> Result<SimOutcome> {
    reduced_two_particle_with_steps(obj, cfg, REDUCED_STEPS)
}

/// Two-particle solver with an explicit step count.
///
/// Integrates `dx1/du = -tau psi_2(x1, x1 + tau)` with `u = ln tau` by
/// fixed-step RK4 from the initial gap down to `gap_tol / 2`, then adds the
/// consensus offset `psi_2 tau` of the final state. `lambda` only enters the
/// reported times.
pub fn reduced_two_particle_with_steps(obj: &Objective, cfg: &SimConfig, steps: usize) -> Result<SimOutcome> {
    cfg.validate_for(obj)?;
    if cfg.n() != 2 {
        return Err(Error::config(
            "initial_positions",
            format!("the reduced solver needs exactly 2 particles, got {}", cfg.n()),
        ));
    }
    if steps == 0 {
        return Err(Error::config("steps", "must be at least 1"));
    }
    let (a, b) = {
        let p = &cfg.initial_positions;
        (p[0].min(p[1]), p[0].max(p[1]))
    };
    let alpha = cfg.alpha;
    let tau0 = b - a;
    let mut monitor = Monitor::new(&[a, b], cfg.lambda, obj.known_minimizer());
    let mut traj = cfg.record_trajectory.then(Trajectory::default);
    let consensus = |x1: f64, tau: f64| -> Result<f64> {
        Ok(x1 + psi_upper(obj, alpha, x1, x1 + tau)? * tau)
    };

    let mut x1 = a;
    let mut tau = tau0;
    let mut taken = 0usize;
    if let Some(tr) = traj.as_mut() {
        tr.push(0.0, &[a, b], consensus(a, tau0)?);
    }

    if tau0 >= cfg.gap_tol {
        let u0 = tau0.ln();
        let u1 = (0.5 * cfg.gap_tol).ln();
        let h = (u1 - u0) / steps as f64;
        let rhs = |x: f64, u: f64| -> Result<f64> {
            let tau = u.exp();
            Ok(-tau * psi_upper(obj, alpha, x, x + tau)?)
        };
        for k in 0..steps {
            let u = u0 + k as f64 * h;
            let k1 = rhs(x1, u)?;
            let k2 = rhs(x1 + 0.5 * h * k1, u + 0.5 * h)?;
            let k3 = rhs(x1 + 0.5 * h * k2, u + 0.5 * h)?;
            let k4 = rhs(x1 + h * k3, u + h)?;
            x1 += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if !x1.is_finite() {
                return Err(Error::NonFinitePosition { step: k + 1 });
            }
            taken = k + 1;
            let u_next = if taken == steps { u1 } else { u0 + taken as f64 * h };
            tau = u_next.exp();
            let t = (tau0 / tau).ln() / cfg.lambda;
            monitor.observe(t, &[x1, x1 + tau], x1);
            if let Some(tr) = traj.as_mut() {
                if taken.is_multiple_of(cfg.sample_stride) || taken == steps {
                    tr.push(t, &[x1, x1 + tau], consensus(x1, tau)?);
                }
            }
        }
    }

    let x_inf = consensus(x1, tau)?;
    Ok(SimOutcome {
        x_inf_estimate: x_inf,
        final_gap: tau,
        stop_reason: StopReason::GapConverged,
        error_to_minimizer: obj.known_minimizer().map(|xs| (x_inf - xs).abs()),
        t_final: (tau0 / tau).ln().max(0.0) / cfg.lambda,
        steps: taken,
        crossing_times: monitor.crossings,
        trajectory: traj,
    })
}
