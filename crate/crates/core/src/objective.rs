//! Objective functions on a closed interval and the softmax weights they induce.
//!
//! The weight of a particle at `x` is `exp(-alpha * f(x))`, normalised over the
//! ensemble. Weights are computed relative to the smallest objective value in
//! the ensemble, so the largest unnormalised weight is exactly one and the
//! denominator never underflows, whatever the size of `alpha`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Slack allowed when checking that a position lies in the domain.
pub const DOMAIN_SLACK: f64 = 1e-9;

/// Which family an objective belongs to. Analysis code uses this to attach
/// closed-form bounds to builtins.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveKind {
    /// `f(x) = x - a`.
    Linear,
    /// `f(x) = k (x - c)^2`.
    Quadratic { center: f64, curvature: f64 },
    /// `f(x) = s (x - g)^2 ((x - l)^2 + h)`.
    DoubleWell,
    /// `f(x) = (x - c)^2 + A (1 - cos(2 pi (x - c)))`.
    Rastrigin,
    /// `f(x) = k (x - c)^4`, degenerate curvature at the minimizer.
    Quartic,
    /// Piecewise-linear interpolation of a table.
    Table,
    /// User-supplied closure.
    Custom,
}

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct Objective {
    lo: f64,
    hi: f64,
    eval: EvalFn,
    known_minimizer: Option<f64>,
    lipschitz_hint: Option<f64>,
    kind: ObjectiveKind,
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("domain", &(self.lo, self.hi))
            .field("kind", &self.kind)
            .field("known_minimizer", &self.known_minimizer)
            .field("lipschitz_hint", &self.lipschitz_hint)
            .finish()
    }
}

impl Objective {
    /// Wraps an arbitrary function on `[lo, hi]`. Values need not be
    /// nonnegative: every downstream quantity is invariant under constant shifts.
    pub fn new<F>(lo: f64, hi: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::params(
                "custom",
                format!("domain [{lo}, {hi}] must be finite with lo < hi"),
            ));
        }
        Ok(Self {
            lo,
            hi,
            eval: Arc::new(f),
            known_minimizer: None,
            lipschitz_hint: None,
            kind: ObjectiveKind::Custom,
        })
    }

    pub fn with_minimizer(mut self, x: f64) -> Result<Self> {
        if !(x >= self.lo && x <= self.hi) {
            return Err(Error::MinimizerOutsideDomain {
                x,
                lo: self.lo,
                hi: self.hi,
            });
        }
        self.known_minimizer = Some(x);
        Ok(self)
    }

    pub fn with_lipschitz(mut self, l: f64) -> Result<Self> {
        if !(l.is_finite() && l >= 0.0) {
            return Err(Error::params("custom", "lipschitz hint must be finite and >= 0"));
        }
        self.lipschitz_hint = Some(l);
        Ok(self)
    }

    fn with_kind(mut self, kind: ObjectiveKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn known_minimizer(&self) -> Option<f64> {
        self.known_minimizer
    }

    pub fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz_hint
    }

    pub fn kind(&self) -> &ObjectiveKind {
        &self.kind
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo - DOMAIN_SLACK && x <= self.hi + DOMAIN_SLACK
    }

    /// Raw evaluation without the finiteness guard.
    #[inline]
    pub fn eval_unchecked(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Evaluates `f(x)`, rejecting non-finite results.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = (self.eval)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteObjective { x })
        }
    }

    /// Normalised weights of the particles at `positions`.
    pub fn weights(&self, alpha: f64, positions: &[f64]) -> Result<WeightVector> {
        weights(self, alpha, positions)
    }
}

/// Normalised particle weights; entries lie in `[0, 1]` and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub psi: Vec<f64>,
}

impl WeightVector {
    /// Wraps raw weights after checking the simplex property.
    pub fn new(psi: Vec<f64>) -> Result<Self> {
        if psi.is_empty() {
            return Err(Error::EmptyPositions);
        }
        let sum: f64 = psi.iter().sum();
        if psi.iter().any(|w| !(0.0..=1.0).contains(w)) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::params("weights", "entries must lie in [0, 1] and sum to 1"));
        }
        Ok(Self { psi })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            psi: vec![1.0 / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.psi
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(Error::config("alpha", format!("must be finite and >= 0, got {alpha}")))
    }
}

/// Softmax of `-alpha * f` written into `out`, shifted by the minimum of `f`.
///
/// `fvals` and `out` must have the same nonzero length and `fvals` must be finite.
pub(crate) fn softmax_neg_into(alpha: f64, fvals: &[f64], out: &mut [f64]) {
    debug_assert_eq!(fvals.len(), out.len());
    let fmin = fvals.iter().copied().fold(f64::INFINITY, f64::min);
    let mut sum = 0.0;
    for (o, &fv) in out.iter_mut().zip(fvals) {
        let w = if alpha == 0.0 {
            1.0
        } else {
            (-alpha * (fv - fmin)).exp()
        };
        *o = w;
        sum += w;
    }
    // sum >= 1: the minimising particle contributes exp(0).
    for o in out.iter_mut() {
        *o /= sum;
    }
}

/// Normalised weights `exp(-alpha f(x_i)) / sum_k exp(-alpha f(x_k))`.
pub fn weights(obj: &Objective, alpha: f64, positions: &[f64]) -> Result<WeightVector> {
    if positions.is_empty() {
        return Err(Error::EmptyPositions);
    }
    check_alpha(alpha)?;
    let mut fvals = Vec::with_capacity(positions.len());
    for &x in positions {
        if !obj.contains(x) {
            return Err(Error::OutsideDomain {
                x,
                lo: obj.lo,
                hi: obj.hi,
            });
        }
        fvals.push(obj.eval(x)?);
    }
    let mut psi = vec![0.0; positions.len()];
    softmax_neg_into(alpha, &fvals, &mut psi);
    Ok(WeightVector { psi })
}

/// Weighted average `sum_i x_i psi_i`, kept inside the hull of the positions.
pub fn consensus_point(positions: &[f64], w: &WeightVector) -> Result<f64> {
    if positions.len() != w.len() {
        return Err(Error::LengthMismatch {
            left: positions.len(),
            right: w.len(),
        });
    }
    if positions.is_empty() {
        return Err(Error::EmptyPositions);
    }
    Ok(weighted_mean(positions, &w.psi))
}

#[inline]
pub(crate) fn weighted_mean(positions: &[f64], psi: &[f64]) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut m = 0.0;
    for (&x, &p) in positions.iter().zip(psi) {
        m += x * p;
        lo = lo.min(x);
        hi = hi.max(x);
    }
    m.clamp(lo, hi)
}

/// Names accepted by [`builtin_objective`].
pub const BUILTIN_NAMES: &[&str] = &[
    "linear",
    "quadratic",
    "shifted-quadratic",
    "double-well",
    "rastrigin1d",
    "quartic",
    "custom-table",
];

fn domain_from(name: &str, params: &[f64], default: (f64, f64)) -> Result<(f64, f64)> {
    let (lo, hi) = match params {
        [] | [_] => default,
        [lo, hi, ..] => (*lo, *hi),
    };
    if params.len() == 1 {
        return Err(Error::params(name, "expected both domain endpoints"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::params(name, format!("domain [{lo}, {hi}] must satisfy lo < hi")));
    }
    Ok((lo, hi))
}

fn param(name: &str, params: &[f64], idx: usize, default: f64) -> Result<f64> {
    let v = params.get(idx).copied().unwrap_or(default);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::params(name, format!("parameter {idx} is not finite")))
    }
}

fn check_max_params(name: &str, params: &[f64], max: usize) -> Result<()> {
    if params.len() > max {
        Err(Error::params(name, format!("expected at most {max} parameters, got {}", params.len())))
    } else {
        Ok(())
    }
}

fn require_inside(x: f64, lo: f64, hi: f64) -> Result<()> {
    if x >= lo && x <= hi {
        Ok(())
    } else {
        Err(Error::MinimizerOutsideDomain { x, lo, hi })
    }
}

/// Builds one of the catalogue objectives.
///
/// Parameter layouts (all optional, defaults in brackets):
///
/// | name                | params                                          |
/// |---------------------|-------------------------------------------------|
/// | `linear`            | `a, b` [0, 1]                                   |
/// | `quadratic`         | `a, b` [0, 1]                                   |
/// | `shifted-quadratic` | `a, b, center, curvature` [0, 1, 0.5, 1]        |
/// | `double-well`       | `a, b, local, global, h, scale` [0, 1, 0.25, 0.75, 0.01, 1] |
/// | `rastrigin1d`       | `a, b, amplitude, center` [-5.12, 5.12, 10, 0]  |
/// | `quartic`           | `a, b, center, k` [-1, 1, 0, 1]                 |
/// | `custom-table`      | flattened pairs `x0, f0, x1, f1, ...`           |
pub fn builtin_objective(name: &str, params: &[f64]) -> Result<Objective> {
    match name {
        "linear" => {
            check_max_params(name, params, 2)?;
            let (a, b) = domain_from(name, params, (0.0, 1.0))?;
            Objective::new(a, b, move |x| x - a)?
                .with_minimizer(a)?
                .with_lipschitz(1.0)
                .map(|o| o.with_kind(ObjectiveKind::Linear))
        }
        "quadratic" => {
            check_max_params(name, params, 2)?;
            let (a, b) = domain_from(name, params, (0.0, 1.0))?;
            quadratic_family(a, b, 0.0, 1.0)
        }
        "shifted-quadratic" => {
            check_max_params(name, params, 4)?;
            let (a, b) = domain_from(name, params, (0.0, 1.0))?;
            let center = param(name, params, 2, 0.5)?;
            let curvature = param(name, params, 3, 1.0)?;
            if curvature <= 0.0 {
                return Err(Error::params(name, "curvature must be positive"));
            }
            quadratic_family(a, b, center, curvature)
        }
        "double-well" => {
            check_max_params(name, params, 6)?;
            let (a, b) = domain_from(name, params, (0.0, 1.0))?;
            let local = param(name, params, 2, 0.25)?;
            let global = param(name, params, 3, 0.75)?;
            let h = param(name, params, 4, 0.01)?;
            let scale = param(name, params, 5, 1.0)?;
            if h <= 0.0 || scale <= 0.0 {
                return Err(Error::params(name, "h and scale must be positive"));
            }
            require_inside(global, a, b)?;
            // Zero only at `global`; a shallower well sits near `local` when h is small.
            let d = b - a;
            let lip = scale * (2.0 * d * (d * d + h) + 2.0 * d * d * d);
            Objective::new(a, b, move |x| {
                let g = x - global;
                let l = x - local;
                scale * g * g * (l * l + h)
            })?
            .with_minimizer(global)?
            .with_lipschitz(lip)
            .map(|o| o.with_kind(ObjectiveKind::DoubleWell))
        }
        "rastrigin1d" => {
            check_max_params(name, params, 4)?;
            let (a, b) = domain_from(name, params, (-5.12, 5.12))?;
            let amplitude = param(name, params, 2, 10.0)?;
            let center = param(name, params, 3, 0.0)?;
            if amplitude < 0.0 {
                return Err(Error::params(name, "amplitude must be nonnegative"));
            }
            require_inside(center, a, b)?;
            let reach = (a - center).abs().max((b - center).abs());
            let lip = 2.0 * reach + 2.0 * PI * amplitude;
            Objective::new(a, b, move |x| {
                let y = x - center;
                y * y + amplitude * (1.0 - (2.0 * PI * y).cos())
            })?
            .with_minimizer(center)?
            .with_lipschitz(lip)
            .map(|o| o.with_kind(ObjectiveKind::Rastrigin))
        }
        "quartic" => {
            check_max_params(name, params, 4)?;
            let (a, b) = domain_from(name, params, (-1.0, 1.0))?;
            let center = param(name, params, 2, 0.0)?;
            let k = param(name, params, 3, 1.0)?;
            if k <= 0.0 {
                return Err(Error::params(name, "k must be positive"));
            }
            require_inside(center, a, b)?;
            let reach = (a - center).abs().max((b - center).abs());
            Objective::new(a, b, move |x| {
                let y = (x - center) * (x - center);
                k * y * y
            })?
            .with_minimizer(center)?
            .with_lipschitz(4.0 * k * reach.powi(3))
            .map(|o| o.with_kind(ObjectiveKind::Quartic))
        }
        "custom-table" => {
            if !params.len().is_multiple_of(2) {
                return Err(Error::params(name, "expected an even number of values (x, f pairs)"));
            }
            let pairs: Vec<(f64, f64)> = params.chunks_exact(2).map(|c| (c[0], c[1])).collect();
            table_objective(pairs)
        }
        other => Err(Error::UnknownObjective(other.to_string())),
    }
}

fn quadratic_family(a: f64, b: f64, center: f64, curvature: f64) -> Result<Objective> {
    require_inside(center, a, b)?;
    let reach = (a - center).abs().max((b - center).abs());
    Objective::new(a, b, move |x| curvature * (x - center) * (x - center))?
        .with_minimizer(center)?
        .with_lipschitz(2.0 * curvature * reach)
        .map(|o| o.with_kind(ObjectiveKind::Quadratic { center, curvature }))
}

/// Piecewise-linear objective through `(x, f)` pairs with strictly increasing `x`.
///
/// Values are shifted so the table minimum is zero. The minimum must be
/// attained at a single node.
pub fn table_objective(pairs: Vec<(f64, f64)>) -> Result<Objective> {
    if pairs.len() < 2 {
        return Err(Error::Table("need at least two rows".into()));
    }
    if pairs.iter().any(|(x, f)| !x.is_finite() || !f.is_finite()) {
        return Err(Error::Table("non-finite entry".into()));
    }
    if pairs.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Table("x column must be strictly increasing".into()));
    }
    let fmin = pairs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let argmins: Vec<f64> = pairs.iter().filter(|p| p.1 == fmin).map(|p| p.0).collect();
    if argmins.len() != 1 {
        return Err(Error::Table("minimum value is attained at more than one node".into()));
    }
    let lip = pairs
        .windows(2)
        .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
        .fold(0.0, f64::max);
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let fs: Vec<f64> = pairs.iter().map(|p| p.1 - fmin).collect();
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    Objective::new(lo, hi, move |x| interpolate(&xs, &fs, x))?
        .with_minimizer(argmins[0])?
        .with_lipschitz(lip)
        .map(|o| o.with_kind(ObjectiveKind::Table))
}

fn interpolate(xs: &[f64], fs: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return fs[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return fs[last];
    }
    let k = xs.partition_point(|&v| v <= x);
    let (x0, x1) = (xs[k - 1], xs[k]);
    let s = (x - x0) / (x1 - x0);
    fs[k - 1] + s * (fs[k] - fs[k - 1])
}

/// Reads a two-column `x,f` CSV. A non-numeric first row is treated as a header.
pub fn read_table_csv(path: impl AsRef<Path>) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path.as_ref())?;
    let mut pairs = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::Table(format!("row {}: expected 2 columns, got {}", i + 1, rec.len())));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(x), Ok(f)) => pairs.push((x, f)),
            _ if i == 0 => continue,
            _ => return Err(Error::Table(format!("row {}: not a number", i + 1))),
        }
    }
    Ok(pairs)
}

pub fn table_objective_from_csv(path: impl AsRef<Path>) -> Result<Objective> {
    table_objective(read_table_csv(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    #[test]
    fn linear_and_quadratic_catalogue_entries() {
        let lin = builtin_objective("linear", &[0.0, 1.0]).unwrap();
        assert_eq!(lin.known_minimizer(), Some(0.0));
        assert_eq!(lin.eval(0.3).unwrap(), 0.3);
        let q = builtin_objective("quadratic", &[]).unwrap();
        assert_eq!(q.known_minimizer(), Some(0.0));
        assert_eq!(q.eval(0.5).unwrap(), 0.25);
        assert_eq!(q.domain(), (0.0, 1.0));
    }

    #[test]
    fn double_well_global_minimum() {
        let dw = builtin_objective("double-well", &[]).unwrap();
        assert_eq!(dw.known_minimizer(), Some(0.75));
        assert_eq!(dw.eval(0.75).unwrap(), 0.0);
        // a local well near 0.25 that is strictly higher than the global one
        let local = (0..=500)
            .map(|i| i as f64 / 1000.0)
            .map(|x| dw.eval(x).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(local > 0.0);
        let bump = dw.eval(0.45).unwrap();
        assert!(bump > dw.eval(0.27).unwrap());
        for i in 0..=1000 {
            assert!(dw.eval(i as f64 / 1000.0).unwrap() >= 0.0);
        }
    }

    #[test]
    fn catalogue_errors() {
        assert!(matches!(
            builtin_objective("sphere", &[]),
            Err(Error::UnknownObjective(_))
        ));
        assert!(matches!(
            builtin_objective("quadratic", &[1.0, 2.0]),
            Err(Error::MinimizerOutsideDomain { .. })
        ));
        assert!(matches!(
            builtin_objective("double-well", &[0.0, 1.0, 0.25, 1.5]),
            Err(Error::MinimizerOutsideDomain { .. })
        ));
        assert!(builtin_objective("linear", &[1.0, 0.0]).is_err());
        assert!(builtin_objective("linear", &[0.0]).is_err());
    }

    #[test]
    fn uniform_weights_at_alpha_zero() {
        let q = builtin_objective("quadratic", &[]).unwrap();
        let w = q.weights(0.0, &[0.1, 0.5, 0.9]).unwrap();
        for p in &w.psi {
            assert_eq!(*p, 1.0 / 3.0);
        }
    }

    #[test]
    fn linear_weights_alpha_one() {
        let lin = builtin_objective("linear", &[]).unwrap();
        let w = lin.weights(1.0, &[0.0, 1.0]).unwrap();
        let e = (-1.0f64).exp();
        assert!((w.psi[0] - 1.0 / (1.0 + e)).abs() < 1e-15);
        assert!((w.psi[1] - e / (1.0 + e)).abs() < 1e-15);
        assert!((w.psi[0] - 0.731059).abs() < 1e-6);
        assert!((w.psi[1] - 0.268941).abs() < 1e-6);
    }

    #[test]
    fn huge_alpha_reaches_simplex_vertex() {
        let q = builtin_objective("quadratic", &[]).unwrap();
        let w = q.weights(1e6, &[0.0, 0.1]).unwrap();
        // exp(-1e4) is below the smallest subnormal
        assert!((w.psi[0] - 1.0).abs() < 1e-12);
        assert!(w.psi[1].abs() < 1e-12);
    }

    #[test]
    fn weights_errors() {
        let q = builtin_objective("quadratic", &[]).unwrap();
        assert!(matches!(q.weights(1.0, &[]), Err(Error::EmptyPositions)));
        assert!(matches!(q.weights(1.0, &[2.0]), Err(Error::OutsideDomain { .. })));
        assert!(q.weights(f64::NAN, &[0.5]).is_err());
        let bad = Objective::new(0.0, 1.0, |x| if x > 0.5 { f64::NAN } else { x }).unwrap();
        assert!(matches!(
            bad.weights(1.0, &[0.2, 0.7]),
            Err(Error::NonFiniteObjective { .. })
        ));
    }

    #[test]
    fn consensus_point_examples() {
        let half = WeightVector::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(consensus_point(&[0.0, 1.0], &half).unwrap(), 0.5);
        let lin = builtin_objective("linear", &[]).unwrap();
        let w = lin.weights(1.0, &[0.0, 1.0]).unwrap();
        assert!((consensus_point(&[0.0, 1.0], &w).unwrap() - 0.268941).abs() < 1e-6);
        let w3 = WeightVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(consensus_point(&[0.4, 0.4, 0.4], &w3).unwrap(), 0.4);
        assert!(matches!(
            consensus_point(&[0.0], &half),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn table_interpolates_and_shifts() {
        let t = builtin_objective("custom-table", &[0.0, 3.0, 1.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(t.known_minimizer(), Some(1.0));
        assert_eq!(t.eval(1.0).unwrap(), 0.0);
        assert_eq!(t.eval(0.5).unwrap(), 1.0);
        assert_eq!(t.eval(1.5).unwrap(), 0.5);
        assert_eq!(t.lipschitz_hint(), Some(2.0));
        assert!(table_objective(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(table_objective(vec![(0.0, 1.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn table_csv_with_and_without_header() {
        let mut with = tempfile::NamedTempFile::new().unwrap();
        writeln!(with, "x,f\n-1,1\n0,0\n1,1").unwrap();
        let o = table_objective_from_csv(with.path()).unwrap();
        assert_eq!(o.domain(), (-1.0, 1.0));
        assert_eq!(o.known_minimizer(), Some(0.0));

        let mut without = tempfile::NamedTempFile::new().unwrap();
        writeln!(without, "-1, 1\n0, 0.5\n1, 2").unwrap();
        let o = table_objective_from_csv(without.path()).unwrap();
        assert_eq!(o.eval(0.5).unwrap(), 0.75);

        let mut bad = tempfile::NamedTempFile::new().unwrap();
        writeln!(bad, "x,f\n0,1\nfoo,2").unwrap();
        assert!(table_objective_from_csv(bad.path()).is_err());
    }

    fn dyadic() -> impl Strategy<Value = f64> {
        (0i64..(1 << 20)).prop_map(|k| k as f64 / 1024.0)
    }

    proptest! {
        #[test]
        fn simplex_property(
            fs in prop::collection::vec(0.0..1e3f64, 1..12),
            alpha in 0.0..1e6f64,
        ) {
            let mut psi = vec![0.0; fs.len()];
            softmax_neg_into(alpha, &fs, &mut psi);
            let sum: f64 = psi.iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-12);
            prop_assert!(psi.iter().all(|p| p.is_finite() && (0.0..=1.0).contains(p)));
        }

        #[test]
        fn shift_invariance(
            fs in prop::collection::vec(dyadic(), 1..10),
            k in -1000i64..1000,
            alpha in 0.0..100.0f64,
        ) {
            let shifted: Vec<f64> = fs.iter().map(|f| f + k as f64).collect();
            let mut a = vec![0.0; fs.len()];
            let mut b = vec![0.0; fs.len()];
            softmax_neg_into(alpha, &fs, &mut a);
            softmax_neg_into(alpha, &shifted, &mut b);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-15);
            }
        }

        #[test]
        fn scale_commutation(
            fs in prop::collection::vec(0.0..10.0f64, 1..10),
            alpha in 0.0..100.0f64,
            c in 0.01..100.0f64,
        ) {
            let scaled: Vec<f64> = fs.iter().map(|f| f / c).collect();
            let mut a = vec![0.0; fs.len()];
            let mut b = vec![0.0; fs.len()];
            softmax_neg_into(alpha, &fs, &mut a);
            softmax_neg_into(c * alpha, &scaled, &mut b);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }

        #[test]
        fn consensus_in_hull(
            xs in prop::collection::vec(-5.0..5.0f64, 1..10),
            alpha in 0.0..1e4f64,
        ) {
            let obj = builtin_objective("rastrigin1d", &[]).unwrap();
            let w = obj.weights(alpha, &xs).unwrap();
            let m = consensus_point(&xs, &w).unwrap();
            let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(m >= lo && m <= hi);
        }
    }
}
