//! Closed-form consensus errors and error bounds.
//!
//! All formulas are written with `expm1`/`ln_1p` so they stay accurate both
//! for `alpha * width` near zero and for very large `alpha`.

use std::f64::consts::{LN_2, PI};

/// Exact `|x_inf - x_*|` for `f(x) = x`, two particles starting at `x_* = a`
/// and `b = a + width`: `(ln 2 - ln(1 + e^{-alpha width})) / alpha`.
pub fn oracle_linear_error(alpha: f64, width: f64) -> f64 {
    oracle_nparticle_linear_error(alpha, 2, 1, width)
}

/// Exact `|x_inf - x_*|` for `f(x) = x` with `j` particles at `a` and
/// `n - j` at `a + width`: `ln(n / (j + (n - j) e^{-alpha width})) / alpha`.
pub fn oracle_nparticle_linear_error(alpha: f64, n: usize, j: usize, width: f64) -> f64 {
    // n / (j + (n-j) e^{-x}) = 1 / (1 - (n-j)/n * (1 - e^{-x}))
    let y = -(-alpha * width).exp_m1();
    let frac = (n - j) as f64 / n as f64;
    -(-frac * y).ln_1p() / alpha
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Two-sided bound on `|x_inf - x_*|` for `f(x) = x^2` on `[0, b]` with the
/// particles starting at `0` and `b`.
///
/// The upper bound is `sqrt(ln 2 / (2 alpha))`, the convex-case bound with
/// curvature 2. The lower bound `(sqrt(pi)/2 - e^{-alpha b^2} / (sqrt(alpha) b)) / (4 sqrt(alpha))`
/// is only informative once `sqrt(alpha) b` is large and may be negative otherwise.
pub fn oracle_quadratic_bounds(alpha: f64, b: f64) -> QuadraticBounds {
    let sa = alpha.sqrt();
    QuadraticBounds {
        lower: (PI.sqrt() / 2.0 - (-alpha * b * b).exp() / (sa * b)) / (4.0 * sa),
        upper: convex_bound(alpha, 2.0),
    }
}

/// `ln 2 / (alpha c_f)`: bound on the distance travelled by the lower particle
/// while the pair sits in sets separated by `|f(x) - f(y)| >= c_f |x - y|`.
pub fn lipschitz_separation_bound(alpha: f64, c_f: f64) -> f64 {
    LN_2 / (alpha * c_f)
}

/// `sqrt(ln 2 / (alpha c_f))` for objectives with `f'' >= c_f` around the minimizer.
pub fn convex_bound(alpha: f64, c_f: f64) -> f64 {
    (LN_2 / (alpha * c_f)).sqrt()
}
