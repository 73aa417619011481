//! The random variables behind the monotonicity of `C(a + beta sqrt(a), a)`.
//!
//! `X_a` has density `g(t, a) = a t e^(-a t) (1 + t)^(a - 1)` on `t >= 0`, and
//! `Y_a = (1 + X_a)^sqrt(a)`. Then `1 / C(a + beta sqrt(a), a) = E[Y_a^beta]`, and
//! the family `Y_a` is stochastically increasing in `a` because its tail
//! `F(y, a) = y^sqrt(a) exp(-a (y^(1/sqrt(a)) - 1)) = exp((ln y)^2 h(sqrt(a)/ln y))`
//! is increasing in `a`, with `h(x) = x + x^2 (1 - e^(1/x))` increasing.
//!
//! Densities and tails share one log-space kernel: with `x = y^(1/sqrt(a)) - 1`,
//! `ln F(y, a) = a (ln(1 + x) - x)`, which is also `ln(1 - P{X_a <= x})`.

use crate::error::{Error, Result};
use crate::numerics::{integrate_semi_infinite, ln1p_minus_x, Integral, QuadratureConfig};

/// Absolute slack allowed when comparing tails for stochastic dominance.
pub const ORDER_TOLERANCE: f64 = 1e-13;

/// Argument above which [`h`] uses the series.
pub const H_SERIES_SWITCH: f64 = 20.0;

/// Number of series terms used by [`h`] above the switch.
pub const H_SERIES_TERMS: usize = 30;

/// Coordinates shared by the proof objects: `t` for `X_a`, `y = (1 + t)^sqrt(a)` for
/// `Y_a`, and `x = sqrt(a) / ln y` for `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProofPoint {
    pub a: f64,
    pub t: f64,
    pub y: f64,
    pub x: f64,
}

impl ProofPoint {
    /// Builds the linked coordinates from `a > 0` and `t > 0`.
    pub fn from_t(a: f64, t: f64) -> Result<Self> {
        check_load(a)?;
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain(format!(
                "t must be positive and finite, got {t}"
            )));
        }
        let ln_y = a.sqrt() * t.ln_1p();
        Ok(Self {
            a,
            t,
            y: ln_y.exp(),
            x: a.sqrt() / ln_y,
        })
    }
}

fn check_load(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "a must be positive and finite, got {a}"
        )))
    }
}

fn check_t(t: f64) -> Result<()> {
    if t >= 0.0 && !t.is_nan() {
        Ok(())
    } else {
        Err(Error::domain(format!("t must be non-negative, got {t}")))
    }
}

/// `ln P{X_a > x} = a (ln(1 + x) - x)`.
fn ln_survival_x(x: f64, a: f64) -> f64 {
    if x.is_infinite() {
        return f64::NEG_INFINITY;
    }
    a * ln1p_minus_x(x)
}

/// `x(y) = y^(1/sqrt(a)) - 1`.
fn x_of_y(y: f64, a: f64) -> f64 {
    (y.ln() / a.sqrt()).exp_m1()
}

fn ln_density_g(t: f64, a: f64) -> f64 {
    if t == 0.0 {
        return f64::NEG_INFINITY;
    }
    a.ln() + t.ln() - t.ln_1p() + ln_survival_x(t, a)
}

/// Density of `X_a`: `g(t, a) = a t e^(-a t) (1 + t)^(a - 1)`.
pub fn density_g(t: f64, a: f64) -> Result<f64> {
    check_t(t)?;
    check_load(a)?;
    Ok(ln_density_g(t, a).exp())
}

/// Distribution function of `X_a`: `1 - (1 + x)^a e^(-a x)`.
pub fn cdf_x(x: f64, a: f64) -> Result<f64> {
    check_t(x)?;
    check_load(a)?;
    Ok(-ln_survival_x(x, a).exp_m1())
}

fn check_y(y: f64) -> Result<()> {
    if y > 1.0 && y.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "y must satisfy 1 < y < inf, got {y}"
        )))
    }
}

fn ln_density_y(y: f64, a: f64) -> f64 {
    // f(y) = g(x(y)) x'(y), with x'(y) = (1 + x) / (sqrt(a) y).
    let x = x_of_y(y, a);
    ln_density_g(x, a) + x.ln_1p() - 0.5 * a.ln() - y.ln()
}

/// Density of `Y_a`:
/// `f(y, a) = sqrt(a) y^(sqrt(a) - 1) (y^(1/sqrt(a)) - 1) e^(-a (y^(1/sqrt(a)) - 1))`.
pub fn density_y(y: f64, a: f64) -> Result<f64> {
    check_y(y)?;
    check_load(a)?;
    Ok(ln_density_y(y, a).exp())
}

/// Tail of `Y_a`: `P{Y_a > y} = y^sqrt(a) e^(-a (y^(1/sqrt(a)) - 1))`; equals 1 at `y = 1`.
pub fn tail_y(y: f64, a: f64) -> Result<f64> {
    if !(y >= 1.0) || y.is_nan() {
        return Err(Error::domain(format!(
            "tail of Y_a is defined for y >= 1, got {y}"
        )));
    }
    check_load(a)?;
    if y == 1.0 {
        return Ok(1.0);
    }
    if y.is_infinite() {
        return Ok(0.0);
    }
    Ok(ln_survival_x(x_of_y(y, a), a).exp())
}

/// The same tail through the rewrite `exp((ln y)^2 h(sqrt(a) / ln y))`.
pub fn tail_y_via_h(y: f64, a: f64) -> Result<f64> {
    check_y(y)?;
    check_load(a)?;
    let ln_y = y.ln();
    Ok((ln_y * ln_y * h(a.sqrt() / ln_y)?).exp())
}

/// `h(x) = x + x^2 (1 - e^(1/x))` in closed form (with `expm1`), for any `x > 0`.
pub fn h_closed_form(x: f64) -> Result<f64> {
    check_h_arg(x)?;
    Ok(x - x * x * (1.0 / x).exp_m1())
}

fn check_h_arg(x: f64) -> Result<()> {
    if x > 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(Error::domain(format!("h is defined for x > 0, got {x}")))
    }
}

/// `h(x) = x + x^2 (1 - e^(1/x))`, switching to the series above
/// [`H_SERIES_SWITCH`] where the closed form cancels.
pub fn h(x: f64) -> Result<f64> {
    check_h_arg(x)?;
    if x > H_SERIES_SWITCH {
        h_series(x, H_SERIES_TERMS)
    } else {
        h_closed_form(x)
    }
}

/// Partial sum `-sum_{n < terms} x^-n / (n + 2)!` of the expansion of `h`.
pub fn h_series(x: f64, terms: usize) -> Result<f64> {
    check_h_arg(x)?;
    if terms == 0 {
        return Err(Error::domain("h_series needs at least one term"));
    }
    // Horner form of sum c_n y^n with c_n = 1/(n+2)!, y = 1/x.
    let mut coeffs = Vec::with_capacity(terms);
    let mut c = 0.5;
    for n in 0..terms {
        coeffs.push(c);
        c /= (n + 3) as f64;
    }
    let inv = 1.0 / x;
    let sum = coeffs.iter().rev().fold(0.0, |acc, &c| acc * inv + c);
    Ok(-sum)
}

/// `E[Y_a^beta] = int_0^inf (1 + t)^(beta sqrt(a)) g(t, a) dt`, by quadrature in `t`.
pub fn moment_y(a: f64, beta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_load(a)?;
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!(
            "moment order must be non-negative, got {beta}"
        )));
    }
    let power = beta * a.sqrt();
    let integral = integrate_semi_infinite(|t: f64| power * t.ln_1p() + ln_density_g(t, a), cfg)?;
    Ok(integral.value())
}

/// `int_0^inf g(t, a) dt`, expected to be 1.
pub fn integrate_density_g(a: f64, cfg: &QuadratureConfig) -> Result<Integral> {
    check_load(a)?;
    integrate_semi_infinite(|t| ln_density_g(t, a), cfg)
}

/// `int_1^inf f(y, a) dy`, expected to be 1.
pub fn integrate_density_y(a: f64, cfg: &QuadratureConfig) -> Result<Integral> {
    check_load(a)?;
    integrate_semi_infinite(
        |u: f64| {
            if u == 0.0 {
                f64::NEG_INFINITY
            } else {
                ln_density_y(1.0 + u, a)
            }
        },
        cfg,
    )
}

/// Evidence for `P{Y_low > y} <= P{Y_high > y}` on a grid of `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport {
    pub a_low: f64,
    pub a_high: f64,
    pub y_grid: Vec<f64>,
    /// `(y, tail at a_low, tail at a_high)` wherever dominance fails.
    pub violations: Vec<(f64, f64, f64)>,
    pub passed: bool,
    /// Smallest `tail(y, a_high) - tail(y, a_low)` over the grid.
    pub min_margin: f64,
}

/// Checks that the tail of `Y_a` at `a_high` dominates the one at `a_low`.
pub fn check_stochastic_order(a_low: f64, a_high: f64, y_grid: &[f64]) -> Result<OrderReport> {
    check_load(a_low)?;
    check_load(a_high)?;
    if y_grid.iter().any(|&y| !(y > 1.0) || !y.is_finite())
        || y_grid.windows(2).any(|w| !(w[0] < w[1]))
    {
        return Err(Error::domain(
            "y grid must be strictly increasing and above 1",
        ));
    }
    let mut violations = Vec::new();
    let mut min_margin = f64::INFINITY;
    for &y in y_grid {
        let low = tail_y(y, a_low)?;
        let high = tail_y(y, a_high)?;
        min_margin = min_margin.min(high - low);
        if low > high + ORDER_TOLERANCE {
            violations.push((y, low, high));
        }
    }
    Ok(OrderReport {
        a_low,
        a_high,
        y_grid: y_grid.to_vec(),
        passed: violations.is_empty(),
        violations,
        min_margin,
    })
}
