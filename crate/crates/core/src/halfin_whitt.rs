//! Square-root staffing and the Halfin-Whitt limit
//! `C*(beta) = (1 + beta Phi(beta) / phi(beta))^-1`.
//!
//! Two ways of scaling load and servers together are supported:
//!
//! * load-parametrized, `s(a) = a + beta sqrt(a)`, along which `C(s(a), a)`
//!   decreases strictly to `C*(beta)`;
//! * server-parametrized, `a(s) = s - beta sqrt(s)` for `s > beta^2`, for which no
//!   monotonicity is claimed; sweeps only record the values.

use crate::erlang::{erlang_c_real, DelayProbability};
use crate::error::{Error, Result};
use crate::numerics::{bisect_monotone, ln_normal_cdf, QuadratureConfig};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Value of the Halfin-Whitt limit; `boundary` is set for `beta = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HwLimit {
    pub value: f64,
    pub boundary: bool,
}

/// `C*(beta)` for `beta >= 0`.
pub fn hw_limit(beta: f64) -> Result<HwLimit> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!(
            "Halfin-Whitt limit is defined for finite beta >= 0, got {beta}"
        )));
    }
    if beta == 0.0 {
        return Ok(HwLimit {
            value: 1.0,
            boundary: true,
        });
    }
    // ln(beta Phi(beta) / phi(beta)); the ratio overflows long before C* underflows.
    let ln_ratio = beta.ln() + ln_normal_cdf(beta)? + 0.5 * beta * beta + LN_SQRT_2PI;
    let value = if ln_ratio > 0.0 {
        let r = (-ln_ratio).exp();
        r / (1.0 + r)
    } else {
        1.0 / (1.0 + ln_ratio.exp())
    };
    Ok(HwLimit {
        value,
        boundary: false,
    })
}

/// Square-root staffing `s = a + beta sqrt(a)`; requires `beta > 0` so that `s > a`.
pub fn staffing(a: f64, beta: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!(
            "offered load must be positive, got {a}"
        )));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!(
            "beta must be positive so that s = a + beta sqrt(a) satisfies 0 < a < s, got {beta}"
        )));
    }
    Ok(a + beta * a.sqrt())
}

/// Load carried by `n` servers in the server-parametrized regime, `a = n - beta sqrt(n)`.
pub fn inverse_load(n: f64, beta: f64) -> Result<f64> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!(
            "beta must be non-negative, got {beta}"
        )));
    }
    if !(n > beta * beta) || !n.is_finite() {
        return Err(Error::domain(format!(
            "a(n) = n - beta sqrt(n) is valid only for n > beta^2 = {}, got n = {n}",
            beta * beta
        )));
    }
    Ok(n - beta * n.sqrt())
}

/// Slack `beta` with `C*(beta) = epsilon`.
pub fn beta_for_target(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!(
            "target delay probability must satisfy 0 < epsilon < 1, got {epsilon}"
        )));
    }
    let limit = |b: f64| hw_limit(b).map(|l| l.value).unwrap_or(f64::NAN);
    let mut hi = 1.0;
    while limit(hi) > epsilon {
        hi *= 2.0;
    }
    Ok(bisect_monotone(limit, 0.0, hi, epsilon, 1e-14)?.value)
}

/// One evaluation on the load-parametrized curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HwPoint {
    pub beta: f64,
    pub a: f64,
    pub s: f64,
    pub c_value: f64,
    pub c_star: f64,
    pub gap: f64,
}

/// `C(a + beta sqrt(a), a)` together with its limit.
pub fn hw_point(a: f64, beta: f64, cfg: &QuadratureConfig) -> Result<HwPoint> {
    let s = staffing(a, beta)?;
    let c = erlang_c_real(s, a, cfg)?.value;
    let c_star = hw_limit(beta)?.value;
    Ok(HwPoint {
        beta,
        a,
        s,
        c_value: c,
        c_star,
        gap: c - c_star,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `s = a + beta sqrt(a)`, swept over `a`.
    LoadParametrized,
    /// `a = s - beta sqrt(s)`, swept over `s`.
    ServerParametrized,
}

/// One row of a sweep. Failed evaluations keep their coordinates and carry the
/// error message instead of a value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub a: f64,
    pub s: f64,
    pub c: Option<DelayProbability>,
    /// Only for the load-parametrized regime.
    pub c_star: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn gap(&self) -> Option<f64> {
        Some(self.c?.value - self.c_star?)
    }
}

/// Outcome of checking a load-parametrized sweep against the monotonicity theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremCheck {
    /// Every successive decrement exceeds the sum of the two error bounds.
    pub decreasing: bool,
    pub gaps_positive: bool,
    /// Smallest `c[i] - c[i+1] - (err[i] + err[i+1])`; `+inf` for fewer than two rows.
    pub min_decrement_margin: f64,
    pub min_gap: f64,
    pub failed_rows: usize,
}

impl TheoremCheck {
    pub fn passed(&self) -> bool {
        self.decreasing && self.gaps_positive && self.failed_rows == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub regime: Regime,
    pub beta: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// The sweep parameter of a row: `a` or `s` depending on the regime.
    pub fn parameter(&self, row: &SweepRow) -> f64 {
        match self.regime {
            Regime::LoadParametrized => row.a,
            Regime::ServerParametrized => row.s,
        }
    }

    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.c.is_none()).count()
    }

    /// Successful rows as [`HwPoint`]s (load-parametrized sweeps only).
    pub fn hw_points(&self) -> Vec<HwPoint> {
        self.rows
            .iter()
            .filter_map(|r| {
                let c = r.c?.value;
                let c_star = r.c_star?;
                Some(HwPoint {
                    beta: self.beta,
                    a: r.a,
                    s: r.s,
                    c_value: c,
                    c_star,
                    gap: c - c_star,
                })
            })
            .collect()
    }

    /// Checks strict decrease and positivity of the gap to `C*(beta)`.
    pub fn theorem_check(&self) -> TheoremCheck {
        let mut min_margin = f64::INFINITY;
        let mut min_gap = f64::INFINITY;
        let mut gaps_positive = true;
        for row in &self.rows {
            if let Some(gap) = row.gap() {
                min_gap = min_gap.min(gap);
                gaps_positive &= gap > 0.0;
            }
        }
        let ok: Vec<&DelayProbability> = self.rows.iter().filter_map(|r| r.c.as_ref()).collect();
        for pair in ok.windows(2) {
            let margin =
                (pair[0].value - pair[1].value) - (pair[0].error_bound + pair[1].error_bound);
            min_margin = min_margin.min(margin);
        }
        TheoremCheck {
            decreasing: min_margin > 0.0,
            gaps_positive: gaps_positive && self.regime == Regime::LoadParametrized,
            min_decrement_margin: min_margin,
            min_gap,
            failed_rows: self.failed_rows(),
        }
    }
}

fn check_grid(grid: &[f64], name: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain(format!("{name} grid is empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain(format!(
            "{name} grid must be finite and strictly increasing"
        )));
    }
    Ok(())
}

/// Evaluates `C(a + beta sqrt(a), a)` along `a_grid`.
pub fn hw_sweep(beta: f64, a_grid: &[f64], cfg: &QuadratureConfig) -> Result<SweepResult> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!("sweep needs beta > 0, got {beta}")));
    }
    check_grid(a_grid, "load")?;
    if a_grid[0] <= 0.0 {
        return Err(Error::domain("load grid must be positive"));
    }
    let c_star = hw_limit(beta)?.value;
    let rows = a_grid
        .iter()
        .map(|&a| {
            let s = a + beta * a.sqrt();
            match erlang_c_real(s, a, cfg) {
                Ok(c) => SweepRow {
                    a,
                    s,
                    c: Some(c),
                    c_star: Some(c_star),
                    error: None,
                },
                Err(e) => SweepRow {
                    a,
                    s,
                    c: None,
                    c_star: Some(c_star),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(SweepResult {
        regime: Regime::LoadParametrized,
        beta,
        rows,
    })
}

/// Evaluates `C(s, s - beta sqrt(s))` along `s_grid`.
pub fn inverse_sweep(beta: f64, s_grid: &[f64], cfg: &QuadratureConfig) -> Result<SweepResult> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!("sweep needs beta > 0, got {beta}")));
    }
    check_grid(s_grid, "server")?;
    if !(s_grid[0] > beta * beta) {
        return Err(Error::domain(format!(
            "server grid must start above beta^2 = {} (got {})",
            beta * beta,
            s_grid[0]
        )));
    }
    let rows = s_grid
        .iter()
        .map(|&s| {
            let a = s - beta * s.sqrt();
            match erlang_c_real(s, a, cfg) {
                Ok(c) => SweepRow {
                    a,
                    s,
                    c: Some(c),
                    c_star: None,
                    error: None,
                },
                Err(e) => SweepRow {
                    a,
                    s,
                    c: None,
                    c_star: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(SweepResult {
        regime: Regime::ServerParametrized,
        beta,
        rows,
    })
}

/// `points` values from `from` to `to` inclusive, linearly or logarithmically spaced.
pub fn grid(from: f64, to: f64, points: usize, log_spaced: bool) -> Result<Vec<f64>> {
    if points == 0 || !from.is_finite() || !to.is_finite() || !(from <= to) {
        return Err(Error::domain(format!(
            "grid needs finite from <= to and at least one point (from = {from}, to = {to}, points = {points})"
        )));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    if from == to {
        return Err(Error::domain("grid with several points needs from < to"));
    }
    if log_spaced && !(from > 0.0) {
        return Err(Error::domain("logarithmic grid needs from > 0"));
    }
    let last = (points - 1) as f64;
    let mut out: Vec<f64> = (0..points)
        .map(|i| {
            let f = i as f64 / last;
            if log_spaced {
                (from.ln() + f * (to.ln() - from.ln())).exp()
            } else {
                from + f * (to - from)
            }
        })
        .collect();
    out[0] = from;
    out[points - 1] = to;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limit_examples() {
        let zero = hw_limit(0.0).unwrap();
        assert_eq!(zero.value, 1.0);
        assert!(zero.boundary);
        // 40-digit reference values.
        let one = hw_limit(1.0).unwrap();
        assert!(!one.boundary);
        assert!((one.value - 0.223_361_274_798_260_74).abs() < 1e-15);
        assert!((hw_limit(2.0).unwrap().value / 0.026_881_362_429_432_263 - 1.0).abs() < 1e-14);
        let eight = hw_limit(8.0).unwrap().value;
        assert!(
            (eight / 6.315_338_854_421_115e-16 - 1.0).abs() < 1e-13,
            "{eight:e}"
        );
        assert!(hw_limit(-0.1).is_err());
    }

    #[test]
    fn limit_far_tail_does_not_underflow_to_garbage() {
        let v = hw_limit(30.0).unwrap().value;
        assert!(v > 0.0 && v < 1e-190);
        assert!(hw_limit(40.0).unwrap().value >= 0.0);
    }

    #[test]
    fn limit_strictly_decreasing() {
        let g = grid(0.01, 10.0, 200, false).unwrap();
        let vals: Vec<f64> = g.iter().map(|&b| hw_limit(b).unwrap().value).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn staffing_examples() {
        assert_eq!(staffing(100.0, 1.0).unwrap(), 110.0);
        assert_eq!(staffing(1.0, 2.0).unwrap(), 3.0);
        assert!(staffing(10.0, 0.0).is_err());
        assert!(staffing(10.0, -1.0).is_err());
    }

    #[test]
    fn inverse_load_examples() {
        assert_eq!(inverse_load(100.0, 3.0).unwrap(), 70.0);
        assert_eq!(inverse_load(100.0, 0.1).unwrap(), 99.0);
        let msg = inverse_load(9.0, 3.0).unwrap_err().to_string();
        assert!(msg.contains("n > beta^2"), "{msg}");
    }

    #[test]
    fn beta_for_target_examples() {
        let one = hw_limit(1.0).unwrap().value;
        assert!((beta_for_target(one).unwrap() - 1.0).abs() < 1e-10);
        // Root of C*(beta) = 1/2 at 40 digits.
        assert!((beta_for_target(0.5).unwrap() - 0.506_054_468_989_180_8).abs() < 1e-12);
        assert!(beta_for_target(1.0 - 1e-12).unwrap() < 1e-6);
        assert!(beta_for_target(1.0).is_err());
        assert!(beta_for_target(0.0).is_err());
    }

    #[test]
    fn hw_sweep_beta_one() {
        let cfg = QuadratureConfig::default();
        let sweep = hw_sweep(1.0, &[1.0, 10.0, 100.0, 1000.0], &cfg).unwrap();
        let check = sweep.theorem_check();
        assert!(check.passed(), "{check:?}");
        assert!(check.min_gap > 0.0);
        for p in sweep.hw_points() {
            assert!(p.c_value > 0.223_36);
            assert!(((p.s - p.a) / (p.a.sqrt()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_point_sweep_is_trivially_decreasing() {
        let sweep = hw_sweep(0.5, &[3.0], &QuadratureConfig::default()).unwrap();
        let check = sweep.theorem_check();
        assert!(check.decreasing && check.passed());
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let cfg = QuadratureConfig::default();
        assert!(hw_sweep(1.0, &[2.0, 1.0], &cfg).is_err());
        assert!(hw_sweep(1.0, &[], &cfg).is_err());
        assert!(hw_sweep(0.0, &[1.0], &cfg).is_err());
        assert!(inverse_sweep(3.0, &[9.0, 10.0], &cfg).is_err());
    }

    #[test]
    fn inverse_sweep_near_boundary() {
        let cfg = QuadratureConfig::default();
        let sweep = inverse_sweep(3.0, &[9.0 * (1.0 + 1e-6), 9.5, 20.0], &cfg).unwrap();
        assert_eq!(sweep.failed_rows(), 0);
        let first = sweep.rows[0].c.unwrap().value;
        assert!(first > 0.0 && first < 1e-3, "{first}");
    }

    #[test]
    fn per_point_failures_do_not_abort() {
        let strict = QuadratureConfig {
            max_refinements: 1,
            rel_tol: 1e-300,
            ..Default::default()
        };
        let sweep = hw_sweep(1.0, &[1.0, 2.0], &strict).unwrap();
        assert_eq!(sweep.failed_rows(), 2);
        assert!(sweep.rows.iter().all(|r| r.error.is_some()));
        assert!(!sweep.theorem_check().passed());
    }

    #[test]
    fn grids() {
        let g = grid(1.0, 1e4, 5, true).unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[1] - 10.0).abs() < 1e-12 && g[4] == 1e4);
        assert_eq!(grid(0.0, 1.0, 3, false).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(grid(0.0, 1.0, 3, true).is_err());
        assert!(grid(1.0, 0.5, 3, false).is_err());
    }
}
