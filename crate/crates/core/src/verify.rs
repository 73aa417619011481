//! Property suites that check the monotonicity theorem and the identities used in
//! its proof. Each check reports a margin: tolerance minus worst observed error
//! (or the smallest observed slack), positive when the property holds.

use crate::erlang::{erlang_c_gamma, erlang_c_integer, erlang_c_real};
use crate::error::Result;
use crate::halfin_whitt::{grid, hw_sweep, staffing};
use crate::mmn_oracle::birth_death_wait_prob;
use crate::numerics::QuadratureConfig;
use crate::proof_kit::{
    check_stochastic_order, h_closed_form, h_series, integrate_density_g, integrate_density_y,
    moment_y, tail_y, tail_y_via_h, H_SERIES_TERMS,
};

/// Slack values at which the theorem is checked.
pub const THEOREM_BETAS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 3.0];

/// Server counts and traffic intensities of the cross-method Erlang grid.
pub const ERLANG_SERVERS: [u64; 8] = [1, 2, 5, 10, 20, 50, 100, 500];
pub const ERLANG_RHOS: [f64; 6] = [0.1, 0.3, 0.5, 0.7, 0.9, 0.95];

pub const NORMALIZATION_LOADS: [f64; 5] = [0.25, 1.0, 9.0, 100.0, 2500.0];
pub const MOMENT_LOADS: [f64; 3] = [1.0, 10.0, 100.0];
pub const MOMENT_BETAS: [f64; 3] = [0.5, 1.0, 3.0];

pub const CROSS_METHOD_TOL: f64 = 1e-10;
pub const BIRTH_DEATH_TOL: f64 = 1e-12;
pub const NORMALIZATION_TOL: f64 = 1e-10;
pub const REWRITE_TOL: f64 = 1e-12;
pub const H_SERIES_TOL: f64 = 1e-12;
pub const MOMENT_TOL: f64 = 1e-8;

/// 40 log-spaced loads in `[0.01, 1e4]`.
pub fn theorem_load_grid() -> Vec<f64> {
    grid(0.01, 1e4, 40, true).expect("static grid")
}

/// Loads `0.5, 1, 2, ..., 1024` for the ordering check.
pub fn order_loads() -> Vec<f64> {
    (0..=11).map(|k| 0.5 * 2f64.powi(k)).collect()
}

/// `count` log-spaced points in `(1, y_max]`, excluding 1.
pub fn y_grid(count: usize, y_max: f64) -> Vec<f64> {
    (1..=count)
        .map(|i| (y_max.ln() * i as f64 / count as f64).exp())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub name: String,
    pub passed: bool,
    pub worst_margin: f64,
    pub detail: String,
}

impl PropertyReport {
    fn from_error(name: &str, tol: f64, worst: f64, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed: worst <= tol,
            worst_margin: tol - worst,
            detail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Monotonicity,
    Order,
    Identities,
}

pub fn run_suite(suite: Suite, cfg: &QuadratureConfig) -> Result<Vec<PropertyReport>> {
    Ok(match suite {
        Suite::Monotonicity => monotonicity_suite(cfg)?,
        Suite::Order => order_suite()?,
        Suite::Identities => identities_suite(cfg)?,
        Suite::All => {
            let mut all = monotonicity_suite(cfg)?;
            all.extend(order_suite()?);
            all.extend(identities_suite(cfg)?);
            all
        }
    })
}

/// Strict decrease of `C(a + beta sqrt(a), a)` and positivity of its gap to
/// `C*(beta)`, for every beta in [`THEOREM_BETAS`].
pub fn monotonicity_suite(cfg: &QuadratureConfig) -> Result<Vec<PropertyReport>> {
    let loads = theorem_load_grid();
    let mut out = Vec::new();
    for beta in THEOREM_BETAS {
        let sweep = hw_sweep(beta, &loads, cfg)?;
        let check = sweep.theorem_check();
        out.push(PropertyReport {
            name: format!("monotonicity beta={beta}"),
            passed: check.passed(),
            worst_margin: check.min_decrement_margin.min(check.min_gap),
            detail: format!(
                "{} loads, min decrement beyond error bounds {:.3e}, min gap to C* {:.3e}, failed rows {}",
                loads.len(),
                check.min_decrement_margin,
                check.min_gap,
                check.failed_rows
            ),
        });
    }
    Ok(out)
}

/// Stochastic ordering of `Y_a` for adjacent loads in [`order_loads`].
pub fn order_suite() -> Result<Vec<PropertyReport>> {
    let ys = y_grid(50, 100.0);
    let loads = order_loads();
    let mut out = Vec::new();
    for pair in loads.windows(2) {
        let report = check_stochastic_order(pair[0], pair[1], &ys)?;
        out.push(PropertyReport {
            name: format!("order a_low={} a_high={}", pair[0], pair[1]),
            passed: report.passed,
            worst_margin: report.min_margin,
            detail: format!(
                "{} y points, {} violations, min tail difference {:.3e}",
                ys.len(),
                report.violations.len(),
                report.min_margin
            ),
        });
    }
    Ok(out)
}

fn rel_diff(x: f64, y: f64) -> f64 {
    if x == y {
        0.0
    } else {
        ((x - y) / y).abs()
    }
}

/// Pairwise relative disagreement of the three Erlang C routes on the grid.
pub fn three_way_agreement(cfg: &QuadratureConfig) -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    let mut at = String::new();
    for n in ERLANG_SERVERS {
        for rho in ERLANG_RHOS {
            let a = rho * n as f64;
            let rec = erlang_c_integer(n, a)?.value;
            let quad = erlang_c_real(n as f64, a, cfg)?.value;
            let gam = erlang_c_gamma(n as f64, a)?.value;
            let d = rel_diff(rec, quad)
                .max(rel_diff(quad, gam))
                .max(rel_diff(gam, rec));
            if d > worst {
                worst = d;
                at = format!("n={n} rho={rho}");
            }
        }
    }
    Ok((worst, at))
}

pub fn identities_suite(cfg: &QuadratureConfig) -> Result<Vec<PropertyReport>> {
    let mut out = Vec::new();

    let (worst, at) = three_way_agreement(cfg)?;
    out.push(PropertyReport::from_error(
        "erlang three-way agreement",
        CROSS_METHOD_TOL,
        worst,
        format!("max pairwise relative difference {worst:.3e} at {at}"),
    ));

    let mut worst = 0.0f64;
    for n in ERLANG_SERVERS {
        for rho in ERLANG_RHOS {
            let a = rho * n as f64;
            worst = worst.max(rel_diff(
                birth_death_wait_prob(n, a)?,
                erlang_c_integer(n, a)?.value,
            ));
        }
    }
    out.push(PropertyReport::from_error(
        "birth-death vs recurrence",
        BIRTH_DEATH_TOL,
        worst,
        format!("max relative difference {worst:.3e}"),
    ));

    let mut worst = 0.0f64;
    for a in NORMALIZATION_LOADS {
        worst = worst.max((integrate_density_g(a, cfg)?.value() - 1.0).abs());
        worst = worst.max((integrate_density_y(a, cfg)?.value() - 1.0).abs());
    }
    out.push(PropertyReport::from_error(
        "density normalization",
        NORMALIZATION_TOL,
        worst,
        format!("max |integral - 1| = {worst:.3e} over g and f"),
    ));

    let (worst, at) = rewrite_discrepancy()?;
    out.push(PropertyReport::from_error(
        "tail rewrite through h",
        REWRITE_TOL,
        worst,
        format!("max relative difference {worst:.3e} at {at}"),
    ));

    let mut worst = 0.0f64;
    for x in grid(1.0, 1e3, 400, true)? {
        worst = worst.max(rel_diff(h_closed_form(x)?, h_series(x, H_SERIES_TERMS)?));
    }
    out.push(PropertyReport::from_error(
        "h closed form vs series",
        H_SERIES_TOL,
        worst,
        format!("max relative difference {worst:.3e} on [1, 1000]"),
    ));

    let mut worst = 0.0f64;
    for a in MOMENT_LOADS {
        for beta in MOMENT_BETAS {
            let inv_moment = 1.0 / moment_y(a, beta, cfg)?;
            let c = erlang_c_real(staffing(a, beta)?, a, cfg)?.value;
            worst = worst.max(rel_diff(inv_moment, c));
        }
    }
    out.push(PropertyReport::from_error(
        "moment identity 1/E[Y^beta] = C",
        MOMENT_TOL,
        worst,
        format!("max relative difference {worst:.3e}"),
    ));

    Ok(out)
}

/// Largest relative difference between [`tail_y`] and [`tail_y_via_h`] on a
/// 20 x 20 grid of `y` in `(1, 100]` and `a` in `[0.25, 2500]`, skipping points
/// where both tails underflow.
pub fn rewrite_discrepancy() -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    let mut at = String::new();
    for y in y_grid(20, 100.0) {
        for a in grid(0.25, 2500.0, 20, true)? {
            let direct = tail_y(y, a)?;
            let via_h = tail_y_via_h(y, a)?;
            if direct < f64::MIN_POSITIVE && via_h < f64::MIN_POSITIVE {
                continue;
            }
            let d = rel_diff(via_h, direct);
            if d > worst {
                worst = d;
                at = format!("y={y:.4} a={a:.4}");
            }
        }
    }
    Ok((worst, at))
}
