//! Erlang B and C for integer and real numbers of servers.
//!
//! Three independent routes compute the delay probability `C(s, a)`:
//!
//! * [`erlang_c_integer`]: the Erlang B recurrence, integer `n` only;
//! * [`erlang_c_real`]: `1/C = int_0^inf (1+t)^(s-1) a t e^(-a t) dt` by quadrature;
//! * [`erlang_c_gamma`]: the same integral in closed form,
//!   `1/C = 1 + (s - a) e^a a^(-s) Gamma(s) Q(s, a)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{
    integrate_semi_infinite, ln_upper_gamma_regularized, log_gamma_scaled, try_bisect_monotone,
    QuadratureConfig,
};

/// Relative accuracy reported for the recurrence and closed-form routes.
pub const NOMINAL_REL_ERROR: f64 = 1e-13;

/// Tie tolerance for staffing targets: `C <= eps (1 + 1e-12)` counts as meeting `eps`.
pub const TARGET_TIE_TOL: f64 = 1e-12;

/// Offered load `a = lambda/mu` against `s` servers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadPoint {
    a: f64,
    s: f64,
}

impl LoadPoint {
    pub fn new(a: f64, s: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(s > 0.0 && s.is_finite()) {
            return Err(Error::domain(format!(
                "load point needs finite a > 0 and s > 0, got a = {a}, s = {s}"
            )));
        }
        Ok(Self { a, s })
    }

    /// From arrival rate `lambda` and per-server service rate `mu`.
    pub fn from_rates(lambda: f64, mu: f64, s: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::domain(format!(
                "service rate must be positive, got {mu}"
            )));
        }
        Self::new(lambda / mu, s)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Traffic intensity `a / s`.
    pub fn rho(&self) -> f64 {
        self.a / self.s
    }

    /// `0 < a < s`: the queue is stable and the delay probability is defined.
    pub fn is_stable(&self) -> bool {
        self.a < self.s
    }

    fn require_stable(&self) -> Result<()> {
        if self.is_stable() {
            Ok(())
        } else {
            Err(Error::Unstable {
                a: self.a,
                s: self.s,
            })
        }
    }
}

/// Which route produced a [`DelayProbability`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    IntegerRecurrence,
    Quadrature,
    GammaClosedForm,
}

impl Method {
    pub const ALL: [Method; 3] = [
        Method::IntegerRecurrence,
        Method::Quadrature,
        Method::GammaClosedForm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::IntegerRecurrence => "recurrence",
            Method::Quadrature => "quadrature",
            Method::GammaClosedForm => "gamma",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Probability that an arrival has to wait, with the absolute error bound of the
/// method that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayProbability {
    pub value: f64,
    pub method: Method,
    pub error_bound: f64,
}

impl DelayProbability {
    fn nominal(value: f64, method: Method) -> Self {
        Self {
            value,
            method,
            error_bound: NOMINAL_REL_ERROR * value,
        }
    }
}

fn check_load(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "offered load must be finite and positive, got {a}"
        )))
    }
}

/// Erlang B blocking probability by `B(k) = a B(k-1) / (k + a B(k-1))`, `B(0) = 1`.
pub fn erlang_b_integer(n: u64, a: f64) -> Result<f64> {
    check_load(a)?;
    let mut b = 1.0;
    for k in 1..=n {
        let ab = a * b;
        b = ab / (k as f64 + ab);
    }
    Ok(b)
}

/// Erlang C for an integer number of servers, via `C = B / (1 - rho (1 - B))`.
pub fn erlang_c_integer(n: u64, a: f64) -> Result<DelayProbability> {
    check_load(a)?;
    let point = LoadPoint::new(a, n as f64).map_err(|_| Error::Unstable { a, s: n as f64 })?;
    point.require_stable()?;
    let b = erlang_b_integer(n, a)?;
    let rho = point.rho();
    let c = b / (1.0 - rho * (1.0 - b));
    Ok(DelayProbability::nominal(c, Method::IntegerRecurrence))
}

/// Erlang C for real `s` by quadrature of the integral representation.
///
/// The integral is taken in `u = a t`:
/// `1/C = (1/a) int_0^inf u e^(-u) (1 + u/a)^(s-1) du`.
pub fn erlang_c_real(s: f64, a: f64, cfg: &QuadratureConfig) -> Result<DelayProbability> {
    let point = LoadPoint::new(a, s)?;
    point.require_stable()?;
    let power = s - 1.0;
    let integral = integrate_semi_infinite(|u: f64| u.ln() - u + power * (u / a).ln_1p(), cfg)?;
    let ln_inverse = integral.ln_value() - a.ln();
    let value = (-ln_inverse).exp().min(1.0);
    Ok(DelayProbability {
        value,
        method: Method::Quadrature,
        error_bound: value * integral.rel_error(),
    })
}

/// Erlang C for real `s` from the regularized upper incomplete gamma function.
pub fn erlang_c_gamma(s: f64, a: f64) -> Result<DelayProbability> {
    let point = LoadPoint::new(a, s)?;
    point.require_stable()?;
    // ln[(s - a) e^a a^-s Gamma(s) Q(s, a)]
    let ln_k = (s - a).ln() + log_gamma_scaled(s, a)? + ln_upper_gamma_regularized(s, a)?;
    // C = 1 / (1 + e^ln_k), evaluated without overflow.
    let ln_one_plus = if ln_k > 0.0 {
        ln_k + (-ln_k).exp().ln_1p()
    } else {
        ln_k.exp().ln_1p()
    };
    Ok(DelayProbability::nominal(
        (-ln_one_plus).exp(),
        Method::GammaClosedForm,
    ))
}

fn check_target(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "target delay probability must satisfy 0 < epsilon < 1, got {epsilon}"
        )))
    }
}

/// Smallest integer `n > a` with `C(n, a) <= epsilon`.
pub fn min_servers(a: f64, epsilon: f64) -> Result<u64> {
    check_load(a)?;
    check_target(epsilon)?;
    let threshold = epsilon * (1.0 + TARGET_TIE_TOL);
    let meets = |n: u64| -> Result<bool> { Ok(erlang_c_integer(n, a)?.value <= threshold) };

    let first = a.floor() as u64 + 1;
    if meets(first)? {
        return Ok(first);
    }
    // Doubling search for a feasible upper end, then binary search.
    let mut lo = first;
    let mut step = 1u64;
    let mut hi = first + step;
    while !meets(hi)? {
        lo = hi;
        step *= 2;
        hi = first + step;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if meets(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Real number of servers `s*` with `C(s*, a) = epsilon`, using the quadrature route.
pub fn real_staffing_level(a: f64, epsilon: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_load(a)?;
    check_target(epsilon)?;
    let c = |s: f64| -> Result<f64> { Ok(erlang_c_real(s, a, cfg)?.value) };

    let lo = a * (1.0 + 1e-12);
    if c(lo)? <= epsilon {
        return Ok(lo);
    }
    let mut width = 1.0f64.max(a.sqrt());
    let mut hi = a + width;
    while c(hi)? > epsilon {
        width *= 2.0;
        hi = a + width;
        if !hi.is_finite() {
            return Err(Error::NoBracket {
                f_lo: c(lo)?,
                f_hi: 0.0,
                target: epsilon,
            });
        }
    }
    let tol = 1e-10 * 1.0f64.max(a.sqrt());
    Ok(try_bisect_monotone(c, lo, hi, epsilon, tol)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(x: f64, y: f64) -> f64 {
        ((x - y) / y).abs()
    }

    #[test]
    fn erlang_b_examples() {
        assert_eq!(erlang_b_integer(0, 3.0).unwrap(), 1.0);
        assert_eq!(erlang_b_integer(1, 1.0).unwrap(), 0.5);
        // Exact rational B(5, 4) = 512/2572.
        assert!(rel(erlang_b_integer(5, 4.0).unwrap(), 512.0 / 2572.0) < 1e-15);
        assert!(erlang_b_integer(3, 0.0).is_err());
    }

    #[test]
    fn erlang_b_decreasing_in_n() {
        let mut prev = 1.0;
        for n in 1..60 {
            let b = erlang_b_integer(n, 12.5).unwrap();
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn erlang_c_examples() {
        assert!(rel(erlang_c_integer(1, 0.5).unwrap().value, 0.5) < 1e-15);
        assert!(rel(erlang_c_integer(2, 1.0).unwrap().value, 1.0 / 3.0) < 1e-15);
        // Exact rational C(5, 4) = 64/115.5 = 128/231.
        assert!(rel(erlang_c_integer(5, 4.0).unwrap().value, 128.0 / 231.0) < 1e-14);
    }

    #[test]
    fn instability_is_an_error() {
        assert!(matches!(
            erlang_c_integer(4, 4.0),
            Err(Error::Unstable { .. })
        ));
        assert!(matches!(
            erlang_c_integer(0, 0.5),
            Err(Error::Unstable { .. })
        ));
        let cfg = QuadratureConfig::default();
        assert!(matches!(
            erlang_c_real(1.0, 1.0, &cfg),
            Err(Error::Unstable { .. })
        ));
        assert!(matches!(
            erlang_c_gamma(2.0, 3.0),
            Err(Error::Unstable { .. })
        ));
        let msg = erlang_c_gamma(1.0, 1.0).unwrap_err().to_string();
        assert!(msg.contains("0 < a < s"), "{msg}");
    }

    #[test]
    fn real_and_gamma_small_cases() {
        let cfg = QuadratureConfig::default();
        let q = erlang_c_real(2.0, 1.0, &cfg).unwrap();
        assert_eq!(q.method, Method::Quadrature);
        assert!(rel(q.value, 1.0 / 3.0) < 1e-12);
        assert!(q.error_bound >= 0.0);
        assert!(rel(erlang_c_gamma(2.0, 1.0).unwrap().value, 1.0 / 3.0) < 1e-13);

        let tiny = erlang_c_real(1.0, 1e-6, &cfg).unwrap().value;
        assert!(rel(tiny, 1e-6) < 1e-10, "{tiny}");
    }

    #[test]
    fn reference_value_110_100() {
        // 40-digit quadrature of the integral representation.
        let want = 0.237_007_500_285_052_73;
        let cfg = QuadratureConfig::default();
        let q = erlang_c_real(110.0, 100.0, &cfg).unwrap().value;
        let g = erlang_c_gamma(110.0, 100.0).unwrap().value;
        assert!(rel(q, want) < 1e-11, "{q}");
        assert!(rel(g, want) < 1e-11, "{g}");
    }

    #[test]
    fn gamma_route_near_saturation() {
        let c = erlang_c_gamma(5.0, 5.0 - 1e-9).unwrap().value;
        assert!(c < 1.0 && c > 1.0 - 1e-6);
    }

    #[test]
    fn min_servers_examples() {
        assert_eq!(min_servers(4.0, 0.6).unwrap(), 5);
        assert_eq!(min_servers(4.0, 0.5).unwrap(), 6);
        assert_eq!(min_servers(4.0, 1.0 - 1e-12).unwrap(), 5);
        assert_eq!(min_servers(4.5, 0.999).unwrap(), 5);
        assert!(min_servers(4.0, 1.0).is_err());
        assert!(min_servers(4.0, 0.0).is_err());
    }

    #[test]
    fn min_servers_accepts_exact_target() {
        let c6 = erlang_c_integer(6, 4.0).unwrap().value;
        assert_eq!(min_servers(4.0, c6).unwrap(), 6);
    }

    #[test]
    fn real_staffing_round_trip() {
        let cfg = QuadratureConfig::default();
        let target = erlang_c_integer(5, 4.0).unwrap().value;
        let s = real_staffing_level(4.0, target, &cfg).unwrap();
        assert!((s - 5.0).abs() < 1e-9, "{s}");
        let s = real_staffing_level(4.0, 0.55414, &cfg).unwrap();
        assert!((s - 5.0).abs() < 1e-3);
    }

    #[test]
    fn real_staffing_near_one_hugs_load() {
        let cfg = QuadratureConfig::default();
        let s = real_staffing_level(7.0, 1.0 - 1e-9, &cfg).unwrap();
        assert!(s > 7.0 && s < 7.0 + 1e-6, "{s}");
    }

    #[test]
    fn load_point_bookkeeping() {
        let p = LoadPoint::from_rates(4.0, 2.0, 3.0).unwrap();
        assert_eq!(p.a(), 2.0);
        assert!((p.rho() - 2.0 / 3.0).abs() < 1e-16);
        assert!(p.is_stable());
        assert!(!LoadPoint::new(3.0, 3.0).unwrap().is_stable());
        assert!(LoadPoint::new(-1.0, 3.0).is_err());
    }
}
