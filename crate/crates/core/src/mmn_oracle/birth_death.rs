use crate::error::{Error, Result};

/// Probability that an arrival finds all `n` servers busy, from the stationary
/// distribution `pi_k ~ a^k / k!` (`k <= n`), `pi_(n+j) = pi_n rho^j`.
///
/// Weights are kept relative to `pi_n` and in log form, and the geometric tail
/// is summed in closed form, so nothing is truncated and nothing overflows.
pub fn birth_death_wait_prob(n: u64, a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!(
            "offered load must be positive, got {a}"
        )));
    }
    let servers = n as f64;
    if !(a < servers) {
        return Err(Error::Unstable { a, s: servers });
    }
    let rho = a / servers;
    // ln(sum_{j >= 0} pi_(n+j) / pi_n) = -ln(1 - rho)
    let ln_tail = -(-rho).ln_1p();

    // ln(pi_k / pi_n) for k = n-1, ..., 0.
    let mut ln_weights = Vec::with_capacity(n as usize);
    let mut ln_w = 0.0;
    for k in (1..=n).rev() {
        ln_w += (k as f64 / a).ln();
        ln_weights.push(ln_w);
    }
    let peak = ln_weights.iter().copied().fold(ln_tail, f64::max);
    let body: f64 = ln_weights.iter().map(|w| (w - peak).exp()).sum();
    let tail = (ln_tail - peak).exp();
    Ok(tail / (body + tail))
}
