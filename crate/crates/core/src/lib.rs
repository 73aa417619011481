//! Erlang C delay probabilities for integer and real server counts, square-root
//! ("Halfin-Whitt") staffing, and executable versions of the random variables used to
//! show that `C(a + beta*sqrt(a), a)` decreases to its Halfin-Whitt limit.
//!
//! Every quantity is available through at least two independent routes so the
//! routes can be checked against each other:
//!
//! * [`erlang`]: Erlang B/C by recurrence, by semi-infinite quadrature and by the
//!   regularized incomplete gamma function, plus staffing inversions.
//! * [`halfin_whitt`]: the limit `C*(beta)`, both staffing regimes and sweeps.
//! * [`proof_kit`]: the densities, tails and the `h` function behind the
//!   stochastic ordering of `Y_a`.
//! * [`mmn_oracle`]: birth-death stationary solve and a discrete-event simulation.
//! * [`numerics`]: special functions, quadrature and bisection.

// NaN arguments must fail the range checks, so comparisons are written negated.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod erlang;
pub mod error;
pub mod halfin_whitt;
pub mod mmn_oracle;
pub mod numerics;
pub mod proof_kit;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::QuadratureConfig;
