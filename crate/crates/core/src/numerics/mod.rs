//! Numerical foundations shared by every model in the crate.

mod quadrature;
mod roots;
mod special;

pub use quadrature::{integrate_semi_infinite, Integral, QuadratureConfig};
pub use roots::{bisect_monotone, try_bisect_monotone, BracketedRoot};
pub use special::{
    ln1p_minus_x, ln_normal_cdf, ln_upper_gamma_regularized, log_gamma, log_gamma_scaled,
    normal_cdf, normal_pdf, upper_gamma_regularized,
};
