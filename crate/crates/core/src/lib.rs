//! Numerical toolkit for the Friedlander model: the Laplacian on the half
//! plane `x > 0` with metric `dx² + (1 + x)^{-1} dy²`, periodic in `y` with
//! period `2π`, Dirichlet condition at `x = 0`, linearized near the boundary.
//!
//! Modules:
//! - [`airy`]: `Ai`, its phase `θ`, the symbol `τ` and the zeros `t_m`.
//! - [`spectrum`]: eigenvalues, Bohr–Sommerfeld approximations, actions.
//! - [`geodesics`]: billiard flow, closed geodesics, length spectrum.
//! - [`trace`]: smoothed wave traces, cone partitions, Poisson sums.
//! - [`symbols`]: numerical checks of symbol-class estimates.

pub mod airy;
pub mod geodesics;
pub mod spectrum;
pub mod summation;
pub mod symbols;
pub mod trace;

pub use airy::{
    airy_ai, airy_zero, asymptotic_zero, tau, theta, theta_inverse, theta_prime, zero_table,
    AiryError, AiryValue, AiryZeroTable, PhaseFunction,
};
