//! Creative telescoping for hyperexponential integrands.
//!
//! Given an integrand `F_n(x)` whose shift quotient `F_{n+1}/F_n` and
//! logarithmic derivative `F'/F` are rational, [`az::az_derive`] finds a
//! recurrence operator `L(N, n)` and a rational certificate `R(n, x)` with
//! `L F = d/dx (R F)`, and [`az::verify_certificate`] checks such a pair
//! exactly.

pub mod arith;
pub mod az;
pub mod cli;
pub mod expr;
pub mod irrationality;
pub mod quadrature;
pub mod recurrence;
