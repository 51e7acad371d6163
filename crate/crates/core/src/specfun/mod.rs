//! Complex special functions: Γ, ζ, L₋₄, the completed forms ξ₁ and ξ_β,
//! and Bessel K of complex order.

pub mod bessel;
pub mod gamma;
pub mod xi;
pub mod zeta;

pub use bessel::{bessel_k, BesselK};
pub use gamma::{gamma, ln_gamma};
pub use xi::{xi1, xi1_factored, xi_beta, xi_beta_factored, Factored};
pub use zeta::{dirichlet_beta, hurwitz_zeta, zeta};
