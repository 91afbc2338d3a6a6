//! Numerical ground truth for the closed forms: ODE integration across kicks,
//! adaptive quadrature and one-dimensional minimization.

mod minimize;
mod ode;
mod quadrature;

pub use minimize::{golden_section, minimize_k2_numeric, scan_then_refine};
pub use ode::{integrate_ode, integrate_ode_series, Dopri5, IntegratorConfig};
pub use quadrature::quadrature;
