//! Desk-scale generators of `(h, error)` data with exact references.

pub mod fem;
pub mod gauss;
pub mod mesh;
pub mod ode;
pub mod quadrature;
pub mod series;

pub use fem::{
    default_points, error_norm, error_norm_with_points, solve_poisson_1d, FeSolution,
    ManufacturedProblem, WmpNorm,
};
pub use mesh::Mesh1D;
pub use ode::{defect_sum, integrate_ode, OneStepScheme};
pub use quadrature::{composite_quadrature, QuadratureRule};
pub use series::{generate_error_series, halving, Integrand, OdeErrorKind, OdeProblem, Study};
