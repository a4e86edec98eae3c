//! Probabilistic comparison of the accuracy of two approximation methods at a
//! fixed discretization size.
//!
//! - [`prob`]: closed-form densities, distribution functions and probability
//!   curves.
//! - [`mc`]: Monte Carlo oracle for the closed forms.
//! - [`calibrate`]: power-law fits turning observed errors into model constants.
//! - [`empirics`]: 1D finite elements, composite quadrature and one-step ODE
//!   schemes with exact references.

pub mod calibrate;
pub mod empirics;
pub mod error;
pub mod mc;
pub mod prob;
pub mod rng;

pub use calibrate::{
    fit_model, fit_power_law, Calibration, CalibrationWarning, ErrorSample, ErrorSeries,
    LambdaPolicy, PowerLawFit,
};
pub use error::{Error, Result};
pub use mc::{mc_density_histogram, mc_head_probability, McConfig, McEstimate};
pub use prob::{
    beta_k, breakpoints, cdf_z, density_z, head_probability, probability_curve, sample_curve,
    BetaPair, ElementPair, ErrorCap, Method, ModelParams, Regime, RegimeBreakpoints, Spacing,
};
pub use rng::CounterRng;
