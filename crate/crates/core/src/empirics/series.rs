//! Convergence studies producing [`ErrorSeries`] for calibration.

use std::sync::Arc;

use rayon::prelude::*;

use super::fem::{error_norm, solve_poisson_1d, ManufacturedProblem, ScalarFn};
use super::mesh::Mesh1D;
use super::ode::{defect_sum, integrate_ode, OneStepScheme};
use super::quadrature::{composite_quadrature, QuadratureRule};
use crate::calibrate::{ErrorSample, ErrorSeries};
use crate::error::{domain, Result};

/// An integrand with known integral.
#[derive(Clone)]
pub struct Integrand {
    pub name: String,
    pub f: ScalarFn,
    pub interval: (f64, f64),
    pub exact: f64,
}

impl std::fmt::Debug for Integrand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Integrand")
            .field("name", &self.name)
            .field("interval", &self.interval)
            .field("exact", &self.exact)
            .finish_non_exhaustive()
    }
}

impl Integrand {
    /// `exp(x)` on `[0, 1]`.
    pub fn exp() -> Self {
        Self {
            name: "expx".into(),
            f: Arc::new(f64::exp),
            interval: (0.0, 1.0),
            exact: std::f64::consts::E - 1.0,
        }
    }

    /// `sin(x)` on `[0, pi]`.
    pub fn sin() -> Self {
        Self {
            name: "sinx".into(),
            f: Arc::new(f64::sin),
            interval: (0.0, std::f64::consts::PI),
            exact: 2.0,
        }
    }
}

type VecFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;
type RhsFn = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;

/// An initial value problem with known solution.
#[derive(Clone)]
pub struct OdeProblem {
    pub name: String,
    pub rhs: RhsFn,
    pub exact: VecFn,
    pub t0: f64,
    pub span: f64,
}

impl std::fmt::Debug for OdeProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OdeProblem")
            .field("name", &self.name)
            .field("t0", &self.t0)
            .field("span", &self.span)
            .finish_non_exhaustive()
    }
}

impl OdeProblem {
    /// `y' = y`, `y(0) = 1` on `[0, 1]`.
    pub fn exp_growth() -> Self {
        Self {
            name: "exp-growth".into(),
            rhs: Arc::new(|_t, y| y.to_vec()),
            exact: Arc::new(|t| vec![t.exp()]),
            t0: 0.0,
            span: 1.0,
        }
    }

    /// `y'' = -y` as a first-order system, `y(0) = 1`, `y'(0) = 0` on `[0, 2]`.
    pub fn harmonic() -> Self {
        Self {
            name: "harmonic".into(),
            rhs: Arc::new(|_t, y| vec![y[1], -y[0]]),
            exact: Arc::new(|t| vec![t.cos(), -t.sin()]),
            t0: 0.0,
            span: 2.0,
        }
    }

    pub fn y0(&self) -> Vec<f64> {
        (self.exact)(self.t0)
    }
}

/// Error functional for one-step schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeErrorKind {
    /// Sum of local defects of the exact solution.
    DefectSum,
    /// Euclidean error at the final time.
    EndTime,
}

impl OdeErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            OdeErrorKind::DefectSum => "defect",
            OdeErrorKind::EndTime => "global",
        }
    }
}

/// A method family together with its test problem.
#[derive(Debug, Clone)]
pub enum Study {
    Fem {
        problem: ManufacturedProblem,
        degree: usize,
        m: u32,
        p: f64,
    },
    Quadrature {
        integrand: Integrand,
        rule: QuadratureRule,
    },
    Ode {
        problem: OdeProblem,
        scheme: OneStepScheme,
        kind: OdeErrorKind,
    },
}

impl Study {
    pub fn label(&self) -> String {
        match self {
            Study::Fem {
                problem,
                degree,
                m,
                p,
            } => format!("fem-P{degree}-W{m},{p}-{}", problem.name),
            Study::Quadrature { integrand, rule } => {
                format!("quad-{}-{}", rule.name(), integrand.name)
            }
            Study::Ode {
                problem,
                scheme,
                kind,
            } => format!("ode-{}-{}-{}", scheme.name(), kind.name(), problem.name),
        }
    }

    /// Exponent predicted by the a priori bound for this family.
    pub fn expected_order(&self) -> f64 {
        match self {
            Study::Fem { degree, m, .. } => (*degree as i64 + 1 - i64::from(*m)) as f64,
            Study::Quadrature { rule, .. } => f64::from(rule.order()),
            Study::Ode { scheme, .. } => f64::from(scheme.order()),
        }
    }

    /// Observed `(h, error)` for one discretization size. For FEM and
    /// quadrature, `h` is rounded to a whole number of elements/panels and the
    /// realised size is returned.
    pub fn sample(&self, h: f64) -> Result<ErrorSample> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(domain(format!(
                "discretization size must be positive, got {h}"
            )));
        }
        match self {
            Study::Fem {
                problem,
                degree,
                m,
                p,
            } => {
                let (a, b) = problem.interval;
                let mesh = Mesh1D::uniform(a, b, cells(a, b, h))?;
                let sol = solve_poisson_1d(problem, &mesh, *degree)?;
                let err = error_norm(&sol, problem, *m, *p)?.value;
                ErrorSample::new(mesh.h(), err)
            }
            Study::Quadrature { integrand, rule } => {
                let (a, b) = integrand.interval;
                let panels = cells(a, b, h);
                let value = composite_quadrature(&*integrand.f, integrand.interval, panels, *rule)?;
                ErrorSample::new((b - a) / panels as f64, (value - integrand.exact).abs())
            }
            Study::Ode {
                problem,
                scheme,
                kind,
            } => {
                let err = match kind {
                    OdeErrorKind::DefectSum => defect_sum(
                        &*problem.rhs,
                        &*problem.exact,
                        problem.t0,
                        problem.span,
                        h,
                        *scheme,
                    )?,
                    OdeErrorKind::EndTime => {
                        let traj = integrate_ode(
                            &*problem.rhs,
                            &problem.y0(),
                            problem.t0,
                            problem.span,
                            h,
                            *scheme,
                        )?;
                        let (t, y) = traj.last().expect("trajectory is never empty");
                        let exact = (problem.exact)(*t);
                        y.iter()
                            .zip(&exact)
                            .map(|(a, b)| (a - b).powi(2))
                            .sum::<f64>()
                            .sqrt()
                    }
                };
                ErrorSample::new(h, err)
            }
        }
    }
}

fn cells(a: f64, b: f64, h: f64) -> usize {
    ((b - a) / h).round().max(1.0) as usize
}

/// Runs `study` at every size in `h_list` (in parallel; output order follows
/// `h_list`).
pub fn generate_error_series(study: &Study, h_list: &[f64]) -> Result<ErrorSeries> {
    let samples = h_list
        .par_iter()
        .map(|&h| study.sample(h))
        .collect::<Result<Vec<_>>>()?;
    ErrorSeries::new(study.label(), samples)
}

/// `h0, h0/2, ..., h0/2^(n-1)`.
pub fn halving(h0: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| h0 / (1u64 << i) as f64).collect()
}
