//! Explicit one-step schemes `y_{n+1} = y_n + h Phi(t_n, y_n; h)`.

use crate::error::{domain, Error, Result};

pub type Rhs<'a> = dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'a;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OneStepScheme {
    Euler,
    Heun,
    Rk4,
}

impl OneStepScheme {
    pub fn order(&self) -> u32 {
        match self {
            OneStepScheme::Euler => 1,
            OneStepScheme::Heun => 2,
            OneStepScheme::Rk4 => 4,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OneStepScheme::Euler => "euler",
            OneStepScheme::Heun => "heun",
            OneStepScheme::Rk4 => "rk4",
        }
    }

    /// Increment function `Phi(t, y; h)`.
    pub fn increment(&self, rhs: &Rhs<'_>, t: f64, y: &[f64], h: f64) -> Vec<f64> {
        let axpy = |a: f64, x: &[f64]| -> Vec<f64> {
            y.iter().zip(x).map(|(yi, xi)| yi + a * xi).collect()
        };
        match self {
            OneStepScheme::Euler => rhs(t, y),
            OneStepScheme::Heun => {
                let k1 = rhs(t, y);
                let k2 = rhs(t + h, &axpy(h, &k1));
                k1.iter().zip(&k2).map(|(a, b)| 0.5 * (a + b)).collect()
            }
            OneStepScheme::Rk4 => {
                let k1 = rhs(t, y);
                let k2 = rhs(t + 0.5 * h, &axpy(0.5 * h, &k1));
                let k3 = rhs(t + 0.5 * h, &axpy(0.5 * h, &k2));
                let k4 = rhs(t + h, &axpy(h, &k3));
                (0..y.len())
                    .map(|i| (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0)
                    .collect()
            }
        }
    }
}

impl std::str::FromStr for OneStepScheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "euler" => Ok(Self::Euler),
            "heun" => Ok(Self::Heun),
            "rk4" => Ok(Self::Rk4),
            other => Err(format!(
                "unknown scheme '{other}' (expected euler, heun or rk4)"
            )),
        }
    }
}

/// Step times `t0 = s_0 < s_1 < ... < s_N = t0 + T`. Steps have length `h`
/// except a final shortened step when `h` does not divide `T` to within
/// `1e-12` relative.
pub fn step_times(t0: f64, span: f64, h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(domain(format!("step size must be positive, got {h}")));
    }
    if !(span > 0.0 && span.is_finite()) {
        return Err(domain(format!("time span must be positive, got {span}")));
    }
    let ratio = span / h;
    let nearest = ratio.round();
    let n_full = if (ratio - nearest).abs() <= 1e-12 * ratio.max(1.0) {
        nearest as usize
    } else {
        ratio.floor() as usize
    };
    let mut times: Vec<f64> = (0..=n_full).map(|n| t0 + n as f64 * h).collect();
    let end = t0 + span;
    if (t0 + n_full as f64 * h - end).abs() <= 1e-12 * span.max(1.0) {
        *times.last_mut().unwrap() = end;
    } else {
        times.push(end);
    }
    Ok(times)
}

/// Integrates from `t0` to `t0 + span`; the trajectory includes both ends.
pub fn integrate_ode(
    rhs: &Rhs<'_>,
    y0: &[f64],
    t0: f64,
    span: f64,
    h: f64,
    scheme: OneStepScheme,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let times = step_times(t0, span, h)?;
    let mut traj = Vec::with_capacity(times.len());
    let mut y = y0.to_vec();
    traj.push((times[0], y.clone()));
    for (n, w) in times.windows(2).enumerate() {
        let dt = w[1] - w[0];
        let phi = scheme.increment(rhs, w[0], &y, dt);
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration {
                step: n,
                reason: format!("non-finite increment at t={}", w[0]),
            });
        }
        for (yi, pi) in y.iter_mut().zip(&phi) {
            *yi += dt * pi;
        }
        traj.push((w[1], y.clone()));
    }
    Ok(traj)
}

/// `sum_n |y(t_{n+1}) - y(t_n) - dt Phi(t_n, y(t_n))|` along the exact
/// solution (Euclidean norm per step).
pub fn defect_sum(
    rhs: &Rhs<'_>,
    exact: &(dyn Fn(f64) -> Vec<f64> + Sync),
    t0: f64,
    span: f64,
    h: f64,
    scheme: OneStepScheme,
) -> Result<f64> {
    let times = step_times(t0, span, h)?;
    let mut total = 0.0;
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        let y0 = exact(w[0]);
        let y1 = exact(w[1]);
        let phi = scheme.increment(rhs, w[0], &y0, dt);
        let local: f64 = (0..y0.len())
            .map(|i| (y1[i] - y0[i] - dt * phi[i]).powi(2))
            .sum::<f64>()
            .sqrt();
        total += local;
    }
    Ok(total)
}
