//! Log-log least-squares calibration of the model constants from observed
//! `(h, error)` data.

use crate::error::{Error, Result};
use crate::prob::{ElementPair, ErrorCap, Method, ModelParams};

/// Consecutive samples whose log-log slope is below this (in absolute value)
/// are treated as saturated at the a priori cap.
pub const PLATEAU_SLOPE: f64 = 0.2;

/// Fitted exponents further than this from theory raise a warning.
pub const EXPONENT_TOLERANCE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSample {
    pub h: f64,
    pub err: f64,
}

impl ErrorSample {
    pub fn new(h: f64, err: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Data(format!(
                "h must be positive and finite, got {h}"
            )));
        }
        if !(err > 0.0 && err.is_finite()) {
            return Err(Error::Data(format!(
                "error must be positive and finite, got {err} at h={h}"
            )));
        }
        Ok(Self { h, err })
    }
}

/// Observations for one method, sorted by increasing `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries {
    pub method_label: String,
    samples: Vec<ErrorSample>,
}

impl ErrorSeries {
    pub fn new(method_label: impl Into<String>, mut samples: Vec<ErrorSample>) -> Result<Self> {
        for s in &samples {
            ErrorSample::new(s.h, s.err)?;
        }
        samples.sort_by(|a, b| a.h.total_cmp(&b.h));
        let distinct = samples.windows(2).filter(|w| w[0].h != w[1].h).count() + 1;
        if samples.is_empty() || distinct < 2 {
            return Err(Error::Data(format!(
                "need at least two distinct h values, got {}",
                if samples.is_empty() { 0 } else { distinct }
            )));
        }
        Ok(Self {
            method_label: method_label.into(),
            samples,
        })
    }

    /// Builds a series from raw pairs.
    pub fn from_pairs(
        method_label: impl Into<String>,
        pairs: impl IntoIterator<Item = (f64, f64)>,
    ) -> Result<Self> {
        let samples = pairs
            .into_iter()
            .map(|(h, e)| ErrorSample::new(h, e))
            .collect::<Result<Vec<_>>>()?;
        Self::new(method_label, samples)
    }

    pub fn samples(&self) -> &[ErrorSample] {
        &self.samples
    }

    pub fn h_range(&self) -> (f64, f64) {
        (self.samples[0].h, self.samples[self.samples.len() - 1].h)
    }

    /// Log-log slope between each pair of consecutive samples with distinct `h`.
    pub fn local_slopes(&self) -> Vec<f64> {
        self.samples
            .windows(2)
            .filter(|w| w[0].h != w[1].h)
            .map(|w| (w[1].err / w[0].err).ln() / (w[1].h / w[0].h).ln())
            .collect()
    }

    /// Flags samples that belong to a consecutive pair with
    /// `|slope| < PLATEAU_SLOPE`.
    pub fn saturated(&self) -> Vec<bool> {
        let mut flags = vec![false; self.samples.len()];
        for i in 0..self.samples.len().saturating_sub(1) {
            let (a, b) = (self.samples[i], self.samples[i + 1]);
            if a.h == b.h {
                continue;
            }
            let slope = (b.err / a.err).ln() / (b.h / a.h).ln();
            if slope.abs() < PLATEAU_SLOPE {
                flags[i] = true;
                flags[i + 1] = true;
            }
        }
        flags
    }
}

/// `err ~ c * h^q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub c: f64,
    pub q: f64,
    /// Coefficient of determination in log space.
    pub r2: f64,
}

impl PowerLawFit {
    pub fn eval(&self, h: f64) -> f64 {
        self.c * h.powf(self.q)
    }
}

/// Ordinary least squares on `(ln h, ln err)`.
pub fn fit_power_law(series: &ErrorSeries) -> Result<PowerLawFit> {
    fit_samples(series.samples())
}

fn fit_samples(samples: &[ErrorSample]) -> Result<PowerLawFit> {
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.h.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.err.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Data("need at least two distinct h values".into()));
    }
    let q = sxy / sxx;
    let intercept = my - q * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - q * x).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(PowerLawFit {
        c: intercept.exp(),
        q,
        r2,
    })
}

/// How to choose the a priori cap when calibrating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaPolicy {
    Given(f64),
    Infinite,
    /// Mean error over samples flagged as order-saturated in either series;
    /// those samples are left out of the power-law fits.
    PlateauDetect,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CalibrationWarning {
    ExponentMismatch {
        method: Method,
        fitted: f64,
        expected: i32,
    },
    NoPlateau,
}

impl std::fmt::Display for CalibrationWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CalibrationWarning::ExponentMismatch {
                method,
                fitted,
                expected,
            } => write!(
                f,
                "fitted exponent {fitted} for {method:?} differs from the expected {expected} by more than {EXPONENT_TOLERANCE}"
            ),
            CalibrationWarning::NoPlateau => {
                f.write_str("no order-saturated samples found; falling back to an infinite cap")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub params: ModelParams,
    pub fit1: PowerLawFit,
    pub fit2: PowerLawFit,
    pub warnings: Vec<CalibrationWarning>,
}

/// Calibrates `C_k1`, `C_k2` and the cap from two error series.
pub fn fit_model(
    series1: &ErrorSeries,
    series2: &ErrorSeries,
    pair: ElementPair,
    policy: LambdaPolicy,
) -> Result<Calibration> {
    let mut warnings = Vec::new();
    let (fit1, fit2, cap) = match policy {
        LambdaPolicy::Given(lambda) => (
            fit_power_law(series1)?,
            fit_power_law(series2)?,
            ErrorCap::Finite(lambda),
        ),
        LambdaPolicy::Infinite => (
            fit_power_law(series1)?,
            fit_power_law(series2)?,
            ErrorCap::Infinite,
        ),
        LambdaPolicy::PlateauDetect => {
            let (fit1, sat1) = fit_unsaturated(series1)?;
            let (fit2, sat2) = fit_unsaturated(series2)?;
            let plateau: Vec<f64> = sat1.into_iter().chain(sat2).collect();
            let cap = if plateau.is_empty() {
                warnings.push(CalibrationWarning::NoPlateau);
                ErrorCap::Infinite
            } else {
                ErrorCap::Finite(plateau.iter().sum::<f64>() / plateau.len() as f64)
            };
            (fit1, fit2, cap)
        }
    };
    for (method, fit) in [(Method::K1, &fit1), (Method::K2, &fit2)] {
        let expected = pair.exponent(method);
        if (fit.q - expected as f64).abs() > EXPONENT_TOLERANCE {
            warnings.push(CalibrationWarning::ExponentMismatch {
                method,
                fitted: fit.q,
                expected,
            });
        }
    }
    let params = ModelParams::new(pair, fit1.c, fit2.c, cap)?;
    Ok(Calibration {
        params,
        fit1,
        fit2,
        warnings,
    })
}

/// Fits on unsaturated samples when at least two distinct `h` remain, and
/// returns the saturated error values.
fn fit_unsaturated(series: &ErrorSeries) -> Result<(PowerLawFit, Vec<f64>)> {
    let flags = series.saturated();
    let (kept, plateau): (Vec<_>, Vec<_>) =
        series.samples().iter().zip(&flags).partition(|(_, &f)| !f);
    let kept: Vec<ErrorSample> = kept.into_iter().map(|(s, _)| *s).collect();
    let plateau: Vec<f64> = plateau.into_iter().map(|(s, _)| s.err).collect();
    let distinct = kept.windows(2).filter(|w| w[0].h != w[1].h).count() + 1;
    let fit = if kept.len() >= 2 && distinct >= 2 {
        fit_samples(&kept)?
    } else {
        fit_power_law(series)?
    };
    Ok((fit, plateau))
}
