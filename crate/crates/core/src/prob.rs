//! Closed-form probability laws for comparing two approximation methods at a
//! fixed discretization size.
//!
//! Each method `k` has an error envelope
//! `beta_k(h) = min(cap, C_k * h^(k + 1 - m))`. The observed error of method
//! `k` is modelled as `X_k ~ U([0, beta_k])`, the two variables independent.
//! This module evaluates the density and distribution function of
//! `Z = X_k1 - X_k2`, the head probability `P{X_k1 <= X_k2} = F_Z(0)`, and the
//! resulting curve `h -> P{X_k1 <= X_k2}` in every regime of the cap.

use crate::error::{domain, Error, Result};

/// Relative tolerance used to decide that the cap sits exactly at the
/// intersection height of the two polynomial bounds.
pub const REGIME_REL_TOL: f64 = 1e-12;

/// The two compared methods (polynomial degrees `k1 < k2`), the Sobolev
/// order `m` of the error norm, and its Lebesgue exponent `p`.
///
/// `p` is metadata: it names the norm the constants were calibrated in and
/// does not enter any closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementPair {
    k1: u32,
    k2: u32,
    m: u32,
    p: f64,
}

impl ElementPair {
    pub fn new(k1: u32, k2: u32, m: u32, p: f64) -> Result<Self> {
        if k1 >= k2 {
            return Err(domain(format!("need k1 < k2, got k1={k1}, k2={k2}")));
        }
        if k1 < m {
            return Err(domain(format!(
                "convergence exponent k1 + 1 - m must be >= 1, got k1={k1}, m={m}"
            )));
        }
        if !(p >= 1.0) {
            return Err(domain(format!("Lebesgue exponent p must be >= 1, got {p}")));
        }
        Ok(Self { k1, k2, m, p })
    }

    pub fn k1(&self) -> u32 {
        self.k1
    }

    pub fn k2(&self) -> u32 {
        self.k2
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Convergence exponent `k + 1 - m` of the selected method.
    pub fn exponent(&self, which: Method) -> i32 {
        let k = match which {
            Method::K1 => self.k1,
            Method::K2 => self.k2,
        };
        (k + 1) as i32 - self.m as i32
    }

    /// `k2 - k1`.
    pub fn degree_gap(&self) -> i32 {
        (self.k2 - self.k1) as i32
    }
}

/// Selects one of the two compared methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    K1,
    K2,
}

/// The a priori cap on the error norm (`||l||_{V'} / alpha*` in aggregate).
///
/// `Infinite` drops the cap and recovers the uncapped legacy law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorCap {
    Finite(f64),
    Infinite,
}

impl ErrorCap {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ErrorCap::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            ErrorCap::Finite(v) => Some(v),
            ErrorCap::Infinite => None,
        }
    }
}

/// Everything needed to evaluate the probability curve of a method pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pair: ElementPair,
    c_k1: f64,
    c_k2: f64,
    cap: ErrorCap,
}

impl ModelParams {
    pub fn new(pair: ElementPair, c_k1: f64, c_k2: f64, cap: ErrorCap) -> Result<Self> {
        check_positive("C_k1", c_k1)?;
        check_positive("C_k2", c_k2)?;
        if let ErrorCap::Finite(lambda) = cap {
            check_positive("lambda", lambda)?;
        }
        Ok(Self {
            pair,
            c_k1,
            c_k2,
            cap,
        })
    }

    pub fn pair(&self) -> &ElementPair {
        &self.pair
    }

    pub fn c_k1(&self) -> f64 {
        self.c_k1
    }

    pub fn c_k2(&self) -> f64 {
        self.c_k2
    }

    pub fn constant(&self, which: Method) -> f64 {
        match which {
            Method::K1 => self.c_k1,
            Method::K2 => self.c_k2,
        }
    }

    pub fn cap(&self) -> ErrorCap {
        self.cap
    }

    /// Polynomial bound `C_k * h^(k + 1 - m)` without the cap.
    pub fn poly_bound(&self, which: Method, h: f64) -> f64 {
        self.constant(which) * h.powi(self.pair.exponent(which))
    }

    /// Mesh size where the two polynomial bounds intersect.
    pub fn h_star(&self) -> f64 {
        let ratio = self.c_k1 / self.c_k2;
        let gap = self.pair.degree_gap();
        if gap == 1 {
            ratio
        } else {
            ratio.powf(1.0 / gap as f64)
        }
    }

    /// Bound pair at mesh size `h`.
    pub fn beta_pair(&self, h: f64) -> Result<BetaPair> {
        BetaPair::new(h, self.beta(Method::K1, h)?, self.beta(Method::K2, h)?)
    }

    /// `beta_k(h) = min(cap, C_k h^(k+1-m))`.
    pub fn beta(&self, which: Method, h: f64) -> Result<f64> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(domain(format!(
                "mesh size must be positive and finite, got {h}"
            )));
        }
        let poly = self.poly_bound(which, h);
        Ok(match self.cap {
            ErrorCap::Finite(lambda) => lambda.min(poly),
            ErrorCap::Infinite => poly,
        })
    }
}

/// Free-function form of [`ModelParams::beta`].
pub fn beta_k(params: &ModelParams, which: Method, h: f64) -> Result<f64> {
    params.beta(which, h)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// Error bounds of both methods at one mesh size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPair {
    pub h: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl BetaPair {
    pub fn new(h: f64, beta1: f64, beta2: f64) -> Result<Self> {
        for (name, v) in [("beta1", beta1), ("beta2", beta2)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { h, beta1, beta2 })
    }

    /// Bounds without an attached mesh size (`h` is recorded as NaN).
    pub fn from_bounds(beta1: f64, beta2: f64) -> Result<Self> {
        Self::new(f64::NAN, beta1, beta2)
    }

    pub fn swapped(&self) -> Self {
        Self {
            h: self.h,
            beta1: self.beta2,
            beta2: self.beta1,
        }
    }

    fn require_density(&self) -> Result<()> {
        if self.beta1 == 0.0 || self.beta2 == 0.0 {
            return Err(Error::Degenerate(format!(
                "beta1={}, beta2={}: a zero bound gives a point mass",
                self.beta1, self.beta2
            )));
        }
        Ok(())
    }
}

/// Which family of curve branches applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Cap below the intersection height: `hbar1 <= hbar2 <= h*`.
    LowLine,
    /// Cap above the intersection height: `h* <= hbar2 <= hbar1`.
    HighLine,
    /// Cap exactly at the intersection height: `hbar1 = hbar2 = h*`.
    Degenerate,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::LowLine => "low-line",
            Regime::HighLine => "high-line",
            Regime::Degenerate => "degenerate",
        })
    }
}

/// Critical mesh sizes where each bound meets the cap, and where the two
/// polynomial bounds cross.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeBreakpoints {
    pub hbar1: f64,
    pub hbar2: f64,
    pub h_star: f64,
    pub regime: Regime,
}

/// Computes `hbar_k = (cap / C_k)^(1/(k+1-m))`, `h*`, and the regime.
pub fn breakpoints(params: &ModelParams) -> Result<RegimeBreakpoints> {
    let lambda = params
        .cap
        .finite()
        .ok_or(Error::Legacy("no cap, hence no critical mesh sizes"))?;
    let hbar = |which: Method| {
        let ratio = lambda / params.constant(which);
        let e = params.pair.exponent(which);
        if e == 1 {
            ratio
        } else {
            ratio.powf(1.0 / e as f64)
        }
    };
    let h_star = params.h_star();
    let height = params.poly_bound(Method::K1, h_star);
    let regime = if (lambda - height).abs() <= REGIME_REL_TOL * lambda.max(height) {
        Regime::Degenerate
    } else if lambda < height {
        Regime::LowLine
    } else {
        Regime::HighLine
    };
    Ok(RegimeBreakpoints {
        hbar1: hbar(Method::K1),
        hbar2: hbar(Method::K2),
        h_star,
        regime,
    })
}

/// Density of `Z = X_k1 - X_k2` at `z`.
///
/// The density is a trapezoid on `[-beta2, beta1]`: it rises linearly over a
/// width `min(beta1, beta2)`, stays at `1 / max(beta1, beta2)`, then falls
/// linearly over the same width.
pub fn density_z(beta: &BetaPair, z: f64) -> Result<f64> {
    beta.require_density()?;
    let (a, b) = (beta.beta1, beta.beta2);
    let (lo, hi) = (a.min(b), a.max(b));
    if z <= -b || z >= a {
        return Ok(0.0);
    }
    let rise_end = lo - b;
    let fall_start = a - lo;
    Ok(if z < rise_end {
        (b + z) / (a * b)
    } else if z > fall_start {
        (a - z) / (a * b)
    } else {
        1.0 / hi
    })
}

/// Distribution function `F_Z(z) = P{X_k1 - X_k2 <= z}`.
pub fn cdf_z(beta: &BetaPair, z: f64) -> Result<f64> {
    beta.require_density()?;
    let (a, b) = (beta.beta1, beta.beta2);
    let (lo, hi) = (a.min(b), a.max(b));
    if z <= -b {
        return Ok(0.0);
    }
    if z >= a {
        return Ok(1.0);
    }
    let rise_end = lo - b;
    let fall_start = a - lo;
    Ok(if z < rise_end {
        let s = z + b;
        s * s / (2.0 * a * b)
    } else if z > fall_start {
        let s = a - z;
        1.0 - s * s / (2.0 * a * b)
    } else {
        // flat segment always contains z = 0
        head_probability_unchecked(a, b) + z / hi
    })
}

/// `P{X_k1 <= X_k2} = F_Z(0)`.
pub fn head_probability(beta: &BetaPair) -> Result<f64> {
    beta.require_density()?;
    Ok(head_probability_unchecked(beta.beta1, beta.beta2))
}

fn head_probability_unchecked(b1: f64, b2: f64) -> f64 {
    if b1 <= b2 {
        1.0 - 0.5 * (b1 / b2)
    } else {
        0.5 * (b2 / b1)
    }
}

/// The curve `h -> P{X_k1 <= X_k2}` in closed form.
///
/// `h = 0` returns the continuous extension `0`.
pub fn probability_curve(params: &ModelParams, h: f64) -> Result<f64> {
    if !(h >= 0.0) || !h.is_finite() {
        return Err(domain(format!(
            "mesh size must be >= 0 and finite, got {h}"
        )));
    }
    if h == 0.0 {
        return Ok(0.0);
    }
    let gap = params.pair.degree_gap();
    let h_star = params.h_star();
    let rising = |h: f64| 0.5 * (h / h_star).powi(gap);
    let falling = |h: f64| 1.0 - 0.5 * (h_star / h).powi(gap);

    if params.cap.is_infinite() {
        return Ok(if h <= h_star { rising(h) } else { falling(h) });
    }
    let bp = breakpoints(params)?;
    let p = match bp.regime {
        Regime::LowLine | Regime::Degenerate => {
            if h <= bp.hbar1 {
                rising(h)
            } else if h <= bp.hbar2 {
                0.5 * (h / bp.hbar2).powi(params.pair.exponent(Method::K2))
            } else {
                0.5
            }
        }
        Regime::HighLine => {
            if h <= bp.h_star {
                rising(h)
            } else if h <= bp.hbar2 {
                falling(h)
            } else if h <= bp.hbar1 {
                1.0 - 0.5 * (h / bp.hbar1).powi(params.pair.exponent(Method::K1))
            } else {
                0.5
            }
        }
    };
    Ok(p)
}

/// Grid spacing for [`sample_curve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// Mesh sizes where the curve has a kink for the given parameters.
pub fn kinks(params: &ModelParams) -> Vec<f64> {
    match breakpoints(params) {
        Err(_) => vec![params.h_star()],
        Ok(bp) => match bp.regime {
            Regime::LowLine => vec![bp.hbar1, bp.hbar2],
            Regime::HighLine => vec![bp.h_star, bp.hbar2, bp.hbar1],
            Regime::Degenerate => vec![bp.h_star],
        },
    }
}

/// Samples the curve on `n` grid points over `[h_min, h_max]` plus every
/// kink strictly inside the range. Returns `(h, P)` sorted by `h`.
pub fn sample_curve(
    params: &ModelParams,
    h_min: f64,
    h_max: f64,
    n: usize,
    spacing: Spacing,
) -> Result<Vec<(f64, f64)>> {
    let mut hs = grid(h_min, h_max, n, spacing)?;
    for k in kinks(params) {
        if k > h_min && k < h_max {
            hs.push(k);
        }
    }
    hs.sort_by(f64::total_cmp);
    hs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(b.abs()));
    hs.into_iter()
        .map(|h| probability_curve(params, h).map(|p| (h, p)))
        .collect()
}

/// `n` points spanning `[lo, hi]` with both endpoints exact.
pub fn grid(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(domain(format!("need at least 2 sample points, got {n}")));
    }
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(domain(format!("need 0 < h_min < h_max, got [{lo}, {hi}]")));
    }
    let last = (n - 1) as f64;
    let mut out: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / last;
            match spacing {
                Spacing::Linear => lo + t * (hi - lo),
                Spacing::Log => (lo.ln() + t * (hi.ln() - lo.ln())).exp(),
            }
        })
        .collect();
    out[0] = lo;
    out[n - 1] = hi;
    Ok(out)
}
