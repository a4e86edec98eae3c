use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    Midpoint,
    Trapezoid,
    Simpson,
}

impl QuadratureRule {
    /// Convergence exponent of the composite error bound `C h^q`.
    pub fn order(&self) -> u32 {
        match self {
            QuadratureRule::Midpoint | QuadratureRule::Trapezoid => 2,
            QuadratureRule::Simpson => 4,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            QuadratureRule::Midpoint => "midpoint",
            QuadratureRule::Trapezoid => "trapezoid",
            QuadratureRule::Simpson => "simpson",
        }
    }
}

impl std::str::FromStr for QuadratureRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "midpoint" => Ok(Self::Midpoint),
            "trapezoid" => Ok(Self::Trapezoid),
            "simpson" => Ok(Self::Simpson),
            other => Err(format!(
                "unknown rule '{other}' (expected midpoint, trapezoid or simpson)"
            )),
        }
    }
}

/// Composite rule over `panels` equal panels; Simpson applies the 3-point
/// rule inside each panel.
pub fn composite_quadrature(
    f: impl Fn(f64) -> f64,
    interval: (f64, f64),
    panels: usize,
    rule: QuadratureRule,
) -> Result<f64> {
    if panels < 1 {
        return Err(domain("composite quadrature needs at least one panel"));
    }
    let (a, b) = interval;
    let h = (b - a) / panels as f64;
    let x = |i: usize| if i == panels { b } else { a + h * i as f64 };
    let sum: f64 = match rule {
        QuadratureRule::Midpoint => (0..panels).map(|i| f(a + h * (i as f64 + 0.5))).sum(),
        QuadratureRule::Trapezoid => {
            0.5 * (f(a) + f(b)) + (1..panels).map(|i| f(x(i))).sum::<f64>()
        }
        QuadratureRule::Simpson => {
            let ends = f(a) + f(b) + 2.0 * (1..panels).map(|i| f(x(i))).sum::<f64>();
            let mids: f64 = (0..panels).map(|i| f(a + h * (i as f64 + 0.5))).sum();
            (ends + 4.0 * mids) / 6.0
        }
    };
    Ok(h * sum)
}
