//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use relacc::{CounterRng, ElementPair, ErrorCap, ModelParams, Regime};

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 60)
}

/// Density of `X1 - X2` with `X1 ~ U[0, b1]`, `X2 ~ U[0, b2]`, by numerically
/// integrating `f_X2(x) f_X1(x + z)` over `x`.
pub fn convolution_density(b1: f64, b2: f64, z: f64) -> f64 {
    let ind = |x: f64, hi: f64| if (0.0..=hi).contains(&x) { 1.0 } else { 0.0 };
    let integrand = |x: f64| ind(x, b2) / b2 * ind(x + z, b1) / b1;
    // the integrand vanishes outside [0, b2]; split at the jump points so the
    // Simpson panels never straddle a discontinuity
    let mut cuts = vec![0.0, b2, -z, b1 - z];
    cuts.retain(|c| (0.0..=b2).contains(c));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let mid = 0.5 * (a + b);
            // the integrand is constant on each open sub-interval
            (b - a) * integrand(mid)
        })
        .sum()
}

/// Deterministic source of test inputs.
pub struct Inputs {
    rng: CounterRng,
    i: u64,
}

impl Inputs {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: CounterRng::new(seed),
            i: 0,
        }
    }

    pub fn unit(&mut self) -> f64 {
        self.i += 1;
        self.rng.unit_at(self.i)
    }

    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        (lo.ln() + self.unit() * (hi.ln() - lo.ln())).exp()
    }

    pub fn int(&mut self, lo: u32, hi: u32) -> u32 {
        lo + ((self.unit() * f64::from(hi - lo + 1)) as u32).min(hi - lo)
    }

    pub fn pair(&mut self) -> ElementPair {
        let k1 = self.int(1, 3);
        let k2 = k1 + self.int(1, 3);
        let m = self.int(1, k1);
        ElementPair::new(k1, k2, m, 2.0).unwrap()
    }

    pub fn params(&mut self, cap: ErrorCap) -> ModelParams {
        let pair = self.pair();
        let c1 = self.log_uniform(1e-2, 1e2);
        let c2 = self.log_uniform(1e-2, 1e2);
        ModelParams::new(pair, c1, c2, cap).unwrap()
    }

    /// Finite-cap parameters whose cap is `factor` times the intersection
    /// height, with `factor` drawn from `[lo, hi]` on a log scale.
    pub fn params_in_regime(&mut self, regime: Regime) -> ModelParams {
        let base = self.params(ErrorCap::Infinite);
        let height = base.poly_bound(relacc::Method::K1, base.h_star());
        let factor = match regime {
            Regime::LowLine => self.log_uniform(1e-3, 0.9),
            Regime::HighLine => self.log_uniform(1.1, 1e3),
            Regime::Degenerate => 1.0,
        };
        ModelParams::new(
            *base.pair(),
            base.c_k1(),
            base.c_k2(),
            ErrorCap::Finite(height * factor),
        )
        .unwrap()
    }

    pub fn any_finite_params(&mut self) -> ModelParams {
        let base = self.params(ErrorCap::Infinite);
        let height = base.poly_bound(relacc::Method::K1, base.h_star());
        let cap = height * self.log_uniform(1e-3, 1e3);
        ModelParams::new(
            *base.pair(),
            base.c_k1(),
            base.c_k2(),
            ErrorCap::Finite(cap),
        )
        .unwrap()
    }
}

/// Log grid of `n` points spanning `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect();
    g[0] = lo;
    g[n - 1] = hi;
    g
}

/// One-sided limits of `f` at `x`, estimated from evaluations at
/// `x (1 ± eps)` and `x (1 ± 2 eps)` by linear extrapolation.
pub fn one_sided_limits(f: &dyn Fn(f64) -> f64, x: f64, eps: f64) -> (f64, f64) {
    let left = 2.0 * f(x * (1.0 - eps)) - f(x * (1.0 - 2.0 * eps));
    let right = 2.0 * f(x * (1.0 + eps)) - f(x * (1.0 + 2.0 * eps));
    (left, right)
}
