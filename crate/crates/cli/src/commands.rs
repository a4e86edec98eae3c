use std::fs;
use std::path::Path;

use relacc::empirics::{
    generate_error_series, halving, Integrand, ManufacturedProblem, OdeErrorKind, OdeProblem, Study,
};
use relacc::{
    breakpoints, density_z, fit_model, fit_power_law, head_probability, mc_head_probability,
    sample_curve, BetaPair, Calibration, ElementPair, ErrorCap, LambdaPolicy, McConfig,
    ModelParams,
};

use crate::args::{
    CalibrateArgs, Command, CurveArgs, DemoArgs, DensityArgs, Family, GridArgs, McArgs,
    OdeErrorArg, PairArgs, PolicyArg,
};
use crate::csv::{format_float, parse_series, render, render_series};
use crate::meta::{write_with_sidecar, Meta};
use crate::CliError;

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Curve(a) => curve(&a),
        Command::Density(a) => density(&a),
        Command::Mc(a) => mc(&a),
        Command::Calibrate(a) => calibrate(&a),
        Command::Demo(a) => demo(&a),
    }
}

fn flag(msg: impl Into<String>) -> CliError {
    CliError::Flag(msg.into())
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(flag(format!("{name} must be positive and finite, got {x}")))
    }
}

fn element_pair(a: &PairArgs) -> Result<ElementPair, CliError> {
    if a.k1 == 0 {
        return Err(flag("--k1 must be at least 1"));
    }
    if a.k2 <= a.k1 {
        return Err(flag(format!("--k2 ({}) must exceed --k1 ({})", a.k2, a.k1)));
    }
    if a.m > a.k1 {
        return Err(flag(format!(
            "--m ({}) must not exceed --k1 ({})",
            a.m, a.k1
        )));
    }
    if !(a.p >= 1.0) {
        return Err(flag(format!("--p must be >= 1, got {}", a.p)));
    }
    Ok(ElementPair::new(a.k1, a.k2, a.m, a.p)?)
}

fn record_pair(meta: &mut Meta, pair: &ElementPair) {
    meta.text("k1", pair.k1())
        .text("k2", pair.k2())
        .text("m", pair.m())
        .float("p", pair.p());
}

fn record_model(meta: &mut Meta, params: &ModelParams) {
    record_pair(meta, params.pair());
    meta.float("c1", params.c_k1()).float("c2", params.c_k2());
    match params.cap() {
        ErrorCap::Finite(lambda) => {
            meta.float("lambda", lambda);
        }
        ErrorCap::Infinite => {
            meta.text("lambda", "inf");
        }
    }
    match breakpoints(params) {
        Ok(bp) => {
            meta.text("regime", bp.regime)
                .float("hbar1", bp.hbar1)
                .float("hbar2", bp.hbar2)
                .float("h_star", bp.h_star);
        }
        Err(_) => {
            meta.text("regime", "legacy")
                .float("h_star", params.h_star());
        }
    }
}

/// Resolves the sampling range, falling back to `default` for missing ends.
fn grid_range(g: &GridArgs, default: Option<(f64, f64)>) -> Result<(f64, f64), CliError> {
    let pick = |v: Option<f64>, d: Option<f64>, name: &str| {
        v.or(d)
            .ok_or_else(|| flag(format!("{name} is required")))
            .and_then(|x| positive(name, x))
    };
    let hmin = pick(g.hmin, default.map(|d| d.0), "--hmin")?;
    let hmax = pick(g.hmax, default.map(|d| d.1), "--hmax")?;
    if hmax <= hmin {
        return Err(flag(format!("--hmax ({hmax}) must exceed --hmin ({hmin})")));
    }
    if g.n < 2 {
        return Err(flag(format!("--n must be at least 2, got {}", g.n)));
    }
    Ok((hmin, hmax))
}

fn write_curve(
    params: &ModelParams,
    grid: &GridArgs,
    range: (f64, f64),
    out: &Path,
    mut meta: Meta,
) -> Result<(), CliError> {
    let points = sample_curve(params, range.0, range.1, grid.n, grid.spacing.into())?;
    record_model(&mut meta, params);
    meta.float("hmin", range.0)
        .float("hmax", range.1)
        .text("n", grid.n)
        .text("spacing", grid.spacing.name());
    let body = render(
        &["h", "probability"],
        points.iter().map(|&(h, p)| vec![h, p]),
    );
    write_with_sidecar(out, &body, &meta)
}

fn curve(a: &CurveArgs) -> Result<(), CliError> {
    let pair = element_pair(&a.pair)?;
    let c1 = positive("--c1", a.c1)?;
    let c2 = positive("--c2", a.c2)?;
    let cap = match a.lambda {
        Some(l) => ErrorCap::Finite(positive("--lambda", l)?),
        None => ErrorCap::Infinite,
    };
    let params = ModelParams::new(pair, c1, c2, cap)?;
    let range = grid_range(&a.grid, None)?;
    write_curve(&params, &a.grid, range, &a.out, Meta::new("curve"))
}

fn beta_flag(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Numeric(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

fn density(a: &DensityArgs) -> Result<(), CliError> {
    let b1 = beta_flag("--beta1", a.beta1)?;
    let b2 = beta_flag("--beta2", a.beta2)?;
    if a.n < 2 {
        return Err(flag(format!("--n must be at least 2, got {}", a.n)));
    }
    let beta = BetaPair::from_bounds(b1, b2)?;
    let lo = b1.min(b2);
    let last = (a.n - 1) as f64;
    let mut zs: Vec<f64> = (0..a.n)
        .map(|i| -b2 + (b1 + b2) * i as f64 / last)
        .collect();
    zs[a.n - 1] = b1;
    zs.extend([lo - b2, b1 - lo]);
    zs.sort_by(f64::total_cmp);
    zs.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (b1 + b2));
    let rows = zs
        .iter()
        .map(|&z| density_z(&beta, z).map(|f| vec![z, f]))
        .collect::<relacc::Result<Vec<_>>>()?;
    let mut meta = Meta::new("density");
    meta.float("beta1", b1).float("beta2", b2).text("n", a.n);
    write_with_sidecar(&a.out, &render(&["z", "f"], rows), &meta)
}

fn mc(a: &McArgs) -> Result<(), CliError> {
    let b1 = beta_flag("--beta1", a.beta1)?;
    let b2 = beta_flag("--beta2", a.beta2)?;
    if a.samples == 0 {
        return Err(flag("--samples must be at least 1"));
    }
    if a.streams == 0 {
        return Err(flag("--streams must be at least 1"));
    }
    let beta = BetaPair::from_bounds(b1, b2)?;
    let cfg = McConfig::new(a.samples, a.seed).with_streams(a.streams);
    let est = mc_head_probability(&beta, &cfg)?;
    let exact = head_probability(&beta)?;
    let body = render(
        &["p_hat", "std_err", "n", "closed_form"],
        [vec![est.p_hat, est.std_err, est.n as f64, exact]],
    );
    let mut meta = Meta::new("mc");
    meta.float("beta1", b1)
        .float("beta2", b2)
        .text("samples", a.samples)
        .text("seed", a.seed)
        .text("streams", a.streams);
    write_with_sidecar(&a.out, &body, &meta)
}

fn read_series(path: &Path) -> Result<relacc::ErrorSeries, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_series(&path.display().to_string(), &text)
}

/// `key=value` lines describing a calibration.
pub fn calibration_report(cal: &Calibration) -> String {
    let mut meta = Meta::default();
    record_model(&mut meta, &cal.params);
    meta.float("q1", cal.fit1.q)
        .float("q2", cal.fit2.q)
        .float("r2_1", cal.fit1.r2)
        .float("r2_2", cal.fit2.r2);
    for w in &cal.warnings {
        meta.text("warning", w);
    }
    meta.render()
}

fn calibrate(a: &CalibrateArgs) -> Result<(), CliError> {
    let pair = element_pair(&a.pair)?;
    let policy = match (a.lambda_policy, a.lambda) {
        (PolicyArg::Given, Some(l)) => LambdaPolicy::Given(positive("--lambda", l)?),
        (PolicyArg::Given, None) => {
            return Err(flag("--lambda is required with --lambda-policy given"))
        }
        (_, Some(_)) => {
            return Err(flag("--lambda is only valid with --lambda-policy given"));
        }
        (PolicyArg::Infinite, None) => LambdaPolicy::Infinite,
        (PolicyArg::Plateau, None) => LambdaPolicy::PlateauDetect,
    };
    let s1 = read_series(&a.input)?;
    let s2 = read_series(&a.input2)?;
    let cal = fit_model(&s1, &s2, pair, policy)?;
    let report = calibration_report(&cal);
    print!("{report}");

    let mut meta = Meta::new("calibrate");
    meta.text("in", a.input.display())
        .text("in2", a.input2.display())
        .text(
            "lambda_policy",
            match a.lambda_policy {
                PolicyArg::Given => "given",
                PolicyArg::Infinite => "infinite",
                PolicyArg::Plateau => "plateau",
            },
        );
    if let Some(out) = &a.out {
        let mut m = meta.clone();
        record_pair(&mut m, &pair);
        write_with_sidecar(out, &report, &m)?;
    }
    if let Some(out) = &a.curve_out {
        let (lo1, hi1) = s1.h_range();
        let (lo2, hi2) = s2.h_range();
        let range = grid_range(&a.grid, Some((lo1.min(lo2), hi1.max(hi2))))?;
        write_curve(&cal.params, &a.grid, range, out, meta)?;
    }
    Ok(())
}

const PRESETS: [(Family, &str); 6] = [
    (Family::Fem, "sin-pi"),
    (Family::Fem, "exp"),
    (Family::Quad, "expx"),
    (Family::Quad, "sinx"),
    (Family::Ode, "exp-growth"),
    (Family::Ode, "harmonic"),
];

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Fem => "fem",
        Family::Quad => "quad",
        Family::Ode => "ode",
    }
}

fn unknown_preset(family: Family, preset: &str) -> CliError {
    let known: Vec<&str> = PRESETS
        .iter()
        .filter(|(f, _)| *f == family)
        .map(|(_, p)| *p)
        .collect();
    flag(format!(
        "--preset: unknown {} preset '{preset}'; available: {}",
        family_name(family),
        known.join(", ")
    ))
}

/// The study selected by the demo flags and its default mesh sizes.
fn demo_study(a: &DemoArgs) -> Result<(Study, Vec<f64>), CliError> {
    let unknown = || unknown_preset(a.family, &a.preset);
    Ok(match a.family {
        Family::Fem => {
            let problem = match a.preset.as_str() {
                "sin-pi" => ManufacturedProblem::sin_pi(),
                "exp" => ManufacturedProblem::exp(),
                _ => return Err(unknown()),
            };
            if !(1..=3).contains(&a.k) {
                return Err(flag(format!("--k must be 1, 2 or 3, got {}", a.k)));
            }
            let (lo, hi) = problem.interval;
            let study = Study::Fem {
                problem,
                degree: a.k,
                m: a.m,
                p: a.p,
            };
            (study, halving((hi - lo) / 4.0, 5))
        }
        Family::Quad => {
            let integrand = match a.preset.as_str() {
                "expx" => Integrand::exp(),
                "sinx" => Integrand::sin(),
                _ => return Err(unknown()),
            };
            let (lo, hi) = integrand.interval;
            let study = Study::Quadrature {
                integrand,
                rule: a.rule,
            };
            (study, halving((hi - lo) / 2.0, 6))
        }
        Family::Ode => {
            let problem = match a.preset.as_str() {
                "exp-growth" => OdeProblem::exp_growth(),
                "harmonic" => OdeProblem::harmonic(),
                _ => return Err(unknown()),
            };
            let kind = match a.error {
                OdeErrorArg::Defect => OdeErrorKind::DefectSum,
                OdeErrorArg::Global => OdeErrorKind::EndTime,
            };
            let study = Study::Ode {
                problem,
                scheme: a.scheme,
                kind,
            };
            (study, halving(0.1, 6))
        }
    })
}

fn demo(a: &DemoArgs) -> Result<(), CliError> {
    let (study, default_h) = demo_study(a)?;
    let hs = if a.h.is_empty() {
        default_h
    } else {
        a.h.clone()
    };
    for &h in &hs {
        positive("--h", h)?;
    }
    let series = generate_error_series(&study, &hs)?;
    let fit = fit_power_law(&series)?;
    println!("label={}", study.label());
    println!("expected_order={}", format_float(study.expected_order()));
    println!("fitted_order={}", format_float(fit.q));

    let mut meta = Meta::new("demo");
    meta.text("family", family_name(a.family))
        .text("preset", &a.preset)
        .text("label", study.label());
    match a.family {
        Family::Fem => {
            meta.text("k", a.k).text("m", a.m).float("p", a.p);
        }
        Family::Quad => {
            meta.text("rule", a.rule.name());
        }
        Family::Ode => {
            meta.text("scheme", a.scheme.name()).text(
                "error",
                if a.error == OdeErrorArg::Defect {
                    "defect"
                } else {
                    "global"
                },
            );
        }
    }
    let h_list: Vec<String> = hs.iter().map(|&h| format_float(h)).collect();
    meta.text("h", h_list.join(","))
        .float("expected_order", study.expected_order());
    write_with_sidecar(&a.out, &render_series(&series), &meta)
}
