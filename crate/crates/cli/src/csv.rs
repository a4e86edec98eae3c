//! CSV interchange: header row, `,` separator, `.` decimals, LF endings,
//! floats with 17 significant digits.

use std::fmt::Write as _;

use relacc::{ErrorSample, ErrorSeries};

use crate::CliError;

/// Formats `x` like C's `%.17g`: 17 significant digits, trailing zeros
/// removed, scientific notation outside `1e-4 <= |x| < 1e17`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Renders rows under `header` with LF line endings.
pub fn render(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(format_float).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Parses an `h,err` series. Errors name the offending 1-based line.
pub fn parse_series(label: &str, text: &str) -> Result<ErrorSeries, CliError> {
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .map(|(_, l)| l.trim().to_string())
        .ok_or_else(|| CliError::Data(format!("{label}: empty file")))?;
    if header != "h,err" {
        return Err(CliError::Data(format!(
            "{label}: line 1: expected header 'h,err', found '{header}'"
        )));
    }
    let mut samples = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(CliError::Data(format!(
                "{label}: line {lineno}: expected 2 fields, found {}",
                fields.len()
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|_| {
                CliError::Data(format!("{label}: line {lineno}: '{s}' is not a number"))
            })
        };
        let (h, err) = (parse(fields[0])?, parse(fields[1])?);
        let sample = ErrorSample::new(h, err)
            .map_err(|e| CliError::Data(format!("{label}: line {lineno}: {e}")))?;
        samples.push(sample);
    }
    ErrorSeries::new(label, samples).map_err(|e| CliError::Data(format!("{label}: {e}")))
}

/// Renders a series as `h,err`.
pub fn render_series(series: &ErrorSeries) -> String {
    render(
        &["h", "err"],
        series.samples().iter().map(|s| vec![s.h, s.err]),
    )
}
