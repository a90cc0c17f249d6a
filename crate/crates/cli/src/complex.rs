//! Complex numbers on the command line: `a`, `bi`, `a+bi`, `a-bi`.

use num_complex::Complex64;

use crate::CliError;

fn parse_real(s: &str, whole: &str) -> Result<f64, CliError> {
    let v: f64 = s
        .parse()
        .map_err(|_| CliError::Usage(format!("malformed complex number '{whole}'")))?;
    if !v.is_finite() {
        return Err(CliError::Usage(format!("non-finite complex number '{whole}'")));
    }
    Ok(v)
}

fn parse_imag(s: &str, whole: &str) -> Result<f64, CliError> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => parse_real(s, whole),
    }
}

pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    if s.is_empty() || s.chars().any(char::is_whitespace) {
        return Err(CliError::Usage(format!("malformed complex number '{s}'")));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(s, s)?, 0.0));
    };
    // split at the last sign that is not the sign of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    match split {
        Some(p) => Ok(Complex64::new(parse_real(&body[..p], s)?, parse_imag(&body[p..], s)?)),
        None => Ok(Complex64::new(0.0, parse_imag(body, s)?)),
    }
}

fn format_real(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// Shortest round-tripping text; the imaginary part is omitted when it is +0.
pub fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 && c.im.is_sign_positive() {
        return format_real(c.re);
    }
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", format_real(c.re), sign, format_real(c.im.abs()))
}
