//! Plain-text matrix format: four lines of four whitespace-separated complex
//! entries written `re+imi` (or `re-imi`). Blank lines and lines starting
//! with `#` are ignored. A bare real number is accepted as `re+0i`.

use super::{CMatrix4, DensityMatrix4, C64};
use crate::error::{Error, Result};

fn parse_real(s: &str, line: usize) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("`{s}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("`{s}` is not finite"),
        });
    }
    Ok(v)
}

/// Parses a single `re±imi` token.
pub(crate) fn parse_complex(token: &str, line: usize) -> Result<C64> {
    let Some(body) = token.strip_suffix('i') else {
        return Ok(C64::new(parse_real(token, line)?, 0.0));
    };
    let bytes = body.as_bytes();
    // sign that separates the parts: not the leading one, not an exponent's
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let Some(k) = split else {
        return Err(Error::Parse {
            line,
            msg: format!("`{token}` is not of the form re+imi"),
        });
    };
    let re = parse_real(&body[..k], line)?;
    let im = parse_real(&body[k..], line)?;
    Ok(C64::new(re, im))
}

/// Parses the raw 4×4 matrix without checking that it is a state.
pub fn parse_matrix(input: &str) -> Result<CMatrix4> {
    let mut m = CMatrix4::zeros();
    let mut row = 0usize;
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if row == 4 {
            return Err(Error::Parse {
                line: line_no,
                msg: "more than four matrix rows".into(),
            });
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 4 entries, found {}", tokens.len()),
            });
        }
        for (col, tok) in tokens.iter().enumerate() {
            m[(row, col)] = parse_complex(tok, line_no)?;
        }
        row += 1;
    }
    if row != 4 {
        return Err(Error::Parse {
            line: input.lines().count(),
            msg: format!("expected 4 matrix rows, found {row}"),
        });
    }
    Ok(m)
}

/// Parses and validates a state.
pub fn parse_state(input: &str) -> Result<DensityMatrix4> {
    DensityMatrix4::new(parse_matrix(input)?)
}

fn format_entry(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

/// Writes a state in the format read by [`parse_state`]; values round-trip
/// exactly.
pub fn format_state(rho: &DensityMatrix4) -> String {
    let m = rho.matrix();
    let mut out = String::new();
    for i in 0..4 {
        let row: Vec<String> = (0..4).map(|j| format_entry(m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
