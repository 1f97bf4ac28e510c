//! Small shared helpers for the line-oriented text formats.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Non-empty lines with `#` comments stripped, paired with 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((k + 1, line))
    })
}

pub(crate) fn parse_f64(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| Error::parse(line, format!("`{token}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("`{token}` is not finite")));
    }
    Ok(v)
}

pub(crate) fn parse_complex(re: &str, im: &str, line: usize) -> Result<Complex64> {
    Ok(Complex64::new(parse_f64(re, line)?, parse_f64(im, line)?))
}

/// Parses an angle in radians: a plain number, or a multiple/fraction of pi
/// such as `pi/2`, `3pi/8`, `-pi`, `2*π/3`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let s: String = text.trim().chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::input(format!("cannot read angle `{text}`"));
    if s.is_empty() {
        return Err(bad());
    }
    let pi_pos = s.find("pi").map(|p| (p, 2)).or_else(|| s.find('π').map(|p| (p, 'π'.len_utf8())));
    let value = match pi_pos {
        None => {
            let (num, den) = split_fraction(&s);
            let num: f64 = num.parse().map_err(|_| bad())?;
            match den {
                Some(d) => num / d.parse::<f64>().map_err(|_| bad())?,
                None => num,
            }
        }
        Some((p, len)) => {
            let coeff = s[..p].trim_end_matches('*');
            let coeff = match coeff {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            let rest = &s[p + len..];
            let den = if rest.is_empty() {
                1.0
            } else {
                let d = rest.strip_prefix('/').ok_or_else(bad)?;
                d.parse::<f64>().map_err(|_| bad())?
            };
            coeff * std::f64::consts::PI / den
        }
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

fn split_fraction(s: &str) -> (&str, Option<&str>) {
    match s.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (s, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("3pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_angle("3*pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("π/4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("1.0").unwrap(), 1.0);
        assert_eq!(parse_angle("0").unwrap(), 0.0);
        assert_eq!(parse_angle("1/4").unwrap(), 0.25);
        for bad in ["", "pi/", "xpi", "pi2", "nan", "1/0", "inf"] {
            assert!(parse_angle(bad).is_err(), "accepted `{bad}`");
        }
    }

    #[test]
    fn comments_and_blanks_skipped() {
        let lines: Vec<_> = content_lines("a\n\n  # x\nb # c\n").collect();
        assert_eq!(lines, vec![(1, "a"), (4, "b")]);
    }
}
