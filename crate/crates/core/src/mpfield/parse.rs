//! Decimal and rational string conversion.

use rug::{Float, Integer, Rational};

use super::Cplx;
use crate::error::{Error, Result};

/// Parse an exact rational from `p/q`, an integer, or a decimal with optional exponent.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d == 0 {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        return Ok(n / d);
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| Error::Parse(format!("bad exponent in '{s}'")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, body) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("no digits in '{s}'")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("invalid number '{s}'")));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num =
        Integer::from_str_radix(if digits.is_empty() { "0" } else { &digits }, 10).map_err(|e| Error::Parse(format!("'{s}': {e}")))?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let r = if scale >= 0 {
        Rational::from(num * Integer::from(Integer::u_pow_u(10, scale as u32)))
    } else {
        Rational::from((num, Integer::from(Integer::u_pow_u(10, (-scale) as u32))))
    };
    Ok(r)
}

/// Parse a real number at `prec` bits (exact rationals are rounded once).
pub fn parse_real(s: &str, prec: u32) -> Result<Float> {
    let t = s.trim();
    match t {
        "pi" => return Ok(Float::with_val(prec, rug::float::Constant::Pi)),
        "-pi" => return Ok(-Float::with_val(prec, rug::float::Constant::Pi)),
        _ => {}
    }
    Ok(Float::with_val(prec, &parse_rational(t)?))
}

/// Split `a+bi` style text into real and imaginary substrings.
pub(crate) fn split_complex(s: &str) -> Result<(String, String)> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(Error::Parse("empty complex number".into()));
    }
    if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        if let Some((a, b)) = inner.split_once(',') {
            return Ok((a.to_string(), b.to_string()));
        }
    }
    if !t.ends_with('i') {
        return Ok((t, "0".into()));
    }
    let body = &t[..t.len() - 1];
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let c = bytes[i] as char;
        if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E' | '/') {
            split = Some(i);
            break;
        }
    }
    let fix = |im: &str| -> String {
        match im {
            "" | "+" => "1".into(),
            "-" => "-1".into(),
            _ => im.to_string(),
        }
    };
    match split {
        Some(i) => Ok((body[..i].to_string(), fix(&body[i..]))),
        None => Ok(("0".into(), fix(body))),
    }
}

/// Parse `a`, `bi`, `a+bi`, `a-bi` or `(a,b)`.
pub fn parse_cplx(s: &str, prec: u32) -> Result<Cplx> {
    let (re, im) = split_complex(s)?;
    Ok(Cplx::from_parts(parse_real(&re, prec)?, parse_real(&im, prec)?))
}

/// Exact complex rational `(re, im)` from the same syntax.
pub fn parse_cplx_rational(s: &str) -> Result<(Rational, Rational)> {
    let (re, im) = split_complex(s)?;
    Ok((parse_rational(&re)?, parse_rational(&im)?))
}

/// Scientific notation with `digits` significant digits.
pub fn format_float(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.to_string_radix(10, Some(digits.max(1)))
}

/// `a+bi` / `a-bi` with `digits` significant digits per part.
pub fn format_cplx(z: &Cplx, digits: usize) -> String {
    let re = format_float(&z.re, digits);
    let im = format_float(&z.im, digits);
    if im.starts_with('-') {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-15/4").unwrap(), Rational::from((-15, 4)));
        assert_eq!(parse_rational("2.5e-1").unwrap(), Rational::from((1, 4)));
        assert_eq!(parse_rational("-.5").unwrap(), Rational::from((-1, 2)));
        assert_eq!(parse_rational("12").unwrap(), Rational::from(12));
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn complex_forms() {
        let p = 100;
        let z = parse_cplx("30+i", p).unwrap();
        assert_eq!((z.re.to_f64(), z.im.to_f64()), (30.0, 1.0));
        let z = parse_cplx("-1.5e2-2.5e-1i", p).unwrap();
        assert_eq!((z.re.to_f64(), z.im.to_f64()), (-150.0, -0.25));
        let z = parse_cplx("-i", p).unwrap();
        assert_eq!((z.re.to_f64(), z.im.to_f64()), (0.0, -1.0));
        let z = parse_cplx("(1/2,-3)", p).unwrap();
        assert_eq!((z.re.to_f64(), z.im.to_f64()), (0.5, -3.0));
    }

    #[test]
    fn format_round_trips() {
        let p = 200;
        let z = Cplx::from_parts(Float::with_val(p, 1) / 3u32, -Float::with_val(p, 2).sqrt() * 1e40);
        let s = format_cplx(&z, 55);
        let back = parse_cplx(&s, p).unwrap();
        assert!(back.rel_diff(&z) < 1e-53);
    }
}
