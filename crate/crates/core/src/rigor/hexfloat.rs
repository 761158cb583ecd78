//! Lowercase hexadecimal floating-point literals, e.g. `0x1.921fb54442d18p+1`.
//!
//! The emitted form is canonical (normalized mantissa, trailing zero digits
//! trimmed, subnormals as `0x0.<frac>p-1022`), and parsing accepts exactly
//! that form, so every binary64 round-trips bit for bit.

use crate::Error;

pub fn to_hex(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    let sign = if x.is_sign_negative() { "-" } else { "" };
    if x.is_infinite() {
        return format!("{sign}inf");
    }
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 && frac == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exp_bits == 0 {
        (0, -1022)
    } else {
        (1, exp_bits - 1023)
    };
    let mut digits = format!("{frac:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let esign = if exp < 0 { '-' } else { '+' };
    if digits.is_empty() {
        format!("{sign}0x{lead}p{esign}{}", exp.abs())
    } else {
        format!("{sign}0x{lead}.{digits}p{esign}{}", exp.abs())
    }
}

pub fn from_hex(s: &str) -> Result<f64, Error> {
    let bad = || Error::Parse(format!("malformed hex float {s:?}"));
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let sign_bit = if neg { 1u64 << 63 } else { 0 };
    if body == "inf" {
        return Ok(if neg { f64::NEG_INFINITY } else { f64::INFINITY });
    }
    let body = body.strip_prefix("0x").ok_or_else(bad)?;
    let (mant, exp) = body.split_once('p').ok_or_else(bad)?;
    let exp: i32 = exp.parse().map_err(|_| bad())?;
    let (lead, frac_digits) = match mant.split_once('.') {
        Some((l, f)) => (l, f),
        None => (mant, ""),
    };
    if frac_digits.len() > 13 || frac_digits.chars().any(|c| !c.is_ascii_hexdigit() || c.is_ascii_uppercase()) {
        return Err(bad());
    }
    let frac = if frac_digits.is_empty() {
        0
    } else {
        u64::from_str_radix(&format!("{frac_digits:0<13}"), 16).map_err(|_| bad())?
    };
    let bits = match lead {
        "1" => {
            let biased = exp + 1023;
            if !(1..=2046).contains(&biased) {
                return Err(bad());
            }
            ((biased as u64) << 52) | frac
        }
        "0" if frac == 0 => 0,
        "0" if exp == -1022 => frac,
        _ => return Err(bad()),
    };
    Ok(f64::from_bits(sign_bit | bits))
}
