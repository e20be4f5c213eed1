//! Decimal printing, the compressed bracket notation and serde support.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Interval, IntervalError};

/// Shortest decimal string that parses back to exactly `x`.
pub fn shortest(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:?}")
}

/// Exact decimal expansion of a finite double as (negative, integer digits,
/// fraction digits) with no trailing fraction zeros.
fn exact_digits(x: f64) -> (bool, String, String) {
    // Every finite double has a terminating expansion with at most 1074
    // fraction digits; std formats it exactly.
    let s = format!("{:.1074}", x.abs());
    let (int, frac) = s.split_once('.').unwrap_or((&s, ""));
    (x.is_sign_negative() && x != 0.0, int.to_string(), frac.trim_end_matches('0').to_string())
}

/// Normalize a decimal literal (optional sign, digits, optional point and
/// exponent) to (negative, integer digits, fraction digits).
fn literal_digits(s: &str) -> Option<(bool, String, String)> {
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: String = format!("{int}{frac}");
    let point = int.len() as i64 + exp;
    let (i, f) = if point <= 0 {
        (String::new(), format!("{}{}", "0".repeat((-point) as usize), digits))
    } else if point as usize >= digits.len() {
        (format!("{}{}", digits, "0".repeat(point as usize - digits.len())), String::new())
    } else {
        (digits[..point as usize].to_string(), digits[point as usize..].to_string())
    };
    let i = i.trim_start_matches('0');
    let i = if i.is_empty() { "0" } else { i };
    Some((neg, i.to_string(), f.trim_end_matches('0').to_string()))
}

/// Whether the decimal literal `s` denotes exactly the double `x`.
pub(super) fn decimal_is_exact(s: &str, x: f64) -> bool {
    match literal_digits(s) {
        Some((neg, i, f)) => {
            let (xn, xi, xf) = exact_digits(x);
            let zero = i == "0" && f.is_empty();
            (zero && x == 0.0) || (neg == xn && i == xi && f == xf)
        }
        None => false,
    }
}

/// Fixed-point digits of |x| with `places` fraction digits, rounded toward
/// zero (`up = false`) or away from zero (`up = true`). Returned as a digit
/// string with the decimal point removed.
fn fixed_digits(x: f64, places: usize, up: bool) -> String {
    let (_, int, frac) = exact_digits(x);
    let frac_p: String = frac.chars().chain(std::iter::repeat('0')).take(places).collect();
    let mut digits: Vec<u8> = format!("{int}{frac_p}").into_bytes();
    let inexact = frac.len() > places;
    if up && inexact {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, b'1');
                break;
            }
            i -= 1;
            if digits[i] == b'9' {
                digits[i] = b'0';
            } else {
                digits[i] += 1;
                break;
            }
        }
    }
    String::from_utf8(digits).unwrap()
}

fn with_point(digits: &str, places: usize) -> String {
    let pad = if digits.len() <= places { "0".repeat(places + 1 - digits.len()) } else { String::new() };
    let d = format!("{pad}{digits}");
    let (i, f) = d.split_at(d.len() - places);
    if places == 0 {
        i.to_string()
    } else {
        format!("{i}.{f}")
    }
}

impl Interval {
    /// Bracketed-digits notation: `0.0032[89,97]` stands for
    /// `[0.003289, 0.003297]`; negative intervals are written with the
    /// smaller magnitude first (`-0.0032[19,26]` is `[-0.003226, -0.003219]`).
    ///
    /// The printed interval always contains `self`. Intervals containing zero
    /// or unbounded ones fall back to `[lo, hi]`.
    pub fn compressed(self) -> String {
        if self.is_point() {
            return shortest(self.lo);
        }
        if self.contains_zero() || !self.is_bounded() {
            return self.to_string();
        }
        let neg = self.hi < 0.0;
        let (small, large) = if neg { (-self.hi, -self.lo) } else { (self.lo, self.hi) };
        let mut best = None;
        for places in 0..=40 {
            let a = fixed_digits(small, places, false);
            let b = fixed_digits(large, places, true);
            let (a, b) = if a.len() < b.len() { ("0".repeat(b.len() - a.len()) + &a, b) } else { (a, b) };
            let common = a.bytes().zip(b.bytes()).take_while(|(x, y)| x == y).count();
            let tail = a.len() - common;
            if tail > 2 {
                break;
            }
            best = Some((places, a, b, common));
            if tail == 0 {
                break;
            }
        }
        let sign = if neg { "-" } else { "" };
        match best {
            Some((places, a, b, common)) if common < a.len() => {
                // Split the fixed-point strings at the first differing digit.
                let pa = with_point(&a, places);
                let pb = with_point(&b, places);
                let cut = pa.bytes().zip(pb.bytes()).take_while(|(x, y)| x == y).count();
                if cut == 0 || pa.len() != pb.len() {
                    return self.to_string();
                }
                format!("{sign}{}[{},{}]", &pa[..cut], &pa[cut..], &pb[cut..])
            }
            _ => self.to_string(),
        }
    }

    /// Inverse of [`Interval::compressed`], also accepting plain decimals and
    /// `[lo, hi]`. The result encloses the denoted interval.
    pub fn parse_compressed(s: &str) -> Result<Interval, IntervalError> {
        let t = s.trim();
        let err = || IntervalError::Parse(s.to_string());
        if let Some(body) = t.strip_prefix('[') {
            let body = body.strip_suffix(']').ok_or_else(err)?;
            let (a, b) = body.split_once(',').ok_or_else(err)?;
            let lo = Interval::from_decimal(a)?;
            let hi = Interval::from_decimal(b)?;
            if lo.lo > hi.hi {
                return Err(err());
            }
            return Interval::time_domain(lo.lo, hi.hi);
        }
        let Some(open) = t.find('[') else {
            return Interval::from_decimal(t);
        };
        let prefix = &t[..open];
        let body = t[open + 1..].strip_suffix(']').ok_or_else(err)?;
        let (a, b) = body.split_once(',').ok_or_else(err)?;
        let x = Interval::from_decimal(&format!("{prefix}{}", a.trim()))?;
        let y = Interval::from_decimal(&format!("{prefix}{}", b.trim()))?;
        Ok(x.hull(y))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", shortest(self.lo), shortest(self.hi))
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    lo: String,
    hi: String,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Wire { lo: shortest(self.lo), hi: shortest(self.hi) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        let lo: f64 = w.lo.parse().map_err(D::Error::custom)?;
        let hi: f64 = w.hi.parse().map_err(D::Error::custom)?;
        Interval::time_domain(lo, hi).map_err(D::Error::custom)
    }
}
