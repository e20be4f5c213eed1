//! Outward-rounded interval arithmetic over binary64.

mod fmt;
mod matrix;
mod pd;
pub(crate) mod round;
mod vector;

pub use matrix::IntervalMatrix;
pub use pd::{pd_lower_bound, pd_sylvester_2x2};
pub use vector::IntervalVector;

use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use round::*;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntervalError {
    #[error("invalid interval bounds [{lo}, {hi}]")]
    InvalidBounds { lo: f64, hi: f64 },
    #[error("NaN endpoint")]
    NaN,
    #[error("division by an interval containing zero: {0}")]
    DivisionByZeroInterval(Interval),
    #[error("domain error in {op}: argument {arg}")]
    DomainError { op: &'static str, arg: Interval },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("cannot parse interval from {0:?}")]
    Parse(String),
}

/// A closed interval `[lo, hi]` with `lo <= hi`.
///
/// Endpoints are finite except for intervals built with
/// [`Interval::time_domain`], which may have one infinite endpoint. Only
/// addition, subtraction, negation, hull and the predicates are meaningful
/// for such intervals; everything that needs a compact argument should map
/// the time variable first (see `systems`).
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Exact endpoints, no widening. Both must be finite.
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_nan() || hi.is_nan() {
            return Err(IntervalError::NaN);
        }
        if lo > hi || !lo.is_finite() || !hi.is_finite() {
            return Err(IntervalError::InvalidBounds { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// Like [`Interval::new`] but allows one infinite endpoint.
    pub fn time_domain(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_nan() || hi.is_nan() {
            return Err(IntervalError::NaN);
        }
        if lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY || (lo.is_infinite() && hi.is_infinite()) {
            return Err(IntervalError::InvalidBounds { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// Degenerate interval. Panics on non-finite input (programming error).
    pub fn point(x: f64) -> Self {
        assert!(x.is_finite(), "point interval from non-finite value {x}");
        Interval { lo: x, hi: x }
    }

    /// Internal constructor for results of rounded operations.
    #[inline]
    pub(crate) fn raw(lo: f64, hi: f64) -> Self {
        debug_assert!(!(lo > hi) && !lo.is_nan() && !hi.is_nan(), "raw [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// Symmetric interval `[-r, r]`.
    pub fn symmetric(r: f64) -> Self {
        let r = r.abs();
        Interval::raw(-r, r)
    }

    /// Enclosure of a decimal literal. Exactly representable values give a
    /// point interval; anything else is widened by one ulp on each side.
    pub fn from_decimal(s: &str) -> Result<Self, IntervalError> {
        let t = s.trim();
        let x: f64 = t.parse().map_err(|_| IntervalError::Parse(s.to_string()))?;
        if x.is_nan() {
            return Err(IntervalError::NaN);
        }
        if x.is_infinite() {
            return Interval::time_domain(x, x).or(Err(IntervalError::Parse(s.to_string())));
        }
        if fmt::decimal_is_exact(t, x) {
            Ok(Interval::point(x))
        } else {
            Ok(Interval::raw(x.next_down(), x.next_up()))
        }
    }

    /// Enclosure of the rational `p/q`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Interval::point(p as f64)
            .checked_div(Interval::point(q as f64))
            .expect("ratio with zero denominator")
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn is_bounded(self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(self) -> bool {
        self.lo == self.hi
    }

    /// Approximate midpoint (not rounded in any particular direction).
    pub fn mid(self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Upper bound on the width.
    pub fn width(self) -> f64 {
        sub_up(self.hi, self.lo)
    }

    /// Upper bound on the radius about [`Interval::mid`].
    pub fn rad(self) -> f64 {
        let m = self.mid();
        sub_up(m, self.lo).max(sub_up(self.hi, m))
    }

    /// max |x|.
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// min |x|.
    pub fn mig(self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(self) -> bool {
        self.contains(0.0)
    }

    /// `self ⊆ other`.
    pub fn subset(self, other: Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `self ⊂ int(other)`.
    pub fn interior_subset(self, other: Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn overlaps(self, other: Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_positive(self) -> bool {
        self.lo > 0.0
    }

    pub fn is_negative(self) -> bool {
        self.hi < 0.0
    }

    /// `Some(1)` / `Some(-1)` if the interval has a strict fixed sign.
    pub fn strict_sign(self) -> Option<i8> {
        if self.lo > 0.0 {
            Some(1)
        } else if self.hi < 0.0 {
            Some(-1)
        } else {
            None
        }
    }

    pub fn hull(self, other: Interval) -> Interval {
        Interval::raw(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn hull_point(self, x: f64) -> Interval {
        Interval::raw(self.lo.min(x), self.hi.max(x))
    }

    /// Intersection; `None` means the intervals are disjoint.
    pub fn intersect(self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then(|| Interval::raw(lo, hi))
    }

    /// Widen by `abs + rel·mag` on each side, rounded outward.
    pub fn inflate(self, abs: f64, rel: f64) -> Interval {
        let e = if rel == 0.0 { abs } else { add_up(abs, mul_up(rel, self.mag())) };
        Interval::raw(sub_down(self.lo, e), add_up(self.hi, e))
    }

    /// `n` equal (up to rounding) consecutive pieces covering `self`.
    pub fn split(self, n: usize) -> Vec<Interval> {
        assert!(n > 0);
        let mut out = Vec::with_capacity(n);
        let mut prev = self.lo;
        for k in 1..=n {
            let next = if k == n {
                self.hi
            } else {
                let t = k as f64 / n as f64;
                (self.lo + t * (self.hi - self.lo)).clamp(prev, self.hi)
            };
            out.push(Interval::raw(prev, next));
            prev = next;
        }
        out
    }

    pub fn bisect(self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval::raw(self.lo, m), Interval::raw(m, self.hi))
    }

    pub fn checked_div(self, y: Interval) -> Result<Interval, IntervalError> {
        if y.contains_zero() {
            return Err(IntervalError::DivisionByZeroInterval(y));
        }
        let (a, b, c, d) = (self.lo, self.hi, y.lo, y.hi);
        let lo = div_down(a, c).min(div_down(a, d)).min(div_down(b, c)).min(div_down(b, d));
        let hi = div_up(a, c).max(div_up(a, d)).max(div_up(b, c)).max(div_up(b, d));
        Ok(Interval::raw(lo, hi))
    }

    pub fn recip(self) -> Result<Interval, IntervalError> {
        Interval::ONE.checked_div(self)
    }

    /// Multiply by an exact scalar.
    pub fn scale(self, k: f64) -> Interval {
        self * Interval::point(k)
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval::raw(0.0, self.mag())
        }
    }

    /// x², tight for sign-straddling arguments.
    pub fn sqr(self) -> Interval {
        let a = self.abs();
        Interval::raw(mul_down(a.lo, a.lo), mul_up(a.hi, a.hi))
    }

    /// Integer power. Negative exponents require `0 ∉ self`.
    pub fn powi(self, k: i32) -> Result<Interval, IntervalError> {
        if k < 0 {
            return self.powi(-k)?.recip().map_err(|_| IntervalError::DomainError { op: "powi", arg: self });
        }
        if k == 0 {
            return Ok(Interval::ONE);
        }
        let k = k as u32;
        let pow_down = |x: f64| (1..k).fold(x, |acc, _| mul_down(acc, x));
        let pow_up = |x: f64| (1..k).fold(x, |acc, _| mul_up(acc, x));
        if k % 2 == 0 {
            let a = self.abs();
            return Ok(Interval::raw(pow_down(a.lo), pow_up(a.hi)));
        }
        let lo = if self.lo >= 0.0 { pow_down(self.lo) } else { -pow_up(-self.lo) };
        let hi = if self.hi >= 0.0 { pow_up(self.hi) } else { -pow_down(-self.hi) };
        Ok(Interval::raw(lo, hi))
    }

    pub fn sqrt(self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::DomainError { op: "sqrt", arg: self });
        }
        Ok(Interval::raw(sqrt_down(self.lo), sqrt_up(self.hi)))
    }

    /// e^x, faithful libm result widened by two ulps per side.
    pub fn exp(self) -> Interval {
        if self == Interval::ZERO {
            return Interval::ONE;
        }
        let (lo, _) = widen(self.lo.exp(), 0.0, 2);
        let (_, hi) = widen(0.0, self.hi.exp(), 2);
        Interval::raw(lo.max(0.0), hi)
    }

    pub fn ln(self) -> Result<Interval, IntervalError> {
        if self.lo <= 0.0 {
            return Err(IntervalError::DomainError { op: "ln", arg: self });
        }
        if self == Interval::ONE {
            return Ok(Interval::ZERO);
        }
        let (lo, _) = widen(self.lo.ln(), 0.0, 2);
        let (_, hi) = widen(0.0, self.hi.ln(), 2);
        Ok(Interval::raw(lo, hi))
    }

    /// Largest magnitude over a slice.
    pub fn max_abs(values: &[Interval]) -> f64 {
        values.iter().map(|v| v.mag()).fold(0.0, f64::max)
    }
}

/// `0·∞` is taken as 0, which is the correct set product.
#[inline]
fn nan0(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, y: Interval) -> Interval {
        Interval::raw(add_down(self.lo, y.lo), add_up(self.hi, y.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, y: Interval) -> Interval {
        Interval::raw(sub_down(self.lo, y.hi), sub_up(self.hi, y.lo))
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval::raw(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, y: Interval) -> Interval {
        let (a, b, c, d) = (self.lo, self.hi, y.lo, y.hi);
        if a >= 0.0 && c >= 0.0 {
            return Interval::raw(nan0(mul_down(a, c)), nan0(mul_up(b, d)));
        }
        let lo = nan0(mul_down(a, c)).min(nan0(mul_down(a, d))).min(nan0(mul_down(b, c))).min(nan0(mul_down(b, d)));
        let hi = nan0(mul_up(a, c)).max(nan0(mul_up(a, d))).max(nan0(mul_up(b, c))).max(nan0(mul_up(b, d)));
        Interval::raw(lo, hi)
    }
}

macro_rules! scalar_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<f64> for Interval {
            type Output = Interval;
            #[inline]
            fn $m(self, y: f64) -> Interval {
                $tr::$m(self, Interval::point(y))
            }
        }
        impl $tr<Interval> for f64 {
            type Output = Interval;
            #[inline]
            fn $m(self, y: Interval) -> Interval {
                $tr::$m(Interval::point(self), y)
            }
        }
    )*};
}
scalar_ops!(Add add, Sub sub, Mul mul);

impl AddAssign for Interval {
    fn add_assign(&mut self, y: Interval) {
        *self = *self + y;
    }
}

impl SubAssign for Interval {
    fn sub_assign(&mut self, y: Interval) {
        *self = *self - y;
    }
}

impl MulAssign for Interval {
    fn mul_assign(&mut self, y: Interval) {
        *self = *self * y;
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |a, b| a + b)
    }
}

impl Default for Interval {
    fn default() -> Self {
        Interval::ZERO
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn inflate_unbounded_stays_unbounded() {
        let x = Interval::raw(1.0, f64::INFINITY).inflate(1e-3, 0.0);
        assert_eq!((x.lo() < 1.0, x.hi()), (true, f64::INFINITY));
    }

    #[test]
    fn construction() {
        assert_eq!(iv(0.0, 0.0), Interval::ZERO);
        let b = iv(-0.125, 0.125);
        assert_eq!((b.lo(), b.hi()), (-0.125, 0.125));
        assert!(matches!(Interval::new(1.0, -1.0), Err(IntervalError::InvalidBounds { .. })));
        assert_eq!(Interval::new(f64::NAN, 1.0), Err(IntervalError::NaN));
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        let t = Interval::time_domain(f64::NEG_INFINITY, 2.0).unwrap();
        assert!(!t.is_bounded());
        assert!(Interval::time_domain(f64::NEG_INFINITY, f64::INFINITY).is_err());
    }

    #[test]
    fn basic_arithmetic() {
        assert_eq!(iv(1.0, 2.0) + iv(3.0, 4.0), iv(4.0, 6.0));
        let p = iv(-1.0, 2.0) * iv(3.0, 4.0);
        assert!(iv(-4.0, 8.0).subset(p));
        assert!(matches!(iv(1.0, 1.0).checked_div(iv(-1.0, 1.0)), Err(IntervalError::DivisionByZeroInterval(_))));
        assert_eq!(-iv(1.0, 2.0), iv(-2.0, -1.0));
        assert_eq!(iv(1.0, 2.0) - iv(0.5, 1.0), iv(0.0, 1.5));
    }

    #[test]
    fn elementary() {
        let e = Interval::ZERO.exp();
        assert!(e.contains(1.0));
        assert!(e.width() <= 4.0 * f64::EPSILON);
        assert!(iv(0.0, 4.0).subset(iv(-2.0, 1.0).powi(2).unwrap()));
        assert_eq!(iv(-2.0, 1.0).powi(3).unwrap(), iv(-8.0, 1.0));
        assert!(iv(-1.0, 1.0).ln().is_err());
        assert!(iv(-1.0, 1.0).sqrt().is_err());
        let s = iv(2.0, 2.0).sqrt().unwrap();
        assert!(s.lo() * s.lo() <= 2.0 && s.width() > 0.0);
        assert_eq!(iv(-3.0, 2.0).sqr(), iv(0.0, 9.0));
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(Interval::from_decimal("0.125").unwrap(), iv(0.125, 0.125));
        let t = Interval::from_decimal("0.1").unwrap();
        assert!(t.lo() < t.hi());
        assert!(t.contains(0.1));
        assert_eq!(Interval::from_decimal("6").unwrap(), Interval::point(6.0));
    }

    #[test]
    fn intersection_is_explicit() {
        assert_eq!(iv(0.0, 1.0).intersect(iv(2.0, 3.0)), None);
        assert_eq!(iv(0.0, 2.0).intersect(iv(1.0, 3.0)), Some(iv(1.0, 2.0)));
    }

    #[test]
    fn split_covers() {
        let x = iv(-1.0, 3.0);
        let parts = x.split(7);
        assert_eq!(parts.first().unwrap().lo(), -1.0);
        assert_eq!(parts.last().unwrap().hi(), 3.0);
        for w in parts.windows(2) {
            assert_eq!(w[0].hi(), w[1].lo());
        }
    }

    #[test]
    fn infinite_times_zero() {
        let t = Interval::time_domain(f64::NEG_INFINITY, 0.0).unwrap();
        let p = t * Interval::ZERO;
        assert_eq!(p, Interval::ZERO);
    }
}
