//! Directed rounding for the basic operations.
//!
//! Every operation is computed once in round-to-nearest and the exact error
//! is recovered with an error-free transform (two-sum, fused multiply-add).
//! The result is then nudged one ulp only in the direction where the exact
//! value lies, so exact results are never widened. No FPU mode switching.

/// Products and quotients below this magnitude may lose their error term to
/// underflow; they are nudged in both directions.
const TINY: f64 = f64::MIN_POSITIVE * 9007199254740992.0; // 2^-1022 * 2^53

#[inline]
fn finite_down(s: f64) -> f64 {
    if s == f64::INFINITY {
        f64::MAX
    } else {
        s
    }
}

#[inline]
fn finite_up(s: f64) -> f64 {
    if s == f64::NEG_INFINITY {
        -f64::MAX
    } else {
        s
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if !s.is_finite() {
        return finite_down(s);
    }
    if e < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if !s.is_finite() {
        return finite_up(s);
    }
    if e > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub(crate) fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

#[inline]
pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() {
        return finite_down(p);
    }
    if p.abs() < TINY {
        return if a == 0.0 || b == 0.0 {
            0.0
        } else if (a > 0.0) == (b > 0.0) {
            p.next_down().max(0.0)
        } else {
            p.next_down()
        };
    }
    let e = a.mul_add(b, -p);
    if e < 0.0 {
        p.next_down()
    } else {
        p
    }
}

#[inline]
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() {
        return finite_up(p);
    }
    if p.abs() < TINY {
        return if a == 0.0 || b == 0.0 {
            0.0
        } else if (a > 0.0) != (b > 0.0) {
            p.next_up().min(0.0)
        } else {
            p.next_up()
        };
    }
    let e = a.mul_add(b, -p);
    if e > 0.0 {
        p.next_up()
    } else {
        p
    }
}

/// Sign of `a/b - q` where `q = fl(a/b)`.
#[inline]
fn div_residual_sign(a: f64, b: f64, q: f64) -> f64 {
    // a - q*b is exact under fma when nothing underflows.
    let r = (-q).mul_add(b, a);
    if b > 0.0 {
        r
    } else {
        -r
    }
}

#[inline]
pub(crate) fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return finite_down(q);
    }
    if q.abs() < TINY || a.abs() < TINY {
        return if a == 0.0 {
            0.0
        } else if (a > 0.0) == (b > 0.0) {
            q.next_down().max(0.0)
        } else {
            q.next_down()
        };
    }
    if div_residual_sign(a, b, q) < 0.0 {
        q.next_down()
    } else {
        q
    }
}

#[inline]
pub(crate) fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return finite_up(q);
    }
    if q.abs() < TINY || a.abs() < TINY {
        return if a == 0.0 {
            0.0
        } else if (a > 0.0) != (b > 0.0) {
            q.next_up().min(0.0)
        } else {
            q.next_up()
        };
    }
    if div_residual_sign(a, b, q) > 0.0 {
        q.next_up()
    } else {
        q
    }
}

#[inline]
pub(crate) fn sqrt_down(x: f64) -> f64 {
    let s = x.sqrt();
    if s == 0.0 || !s.is_finite() {
        return s;
    }
    if x < TINY {
        return s.next_down();
    }
    if s.mul_add(-s, x) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub(crate) fn sqrt_up(x: f64) -> f64 {
    let s = x.sqrt();
    if !s.is_finite() {
        return s;
    }
    if s == 0.0 {
        return if x > 0.0 { f64::MIN_POSITIVE } else { 0.0 };
    }
    if x < TINY {
        return s.next_up();
    }
    if s.mul_add(-s, x) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

/// Widen a faithfully rounded transcendental result by `k` ulps per side.
#[inline]
pub(crate) fn widen(lo: f64, hi: f64, k: usize) -> (f64, f64) {
    let mut l = lo;
    let mut h = hi;
    for _ in 0..k {
        l = l.next_down();
        h = h.next_up();
    }
    (l, h)
}
