//! Taylor coefficients of solutions of the extended fields, generic over the
//! scalar so the same recurrences produce plain enclosures (`Interval`) and
//! first-order variational jets (`Dual`).

use std::ops::{Add, Mul, Neg, Sub};

use crate::interval::Interval;
use crate::systems::FieldId;

pub(crate) const N: usize = 3;

pub(crate) trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn scale_iv(self, c: Interval) -> Self;
}

impl Scalar for Interval {
    fn scale_iv(self, c: Interval) -> Self {
        self * c
    }
}

/// Value with its gradient with respect to the three initial coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dual {
    pub v: Interval,
    pub d: [Interval; N],
}

impl Dual {
    pub fn new(v: Interval, d: [Interval; N]) -> Self {
        Dual { v, d }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual { v: self.v + o.v, d: std::array::from_fn(|i| self.d[i] + o.d[i]) }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual { v: self.v - o.v, d: std::array::from_fn(|i| self.d[i] - o.d[i]) }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual { v: self.v * o.v, d: std::array::from_fn(|i| self.v * o.d[i] + o.v * self.d[i]) }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual { v: -self.v, d: self.d.map(|x| -x) }
    }
}

impl Scalar for Dual {
    fn scale_iv(self, c: Interval) -> Self {
        Dual { v: self.v * c, d: self.d.map(|x| x * c) }
    }
}

fn cauchy<S: Scalar>(a: &[S], b: &[S], k: usize) -> S {
    let mut acc = a[0] * b[k];
    for j in 1..=k {
        acc = acc + a[j] * b[k - j];
    }
    acc
}

/// Series of one scalar coordinate, grown one coefficient at a time.
struct Seq<S>(Vec<S>);

impl<S: Scalar> Seq<S> {
    fn with(cap: usize) -> Self {
        Seq(Vec::with_capacity(cap))
    }
    fn push(&mut self, x: S) -> S {
        self.0.push(x);
        x
    }
}

/// Coefficients `c_0..=c_order` of the solution through `x0`, where the
/// first coordinate is the compact time parameter (`s` for Begin, with
/// `s′ = 2s`; `u` otherwise, with `u′ = −u²`).
pub(crate) fn coefficients<S: Scalar>(id: FieldId, x0: [S; N], order: usize) -> Vec<[S; N]> {
    let cap = order + 1;
    let mut p = Seq::with(cap);
    let mut a = Seq::with(cap);
    let mut b = Seq::with(cap);
    p.push(x0[0]);
    a.push(x0[1]);
    b.push(x0[2]);
    // Intermediate products, one coefficient per order.
    let mut t1 = Seq::with(cap);
    let mut t2 = Seq::with(cap);
    let mut t3 = Seq::with(cap);
    let mut t4 = Seq::with(cap);
    let mut t5 = Seq::with(cap);
    let mut t6 = Seq::with(cap);
    let quarter = Interval::point(0.25);
    let half = Interval::point(0.5);
    let eighth = Interval::point(0.125);
    for k in 0..order {
        let inv = Interval::ONE.checked_div(Interval::point((k + 1) as f64)).expect("nonzero");
        let (dp, da, db);
        match id {
            FieldId::Original => {
                // t1 = u², t2 = A², t3 = A³, t4 = P·u, t5 = A·u².
                t1.push(cauchy(&p.0, &p.0, k));
                t2.push(cauchy(&a.0, &a.0, k));
                t3.push(cauchy(&t2.0, &a.0, k));
                let pu = t4.push(cauchy(&b.0, &p.0, k));
                let auu = t5.push(cauchy(&a.0, &t1.0, k));
                dp = -t1.0[k];
                da = b.0[k];
                db = a.0[k] - t3.0[k] - pu + auu.scale_iv(quarter);
            }
            FieldId::End => {
                // σ = x + y, δ = x − y; t1 = u², t2 = σ², t3 = σ³, t4 = δ·u, t5 = σ·u².
                let sig: Vec<S> = (0..=k).map(|j| a.0[j] + b.0[j]).collect();
                let del = a.0[k] - b.0[k];
                t6.push(del);
                t1.push(cauchy(&p.0, &p.0, k));
                t2.push(cauchy(&sig, &sig, k));
                t3.push(cauchy(&t2.0, &sig, k));
                t4.push(cauchy(&t6.0, &p.0, k));
                t5.push(cauchy(&sig, &t1.0, k));
                let g = -t4.0[k].scale_iv(half) + t5.0[k].scale_iv(eighth) - t3.0[k].scale_iv(eighth);
                dp = -t1.0[k];
                da = a.0[k] + g;
                db = -b.0[k] - g;
            }
            FieldId::Begin => {
                // σ = x + y; t1 = σ (stored), t2 = σ², t3 = σ³, t4 = s·(σ − σ³).
                t1.push(a.0[k] + b.0[k]);
                t2.push(cauchy(&t1.0, &t1.0, k));
                t3.push(cauchy(&t2.0, &t1.0, k));
                let hk: Vec<S> = (0..=k).map(|j| t1.0[j] - t3.0[j]).collect();
                let sh = t4.push(cauchy(&p.0, &hk, k));
                dp = p.0[k].scale_iv(Interval::point(2.0));
                da = a.0[k].scale_iv(half) + sh;
                db = -b.0[k].scale_iv(half) - sh;
            }
        }
        p.push(dp.scale_iv(inv));
        a.push(da.scale_iv(inv));
        b.push(db.scale_iv(inv));
    }
    (0..=order).map(|k| [p.0[k], a.0[k], b.0[k]]).collect()
}

/// `Σ c_k·h^k` by Horner; valid for interval `h`.
pub(crate) fn horner<S: Scalar>(c: &[[S; N]], h: Interval) -> [S; N] {
    let mut acc = c[c.len() - 1];
    for k in (0..c.len() - 1).rev() {
        acc = std::array::from_fn(|i| acc[i].scale_iv(h) + c[k][i]);
    }
    acc
}

/// Right-hand side of the extended system over a box.
pub(crate) fn field(id: FieldId, x: [Interval; N]) -> [Interval; N] {
    coefficients(id, x, 1)[1]
}
