//! One validated Taylor step on a doubleton set `x̄ + C·r₀ + B·r`, with the
//! flow Jacobian carried as `V_c + B_v·R_v`.

use serde::{Deserialize, Serialize};

use super::jet::{coefficients, horner, Dual, Scalar, N};
use super::linalg::*;
use crate::interval::{Interval, IntervalVector};
use crate::systems::FieldId;

/// Lohner parallelepiped: `center + c·r0 + frame·deviation`, with `r0` the
/// fixed initial parameter box and `frame` (numerically) orthonormal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LohnerSet {
    pub center: [f64; N],
    pub c: [[f64; N]; N],
    pub r0: [Interval; N],
    pub frame: [[f64; N]; N],
    pub deviation: [Interval; N],
}

impl LohnerSet {
    pub fn from_box(x: &IntervalVector) -> Self {
        assert_eq!(x.dim(), N, "extended state has dimension 3");
        let center: [f64; N] = std::array::from_fn(|i| x[i].mid());
        LohnerSet {
            center,
            c: ident(),
            r0: std::array::from_fn(|i| x[i] - Interval::point(center[i])),
            frame: ident(),
            deviation: ZV,
        }
    }

    /// `center + c·r0 + residual`, e.g. a linearized parameterized surface
    /// with its nonlinear remainder in `residual`.
    pub fn from_affine(center: [f64; N], c: [[f64; N]; N], r0: [Interval; N], residual: [Interval; N]) -> Self {
        LohnerSet { center, c, r0, frame: ident(), deviation: residual }
    }

    /// Box enclosure of the set together with its center, so that every
    /// segment from the center to a member lies inside it.
    pub fn hull(&self) -> [Interval; N] {
        let a = mv(&to_iv(&self.c), &self.r0.map(|x| x.hull_point(0.0)));
        let b = mv(&to_iv(&self.frame), &self.deviation.map(|x| x.hull_point(0.0)));
        std::array::from_fn(|i| Interval::point(self.center[i]) + a[i] + b[i])
    }

    /// Enclosure of `ℓ·x` over the set and the segments joining its members
    /// to the center, using the doubleton structure.
    pub fn functional(&self, l: &[f64; N]) -> Interval {
        let lc: [Interval; N] = std::array::from_fn(|j| (0..N).fold(Interval::ZERO, |s, i| s + Interval::point(l[i]) * Interval::point(self.c[i][j])));
        let lb: [Interval; N] = std::array::from_fn(|j| (0..N).fold(Interval::ZERO, |s, i| s + Interval::point(l[i]) * Interval::point(self.frame[i][j])));
        let base = dot(l, &vpoint(&self.center));
        (0..N).fold(base, |s, j| s + lc[j] * self.r0[j].hull_point(0.0) + lb[j] * self.deviation[j].hull_point(0.0))
    }
}

/// Enclosure of the flow Jacobian, `vc + bv·rv`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct VarSet {
    pub vc: P,
    pub bv: P,
    pub rv: M,
}

impl VarSet {
    pub fn identity() -> Self {
        VarSet { vc: ident(), bv: ident(), rv: ZM }
    }

    pub fn hull(&self) -> M {
        madd(&to_iv(&self.vc), &mm(&to_iv(&self.bv), &self.rv))
    }
}

/// Everything computed for one accepted step of length `h`.
#[derive(Debug, Clone)]
pub(crate) struct StepData {
    pub h: f64,
    /// State enclosure over `[0, h]`.
    pub tube: V,
    /// Jacobian (from the step start) over `[0, h]`.
    pub tube_v: M,
    /// Coefficients at the step-start hull, seeded with the identity.
    pub cx: Vec<[Dual; N]>,
    /// Coefficients at the center point.
    pub cc: Vec<V>,
    /// Order-(K+1) coefficient over (tube, tube_v).
    pub rem: [Dual; N],
    /// Remainder magnitude `h^{K+1}·|rem|`.
    pub err: f64,
}

impl StepData {
    /// Enclosure of the states of the set over times `tau ⊆ [0, h]`.
    pub fn tube_over(&self, tau: Interval) -> V {
        let k1 = self.cx.len() as i32;
        let p = horner(&self.cx, tau);
        let t = tau.powi(k1).expect("power");
        let v: V = std::array::from_fn(|i| p[i].v + t * self.rem[i].v);
        std::array::from_fn(|i| v[i].intersect(self.tube[i]).unwrap_or(v[i]))
    }

    /// Enclosure of `Dφ_τ` over the step-start hull, for `τ ⊆ [0, h]`.
    pub fn jacobian_at(&self, tau: Interval) -> M {
        let k1 = self.cx.len() as i32;
        let p = horner(&self.cx, tau);
        let t = tau.powi(k1).expect("power");
        std::array::from_fn(|i| std::array::from_fn(|j| p[i].d[j] + t * self.rem[i].d[j]))
    }

    /// Enclosure of `φ_τ(center)`.
    pub fn center_at(&self, tau: Interval) -> V {
        let k1 = self.cc.len() as i32;
        let p = horner(&self.cc, tau);
        let t = tau.powi(k1).expect("power");
        std::array::from_fn(|i| p[i] + t * self.rem[i].v)
    }
}

fn seed(x: &V, m: &M) -> [Dual; N] {
    std::array::from_fn(|i| Dual::new(x[i], m[i]))
}

fn widen(x: Interval) -> Interval {
    x.inflate(1e-300 + 0.05 * x.width() + 4.0 * f64::EPSILON * x.mag(), 0.0)
}

/// High-order a priori enclosure: finds `W` with
/// `Σ_{k≤K} [0,h]^k c_k(X) + [0,h]^{K+1} c_{K+1}(W) ⊆ int W`.
pub(crate) fn validate(id: FieldId, x: &V, h: f64, order: usize, center: &[f64; N]) -> Option<StepData> {
    let id_seed = to_iv(&ident());
    let cx = coefficients::<Dual>(id, seed(x, &id_seed), order);
    let hi = Interval::new(0.0, h).ok()?;
    let y = horner(&cx, hi);
    let k1 = (order + 1) as i32;
    let hp = hi.powi(k1).ok()?;
    let combine = |c: &[Dual; N]| -> [Dual; N] { std::array::from_fn(|i| y[i] + c[i].scale_iv(hp)) };
    let c0 = coefficients::<Dual>(id, y, order + 1)[order + 1];
    let w0 = combine(&c0);
    if !vbounded(&w0.map(|d| d.v)) || !mbounded(&w0.map(|d| d.d)) {
        return None;
    }
    let mut w = w0.map(|d| Dual::new(widen(d.v), d.d.map(widen)));
    for _ in 0..12 {
        let wv: V = w.map(|d| d.v);
        let wm: M = w.map(|d| d.d);
        if !vbounded(&wv) || !mbounded(&wm) {
            return None;
        }
        let c = coefficients::<Dual>(id, w, order + 1)[order + 1];
        let wn = combine(&c);
        let nv: V = wn.map(|d| d.v);
        let nm: M = wn.map(|d| d.d);
        if !vbounded(&nv) || !mbounded(&nm) {
            return None;
        }
        if v_interior(&nv, &wv) && m_interior(&nm, &wm) {
            let cc = coefficients::<Interval>(id, vpoint(center), order);
            let hk = Interval::point(h).powi(k1).ok()?;
            let err = c.iter().map(|d| (d.v * hk).mag()).fold(0.0, f64::max);
            return Some(StepData { h, tube: nv, tube_v: nm, cx, cc, rem: c, err });
        }
        w = std::array::from_fn(|i| {
            let v = widen(w[i].v.hull(wn[i].v));
            let d = std::array::from_fn(|j| widen(w[i].d[j].hull(wn[i].d[j])));
            Dual::new(v, d)
        });
    }
    None
}

/// Propagates the set (and optionally the Jacobian) through a validated step.
pub(crate) fn advance(set: &LohnerSet, var: Option<&VarSet>, s: &StepData) -> Option<(LohnerSet, Option<VarSet>)> {
    let hp = Interval::point(s.h);
    let y = s.center_at(hp);
    let j = s.jacobian_at(hp);
    if !vbounded(&y) || !mbounded(&j) {
        return None;
    }
    let center = vmid(&y);
    let jc = mm(&j, &to_iv(&set.c));
    let c = mmid(&jc);
    let jb = mm(&j, &to_iv(&set.frame));
    let weight: [f64; N] = std::array::from_fn(|i| set.deviation[i].mag() + 1e-300);
    let frame = orthonormal(&mmid(&jb), &weight);
    let binv = inverse(&frame)?;
    let resid = vadd(&vsub(&y, &vpoint(&center)), &mv(&msub(&jc, &to_iv(&c)), &set.r0));
    let deviation = vadd(&mv(&mm(&binv, &jb), &set.deviation), &mv(&binv, &resid));
    if !vbounded(&deviation) {
        return None;
    }
    let next = LohnerSet { center, c, r0: set.r0, frame, deviation };
    let var = match var {
        None => None,
        Some(v) => {
            let jvc = mm(&j, &to_iv(&v.vc));
            let vc = mmid(&jvc);
            let jbv = mm(&j, &to_iv(&v.bv));
            let w: [f64; N] = std::array::from_fn(|i| v.rv[i].iter().map(|x| x.mag()).fold(1e-300, f64::max));
            let bv = orthonormal(&mmid(&jbv), &w);
            let bvinv = inverse(&bv)?;
            let rv = madd(&mm(&mm(&bvinv, &jbv), &v.rv), &mm(&bvinv, &msub(&jvc, &to_iv(&vc))));
            if !mbounded(&rv) {
                return None;
            }
            Some(VarSet { vc, bv, rv })
        }
    };
    Some((next, var))
}
