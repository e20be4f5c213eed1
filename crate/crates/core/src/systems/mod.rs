//! The three vector fields and their charts.
//!
//! * `Begin`: `x' = x/2 + s·g(σ)`, `y' = −y/2 − s·g(σ)` in time `ρ = ln r`,
//!   with `s = e^{2ρ}`, `σ = x + y`, `g(σ) = σ − σ³`.
//! * `End`: `x' = x + g`, `y' = −y − g` in time `r`, with
//!   `g = −(x−y)u/2 + σu²/8 − σ³/8` and `u = 1/r`.
//! * `Original`: `A' = P`, `P' = A − A³ − P·u + A·u²/4`.
//!
//! Half-infinite time domains are handled by evaluating in the compact
//! variables `s ∈ [0, e^{2ρ_max}]` and `u ∈ [0, 1/r_min]`. The `begin_*`,
//! `end_*` and `original_*` functions take those variables directly so callers
//! can subdivide them.

mod charts;

pub use charts::{chart_map, ChartMap};

use serde::{Deserialize, Serialize};

use crate::interval::{Interval, IntervalError, IntervalMatrix, IntervalVector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SystemError {
    #[error("chart {got:?} does not match field {field:?} (expects {expected:?})")]
    ChartMismatch { field: FieldId, expected: Chart, got: Chart },
    #[error("time scale {got:?} does not match field {field:?}")]
    TimeScaleMismatch { field: FieldId, got: TimeScale },
    #[error("unsupported operation {op} for field {field:?}")]
    Unsupported { op: &'static str, field: FieldId },
    #[error("invalid time domain {0}")]
    InvalidTimeDomain(Interval),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldId {
    Begin,
    End,
    Original,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TimeScale {
    Rho,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chart {
    /// `(x_b, y_b)`
    BeginChart,
    /// `(x_e, y_e)`
    EndChart,
    /// `(A, A′)`
    OriginalChart,
    /// `(w, w′)`
    RhoChart,
}

impl Chart {
    pub fn labels(self) -> [&'static str; 2] {
        match self {
            Chart::BeginChart => ["x_b", "y_b"],
            Chart::EndChart => ["x_e", "y_e"],
            Chart::OriginalChart => ["A", "A'"],
            Chart::RhoChart => ["w", "w'"],
        }
    }
}

impl FieldId {
    pub fn chart(self) -> Chart {
        match self {
            FieldId::Begin => Chart::BeginChart,
            FieldId::End => Chart::EndChart,
            FieldId::Original => Chart::OriginalChart,
        }
    }

    pub fn time_scale(self) -> TimeScale {
        match self {
            FieldId::Begin => TimeScale::Rho,
            FieldId::End | FieldId::Original => TimeScale::R,
        }
    }
}

/// A time interval in `ρ` or `r`. `ρ` domains may start at `−∞`, `r`
/// domains may extend to `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeBox {
    pub value: Interval,
    pub scale: TimeScale,
}

impl TimeBox {
    pub fn rho(value: Interval) -> Result<Self, SystemError> {
        if value.hi() == f64::INFINITY {
            return Err(SystemError::InvalidTimeDomain(value));
        }
        Ok(TimeBox { value, scale: TimeScale::Rho })
    }

    pub fn r(value: Interval) -> Result<Self, SystemError> {
        if value.lo() == f64::NEG_INFINITY || value.lo() <= 0.0 {
            return Err(SystemError::InvalidTimeDomain(value));
        }
        Ok(TimeBox { value, scale: TimeScale::R })
    }

    /// `(−∞, ρ_max]`
    pub fn rho_up_to(rho_max: f64) -> Result<Self, SystemError> {
        TimeBox::rho(Interval::time_domain(f64::NEG_INFINITY, rho_max)?)
    }

    /// `[r_min, ∞)`
    pub fn r_from(r_min: f64) -> Result<Self, SystemError> {
        TimeBox::r(Interval::time_domain(r_min, f64::INFINITY)?)
    }

    /// `s = e^{2ρ}` over the domain.
    pub fn s_range(&self) -> Result<Interval, SystemError> {
        if self.scale != TimeScale::Rho {
            return Err(SystemError::InvalidTimeDomain(self.value));
        }
        Ok(s_of_rho(self.value))
    }

    /// `u = 1/r` over the domain.
    pub fn u_range(&self) -> Result<Interval, SystemError> {
        if self.scale != TimeScale::R {
            return Err(SystemError::InvalidTimeDomain(self.value));
        }
        Ok(u_of_r(self.value)?)
    }
}

/// Enclosure of `e^{2ρ}`; `ρ.lo = −∞` maps to 0.
pub fn s_of_rho(rho: Interval) -> Interval {
    let hi = (Interval::point(rho.hi()).scale(2.0)).exp().hi();
    let lo = if rho.lo() == f64::NEG_INFINITY { 0.0 } else { Interval::point(rho.lo()).scale(2.0).exp().lo() };
    Interval::new(lo, hi).expect("exp is monotone")
}

/// Enclosure of `1/r`; `r.hi = ∞` maps to 0.
pub fn u_of_r(r: Interval) -> Result<Interval, IntervalError> {
    if r.lo() <= 0.0 {
        return Err(IntervalError::DivisionByZeroInterval(r));
    }
    let hi = Interval::point(r.lo()).recip()?.hi();
    let lo = if r.hi() == f64::INFINITY { 0.0 } else { Interval::point(r.hi()).recip()?.lo() };
    Ok(Interval::new(lo, hi)?)
}

/// Tight enclosure of the range of `σ − σ³` (exact range of the cubic up to
/// rounding: endpoints plus interior critical points `±1/√3`).
pub fn cubic_range(sigma: Interval) -> Interval {
    let h = |x: Interval| x - x.powi(3).expect("nonnegative exponent");
    let mut r = h(Interval::point(sigma.lo())).hull(h(Interval::point(sigma.hi())));
    let c = Interval::ratio(1, 3).sqrt().expect("positive");
    for crit in [c, -c] {
        if crit.overlaps(sigma) {
            r = r.hull(h(crit));
        }
    }
    r
}

/// A state box in a named chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateBox {
    pub coords: IntervalVector,
    pub chart: Chart,
}

impl StateBox {
    pub fn new(chart: Chart, a: Interval, b: Interval) -> Self {
        StateBox { coords: IntervalVector::from([a, b]), chart }
    }

    fn pair(&self) -> (Interval, Interval) {
        (self.coords[0], self.coords[1])
    }
}

fn check(id: FieldId, t: &TimeBox, z: &StateBox) -> Result<(), SystemError> {
    if z.chart != id.chart() || z.coords.dim() != 2 {
        return Err(SystemError::ChartMismatch { field: id, expected: id.chart(), got: z.chart });
    }
    if t.scale != id.time_scale() {
        return Err(SystemError::TimeScaleMismatch { field: id, got: t.scale });
    }
    Ok(())
}

// ---- Begin, in s = e^{2ρ} -------------------------------------------------

pub fn begin_rhs(s: Interval, x: Interval, y: Interval) -> [Interval; 2] {
    let sg = s * cubic_range(x + y);
    [x.scale(0.5) + sg, -y.scale(0.5) - sg]
}

/// `w = s(1 − 3σ²)`; the Begin Jacobian is affine in it.
pub fn begin_jac_coeff(s: Interval, x: Interval, y: Interval) -> Interval {
    s * (Interval::ONE - (x + y).sqr().scale(3.0))
}

pub fn begin_jac_from(w: Interval) -> [[Interval; 2]; 2] {
    [[Interval::point(0.5) + w, w], [-w, Interval::point(-0.5) - w]]
}

pub fn begin_jac(s: Interval, x: Interval, y: Interval) -> [[Interval; 2]; 2] {
    begin_jac_from(begin_jac_coeff(s, x, y))
}

/// `∂f/∂ρ = 2s·g(σ)·(1, −1)`.
pub fn begin_dt(s: Interval, x: Interval, y: Interval) -> [Interval; 2] {
    let v = s.scale(2.0) * cubic_range(x + y);
    [v, -v]
}

// ---- End, in u = 1/r ------------------------------------------------------

pub fn end_g(u: Interval, x: Interval, y: Interval) -> Interval {
    let sigma = x + y;
    -(x - y) * u.scale(0.5) + sigma * u.sqr().scale(0.125) - sigma.powi(3).expect("cube").scale(0.125)
}

pub fn end_rhs(u: Interval, x: Interval, y: Interval) -> [Interval; 2] {
    let g = end_g(u, x, y);
    [x + g, -y - g]
}

/// `Df = M1 + (u²/8 − 3σ²/8)·M2 + (u/2)·M3` with `M1 = diag(1, −1)`,
/// `M2 = [[1, 1], [−1, −1]]`, `M3 = [[−1, 1], [1, −1]]`.
pub fn end_jac(u: Interval, x: Interval, y: Interval) -> [[Interval; 2]; 2] {
    end_jac_from(end_jac_coeffs(u, x, y))
}

/// `(c2, c3)` of [`end_jac`].
pub fn end_jac_coeffs(u: Interval, x: Interval, y: Interval) -> [Interval; 2] {
    [(u.sqr() - (x + y).sqr().scale(3.0)).scale(0.125), u.scale(0.5)]
}

pub fn end_jac_from([c2, c3]: [Interval; 2]) -> [[Interval; 2]; 2] {
    [[Interval::ONE + c2 - c3, c2 + c3], [-c2 + c3, Interval::point(-1.0) - c2 - c3]]
}

/// `∂f/∂r = ((x−y)u²/2 − σu³/4)·(1, −1)`, evaluated as
/// `x(u²/2 − u³/4) − y(u²/2 + u³/4)` to avoid the dependency on x, y.
pub fn end_dt(u: Interval, x: Interval, y: Interval) -> [Interval; 2] {
    let u2 = u.sqr().scale(0.5);
    let u3 = u.powi(3).expect("cube").scale(0.25);
    let v = x * (u2 - u3) - y * (u2 + u3);
    [v, -v]
}

// ---- Original, in u = 1/r -------------------------------------------------

pub fn original_rhs(u: Interval, a: Interval, p: Interval) -> [Interval; 2] {
    [p, cubic_range(a) - p * u + a * u.sqr().scale(0.25)]
}

pub fn original_jac(u: Interval, a: Interval, _p: Interval) -> [[Interval; 2]; 2] {
    let j21 = Interval::ONE - a.sqr().scale(3.0) + u.sqr().scale(0.25);
    [[Interval::ZERO, Interval::ONE], [j21, -u]]
}

fn param(id: FieldId, t: &TimeBox) -> Result<Interval, SystemError> {
    match id {
        FieldId::Begin => t.s_range(),
        FieldId::End | FieldId::Original => t.u_range(),
    }
}

/// Enclosure of `f(t, z)` over the whole box.
pub fn field_eval(id: FieldId, t: &TimeBox, z: &StateBox) -> Result<IntervalVector, SystemError> {
    check(id, t, z)?;
    let p = param(id, t)?;
    let (a, b) = z.pair();
    let v = match id {
        FieldId::Begin => begin_rhs(p, a, b),
        FieldId::End => end_rhs(p, a, b),
        FieldId::Original => original_rhs(p, a, b),
    };
    Ok(IntervalVector::from(v))
}

/// Enclosure of `∂f/∂z` over the whole box.
pub fn field_jacobian_z(id: FieldId, t: &TimeBox, z: &StateBox) -> Result<IntervalMatrix, SystemError> {
    check(id, t, z)?;
    let p = param(id, t)?;
    let (a, b) = z.pair();
    let j = match id {
        FieldId::Begin => begin_jac(p, a, b),
        FieldId::End => end_jac(p, a, b),
        FieldId::Original => original_jac(p, a, b),
    };
    Ok(IntervalMatrix::from_rows(&j))
}

/// Enclosure of `∂f/∂t` (`t = ρ` for Begin, `t = r` for End).
pub fn field_dt(id: FieldId, t: &TimeBox, z: &StateBox) -> Result<IntervalVector, SystemError> {
    check(id, t, z)?;
    let p = param(id, t)?;
    let (a, b) = z.pair();
    let v = match id {
        FieldId::Begin => begin_dt(p, a, b),
        FieldId::End => end_dt(p, a, b),
        FieldId::Original => return Err(SystemError::Unsupported { op: "field_dt", field: id }),
    };
    Ok(IntervalVector::from(v))
}
