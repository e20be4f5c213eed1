//! Isolating blocks, cone conditions and time-Lipschitz bounds for the
//! (un)stable manifold parameterizations of the Begin and End systems.
//!
//! All checks run in the compact time variable (`s = e^{2ρ}` or `u = 1/r`),
//! optionally subdivided, so half-infinite time domains are handled exactly.

mod analytic;
mod block;
mod bounds;
mod cone;

pub use analytic::{analytic_check, end_m_corrected, AnalyticCheck, AnalyticParams, AnalyticResult};
pub use block::verify_block;
pub use bounds::{m_constant, manifold_bounds};
pub use cone::cone_e;

use serde::{Deserialize, Serialize};

use crate::interval::Interval;
use crate::systems::{self, Chart, FieldId, SystemError, TimeBox};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ManifoldError {
    #[error("invalid block: {0}")]
    InvalidBlock(String),
    #[error("block chart {chart:?} does not match field {field:?}")]
    ChartMismatch { field: FieldId, chart: Chart },
    #[error("precondition not certified: {0}")]
    PreconditionNotCertified(String),
    #[error(transparent)]
    System(#[from] SystemError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Unstable manifold, time domain `(−∞, t₀]`.
    UnstablePast,
    /// Stable manifold, time domain `[t₀, ∞)`.
    StableFuture,
}

/// `[−d1, d1] × [−d2, d2]` in the given chart over a half-infinite time
/// domain. `d1` is the unstable (exit) radius, `d2` the stable (entry) one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HSetBlock {
    pub d1: f64,
    pub d2: f64,
    pub chart: Chart,
    pub time_domain: TimeBox,
    pub side: Side,
}

impl HSetBlock {
    pub fn new(d1: f64, d2: f64, chart: Chart, time_domain: TimeBox, side: Side) -> Result<Self, ManifoldError> {
        if !(d1 > 0.0 && d2 > 0.0 && d1.is_finite() && d2.is_finite()) {
            return Err(ManifoldError::InvalidBlock(format!("radii must be positive, got {d1}, {d2}")));
        }
        let t = time_domain.value;
        let ok = match side {
            Side::UnstablePast => t.lo() == f64::NEG_INFINITY,
            Side::StableFuture => t.hi() == f64::INFINITY,
        };
        if !ok {
            return Err(ManifoldError::InvalidBlock(format!("time domain {t} does not fit side {side:?}")));
        }
        Ok(HSetBlock { d1, d2, chart, time_domain, side })
    }

    /// Begin block over `ρ ∈ (−∞, ρ_max]`.
    pub fn begin(d1: f64, d2: f64, rho_max: f64) -> Result<Self, ManifoldError> {
        HSetBlock::new(d1, d2, Chart::BeginChart, TimeBox::rho_up_to(rho_max)?, Side::UnstablePast)
    }

    /// End block over `r ∈ [r_min, ∞)`.
    pub fn end(d1: f64, d2: f64, r_min: f64) -> Result<Self, ManifoldError> {
        HSetBlock::new(d1, d2, Chart::EndChart, TimeBox::r_from(r_min)?, Side::StableFuture)
    }

    pub fn x_range(&self) -> Interval {
        Interval::symmetric(self.d1)
    }

    pub fn y_range(&self) -> Interval {
        Interval::symmetric(self.d2)
    }
}

/// `Q(x, y) = a·x² − y²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeForm {
    pub a: f64,
}

impl ConeForm {
    pub fn new(a: f64) -> Result<Self, ManifoldError> {
        if a > 0.0 && a.is_finite() {
            Ok(ConeForm { a })
        } else {
            Err(ManifoldError::InvalidBlock(format!("cone coefficient must be positive, got {a}")))
        }
    }

    pub fn diag(&self) -> [Interval; 2] {
        [Interval::point(self.a), Interval::point(-1.0)]
    }
}

impl Default for ConeForm {
    fn default() -> Self {
        ConeForm { a: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PdMethod {
    Gershgorin,
    Sylvester,
}

/// Subdivision and tolerance settings for the manifold checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ManifoldOptions {
    /// Pieces of the compact time variable for cone and m checks.
    pub time_cells: usize,
    /// Pieces per state coordinate for cone and m checks.
    pub state_cells: usize,
    /// Pieces per face (free coordinate and time) for block checks.
    pub face_cells: usize,
    pub method: PdMethod,
    /// Relative precision of the E bisection.
    pub e_rel_tol: f64,
}

impl Default for ManifoldOptions {
    fn default() -> Self {
        ManifoldOptions { time_cells: 64, state_cells: 4, face_cells: 1, method: PdMethod::Sylvester, e_rel_tol: 1e-6 }
    }
}

/// Normal components of the field on the four faces, in the order
/// `x = +d1`, `x = −d1` (first component), `y = +d2`, `y = −d2` (second).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockCertificate {
    pub face_bounds: [Interval; 4],
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldCertificate {
    /// `[certified, first failing]`; `E.lo` is the cone constant.
    #[serde(rename = "E")]
    pub e: Interval,
    pub m: Interval,
    pub lip_t: Interval,
    pub delta: Interval,
    pub cone_slope: f64,
}

/// The compact time variable of a block (`s` for Begin, `u` for End).
fn param_range(id: FieldId, block: &HSetBlock) -> Result<Interval, ManifoldError> {
    if block.chart != id.chart() || id == FieldId::Original {
        return Err(ManifoldError::ChartMismatch { field: id, chart: block.chart });
    }
    Ok(match id {
        FieldId::Begin => block.time_domain.s_range()?,
        _ => block.time_domain.u_range()?,
    })
}

fn rhs(id: FieldId, p: Interval, x: Interval, y: Interval) -> [Interval; 2] {
    match id {
        FieldId::Begin => systems::begin_rhs(p, x, y),
        _ => systems::end_rhs(p, x, y),
    }
}

fn jac(id: FieldId, p: Interval, x: Interval, y: Interval) -> [[Interval; 2]; 2] {
    match id {
        FieldId::Begin => systems::begin_jac(p, x, y),
        _ => systems::end_jac(p, x, y),
    }
}

fn dt(id: FieldId, p: Interval, x: Interval, y: Interval) -> [Interval; 2] {
    match id {
        FieldId::Begin => systems::begin_dt(p, x, y),
        _ => systems::end_dt(p, x, y),
    }
}

/// All (time, x, y) cells of the block.
fn cells(p: Interval, block: &HSetBlock, tc: usize, sc: usize) -> Vec<(Interval, Interval, Interval)> {
    let ps = p.split(tc.max(1));
    let xs = block.x_range().split(sc.max(1));
    let ys = block.y_range().split(sc.max(1));
    let mut out = Vec::with_capacity(ps.len() * xs.len() * ys.len());
    for &pp in &ps {
        for &x in &xs {
            for &y in &ys {
                out.push((pp, x, y));
            }
        }
    }
    out
}
