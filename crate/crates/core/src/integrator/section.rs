//! Linear Poincaré sections: crossing counts, verified crossings and the
//! section-to-section derivative.

use serde::{Deserialize, Serialize};

use super::jet::{field, N};
use super::linalg::*;
use super::lohner::{validate, LohnerSet, StepData, VarSet};
use super::{FlowJob, Integrator, IntegratorError, StepRecord, Taken};
use crate::interval::{Interval, IntervalMatrix, IntervalVector};
use crate::systems::FieldId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Increasing,
    Decreasing,
    /// Crossings in either direction are counted.
    Any,
}

impl Direction {
    fn admits(self, sign: i8) -> bool {
        match self {
            Direction::Increasing => sign > 0,
            Direction::Decreasing => sign < 0,
            Direction::Any => true,
        }
    }
}

/// `{x : ℓ·x = c}` in extended coordinates `(p, a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionSpec {
    pub functional: [f64; N],
    pub level: f64,
    pub direction: Direction,
}

impl SectionSpec {
    pub fn new(functional: [f64; N], level: f64, direction: Direction) -> Self {
        SectionSpec { functional, level, direction }
    }

    fn g(&self, x: &V) -> Interval {
        dot(&self.functional, x) - Interval::point(self.level)
    }

    fn g_set(&self, s: &LohnerSet) -> Interval {
        s.functional(&self.functional) - Interval::point(self.level)
    }

    fn speed(&self, f: &V) -> Interval {
        dot(&self.functional, f)
    }

    /// Tightens a box with the constraint `ℓ·x = c`.
    fn restrict(&self, x: &V) -> V {
        let mut out = *x;
        for i in 0..N {
            let li = self.functional[i];
            if li == 0.0 {
                continue;
            }
            let rest = (0..N).filter(|&j| j != i).fold(Interval::ZERO, |s, j| s + Interval::point(self.functional[j]) * out[j]);
            if let Ok(v) = (Interval::point(self.level) - rest).checked_div(Interval::point(li)) {
                if let Some(w) = out[i].intersect(v) {
                    out[i] = w;
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossingMethod {
    /// Interval Newton on the crossing time inside one Taylor step, with the
    /// state given by a mean-value form around the set's center.
    SingleStep,
    /// Hull of the step tubes spanning the crossing window.
    MultiStep,
}

#[derive(Debug, Clone)]
pub(crate) struct AffineImage {
    center: V,
    dpc: M,
    dpb: M,
    r0: V,
    r: V,
}

#[derive(Debug, Clone)]
pub struct CrossingResult {
    /// Absolute crossing times of all initial points.
    pub t_cross: Interval,
    /// On-section enclosure in extended coordinates.
    pub state: IntervalVector,
    pub transversal: bool,
    /// `∂(state at crossing)/∂(initial extended state)`, section-projected.
    pub jacobian: Option<IntervalMatrix>,
    pub method: CrossingMethod,
    /// Steps up to and including the crossing step.
    pub records: Vec<StepRecord>,
    image: Option<AffineImage>,
}

impl CrossingResult {
    /// Enclosure of `ℓ·x` over the crossing points, using the mean-value
    /// structure when available.
    pub fn project(&self, l: &[f64; N]) -> Interval {
        let box_value = dot(l, &std::array::from_fn(|i| self.state[i]));
        let Some(im) = &self.image else {
            return box_value;
        };
        let row = |m: &M| -> V { std::array::from_fn(|j| (0..N).fold(Interval::ZERO, |s, i| s + Interval::point(l[i]) * m[i][j])) };
        let lc = row(&im.dpc);
        let lb = row(&im.dpb);
        let v = (0..N).fold(dot(l, &im.center), |s, j| s + lc[j] * im.r0[j] + lb[j] * im.r[j]);
        v.intersect(box_value).unwrap_or(v)
    }
}

fn sign(x: Interval) -> Option<i8> {
    x.strict_sign()
}

/// Counts verified zeros of `ℓ·x − c` along a sequence of steps. A window
/// is a run of steps whose tubes meet the section; inside a window the
/// speed `ℓ·f` must keep one strict sign, so each trajectory crosses at most
/// once, and exactly once when the signs before and after differ.
#[derive(Debug, Clone)]
struct Windows {
    sec: SectionSpec,
    count: usize,
    pre: Option<i8>,
    open: Option<i8>,
}

impl Windows {
    fn new(sec: SectionSpec, start: Interval) -> Self {
        let pre = sign(start);
        // A start on the section is an uncounted window.
        let open = if pre.is_none() { Some(0) } else { None };
        Windows { sec, count: 0, pre, open }
    }

    /// Would a window opening in this tube produce a counted crossing?
    fn prospective(&self, rec: &StepRecord) -> bool {
        let (Some(p), None) = (self.pre, self.open) else { return false };
        match sign(self.sec.speed(&rec.field)) {
            Some(s) => s == -p && self.sec.g(&rec.tube).contains_zero() && self.sec.direction.admits(s),
            None => false,
        }
    }

    /// Feeds one step; returns the direction of a crossing completed in it.
    fn feed(&mut self, rec: &StepRecord, end: Interval) -> Result<Option<i8>, IntegratorError> {
        let gt = self.sec.g(&rec.tube);
        let end = end.intersect(gt).unwrap_or(end);
        if gt.contains_zero() {
            let s = sign(self.sec.speed(&rec.field)).ok_or(IntegratorError::NonTransversalCrossing(rec.t))?;
            match self.open {
                Some(o) if o != 0 && o != s => return Err(IntegratorError::NonTransversalCrossing(rec.t)),
                Some(0) => self.open = Some(0),
                _ => self.open = Some(s),
            }
        }
        let Some(e) = sign(end) else {
            if self.open.is_none() {
                return Err(IntegratorError::Inconclusive(format!("step end meets the section outside a window at t ∈ {}", rec.t)));
            }
            return Ok(None);
        };
        let crossed = match (self.open.take(), self.pre) {
            (Some(o), Some(p)) if o != 0 && p != e => Some(e),
            _ => None,
        };
        self.pre = Some(e);
        if let Some(d) = crossed {
            if self.sec.direction.admits(d) {
                self.count += 1;
                return Ok(Some(d));
            }
        }
        Ok(None)
    }
}

/// Number of verified crossings of `sec` along recorded steps.
pub fn count_crossings(records: &[StepRecord], sec: &SectionSpec) -> Result<usize, IntegratorError> {
    let Some(first) = records.first() else { return Ok(0) };
    let mut w = Windows::new(*sec, sec.g(&first.start));
    for r in records {
        w.feed(r, sec.g(&r.end))?;
    }
    Ok(w.count)
}

/// The axis `A′ = 0` in the field's extended coordinates (up to a positive
/// factor).
fn axis(id: FieldId) -> SectionSpec {
    let l = match id {
        FieldId::Original => [0.0, 0.0, 1.0],
        _ => [0.0, 0.5, -0.5],
    };
    SectionSpec::new(l, 0.0, Direction::Any)
}

/// Verified number of `A′ = 0` crossings up to the section crossing.
pub fn count_axis_crossings(job: &FlowJob, upto: &CrossingResult) -> Result<usize, IntegratorError> {
    count_crossings(&upto.records, &axis(job.id)).map_err(|e| match e {
        IntegratorError::NonTransversalCrossing(t) => {
            IntegratorError::Inconclusive(format!("A′ and A″ may vanish together near t ∈ {t}; subdivide the initial set"))
        }
        other => other,
    })
}

/// Section Jacobian of the `n`-th crossing with respect to the initial
/// extended state.
pub fn flow_derivative(job: &FlowJob, sec: &SectionSpec, n: usize, t_max: f64) -> Result<IntervalMatrix, IntegratorError> {
    let job = job.clone().with_variational(true);
    let res = integrate_to_section(&job, sec, n, t_max)?;
    Ok(res.jacobian.expect("variational requested"))
}

/// `I − f·ℓᵀ/(ℓ·f)`.
fn projector(l: &[f64; N], f: &V) -> Option<M> {
    let lf = dot(l, f);
    if lf.contains_zero() {
        return None;
    }
    Some(std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let id = if i == j { Interval::ONE } else { Interval::ZERO };
            id - (f[i] * Interval::point(l[j])).checked_div(lf).expect("nonzero")
        })
    }))
}

/// The `n`-th crossing of `sec`, counting only crossings in its direction.
pub fn integrate_to_section(job: &FlowJob, sec: &SectionSpec, n: usize, t_max: f64) -> Result<CrossingResult, IntegratorError> {
    if n == 0 {
        return Err(IntegratorError::InvalidJob("crossing index starts at 1".into()));
    }
    let mut it = Integrator::new(job)?;
    let mut win = Windows::new(*sec, sec.g_set(&job.x0));
    // Steps of the window that may contain the n-th crossing.
    let mut pending: Vec<Taken> = Vec::new();
    loop {
        if it.time().lo() > t_max {
            return Err(IntegratorError::MaxTimeExceeded { n, t_max });
        }
        let h_hint = it.next_h();
        let taken = it.take()?;
        let rec = it.log().last().expect("step recorded").clone();
        if win.count + 1 == n && win.prospective(&rec) {
            if let Some(mut res) = single_step(job, sec, &taken, h_hint) {
                let mut records = it.log()[..it.log().len() - 1].to_vec();
                records.append(&mut res.records);
                res.records = records;
                return Ok(res);
            }
        }
        if sec.g(&rec.tube).contains_zero() {
            pending.push(taken);
        }
        let done = win.feed(&rec, sec.g_set(it.set()))?;
        if done.is_some() && win.count == n {
            return multi_step(job.id, sec, &pending, it.log().to_vec());
        }
        if win.open.is_none() {
            pending.clear();
        }
    }
}

fn multi_step(id: FieldId, sec: &SectionSpec, window: &[Taken], records: Vec<StepRecord>) -> Result<CrossingResult, IntegratorError> {
    let l = &sec.functional;
    let mut state: Option<V> = None;
    let mut jac: Option<M> = None;
    let mut t: Option<Interval> = None;
    let mut with_var = true;
    for tk in window {
        let sd = &tk.data;
        if !sec.g(&sd.tube).contains_zero() {
            continue;
        }
        let f = field(id, sd.tube);
        let p = projector(l, &f).ok_or(IntegratorError::NonTransversalCrossing(tk.t_start))?;
        let s = sec.restrict(&sd.tube);
        state = Some(state.map_or(s, |x| vhull(&x, &s)));
        let span = tk.t_start + Interval::new(0.0, sd.h)?;
        t = Some(t.map_or(span, |x| x.hull(span)));
        match &tk.start_var {
            Some(v) => {
                let d = mm(&mm(&p, &sd.tube_v), &v.hull());
                jac = Some(jac.map_or(d, |x| mhull(&x, &d)));
            }
            None => with_var = false,
        }
    }
    let state = state.ok_or_else(|| IntegratorError::Inconclusive("empty crossing window".into()))?;
    Ok(CrossingResult {
        t_cross: t.expect("nonempty window"),
        state: to_vector(&state),
        transversal: true,
        jacobian: if with_var { jac.map(|m| to_matrix(&m)) } else { None },
        method: CrossingMethod::MultiStep,
        records,
        image: None,
    })
}

/// Crossing within one validated step from a set strictly before the
/// section.
fn single_step(job: &FlowJob, sec: &SectionSpec, tk: &Taken, h_hint: f64) -> Option<CrossingResult> {
    let l = &sec.functional;
    let set = &tk.start;
    let g0 = sec.g_set(set);
    let pre = sign(g0)?;
    let x = set.hull();
    let f0 = field(job.id, vpoint(&set.center));
    let v = sec.speed(&f0).mid();
    if !(v != 0.0) || (v > 0.0) == (pre > 0) {
        return None;
    }
    let mut h = (1.3 * g0.mag() / v.abs()).max(0.25 * h_hint).min(job.h_max);
    let mut sd = None;
    for _ in 0..10 {
        let Some(cand) = validate(job.id, &x, h, job.order, &set.center) else {
            h *= 0.8;
            continue;
        };
        let speed = sec.speed(&field(job.id, cand.tube));
        if sign(speed) != Some(-pre) {
            return None;
        }
        let g_end = g_image(sec, set, &cand, Interval::point(h));
        match sign(g_end) {
            Some(e) if e == -pre => {
                sd = Some(cand);
                break;
            }
            _ => h = (h * 1.5).min(job.h_max * 4.0),
        }
    }
    let sd = sd?;
    let tf = |tau: Interval| field(job.id, sd.tube_over(tau));
    // Crossing time of the center.
    let newton = |gfun: &dyn Fn(Interval) -> Interval| -> Option<Interval> {
        let mut tau = Interval::new(0.0, sd.h).ok()?;
        for _ in 0..30 {
            let m = Interval::point(tau.mid());
            let d = sec.speed(&tf(tau));
            if d.contains_zero() {
                return None;
            }
            let nt = m - gfun(m).checked_div(d).ok()?;
            let next = tau.intersect(nt)?;
            if next == tau {
                break;
            }
            tau = next;
        }
        Some(tau)
    };
    let tau_c = newton(&|m| sec.g(&sd.center_at(m)))?;
    let tau_s = newton(&|m| g_image(sec, set, &sd, m))?;
    let f_s = tf(tau_s);
    let p = projector(l, &f_s)?;
    let dp = mm(&p, &sd.jacobian_at(tau_s));
    let center = sd.center_at(tau_c);
    let dpc = mm(&dp, &to_iv(&set.c));
    let dpb = mm(&dp, &to_iv(&set.frame));
    let lin = vadd(&mv(&dpc, &set.r0), &mv(&dpb, &set.deviation));
    let raw = vadd(&center, &lin);
    let tube_s = sd.tube_over(tau_s);
    let state: V = std::array::from_fn(|i| raw[i].intersect(tube_s[i]).unwrap_or(raw[i]));
    let state = sec.restrict(&state);
    let jacobian = tk.start_var.as_ref().map(|v: &VarSet| to_matrix(&mm(&dp, &v.hull())));
    let span = Interval::new(0.0, tau_s.hi()).ok()?;
    let tube = sd.tube_over(span);
    let rec = StepRecord {
        t: tk.t_start + span,
        h: tau_s.hi(),
        start: x,
        tube,
        end: state,
        field: field(job.id, tube),
    };
    Some(CrossingResult {
        t_cross: tk.t_start + tau_s,
        state: to_vector(&state),
        transversal: true,
        jacobian,
        method: CrossingMethod::SingleStep,
        records: vec![rec],
        image: Some(AffineImage { center, dpc, dpb, r0: set.r0, r: set.deviation }),
    })
}

/// `ℓ·φ_τ(x) − c` over the set and its segments to the center, by the
/// mean-value form around the center.
fn g_image(sec: &SectionSpec, set: &LohnerSet, sd: &StepData, tau: Interval) -> Interval {
    let j = sd.jacobian_at(tau);
    let l = &sec.functional;
    let lj: V = std::array::from_fn(|k| (0..N).fold(Interval::ZERO, |s, i| s + Interval::point(l[i]) * j[i][k]));
    let lc: V = std::array::from_fn(|k| (0..N).fold(Interval::ZERO, |s, i| s + lj[i] * Interval::point(set.c[i][k])));
    let lb: V = std::array::from_fn(|k| (0..N).fold(Interval::ZERO, |s, i| s + lj[i] * Interval::point(set.frame[i][k])));
    let base = sec.g(&sd.center_at(tau));
    // Segments from the center: scale factors in [0, 1].
    (0..N).fold(base, |s, k| s + lc[k] * set.r0[k].hull_point(0.0) + lb[k] * set.deviation[k].hull_point(0.0))
}
