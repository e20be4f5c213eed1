//! Validated integration of the extended autonomous fields.
//!
//! The extended state is `(p, a, b)` where `p` is the compact time parameter
//! of the field (`s = e^{2ρ}` for Begin with `s′ = 2s`, `u = 1/r` otherwise
//! with `u′ = −u²`) and `(a, b)` are the phase coordinates of the field's
//! chart. Absolute time is tracked alongside as `t0 + elapsed`.
//!
//! Each step is a Taylor method of order `K` on a Lohner doubleton set, with
//! the remainder bounded over a high-order a priori enclosure. First-order
//! variational equations ride along as dual-number jets.

mod jet;
mod linalg;
mod lohner;
mod section;

pub use lohner::LohnerSet;
pub use section::{
    count_axis_crossings, count_crossings, flow_derivative, integrate_to_section, CrossingMethod, CrossingResult,
    Direction, SectionSpec,
};

use serde::{Deserialize, Serialize};

use crate::interval::{Interval, IntervalError, IntervalMatrix, IntervalVector};
use crate::systems::{FieldId, SystemError};
use jet::N;
use linalg::*;
use lohner::{advance, validate, StepData, VarSet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntegratorError {
    #[error("no enclosure validated at t = {t} after halving the step 40 times (last h = {h:e})")]
    EnclosureFailure { t: f64, h: f64 },
    #[error("section not crossed {n} times before t = {t_max}")]
    MaxTimeExceeded { n: usize, t_max: f64 },
    #[error("step limit {0} exceeded")]
    MaxStepsExceeded(usize),
    #[error("crossing near t ∈ {0} is not transversal")]
    NonTransversalCrossing(Interval),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("invalid job: {0}")]
    InvalidJob(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowJob {
    pub id: FieldId,
    /// Absolute initial time (ρ for Begin, r otherwise).
    pub t0: Interval,
    /// Initial extended state `(p, a, b)`.
    pub x0: LohnerSet,
    pub order: usize,
    pub tol: f64,
    pub with_variational: bool,
    pub h0: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl FlowJob {
    /// Job from an extended-state box (`x0[0]` is the compact time parameter).
    pub fn new(id: FieldId, t0: Interval, x0: &IntervalVector) -> Result<Self, IntegratorError> {
        if x0.dim() != N {
            return Err(IntegratorError::InvalidJob(format!("x0 must have dimension 3, got {}", x0.dim())));
        }
        FlowJob::from_set(id, t0, LohnerSet::from_box(x0))
    }

    /// Job at absolute time `t0` with phase box `(a, b)`; the compact time
    /// parameter is derived from `t0`.
    pub fn at_time(id: FieldId, t0: Interval, a: Interval, b: Interval) -> Result<Self, IntegratorError> {
        let p = compact_param(id, t0)?;
        FlowJob::new(id, t0, &IntervalVector::from([p, a, b]))
    }

    pub fn from_set(id: FieldId, t0: Interval, x0: LohnerSet) -> Result<Self, IntegratorError> {
        let job = FlowJob {
            id,
            t0,
            x0,
            order: 20,
            tol: 1e-14,
            with_variational: false,
            h0: 1e-3,
            h_max: 2.0,
            max_steps: 20_000,
        };
        job.check()?;
        Ok(job)
    }

    pub fn with_order(mut self, order: usize) -> Result<Self, IntegratorError> {
        self.order = order;
        self.check()?;
        Ok(self)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self, IntegratorError> {
        self.tol = tol;
        self.check()?;
        Ok(self)
    }

    pub fn with_h_max(mut self, h_max: f64) -> Result<Self, IntegratorError> {
        self.h_max = h_max;
        self.h0 = self.h0.min(h_max);
        self.check()?;
        Ok(self)
    }

    pub fn with_variational(mut self, on: bool) -> Self {
        self.with_variational = on;
        self
    }

    pub fn check(&self) -> Result<(), IntegratorError> {
        if !(5..=40).contains(&self.order) {
            return Err(IntegratorError::InvalidJob(format!("order {} outside [5, 40]", self.order)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(IntegratorError::InvalidJob(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.h0 > 0.0 && self.h_max >= self.h0) {
            return Err(IntegratorError::InvalidJob("step bounds must satisfy 0 < h0 ≤ h_max".into()));
        }
        if !self.t0.is_bounded() {
            return Err(IntegratorError::InvalidJob(format!("t0 must be bounded, got {}", self.t0)));
        }
        if !vbounded(&self.x0.hull()) {
            return Err(IntegratorError::InvalidJob("initial set must be bounded".into()));
        }
        Ok(())
    }
}

/// `s = e^{2t}` for Begin, `u = 1/t` otherwise.
pub fn compact_param(id: FieldId, t: Interval) -> Result<Interval, IntegratorError> {
    Ok(match id {
        FieldId::Begin => t.scale(2.0).exp(),
        _ => t.recip()?,
    })
}

/// One step as seen from outside: absolute time span, tube over the span,
/// and the endpoint set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepEnclosure {
    pub t_step: Interval,
    pub t_end: Interval,
    pub tube: IntervalVector,
    pub endpoint: LohnerSet,
}

impl StepEnclosure {
    pub fn initial(job: &FlowJob) -> Self {
        StepEnclosure {
            t_step: job.t0,
            t_end: job.t0,
            tube: to_vector(&job.x0.hull()),
            endpoint: job.x0.clone(),
        }
    }
}

/// A single validated step of length `h` from `current`.
pub fn step(job: &FlowJob, current: &StepEnclosure, h: f64) -> Result<StepEnclosure, IntegratorError> {
    job.check()?;
    let x = current.endpoint.hull();
    let mut h = h;
    for _ in 0..=40 {
        if let Some(sd) = validate(job.id, &x, h, job.order, &current.endpoint.center) {
            if let Some((set, _)) = advance(&current.endpoint, None, &sd) {
                let hp = Interval::point(h);
                return Ok(StepEnclosure {
                    t_step: current.t_end + Interval::new(0.0, h)?,
                    t_end: current.t_end + hp,
                    tube: to_vector(&sd.tube),
                    endpoint: set,
                });
            }
        }
        h *= 0.5;
    }
    Err(IntegratorError::EnclosureFailure { t: current.t_end.mid(), h })
}

/// What the log keeps about a step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Absolute time span of the step.
    pub t: Interval,
    pub h: f64,
    pub start: [Interval; N],
    pub tube: [Interval; N],
    pub end: [Interval; N],
    /// Field over the tube.
    pub field: [Interval; N],
}

/// CSV step log: `t_lo,t_hi,x0_lo,x0_hi,x1_lo,x1_hi,x2_lo,x2_hi` (tube).
pub fn write_step_log<W: std::io::Write>(records: &[StepRecord], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t_lo", "t_hi", "x0_lo", "x0_hi", "x1_lo", "x1_hi", "x2_lo", "x2_hi"])?;
    for r in records {
        let mut row = vec![format!("{:?}", r.t.lo()), format!("{:?}", r.t.hi())];
        for x in r.tube {
            row.push(format!("{:?}", x.lo()));
            row.push(format!("{:?}", x.hi()));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Stepping state for one job.
pub struct Integrator<'a> {
    job: &'a FlowJob,
    set: LohnerSet,
    var: Option<VarSet>,
    elapsed: Interval,
    h: f64,
    err_prev: f64,
    steps: usize,
    log: Vec<StepRecord>,
}

/// A step with its internals, for section handling.
pub(crate) struct Taken {
    pub data: StepData,
    pub start: LohnerSet,
    pub start_var: Option<VarSet>,
    pub t_start: Interval,
}

impl<'a> Integrator<'a> {
    pub fn new(job: &'a FlowJob) -> Result<Self, IntegratorError> {
        job.check()?;
        Ok(Integrator {
            job,
            set: job.x0.clone(),
            var: job.with_variational.then(VarSet::identity),
            elapsed: Interval::ZERO,
            h: job.h0,
            err_prev: job.tol,
            steps: 0,
            log: Vec::new(),
        })
    }

    pub fn set(&self) -> &LohnerSet {
        &self.set
    }

    /// Absolute time of the current set.
    pub fn time(&self) -> Interval {
        self.job.t0 + self.elapsed
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn log(&self) -> &[StepRecord] {
        &self.log
    }

    /// Jacobian of the flow from the initial extended state, if tracked.
    pub fn jacobian(&self) -> Option<IntervalMatrix> {
        self.var.as_ref().map(|v| to_matrix(&v.hull()))
    }

    pub(crate) fn next_h(&self) -> f64 {
        self.h
    }

    pub fn step(&mut self) -> Result<&StepRecord, IntegratorError> {
        self.take()?;
        Ok(self.log.last().expect("just pushed"))
    }

    pub(crate) fn take(&mut self) -> Result<Taken, IntegratorError> {
        if self.steps >= self.job.max_steps {
            return Err(IntegratorError::MaxStepsExceeded(self.job.max_steps));
        }
        let job = self.job;
        let x = self.set.hull();
        let scale = x.iter().map(|v| v.mag()).fold(1.0, f64::max);
        let k1 = (job.order + 1) as f64;
        let mut h = self.h.min(job.h_max);
        for _ in 0..=40 {
            let Some(sd) = validate(job.id, &x, h, job.order, &self.set.center) else {
                h *= 0.5;
                continue;
            };
            if sd.err > 10.0 * job.tol * scale {
                h *= (0.9 * (job.tol * scale / sd.err).powf(1.0 / k1)).clamp(0.1, 0.5);
                continue;
            }
            let Some((set, var)) = advance(&self.set, self.var.as_ref(), &sd) else {
                h *= 0.5;
                continue;
            };
            // PI controller on the remainder norm.
            let err = sd.err.max(1e-300);
            let fac = 0.9 * (job.tol * scale / err).powf(0.7 / k1) * (self.err_prev / (job.tol * scale)).powf(0.4 / k1);
            self.err_prev = err.max(job.tol * scale * 1e-6);
            self.h = (h * fac.clamp(0.2, 4.0)).min(job.h_max);
            let t_start = self.time();
            let hp = Interval::point(h);
            self.elapsed = self.elapsed + hp;
            let rec = StepRecord {
                t: t_start + Interval::new(0.0, h)?,
                h,
                start: x,
                tube: sd.tube,
                end: set.hull(),
                field: jet::field(job.id, sd.tube),
            };
            self.log.push(rec);
            self.steps += 1;
            let start = std::mem::replace(&mut self.set, set);
            let start_var = std::mem::replace(&mut self.var, var);
            return Ok(Taken { data: sd, start, start_var, t_start });
        }
        Err(IntegratorError::EnclosureFailure { t: self.time().mid(), h })
    }
}

/// Integrates for absolute duration `duration` (stepping exactly onto the end).
pub fn integrate_for(job: &FlowJob, duration: f64) -> Result<(Interval, LohnerSet, Option<IntervalMatrix>), IntegratorError> {
    let mut it = Integrator::new(job)?;
    let target = duration;
    loop {
        let done = it.elapsed.lo() >= target;
        if done {
            break;
        }
        let remaining = target - it.elapsed.mid();
        if remaining <= 0.0 {
            break;
        }
        if it.h > remaining {
            it.h = remaining;
        }
        it.take()?;
    }
    let t = it.time();
    let jac = it.jacobian();
    Ok((t, it.set, jac))
}
