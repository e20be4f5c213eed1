//! Nonrigorous companion: floating-point simulation of the Original field,
//! bisection search for orbit candidates and trajectory export.
//!
//! Nothing here feeds a proof; candidates found by [`bisect_candidates`]
//! are only suggestions for the rigorous pipeline.

use ode_solvers::{Dopri5, OutputType, System, Vector2};
use serde::{Deserialize, Serialize};

use crate::shooting::OrbitCandidate;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoutError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("trajectory blew up (|A| > {limit}) at r = {r}")]
    BlowUp { r: f64, limit: f64 },
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("no sign change on the bracket: F({lo}) = {f_lo:+e}, F({hi}) = {f_hi:+e}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
}

/// Time axis of exported samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeScale {
    Rho,
    R,
    /// `ρ = ln r` for `r < 1`, `r` afterwards.
    Mixed,
}

impl TimeScale {
    pub fn tag(self) -> &'static str {
        match self {
            TimeScale::Rho => "rho",
            TimeScale::R => "r",
            TimeScale::Mixed => "mixed",
        }
    }

    fn apply(self, r: f64) -> f64 {
        match self {
            TimeScale::Rho => r.ln(),
            TimeScale::R => r,
            TimeScale::Mixed if r < 1.0 => r.ln(),
            TimeScale::Mixed => r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrajectory {
    /// `(t, A, A′)` with `t` in [`SimTrajectory::scale`].
    pub samples: Vec<(f64, f64, f64)>,
    pub scale: TimeScale,
}

impl SimTrajectory {
    /// Same trajectory on another time axis.
    pub fn with_scale(&self, scale: TimeScale) -> SimTrajectory {
        let r = |t: f64| match self.scale {
            TimeScale::R => t,
            TimeScale::Rho => t.exp(),
            TimeScale::Mixed if t < 0.0 => t.exp(),
            TimeScale::Mixed => t,
        };
        SimTrajectory { samples: self.samples.iter().map(|&(t, a, p)| (scale.apply(r(t)), a, p)).collect(), scale }
    }

    /// CSV with header `scale,t,A,Aprime,xe,ye`, where `x_e = A + A′` and
    /// `y_e = A − A′`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["scale", "t", "A", "Aprime", "xe", "ye"])?;
        for &(t, a, p) in &self.samples {
            w.write_record([self.scale.tag().to_string(), t.to_string(), a.to_string(), p.to_string(), (a + p).to_string(), (a - p).to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Simulation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoutConfig {
    pub db1: f64,
    pub de1: f64,
    pub de2: f64,
    /// Integration horizon in `r`.
    pub t_end: f64,
    pub tol: f64,
    pub blow_up: f64,
}

impl Default for ScoutConfig {
    fn default() -> Self {
        ScoutConfig { db1: 0.125, de1: 0.0015, de2: 0.01, t_end: 60.0, tol: 1e-12, blow_up: 10.0 }
    }
}

type State = Vector2<f64>;

fn rhs(r: f64, z: &State) -> State {
    let (a, p) = (z[0], z[1]);
    State::new(p, a - a * a * a - p / r + a / (4.0 * r * r))
}

/// Section `A − A′ = level` watched along the run.
#[derive(Debug, Clone, Copy)]
struct Watch {
    level: f64,
    stop_after: usize,
}

#[derive(Debug, Default)]
struct Tracker {
    prev: Option<(f64, State)>,
    crossings: Vec<(f64, State)>,
    blown: Option<f64>,
}

struct Field<'a> {
    watch: Option<Watch>,
    limit: f64,
    tr: &'a mut Tracker,
}

impl System<f64, State> for Field<'_> {
    fn system(&self, r: f64, z: &State, dz: &mut State) {
        *dz = rhs(r, z);
    }

    fn solout(&mut self, r: f64, z: &State, _dz: &State) -> bool {
        if z[0].abs() > self.limit || !z[0].is_finite() {
            self.tr.blown = Some(r);
            return true;
        }
        let mut stop = false;
        if let (Some(w), Some((r0, z0))) = (self.watch, self.tr.prev) {
            let g0 = z0[0] - z0[1] - w.level;
            let g1 = z[0] - z[1] - w.level;
            if g0 != 0.0 && (g0 < 0.0) != (g1 <= 0.0) || g1 == 0.0 {
                self.tr.crossings.push(locate(w.level, (r0, z0), (r, *z)));
                stop = self.tr.crossings.len() >= w.stop_after;
            }
        }
        self.tr.prev = Some((r, *z));
        stop
    }
}

/// Crossing inside one step by bisection on the cubic Hermite interpolant.
fn locate(level: f64, (r0, z0): (f64, State), (r1, z1): (f64, State)) -> (f64, State) {
    let h = r1 - r0;
    let (f0, f1) = (rhs(r0, &z0), rhs(r1, &z1));
    let at = |th: f64| -> State {
        let h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
        let h10 = th * (1.0 - th) * (1.0 - th);
        let h01 = th * th * (3.0 - 2.0 * th);
        let h11 = th * th * (th - 1.0);
        z0 * h00 + f0 * (h * h10) + z1 * h01 + f1 * (h * h11)
    };
    let g = |th: f64| {
        let z = at(th);
        z[0] - z[1] - level
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let g_lo = g(lo);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0) == (g_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let th = 0.5 * (lo + hi);
    (r0 + th * h, at(th))
}

struct Run {
    samples: Vec<(f64, State)>,
    crossings: Vec<(f64, State)>,
}

fn integrate(r0: f64, y_b: f64, cfg: &ScoutConfig, watch: Option<Watch>) -> Result<Run, ScoutError> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(ScoutError::InvalidInput(format!("r0 must be positive, got {r0}")));
    }
    if !(cfg.t_end > r0 && cfg.tol > 0.0) {
        return Err(ScoutError::InvalidInput(format!("need t_end > r0 and tol > 0 (t_end = {}, tol = {})", cfg.t_end, cfg.tol)));
    }
    let z0 = State::new(cfg.db1 + y_b, (cfg.db1 - y_b) / (2.0 * r0));
    let mut tr = Tracker { prev: Some((r0, z0)), ..Tracker::default() };
    let field = Field { watch, limit: cfg.blow_up, tr: &mut tr };
    // Stiffness detection is off: near small r the step is limited by
    // accuracy, not stability, and the detector misfires there.
    let mut stepper = Dopri5::from_param(
        field,
        r0,
        cfg.t_end,
        0.0,
        z0,
        cfg.tol,
        cfg.tol * 1e-2,
        0.9,
        0.04,
        0.2,
        10.0,
        0.05,
        0.0,
        10_000_000,
        u32::MAX,
        OutputType::Sparse,
    );
    stepper.integrate().map_err(|e| ScoutError::Solver(e.to_string()))?;
    let samples = stepper.x_out().iter().copied().zip(stepper.y_out().iter().copied()).collect();
    drop(stepper);
    if let Some(r) = tr.blown {
        return Err(ScoutError::BlowUp { r, limit: cfg.blow_up });
    }
    Ok(Run { samples, crossings: tr.crossings })
}

/// Embedded Runge–Kutta (Dormand–Prince 5(4)) solution of the Original
/// field from the Begin exit-face point `(r0, y_b)` up to `r = t_end`.
pub fn simulate(r0: f64, y_b: f64, t_end: f64, tol: f64) -> Result<SimTrajectory, ScoutError> {
    let cfg = ScoutConfig { t_end, tol, ..ScoutConfig::default() };
    let run = integrate(r0, y_b, &cfg, None)?;
    let mut samples: Vec<(f64, f64, f64)> = Vec::with_capacity(run.samples.len());
    for (r, z) in run.samples {
        if samples.last().is_none_or(|s| r > s.0) {
            samples.push((r, z[0], z[1]));
        }
    }
    Ok(SimTrajectory { samples, scale: TimeScale::R })
}

/// Outcome of shooting from one face point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ShotOutcome {
    /// The watched crossing happened at `r_e` with `x_e = A + A′`.
    Crossing { r_e: f64, x_e: f64 },
    /// Fewer crossings before `t_end`; `a_end` is `A` there.
    Escaped { crossings: usize, a_end: f64 },
}

impl ShotOutcome {
    /// Shooting function value whose sign drives the bisection: `x_e` at
    /// the crossing, otherwise the final `A` (the orbit settled near ±1
    /// without reaching the crossing).
    pub fn value(&self) -> f64 {
        match *self {
            ShotOutcome::Crossing { x_e, .. } => x_e,
            ShotOutcome::Escaped { a_end, .. } => a_end,
        }
    }
}

/// Shoots from `(r0, y_b)` to the `(n+1)`-th crossing of `A − A′ = ±d^e_2`.
pub fn shoot(n: usize, r0: f64, y_b: f64, cfg: &ScoutConfig) -> Result<ShotOutcome, ScoutError> {
    if n == 0 {
        return Err(ScoutError::InvalidInput("n must be positive".into()));
    }
    let side = if n % 2 == 1 { 1.0 } else { -1.0 };
    let run = integrate(r0, y_b, cfg, Some(Watch { level: side * cfg.de2, stop_after: n + 1 }))?;
    Ok(match run.crossings.get(n) {
        Some(&(r_e, z)) => ShotOutcome::Crossing { r_e, x_e: z[0] + z[1] },
        None => ShotOutcome::Escaped {
            crossings: run.crossings.len(),
            a_end: run.samples.last().map_or(f64::NAN, |s| s.1[0]),
        },
    })
}

/// A candidate found by bisection. Always nonrigorous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoutCandidate {
    pub candidate: OrbitCandidate,
    pub nonrigorous: bool,
    /// Final bracket around `r̂`.
    pub bracket: (f64, f64),
    /// Estimated `∂x_e/∂r` at `r̂`.
    pub slope: f64,
}

/// Bisection on the shooting function to `10⁻⁹` absolute in `r`.
pub fn bisect_candidates(n: usize, bracket: (f64, f64)) -> Result<ScoutCandidate, ScoutError> {
    bisect_candidates_with(n, bracket, &ScoutConfig::default(), 1e-9)
}

pub fn bisect_candidates_with(n: usize, bracket: (f64, f64), cfg: &ScoutConfig, r_tol: f64) -> Result<ScoutCandidate, ScoutError> {
    let (mut lo, mut hi) = (bracket.0.min(bracket.1), bracket.0.max(bracket.1));
    if !(lo > 0.0) || lo == hi {
        return Err(ScoutError::InvalidInput(format!("bracket must be a nonempty positive interval, got {bracket:?}")));
    }
    let f = |r: f64| shoot(n, r, 0.0, cfg).map(|o| o.value());
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if !(f_lo.signum() * f_hi.signum() < 0.0) {
        return Err(ScoutError::NoSignChange { lo, hi, f_lo, f_hi });
    }
    while hi - lo > r_tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r_hat = 0.5 * (lo + hi);
    let slope = crossing_slope(n, r_hat, cfg)?;
    // Distance to where |x_e| reaches 2·d^e_1, capped at the shipped size.
    let mut delta_r = if slope.is_finite() && slope != 0.0 { 2.0 * cfg.de1 / slope.abs() } else { 1e-8 };
    if let Some(d) = OrbitCandidate::defaults().get(n - 1) {
        delta_r = delta_r.min(d.delta_r);
    }
    let delta_r = delta_r.min(0.5 * r_hat);
    let candidate = OrbitCandidate::new(n, r_hat, delta_r).map_err(|e| ScoutError::InvalidInput(e.to_string()))?;
    Ok(ScoutCandidate { candidate, nonrigorous: true, bracket: (lo, hi), slope })
}

/// Centered difference of `x_e` in `r` over crossings on both sides.
fn crossing_slope(n: usize, r: f64, cfg: &ScoutConfig) -> Result<f64, ScoutError> {
    let h = (r * 1e-5).max(1e-12);
    match (shoot(n, r - h, 0.0, cfg)?, shoot(n, r + h, 0.0, cfg)?) {
        (ShotOutcome::Crossing { x_e: a, .. }, ShotOutcome::Crossing { x_e: b, .. }) => Ok((b - a) / (2.0 * h)),
        _ => Ok(f64::NAN),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_start_stays_zero() {
        let cfg = ScoutConfig { db1: 0.0, t_end: 5.0, ..ScoutConfig::default() };
        let run = integrate(0.5, 0.0, &cfg, None).unwrap();
        assert!(run.samples.iter().all(|(_, z)| z[0] == 0.0 && z[1] == 0.0));
    }

    #[test]
    fn hermite_locates_linear_crossing() {
        // A − A′ = level crossed where the interpolant says so.
        let z0 = State::new(0.0, 0.0);
        let (r, z) = locate(0.0, (1.0, z0), (1.1, State::new(0.0, 0.0)));
        assert!((1.0..=1.1).contains(&r));
        assert_eq!(z[0] - z[1], 0.0);
    }

    #[test]
    fn scale_conversions_round_trip() {
        let t = SimTrajectory { samples: vec![(0.5, 0.1, 0.2), (2.0, 0.3, 0.4)], scale: TimeScale::R };
        let m = t.with_scale(TimeScale::Mixed);
        assert!((m.samples[0].0 - 0.5f64.ln()).abs() < 1e-15 && m.samples[1].0 == 2.0);
        let back = m.with_scale(TimeScale::R);
        assert!((back.samples[0].0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(simulate(-1.0, 0.0, 1.0, 1e-9), Err(ScoutError::InvalidInput(_))));
        assert!(matches!(shoot(0, 0.1, 0.0, &ScoutConfig::default()), Err(ScoutError::InvalidInput(_))));
    }
}
