//! Oracles and checks shared by the property suites and the acceptance
//! harness.
#![allow(dead_code)]

use conefield::integrator::{flow_derivative, integrate_to_section, step, Direction, FlowJob, SectionSpec, StepEnclosure};
use conefield::interval::pd_sylvester_2x2;
use conefield::systems::FieldId;
use conefield::{Interval, IntervalMatrix, IntervalVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::FromPrimitive;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use serde::Deserialize;

pub fn q(x: f64) -> BigRational {
    BigRational::from_f64(x).unwrap()
}

/// Exact containment test `v ∈ x` with `v` a rational.
pub fn holds(x: Interval, v: &BigRational) -> bool {
    // Overflowed endpoints are ±∞ and bound everything on their side.
    (x.lo() == f64::NEG_INFINITY || q(x.lo()) <= *v) && (x.hi() == f64::INFINITY || *v <= q(x.hi()))
}

/// Exact value of a plain decimal string.
pub fn decimal(s: &str) -> BigRational {
    let (neg, s) = s.strip_prefix('-').map_or((false, s), |r| (true, r));
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let digits: BigInt = format!("{int}{frac}").parse().unwrap();
    let v = BigRational::new(digits, num_traits::pow(BigInt::from(10), frac.len()));
    if neg {
        -v
    } else {
        v
    }
}

pub fn scalar() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e3..1e3f64,
        -1e-150..1e-150f64,
        -1e150..1e150f64,
        (-1e3..1e3f64).prop_map(|x| x.round()),
        (-1e-300..1e-300f64),
    ]
}

pub fn interval() -> impl Strategy<Value = Interval> {
    (scalar(), scalar()).prop_map(|(a, b)| Interval::new(a.min(b), a.max(b)).unwrap())
}

pub fn member(x: Interval, t: f64) -> f64 {
    (x.lo() + t * (x.hi() - x.lo())).clamp(x.lo(), x.hi())
}

/// The four operations, negation and squaring contain the exact rational
/// results for members `a ∈ x`, `b ∈ y`.
pub fn check_arithmetic(x: Interval, y: Interval, s: f64, t: f64) -> Result<(), TestCaseError> {
    let a = member(x, s);
    let b = member(y, t);
    prop_assert!(holds(x + y, &(q(a) + q(b))));
    prop_assert!(holds(x - y, &(q(a) - q(b))));
    prop_assert!(holds(x * y, &(q(a) * q(b))));
    prop_assert!(holds(-x, &(-q(a))));
    prop_assert!(holds(x.sqr(), &(q(a) * q(a))));
    if let Ok(d) = x.checked_div(y) {
        prop_assert!(holds(d, &(q(a) / q(b))));
    } else {
        prop_assert!(y.contains_zero());
    }
    Ok(())
}

/// Smallest eigenvalue of a symmetric 2×2 matrix in closed form.
pub fn eig_min_2(a: f64, b: f64, c: f64) -> f64 {
    let m = 0.5 * (a + c);
    let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    m - r
}

/// Sylvester's certificate is sound, and exact away from the threshold.
pub fn check_sylvester(a: f64, b: f64, c: f64, e: f64) -> Result<(), TestCaseError> {
    let m = IntervalMatrix::from_points(&[[a, b], [b, c]]);
    let lam = eig_min_2(a, b, c);
    let cert = pd_sylvester_2x2(&m, e).unwrap();
    if cert {
        prop_assert!(lam > e - 1e-12);
    }
    if lam > e + 1e-9 * (1.0 + lam.abs()) {
        prop_assert!(cert, "lam {} e {}", lam, e);
    }
    Ok(())
}

#[derive(Deserialize)]
pub struct IvpCase {
    pub field: FieldId,
    #[serde(default)]
    pub tag: Option<String>,
    pub x0: [f64; 3],
    pub t_end: f64,
    pub reference: [String; 3],
}

pub fn ivp_cases() -> Vec<IvpCase> {
    serde_json::from_str(include_str!("../oracle/ivp_reference.json")).expect("fixture parses")
}

pub fn point_job(id: FieldId, x0: [f64; 3]) -> FlowJob {
    FlowJob::new(id, Interval::ZERO, &IntervalVector::from_points(&x0)).unwrap()
}

/// Advances exactly `h` of elapsed time, halving the requested step when
/// the validated step came back shorter.
pub fn advance_exact(job: &FlowJob, cur: &StepEnclosure, h: f64) -> StepEnclosure {
    let next = step(job, cur, h).unwrap();
    if next.t_end == cur.t_end + Interval::point(h) {
        return next;
    }
    let mid = advance_exact(job, cur, h / 2.0);
    advance_exact(job, &mid, h / 2.0)
}

/// Integrates a fixture case with fixed 1/64 steps; returns the widest
/// endpoint coordinate, or the first coordinate missing its reference.
pub fn check_ivp(c: &IvpCase) -> Result<f64, String> {
    let job = point_job(c.field, c.x0);
    let mut cur = StepEnclosure::initial(&job);
    let h = 1.0 / 64.0;
    let steps = (c.t_end / h).round() as usize;
    if steps as f64 * h != c.t_end {
        return Err(format!("end time {} is not a multiple of 1/64", c.t_end));
    }
    for _ in 0..steps {
        cur = advance_exact(&job, &cur, h);
    }
    let hull = cur.endpoint.hull();
    let mut worst = 0.0f64;
    for i in 0..3 {
        if !holds(hull[i], &decimal(&c.reference[i])) {
            return Err(format!("{:?} x0 {:?} coord {i}: {} ∌ {}", c.field, c.x0, hull[i], c.reference[i]));
        }
        worst = worst.max(hull[i].width());
    }
    Ok(worst)
}

/// Starts used for the finite-difference comparison.
pub const FD_STARTS: [[f64; 3]; 3] = [[0.5, 1.2, 0.1], [0.25, 0.8, 0.3], [1.0, 1.4, -0.2]];

/// Section `A′ = 0` (decreasing) of the Original field.
pub fn fd_section() -> SectionSpec {
    SectionSpec::new([0.0, 0.0, 1.0], 0.0, Direction::Decreasing)
}

fn crossing_mid(x0: [f64; 3], sec: &SectionSpec) -> [f64; 3] {
    let res = integrate_to_section(&point_job(FieldId::Original, x0), sec, 1, 60.0).unwrap();
    std::array::from_fn(|i| res.state[i].mid())
}

/// Variational section Jacobian against centered differences with
/// `h = 1e-6`; returns the largest relative deviation.
pub fn check_variational(x0: [f64; 3]) -> Result<f64, String> {
    let sec = fd_section();
    let j = flow_derivative(&point_job(FieldId::Original, x0), &sec, 1, 60.0).map_err(|e| e.to_string())?;
    let h = 1e-6;
    let mut worst = 0.0f64;
    for col in 0..3 {
        let (mut plus, mut minus) = (x0, x0);
        plus[col] += h;
        minus[col] -= h;
        let (fp, fm) = (crossing_mid(plus, &sec), crossing_mid(minus, &sec));
        for row in 0..3 {
            let fd = (fp[row] - fm[row]) / (2.0 * h);
            let e = j.get(row, col);
            let scale = fd.abs().max(1e-2);
            let dev = (e.mid() - fd).abs().max(e.width()) / scale;
            if dev > 1e-4 {
                return Err(format!("x0 {x0:?} J[{row}][{col}] = {e}, centered difference {fd}"));
            }
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}
