//! Closed-form sufficient conditions for the two model blocks, evaluated in
//! interval arithmetic.

use serde::{Deserialize, Serialize};

use crate::interval::Interval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnalyticCheck {
    /// `min(d1, d2) > d·(1/(2r*) + 1/(8r*²) + d²/8)`, `d = d1 + d2`.
    EndBlock,
    /// `1 > 1/(2r*) + (3/4)d² + E/2`.
    EndCone,
    /// Closed-form m for the End block, as printed in the source analysis:
    /// `(d/(2r*²))(1 + 3/(4r*))√(a²+1)`. See [`end_m_corrected`].
    EndM,
    /// Square block with `d < 1/2`.
    BeginBlock,
    /// `(d1+d2)² ≤ 1/3`, `0 < a ≤ 1` and `a(e^{2ρ₀}+1) − e^{2ρ₀} > E`.
    BeginCone2,
    /// `m = 8·max(d1, d2)·e^{2ρ₀}·√(a²+1)`.
    BeginM,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticParams {
    pub d1: f64,
    pub d2: f64,
    pub r_star: f64,
    pub rho0: Interval,
    pub a: f64,
    pub e: f64,
}

impl Default for AnalyticParams {
    fn default() -> Self {
        AnalyticParams { d1: 0.25, d2: 0.25, r_star: 2.0, rho0: Interval::ZERO, a: 1.0, e: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticResult {
    pub holds: bool,
    pub bound: Option<Interval>,
}

fn pt(x: f64) -> Interval {
    Interval::point(x)
}

fn sqrt_a2p1(a: f64) -> Interval {
    (pt(a).sqr() + Interval::ONE).sqrt().expect("positive")
}

/// `m` for the End block derived from `∂f/∂r`:
/// `(d/r*²)(1 + 1/(2r*))√(a²+1)`, valid for `r* ≥ 2`.
pub fn end_m_corrected(d1: f64, d2: f64, r_star: f64, a: f64) -> Interval {
    let d = pt(d1) + pt(d2);
    let r = pt(r_star);
    let f = Interval::ONE + (r.scale(2.0)).recip().expect("r* > 0");
    (d * r.sqr().recip().expect("r* > 0") * f) * sqrt_a2p1(a)
}

pub fn analytic_check(which: AnalyticCheck, p: &AnalyticParams) -> AnalyticResult {
    let d = pt(p.d1) + pt(p.d2);
    let r = pt(p.r_star);
    let rinv = r.recip().ok();
    let s0 = p.rho0.scale(2.0).exp();
    let positive = p.d1 > 0.0 && p.d2 > 0.0;
    match which {
        AnalyticCheck::EndBlock => match rinv {
            Some(u) if positive && p.r_star > 0.0 => {
                let rhs = d * (u.scale(0.5) + u.sqr().scale(0.125) + d.sqr().scale(0.125));
                AnalyticResult { holds: p.d1.min(p.d2) > rhs.hi(), bound: Some(rhs) }
            }
            _ => AnalyticResult { holds: false, bound: None },
        },
        AnalyticCheck::EndCone => match rinv {
            Some(u) if positive && p.r_star > 0.0 => {
                let rhs = u.scale(0.5) + d.sqr().scale(0.75) + pt(p.e).scale(0.5);
                AnalyticResult { holds: rhs.hi() < 1.0, bound: Some(rhs) }
            }
            _ => AnalyticResult { holds: false, bound: None },
        },
        AnalyticCheck::EndM => match rinv {
            Some(u) if positive && p.r_star > 0.0 => {
                let m = d.scale(0.5) * u.sqr() * (Interval::ONE + u.scale(0.75)) * sqrt_a2p1(p.a);
                AnalyticResult { holds: true, bound: Some(m) }
            }
            _ => AnalyticResult { holds: false, bound: None },
        },
        AnalyticCheck::BeginBlock => {
            AnalyticResult { holds: positive && p.d1 == p.d2 && p.d1 < 0.5, bound: None }
        }
        AnalyticCheck::BeginCone2 => {
            let lhs = pt(p.a) * (s0 + Interval::ONE) - s0;
            let small = d.sqr().hi() <= pt(3.0).recip().expect("nonzero").lo();
            let holds = positive && small && p.a > 0.0 && p.a <= 1.0 && lhs.lo() > p.e;
            AnalyticResult { holds, bound: Some(lhs) }
        }
        AnalyticCheck::BeginM => {
            let m = pt(p.d1.max(p.d2)).scale(8.0) * s0 * sqrt_a2p1(p.a);
            AnalyticResult { holds: positive, bound: Some(m) }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn end_block_quarter() {
        let r = analytic_check(AnalyticCheck::EndBlock, &AnalyticParams::default());
        assert!(r.holds);
    }

    #[test]
    fn end_m_quarter_matches_printed_value() {
        let r = analytic_check(AnalyticCheck::EndM, &AnalyticParams::default());
        let want = 11.0 / 128.0 * 2f64.sqrt();
        assert!(r.bound.unwrap().contains(want) || (r.bound.unwrap().mid() - want).abs() < 1e-15);
        let c = end_m_corrected(0.25, 0.25, 2.0, 1.0);
        assert!((c.mid() - 0.15625 * 2f64.sqrt()).abs() < 1e-15);
    }
}
