//! Coordinate changes between the charts. Every map takes the time `t` and a
//! 2-vector and returns `(t, z₁, z₂)`.
//!
//! * `Tb(r, x_b, y_b) = (r, x_b + y_b, (x_b − y_b)/2)` into `(w, w′)`;
//! * `Te(r, A, A′) = (r, A + A′, A − A′)` into `(x_e, y_e)`;
//! * `C(r, w, w′) = (r, w, w′/r)` into `(A, A′)`.

use serde::{Deserialize, Serialize};

use super::SystemError;
use crate::interval::{Interval, IntervalError, IntervalVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChartMap {
    Tb,
    TbInv,
    Te,
    TeInv,
    C,
    CInv,
}

pub fn chart_map(which: ChartMap, t: Interval, z: &IntervalVector) -> Result<IntervalVector, SystemError> {
    if z.dim() != 2 {
        return Err(IntervalError::ShapeMismatch(format!("chart_map expects dim 2, got {}", z.dim())).into());
    }
    let (a, b) = (z[0], z[1]);
    let half = |x: Interval| x.scale(0.5);
    let (p, q) = match which {
        ChartMap::Tb => (a + b, half(a - b)),
        ChartMap::TbInv => (half(a + b.scale(2.0)), half(a - b.scale(2.0))),
        ChartMap::Te => (a + b, a - b),
        ChartMap::TeInv => (half(a + b), half(a - b)),
        ChartMap::C => (a, b.checked_div(t)?),
        ChartMap::CInv => {
            if t.contains_zero() {
                return Err(IntervalError::DivisionByZeroInterval(t).into());
            }
            (a, b * t)
        }
    };
    Ok(IntervalVector::from([t, p, q]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_and_identity_chart() {
        let r = Interval::point(0.5);
        let o = chart_map(ChartMap::Tb, r, &IntervalVector::zeros(2)).unwrap();
        assert_eq!(o, IntervalVector::from([r, Interval::ZERO, Interval::ZERO]));
        let z = IntervalVector::from_points(&[0.3, -0.7]);
        let c = chart_map(ChartMap::C, Interval::ONE, &z).unwrap();
        assert_eq!(c, IntervalVector::from_points(&[1.0, 0.3, -0.7]));
        assert!(chart_map(ChartMap::C, Interval::new(-1.0, 1.0).unwrap(), &z).is_err());
    }
}
