//! Positive-definiteness certificates for sets of symmetric matrices.

use super::round::{add_up, sub_down};
use super::{Interval, IntervalError, IntervalMatrix};

/// Geršgorin lower bound on `vᵀSv / ‖v‖²` over all symmetric `S ∈ M`.
///
/// Returns an enclosure of `min_i (M_ii.lo − Σ_{j≠i} |M_ij|.max)`; its `lo`
/// is the usable certified bound.
pub fn pd_lower_bound(m: &IntervalMatrix) -> Result<Interval, IntervalError> {
    if !m.is_square() {
        return Err(IntervalError::ShapeMismatch(format!("pd_lower_bound of {}x{}", m.rows(), m.cols())));
    }
    let n = m.rows();
    let mut lo = f64::INFINITY;
    let mut hi = f64::INFINITY;
    for i in 0..n {
        let mut off_up = 0.0;
        let mut off_dn = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            let a = m.get(i, j).mag();
            off_up = add_up(off_up, a);
            off_dn = super::round::add_down(off_dn, a);
        }
        let d = m.get(i, i).lo();
        lo = lo.min(sub_down(d, off_up));
        hi = hi.min(super::round::sub_up(d, off_dn));
    }
    Ok(Interval::raw(lo, hi.max(lo)))
}

/// Sylvester criterion for `S − E·I ≻ 0` over all symmetric `S ∈ M` (2×2).
pub fn pd_sylvester_2x2(m: &IntervalMatrix, e: f64) -> Result<bool, IntervalError> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(IntervalError::ShapeMismatch(format!("pd_sylvester_2x2 of {}x{}", m.rows(), m.cols())));
    }
    let e = Interval::point(e);
    let a = m.get(0, 0) - e;
    let c = m.get(1, 1) - e;
    let (b, b2) = (m.get(0, 1), m.get(1, 0));
    let off = if b == b2 { b.sqr() } else { b * b2 };
    let det = a * c - off;
    Ok(c.lo() > 0.0 && a.lo() > 0.0 && det.lo() > 0.0)
}
