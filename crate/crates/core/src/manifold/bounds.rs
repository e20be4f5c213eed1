use rayon::prelude::*;

use super::{
    cells, cone_e, dt, param_range, verify_block, ConeForm, FieldId, HSetBlock, ManifoldCertificate, ManifoldError,
    ManifoldOptions,
};
use crate::interval::Interval;

/// Bound on `2·‖Q·∂f/∂t‖` over block × time domain, as
/// `[lower bound of the supremum, upper bound of the supremum]`.
pub fn m_constant(id: FieldId, block: &HSetBlock, q: &ConeForm, opts: &ManifoldOptions) -> Result<Interval, ManifoldError> {
    let p = param_range(id, block)?;
    let a = Interval::point(q.a);
    let (lo, hi) = cells(p, block, opts.time_cells, opts.state_cells)
        .par_iter()
        .map(|&(pp, x, y)| {
            let v = dt(id, pp, x, y);
            let n = ((a * v[0]).sqr() + v[1].sqr()).sqrt().expect("nonnegative").scale(2.0);
            (n.lo(), n.hi())
        })
        .reduce(|| (0.0, 0.0), |l, r| (l.0.max(r.0), l.1.max(r.1)));
    Ok(Interval::new(lo, hi).expect("ordered"))
}

/// Full certificate: block isolation, cone constant, and `lip_t = m/E`.
pub fn manifold_bounds(
    id: FieldId,
    block: &HSetBlock,
    q: &ConeForm,
    opts: &ManifoldOptions,
) -> Result<ManifoldCertificate, ManifoldError> {
    let b = verify_block(id, block, opts)?;
    if !b.verdict {
        return Err(ManifoldError::PreconditionNotCertified(format!(
            "isolating block not verified, face bounds {:?}",
            b.face_bounds
        )));
    }
    let e = cone_e(id, block, q, opts)?;
    if !(e.lo() > 0.0) {
        return Err(ManifoldError::PreconditionNotCertified("no positive cone constant".into()));
    }
    let m = m_constant(id, block, q, opts)?;
    // Certified E is e.lo; any smaller E also certifies, so m/E uses the
    // bracket [lo, hi] of the supremal constant.
    let lip_t = m.checked_div(e).map_err(crate::systems::SystemError::from)?;
    let delta = (Interval::point(q.a) * m.sqr()).checked_div(e.sqr()).map_err(crate::systems::SystemError::from)?;
    Ok(ManifoldCertificate { e, m, lip_t, delta, cone_slope: q.a.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn begin_limit_has_zero_m() {
        let b = HSetBlock::begin(0.1, 0.1, -800.0).unwrap();
        let m = m_constant(FieldId::Begin, &b, &ConeForm::default(), &ManifoldOptions::default()).unwrap();
        assert_eq!(m.lo(), 0.0);
        assert!(m.hi() < 1e-150);
    }

    #[test]
    fn failing_block_is_reported() {
        let b = HSetBlock::begin(0.6, 0.6, 0.0).unwrap();
        let r = manifold_bounds(FieldId::Begin, &b, &ConeForm::default(), &ManifoldOptions::default());
        assert!(matches!(r, Err(ManifoldError::PreconditionNotCertified(_))));
    }
}
