use super::{param_range, rhs, BlockCertificate, HSetBlock, ManifoldError, ManifoldOptions};
use crate::interval::Interval;
use crate::systems::FieldId;

/// Face sign conditions over the whole time domain: the field points
/// strictly out through `|x| = d1` and strictly in through `|y| = d2`.
pub fn verify_block(id: FieldId, block: &HSetBlock, opts: &ManifoldOptions) -> Result<BlockCertificate, ManifoldError> {
    let p = param_range(id, block)?;
    let k = opts.face_cells.max(1);
    let ps = p.split(k);
    let xs = block.x_range().split(k);
    let ys = block.y_range().split(k);
    let hull_over = |face: &dyn Fn(Interval, Interval) -> Interval, free: &[Interval]| {
        let mut acc: Option<Interval> = None;
        for &pp in &ps {
            for &z in free {
                let v = face(pp, z);
                acc = Some(acc.map_or(v, |a| a.hull(v)));
            }
        }
        acc.expect("at least one cell")
    };
    let (d1, d2) = (Interval::point(block.d1), Interval::point(block.d2));
    let face_bounds = [
        hull_over(&|pp, y| rhs(id, pp, d1, y)[0], &ys),
        hull_over(&|pp, y| rhs(id, pp, -d1, y)[0], &ys),
        hull_over(&|pp, x| rhs(id, pp, x, d2)[1], &xs),
        hull_over(&|pp, x| rhs(id, pp, x, -d2)[1], &xs),
    ];
    let verdict = face_bounds[0].is_positive()
        && face_bounds[1].is_negative()
        && face_bounds[2].is_negative()
        && face_bounds[3].is_positive();
    Ok(BlockCertificate { face_bounds, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn end_block_signs() {
        let b = HSetBlock::end(0.0015, 0.01, 6.0).unwrap();
        let c = verify_block(FieldId::End, &b, &ManifoldOptions::default()).unwrap();
        assert!(c.verdict);
        assert!(c.face_bounds[0].lo() > 0.0005);
    }

    #[test]
    fn large_begin_block_fails() {
        let b = HSetBlock::begin(0.6, 0.6, 2.0).unwrap();
        let c = verify_block(FieldId::Begin, &b, &ManifoldOptions::default()).unwrap();
        assert!(!c.verdict);
    }

    #[test]
    fn chart_must_match() {
        let b = HSetBlock::end(0.0015, 0.01, 6.0).unwrap();
        assert!(verify_block(FieldId::Begin, &b, &ManifoldOptions::default()).is_err());
    }
}
