use rayon::prelude::*;

use super::{cells, jac, param_range, ConeForm, HSetBlock, ManifoldError, ManifoldOptions, PdMethod};
use crate::interval::{pd_lower_bound, pd_sylvester_2x2, Interval, IntervalMatrix};
use crate::systems::{self, FieldId};

/// Largest `E` for which `DfᵀQ + Q·Df ⪰ E·I` is certified over the block and
/// time domain, as `[certified, first failing]`. A nonpositive `lo` means no
/// cone condition could be certified.
///
/// Sylvester: bisection on `E` to relative `opts.e_rel_tol`. Each cell is
/// checked at the corners of its Jacobian-coefficient box: `Df` is affine in
/// those coefficients and `{S : S ⪰ E·I}` is convex, so the corners certify
/// the whole cell. Geršgorin: the minimum of the row-dominance bounds of the
/// full interval matrices, which is exactly the limit of that bisection.
pub fn cone_e(id: FieldId, block: &HSetBlock, q: &ConeForm, opts: &ManifoldOptions) -> Result<Interval, ManifoldError> {
    let p = param_range(id, block)?;
    let qd = q.diag();
    let cs = cells(p, block, opts.time_cells, opts.state_cells);
    let form = |j: [[Interval; 2]; 2]| IntervalMatrix::from_rows(&j).cone_form(&qd).expect("2x2");
    let mats: Vec<IntervalMatrix> = match opts.method {
        PdMethod::Gershgorin => cs.par_iter().map(|&(pp, x, y)| form(jac(id, pp, x, y))).collect(),
        PdMethod::Sylvester => cs
            .par_iter()
            .flat_map_iter(|&(pp, x, y)| corner_jacobians(id, pp, x, y).into_iter().map(form))
            .collect(),
    };
    match opts.method {
        PdMethod::Gershgorin => {
            let e = mats
                .par_iter()
                .map(|m| pd_lower_bound(m).expect("square").lo())
                .reduce(|| f64::INFINITY, f64::min);
            Ok(Interval::point(e))
        }
        PdMethod::Sylvester => {
            let certified = |e: f64| mats.par_iter().all(|m| pd_sylvester_2x2(m, e).expect("2x2"));
            // Every member has λ_min ≤ its diagonal entries.
            let mut hi = mats
                .iter()
                .map(|m| m.get(0, 0).hi().min(m.get(1, 1).hi()))
                .fold(f64::INFINITY, f64::min);
            if !(hi > 0.0) || !certified(0.0_f64.next_up()) {
                return Ok(Interval::ZERO);
            }
            if certified(hi) {
                return Ok(Interval::point(hi));
            }
            let mut lo = 0.0_f64.next_up();
            while hi - lo > opts.e_rel_tol * hi {
                let mid = 0.5 * (lo + hi);
                if certified(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(Interval::new(lo, hi).expect("bisection bracket"))
        }
    }
}

fn corner_jacobians(id: FieldId, p: Interval, x: Interval, y: Interval) -> Vec<[[Interval; 2]; 2]> {
    let ends = |c: Interval| [Interval::point(c.lo()), Interval::point(c.hi())];
    match id {
        FieldId::Begin => ends(systems::begin_jac_coeff(p, x, y)).into_iter().map(systems::begin_jac_from).collect(),
        _ => {
            let [c2, c3] = systems::end_jac_coeffs(p, x, y);
            let mut out = Vec::with_capacity(4);
            for a in ends(c2) {
                for b in ends(c3) {
                    out.push(systems::end_jac_from([a, b]));
                }
            }
            out
        }
    }
}
