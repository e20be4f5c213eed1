//! Fixed-size 3×3 helpers for the Lohner representation.

use super::jet::N;
use crate::interval::{Interval, IntervalMatrix, IntervalVector};

pub(crate) type V = [Interval; N];
pub(crate) type M = [[Interval; N]; N];
pub(crate) type P = [[f64; N]; N];

pub(crate) const ZV: V = [Interval::ZERO; N];
pub(crate) const ZM: M = [[Interval::ZERO; N]; N];

pub(crate) fn ident() -> P {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }))
}

pub(crate) fn to_iv(p: &P) -> M {
    p.map(|r| r.map(Interval::point))
}

pub(crate) fn vpoint(x: &[f64; N]) -> V {
    x.map(Interval::point)
}

pub(crate) fn vmid(v: &V) -> [f64; N] {
    v.map(|x| x.mid())
}

pub(crate) fn mmid(m: &M) -> P {
    m.map(|r| r.map(|x| x.mid()))
}

pub(crate) fn vadd(a: &V, b: &V) -> V {
    std::array::from_fn(|i| a[i] + b[i])
}

pub(crate) fn vsub(a: &V, b: &V) -> V {
    std::array::from_fn(|i| a[i] - b[i])
}

pub(crate) fn vhull(a: &V, b: &V) -> V {
    std::array::from_fn(|i| a[i].hull(b[i]))
}

pub(crate) fn madd(a: &M, b: &M) -> M {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] + b[i][j]))
}

pub(crate) fn msub(a: &M, b: &M) -> M {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] - b[i][j]))
}

pub(crate) fn mhull(a: &M, b: &M) -> M {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].hull(b[i][j])))
}

pub(crate) fn mv(a: &M, x: &V) -> V {
    std::array::from_fn(|i| (0..N).fold(Interval::ZERO, |s, k| s + a[i][k] * x[k]))
}

pub(crate) fn mm(a: &M, b: &M) -> M {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..N).fold(Interval::ZERO, |s, k| s + a[i][k] * b[k][j])))
}

pub(crate) fn dot(l: &[f64; N], x: &V) -> Interval {
    (0..N).fold(Interval::ZERO, |s, k| s + Interval::point(l[k]) * x[k])
}

pub(crate) fn vbounded(v: &V) -> bool {
    v.iter().all(|x| x.is_bounded())
}

pub(crate) fn mbounded(m: &M) -> bool {
    m.iter().all(vbounded)
}

pub(crate) fn v_interior(a: &V, b: &V) -> bool {
    (0..N).all(|i| a[i].interior_subset(b[i]))
}

pub(crate) fn m_interior(a: &M, b: &M) -> bool {
    (0..N).all(|i| v_interior(&a[i], &b[i]))
}

pub(crate) fn to_vector(v: &V) -> IntervalVector {
    IntervalVector::from(*v)
}

pub(crate) fn to_matrix(m: &M) -> IntervalMatrix {
    IntervalMatrix::from_rows(m)
}

/// Orthonormal basis from the columns of `a`, processed in decreasing order
/// of `weight[j]·‖a_j‖` (modified Gram–Schmidt, completed with unit vectors
/// when columns degenerate).
pub(crate) fn orthonormal(a: &P, weight: &[f64; N]) -> P {
    let norm = |v: &[f64; N]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let cols: Vec<[f64; N]> = (0..N).map(|j| std::array::from_fn(|i| a[i][j])).collect();
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&x, &y| {
        let kx = weight[x] * norm(&cols[x]);
        let ky = weight[y] * norm(&cols[y]);
        ky.partial_cmp(&kx).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut basis: Vec<[f64; N]> = Vec::with_capacity(N);
    let candidates = order.iter().map(|&j| cols[j]).chain((0..N).map(|i| std::array::from_fn(|k| if k == i { 1.0 } else { 0.0 })));
    for mut v in candidates {
        if basis.len() == N {
            break;
        }
        let n0 = norm(&v);
        if !(n0 > 0.0) || !n0.is_finite() {
            continue;
        }
        for _ in 0..2 {
            for q in &basis {
                let d: f64 = (0..N).map(|i| v[i] * q[i]).sum();
                for i in 0..N {
                    v[i] -= d * q[i];
                }
            }
        }
        let n = norm(&v);
        if n > 1e-8 * n0 {
            basis.push(v.map(|x| x / n));
        }
    }
    std::array::from_fn(|i| std::array::from_fn(|j| basis[j][i]))
}

/// Rigorous enclosure of the inverse of a point matrix by interval
/// Gauss–Jordan elimination with partial pivoting on the midpoints.
pub(crate) fn inverse(b: &P) -> Option<M> {
    let mut a = to_iv(b);
    let mut inv = to_iv(&ident());
    for col in 0..N {
        let piv = (col..N).max_by(|&x, &y| a[x][col].mig().partial_cmp(&a[y][col].mig()).unwrap())?;
        if a[piv][col].contains_zero() {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..N {
            a[col][j] = a[col][j].checked_div(d).ok()?;
            inv[col][j] = inv[col][j].checked_div(d).ok()?;
        }
        for i in 0..N {
            if i != col {
                let f = a[i][col];
                for j in 0..N {
                    a[i][j] = a[i][j] - f * a[col][j];
                    inv[i][j] = inv[i][j] - f * inv[col][j];
                }
            }
        }
    }
    Some(inv)
}
