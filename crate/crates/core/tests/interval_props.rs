//! Randomized containment, monotonicity and PD-certificate checks against
//! exact rational and eigenvalue oracles.

mod common;

use common::*;
use conefield::interval::{pd_lower_bound, pd_sylvester_2x2};
use conefield::{Interval, IntervalMatrix};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn arithmetic_contains_exact_results(x in interval(), y in interval(), s in 0.0..=1.0f64, t in 0.0..=1.0f64) {
        check_arithmetic(x, y, s, t)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20_000, ..ProptestConfig::default() })]

    #[test]
    fn elementary_functions_contain_samples(x in -50.0..50.0f64, w in 0.0..1.0f64, s in 0.0..=1.0f64) {
        let iv = Interval::new(x, x + w).unwrap();
        let a = member(iv, s);
        prop_assert!(iv.exp().contains(a.exp()));
        let p = Interval::new(x.abs() + 1e-3, x.abs() + 1e-3 + w).unwrap();
        let b = member(p, s);
        prop_assert!(p.ln().unwrap().contains(b.ln()));
        let r = p.sqrt().unwrap();
        // Exact: lo² ≤ b ≤ hi².
        prop_assert!(q(r.lo()) * q(r.lo()) <= q(b) && q(b) <= q(r.hi()) * q(r.hi()));
        for k in 0..6 {
            let pw = iv.powi(k).unwrap();
            let mut exact = q(1.0);
            for _ in 0..k { exact *= q(a); }
            prop_assert!(holds(pw, &exact), "powi {} of {} at {}", k, iv, a);
        }
    }

    #[test]
    fn inclusion_monotone(x in interval(), y in interval(), gx in 0.0..10.0f64, gy in 0.0..10.0f64) {
        let xx = x.inflate(gx, 0.0);
        let yy = y.inflate(gy, 0.0);
        prop_assert!((x + y).subset(xx + yy));
        prop_assert!((x - y).subset(xx - yy));
        prop_assert!((x * y).subset(xx * yy));
        prop_assert!(x.sqr().subset(xx.sqr()));
        if let Ok(d) = xx.checked_div(yy) {
            prop_assert!(x.checked_div(y).unwrap().subset(d));
        }
        let small = Interval::new(x.mid().clamp(-30.0, 30.0), x.mid().clamp(-30.0, 30.0)).unwrap();
        prop_assert!(small.exp().subset(small.inflate(gx.min(5.0), 0.0).exp()));
    }
}

/// Smallest eigenvalue of a symmetric 3×3 matrix by bisection on the
/// characteristic polynomial, using Sylvester inertia counts.
fn eig_min_3(m: &[[f64; 3]; 3]) -> f64 {
    // Number of eigenvalues below `s` via LDLᵀ of (M − sI) (Sturm-type count).
    let count_below = |s: f64| {
        let mut a = *m;
        for i in 0..3 {
            a[i][i] -= s;
        }
        let mut neg = 0;
        let d0 = a[0][0];
        if d0 < 0.0 {
            neg += 1;
        }
        let l10 = a[1][0] / d0;
        let l20 = a[2][0] / d0;
        let d1 = a[1][1] - l10 * a[0][1];
        if d1 < 0.0 {
            neg += 1;
        }
        let a21 = a[2][1] - l20 * a[0][1];
        let l21 = a21 / d1;
        let d2 = a[2][2] - l20 * a[0][2] - l21 * a21;
        if d2 < 0.0 {
            neg += 1;
        }
        neg
    };
    let bound: f64 = m.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max) + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10_000, ..ProptestConfig::default() })]

    #[test]
    fn gershgorin_below_min_eigenvalue_2x2(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64) {
        let m = IntervalMatrix::from_points(&[[a, b], [b, c]]);
        let e = pd_lower_bound(&m).unwrap();
        prop_assert!(e.lo() <= eig_min_2(a, b, c) + 1e-12);
    }

    #[test]
    fn gershgorin_below_min_eigenvalue_3x3(v in proptest::array::uniform6(-5.0..5.0f64)) {
        let mm = [[v[0], v[1], v[2]], [v[1], v[3], v[4]], [v[2], v[4], v[5]]];
        let m = IntervalMatrix::from_points(&mm);
        let e = pd_lower_bound(&m).unwrap();
        prop_assert!(e.lo() <= eig_min_3(&mm) + 1e-9);
    }

    #[test]
    fn sylvester_agrees_with_eigenvalue_oracle(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, e in -5.0..5.0f64) {
        check_sylvester(a, b, c, e)?;
    }

    #[test]
    fn sylvester_sampling_soundness(
        a in 0.0..5.0f64, wa in 0.0..0.5f64,
        b in -2.0..2.0f64, wb in 0.0..0.5f64,
        c in 0.0..5.0f64, wc in 0.0..0.5f64,
        e in 0.0..3.0f64,
        samples in proptest::collection::vec((0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..std::f64::consts::TAU), 8),
    ) {
        let ia = Interval::new(a, a + wa).unwrap();
        let ib = Interval::new(b, b + wb).unwrap();
        let ic = Interval::new(c, c + wc).unwrap();
        let m = IntervalMatrix::from_rows(&[[ia, ib], [ib, ic]]);
        if pd_sylvester_2x2(&m, e).unwrap() {
            for (s, t, u, th) in samples {
                let (x, y, z) = (member(ia, s), member(ib, t), member(ic, u));
                let (v0, v1) = (th.cos(), th.sin());
                let quad = x * v0 * v0 + 2.0 * y * v0 * v1 + z * v1 * v1;
                prop_assert!(quad >= e * (v0 * v0 + v1 * v1) - 1e-12);
            }
        }
    }

    #[test]
    fn gershgorin_interval_members(a in 0.0..5.0f64, b in -2.0..2.0f64, wb in 0.0..1.0f64, s in 0.0..=1.0f64) {
        let ib = Interval::new(b, b + wb).unwrap();
        let m = IntervalMatrix::from_rows(&[[Interval::point(a), ib], [ib, Interval::point(a)]]);
        let e = pd_lower_bound(&m).unwrap();
        let bb = member(ib, s);
        prop_assert!(e.lo() <= eig_min_2(a, bb, a) + 1e-12);
    }
}

#[test]
fn brute_force_example_matrix() {
    // [[2, [-0.5,0.5]], [[-0.5,0.5], 2]]: every member has λ_min ≥ 1.5.
    let h = Interval::new(-0.5, 0.5).unwrap();
    let m = IntervalMatrix::from_rows(&[[Interval::point(2.0), h], [h, Interval::point(2.0)]]);
    let e = pd_lower_bound(&m).unwrap().lo();
    let mut worst = f64::INFINITY;
    for k in 0..10_000 {
        let b = -0.5 + k as f64 / 9_999.0;
        worst = worst.min(eig_min_2(2.0, b, 2.0));
    }
    assert_eq!(e, 1.5);
    assert!(worst >= 1.5 - 1e-15);
}

#[test]
fn deterministic_across_threads() {
    let work = || {
        let mut acc = Interval::new(0.1, 0.2).unwrap();
        for k in 1..2000 {
            let x = Interval::point(k as f64).recip().unwrap();
            acc = (acc * x + acc.exp().scale(1e-3)).abs().sqrt().unwrap() + x.ln().unwrap().scale(1e-4);
        }
        (acc.lo().to_bits(), acc.hi().to_bits())
    };
    let base = work();
    let handles: Vec<_> = (0..8).map(|_| std::thread::spawn(work)).collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), base);
    }
}
