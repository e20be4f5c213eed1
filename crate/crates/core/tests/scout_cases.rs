//! Nonrigorous simulation and candidate bisection.

use conefield::scout::{bisect_candidates, simulate, ScoutError};

#[test]
fn first_candidate_from_wide_bracket() {
    let s = bisect_candidates(1, (0.003, 0.004)).unwrap();
    assert!(s.nonrigorous);
    assert!((s.candidate.r_hat - 0.003288250).abs() < 1e-6, "{}", s.candidate.r_hat);
    assert!(s.bracket.1 - s.bracket.0 <= 1e-9);
    assert!(s.slope > 0.0);
}

#[test]
fn third_candidate() {
    let s = bisect_candidates(3, (0.0006, 0.0007)).unwrap();
    assert!((s.candidate.r_hat - 0.000650050).abs() < 1e-6, "{}", s.candidate.r_hat);
    assert_eq!(s.candidate.crossings_to_section, 4);
}

#[test]
fn same_sign_bracket_is_rejected() {
    assert!(matches!(bisect_candidates(1, (0.0031, 0.00315)), Err(ScoutError::NoSignChange { .. })));
}

#[test]
fn tolerance_convergence() {
    let a = simulate(0.003288250, 0.0, 5.0, 1e-10).unwrap();
    let b = simulate(0.003288250, 0.0, 5.0, 1e-12).unwrap();
    let (ea, eb) = (a.samples.last().unwrap(), b.samples.last().unwrap());
    assert_eq!(ea.0, eb.0);
    assert!((ea.1 - eb.1).abs() < 1e-6 && (ea.2 - eb.2).abs() < 1e-6, "{ea:?} vs {eb:?}");
}

fn extrema_before(samples: &[(f64, f64, f64)], t_stop: f64) -> usize {
    let ps: Vec<f64> = samples.iter().filter(|s| s.0 <= t_stop).map(|s| s.2).collect();
    ps.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
}

#[test]
fn first_orbit_shape() {
    let tr = simulate(0.003288250, 0.0, 6.7, 1e-12).unwrap();
    assert_eq!(extrema_before(&tr.samples, 6.7), 1);
    let end = tr.samples.last().unwrap();
    assert!(end.1.abs() < 0.05 && end.2.abs() < 0.05, "near the origin at r ≈ 6.7: {end:?}");
}

#[test]
fn sixth_orbit_has_six_extrema() {
    // The section is reached at r ≈ 21.8.
    let tr = simulate(0.000232050, 0.0, 21.7, 1e-12).unwrap();
    assert_eq!(extrema_before(&tr.samples, 21.7), 6);
}
