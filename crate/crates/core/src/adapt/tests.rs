use super::*;
use crate::bench::{lshape_solution, square_solution};
use crate::mesh::{generate_lshape, generate_uniform, MeshPattern, Point2, Rect};
use std::collections::BTreeSet;

fn field(eta: &[f64]) -> EstimatorField {
    EstimatorField { eta: eta.to_vec() }
}

#[test]
fn hand_enumerated_marking() {
    let e = field(&[2.0, 3f64.sqrt(), 2f64.sqrt(), 1.0]);
    assert_eq!(dorfler_mark(&e, 0.5, MarkingConvention::ThetaSquared), BTreeSet::from([0]));
    // plain theta: threshold 5 needs the two largest
    assert_eq!(dorfler_mark(&e, 0.5, MarkingConvention::Theta), BTreeSet::from([0, 1]));
    let z = field(&[0.0, 1.0, 0.0, 2.0, 0.5]);
    assert_eq!(dorfler_mark(&z, 1.0, MarkingConvention::ThetaSquared), BTreeSet::from([1, 3, 4]));
    assert!(dorfler_mark(&field(&[0.0; 3]), 0.5, MarkingConvention::ThetaSquared).is_empty());
}

#[test]
fn uniform_marking_count() {
    for n in [1, 4, 7, 10, 33] {
        let m = dorfler_mark(&field(&vec![0.3; n]), 0.5, MarkingConvention::ThetaSquared);
        assert_eq!(m.len(), (0.25 * n as f64).ceil() as usize, "n={n}");
        // ties resolved towards small indices
        assert_eq!(m, (0..m.len()).collect());
    }
}

#[test]
fn marking_is_monotone_and_permutation_invariant() {
    let eta: Vec<f64> = (0..40).map(|i| ((i * 37) % 11) as f64 * 0.1 + 0.05).collect();
    let e = field(&eta);
    let mut prev = BTreeSet::new();
    for theta in [0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
        let m = dorfler_mark(&e, theta, MarkingConvention::ThetaSquared);
        assert!(prev.is_subset(&m));
        prev = m;
    }
    let perm: Vec<usize> = (0..40).map(|i| (i * 7) % 40).collect();
    let permuted = field(&perm.iter().map(|&i| eta[i]).collect::<Vec<_>>());
    let m1 = dorfler_mark(&e, 0.5, MarkingConvention::ThetaSquared);
    let m2: BTreeSet<usize> = dorfler_mark(&permuted, 0.5, MarkingConvention::ThetaSquared).iter().map(|&j| perm[j]).collect();
    let sum = |m: &BTreeSet<usize>| m.iter().map(|&t| eta[t].powi(2)).sum::<f64>();
    assert_eq!(m1.len(), m2.len());
    assert!((sum(&m1) - sum(&m2)).abs() < 1e-12);
}

fn space(n: usize, k: usize) -> Arc<FeSpace> {
    Arc::new(FeSpace::new(Arc::new(generate_uniform(MeshPattern::CrissCross, n, Rect::UNIT).unwrap()), k).unwrap())
}

#[test]
fn estimator_vanishes_for_quadratics_and_zero() {
    let s = space(4, 2);
    let r = GradientRecovery::new(s.clone(), RecoveryOptions::default()).unwrap();
    let q = FeFunction::interpolate(s.clone(), |p| p.x * p.x - 2.0 * p.x * p.y + 0.5 * p.y * p.y).unwrap();
    let est = estimate(&q, &r.hessian(&q).unwrap()).unwrap();
    assert!(est.eta.iter().all(|&e| e < 1e-9));
    let z = FeFunction::zero(s);
    assert!(estimate(&z, &r.hessian(&z).unwrap()).unwrap().eta.iter().all(|&e| e == 0.0));
}

#[test]
fn estimator_scales_and_matches_over_integration() {
    let s = space(3, 3);
    let r = GradientRecovery::new(s.clone(), RecoveryOptions::default()).unwrap();
    let u = FeFunction::interpolate(s.clone(), |p| (2.0 * p.x).sin() * (3.0 * p.y).cos()).unwrap();
    let h = r.hessian(&u).unwrap();
    let est = estimate(&u, &h).unwrap();
    let total2: f64 = est.eta.iter().map(|e| e * e).sum();
    assert!((est.total().powi(2) - total2).abs() <= 1e-12 * total2);

    let over = elementwise(&u, 2 * 3 + 4, |t, b, _| h.value_on(t, b)).unwrap();
    for (e, o) in est.eta.iter().zip(over) {
        assert!((e - o.sqrt()).abs() <= 1e-10 * e.max(1e-300));
    }

    let scaled = FeFunction::new(s.clone(), u.coeffs().iter().map(|c| 3.0 * c).collect()).unwrap();
    let est3 = estimate(&scaled, &r.hessian(&scaled).unwrap()).unwrap();
    for (a, b) in est.eta.iter().zip(&est3.eta) {
        assert!((3.0 * a - b).abs() <= 1e-10 * b.max(1e-12));
    }
}

#[test]
fn effectivity_edge_cases() {
    let s = space(4, 2);
    let exact = square_solution();
    let u = FeFunction::interpolate(s.clone(), exact.u).unwrap();
    // exact Hessian in place of the recovered one
    let sq = elementwise(&u, 2 * 2 + 4, |_, _, x| (exact.hess)(x)).unwrap();
    let est = EstimatorField { eta: sq.iter().map(|v| v.sqrt()).collect() };
    assert!((effectivity(&est, &u, exact.hess).unwrap() - 1.0).abs() < 1e-12);
    let zero = EstimatorField { eta: vec![0.0; est.eta.len()] };
    assert_eq!(effectivity(&zero, &u, exact.hess).unwrap(), 0.0);
    let q = FeFunction::interpolate(s, |p| p.x * p.y).unwrap();
    let r = effectivity(&zero, &q, |_: Point2| [[0.0, 1.0], [1.0, 0.0]]);
    assert!(matches!(r, Err(Error::UndefinedEffectivity)));
}

#[test]
fn tiny_budget_gives_single_record() {
    let problem = AdaptiveProblem {
        initial_mesh: generate_lshape(2).unwrap(),
        degree: 2,
        gamma: None,
        data: lshape_solution(),
        exact_known: true,
    };
    let options = AdaptOptions { max_dofs: 10, ..Default::default() };
    let records = adaptive_loop(&problem, &options, |_| Ok(())).unwrap();
    assert_eq!(records.len(), 1);
    assert!(records[0].kappa.is_some());
}

#[test]
fn smooth_problem_estimator_decreases() {
    let problem = AdaptiveProblem {
        initial_mesh: generate_uniform(MeshPattern::Regular, 8, Rect::UNIT).unwrap(),
        degree: 2,
        gamma: None,
        data: square_solution(),
        exact_known: true,
    };
    let options = AdaptOptions { max_dofs: 6000, ..Default::default() };
    let records = adaptive_loop(&problem, &options, |_| Ok(())).unwrap();
    assert!(records.len() >= 4);
    for w in records.windows(2) {
        assert!(w[1].dofs > w[0].dofs);
    }
    for w in records.windows(2) {
        assert!(w[1].h2_error < w[0].h2_error, "{records:?}");
    }
    for w in records[2..].windows(2) {
        assert!(w[1].eta_total < w[0].eta_total, "{records:?}");
    }
    let last = records.last().unwrap();
    assert!((last.kappa.unwrap() - 1.0).abs() < 0.1, "{last:?}");
    let mut buf = Vec::new();
    write_adapt_csv(&mut buf, &records).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("iter,dofs,eta_total,h2_error,kappa\n"));
    assert_eq!(text.lines().count(), records.len() + 1);
}
