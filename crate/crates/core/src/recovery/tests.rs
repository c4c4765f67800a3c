use super::*;
use std::collections::BTreeSet;
use crate::mesh::{generate_uniform, MeshPattern, Point2, Rect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn space(p: MeshPattern, n: usize, k: usize) -> Arc<FeSpace> {
    Arc::new(FeSpace::new(Arc::new(generate_uniform(p, n, Rect::UNIT).unwrap()), k).unwrap())
}

/// Random polynomial of total degree `d` with its gradient and Hessian.
struct Poly(Vec<((usize, usize), f64)>);

impl Poly {
    fn random(d: usize, rng: &mut ChaCha8Rng) -> Self {
        Self(monomial_exponents(d).into_iter().map(|e| (e, rng.random::<f64>() * 2.0 - 1.0)).collect())
    }

    fn eval(&self, p: Point2, dx: usize, dy: usize) -> f64 {
        let fall = |n: usize, m: usize| -> f64 { (0..m).map(|i| (n - i) as f64).product() };
        self.0
            .iter()
            .filter(|((a, b), _)| *a >= dx && *b >= dy)
            .map(|((a, b), c)| {
                c * fall(*a, dx) * fall(*b, dy) * p.x.powi((a - dx) as i32) * p.y.powi((b - dy) as i32)
            })
            .sum()
    }
}

#[test]
fn first_ring_of_regular_vertex() {
    let s = space(MeshPattern::Regular, 4, 2);
    let z = (0..s.mesh().n_vertices())
        .find(|&v| s.node_coords()[v].dist(&Point2::new(0.5, 0.5)) < 1e-12)
        .unwrap();
    let p = build_patch(&s, z, false).unwrap();
    assert_eq!(p.elements.len(), 6);
    assert_eq!(p.samples.len(), 19);
    assert!(p.condition <= DEFAULT_CONDITION_CAP);
}

#[test]
fn corner_patch_grows_inward() {
    for k in [2, 3, 4] {
        let s = space(MeshPattern::Regular, 4, k);
        let z = (0..s.mesh().n_vertices()).find(|&v| s.node_coords()[v] == Point2::new(1.0, 0.0)).unwrap();
        let p = build_patch(&s, z, false).unwrap();
        assert!(p.elements.len() > s.node_elements(z).len());
        assert!(p.samples.len() >= (k + 2) * (k + 3) / 2);
        assert!(p.condition <= DEFAULT_CONDITION_CAP);
    }
}

#[test]
fn condition_cap_holds_everywhere() {
    for pattern in [MeshPattern::Regular, MeshPattern::Chevron, MeshPattern::CrissCross, MeshPattern::UnionJack] {
        for k in [2, 3, 4] {
            let r = GradientRecovery::new(space(pattern, 4, k), RecoveryOptions::default()).unwrap();
            assert!(r.max_condition() <= DEFAULT_CONDITION_CAP, "{pattern} k={k}: {}", r.max_condition());
        }
    }
}

#[test]
fn fit_reproduces_members_and_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in [2, 3, 4] {
        let s = space(MeshPattern::CrissCross, 3, k);
        let q = Poly::random(k + 1, &mut rng);
        for z in [0, s.n_dofs() / 2, s.n_dofs() - 1] {
            let p = build_patch(&s, z, false).unwrap();
            let vals: Vec<f64> = p.samples.iter().map(|&j| q.eval(s.node_coords()[j], 0, 0)).collect();
            let c = fit_polynomial(&s, &p, &vals).unwrap();
            let scale = vals.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            for (&j, v) in p.samples.iter().zip(&vals) {
                assert!((p.eval_poly(&c, &s.node_coords()[j]) - v).abs() <= 1e-10 * scale);
            }
            let zero = fit_polynomial(&s, &p, &vec![0.0; vals.len()]).unwrap();
            assert!(zero.iter().all(|&c| c == 0.0));
        }
    }
}

#[test]
fn fit_matches_dense_normal_equations() {
    let s = space(MeshPattern::Regular, 4, 2);
    let mut p = build_patch(&s, 12, false).unwrap();
    p.samples.truncate(12);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let vals: Vec<f64> = (0..12).map(|_| rng.random::<f64>()).collect();
    let c = fit_polynomial(&s, &p, &vals).unwrap();

    // oracle: V^T V c = V^T b by Gaussian elimination with partial pivoting
    let exps = monomial_exponents(3);
    let m = exps.len();
    let rows: Vec<Vec<f64>> = p
        .samples
        .iter()
        .map(|&j| {
            let q = s.node_coords()[j];
            let (x, y) = ((q.x - p.origin.x) / p.local_scale, (q.y - p.origin.y) / p.local_scale);
            exps.iter().map(|&(a, b)| x.powi(a as i32) * y.powi(b as i32)).collect()
        })
        .collect();
    let mut a = vec![vec![0.0; m + 1]; m];
    for (r, row) in rows.iter().enumerate() {
        for i in 0..m {
            for j in 0..m {
                a[i][j] += row[i] * row[j];
            }
            a[i][m] += row[i] * vals[r];
        }
    }
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                for j in col..=m {
                    a[r][j] -= f * a[col][j];
                }
            }
        }
    }
    for i in 0..m {
        let oracle = a[i][m] / a[i][i];
        assert!((c[i] - oracle).abs() <= 1e-9 * (1.0 + oracle.abs()), "coef {i}: {} vs {oracle}", c[i]);
    }
}

#[test]
fn gradient_of_linear_and_degree_k_plus_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in [2, 3, 4] {
        let s = space(MeshPattern::UnionJack, 4, k);
        let r = GradientRecovery::new(s.clone(), RecoveryOptions::default()).unwrap();
        let x = FeFunction::interpolate(s.clone(), |p| p.x).unwrap();
        let (gx, gy) = r.gradient(&x).unwrap();
        assert!(gx.coeffs().iter().all(|v| (v - 1.0).abs() < 1e-9));
        assert!(gy.coeffs().iter().all(|v| v.abs() < 1e-9));

        let q = Poly::random(k + 1, &mut rng);
        let u = FeFunction::interpolate(s.clone(), |p| q.eval(p, 0, 0)).unwrap();
        let (gx, gy) = r.gradient(&u).unwrap();
        for (z, p) in s.node_coords().iter().enumerate() {
            assert!((gx.coeffs()[z] - q.eval(*p, 1, 0)).abs() < 1e-9);
            assert!((gy.coeffs()[z] - q.eval(*p, 0, 1)).abs() < 1e-9);
        }
    }
}

fn interior_gradient_error(n: usize) -> f64 {
    let s = space(MeshPattern::Regular, n, 2);
    let u = FeFunction::interpolate(s.clone(), |p| (PI * p.x).sin().powi(2) * (PI * p.y).sin().powi(2)).unwrap();
    let (gx, _) = recover_gradient(&u, false).unwrap();
    s.node_coords()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.x.min(p.y).min(1.0 - p.x).min(1.0 - p.y) >= 0.25 - 1e-12)
        .map(|(z, p)| {
            let exact = 2.0 * PI * (PI * p.x).sin() * (PI * p.x).cos() * (PI * p.y).sin().powi(2);
            (gx.coeffs()[z] - exact).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn gradient_superconverges_on_regular_mesh() {
    let ratio = interior_gradient_error(16) / interior_gradient_error(32);
    assert!(ratio >= 2f64.powf(2.5), "ratio {ratio}");
}

#[test]
fn hessian_polynomial_preservation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in [2, 3, 4] {
        let s = space(MeshPattern::Chevron, 4, k);
        let r = GradientRecovery::new(s.clone(), RecoveryOptions::default()).unwrap();
        let h = r.hessian(&FeFunction::interpolate(s.clone(), |p| p.x * p.x + 3.0 * p.y * p.y).unwrap()).unwrap();
        for z in 0..s.n_dofs() {
            let m = h.at_node(z);
            assert!((m[0][0] - 2.0).abs() < 1e-8 && (m[1][1] - 6.0).abs() < 1e-8);
            assert!(m[0][1].abs() < 1e-8 && m[1][0].abs() < 1e-8);
        }
        let h = r.hessian(&FeFunction::interpolate(s.clone(), |p| p.x * p.y).unwrap()).unwrap();
        for z in 0..s.n_dofs() {
            let m = h.at_node(z);
            assert!((m[0][1] - 1.0).abs() < 1e-8 && (m[1][0] - 1.0).abs() < 1e-8);
        }
        let q = Poly::random(k + 1, &mut rng);
        let h = r.hessian(&FeFunction::interpolate(s.clone(), |p| q.eval(p, 0, 0)).unwrap()).unwrap();
        for (z, p) in s.node_coords().iter().enumerate() {
            let m = h.at_node(z);
            let exact = [[q.eval(*p, 2, 0), q.eval(*p, 1, 1)], [q.eval(*p, 1, 1), q.eval(*p, 0, 2)]];
            for a in 0..2 {
                for b in 0..2 {
                    assert!((m[a][b] - exact[a][b]).abs() <= 1e-8 * (1.0 + exact[a][b].abs()), "k={k} z={z}");
                }
            }
        }
    }
}

#[test]
fn hessian_is_linear_and_local() {
    let s = space(MeshPattern::Regular, 6, 2);
    let r = GradientRecovery::new(s.clone(), RecoveryOptions::default()).unwrap();
    let u = FeFunction::interpolate(s.clone(), |p| (3.0 * p.x).sin() * p.y).unwrap();
    let v = FeFunction::interpolate(s.clone(), |p| (p.x * p.y).exp()).unwrap();
    let comb: Vec<f64> = u.coeffs().iter().zip(v.coeffs()).map(|(a, b)| 2.0 * a - 0.5 * b).collect();
    let hw = r.hessian(&FeFunction::new(s.clone(), comb).unwrap()).unwrap();
    let (hu, hv) = (r.hessian(&u).unwrap(), r.hessian(&v).unwrap());
    for z in 0..s.n_dofs() {
        let (a, b, c) = (hw.at_node(z), hu.at_node(z), hv.at_node(z));
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[i][j] - (2.0 * b[i][j] - 0.5 * c[i][j])).abs() < 1e-9);
            }
        }
    }

    let w = 40;
    let mut e = vec![0.0; s.n_dofs()];
    e[w] = 1.0;
    let he = r.hessian(&FeFunction::new(s.clone(), e).unwrap()).unwrap();
    for z in 0..s.n_dofs() {
        let reach: BTreeSet<usize> =
            r.stencil(z).samples.iter().flat_map(|&y| r.stencil(y).samples.iter().copied()).collect();
        if !reach.contains(&w) {
            assert!(he.at_node(z).iter().flatten().all(|&v| v == 0.0), "node {z}");
        }
    }
}

#[test]
fn same_type_sampling_on_translation_invariant_mesh() {
    let s = space(MeshPattern::Regular, 8, 2);
    let r = GradientRecovery::new(s.clone(), RecoveryOptions { same_type: true, ..Default::default() }).unwrap();
    // interior vertex: only vertices are sampled
    let z = (0..s.mesh().n_vertices()).find(|&v| s.node_coords()[v] == Point2::new(0.5, 0.5)).unwrap();
    assert!(r.stencil(z).samples.iter().all(|&j| j < s.mesh().n_vertices()));
    assert!(r.fallback_count() < s.n_dofs());
    let u = FeFunction::interpolate(s.clone(), |p| p.x.powi(3) - p.x * p.y * p.y).unwrap();
    let (gx, _) = r.gradient(&u).unwrap();
    for (z, p) in s.node_coords().iter().enumerate() {
        assert!((gx.coeffs()[z] - (3.0 * p.x * p.x - p.y * p.y)).abs() < 1e-9);
    }
}

#[test]
fn hessian_export_has_four_blocks() {
    let s = space(MeshPattern::Regular, 2, 2);
    let h = recover_hessian(&FeFunction::zero(s.clone()), false).unwrap();
    let mut buf = Vec::new();
    h.write(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.matches("dofs").count(), 4);
    assert_eq!(text.lines().count(), 4 * (s.n_dofs() + 1));
}


#[test]
fn edge_node_seed_is_union_of_endpoint_patches() {
    let s = space(MeshPattern::Regular, 4, 2);
    let z = (0..s.n_dofs()).find(|&d| s.node_coords()[d].dist(&Point2::new(0.625, 0.5)) < 1e-12).unwrap();
    assert!(matches!(s.node_kind(z), crate::fem::NodeKind::Edge(_)));
    let ctx = patch::PatchContext::new(&s);
    let carrier = ctx.build(&s, z, RecoveryOptions::default()).unwrap();
    assert_eq!(carrier.elements.len(), 10);
    let vt = s.mesh().vertex_triangles();
    let ends: Vec<usize> = [Point2::new(0.5, 0.5), Point2::new(0.75, 0.5)]
        .iter()
        .map(|p| (0..s.mesh().n_vertices()).find(|&v| s.mesh().vertices()[v] == *p).unwrap())
        .collect();
    let union: BTreeSet<usize> = ends.iter().flat_map(|&v| vt[v].iter().copied()).collect();
    assert_eq!(carrier.elements, union.into_iter().collect::<Vec<_>>());
    // the two edge neighbours alone carry 9 < 10 nodes, so this seed must grow
    let literal = ctx.build(&s, z, RecoveryOptions { seed: PatchSeed::NodeElements, ..Default::default() }).unwrap();
    assert!(literal.elements.len() > 10);
}
