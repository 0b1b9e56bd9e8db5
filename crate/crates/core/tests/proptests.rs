use std::f64::consts::PI;

use horonet::cmc1::normal_flow;
use horonet::io::{
    cross_ratios_from_json, cross_ratios_to_json, pattern_from_json, pattern_to_json, toda_from_json, toda_to_json,
    ExportMesh,
};
use horonet::mesh::{lattice_subcomplex, LatticeSpec, Region};
use horonet::moebius::{
    edge_cross_ratio, from_upper_half_space, horosphere, hyperbolic_distance, mobius_from_triples, MoebiusMap,
    SpherePoint,
};
use horonet::osculating::{fixed_point_map, lift_eigenvalue};
use horonet::pattern::{cross_ratios_of, develop, verify_closure, CirclePattern, CrossRatioSystem};
use horonet::toda::{square_grid_toda, DiagonalRule, TodaFamily};
use horonet::C64;
use proptest::prelude::*;

fn complex(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b))
}

fn point() -> impl Strategy<Value = SpherePoint> {
    prop_oneof![9 => complex(3.0).prop_map(SpherePoint::finite), 1 => Just(SpherePoint::infinity())]
}

fn separated(p: &[SpherePoint; 3]) -> bool {
    p[0].chordal(&p[1]) > 0.05 && p[1].chordal(&p[2]) > 0.05 && p[0].chordal(&p[2]) > 0.05
}

fn triple() -> impl Strategy<Value = [SpherePoint; 3]> {
    [point(), point(), point()].prop_filter("separated", separated)
}

fn sl2() -> impl Strategy<Value = MoebiusMap> {
    (complex(2.0), complex(2.0), complex(2.0), complex(2.0))
        .prop_filter("invertible", |(a, b, c, d)| (a * d - b * c).norm() > 0.1)
        .prop_map(|(a, b, c, d)| MoebiusMap::new(a, b, c, d).normalized())
}

fn hyperbolic_point() -> impl Strategy<Value = horonet::moebius::HermitianMatrix> {
    (complex(2.0), 0.2..3.0).prop_map(|(w, t)| from_upper_half_space(w, t))
}

/// Equilateral lattice with each vertex moved by up to `jitter·ε`.
fn jittered(jitter: f64) -> impl Strategy<Value = CirclePattern> {
    let p = lattice_subcomplex(&LatticeSpec::equilateral(0.3, Region::unit_square())).unwrap();
    let n = p.positions.len();
    proptest::collection::vec(complex(jitter * 0.3), n).prop_filter_map("orientation", move |d| {
        let w: Vec<C64> = p.positions.iter().zip(&d).map(|(a, b)| a + b).collect();
        let z = CirclePattern::from_affine(p.disk.clone(), &w).ok()?;
        z.orientation_flips().is_empty().then_some(z)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sphere_points_are_normalized(p in complex(1e3), q in complex(1e3)) {
        if let Some(s) = SpherePoint::new(p, q) {
            prop_assert!((s.p().norm().max(s.q().norm()) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn triples_are_carried_over(z in triple(), w in triple()) {
        let m = mobius_from_triples(z, w).unwrap();
        prop_assert!((m.det() - 1.0).norm() < 1e-12);
        for k in 0..3 {
            prop_assert!(m.apply(&z[k]).chordal(&w[k]) < 1e-9);
        }
    }

    #[test]
    fn cross_ratio_is_moebius_invariant(z in triple(), extra in point(), m in sl2()) {
        prop_assume!(z.iter().all(|p| p.chordal(&extra) > 0.05));
        let x = edge_cross_ratio(&z[0], &z[1], &extra, &z[2]).unwrap();
        let y = edge_cross_ratio(&m.apply(&z[0]), &m.apply(&z[1]), &m.apply(&extra), &m.apply(&z[2])).unwrap();
        prop_assert!((x - y).norm() <= 1e-8 * x.norm().max(1.0));
    }

    #[test]
    fn distance_is_an_invariant_metric(x in hyperbolic_point(), y in hyperbolic_point(), z in hyperbolic_point(), m in sl2()) {
        let d = |a, b| hyperbolic_distance(a, b).unwrap();
        prop_assert!((d(&x, &y) - d(&y, &x)).abs() < 1e-12);
        prop_assert!(d(&x, &x) < 1e-7);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-9);
        let (mx, my) = (m.act(&x), m.act(&y));
        prop_assert!((d(&mx, &my) - d(&x, &y)).abs() < 1e-8 * d(&x, &y).max(1.0));
    }

    #[test]
    fn normal_flow_moves_between_parallel_horospheres(z in point(), r in 0.1..3.0f64, w in complex(1.0), s in -1.0..1.0f64) {
        let h = horosphere(z, r).unwrap();
        // a point of h: move any point along h's normal until it lands on h
        let x = from_upper_half_space(w, 1.0);
        let on = normal_flow(&x, &h, (-x.inner(&h.n)).ln());
        prop_assert!(h.residual(&on).abs() < 1e-9);
        let moved = normal_flow(&on, &h, s);
        prop_assert!(h.offset(s).residual(&moved).abs() < 1e-9);
        prop_assert!((hyperbolic_distance(&on, &moved).unwrap() - s.abs()).abs() < 1e-9);
    }

    #[test]
    fn fixed_point_maps_fix_their_ends(z in triple(), l in complex(2.0)) {
        prop_assume!(l.norm() > 0.1);
        let m = fixed_point_map(&z[0], &z[1], l);
        prop_assert!((m.det() - 1.0).norm() < 1e-9);
        prop_assert!(m.apply(&z[0]).chordal(&z[0]) < 1e-9);
        prop_assert!(m.apply(&z[1]).chordal(&z[1]) < 1e-9);
        prop_assert!((m.eigenvalue_at(&z[0]) - l).norm() < 1e-9 * l.norm().max(1.0));
    }

    #[test]
    fn lifted_eigenvalues_have_positive_real_part(a in 0.0..PI, b in 0.0..PI, r in 0.1..10.0f64, s in 0.1..10.0f64) {
        let (x, xt) = (C64::from_polar(r, a), C64::from_polar(s, b));
        let l = lift_eigenvalue(x, xt);
        prop_assert!(l.re > 0.0);
        prop_assert!((l * l - x / xt).norm() < 1e-12 * (x / xt).norm());
    }

    #[test]
    fn realized_patterns_close_and_redevelop(z in jittered(0.25)) {
        let x = cross_ratios_of(&z).unwrap();
        prop_assert!(verify_closure(&x).max_residual() <= 1e-10);
        let seed = z.disk.faces()[0].map(|v| z.z[v]);
        let back = develop(&z.disk, &x.x, 0, seed).unwrap();
        for (a, b) in z.z.iter().zip(&back.z) {
            prop_assert!(a.chordal(b) <= 1e-9);
        }
    }

    #[test]
    fn pattern_files_round_trip(z in jittered(0.25)) {
        let back = pattern_from_json(&pattern_to_json(&z)).unwrap();
        prop_assert_eq!(back.disk.faces(), z.disk.faces());
        for (a, b) in z.z.iter().zip(&back.z) {
            prop_assert!(a.chordal(b) <= 1e-12);
        }
        let x = cross_ratios_of(&z).unwrap();
        let y = cross_ratios_from_json(z.disk.clone(), &cross_ratios_to_json(&x)).unwrap();
        for (a, b) in x.x.iter().zip(&y.x) {
            prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn obj_files_round_trip(pts in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 3..20)) {
        let n = pts.len();
        let mesh = ExportMesh {
            comments: vec!["sample".into()],
            vertices: pts.iter().map(|&(a, b, c)| [a, b, c]).collect(),
            lines: vec![(0..n).collect()],
            triangles: (1..n - 1).map(|k| [0, k, k + 1]).collect(),
        };
        let back = ExportMesh::from_obj(&mesh.to_obj()).unwrap();
        prop_assert_eq!(&back.lines, &mesh.lines);
        prop_assert_eq!(&back.triangles, &mesh.triangles);
        for (a, b) in mesh.vertices.iter().zip(&back.vertices) {
            for k in 0..3 {
                prop_assert!((a[k] - b[k]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn toda_members_close(re in -0.14..0.14f64, im in -0.14..0.14f64) {
        let fam = TodaFamily::new(square_grid_toda(5, 5).unwrap(), DiagonalRule::Smaller).unwrap();
        let t = C64::new(re, im);
        let xt = fam.xt(t).unwrap();
        let sys = CrossRatioSystem { disk: fam.tri.disk.clone(), x: xt.clone() };
        prop_assert!(verify_closure(&sys).max_residual() <= 1e-10);
        let real = fam.xt(C64::new(re, 0.0)).unwrap();
        for (a, b) in real.iter().zip(&fam.x) {
            prop_assert!((a.arg() - b.arg()).abs() <= 1e-12);
        }
    }
}

#[test]
fn toda_files_round_trip() {
    let s = square_grid_toda(4, 3).unwrap();
    let back = toda_from_json(&toda_to_json(&s)).unwrap();
    assert_eq!(back.complex.faces(), s.complex.faces());
    for (a, b) in s.q.iter().zip(&back.q) {
        assert!((a - b).norm() <= 1e-12);
    }
    for (a, b) in s.z.iter().zip(&back.z) {
        assert!((a - b).norm() <= 1e-12);
    }
}
