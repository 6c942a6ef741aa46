use proptest::prelude::*;
use qdkit::construct::{arrange, raster_face_count, Piece};
use qdkit::curvegeo::{conformal_curvature, find_cusps, Family};
use qdkit::inscribe::{genuine_deltoid, inscribe_circle};
use qdkit::lenssolve::{check_sharp_bound, random_hyperbolic_map, solve_lens, verify_lefschetz, FpLocation, RESIDUAL_TOL};
use qdkit::planecurve::Similarity;
use qdkit::quadcheck::{area_moment, verify_quadrature_identity};
use qdkit::ratfun::{all_roots, dualize, is_self_dual, ComplexPoly, RationalMap};
use qdkit::suffridge::seed_from_cusp_angles;
use qdkit::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b))
}

fn poly(max_deg: usize) -> impl Strategy<Value = ComplexPoly> {
    prop::collection::vec(complex(), 2..=max_deg + 1).prop_map(|mut c| {
        let last = c.len() - 1;
        let bump = if c[last].re >= 0.0 { 0.5 } else { -0.5 };
        c[last] += C64::new(bump, 0.0);
        ComplexPoly::new(c)
    })
}

/// Greedy matching distance between two root multisets.
fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("same length");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_match_those_of_the_monic_rescaling(p in poly(10)) {
        let monic = p.scale(p.leading().inv());
        let a = all_roots(&p, 1e-8).unwrap();
        let b = all_roots(&monic, 1e-8).unwrap();
        prop_assert_eq!(a.len(), p.degree());
        let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(multiset_distance(&a, &b) <= 1e-7 * scale);
    }

    #[test]
    fn roots_reconstruct_the_polynomial(roots in prop::collection::vec(complex(), 1..=8)) {
        let p = ComplexPoly::from_roots(&roots);
        let found = all_roots(&p, 1e-8).unwrap();
        prop_assert!(multiset_distance(&roots, &found) <= 1e-5);
    }

    #[test]
    fn dualize_is_an_involution(p in poly(8), extra in 0usize..3) {
        let k = p.degree() + extra;
        let back = dualize(&dualize(&p, k).unwrap(), k).unwrap();
        prop_assert!(back.max_coeff_diff(&p) <= 1e-14);
    }

    #[test]
    fn starred_derivatives_are_self_dual(d in 3usize..=6, thetas in prop::collection::vec(0.0f64..2.0 * PI, 5)) {
        let map = seed_from_cusp_angles(Family::S, d, &thetas[..d - 1]).unwrap();
        let fprime = map.f.derivative().as_poly().unwrap();
        prop_assert!(is_self_dual(&fprime, d - 1, 1e-12).unwrap());
    }

    #[test]
    fn starred_curvature_is_constant(d in 2usize..=6, thetas in prop::collection::vec(0.0f64..2.0 * PI, 5), t in 0.0f64..2.0 * PI) {
        let map = seed_from_cusp_angles(Family::S, d, &thetas[..d - 1]).unwrap();
        let near_cusp = find_cusps(&map).0.iter().any(|c| {
            let dt = (c.t - t).rem_euclid(2.0 * PI);
            dt.min(2.0 * PI - dt) < 1e-3
        });
        prop_assume!(!near_cusp);
        let k = conformal_curvature(&map, t).unwrap();
        prop_assert!((k - (1.0 + d as f64) / 2.0).abs() <= 1e-8);
    }

    #[test]
    fn quadrature_identity_holds_for_univalent_polynomials(coeffs in prop::collection::vec(complex(), 1..=4)) {
        // Σ k|a_k| < 1 keeps z + Σ a_k z^k univalent on the disk.
        let total: f64 = coeffs.iter().enumerate().map(|(i, c)| (i + 2) as f64 * c.norm()).sum();
        let shrink = 0.9 / total.max(0.9);
        let mut c = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        c.extend(coeffs.iter().map(|a| a * shrink));
        let f = ComplexPoly::new(c);
        for m in verify_quadrature_identity(&f, 5).unwrap() {
            prop_assert!(m.residual <= 1e-10 * m.lhs.norm().max(1.0), "k = {}: {}", m.k, m.residual);
        }
        let area: f64 = PI * f.coeffs().iter().enumerate().map(|(m, a)| m as f64 * a.norm_sqr()).sum::<f64>();
        prop_assert!((area_moment(&f, 0) - C64::new(area, 0.0)).norm() <= 1e-12 * area.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lefschetz_and_bound_hold_for_random_maps(seed in any::<u64>(), d in 2usize..=6) {
        let r = random_hyperbolic_map(&mut ChaCha8Rng::seed_from_u64(seed), d);
        let rep = solve_lens(&r, RESIDUAL_TOL).unwrap();
        prop_assert_eq!(verify_lefschetz(&rep).unwrap(), 0);
        prop_assert!(check_sharp_bound(&rep));
        for p in &rep.points {
            if let FpLocation::Finite(z) = p.location {
                prop_assert!(p.residual <= 1e-8 * z.norm_sqr().max(1.0));
            }
        }
    }

    #[test]
    fn fixed_points_rotate_with_the_map(seed in any::<u64>(), d in 2usize..=4, theta in 0.0f64..2.0 * PI) {
        let r = random_hyperbolic_map(&mut ChaCha8Rng::seed_from_u64(seed), d);
        let rot: RationalMap = r.conjugate_rotation(theta).unwrap();
        let a = solve_lens(&r, RESIDUAL_TOL).unwrap();
        let b = solve_lens(&rot, RESIDUAL_TOL).unwrap();
        prop_assert_eq!(a.fhat, b.fhat);
        prop_assert_eq!(a.ahat, b.ahat);
        let u = C64::from_polar(1.0, theta);
        let pa: Vec<C64> = a.finite_points().map(|(z, _)| z * u).collect();
        let pb: Vec<C64> = b.finite_points().map(|(z, _)| z).collect();
        prop_assert_eq!(pa.len(), pb.len());
        let scale = pa.iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(multiset_distance(&pa, &pb) <= 1e-7 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn inscribed_circle_follows_similarities(rot in 0.0f64..2.0 * PI, scale in 0.2f64..5.0, tx in -3.0f64..3.0, ty in -3.0f64..3.0) {
        let sim = Similarity::new(rot, scale, C64::new(tx, ty)).unwrap();
        let res = inscribe_circle(&genuine_deltoid().transformed(&sim)).unwrap();
        prop_assert!((res.transform.scale - 0.5 * scale).abs() <= 1e-8 * scale);
        prop_assert!((res.transform.translation - C64::new(tx, ty)).norm() <= 1e-8 * scale);
        prop_assert!(res.penetration <= 1e-8 * scale);
        prop_assert!(res.contact_count_per_side.iter().all(|&c| c >= 1));
    }

    #[test]
    fn disjoint_disks_leave_one_face(centers in prop::collection::vec((0usize..4, 0usize..4, 0.05f64..0.35), 1..6)) {
        let mut cells: Vec<(usize, usize)> = Vec::new();
        let mut pieces = Vec::new();
        for (i, j, r) in centers {
            if cells.contains(&(i, j)) {
                continue;
            }
            cells.push((i, j));
            pieces.push(Piece::disk(C64::new(i as f64, j as f64), r, 0));
        }
        let arr = arrange(&pieces).unwrap();
        prop_assert_eq!(arr.faces.len(), 1);
        prop_assert_eq!(raster_face_count(&pieces, 1024).unwrap().components, 1);
    }

    #[test]
    fn tangent_disk_rings_enclose_one_face(n in 3usize..=7, rot in 0.0f64..2.0 * PI, radius in 0.5f64..2.0) {
        let r = radius * (PI / n as f64).sin();
        let pieces: Vec<Piece> = (0..n)
            .map(|k| Piece::disk(C64::from_polar(radius, rot + 2.0 * PI * k as f64 / n as f64), r, 0))
            .collect();
        let arr = arrange(&pieces).unwrap();
        prop_assert_eq!(arr.contacts.len(), n);
        prop_assert_eq!(arr.faces.len(), 2);
        prop_assert_eq!(raster_face_count(&pieces, 2048).unwrap().components, 2);
    }
}
