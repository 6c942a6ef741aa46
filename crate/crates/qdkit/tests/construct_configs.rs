use qdkit::construct::{
    arrange, build_bounded_config, build_unbounded_config, count_complement_components, extreme_map, raster_face_count, target_count,
    theorem_bound, ConstructionPlan, ExtremeShape, Piece, PlanKind, RASTER_RESOLUTION,
};
use qdkit::curvegeo::{census, Family};
use qdkit::planecurve::Similarity;
use qdkit::C64;

fn faces(plan: &ConstructionPlan) -> usize {
    let rep = count_complement_components(plan).unwrap();
    assert_eq!(rep.euler_faces, rep.face_count as i64);
    let raster = raster_face_count(&plan.pieces, RASTER_RESOLUTION).unwrap();
    assert_eq!(raster.components, rep.face_count, "raster oracle disagrees");
    rep.face_count
}

#[test]
fn cardioid_in_a_disk_gives_two_faces() {
    let plan = build_unbounded_config(&[2], None).unwrap();
    assert_eq!(plan.kind, PlanKind::UqdFinite);
    assert_eq!(faces(&plan), 2);
}

#[test]
fn ellipse_with_two_disks_gives_four_faces() {
    let plan = build_unbounded_config(&[1, 1, 1], Some(1)).unwrap();
    assert_eq!(plan.kind, PlanKind::UqdInfinity);
    assert_eq!(faces(&plan), 4);
}

#[test]
fn cardioid_disk_and_inscribed_circle_give_four_faces() {
    let plan = build_unbounded_config(&[2, 1], None).unwrap();
    assert_eq!(plan.target, 4);
    assert_eq!(faces(&plan), 4);
    assert_eq!(plan.stages.len(), 2);
}

#[test]
fn two_cardioids_give_three_faces() {
    assert_eq!(faces(&build_bounded_config(&[2, 2]).unwrap()), 3);
}

#[test]
fn cardioid_and_disk_give_two_faces() {
    assert_eq!(faces(&build_bounded_config(&[2, 1]).unwrap()), 2);
}

#[test]
fn extreme_cubic_gives_two_faces() {
    assert_eq!(faces(&build_bounded_config(&[3]).unwrap()), 2);
}

#[test]
fn single_cardioid_gives_one_face() {
    let shape = ExtremeShape::new(Family::S, 2).unwrap();
    let piece = Piece::from_shape(&shape, Similarity::default(), 0);
    assert_eq!(arrange(&[piece]).unwrap().faces.len(), 1);
}

#[test]
fn two_disjoint_disks_give_one_face() {
    let pieces = [Piece::disk(C64::new(-1.0, 0.0), 0.5, 0), Piece::disk(C64::new(1.0, 0.0), 0.5, 0)];
    assert_eq!(arrange(&pieces).unwrap().faces.len(), 1);
}

#[test]
fn degree_six_extreme_maps_are_extreme() {
    for fam in [Family::S, Family::Sigma] {
        let map = extreme_map(fam, 6).unwrap();
        let (cen, _) = census(&map, 2048).unwrap();
        let want = match fam {
            Family::S => (5, 4),
            Family::Sigma => (7, 4),
        };
        assert_eq!((cen.cusp_count, cen.double_point_count), want);
        assert!(cen.is_extreme);
    }
}

#[test]
fn small_orders_are_rejected() {
    assert!(build_bounded_config(&[2]).is_err());
    assert!(build_bounded_config(&[1, 1]).is_err());
    assert!(build_unbounded_config(&[1], None).is_err());
    assert!(build_unbounded_config(&[2, 1], Some(3)).is_err());
}

#[test]
fn targets_never_exceed_bounds() {
    for d in 2..=8 {
        for p in qdkit::construct::partitions(d) {
            for kind in [PlanKind::UqdFinite, PlanKind::UqdInfinity, PlanKind::Bqd] {
                if kind == PlanKind::Bqd && d < 3 {
                    continue;
                }
                assert!(target_count(kind, &p) <= theorem_bound(kind, &p), "{kind:?} {p:?}");
            }
        }
    }
}

#[test]
fn plan_json_has_pieces_and_stages() {
    let plan = build_unbounded_config(&[3, 1], None).unwrap();
    let v = plan.to_json();
    assert_eq!(v["kind"], "UQD-finite-nodes");
    assert_eq!(v["partition"], serde_json::json!([3, 1]));
    assert!(!v["stages"].as_array().unwrap().is_empty());
    let svg = plan.to_svg("{}", None);
    assert!(svg.contains("<g id=\"stage-0\""));
}
