use qdkit::curvegeo::{census, Family};
use qdkit::inscribe::*;
use qdkit::planecurve::Classification;
use qdkit::suffridge::known_suffridge;

#[test]
fn sigma4_bounded_faces_are_deltoid_like() {
    let map = known_suffridge(Family::Sigma, 4).unwrap();
    let (cen, _) = census(&map, 1024).unwrap();
    let faces: Vec<_> = cen.per_component.iter().filter(|c| c.bounded).collect();
    assert_eq!(faces.len(), 3);
    for f in faces {
        assert_eq!(face_curve(&map, f).unwrap().classification, Classification::DeltoidLike);
    }
}

#[test]
fn cardioid_in_sigma4_face() {
    let map = known_suffridge(Family::Sigma, 4).unwrap();
    let (cen, _) = census(&map, 1024).unwrap();
    let face = cen.per_component.iter().find(|c| c.bounded).unwrap();
    let t = face_curve(&map, face).unwrap();
    let res = inscribe_cardioid(&t, &genuine_cardioid()).unwrap();
    assert!(res.total_contacts() >= 4, "{:?}", res.contact_count_per_side);
    assert!(res.penetration <= PENETRATION_TOL * res.scale);
    assert!(res.tangency_angle_gaps.iter().all(|g| *g <= TANGENCY_TOL));
}

#[test]
fn circle_in_s5_face() {
    let map = known_suffridge(Family::S, 5).unwrap();
    let (cen, _) = census(&map, 1024).unwrap();
    for face in cen.per_component.iter().filter(|c| c.bounded) {
        let t = face_curve(&map, face).unwrap();
        assert_eq!(t.classification, Classification::DeltoidLike);
        let res = inscribe_circle(&t).unwrap();
        assert!(res.contact_count_per_side.iter().all(|c| *c >= 1), "{:?}", res.contact_count_per_side);
        assert!(res.penetration <= PENETRATION_TOL * res.scale);
    }
}

#[test]
fn extreme_s_outer_face_is_cardioid_like() {
    let map = known_suffridge(Family::S, 4).unwrap();
    let (cen, _) = census(&map, 1024).unwrap();
    let outer = cen.per_component.iter().find(|c| !c.bounded).unwrap();
    assert_eq!(face_curve(&map, outer).unwrap().classification, Classification::CardioidLike);
}

#[test]
fn extreme_outer_boundary_as_template() {
    let map = known_suffridge(Family::S, 3).unwrap();
    let (cen, _) = census(&map, 1024).unwrap();
    let outer = cen.per_component.iter().find(|c| !c.bounded).unwrap();
    let tpl = face_curve(&map, outer).unwrap();
    let res = inscribe_cardioid(&genuine_deltoid(), &tpl).unwrap();
    assert!(res.total_contacts() >= 4, "{:?}", res.contact_count_per_side);
    assert!(res.penetration <= PENETRATION_TOL * res.scale);
}
