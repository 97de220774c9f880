//! Projected polygons: a hand-computed instance, preparation round trips and
//! structural properties on random monic instances.

mod common;

use charpoly::algebra::FieldCtx;
use charpoly::invariants::analyze;
use charpoly::polygon::{
    classify_monic, gamma, joyeux_phi, project_polygon, projection_for, translate_u3, two_prepare, valuation_b,
    PolygonMode, PrepareStatus, StarClass, VertexStatus,
};
use charpoly::polyhedron::{dot, polyhedron, q, qi, Q};
use charpoly::blowup::classify_center;
use charpoly::prepare::minimize;
use common::*;
use rand::Rng;

const HAND: &str = "Z^2 + u1^3*u3^2 + u1^6*u2^3";

#[test]
fn hand_computed_star_polygon() {
    let s = state3(2, &["u1"], &[], HAND);
    assert!(minimize(&s, 8).unwrap().steps.is_empty());
    assert_eq!(classify_monic(&s).unwrap(), StarClass::Star1);
    let poly = project_polygon(&s, PolygonMode::Star).unwrap();
    assert_eq!(poly.apex, vec![q(3, 2), qi(0), qi(1)]);
    // (3, 3/2, 0) ↦ (3 − 3/2, 3/2 − 0)
    assert_eq!(poly.vertex_points(), vec![(q(3, 2), q(3, 2))]);
    assert_eq!(poly.a, [Some(q(3, 2)), Some(q(3, 2))]);
    assert_eq!(poly.b, Some(qi(3)));
    assert_eq!(poly.c, Some(q(3, 2)));
    assert_eq!(poly.beta, Some(q(3, 2)));
    assert_eq!(gamma(&poly).unwrap(), 2);
    assert!(poly.vertices[0].prepared());
    assert_eq!(valuation_b(&s, 2, &poly.apex).unwrap(), poly.b);
    // A₁ ≥ 1 and the curve u1 = u3 = 0 is permissible
    assert!(classify_center(&s, &[0, 2]).unwrap().kind.is_permissible());
}

#[test]
fn hidden_vertices_are_dissolved_back() {
    let s = state3(2, &["u1"], &[], HAND);
    let k = s.field.clone();
    let want = project_polygon(&s, PolygonMode::Star).unwrap().vertex_points();
    for y in [[1u32, 1], [2, 0], [1, 2], [0, 2]] {
        let hidden = translate_u3(&s, y, &k.one()).unwrap();
        let before = project_polygon(&hidden, PolygonMode::Star).unwrap();
        let dissolvable: Vec<&VertexStatus> =
            before.vertices.iter().map(|v| &v.status).filter(|st| matches!(st, VertexStatus::Dissolvable { .. })).collect();
        assert_eq!(dissolvable.len(), 1, "exponent {y:?}: {:?}", before.vertex_points());
        let out = two_prepare(&hidden, PolygonMode::Star, 8).unwrap();
        assert_eq!(out.status, PrepareStatus::Prepared);
        assert_eq!(out.steps.len(), 1);
        assert_eq!(out.steps[0].exponent, y);
        assert_eq!(out.polygon.vertex_points(), want, "exponent {y:?}: {} -> {}", hidden.h_string(), out.state.h_string());
        assert_eq!(out.state.h_string(), s.h_string());
    }
}

#[test]
fn preparation_is_idempotent() {
    let s = state3(2, &["u1"], &[], HAND);
    let out = two_prepare(&s, PolygonMode::Star, 8).unwrap();
    assert!(out.steps.is_empty());
    let again = two_prepare(&out.state, PolygonMode::Star, 8).unwrap();
    assert!(again.steps.is_empty());
    assert_eq!(again.polygon.vertex_points(), out.polygon.vertex_points());
}

#[test]
fn gamma_in_degenerate_positions() {
    // a vertex on the abscissa: β = 0
    let s = state3(2, &["u1"], &[], "Z^2 + u1*u3^2 + u1^5");
    let poly = project_polygon(&s, PolygonMode::Star).unwrap();
    assert_eq!(poly.class, StarClass::Star1);
    assert_eq!(poly.vertex_points(), vec![(qi(2), qi(0))]);
    assert_eq!(poly.beta, Some(qi(0)));
    assert_eq!(gamma(&poly).unwrap(), 0);

    // a single vertex in E = div(u1 u2): B = A₁ + A₂, so C = 0
    let s = state3(2, &["u1", "u2"], &[], "Z^2 + u1*u2*u3^2 + u1^5*u2^3");
    let poly = project_polygon(&s, PolygonMode::Star).unwrap();
    assert_eq!(poly.class, StarClass::Star2);
    assert_eq!(poly.vertex_points(), vec![(qi(2), qi(1))]);
    assert_eq!(poly.c, Some(qi(0)));
    assert_eq!(gamma(&poly).unwrap(), 1);
}

#[test]
fn mode_mismatch_is_rejected() {
    let s = state3(2, &["u1"], &[], HAND);
    assert!(project_polygon(&s, PolygonMode::DoubleStar).is_err());
    assert!(two_prepare(&s, PolygonMode::MaxContact, 4).is_err());
}

#[test]
fn joyeux_preconditions() {
    let k = FieldCtx::prime(5).unwrap();
    assert!(joyeux_phi(&k, [1, 1], 3, &k.zero()).is_err());
    assert!(joyeux_phi(&k, [1, 1], 5, &k.one()).is_err());
    assert!(joyeux_phi(&k, [1, 2], 3, &k.one()).is_err());
    let phi = joyeux_phi(&k, [2, 1], 2, &k.from_i64(3)).unwrap();
    assert!(phi.is_homogeneous());
    assert_eq!(phi.degree(), Some(2 + 1 + 2));
}

/// The face of Δ cut out by each vertex weight contains the apex and the
/// preimages of that vertex, and nothing else.
#[test]
fn vertex_faces_contain_the_apex() {
    let mut r = rng(21);
    let mut checked = 0;
    for _ in 0..600 {
        let kind = r.gen_range(1..=3);
        let Some(s) = random_star(&mut r, kind) else { continue };
        let Ok(poly) = project_polygon(&s, PolygonMode::Star) else { continue };
        let d = polyhedron(&s).unwrap();
        let a = analyze(&s).unwrap();
        let pr = projection_for(&s, &a, PolygonMode::Star).unwrap();
        for v in &poly.vertices {
            let Some(w) = &v.weight else { continue };
            let m: Q = d.vertices.iter().map(|x| dot(w, x)).min().unwrap();
            let face: Vec<&Vec<Q>> = d.vertices.iter().filter(|x| dot(w, x) == m).collect();
            assert!(face.contains(&&poly.apex), "{}", s.h_string());
            for x in &face {
                assert!(*x == &poly.apex || pr.map(x) == Some(v.y.clone()), "{}", s.h_string());
            }
            for x in &v.preimages {
                assert!(face.contains(&x));
            }
            checked += 1;
        }
    }
    assert!(checked >= 100, "only {checked} weighted vertices");
}

/// Preparing a state and a u₃-scrambled copy gives the same polygon.
#[test]
fn prepared_polygon_is_independent_of_the_start() {
    let mut r = rng(22);
    let mut checked = 0;
    for _ in 0..600 {
        if checked >= 60 {
            break;
        }
        let kind = r.gen_range(1..=3);
        let Some(s) = random_star(&mut r, kind) else { continue };
        let Ok(a) = two_prepare(&s, PolygonMode::Star, 16) else { continue };
        if a.status != PrepareStatus::Prepared || a.polygon.is_empty() {
            continue;
        }
        let k = s.field.clone();
        let y = [r.gen_range(0..4), r.gen_range(0..3)];
        let c = k.from_fq(r.gen_range(1..k.fq.size()));
        let Ok(t) = translate_u3(&a.state, y, &c) else { continue };
        let Ok(StarClass::Star1 | StarClass::Star2 | StarClass::Star3) = classify_monic(&t) else { continue };
        let Ok(b) = two_prepare(&t, PolygonMode::Star, 16) else { continue };
        if b.status != PrepareStatus::Prepared {
            continue;
        }
        assert_eq!(a.polygon.class, b.polygon.class, "{} vs {}", a.state.h_string(), t.h_string());
        assert_eq!(
            a.polygon.reference_points(),
            b.polygon.reference_points(),
            "{} scrambled by {y:?} to {}",
            a.state.h_string(),
            t.h_string()
        );
        checked += 1;
    }
    assert!(checked >= 60, "only {checked} comparisons");
}

/// In case (*3) the leftmost vertex of Δ₂ lies in Δ₂⁺, so A₁ is the same on both.
#[test]
fn star3_leftmost_vertex_is_in_the_plus_region() {
    let mut r = rng(23);
    let mut checked = 0;
    for _ in 0..800 {
        let Some(s) = random_star(&mut r, 3) else { continue };
        let Ok(poly) = project_polygon(&s, PolygonMode::Star) else { continue };
        if poly.class != StarClass::Star3 || poly.is_empty() {
            continue;
        }
        let all = poly.vertex_points();
        let plus = poly.plus_points();
        let min_all = all.iter().map(|y| y.0.clone()).min();
        let min_plus = plus.iter().map(|y| y.0.clone()).min();
        assert_eq!(min_all, min_plus, "{}", s.h_string());
        checked += 1;
    }
    assert!(checked >= 30, "only {checked} star3 instances");
}
