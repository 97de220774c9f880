//! Small worked examples for each layer of the library.

mod common;

use std::collections::BTreeMap;

use charpoly::algebra::state::bar_name;
use charpoly::algebra::{monomial_expansion, parse_input, parse_poly, Derivation, FieldCtx, Fq, Poly};
use charpoly::blowup::{blowup_chart, classify_center, pc_cone, rational_chart_points, CenterKind, ChartChoice};
use charpoly::driver::{resolve_omega0, run_trace, BranchPolicy, NodeStatus, ScriptStep};
use charpoly::invariants::{analyze, derived_spaces, invariant_core, validate_conditions, Kappa};
use charpoly::polygon::{classify_monic, StarClass};
use charpoly::polyhedron::{compute_polyhedron, initial_form, polyhedron, q, qi, NewtonPolyhedron};
use charpoly::prepare::{dissolve, find_solvable_vertex, minimize, MinimizeStatus};
use charpoly::Error;
use common::*;

fn upper() -> Vec<String> {
    vec!["U1".into(), "U2".into(), "U3".into()]
}

fn arith(h: &str) -> charpoly::algebra::HypersurfaceState {
    parse_input(&format!("p = 2\nmode = \"arithmetic\"\nh = \"{h}\"\n")).unwrap()
}

const E1: &str = "Z^3 + u1*u2*u3^3 + u1^5 + u2^5 + 1*u3*u2*u1^3";
const NONCLOSED: &str = "Z^2 + u1*u2*Z + l*u3^2 + u3*u1 + m*u1^2";

// ---------------------------------------------------------------- algebra

#[test]
fn monomial_expansion_examples() {
    let k = FieldCtx::prime(3).unwrap();
    let f = parse_poly(&k, &names3(), "u1*u2*u3^3 + u1^5").unwrap();
    let exp = monomial_expansion(&k, &f, &[0, 1]).unwrap();
    let gens: Vec<Vec<u32>> = exp.iter().map(|(g, _)| g.clone()).collect();
    assert_eq!(gens, vec![vec![1, 1], vec![5, 0]]);
    assert_eq!(exp[0].1, Poly::monomial(&k, vec![0, 0, 3], k.one()));
    assert_eq!(exp[1].1, Poly::one(&k, 3));

    let f = parse_poly(&k, &names3(), "u1^3*u2^3").unwrap();
    let exp = monomial_expansion(&k, &f, &[0]).unwrap();
    assert_eq!(exp, vec![(vec![3], Poly::monomial(&k, vec![0, 3, 0], k.one()))]);

    for p in [2u32, 3] {
        let k = FieldCtx::prime(p).unwrap();
        let f = parse_poly(&k, &names3(), &format!("u3*u2^{p} + u1^{}", p + 1)).unwrap();
        let gens: Vec<Vec<u32>> = monomial_expansion(&k, &f, &[0, 1]).unwrap().into_iter().map(|(g, _)| g).collect();
        assert_eq!(gens, vec![vec![0, p], vec![p + 1, 0]]);
    }

    assert!(matches!(monomial_expansion(&k, &Poly::zero(3), &[0]), Err(Error::Domain(_))));
}

#[test]
fn pth_root_examples() {
    let f3 = FieldCtx::prime(3).unwrap();
    assert_eq!(f3.pth_root(&f3.one()), Some(f3.one()));
    let k = FieldCtx::rational_functions(Fq::prime(2).unwrap(), vec!["l".into()]).unwrap();
    let l = k.var(0);
    assert_eq!(k.pth_root(&l), None);
    assert_eq!(k.pth_root(&k.mul(&l, &l)), Some(l));
}

#[test]
fn derivation_examples() {
    let k = FieldCtx::prime(3).unwrap();
    let f = parse_poly(&k, &upper(), "U1*U2*U3^3 + 2*U3*U2*U1^3").unwrap();
    assert_eq!(f.derive(&k, Derivation::Plain(2)), parse_poly(&k, &upper(), "2*U2*U1^3").unwrap());

    let kl = FieldCtx::rational_functions(Fq::prime(2).unwrap(), vec!["l".into()]).unwrap();
    let g = parse_poly(&kl, &upper(), "l*U3^2").unwrap();
    assert_eq!(g.derive(&kl, Derivation::Const(0)), parse_poly(&kl, &upper(), "U3^2").unwrap());

    let k5 = FieldCtx::prime(5).unwrap();
    let u = Poly::monomial(&k5, vec![5, 0, 0], k5.one());
    assert!(u.derive(&k5, Derivation::Log(0)).is_zero());
}

#[test]
fn localization_examples() {
    let s = state3(2, &["u1", "u2"], &["l", "m"], NONCLOSED);
    let y = s.localize(&[0, 2]).unwrap();
    assert_eq!(y.n, 2);
    assert_eq!(y.e, 1);
    assert_eq!(y.field.names, vec!["l".to_string(), "m".to_string(), bar_name("u2")]);
    let k = &y.field;
    let f1 = y.f(1);
    assert_eq!(f1.len(), 1);
    assert_eq!(f1.coeff(k, &[1, 0]), k.var(2));

    assert_eq!(s.localize(&[0, 1, 2]).unwrap(), s);

    for p in [2u32, 3] {
        let s = state3(p, &["u1"], &[], &format!("Z^{p} + u3*u2^{p} + u1^{}", p + 1));
        let y = s.localize(&[0, 1]).unwrap();
        let k = &y.field;
        let fp = y.f(p as usize);
        assert_eq!(fp.coeff(k, &[0, p]), k.var(0));
        assert_eq!(fp.coeff(k, &[p + 1, 0]), k.one());
        assert_eq!(fp.len(), 2);
        let direct = polyhedron(&y).unwrap();
        let projected = compute_polyhedron(&s, &[0, 1]).unwrap();
        assert_eq!(direct.vertices, projected.vertices);
    }
}

// ---------------------------------------------------------------- polyhedron

#[test]
fn polyhedron_examples() {
    let s = state3(3, &["u1", "u2"], &[], E1);
    let d = polyhedron(&s).unwrap();
    assert!(!d.vertices.contains(&vec![qi(1), q(1, 3), q(1, 3)]));
    assert!(d.contains(&[qi(1), q(1, 3), q(1, 3)]));

    let z = state3(3, &[], &[], "Z^3");
    assert!(matches!(polyhedron(&z), Err(Error::EmptyPolyhedron)));
    assert!(NewtonPolyhedron::new(3, vec![]).is_empty());

    let inf = initial_form(&s, &[qi(1), qi(1), qi(1)]).unwrap();
    assert_eq!(inf.delta_alpha, q(5, 3));
    assert_eq!(inf.f[2].len(), 4);
    assert!(inf.f[0].is_zero() && inf.f[1].is_zero());

    // one vertex: only its terms survive for any weight
    let t = state3(2, &[], &[], "Z^2 + u1*u2 + u1^3*u2 + u1*u2^4");
    let inf = initial_form(&t, &[qi(2), qi(3), qi(1)]).unwrap();
    assert_eq!(inf.f[1], Poly::monomial(&t.field, vec![1, 1, 0], t.field.one()));

    let u = state3(2, &["u1", "u2"], &["l", "m"], NONCLOSED);
    let pr = compute_polyhedron(&u, &[0, 2]).unwrap();
    // (1/2, 1/2) is a generating point on the segment joining the two vertices
    assert!(pr.points.contains(&vec![q(1, 2), q(1, 2)]));
    assert_eq!(pr.vertices, vec![vec![qi(0), qi(1)], vec![qi(1), qi(0)]]);
    assert_eq!(pr.face(&[qi(1), qi(1)]).unwrap().len(), 2);
    assert_eq!(pr.delta().unwrap(), qi(1));
    let full = polyhedron(&u).unwrap();
    assert_eq!(full.project(&[0, 1, 2]).vertices, full.vertices);
}

// ---------------------------------------------------------------- prepare

#[test]
fn solvable_vertex_examples() {
    let s = parse_input(&doc(2, &["u1"], &[], &[], "Z^2 + u1^2")).unwrap();
    let w = find_solvable_vertex(&s).unwrap().unwrap();
    assert_eq!(w.vertex, vec![1]);
    assert_eq!(w.lambda, s.field.one());
    let t = dissolve(&s, &w).unwrap();
    assert!(t.is_trivial());
    assert!(matches!(polyhedron(&t), Err(Error::EmptyPolyhedron)));

    let a = arith("X^2 - 48");
    let w = find_solvable_vertex(&a).unwrap().unwrap();
    assert_eq!(w.vertex, vec![2]);
    let t = dissolve(&a, &w).unwrap();
    assert_eq!(t.h_string(), arith("X^2 + 24*X + 96").h_string());
    assert_eq!(polyhedron(&t).unwrap().vertices, vec![vec![q(5, 2)]]);

    let a = arith("X^2 - 20");
    let w = find_solvable_vertex(&a).unwrap().unwrap();
    assert_eq!(w.vertex, vec![1]);
    let t = dissolve(&a, &w).unwrap();
    assert_eq!(t.h_string(), arith("X^2 + 20*X + 80").h_string());
    assert_eq!(polyhedron(&t).unwrap().vertices, vec![vec![qi(2)]]);
    assert!(find_solvable_vertex(&t).unwrap().is_none());

    // F₁ = U₁U₂ has degree 2 > δ = 1: no vertex is solvable
    let u = state3(2, &["u1", "u2"], &["l", "m"], NONCLOSED);
    assert!(find_solvable_vertex(&u).unwrap().is_none());
}

#[test]
fn minimize_examples() {
    let s = state3(3, &["u1", "u2"], &[], E1);
    let m = minimize(&s, 64).unwrap();
    assert_eq!(m.status, MinimizeStatus::Minimal);
    assert!(m.steps.is_empty());

    for p in [2u32, 3, 5] {
        let s = parse_input(&doc(p, &["u1"], &[], &[], &format!("Z^{p} + u1^{p}"))).unwrap();
        let m = minimize(&s, 64).unwrap();
        assert_eq!(m.steps.len(), 1);
        assert!(m.state.is_trivial());
    }
}

// ---------------------------------------------------------------- invariants

#[test]
fn invariant_core_examples() {
    for c in ["0", "1"] {
        let s = state3(3, &["u1", "u2"], &[], &E1.replace("1*u3", &format!("{c}*u3")));
        let core = invariant_core(&s).unwrap();
        assert_eq!((core.m, core.delta.clone(), core.d.clone()), (3, q(5, 3), vec![qi(0), qi(0)]));
        assert_eq!(core.h, vec![0, 0]);
        assert_eq!(core.eps, qi(5));
        assert_eq!(core.i0, 3);
    }

    let u = state3(2, &["u1", "u2"], &["l", "m"], NONCLOSED);
    let core = invariant_core(&u).unwrap();
    assert_eq!((core.m, core.delta.clone(), core.eps.clone(), core.i0), (2, qi(1), qi(2), 2));

    let y = minimize(&u.localize(&[0, 2]).unwrap(), 64).unwrap().state;
    let core = invariant_core(&y).unwrap();
    assert_eq!((core.delta.clone(), core.d.clone(), core.eps.clone(), core.i0), (qi(1), vec![qi(0)], qi(2), 1));
    let g = core.g.unwrap();
    assert_eq!(g.b, vec![1, 0]);
    assert_eq!(g.unit, y.field.var(2));
}

#[test]
fn derived_space_examples() {
    let u = state3(2, &["u1", "u2"], &["l", "m"], NONCLOSED);
    let y = minimize(&u.localize(&[0, 2]).unwrap(), 64).unwrap().state;
    let core = invariant_core(&y).unwrap();
    let sp = derived_spaces(&y, &core).unwrap();
    assert!(sp.t_applied);
    let k = &y.field;
    assert_eq!(sp.tf, Poly::monomial(k, vec![0, 2], k.var(0)));
    let a = analyze(&y).unwrap();
    assert_eq!(a.omega, 2);
    assert_eq!(a.kappa1, Kappa::One);

    let s = state3(3, &["u1", "u2"], &[], E1);
    let core = invariant_core(&s).unwrap();
    let sp = derived_spaces(&s, &core).unwrap();
    assert!(!sp.t_applied);
    assert_eq!(sp.v.len(), 1);
    let k = &s.field;
    assert_eq!(sp.v[0].terms.keys().cloned().collect::<Vec<_>>(), vec![vec![3, 1, 0]]);
    assert!(!k.is_zero(sp.v[0].terms.values().next().unwrap()));

    // F ∈ k[U^p], i₀ = p, not a p-th power: V = 0 and J ≠ 0
    let t = parse_input(&doc(3, &["u1", "u2", "u3"], &[], &["t"], "Z^3 + t*u1^3 + u2^6")).unwrap();
    let core = invariant_core(&t).unwrap();
    assert_eq!(core.i0, 3);
    let sp = derived_spaces(&t, &core).unwrap();
    assert!(sp.v.is_empty());
    assert_eq!(sp.j, vec![Poly::monomial(&t.field, vec![3, 0, 0], t.field.one())]);
}

#[test]
fn omega_examples() {
    for (c, omega) in [("0", 5u32), ("1", 4)] {
        let s = state3(3, &["u1", "u2"], &[], &E1.replace("1*u3", &format!("{c}*u3")));
        let a = analyze(&s).unwrap();
        assert_eq!(a.omega, omega);
        assert_ne!(a.kappa1, Kappa::One);
    }
}

#[test]
fn directrix_of_a_monomial() {
    for p in [2u32, 3] {
        let s = state3(p, &[], &[], &format!("Z^{p} + u1^{}", p + 1));
        let a = analyze(&s).unwrap();
        let r = a.record(&s);
        assert_eq!(r.directrix, vec!["U1".to_string()]);
        assert_eq!(r.tau_prime, Some(1));
    }
}

/// Projection numbers 2, 4 and 3 for the three monic shapes in E = div(u₁).
#[test]
fn projection_number_table() {
    let cases = [
        ("Z^2 + l*u1^2*u3^2", 2u8),
        ("Z^2 + l*u1^4 + u1^2*u3^5", 4),
        ("Z^2 + l*u1^2*u3^3", 3),
    ];
    for (h, kappa) in cases {
        let s = state3(2, &["u1"], &["l"], h);
        let s = minimize(&s, 64).unwrap().state;
        let a = analyze(&s).unwrap();
        assert!(a.omega > 0, "{h}");
        assert_eq!(a.kappa.kappa, Kappa::Exact(kappa), "{h}");
        assert!(a.kappa.exhaustive, "{h}");
    }
}

#[test]
fn monic_classification_examples() {
    let star = state3(2, &["u1"], &["l"], "Z^2 + l*u1^2*u3^2");
    assert_eq!(classify_monic(&star).unwrap(), StarClass::Star1);
    let double = state3(2, &["u1"], &["l"], "Z^2 + l*u1^2*u3^3");
    assert_eq!(classify_monic(&double).unwrap(), StarClass::DoubleStar);
    let t = state3(2, &["u1"], &["l"], "Z^2 + l*u1^4 + u1^2*u3^5");
    assert_eq!(classify_monic(&t).unwrap(), StarClass::TstarI);
}

#[test]
fn condition_examples() {
    for p in [2u32, 3] {
        let s = state3(p, &["u1"], &[], &format!("Z^{p} + u3*u2^{p} + u1^{}", p + 1));
        let r = validate_conditions(&s).unwrap();
        assert!(r.g && r.e, "p = {p}: {r:?}");
    }
    let bad = parse_input(&doc(2, &["u1", "u2", "u3"], &[], &[], "Z^2 + u3^2")).unwrap();
    assert!(!validate_conditions(&bad).unwrap().e);
    let u = state3(2, &["u1", "u2"], &["l", "m"], NONCLOSED);
    assert!(validate_conditions(&u).unwrap().initform);
}

// ---------------------------------------------------------------- blowup

#[test]
fn center_classification_examples() {
    let s = state3(3, &["u1", "u2"], &[], E1);
    assert_eq!(classify_center(&s, &[0, 1, 2]).unwrap().kind, CenterKind::FirstKind);

    let m = state3(2, &["u1", "u2"], &[], "Z^2 + u1^3*u2^3");
    let c = classify_center(&m, &[0]).unwrap();
    assert_eq!(c.delta_y, Some(q(3, 2)));
    assert_eq!(c.kind, CenterKind::FirstKind);
    assert_eq!((c.eps_x, c.eps_y), (0, Some(0)));
}

#[test]
fn second_kind_chart_drops_the_invariant() {
    for p in [2u32, 3] {
        let s = state3(p, &["u1"], &[], &format!("Z^{p} + u3*u2^{p} + u1^{}", p + 1));
        let out = blowup_chart(&s, &[0, 1], &ChartChoice::origin(1)).unwrap();
        assert_eq!(out.center.kind, CenterKind::SecondKind);
        assert_eq!(out.monotone(), Some(true));
        assert!(out.iota_after.unwrap() < out.iota_before, "p = {p}");
    }
}

#[test]
fn cone_examples() {
    let names = upper();
    for p in [2u32, 3] {
        let s = state3(p, &["u1"], &[], &format!("Z^{p} + u3*u2^{p} + u1^{}", p + 1));
        let a = analyze(&s).unwrap();
        let c = classify_center(&s, &[0, 1]).unwrap();
        let pc = pc_cone(&s, &a, &c).unwrap().unwrap();
        assert_eq!(pc.forms(&names[..2]), vec!["U2".to_string()]);
    }

    let s = state3(2, &["u1"], &["l"], "Z^2 + l*u1^2*u3^2");
    let a = analyze(&s).unwrap();
    assert_eq!(a.record(&s).directrix, vec!["U3".to_string()]);
    let c = classify_center(&s, &[0, 2]).unwrap();
    assert_eq!(c.kind, CenterKind::FirstKind);
    let pc = pc_cone(&s, &a, &c).unwrap().unwrap();
    assert_eq!(pc.forms(&["U1".to_string(), "U3".to_string()]), vec!["U3".to_string()]);
}

/// Blowing up the closed point of the c = 1 state: ι never increases on an
/// F₃-rational point, and drops strictly off the cone.
#[test]
fn closed_point_rational_chart_sweep() {
    let s = state3(3, &["u1", "u2"], &[], E1);
    let charts = rational_chart_points(&s.field, &[0, 1, 2]).unwrap();
    assert_eq!(charts.len(), 9 + 3 + 1);
    let mut computed = 0;
    for ch in charts {
        let out = blowup_chart(&s, &[0, 1, 2], &ch).unwrap();
        if out.iota_after.is_some() {
            computed += 1;
        }
        assert_ne!(out.monotone(), Some(false), "chart {ch:?}");
        assert_ne!(out.h_check, Some(false), "chart {ch:?}");
    }
    assert_eq!(computed, 13);
}

// ---------------------------------------------------------------- driver

#[test]
fn empty_script_gives_empty_trace() {
    let s = state3(3, &["u1", "u2"], &[], E1);
    assert!(run_trace(&s, &[], true).unwrap().is_empty());
}

#[test]
fn scripted_second_kind_blowup() {
    for p in [2u32, 3] {
        let s = state3(p, &["u1"], &[], &format!("Z^{p} + u3*u2^{p} + u1^{}", p + 1));
        let step = ScriptStep {
            center: vec!["u1".into(), "u2".into()],
            chart: "u2".into(),
            translate: BTreeMap::new(),
            assertions: vec!["monotone".into(), "H".into(), "permissible".into()],
        };
        let trace = run_trace(&s, &[step], true).unwrap();
        assert_eq!(trace.len(), 1);
        let t = &trace[0];
        assert!(!t.failed(), "{t:?}");
        assert_eq!(t.kind.as_deref(), Some("second_kind"));
        assert_eq!(t.iota_before.unwrap()[..2], [p, p]);
        assert!(t.iota_after.unwrap() < [p, p, 2]);
    }
}

#[test]
fn one_step_omega_zero_resolution() {
    let s = state3(2, &["u1", "u2"], &[], "Z^2 + u1^2*u2");
    let tree = resolve_omega0(&s, BranchPolicy::AllOriginCharts, 16).unwrap();
    assert!(tree.certified());
    assert_eq!(tree.max_depth(), 1);
    assert_eq!(tree.nodes[0].center, Some(vec![0]));
    assert_eq!(tree.nodes[0].delta, Some(q(3, 2)));
    let child = &tree.nodes[tree.nodes[0].children[0]];
    assert_eq!(child.status, NodeStatus::MultiplicityDropped);
}

#[test]
fn resolve_rejects_positive_omega() {
    let s = state3(3, &["u1", "u2"], &[], E1);
    assert!(resolve_omega0(&s, BranchPolicy::AllOriginCharts, 16).is_err());
}
