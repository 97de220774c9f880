//! Worked examples whose invariants are known in closed form.

use charpoly::algebra::{parse_input, Poly};
use charpoly::blowup::{classify_center, CenterKind};
use charpoly::invariants::{analyze, Kappa};
use charpoly::polyhedron::{polyhedron, q, qi};
use charpoly::prepare::minimize;

fn doc(p: u32, vars: &[&str], exc: &[&str], tr: &[&str], h: &str) -> String {
    let list = |v: &[&str]| v.iter().map(|s| format!("\"{s}\"")).collect::<Vec<_>>().join(",");
    format!(
        "p = {p}\nmode = \"equichar\"\nvariables = [{}]\nexceptional = [{}]\ntranscendentals = [{}]\nh = \"{h}\"\n",
        list(vars),
        list(exc),
        list(tr)
    )
}

#[test]
fn omega_not_determined_by_polyhedron() {
    for (c, omega) in [("0", 5), ("1", 4)] {
        let h = format!("Z^3 + u1*u2*u3^3 + u1^5 + u2^5 + {c}*u3*u2*u1^3");
        let s = parse_input(&doc(3, &["u1", "u2", "u3"], &["u1", "u2"], &[], &h)).unwrap();
        let s = minimize(&s, 64).unwrap().state;
        let d = polyhedron(&s).unwrap();
        assert_eq!(d.vertices, vec![vec![qi(0), q(5, 3), qi(0)], vec![q(1, 3), q(1, 3), qi(1)], vec![q(5, 3), qi(0), qi(0)]]);
        let a = analyze(&s).unwrap();
        assert_eq!(a.core.delta, q(5, 3));
        assert_eq!(a.omega, omega, "c = {c}");
    }
}

#[test]
fn truncation_at_a_non_closed_point() {
    let h = "Z^2 + u1*u2*Z + l*u3^2 + u3*u1 + m*u1^2";
    let s = parse_input(&doc(2, &["u1", "u2", "u3"], &["u1", "u2"], &["l", "m"], h)).unwrap();
    let a = analyze(&s).unwrap();
    assert_eq!(a.core.h, vec![0, 0]);
    assert_eq!(a.core.i0, 2);
    assert_eq!(a.core.eps, qi(2));
    assert_eq!(a.omega, 1);
    assert_ne!(a.kappa1, Kappa::One);
    let y = s.localize(&[0, 2]).unwrap();
    let y = minimize(&y, 64).unwrap().state;
    let b = analyze(&y).unwrap();
    assert_eq!(b.core.i0, 1);
    assert_eq!(b.core.eps, qi(2));
    let r = b.record(&y);
    assert_eq!(r.tf, "l*U3^2");
    assert_eq!(b.omega, 2);
}

#[test]
fn quadric_with_max_larger_than_dir() {
    let h = "Z^2 + l2*u1^2 + l1*u2^2 + l1*l2*u3^2";
    let s = parse_input(&doc(2, &["u1", "u2", "u3"], &["u1"], &["l1", "l2"], h)).unwrap();
    let a = analyze(&s).unwrap();
    let r = a.record(&s);
    println!("{r:?}");
    assert_eq!(a.omega, 2);
    assert_eq!(r.tau_prime, Some(3));
    assert!(r.max_neq_dir);
    assert_eq!(r.j_basis.len(), 2);
}

#[test]
fn second_kind_center_through_a_curve() {
    for p in [2u32, 3] {
        let h = format!("Z^{p} + u3*u2^{p} + u1^{}", p + 1);
        let s = parse_input(&doc(p, &["u1", "u2", "u3"], &["u1"], &[], &h)).unwrap();
        let c = classify_center(&s, &[0, 1]).unwrap();
        assert_eq!(c.kind, CenterKind::SecondKind, "p = {p}");
        assert_eq!(c.eps_x, p + 1);
        assert_eq!(c.eps_y, Some(p));
        assert_eq!(c.delta_y, Some(qi(1)));
        let k = &s.field;
        assert_eq!(c.cl0_j, vec![Poly::monomial(k, vec![0, p], k.one())]);
    }
}
