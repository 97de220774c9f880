//! Projected plane polygons of a three-dimensional characteristic polyhedron:
//! the maximal-contact projection along x₁, the monic projections along x₃
//! (conditions (*1), (*2), (*3) and (**)), their secondary invariants
//! A_j, B, C, β, β₂, α₂, γ, the dissolution of 2-solvable and unprepared
//! vertices by u₃-translations, and the forms Φ_i of the monic expansion.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::poly::binom_mod_p;
use crate::algebra::{Derivation, Elem, FieldCtx, HypersurfaceState, Poly};
use crate::error::{domain, Error, Result};
use crate::invariants::linalg::{in_span, unit};
use crate::invariants::{analyze, Analysis, Kappa};
use crate::polyhedron::{fmt_q, initial_form, polyhedron, qi, NewtonPolyhedron, Q};
use crate::prepare::{minimize, MinimizeStatus};

pub const DEFAULT_PREPARE_BUDGET: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PolygonMode {
    MaxContact,
    Star,
    DoubleStar,
}

impl PolygonMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "maxcontact" | "max_contact" => Ok(PolygonMode::MaxContact),
            "star" => Ok(PolygonMode::Star),
            "doublestar" | "double_star" => Ok(PolygonMode::DoubleStar),
            _ => domain(format!("unknown polygon mode `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StarClass {
    None,
    Star1,
    Star2,
    Star3,
    DoubleStar,
    TstarI,
    TstarIi,
    TstarIii,
}

impl StarClass {
    pub fn is_star(&self) -> bool {
        matches!(self, StarClass::Star1 | StarClass::Star2 | StarClass::Star3)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            StarClass::None => "none",
            StarClass::Star1 => "star1",
            StarClass::Star2 => "star2",
            StarClass::Star3 => "star3",
            StarClass::DoubleStar => "doublestar",
            StarClass::TstarI => "Tstar_i",
            StarClass::TstarIi => "Tstar_ii",
            StarClass::TstarIii => "Tstar_iii",
        }
    }
}

fn q_of(x: u32) -> Q {
    qi(x as i64)
}

fn is_unit_row_in(k: &FieldCtx, rows: &[Vec<Elem>], j: usize, n: usize) -> bool {
    in_span(k, rows, &unit(k, n, j))
}

/// Some element of span(forms) has a nonzero U_3^deg coefficient.
fn unitary_in_u3(k: &FieldCtx, forms: &[Poly], deg: u32) -> bool {
    forms.iter().any(|f| !k.is_zero(&f.coeff(k, &[0, 0, deg])))
}

/// d_j for exceptional j, 0 otherwise.
fn d_or_zero(a: &Analysis, j: usize) -> Q {
    a.core.d.get(j).cloned().unwrap_or_else(Q::zero)
}

/// The vertices of Δ lying in {x_axis = value}.
fn vertices_on(d: &NewtonPolyhedron, axis: usize, value: &Q) -> Vec<Vec<Q>> {
    d.vertices.iter().filter(|v| &v[axis] == value).cloned().collect()
}

/// Condition (*), (**) or (T**) read off the current coordinates.
pub fn classify_monic(state: &HypersurfaceState) -> Result<StarClass> {
    if state.n != 3 || state.is_arithmetic() {
        return Ok(StarClass::None);
    }
    let a = match analyze(state) {
        Ok(a) => a,
        Err(Error::EmptyPolyhedron) | Err(Error::Condition(_)) => return Ok(StarClass::None),
        Err(e) => return Err(e),
    };
    classify_with(state, &a)
}

pub fn classify_with(state: &HypersurfaceState, a: &Analysis) -> Result<StarClass> {
    let p = state.p;
    if a.core.m != p || a.omega == 0 || state.n != 3 {
        return Ok(StarClass::None);
    }
    let Some(cone) = &a.cone else { return Ok(StarClass::None) };
    let k = &state.field;
    let eps = a.core.eps_int();
    let omega = a.omega;
    let e = state.e;
    let kappa = a.kappa.kappa;
    let u3_in_vdir = is_unit_row_in(k, &cone.vdir, 2, 3);
    let d = polyhedron(state)?;
    let pq = q_of(p);

    if kappa == Kappa::Exact(2) && omega % p == 0 && u3_in_vdir {
        if omega == eps && (1..=2).contains(&e) && unitary_in_u3(k, &a.spaces.j, eps) {
            return Ok(if e == 1 { StarClass::Star1 } else { StarClass::Star2 });
        }
        if omega + 1 == eps && e == 1 {
            let fp = &a.core.initial.f[p as usize - 1];
            let dv = fp.derive(k, Derivation::Plain(1));
            if let Some(g) = dv.div_monomial(&a.core.h_exp(3)) {
                if !k.is_zero(&g.coeff(k, &[0, 0, omega])) {
                    return Ok(StarClass::Star3);
                }
            }
        }
    }
    if kappa.rank() >= 3 && (1 + omega) % p != 0 && (1..=2).contains(&e) {
        let d1 = d_or_zero(a, 0);
        let v = vec![d1.clone(), d_or_zero(a, 1), q_of(1 + omega) / &pq];
        let on = vertices_on(&d, 0, &d1);
        let ok = if e == 1 { on == vec![v.clone()] } else { d.vertices.contains(&v) };
        if ok {
            return Ok(StarClass::DoubleStar);
        }
    }
    if kappa == Kappa::Exact(4) {
        let vdir_is_u1 = cone.vdir.len() == 1 && is_unit_row_in(k, &cone.vdir, 0, 3);
        if eps == omega && e >= 1 && vdir_is_u1 {
            return Ok(StarClass::TstarI);
        }
        let d2 = d_or_zero(a, 1);
        if eps == omega && e >= 2 {
            let v = vec![d_or_zero(a, 0) + q_of(omega) / &pq, d2.clone(), d_or_zero(a, 2)];
            if vertices_on(&d, 1, &d2) == vec![v] {
                return Ok(StarClass::TstarIi);
            }
        }
        if e == 2 {
            let v = vec![d_or_zero(a, 0) + q_of(omega) / &pq, d2.clone(), Q::one() / &pq];
            if vertices_on(&d, 1, &d2) == vec![v] {
                return Ok(StarClass::TstarIii);
            }
        }
    }
    Ok(StarClass::None)
}

/// Vertex list of conv(points) + R²₊, ordered by increasing first coordinate.
pub fn staircase_hull(points: &[(Q, Q)]) -> Vec<(Q, Q)> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    let mut front: Vec<(Q, Q)> = vec![];
    for pt in pts {
        if front.last().map_or(true, |last| pt.1 < last.1) {
            front.push(pt);
        }
    }
    let cross = |o: &(Q, Q), a: &(Q, Q), b: &(Q, Q)| (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0);
    let mut hull: Vec<(Q, Q)> = vec![];
    for pt in front {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &pt) <= Q::zero() {
            hull.pop();
        }
        hull.push(pt);
    }
    hull
}

/// How a vertex of the polygon behaves under dissolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexStatus {
    /// Not 2-solvable (star) or prepared (doublestar); the clause that applied.
    Prepared(String),
    /// The translation u₃ ← u₃ + c·u₁^{y₁}u₂^{y₂} removes the vertex.
    Dissolvable { exponent: [u32; 2], c: Elem },
    /// No supporting weight could be attached to the vertex.
    Unweighted,
    /// Outside the scope of the dissolution test (not a left vertex, or maxcontact mode).
    OutOfScope,
}

#[derive(Debug, Clone)]
pub struct PolygonVertex {
    pub y: (Q, Q),
    /// Weight vector of the face of Δ that projects onto y.
    pub weight: Option<Vec<Q>>,
    /// Vertices of Δ mapped onto y.
    pub preimages: Vec<Vec<Q>>,
    pub in_plus: bool,
    pub status: VertexStatus,
}

impl PolygonVertex {
    pub fn prepared(&self) -> bool {
        !matches!(self.status, VertexStatus::Dissolvable { .. })
    }
}

/// Δ₂ with its apex, its vertices and the secondary invariants.
#[derive(Debug, Clone)]
pub struct Polygon2 {
    pub mode: PolygonMode,
    pub class: StarClass,
    /// 1, 2 or 3 in maxcontact mode.
    pub case: Option<u8>,
    pub omega: u32,
    /// Coordinate along which Δ is projected.
    pub axis: usize,
    /// Coordinates of the plane, in order.
    pub plane: [usize; 2],
    pub apex: Vec<Q>,
    /// Images of the vertices of Δ below the apex.
    pub points: Vec<(Q, Q)>,
    pub vertices: Vec<PolygonVertex>,
    /// Some vertex of Δ beyond the apex contributes a recession direction outside R²₊.
    pub escapes_orthant: bool,
    /// inf of each plane coordinate (None when unbounded below).
    pub a: [Option<Q>; 2],
    pub b: Option<Q>,
    pub c: Option<Q>,
    pub beta: Option<Q>,
    pub beta2: Option<Q>,
    pub alpha2: Option<Q>,
    pub gamma: Option<i64>,
    pub exceptional_plane: [bool; 2],
}

impl Polygon2 {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_points(&self) -> Vec<(Q, Q)> {
        self.vertices.iter().map(|v| v.y.clone()).collect()
    }

    /// Vertices with ordinate at least β₂.
    pub fn plus_points(&self) -> Vec<(Q, Q)> {
        self.vertices.iter().filter(|v| v.in_plus).map(|v| v.y.clone()).collect()
    }

    /// The vertex set the permissibility and curve blow-up statements refer to:
    /// Δ₂⁺ in case (*3), Δ₂ otherwise.
    pub fn reference_points(&self) -> Vec<(Q, Q)> {
        if self.class == StarClass::Star3 {
            self.plus_points()
        } else {
            self.vertex_points()
        }
    }

    /// min of the first plane coordinate over the reference polygon.
    pub fn a1(&self) -> Option<Q> {
        self.a[0].clone()
    }

    pub fn record(&self, k: &FieldCtx) -> PolygonRecord {
        let pq = |y: &(Q, Q)| format!("({}, {})", fmt_q(&y.0), fmt_q(&y.1));
        let opt = |x: &Option<Q>| x.as_ref().map(fmt_q);
        let names = ["A1", "A2", "A3"];
        PolygonRecord {
            mode: self.mode,
            class: self.class.as_str().into(),
            case: self.case,
            apex: crate::polyhedron::fmt_point(&self.apex),
            axes: [names[self.plane[0]].into(), names[self.plane[1]].into()],
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexRecord {
                    y: pq(&v.y),
                    weight: v.weight.as_ref().map(|w| crate::polyhedron::fmt_point(w)),
                    in_plus: v.in_plus,
                    prepared: v.prepared(),
                    status: match &v.status {
                        VertexStatus::Prepared(s) => format!("prepared: {s}"),
                        VertexStatus::Dissolvable { exponent, c } => {
                            format!("dissolvable: c = {}, monomial exponent ({}, {})", k.fmt_elem(c), exponent[0], exponent[1])
                        }
                        VertexStatus::Unweighted => "unweighted".into(),
                        VertexStatus::OutOfScope => "out_of_scope".into(),
                    },
                })
                .collect(),
            escapes_orthant: self.escapes_orthant,
            a_first: opt(&self.a[0]),
            a_second: opt(&self.a[1]),
            b: opt(&self.b),
            c: opt(&self.c),
            beta: opt(&self.beta),
            beta2: opt(&self.beta2),
            alpha2: opt(&self.alpha2),
            gamma: self.gamma,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct VertexRecord {
    pub y: String,
    pub weight: Option<String>,
    pub in_plus: bool,
    pub prepared: bool,
    pub status: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct PolygonRecord {
    pub mode: PolygonMode,
    pub class: String,
    pub case: Option<u8>,
    pub apex: String,
    /// Names of the A-invariants attached to the two plane coordinates.
    pub axes: [String; 2],
    pub vertices: Vec<VertexRecord>,
    pub escapes_orthant: bool,
    pub a_first: Option<String>,
    pub a_second: Option<String>,
    pub b: Option<String>,
    pub c: Option<String>,
    pub beta: Option<String>,
    pub beta2: Option<String>,
    pub alpha2: Option<String>,
    pub gamma: Option<i64>,
}

/// Apex, projection axis and plane for a mode, with the class or case it was derived from.
#[derive(Debug, Clone)]
pub struct Projection {
    pub mode: PolygonMode,
    pub class: StarClass,
    pub case: Option<u8>,
    pub axis: usize,
    pub plane: [usize; 2],
    pub apex: Vec<Q>,
}

impl Projection {
    /// p₂(x) = (x_plane − apex_plane) / (apex_axis − x_axis).
    pub fn map(&self, x: &[Q]) -> Option<(Q, Q)> {
        let h = &self.apex[self.axis] - &x[self.axis];
        if !h.is_positive() {
            return None;
        }
        let [i, j] = self.plane;
        Some(((&x[i] - &self.apex[i]) / &h, (&x[j] - &self.apex[j]) / &h))
    }

    /// Weight vector whose face pulls back the line n·y = n·y0 through the apex.
    pub fn weight(&self, n: &(Q, Q), y0: &(Q, Q)) -> Option<Vec<Q>> {
        let c = &n.0 * &y0.0 + &n.1 * &y0.1;
        if !c.is_positive() || !n.0.is_positive() || !n.1.is_positive() {
            return None;
        }
        let mut w = vec![Q::zero(); 3];
        w[self.axis] = c;
        w[self.plane[0]] = n.0.clone();
        w[self.plane[1]] = n.1.clone();
        Some(w)
    }
}

/// Apex and geometry for the requested mode.
pub fn projection_for(state: &HypersurfaceState, a: &Analysis, mode: PolygonMode) -> Result<Projection> {
    if state.n != 3 {
        return Err(Error::Unsupported("projected polygons need n = 3".into()));
    }
    if a.core.m != state.p || a.omega == 0 {
        return domain("projected polygons need m = p and omega > 0");
    }
    let pq = q_of(state.p);
    let om = q_of(a.omega) / &pq;
    let eps = a.core.eps_int();
    let d1 = d_or_zero(a, 0);
    let d2 = d_or_zero(a, 1);
    let d3 = d_or_zero(a, 2);
    match mode {
        PolygonMode::MaxContact => {
            if state.e < 2 {
                return domain("maxcontact projection needs div(u1 u2) in E");
            }
            let (case, x3) = if eps == a.omega {
                (if state.e == 2 { 1 } else { 2 }, d3)
            } else if eps == a.omega + 1 && state.e == 2 {
                (3, Q::one() / &pq)
            } else {
                return domain("maxcontact projection needs eps = omega, or eps = 1 + omega with E = div(u1 u2)");
            };
            Ok(Projection {
                mode,
                class: StarClass::None,
                case: Some(case),
                axis: 0,
                plane: [1, 2],
                apex: vec![d1 + om, d2, x3],
            })
        }
        PolygonMode::Star => {
            let class = classify_with(state, a)?;
            let b0 = match class {
                StarClass::Star1 | StarClass::Star2 => (d1, d2),
                StarClass::Star3 => (d1, Q::one() / &pq),
                other => return domain(format!("star projection needs condition (*), found {}", other.as_str())),
            };
            Ok(Projection { mode, class, case: None, axis: 2, plane: [0, 1], apex: vec![b0.0, b0.1, om] })
        }
        PolygonMode::DoubleStar => {
            let class = classify_with(state, a)?;
            if class != StarClass::DoubleStar {
                return domain(format!("doublestar projection needs condition (**), found {}", class.as_str()));
            }
            let h = q_of(1 + a.omega) / &pq;
            Ok(Projection { mode, class, case: None, axis: 2, plane: [0, 1], apex: vec![d1, d2, h] })
        }
    }
}

fn edge_normal(a: &(Q, Q), b: &(Q, Q)) -> (Q, Q) {
    (&a.1 - &b.1, &b.0 - &a.0)
}

/// Builds Δ₂ for the given mode at the origin of a minimal state.
pub fn project_polygon(state: &HypersurfaceState, mode: PolygonMode) -> Result<Polygon2> {
    let a = analyze(state)?;
    let pr = projection_for(state, &a, mode)?;
    build_polygon(state, &a, pr)
}

fn build_polygon(state: &HypersurfaceState, a: &Analysis, pr: Projection) -> Result<Polygon2> {
    let d = polyhedron(state)?;
    if !d.vertices.contains(&pr.apex) {
        return Err(Error::Condition(format!("apex {} is not a vertex of the polyhedron", crate::polyhedron::fmt_point(&pr.apex))));
    }
    let mut points = vec![];
    let mut pre: Vec<((Q, Q), Vec<Q>)> = vec![];
    let mut escapes = false;
    let mut dirs: Vec<(Q, Q)> = vec![];
    for v in &d.vertices {
        if v == &pr.apex {
            continue;
        }
        match pr.map(v) {
            Some(y) => {
                points.push(y.clone());
                pre.push((y, v.clone()));
            }
            None => {
                let [i, j] = pr.plane;
                let dir = (&v[i] - &pr.apex[i], &v[j] - &pr.apex[j]);
                if dir.0.is_negative() || dir.1.is_negative() {
                    escapes = true;
                }
                dirs.push(dir);
            }
        }
    }
    let hull = staircase_hull(&points);
    let e = state.e;
    let exceptional_plane = [pr.plane[0] < e, pr.plane[1] < e];
    let mut poly = Polygon2 {
        mode: pr.mode,
        class: pr.class,
        case: pr.case,
        omega: a.omega,
        axis: pr.axis,
        plane: pr.plane,
        apex: pr.apex.clone(),
        points,
        vertices: vec![],
        escapes_orthant: escapes,
        a: [None, None],
        b: None,
        c: None,
        beta: None,
        beta2: None,
        alpha2: None,
        gamma: None,
        exceptional_plane,
    };
    if hull.is_empty() {
        return Ok(poly);
    }
    let unbounded = |f: &dyn Fn(&(Q, Q)) -> Q| dirs.iter().any(|dd| f(dd).is_negative());
    let first = hull[0].clone();
    let last = hull[hull.len() - 1].clone();
    poly.a[0] = if unbounded(&|dd| dd.0.clone()) { None } else { Some(first.0.clone()) };
    poly.a[1] = if unbounded(&|dd| dd.1.clone()) { None } else { Some(last.1.clone()) };
    poly.beta = Some(first.1.clone());
    let modulus = |y: &(Q, Q)| &y.0 + &y.1;
    if !unbounded(&|dd| &dd.0 + &dd.1) {
        let b = hull.iter().map(modulus).min().unwrap();
        let top = hull.iter().find(|y| modulus(y) == b).unwrap().clone();
        poly.alpha2 = Some(top.0.clone());
        poly.beta2 = Some(top.1.clone());
        poly.b = Some(b);
    }
    let sum_a = |poly: &Polygon2| -> Option<Q> {
        let mut s = poly.b.clone()?;
        for (t, ex) in exceptional_plane.iter().enumerate() {
            if *ex {
                s = s - poly.a[t].clone()?;
            }
        }
        Some(s)
    };
    poly.c = match (pr.mode, pr.class) {
        (PolygonMode::DoubleStar, _) => match (&poly.b, &poly.a[0], &poly.a[1]) {
            (Some(b), Some(a1), Some(a2)) => Some(b - a1 - a2),
            _ => None,
        },
        _ => sum_a(&poly),
    };
    let ceil = |x: &Q| x.ceil().to_integer().try_into().unwrap_or(i64::MAX);
    let floor = |x: &Q| x.floor().to_integer().try_into().unwrap_or(i64::MAX);
    poly.gamma = match (pr.mode, pr.class, pr.case) {
        (PolygonMode::Star, StarClass::Star1, _) => poly.beta.as_ref().map(ceil),
        (PolygonMode::Star, StarClass::Star2, _) => poly.c.as_ref().map(|c| 1 + floor(c)),
        (PolygonMode::Star, StarClass::Star3, _) => poly.beta.as_ref().map(|b| 1 + floor(b)),
        (PolygonMode::DoubleStar, _, _) => {
            if e == 1 {
                poly.beta.as_ref().map(ceil)
            } else {
                poly.c.as_ref().map(|c| 1 + floor(c))
            }
        }
        (PolygonMode::MaxContact, _, Some(1)) => poly.beta.as_ref().map(|b| ceil(b).max(1)),
        (PolygonMode::MaxContact, _, Some(2)) => poly.c.as_ref().map(|c| 1 + floor(c)),
        (PolygonMode::MaxContact, _, Some(3)) => poly.beta.as_ref().map(|b| (1 + floor(b)).max(1)),
        _ => None,
    };

    let beta2 = poly.beta2.clone();
    let nv = hull.len();
    for (i, y) in hull.iter().enumerate() {
        let in_plus = beta2.as_ref().map_or(true, |b2| &y.1 >= b2);
        let n_l = if i == 0 { (Q::one(), Q::zero()) } else { edge_normal(&hull[i - 1], y) };
        let mut n_r = if i + 1 == nv { (Q::zero(), Q::one()) } else { edge_normal(y, &hull[i + 1]) };
        if pr.class == StarClass::Star3 && n_r.0 < n_r.1 {
            // the rays (k/p, −1/p) of Δ₂ bound the normal cone by n₁ ≥ n₂
            n_r = (Q::one(), Q::one());
        }
        let n = (&n_l.0 + &n_r.0, &n_l.1 + &n_r.1);
        let preimages: Vec<Vec<Q>> = pre.iter().filter(|(img, _)| img == y).map(|(_, v)| v.clone()).collect();
        let sigma_in = pr.class == StarClass::Star3
            && poly.b.as_ref().map_or(false, |b| b.is_one())
            && poly.beta2.as_ref() == Some(&y.1)
            && poly.alpha2.as_ref() == Some(&y.0);
        let weight = if sigma_in {
            Some(vec![Q::one(); 3])
        } else {
            pr.weight(&n, y).filter(|w| supports_edge(&d, &pr, w, y))
        };
        poly.vertices.push(PolygonVertex { y: y.clone(), weight, preimages, in_plus, status: VertexStatus::OutOfScope });
    }
    let statuses: Vec<VertexStatus> = (0..nv).map(|i| vertex_status(state, a, &poly, i)).collect::<Result<_>>()?;
    for (v, s) in poly.vertices.iter_mut().zip(statuses) {
        v.status = s;
    }
    Ok(poly)
}

/// The α-face of Δ consists of the apex and vertices projecting onto y.
fn supports_edge(d: &NewtonPolyhedron, pr: &Projection, w: &[Q], y: &(Q, Q)) -> bool {
    let Ok(face) = d.face(w) else { return false };
    face.contains(&pr.apex) && face.iter().all(|v| v == &pr.apex || pr.map(v).as_ref() == Some(y))
}

fn vp_u32(mut x: u32, p: u32) -> u32 {
    let mut r = 0;
    while x > 0 && x % p == 0 {
        x /= p;
        r += 1;
    }
    r
}

/// Root of order p^s, when it exists.
fn ppow_root(k: &FieldCtx, a: &Elem, s: u32) -> Option<Elem> {
    let mut r = a.clone();
    for _ in 0..s {
        r = k.pth_root(&r)?;
    }
    Some(r)
}

/// Every term has exponents divisible by p and a p-th power coefficient.
pub fn is_pth_power(k: &FieldCtx, f: &Poly) -> bool {
    let p = k.p();
    f.terms.iter().all(|(e, c)| e.iter().all(|&x| x % p == 0) && k.pth_root(c).is_some())
}

fn integral_point(y: &(Q, Q)) -> Option<[u32; 2]> {
    let conv = |x: &Q| -> Option<u32> {
        if x.is_integer() && !x.is_negative() {
            x.to_integer().try_into().ok()
        } else {
            None
        }
    };
    Some([conv(&y.0)?, conv(&y.1)?])
}

/// λ·U^pre·(U_3 − c M)^ω as a polynomial in three variables.
fn dissolving_shape(k: &FieldCtx, pre: &[u32], lambda: &Elem, c: &Elem, m: [u32; 2], omega: u32) -> Poly {
    let mut base = Poly::var(k, 3, 2);
    base.add_term(k, vec![m[0], m[1], 0], k.neg(c));
    base.pow(k, omega as u64).mul_monomial(k, pre, lambda)
}

/// c with (−c)^{p^s} determined by the term of (U_3 − cM)^ω of index p^s = p^{v_p(ω)}.
fn solve_translation(k: &FieldCtx, fp: &Poly, pre: &[u32], lambda: &Elem, m: [u32; 2], omega: u32) -> Option<Elem> {
    let p = k.p();
    let s = vp_u32(omega, p);
    let qq = p.pow(s);
    let b = k.from_i64(binom_mod_p(omega as u64, qq as u64, p as u64) as i64);
    let mono = vec![pre[0] + qq * m[0], pre[1] + qq * m[1], omega - qq];
    let a = fp.coeff(k, &mono);
    let minus_c = if mono.iter().any(|&x| x % p != 0) {
        ppow_root(k, &k.div(&a, &k.mul(lambda, &b)), s)?
    } else {
        // all monomials of the shape are p-th powers: compare p-basis components
        let lam = k.pbasis_split(lambda, p as u64);
        let ac = k.pbasis_split(&a, p as u64);
        let (mu, lm) = lam.iter().find(|(mu, _)| mu.iter().any(|&x| x != 0))?;
        let am = ac.get(mu).cloned().unwrap_or_else(|| k.zero());
        ppow_root(k, &k.div(&am, &k.mul(lm, &b)), s - 1)?
    };
    Some(k.neg(&minus_c))
}

/// 2-solvability (star) or preparedness (doublestar) of the i-th vertex.
fn vertex_status(state: &HypersurfaceState, a: &Analysis, poly: &Polygon2, i: usize) -> Result<VertexStatus> {
    let v = &poly.vertices[i];
    match poly.mode {
        PolygonMode::MaxContact => Ok(VertexStatus::OutOfScope),
        PolygonMode::Star => {
            if poly.class == StarClass::Star3 && !v.in_plus {
                return Ok(VertexStatus::OutOfScope);
            }
            let Some(w) = &v.weight else { return Ok(VertexStatus::Unweighted) };
            star_solvable(state, poly, w, &v.y)
        }
        PolygonMode::DoubleStar => {
            let all = state.e == 2 && a.core.d.get(1).map_or(false, |x| x.is_positive());
            if !all && !v.in_plus {
                return Ok(VertexStatus::OutOfScope);
            }
            let Some(w) = &v.weight else { return Ok(VertexStatus::Unweighted) };
            doublestar_prepared(state, a, poly, w, &v.y)
        }
    }
}

fn apex_prefactor(state: &HypersurfaceState, poly: &Polygon2) -> Vec<u32> {
    let p = q_of(state.p);
    let to = |x: &Q| -> u32 { (x * &p).to_integer().try_into().unwrap_or(0) };
    vec![to(&poly.apex[0]), to(&poly.apex[1]), 0]
}

fn star_solvable(state: &HypersurfaceState, poly: &Polygon2, w: &[Q], y: &(Q, Q)) -> Result<VertexStatus> {
    let k = &state.field;
    let p = state.p as usize;
    let Some(m) = integral_point(y) else { return Ok(VertexStatus::Prepared("not an integral point".into())) };
    let inf = initial_form(state, w)?;
    if inf.f[..p - 1].iter().any(|g| !g.is_zero()) {
        return Ok(VertexStatus::Prepared("initial form has a Z-term".into()));
    }
    let fp = &inf.f[p - 1];
    let pre = apex_prefactor(state, poly);
    let omega = poly.omega;
    let lambda = fp.coeff(k, &[pre[0], pre[1], omega]);
    if k.is_zero(&lambda) {
        return Ok(VertexStatus::Prepared("apex term missing from the initial form".into()));
    }
    let Some(c) = solve_translation(k, fp, &pre, &lambda, m, omega) else {
        return Ok(VertexStatus::Prepared("no translation coefficient in the residue field".into()));
    };
    if k.is_zero(&c) {
        return Ok(VertexStatus::Prepared("translation coefficient is zero".into()));
    }
    let rest = fp.sub(k, &dissolving_shape(k, &pre, &lambda, &c, m, omega));
    if is_pth_power(k, &rest) {
        Ok(VertexStatus::Dissolvable { exponent: m, c })
    } else {
        Ok(VertexStatus::Prepared("initial form is not of dissolving shape".into()))
    }
}

fn doublestar_prepared(state: &HypersurfaceState, a: &Analysis, poly: &Polygon2, w: &[Q], y: &(Q, Q)) -> Result<VertexStatus> {
    let k = &state.field;
    let p = state.p;
    let inf = initial_form(state, w)?;
    if !inf.f[p as usize - 2].is_zero() {
        return Ok(VertexStatus::Prepared("clause 1: G != 0".into()));
    }
    let omega = a.omega;
    let fp = &inf.f[p as usize - 1];
    let pre = apex_prefactor(state, poly);
    let dv = fp.derive(k, Derivation::Plain(2));
    let Some(g) = dv.div_monomial(&pre) else {
        return Ok(VertexStatus::Prepared("clause 2: derivative not divisible by H".into()));
    };
    let mu = g.coeff(k, &[0, 0, omega]);
    let pure = Poly::monomial(k, vec![0, 0, omega], mu.clone());
    if k.is_zero(&mu) {
        return Ok(VertexStatus::Prepared("clause 2: no V^omega term".into()));
    }
    if g == pure {
        return Ok(VertexStatus::Prepared("clause 3: proportional to V^omega".into()));
    }
    let Some(m) = integral_point(y) else { return Ok(VertexStatus::Prepared("clause 2".into())) };
    let s = vp_u32(omega, p);
    let j = p.pow(s);
    let b = k.from_i64(binom_mod_p(omega as u64, j as u64, p as u64) as i64);
    let cj = g.coeff(k, &[j * m[0], j * m[1], omega - j]);
    let Some(lp) = ppow_root(k, &k.div(&cj, &k.mul(&mu, &b)), s) else {
        return Ok(VertexStatus::Prepared("clause 2".into()));
    };
    if k.is_zero(&lp) {
        return Ok(VertexStatus::Prepared("clause 2".into()));
    }
    // (V + λ′M)^ω = (V − cM)^ω with c = −λ′
    let c = k.neg(&lp);
    let shape = dissolving_shape(k, &[0, 0, 0], &mu, &c, m, omega);
    if g == shape {
        Ok(VertexStatus::Dissolvable { exponent: m, c })
    } else {
        Ok(VertexStatus::Prepared("clause 2".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrepareStatus {
    Prepared,
    BudgetExceeded,
}

/// One u₃-translation: u₃ ← u₃ + c·u₁^{e₁}u₂^{e₂}.
#[derive(Debug, Clone)]
pub struct U3Step {
    pub vertex: (Q, Q),
    pub exponent: [u32; 2],
    pub c: Elem,
}

#[derive(Debug, Clone)]
pub struct TwoPrepared {
    pub state: HypersurfaceState,
    pub polygon: Polygon2,
    pub status: PrepareStatus,
    pub steps: Vec<U3Step>,
}

/// Substitutes u₃ ← u₃ + c·u₁^{e₁}u₂^{e₂} and re-minimizes Z.
pub fn translate_u3(state: &HypersurfaceState, exponent: [u32; 2], c: &Elem) -> Result<HypersurfaceState> {
    let k = &state.field;
    let mut u3 = Poly::var(k, 3, 2);
    u3.add_term(k, vec![exponent[0], exponent[1], 0], c.clone());
    let subs = vec![Poly::var(k, 3, 0), Poly::var(k, 3, 1), u3];
    let moved = state.change_coordinates(&subs)?;
    let mz = minimize(&moved, crate::prepare::DEFAULT_BUDGET)?;
    if mz.status != MinimizeStatus::Minimal {
        return Err(Error::Condition("re-minimization exceeded its budget".into()));
    }
    Ok(mz.state)
}

/// Next vertex to dissolve: smallest y₁ + y₂, then smallest y₁.
fn next_dissolvable(poly: &Polygon2) -> Option<(usize, [u32; 2], Elem)> {
    let mut best: Option<(usize, [u32; 2], Elem)> = None;
    for (i, v) in poly.vertices.iter().enumerate() {
        if let VertexStatus::Dissolvable { exponent, c } = &v.status {
            let better = match &best {
                None => true,
                Some((_, b, _)) => (exponent[0] + exponent[1], exponent[0]).cmp(&(b[0] + b[1], b[0])) == Ordering::Less,
            };
            if better {
                best = Some((i, *exponent, c.clone()));
            }
        }
    }
    best
}

/// Dissolves 2-solvable (star) or unprepared (doublestar) vertices until none is left.
pub fn two_prepare(state: &HypersurfaceState, mode: PolygonMode, max_iter: usize) -> Result<TwoPrepared> {
    if mode == PolygonMode::MaxContact {
        return domain("two_prepare applies to the star and doublestar modes");
    }
    let mut cur = state.clone();
    let mut steps = vec![];
    loop {
        let poly = project_polygon(&cur, mode)?;
        let Some((i, exponent, c)) = next_dissolvable(&poly) else {
            return Ok(TwoPrepared { state: cur, polygon: poly, status: PrepareStatus::Prepared, steps });
        };
        if steps.len() >= max_iter {
            return Ok(TwoPrepared { state: cur, polygon: poly, status: PrepareStatus::BudgetExceeded, steps });
        }
        cur = translate_u3(&cur, exponent, &c)?;
        steps.push(U3Step { vertex: poly.vertices[i].y.clone(), exponent, c });
    }
}

/// γ(x) of a prepared polygon.
pub fn gamma(poly: &Polygon2) -> Result<i64> {
    if poly.mode == PolygonMode::Star && !poly.class.is_star() {
        return domain("gamma in star mode needs condition (*)");
    }
    poly.gamma.ok_or_else(|| Error::Domain("gamma is undefined for this polygon".into()))
}

/// sup{t : v_t(h) = p} for the monomial valuations v_t with v(Z) = 1, weight t
/// on the projection coordinate relative to the plane coordinates, normalized
/// so that the apex has value 1. Evaluated on the terms of h.
pub fn valuation_b(state: &HypersurfaceState, axis: usize, apex: &[Q]) -> Result<Option<Q>> {
    let p = state.p as usize;
    let plane: Vec<usize> = (0..3).filter(|&j| j != axis).collect();
    let apex_plane = &apex[plane[0]] + &apex[plane[1]];
    let value = |t: &Q| -> Q {
        // weights: plane coordinates a, axis t·a, with a·(|apex_plane| + t·apex_axis) = 1
        let a = Q::one() / (&apex_plane + t * &apex[axis]);
        let mut best = q_of(p as u32);
        for i in 1..=p {
            for e in state.support(i) {
                let v = qi((p - i) as i64) + &a * (q_of(e[plane[0]]) + q_of(e[plane[1]])) + &a * t * q_of(e[axis]);
                if v < best {
                    best = v;
                }
            }
        }
        best
    };
    let pq = q_of(p as u32);
    let mut cands = vec![];
    for i in 1..=p {
        for e in state.support(i) {
            let x: Vec<Q> = e.iter().map(|&c| q_of(c) / qi(i as i64)).collect();
            let h = &apex[axis] - &x[axis];
            if h.is_positive() {
                cands.push((&x[plane[0]] + &x[plane[1]] - &apex_plane) / h);
            }
        }
    }
    cands.retain(|t| t.is_positive());
    cands.sort();
    cands.dedup();
    let feasible: Vec<&Q> = cands.iter().filter(|t| value(t) == pq).collect();
    let Some(best) = feasible.last() else { return Ok(None) };
    let above = *best + Q::new(1.into(), 1_000_000.into());
    if value(&above) == pq {
        return Err(Error::Condition("valuation supremum is not attained at a breakpoint".into()));
    }
    Ok(Some((*best).clone()))
}

/// Φ_i(U₁, λU₂) for exponents (a(1), a(2)), as a form in (U₁, U₂, U₃).
pub fn joyeux_phi(k: &FieldCtx, a_exp: [u32; 2], i: u32, lambda: &Elem) -> Result<Poly> {
    let p = k.p();
    if k.is_zero(lambda) {
        return domain("lambda must be nonzero");
    }
    let a = i % p;
    let a1 = a_exp[0] % p;
    let a2 = a_exp[1] % p;
    if i == 0 || a == 0 {
        return domain("i must be positive and prime to p");
    }
    if a1 == 0 || a2 == 0 || a1 + a2 + a != p {
        return domain(format!("exponents violate a1 + a2 + a = p with a1 a2 != 0 (a1 = {a1}, a2 = {a2}, a = {a})"));
    }
    let n = 3;
    let u1 = Poly::var(k, n, 0);
    let lu2 = Poly::var(k, n, 1).scale(k, lambda);
    let s = u1.add(k, &lu2);
    let mut sum = Poly::zero(n);
    for kk in 0..=a {
        let b = binom_mod_p((a2 + kk - 1) as u64, kk as u64, p as u64);
        if b == 0 {
            continue;
        }
        let term = u1.pow(k, (a - kk) as u64).mul(k, &s.pow(k, (i - a + kk) as u64)).scale(k, &k.from_i64(b as i64));
        sum = sum.add(k, &term);
    }
    let sign = if a2 % 2 == 0 { k.one() } else { k.neg(&k.one()) };
    let pre = Poly::monomial(k, vec![a_exp[0], 0, 0], sign).mul(k, &lu2.pow(k, a_exp[1] as u64));
    Ok(pre.mul(k, &sum))
}

/// Vdir of J(F, E, m_S) for E = div(u₁u₂u₃) and H = U^a.
pub fn joyeux_vdir(k: &FieldCtx, f: &Poly, h: &[u32]) -> Result<Vec<Vec<Elem>>> {
    let mut forms = vec![];
    for j in 0..3 {
        let g = f.derive(k, Derivation::Log(j));
        forms.push(g.div_monomial(h).ok_or_else(|| Error::Domain("derivative not divisible by H".into()))?);
    }
    for l in 0..k.m() {
        let g = f.derive(k, Derivation::Const(l));
        forms.push(g.div_monomial(h).ok_or_else(|| Error::Domain("derivative not divisible by H".into()))?);
    }
    let forms = crate::invariants::linalg::forms_basis(k, &forms);
    Ok(crate::invariants::directrix::vdir(k, &forms, 3))
}

/// Polygon points shifted by a vector.
pub fn translate_points(pts: &[(Q, Q)], by: (Q, Q)) -> Vec<(Q, Q)> {
    pts.iter().map(|(x, y)| (x + &by.0, y + &by.1)).collect()
}

/// Smallest modulus |y| over a vertex list.
pub fn min_modulus(pts: &[(Q, Q)]) -> Option<Q> {
    pts.iter().map(|(a, b)| a + b).min()
}
