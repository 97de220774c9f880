//! Coordinate centers V(Z, u_J), their classification (Hironaka, first and
//! second kind), the chart transforms of the blowing up, and the cone
//! C(x, Y) that governs which points of the fiber can keep the invariants.

use serde::Serialize;

use crate::algebra::{Coeffs, Derivation, Elem, Field, FieldCtx, Fq, HypersurfaceState, Poly};
use crate::algebra::fq::find_irreducible;
use crate::error::{domain, Error, Result};
use crate::invariants::directrix::max_space;
use crate::invariants::linalg::{forms_basis, linear_form, rref, unit, Row};
use crate::invariants::{analyze, b_set, graded_names, invariant_core, Analysis, Core, InvariantRecord};
use crate::polyhedron::{fmt_q, polyhedron, qi, NewtonPolyhedron, Q};
use crate::prepare::{find_solvable_vertex, minimize, MinimizeStatus, DEFAULT_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterKind {
    NotPermissible,
    Hironaka,
    FirstKind,
    SecondKind,
}

impl CenterKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CenterKind::NotPermissible => "not_permissible",
            CenterKind::Hironaka => "hironaka",
            CenterKind::FirstKind => "first_kind",
            CenterKind::SecondKind => "second_kind",
        }
    }

    /// First or second kind.
    pub fn is_permissible(&self) -> bool {
        matches!(self, CenterKind::FirstKind | CenterKind::SecondKind)
    }
}

/// The center W = V(Z, u_j : j in J) and the data computed at its generic point y.
#[derive(Debug, Clone)]
pub struct Center {
    /// Sorted 0-based coordinate indices.
    pub jset: Vec<usize>,
    pub kind: CenterKind,
    /// δ of Δ projected on the J coordinates.
    pub delta_y: Option<Q>,
    pub eps_x: u32,
    pub i0_x: usize,
    pub eps_y: Option<u32>,
    pub i0_y: Option<usize>,
    /// Basis of cl₀ J(F_{p,Z,W}, E, W) as forms in U_J (|J| variables).
    pub cl0_j: Vec<Poly>,
    pub reason: Option<String>,
}

impl Center {
    pub fn record(&self, state: &HypersurfaceState) -> CenterRecord {
        let names: Vec<String> = self.jset.iter().map(|&j| graded_names(state)[j].clone()).collect();
        CenterRecord {
            center: self.jset.iter().map(|&j| state.vars[j].clone()).collect(),
            kind: self.kind.as_str().into(),
            delta_y: self.delta_y.as_ref().map(fmt_q),
            epsilon_x: self.eps_x,
            epsilon_y: self.eps_y,
            i0_x: self.i0_x,
            i0_y: self.i0_y,
            cl0_j: self.cl0_j.iter().map(|f| f.fmt_with(&state.field, &names)).collect(),
            reason: self.reason.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CenterRecord {
    pub center: Vec<String>,
    pub kind: String,
    pub delta_y: Option<String>,
    pub epsilon_x: u32,
    pub epsilon_y: Option<u32>,
    pub i0_x: usize,
    pub i0_y: Option<usize>,
    pub cl0_j: Vec<String>,
    pub reason: Option<String>,
}

fn normalize_jset(state: &HypersurfaceState, jset: &[usize]) -> Result<Vec<usize>> {
    let mut js = jset.to_vec();
    js.sort_unstable();
    js.dedup();
    if js.is_empty() {
        return domain("a center needs at least one coordinate");
    }
    if js.iter().any(|&j| j >= state.n) {
        return domain("center coordinate out of range");
    }
    Ok(js)
}

/// State at the generic point of W, made minimal.
fn at_generic_point(state: &HypersurfaceState, js: &[usize]) -> Result<HypersurfaceState> {
    if js.len() == state.n {
        return Ok(state.clone());
    }
    Ok(minimize(&state.localize(js)?, DEFAULT_BUDGET)?.state)
}

pub fn classify_center(state: &HypersurfaceState, jset: &[usize]) -> Result<Center> {
    let js = normalize_jset(state, jset)?;
    let p = state.p;
    let core_x = invariant_core(state)?;
    let mut c = Center {
        jset: js.clone(),
        kind: CenterKind::NotPermissible,
        delta_y: None,
        eps_x: core_x.eps_int(),
        i0_x: core_x.i0,
        eps_y: None,
        i0_y: None,
        cl0_j: vec![],
        reason: None,
    };
    if core_x.m < p {
        c.reason = Some("m(x) < p".into());
        return Ok(c);
    }
    let delta_y = match polyhedron(state) {
        Ok(d) => d.project(&js).delta()?,
        Err(Error::EmptyPolyhedron) => {
            c.reason = Some("h = Z^p".into());
            return Ok(c);
        }
        Err(e) => return Err(e),
    };
    c.delta_y = Some(delta_y.clone());
    if delta_y < qi(1) {
        c.reason = Some(format!("delta(y) = {} < 1", fmt_q(&delta_y)));
        return Ok(c);
    }
    c.kind = CenterKind::Hironaka;
    let loc = at_generic_point(state, &js)?;
    let core_y = match invariant_core(&loc) {
        Ok(cy) => cy,
        Err(Error::Condition(msg)) => {
            c.reason = Some(format!("at y: {msg}"));
            return Ok(c);
        }
        Err(e) => return Err(e),
    };
    let eps_y = core_y.eps_int();
    c.eps_y = Some(eps_y);
    c.i0_y = Some(core_y.i0);
    if eps_y == c.eps_x {
        c.kind = CenterKind::FirstKind;
        return Ok(c);
    }
    if eps_y + 1 == c.eps_x && core_y.i0 <= core_x.i0 {
        match cl0_j_space(state, &js, &core_x, &loc, &core_y) {
            Ok(forms) => {
                if forms.is_empty() {
                    c.reason = Some("cl0 J vanishes".into());
                } else {
                    c.kind = CenterKind::SecondKind;
                }
                c.cl0_j = forms;
            }
            Err(Error::Condition(msg)) => c.reason = Some(msg),
            Err(e) => return Err(e),
        }
        return Ok(c);
    }
    c.reason = Some(format!("epsilon(y) = {eps_y}, epsilon(x) = {}", c.eps_x));
    Ok(c)
}

/// cl₀ of H_W^{-1} D_W F_{p,Z,W}: D_W acts by U_j∂/∂U_j (j ∈ J_E), U_i∂/∂U_j
/// (j ∈ J∖J_E), ∂/∂ū_j (j ∉ J ∪ E), ū_j∂/∂ū_j (j ∈ E∖J) and ∂/∂λ.
fn cl0_j_space(
    state: &HypersurfaceState,
    js: &[usize],
    core_x: &Core,
    loc: &HypersurfaceState,
    core_y: &Core,
) -> Result<Vec<Poly>> {
    let k = &state.field;
    let k2 = &loc.field;
    let m0 = k.m();
    let nj = js.len();
    let p = state.p as usize;
    let f = &core_y.initial.f[p - 1];
    let outside: Vec<usize> = (0..state.n).filter(|j| !js.contains(j)).collect();
    let hexp: Vec<u32> = js.iter().map(|&j| if j < state.e { core_x.h[j] } else { 0 }).collect();
    let mut hbar = k2.one();
    for (idx, &j) in outside.iter().enumerate() {
        if j < state.e {
            hbar = k2.mul(&hbar, &k2.pow(&k2.var(m0 + idx), core_x.h[j] as u64));
        }
    }
    let hbar_inv = k2.inv(&hbar);
    let mut derived = vec![];
    for t in 0..nj {
        if js[t] < state.e {
            derived.push(f.derive(k2, Derivation::Log(t)));
        } else {
            let d = f.derive(k2, Derivation::Plain(t));
            for s in 0..nj {
                derived.push(d.mul(k2, &Poly::var(k2, nj, s)));
            }
        }
    }
    for (idx, &j) in outside.iter().enumerate() {
        let d = f.derive(k2, Derivation::Const(m0 + idx));
        if j < state.e {
            derived.push(d.scale(k2, &k2.var(m0 + idx)));
        } else {
            derived.push(d);
        }
    }
    for l in 0..m0 {
        derived.push(f.derive(k2, Derivation::Const(l)));
    }
    let mask: Vec<bool> = (0..k2.m()).map(|l| l >= m0).collect();
    let mut out = vec![];
    for g in derived {
        let g = g
            .div_monomial(&hexp)
            .ok_or_else(|| Error::Condition("derivative of F_p,W not divisible by H_W".into()))?;
        let mut r = Poly::zero(nj);
        for (e, c) in &g.terms {
            let c = k2.mul(c, &hbar_inv);
            let c0 = k2
                .eval_zero(&c, &mask)
                .ok_or_else(|| Error::Condition("H_W^-1 D F_p,W has a pole along W".into()))?;
            let c0 = k.restrict(&c0).expect("no residual transcendentals after cl0");
            r.add_term(k, e.clone(), c0);
        }
        out.push(r);
    }
    Ok(forms_basis(k, &out))
}

/// Translation of a non-pivot center coordinate at the chart point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Translation {
    /// u_j/u_{j0} - c with c in the residue field.
    Rational(Elem),
    /// u_j/u_{j0} - θ with θ a root of this monic irreducible polynomial
    /// (coefficients low to high); needs a finite residue field.
    Root(Vec<Elem>),
}

/// The chart u_{j0} and the point of the fiber in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartChoice {
    pub j0: usize,
    pub translations: Vec<(usize, Translation)>,
}

impl ChartChoice {
    pub fn origin(j0: usize) -> Self {
        ChartChoice { j0, translations: vec![] }
    }
}

/// (m, ω, κ₁), ordered lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Iota {
    pub m: u32,
    pub omega: u32,
    pub kappa: u8,
}

impl Iota {
    pub fn of(a: &Analysis) -> Self {
        Iota { m: a.core.m, omega: a.omega, kappa: a.kappa1.rank() }
    }
}

/// Everything computed for one chart of one blowing up.
#[derive(Debug, Clone)]
pub struct BlowupOutcome {
    /// Minimized state at x′, exceptional coordinates first.
    pub state: HypersurfaceState,
    pub status: MinimizeStatus,
    /// Old coordinate index of each new coordinate.
    pub index_map: Vec<usize>,
    /// Residue field modulus when a root was adjoined (low to high over F_p).
    pub extension: Option<Vec<u32>>,
    pub center: Center,
    /// Δ′ = l(Δ) and Δ′ minimal; only for origin charts.
    pub origin_check: Option<bool>,
    /// H(x′) = u^{ε(y)−p} H(x); only when both points have m = p.
    pub h_check: Option<bool>,
    /// Chart point in PC(x, Y); only for permissible centers with ω(x) > 0.
    pub in_pc: Option<bool>,
    pub iota_before: Iota,
    pub iota_after: Option<Iota>,
    pub before: InvariantRecord,
    pub after: Option<InvariantRecord>,
    pub after_error: Option<String>,
}

impl BlowupOutcome {
    /// ι(x′) ≤ ι(x), with equality only on PC when the cone is defined.
    pub fn monotone(&self) -> Option<bool> {
        let after = self.iota_after?;
        let le = after <= self.iota_before;
        match self.in_pc {
            Some(false) => Some(after < self.iota_before),
            _ => Some(le),
        }
    }
}

/// Equations of C(x, Y) ⊆ Spec k[U_J] over k^{1/inflation}.
#[derive(Debug, Clone)]
pub struct PcCone {
    pub jset: Vec<usize>,
    pub field: Field,
    pub inflation: u32,
    /// Echelon rows, one coefficient per element of J.
    pub equations: Vec<Row>,
}

impl PcCone {
    /// True if the direction with coordinates v (indexed like J) lies on C.
    pub fn contains(&self, v: &[Elem]) -> bool {
        let k = &self.field;
        let w: Vec<Elem> = v.iter().map(|c| k.inflate(c, self.inflation)).collect();
        self.equations.iter().all(|row| {
            let s = row.iter().zip(&w).fold(k.zero(), |acc, (a, b)| k.add(&acc, &k.mul(a, b)));
            k.is_zero(&s)
        })
    }

    /// Equations as linear forms over k^{1/inflation} in U_J.
    pub fn forms(&self, names: &[String]) -> Vec<String> {
        self.equations.iter().map(|r| linear_form(&self.field, r).fmt_with(&self.field, names)).collect()
    }
}

/// C(x, Y) for a first or second kind center; `None` when ω(x) = 0.
pub fn pc_cone(state: &HypersurfaceState, analysis: &Analysis, center: &Center) -> Result<Option<PcCone>> {
    let k = &state.field;
    let js = &center.jset;
    let nj = js.len();
    match center.kind {
        CenterKind::FirstKind => {
            let Some(cone) = &analysis.cone else { return Ok(None) };
            let n = state.n;
            let kf = &cone.max.field;
            // columns reordered so that J' comes first
            let order: Vec<usize> = (0..n).filter(|j| !js.contains(j)).chain(js.iter().cloned()).collect();
            let mut rows: Vec<Row> = cone.max.basis.iter().map(|r| order.iter().map(|&j| r[j].clone()).collect()).collect();
            for &j in &cone.b_set {
                let u = unit(kf, n, j);
                rows.push(order.iter().map(|&c| u[c].clone()).collect());
            }
            let (ech, piv) = rref(kf, &rows);
            let nout = n - nj;
            let equations: Vec<Row> = ech
                .iter()
                .zip(&piv)
                .filter(|(_, &pc)| pc >= nout)
                .map(|(r, _)| r[nout..].to_vec())
                .collect();
            Ok(Some(PcCone { jset: js.clone(), field: kf.clone(), inflation: cone.max.inflation, equations }))
        }
        CenterKind::SecondKind => {
            if analysis.omega == 0 {
                return Ok(None);
            }
            let ms = max_space(k, &center.cl0_j, nj);
            let mut rows = ms.basis.clone();
            let core = &analysis.core;
            let bset = b_set(state, core);
            let j0 = second_kind_pivot(state, core, js);
            for &j in &bset {
                if Some(j) == j0 {
                    continue;
                }
                if let Some(t) = js.iter().position(|&x| x == j) {
                    rows.push(unit(&ms.field, nj, t));
                }
            }
            let equations = rref(&ms.field, &rows).0;
            Ok(Some(PcCone { jset: js.clone(), field: ms.field.clone(), inflation: ms.inflation, equations }))
        }
        _ => Ok(None),
    }
}

/// The index j0 ∈ (J′)_E with U_{j0} dividing H^{-1}G^p, when G ≠ 0.
pub fn second_kind_pivot(state: &HypersurfaceState, core: &Core, js: &[usize]) -> Option<usize> {
    let g = core.g.as_ref()?;
    (0..state.e).find(|j| !js.contains(j) && state.p * g.b[*j] > core.h[*j])
}

/// Moves the state to F_{q^d}, d = deg P, and returns the image of the
/// first root of P in enumeration order.
pub fn adjoin_root(state: &HypersurfaceState, poly: &[Elem]) -> Result<(HypersurfaceState, Elem, Vec<u32>)> {
    let k = &state.field;
    if !k.is_finite() {
        return Err(Error::Unsupported("adjoining a root needs a finite residue field".into()));
    }
    if poly.len() < 2 || !k.is_one(poly.last().unwrap()) {
        return domain("root polynomial must be monic of positive degree");
    }
    let d = (poly.len() - 1) as u32;
    let small = &k.fq;
    let modulus = find_irreducible(small.p(), small.degree() * d);
    let big = FieldCtx::extension(small.p(), &modulus)?;
    let emb = small.embedding_into(&big.fq).ok_or_else(|| Error::Domain("no embedding of residue fields".into()))?;
    let map = |c: &Elem| -> Elem { big.from_fq(small.embed(k.as_fq(c).unwrap_or(0), &big.fq, emb)) };
    let pb: Vec<u32> = poly.iter().map(|c| big.as_fq(&map(c)).unwrap_or(0)).collect();
    let bf: &Fq = &big.fq;
    let root = (0..bf.size())
        .find(|&r| pb.iter().rev().fold(0u32, |acc, &c| bf.add(bf.mul(acc, r), c)) == 0)
        .ok_or_else(|| Error::Domain("polynomial has no root in the extension; it is not irreducible".into()))?;
    if d > 1 && (0..small.size()).any(|r| {
        let ri = small.embed(r, bf, emb);
        pb.iter().rev().fold(0u32, |acc, &c| bf.add(bf.mul(acc, ri), c)) == 0
    }) {
        return domain("root polynomial has a rational root");
    }
    let moved = base_change(state, &big, &map)?;
    Ok((moved, big.from_fq(root), modulus))
}

fn base_change(state: &HypersurfaceState, big: &Field, map: &dyn Fn(&Elem) -> Elem) -> Result<HypersurfaceState> {
    let f = match &state.coeffs {
        Coeffs::Equichar(f) => f,
        _ => return Err(Error::Unsupported("base change in arithmetic mode".into())),
    };
    let mut s = state.clone();
    s.field = big.clone();
    s.coeffs = Coeffs::Equichar(f.iter().map(|g| g.map_coeffs(big, map)).collect());
    s.z_history.clear();
    Ok(s)
}

/// l: x_{j0} ↦ Σ_{j∈J} x_j − 1.
pub fn l_map(x: &[Q], js: &[usize], j0: usize) -> Vec<Q> {
    let mut y = x.to_vec();
    y[j0] = js.iter().fold(qi(-1), |acc, &j| acc + &x[j]);
    y
}

/// h′ = u_{j0}^{-p} h(u_{j0} Z′) with u_j = u_{j0} u′_j for j ∈ J∖{j0}.
pub fn origin_chart(state: &HypersurfaceState, js: &[usize], j0: usize) -> Result<HypersurfaceState> {
    let mut s = state.clone();
    s.z_history.clear();
    match &state.coeffs {
        Coeffs::Equichar(f) => {
            let mut out = vec![];
            for (i0, g) in f.iter().enumerate() {
                let i = i0 as u32 + 1;
                let mut r = Poly::zero(state.n);
                for (e, c) in &g.terms {
                    let tot: u32 = js.iter().map(|&j| e[j]).sum();
                    if tot < i {
                        return Err(Error::NotPermissible(format!("u_{} ^{i} does not divide f_{i}", j0 + 1)));
                    }
                    let mut ee = e.clone();
                    ee[j0] = tot - i;
                    r.terms.insert(ee, c.clone());
                }
                out.push(r);
            }
            s.coeffs = Coeffs::Equichar(out);
        }
        Coeffs::Arithmetic { cap, f } => {
            let pb = num_bigint::BigInt::from(state.p);
            let mut out = vec![];
            for (i0, c) in f.iter().enumerate() {
                let q = pb.pow(i0 as u32 + 1);
                if num_integer::Integer::mod_floor(c, &q) != num_bigint::BigInt::from(0) {
                    return Err(Error::NotPermissible(format!("p^{} does not divide f_{}", i0 + 1, i0 + 1)));
                }
                out.push(c / q);
            }
            s.coeffs = Coeffs::Arithmetic { cap: *cap, f: out };
        }
    }
    Ok(s)
}

/// Reorders the coordinates so that `order[t]` becomes coordinate t and the
/// first `e` are exceptional.
pub fn permute(state: &HypersurfaceState, order: &[usize], e: usize) -> Result<HypersurfaceState> {
    let n = state.n;
    let mut s = state.clone();
    s.e = e;
    s.vars = order.iter().map(|&j| state.vars[j].clone()).collect();
    if let Coeffs::Equichar(f) = &state.coeffs {
        let mut pos = vec![0; n];
        for (t, &j) in order.iter().enumerate() {
            pos[j] = t;
        }
        s.coeffs = Coeffs::Equichar(f.iter().map(|g| g.embed_vars(n, &pos)).collect());
    }
    Ok(s)
}

/// Blows up V(Z, u_J) and looks at the chosen point of the chart u_{j0}.
pub fn blowup_chart(state: &HypersurfaceState, jset: &[usize], chart: &ChartChoice) -> Result<BlowupOutcome> {
    let js = normalize_jset(state, jset)?;
    let j0 = chart.j0;
    if !js.contains(&j0) {
        return domain("chart coordinate must belong to the center");
    }
    let roots: Vec<&(usize, Translation)> =
        chart.translations.iter().filter(|(_, t)| matches!(t, Translation::Root(_))).collect();
    if roots.len() > 1 {
        return Err(Error::Unsupported("at most one adjoined root per blowing up".into()));
    }
    for (j, _) in &chart.translations {
        if !js.contains(j) || *j == j0 {
            return domain("translations are only allowed on center coordinates other than the chart");
        }
    }
    let (base, extension, cvals) = match roots.first() {
        Some((_, Translation::Root(poly))) => {
            let (moved, root, modulus) = adjoin_root(state, poly)?;
            let k = &state.field;
            let big = moved.field.clone();
            let map = |c: &Elem| big.from_fq(k.fq.embed(k.as_fq(c).unwrap_or(0), &big.fq, k.fq.embedding_into(&big.fq).unwrap()));
            let cvals: Vec<(usize, Elem)> = chart
                .translations
                .iter()
                .map(|(j, t)| match t {
                    Translation::Rational(c) => (*j, map(c)),
                    Translation::Root(_) => (*j, root.clone()),
                })
                .collect();
            (moved, Some(modulus), cvals)
        }
        _ => {
            let cvals = chart
                .translations
                .iter()
                .map(|(j, t)| match t {
                    Translation::Rational(c) => (*j, c.clone()),
                    Translation::Root(_) => unreachable!(),
                })
                .collect();
            (state.clone(), None, cvals)
        }
    };
    let k = base.field.clone();
    let cvals: Vec<(usize, Elem)> = cvals.into_iter().filter(|(_, c)| !k.is_zero(c)).collect();

    let center = classify_center(&base, &js)?;
    if center.kind == CenterKind::NotPermissible {
        return Err(Error::NotPermissible(center.reason.clone().unwrap_or_default()));
    }
    let before_a = analyze(&base)?;
    let before = before_a.record(&base);
    let iota_before = Iota::of(&before_a);

    let s0 = origin_chart(&base, &js, j0)?;
    let origin_check = if cvals.is_empty() {
        let d = polyhedron(&base)?;
        let image = NewtonPolyhedron::new(base.n, d.vertices.iter().map(|v| l_map(v, &js, j0)).collect());
        let fresh = polyhedron(&s0)?;
        Some(fresh.vertices == image.vertices && find_solvable_vertex(&s0)?.is_none())
    } else {
        None
    };

    let mut moved = s0;
    if !cvals.is_empty() {
        let n = base.n;
        let subs: Vec<Poly> = (0..n)
            .map(|j| {
                let v = Poly::var(&k, n, j);
                match cvals.iter().find(|(jj, _)| *jj == j) {
                    Some((_, c)) => v.add(&k, &Poly::constant(&k, n, c.clone())),
                    None => v,
                }
            })
            .collect();
        moved = moved.change_coordinates(&subs)?;
    }

    // E′ = div(u_{j0}) + components of E through the point
    let on_point = |j: usize| -> bool { !js.contains(&j) || j == j0 || !cvals.iter().any(|(jj, _)| *jj == j) };
    let exc: Vec<usize> = (0..base.n).filter(|&j| j == j0 || (j < base.e && on_point(j))).collect();
    let rest: Vec<usize> = (0..base.n).filter(|j| !exc.contains(j)).collect();
    let order: Vec<usize> = exc.iter().chain(rest.iter()).cloned().collect();
    let moved = permute(&moved, &order, exc.len())?;
    let mz = minimize(&moved, DEFAULT_BUDGET)?;
    let new_state = mz.state;

    let in_pc = if center.kind.is_permissible() {
        match pc_cone(&base, &before_a, &center)? {
            Some(cone) => {
                let v: Vec<Elem> = js
                    .iter()
                    .map(|&j| {
                        if j == j0 {
                            k.one()
                        } else {
                            cvals.iter().find(|(jj, _)| *jj == j).map(|(_, c)| c.clone()).unwrap_or_else(|| k.zero())
                        }
                    })
                    .collect();
                Some(cone.contains(&v))
            }
            None => None,
        }
    } else {
        None
    };

    let (after, iota_after, h_check, after_error) = match analyze(&new_state) {
        Ok(a) => {
            let h_check = match (before_a.core.m == base.p, a.core.m == base.p, center.eps_y) {
                (true, true, Some(eps_y)) => {
                    let sum: i64 = js.iter().filter(|&&j| j < base.e).map(|&j| before_a.core.h[j] as i64).sum();
                    let expected: Vec<i64> = order[..exc.len()]
                        .iter()
                        .map(|&j| if j == j0 { sum + eps_y as i64 - base.p as i64 } else { before_a.core.h[j] as i64 })
                        .collect();
                    let got: Vec<i64> = a.core.h.iter().map(|&x| x as i64).collect();
                    Some(expected == got)
                }
                _ => None,
            };
            (Some(a.record(&new_state)), Some(Iota::of(&a)), h_check, None)
        }
        Err(Error::Condition(msg)) => (None, None, None, Some(msg)),
        Err(Error::EmptyPolyhedron) => (None, None, None, Some("h = Z^p at x'".into())),
        Err(e) => return Err(e),
    };

    Ok(BlowupOutcome {
        state: new_state,
        status: mz.status,
        index_map: order,
        extension,
        center,
        origin_check,
        h_check,
        in_pc,
        iota_before,
        iota_after,
        before,
        after,
        after_error,
    })
}

/// Every k-rational point of the fiber over x: one chart per j0 ∈ J, with
/// the coordinates of J before j0 equal to zero.
pub fn rational_chart_points(k: &FieldCtx, js: &[usize]) -> Result<Vec<ChartChoice>> {
    if !k.is_finite() {
        return Err(Error::Unsupported("enumerating rational points needs a finite residue field".into()));
    }
    let q = k.fq.size();
    let mut out = vec![];
    for (pos, &j0) in js.iter().enumerate() {
        let free: Vec<usize> = js[pos + 1..].to_vec();
        let total = (q as u64).pow(free.len() as u32);
        for idx in 0..total {
            let mut t = idx;
            let mut tr = vec![];
            for &j in &free {
                let c = (t % q as u64) as u32;
                t /= q as u64;
                if c != 0 {
                    tr.push((j, Translation::Rational(k.from_fq(c))));
                }
            }
            out.push(ChartChoice { j0, translations: tr });
        }
    }
    Ok(out)
}
