//! The invariant ladder at the origin of a well adapted state:
//! m, δ, d_j, H, ε, i₀, G, the spaces V and J of the truncated form TF,
//! ω, κ, the adapted cone Max(x), the directrix Vdir(x), τ and τ′.

pub mod conditions;
pub mod directrix;
pub mod linalg;

use serde::Serialize;

use crate::algebra::{Derivation, Elem, HypersurfaceState, Poly};
use crate::error::{Error, Result};
use crate::polyhedron::{fmt_q, initial_form, polyhedron, qi, InitialForm, Q};
use crate::prepare::{minimize, MinimizeStatus, DEFAULT_BUDGET};
use directrix::{max_space, vdir, MaxSpace};
use linalg::{forms_basis, linear_form, rank, rref, span_contains, unit, Row};

pub use conditions::{validate_conditions, ConditionReport};

/// −F_{p−1} = G^{p−1} with G = unit · U^b.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GMonomial {
    pub b: Vec<u32>,
    pub unit: Elem,
}

#[derive(Debug, Clone)]
pub struct Core {
    pub m: u32,
    pub delta: Q,
    /// d_1..d_e.
    pub d: Vec<Q>,
    /// H_j = p d_j, 1 <= j <= e.
    pub h: Vec<u32>,
    pub eps: Q,
    pub i0: usize,
    pub g: Option<GMonomial>,
    /// in_{m_S} h, the initial form for the weight (1, ..., 1).
    pub initial: InitialForm,
}

impl Core {
    /// ε as an integer; only meaningful when m = p.
    pub fn eps_int(&self) -> u32 {
        self.eps.to_integer().try_into().unwrap_or(0)
    }

    /// U^H as an exponent vector of length n.
    pub fn h_exp(&self, n: usize) -> Vec<u32> {
        let mut v = vec![0; n];
        v[..self.h.len()].copy_from_slice(&self.h);
        v
    }
}

fn ord(state: &HypersurfaceState, i: usize) -> Option<u32> {
    state.support(i).iter().map(|e| e.iter().sum::<u32>()).min()
}

/// m, δ, d, H, ε, i₀ and G at the origin; the state should be well adapted.
pub fn invariant_core(state: &HypersurfaceState) -> Result<Core> {
    let p = state.p;
    let pu = p as usize;
    let d_poly = polyhedron(state)?;
    let mut m = p;
    for i in 1..=pu {
        if let Some(o) = ord(state, i) {
            m = m.min(o + p - i as u32);
        }
    }
    let delta = d_poly.delta()?;
    let mut d = vec![];
    let mut h = vec![];
    for j in 0..state.e {
        let dj = d_poly.d(j)?;
        let hj = &dj * qi(p as i64);
        if !hj.is_integer() && m == p {
            return Err(Error::Condition(format!("p*d_{} = {} is not an integer", j + 1, fmt_q(&hj))));
        }
        h.push(hj.floor().to_integer().try_into().unwrap_or(0));
        d.push(dj);
    }
    let sum_d = d.iter().fold(Q::from_integer(0.into()), |a, x| a + x);
    let eps = (&delta - sum_d) * qi(p as i64);
    if m == p && !eps.is_integer() {
        return Err(Error::Condition(format!("epsilon = {} is not an integer", fmt_q(&eps))));
    }
    let alpha = vec![qi(1); state.n];
    let initial = initial_form(state, &alpha)?;
    let i0 = initial.i0().unwrap_or(pu);
    let eps_pos = eps > Q::from_integer(0.into());
    let mut g = None;
    if m == p && eps_pos {
        if i0 < pu - 1 {
            return Err(Error::Condition(format!("initial form has F_{i0} != 0 with i0 < p-1")));
        }
        if i0 == pu - 1 {
            g = Some(g_monomial(state, &initial)?);
        }
    }
    Ok(Core { m, delta, d, h, eps, i0, g, initial })
}

fn g_monomial(state: &HypersurfaceState, initial: &InitialForm) -> Result<GMonomial> {
    let k = &state.field;
    let p = state.p;
    let f = &initial.f[p as usize - 2];
    if f.len() != 1 {
        return Err(Error::Condition("F_{p-1} is not a monomial".into()));
    }
    let (a, c) = f.terms.iter().next().unwrap();
    if a.iter().any(|&x| x % (p - 1) != 0) || a[state.e..].iter().any(|&x| x != 0) {
        return Err(Error::Condition("F_{p-1} is not a (p-1)-th power of an exceptional monomial".into()));
    }
    let unit = k
        .kth_root(&k.neg(c), (p - 1) as u64)
        .ok_or_else(|| Error::Condition("-F_{p-1} has no (p-1)-th root in the residue field".into()))?;
    Ok(GMonomial { b: a.iter().map(|&x| x / (p - 1)).collect(), unit })
}

/// TF_{p,Z} and the spaces V(TF) ⊆ G_{ε−1}, J(TF) ⊆ G_ε (J only when V = 0).
#[derive(Debug, Clone)]
pub struct DerivedSpaces {
    pub t_applied: bool,
    pub f: Poly,
    pub tf: Poly,
    pub v: Vec<Poly>,
    pub j: Vec<Poly>,
}

/// Terms U^a of F_p with a − (p−1)b in Δ_H(d); these form Ker T.
pub fn in_kernel_of_t(a: &[u32], b: &[u32], h: &[u32], p: u32) -> bool {
    a.iter().enumerate().all(|(j, &x)| {
        let y = x as i64 - (p as i64 - 1) * b[j] as i64;
        y >= 0 && (j >= h.len() || p as i64 * y >= h[j] as i64)
    })
}

pub fn derived_spaces(state: &HypersurfaceState, core: &Core) -> Result<DerivedSpaces> {
    let k = &state.field;
    let n = state.n;
    let p = state.p as usize;
    let f = core.initial.f[p - 1].clone();
    let (tf, t_applied) = match &core.g {
        Some(g) => {
            let mut tf = Poly::zero(n);
            for (a, c) in &f.terms {
                if !in_kernel_of_t(a, &g.b, &core.h, state.p) {
                    tf.add_term(k, a.clone(), c.clone());
                }
            }
            (tf, true)
        }
        None => (f.clone(), false),
    };
    let hexp = core.h_exp(n);
    let unh = |g: Poly| -> Result<Poly> {
        g.div_monomial(&hexp).ok_or_else(|| Error::Condition("derivative not divisible by H".into()))
    };
    let mut v = vec![];
    for j in state.e..n {
        v.push(unh(tf.derive(k, Derivation::Plain(j)))?);
    }
    let v = forms_basis(k, &v);
    let mut jsp = vec![];
    if v.is_empty() {
        for j in 0..state.e {
            jsp.push(unh(tf.derive(k, Derivation::Log(j)))?);
        }
        for l in 0..k.m() {
            jsp.push(unh(tf.derive(k, Derivation::Const(l)))?);
        }
    }
    let j = forms_basis(k, &jsp);
    Ok(DerivedSpaces { t_applied, f, tf, v, j })
}

/// κ: 1, "at least 2" when the full number is not defined, or an exact value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kappa {
    One,
    AtLeastTwo,
    Exact(u8),
}

impl Kappa {
    pub fn as_string(&self) -> String {
        match self {
            Kappa::One => "1".into(),
            Kappa::AtLeastTwo => ">=2".into(),
            Kappa::Exact(x) => x.to_string(),
        }
    }
    /// Value for lexicographic comparisons; ">= 2" counts as 2.
    pub fn rank(&self) -> u8 {
        match self {
            Kappa::One => 1,
            Kappa::AtLeastTwo => 2,
            Kappa::Exact(x) => *x,
        }
    }
}

/// (ω, κ₁) from the core and the spaces.
pub fn omega_kappa(state: &HypersurfaceState, core: &Core, sp: &DerivedSpaces) -> (u32, Kappa) {
    if core.m < state.p {
        return (0, Kappa::One);
    }
    let eps = core.eps_int();
    let omega = if sp.v.is_empty() { eps } else { eps - 1 };
    let kappa = if omega == eps && core.i0 == state.p as usize - 1 { Kappa::One } else { Kappa::AtLeastTwo };
    (omega, kappa)
}

/// Max(x), Dir(x) and τ′(x).
#[derive(Debug, Clone)]
pub struct AdaptedCone {
    pub b_set: Vec<usize>,
    /// The forms G_y of the expansion in U_B of the generating space.
    pub system: Vec<Poly>,
    pub vdir: Vec<Row>,
    pub tau_prime: usize,
    pub max: MaxSpace,
    /// Codimension of Max(x) = Max(system) ∩ {U_B = 0}.
    pub max_codim: usize,
    pub max_neq_dir: bool,
}

pub fn b_set(state: &HypersurfaceState, core: &Core) -> Vec<usize> {
    match &core.g {
        Some(g) => (0..state.e).filter(|&j| state.p * g.b[j] > core.h[j]).collect(),
        None => vec![],
    }
}

/// Expands each generator as sum_y U_B^y G_y(U_{B'}) and returns the G_y.
pub fn expand_in(gens: &[Poly], bset: &[usize]) -> Vec<Poly> {
    let mut out = vec![];
    for g in gens {
        let mut parts: std::collections::BTreeMap<Vec<u32>, Poly> = Default::default();
        for (e, c) in &g.terms {
            let key: Vec<u32> = bset.iter().map(|&j| e[j]).collect();
            let mut rest = e.clone();
            for &j in bset {
                rest[j] = 0;
            }
            parts.entry(key).or_insert_with(|| Poly::zero(g.n)).terms.insert(rest, c.clone());
        }
        out.extend(parts.into_values());
    }
    out
}

pub fn adapted_cone(
    state: &HypersurfaceState,
    core: &Core,
    sp: &DerivedSpaces,
    omega: u32,
) -> AdaptedCone {
    let k = &state.field;
    let n = state.n;
    let bset = b_set(state, core);
    let gens = if omega + 1 == core.eps_int() { &sp.v } else { &sp.j };
    let system = expand_in(gens, &bset);
    let mut rows = vdir(k, &system, n);
    rows.extend(bset.iter().map(|&j| unit(k, n, j)));
    let vd = rref(k, &rows).0;
    let max = max_space(k, &system, n);
    let mut mrows = max.basis.clone();
    mrows.extend(bset.iter().map(|&j| unit(&max.field, n, j)));
    let max_codim = rank(&max.field, &mrows);
    let tau_prime = vd.len();
    AdaptedCone { b_set: bset, system, vdir: vd, tau_prime, max, max_codim, max_neq_dir: max_codim < tau_prime }
}

/// τ(x): dimension of the directrix of the degree-m initial form of h in (U, Z).
pub fn tau(state: &HypersurfaceState, m: u32) -> usize {
    let k = &state.field;
    let n = state.n;
    let p = state.p;
    let mut f = Poly::zero(n + 1);
    if m == p {
        let mut e = vec![0; n + 1];
        e[n] = p;
        f.add_term(k, e, k.one());
    }
    for i in 1..=p as usize {
        for a in state.support(i) {
            if a.iter().sum::<u32>() + p - i as u32 == m {
                let mut e = a.clone();
                e.push(p - i as u32);
                f.add_term(k, e, state.term_residue(i, &a));
            }
        }
    }
    vdir(k, &[f], n + 1).len()
}

/// Result of the projection-number search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KappaFull {
    pub kappa: Kappa,
    /// False when the coordinate search of the κ = 3 test could miss solutions.
    pub exhaustive: bool,
}

/// True if every directrix form only involves U_1..U_e.
pub fn vdir_in_exceptional(vd: &[Row], e: usize) -> bool {
    vd.iter().all(|r| r[e..].iter().all(|c| c.num.is_zero()))
}

/// Full κ for n = 3 (and the codimension-two rule for n = 2).
pub fn kappa_full(state: &HypersurfaceState, core: &Core, omega: u32, k1: Kappa, cone: &AdaptedCone) -> Result<KappaFull> {
    if k1 == Kappa::One {
        return Ok(KappaFull { kappa: Kappa::One, exhaustive: true });
    }
    let eps = core.eps_int();
    let e = state.e;
    let exact = |x| Ok(KappaFull { kappa: Kappa::Exact(x), exhaustive: true });
    match state.n {
        2 => {
            if e == 2 {
                return exact(4);
            }
            if e == 1 {
                if omega + 1 == eps {
                    return exact(3);
                }
                return if vdir_in_exceptional(&cone.vdir, 1) { exact(4) } else { exact(2) };
            }
            Ok(KappaFull { kappa: Kappa::AtLeastTwo, exhaustive: true })
        }
        3 => {
            if vdir_in_exceptional(&cone.vdir, e) {
                return exact(4);
            }
            if omega + 1 == eps {
                if e == 2 {
                    return exact(3);
                }
                if e == 1 {
                    let (ok, exhaustive) = kappa3_clause_one(state, core, omega, cone)?;
                    return Ok(KappaFull { kappa: Kappa::Exact(if ok { 3 } else { 2 }), exhaustive });
                }
            }
            exact(2)
        }
        _ => Err(Error::Unsupported("full projection number needs n = 3".into())),
    }
}

/// E = div(u1): looks for well adapted coordinates with Vdir ⊆ <U1, U3> and
/// H^{-1} ∂F_p/∂U2 ∈ k·U1^ω. The only candidate direction for U3 is Vdir
/// modulo U1.
fn kappa3_clause_one(state: &HypersurfaceState, core: &Core, omega: u32, cone: &AdaptedCone) -> Result<(bool, bool)> {
    let k = &state.field;
    let n = 3;
    let exhaustive = core.i0 != state.p as usize - 1;
    let mut rows = cone.vdir.clone();
    rows.push(unit(k, n, 0));
    let (w, _) = rref(k, &rows);
    if w.len() != 2 {
        return Ok((false, exhaustive));
    }
    let l = &w[1];
    let (a, b) = (l[1].clone(), l[2].clone());
    let var = |j| Poly::var(k, n, j);
    let subs = if !b.num.is_zero() {
        // u3' = a u2 + b u3, u2' = u2
        let u3 = var(2).sub(k, &var(1).scale(k, &a)).scale(k, &k.inv(&b));
        vec![var(0), var(1), u3]
    } else {
        // u3' = a u2, u2' = u3
        vec![var(0), var(2).scale(k, &k.inv(&a)), var(1)]
    };
    let moved = state.change_coordinates(&subs)?;
    let mz = minimize(&moved, DEFAULT_BUDGET)?;
    if mz.status != MinimizeStatus::Minimal {
        return Ok((false, false));
    }
    let c2 = invariant_core(&mz.state)?;
    let fp = &c2.initial.f[state.p as usize - 1];
    let dv = fp.derive(k, Derivation::Plain(1));
    let Some(q) = dv.div_monomial(&c2.h_exp(n)) else { return Ok((false, exhaustive)) };
    let ok = q.is_zero() || (q.len() == 1 && q.terms.keys().next().unwrap() == &vec![omega, 0, 0]);
    Ok((ok, exhaustive))
}

/// Everything computed at the origin of a well adapted state.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub core: Core,
    pub spaces: DerivedSpaces,
    pub omega: u32,
    pub kappa1: Kappa,
    pub kappa: KappaFull,
    pub cone: Option<AdaptedCone>,
    pub tau: usize,
}

pub fn analyze(state: &HypersurfaceState) -> Result<Analysis> {
    let core = invariant_core(state)?;
    let eps_pos = core.m == state.p && core.eps_int() > 0;
    let spaces = if eps_pos {
        derived_spaces(state, &core)?
    } else {
        let z = Poly::zero(state.n);
        DerivedSpaces { t_applied: false, f: core.initial.f[state.p as usize - 1].clone(), tf: z, v: vec![], j: vec![] }
    };
    let (omega, kappa1) = omega_kappa(state, &core, &spaces);
    let mut cone = None;
    let mut kappa = KappaFull { kappa: kappa1, exhaustive: true };
    if core.m == state.p && omega > 0 {
        let c = adapted_cone(state, &core, &spaces, omega);
        if state.n <= 3 {
            kappa = kappa_full(state, &core, omega, kappa1, &c)?;
        }
        cone = Some(c);
    }
    let tau = tau(state, core.m);
    Ok(Analysis { core, spaces, omega, kappa1, kappa, cone, tau })
}

/// Name of the graded variable attached to a coordinate.
pub fn graded_name(v: &str) -> String {
    let mut cs = v.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => String::new(),
    }
}

pub fn graded_names(state: &HypersurfaceState) -> Vec<String> {
    state.vars.iter().map(|v| graded_name(v)).collect()
}

/// Flat, string-valued summary for JSON output.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct InvariantRecord {
    pub m: u32,
    pub delta: String,
    pub d: Vec<String>,
    pub h_exp: Vec<u32>,
    pub epsilon: String,
    pub i0: usize,
    pub g_monomial: Option<String>,
    pub omega: u32,
    pub kappa: String,
    pub kappa_search_exhaustive: bool,
    pub tau: usize,
    pub tau_prime: Option<usize>,
    pub directrix: Vec<String>,
    pub max_equations: Vec<String>,
    pub max_neq_dir: bool,
    pub b_set: Vec<usize>,
    pub t_applied: bool,
    pub tf: String,
    pub v_basis: Vec<String>,
    pub j_basis: Vec<String>,
}

impl Analysis {
    pub fn record(&self, state: &HypersurfaceState) -> InvariantRecord {
        let k = &state.field;
        let names = graded_names(state);
        let fmt = |f: &Poly| f.fmt_with(k, &names);
        let g_monomial = self.core.g.as_ref().map(|g| fmt(&Poly::monomial(k, g.b.clone(), g.unit.clone())));
        let (tau_prime, directrix, max_equations, max_neq_dir, b_set) = match &self.cone {
            Some(c) => {
                let mut maxeq: Vec<String> = c.max.generators(k).iter().map(fmt).collect();
                maxeq.extend(c.b_set.iter().map(|&j| names[j].clone()));
                (
                    Some(c.tau_prime),
                    c.vdir.iter().map(|r| fmt(&linear_form(k, r))).collect(),
                    maxeq,
                    c.max_neq_dir,
                    c.b_set.iter().map(|j| j + 1).collect(),
                )
            }
            None => (None, vec![], vec![], false, vec![]),
        };
        InvariantRecord {
            m: self.core.m,
            delta: fmt_q(&self.core.delta),
            d: self.core.d.iter().map(fmt_q).collect(),
            h_exp: self.core.h.clone(),
            epsilon: fmt_q(&self.core.eps),
            i0: self.core.i0,
            g_monomial,
            omega: self.omega,
            kappa: self.kappa.kappa.as_string(),
            kappa_search_exhaustive: self.kappa.exhaustive,
            tau: self.tau,
            tau_prime,
            directrix,
            max_equations,
            max_neq_dir,
            b_set,
            t_applied: self.spaces.t_applied,
            tf: fmt(&self.spaces.tf),
            v_basis: self.spaces.v.iter().map(fmt).collect(),
            j_basis: self.spaces.j.iter().map(fmt).collect(),
        }
    }
}

/// True if the span of `small` lies in the span of `big` (forms given as rows).
pub fn subspace(state: &HypersurfaceState, big: &[Row], small: &[Row]) -> bool {
    span_contains(&state.field, big, small)
}
