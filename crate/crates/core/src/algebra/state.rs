//! The triple (S, h, E): coefficients f_1..f_p of h = Z^p + f_1 Z^{p-1} + ... + f_p,
//! the exceptional divisor E = div(u_1...u_e), and the history of Z-translations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::{Elem, Field, FieldCtx};
use super::poly::{binom_mod_p, Exp, Poly};
use crate::error::{domain, Error, Result};

/// Coefficients of h in the two supported base modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coeffs {
    /// S = k[u_1..u_n] localized at the origin.
    Equichar(Vec<Poly>),
    /// S = Z_(p), n = 1 and u_1 = p; integers tracked exactly.
    Arithmetic { cap: u64, f: Vec<BigInt> },
}

/// A translation Z <- Z - phi that was applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shift {
    Poly(Poly),
    Int(BigInt),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypersurfaceState {
    pub p: u32,
    pub n: usize,
    pub e: usize,
    pub vars: Vec<String>,
    /// Residue field; F_p in arithmetic mode.
    pub field: Field,
    pub coeffs: Coeffs,
    pub z_history: Vec<Shift>,
}

/// p-adic order of a nonzero integer.
pub fn vp(x: &BigInt, p: u32) -> u64 {
    let pb = BigInt::from(p);
    let mut x = x.clone();
    let mut k = 0;
    while !x.is_zero() && x.is_multiple_of(&pb) {
        x /= &pb;
        k += 1;
    }
    k
}

impl HypersurfaceState {
    pub fn equichar(field: Field, vars: Vec<String>, e: usize, f: Vec<Poly>) -> Result<Self> {
        let p = field.p();
        let n = vars.len();
        if n == 0 {
            return domain("at least one variable is required");
        }
        if e > n {
            return domain("more exceptional components than variables");
        }
        if f.len() != p as usize {
            return domain(format!("expected {p} coefficients, got {}", f.len()));
        }
        if f.iter().any(|g| g.n != n) {
            return domain("coefficient variable count mismatch");
        }
        Ok(HypersurfaceState { p, n, e, vars, field, coeffs: Coeffs::Equichar(f), z_history: vec![] })
    }

    pub fn arithmetic(p: u32, cap: u64, f: Vec<BigInt>) -> Result<Self> {
        let field = FieldCtx::prime(p)?;
        if f.len() != p as usize {
            return domain(format!("expected {p} coefficients, got {}", f.len()));
        }
        Ok(HypersurfaceState {
            p,
            n: 1,
            e: 1,
            vars: vec!["p".into()],
            field,
            coeffs: Coeffs::Arithmetic { cap, f },
            z_history: vec![],
        })
    }

    pub fn is_arithmetic(&self) -> bool {
        matches!(self.coeffs, Coeffs::Arithmetic { .. })
    }

    pub fn polys(&self) -> Option<&[Poly]> {
        match &self.coeffs {
            Coeffs::Equichar(f) => Some(f),
            _ => None,
        }
    }

    /// f_i for 1 <= i <= p (equicharacteristic mode).
    pub fn f(&self, i: usize) -> &Poly {
        match &self.coeffs {
            Coeffs::Equichar(f) => &f[i - 1],
            _ => panic!("polynomial coefficients requested in arithmetic mode"),
        }
    }

    pub fn is_purely_inseparable(&self) -> bool {
        match &self.coeffs {
            Coeffs::Equichar(f) => f[..f.len() - 1].iter().all(|g| g.is_zero()),
            Coeffs::Arithmetic { f, .. } => f[..f.len() - 1].iter().all(|g| g.is_zero()),
        }
    }

    pub fn is_trivial(&self) -> bool {
        match &self.coeffs {
            Coeffs::Equichar(f) => f.iter().all(|g| g.is_zero()),
            Coeffs::Arithmetic { f, .. } => f.iter().all(|g| g.is_zero()),
        }
    }

    /// Exponents of the support of f_i.
    pub fn support(&self, i: usize) -> Vec<Exp> {
        match &self.coeffs {
            Coeffs::Equichar(f) => f[i - 1].terms.keys().cloned().collect(),
            Coeffs::Arithmetic { f, .. } => {
                if f[i - 1].is_zero() {
                    vec![]
                } else {
                    vec![vec![vp(&f[i - 1], self.p) as u32]]
                }
            }
        }
    }

    /// Residue-field coefficient of the term u^exp in f_i (zero if absent).
    pub fn term_residue(&self, i: usize, exp: &[u32]) -> Elem {
        match &self.coeffs {
            Coeffs::Equichar(f) => f[i - 1].coeff(&self.field, exp),
            Coeffs::Arithmetic { f, .. } => {
                let x = &f[i - 1];
                if x.is_zero() || vp(x, self.p) != exp[0] as u64 {
                    return self.field.zero();
                }
                let unit = x / BigInt::from(self.p).pow(exp[0]);
                let r = unit.mod_floor(&BigInt::from(self.p)).to_i64().unwrap();
                self.field.from_i64(r)
            }
        }
    }

    /// Applies Z <- Z - phi, i.e. h(Z' + phi) expanded in Z'.
    pub fn translate_poly(&self, phi: &Poly) -> Result<Self> {
        let k = &self.field;
        let f = match &self.coeffs {
            Coeffs::Equichar(f) => f,
            _ => return domain("polynomial translation in arithmetic mode"),
        };
        let p = self.p as usize;
        let pw: Vec<Poly> = (0..=p).map(|e| phi.pow(k, e as u64)).collect();
        let mut out = Vec::with_capacity(p);
        for i in 1..=p {
            let b = binom_mod_p(p as u64, i as u64, self.p as u64);
            let mut acc = pw[i].scale(k, &k.from_i64(b as i64));
            for j in 1..=i {
                let c = binom_mod_p((p - j) as u64, (i - j) as u64, self.p as u64);
                if c == 0 || f[j - 1].is_zero() {
                    continue;
                }
                acc = acc.add(k, &f[j - 1].mul(k, &pw[i - j]).scale(k, &k.from_i64(c as i64)));
            }
            out.push(acc);
        }
        let mut s = self.clone();
        s.coeffs = Coeffs::Equichar(out);
        s.z_history.push(Shift::Poly(phi.clone()));
        Ok(s)
    }

    /// Integer translation in arithmetic mode.
    pub fn translate_int(&self, phi: &BigInt) -> Result<Self> {
        let (cap, f) = match &self.coeffs {
            Coeffs::Arithmetic { cap, f } => (*cap, f),
            _ => return domain("integer translation in equicharacteristic mode"),
        };
        let p = self.p as usize;
        if !phi.is_zero() {
            let needed = vp(phi, self.p) * self.p as u64;
            if needed > cap {
                return Err(Error::PrecisionExceeded { needed, cap });
            }
        }
        let binom = |n: usize, k: usize| -> BigInt {
            let mut r = BigInt::one();
            for t in 0..k {
                r = r * BigInt::from(n - t) / BigInt::from(t + 1);
            }
            r
        };
        let mut out = Vec::with_capacity(p);
        for i in 1..=p {
            let mut acc = binom(p, i) * phi.pow(i as u32);
            for j in 1..=i {
                acc += binom(p - j, i - j) * &f[j - 1] * phi.pow((i - j) as u32);
            }
            out.push(acc);
        }
        let mut s = self.clone();
        s.coeffs = Coeffs::Arithmetic { cap, f: out };
        s.z_history.push(Shift::Int(phi.clone()));
        Ok(s)
    }

    /// The state re-expressed at the generic point of V(u_j, j in J): variables
    /// outside J become transcendentals of the residue field.
    pub fn localize(&self, jset: &[usize]) -> Result<Self> {
        let f = match &self.coeffs {
            Coeffs::Equichar(f) => f,
            _ => return Err(Error::Unsupported("localization in arithmetic mode".into())),
        };
        if jset.is_empty() {
            return domain("localization needs a nonempty coordinate set");
        }
        let mut js: Vec<usize> = jset.to_vec();
        js.sort_unstable();
        js.dedup();
        if js.iter().any(|&j| j >= self.n) {
            return domain("coordinate index out of range");
        }
        if js.len() == self.n {
            return Ok(self.clone());
        }
        let outside: Vec<usize> = (0..self.n).filter(|j| !js.contains(j)).collect();
        let extra: Vec<String> = outside.iter().map(|&j| bar_name(&self.vars[j])).collect();
        let k2 = self.field.with_names(&extra)?;
        let m0 = self.field.m();
        let tmap: Vec<usize> = (0..m0).collect();
        let mut out = Vec::with_capacity(f.len());
        for g in f {
            let mut r = Poly::zero(js.len());
            for (e, c) in &g.terms {
                let mut coef = k2.import(c, &tmap);
                for (idx, &j) in outside.iter().enumerate() {
                    if e[j] > 0 {
                        coef = k2.mul(&coef, &k2.pow(&k2.var(m0 + idx), e[j] as u64));
                    }
                }
                r.add_term(&k2, js.iter().map(|&j| e[j]).collect(), coef);
            }
            out.push(r);
        }
        let e2 = js.iter().filter(|&&j| j < self.e).count();
        let vars = js.iter().map(|&j| self.vars[j].clone()).collect();
        Ok(HypersurfaceState { p: self.p, n: js.len(), e: e2, vars, field: k2, coeffs: Coeffs::Equichar(out), z_history: vec![] })
    }

    /// Moves the state to a larger field `k2` whose first transcendentals are
    /// those of `self.field` (same F_q).
    pub fn with_field(&self, k2: &Field) -> Result<Self> {
        let f = match &self.coeffs {
            Coeffs::Equichar(f) => f,
            _ => return Err(Error::Unsupported("field change in arithmetic mode".into())),
        };
        let tmap: Vec<usize> = (0..self.field.m()).collect();
        let out = f.iter().map(|g| g.map_coeffs(k2, |c| k2.import(c, &tmap))).collect();
        let mut s = self.clone();
        s.field = k2.clone();
        s.coeffs = Coeffs::Equichar(out);
        s.z_history.clear();
        Ok(s)
    }

    /// Substitutes u_j <- subs[j] in every coefficient (polynomials in n variables).
    pub fn change_coordinates(&self, subs: &[Poly]) -> Result<Self> {
        let f = match &self.coeffs {
            Coeffs::Equichar(f) => f,
            _ => return Err(Error::Unsupported("coordinate change in arithmetic mode".into())),
        };
        let k = &self.field;
        let mut s = self.clone();
        s.coeffs = Coeffs::Equichar(f.iter().map(|g| g.compose(k, subs)).collect());
        s.z_history.clear();
        Ok(s)
    }

    /// h as a polynomial in (u_1..u_n, Z).
    pub fn h_poly(&self) -> Poly {
        let k = &self.field;
        let p = self.p;
        let mut h = Poly::zero(self.n + 1);
        let mut lead = vec![0; self.n + 1];
        lead[self.n] = p;
        h.add_term(k, lead, k.one());
        for i in 1..=p as usize {
            for (e, c) in &self.f(i).terms {
                let mut ee = e.clone();
                ee.push(p - i as u32);
                h.add_term(k, ee, c.clone());
            }
        }
        h
    }

    /// Canonical text form of h in the input grammar.
    pub fn h_string(&self) -> String {
        match &self.coeffs {
            Coeffs::Equichar(_) => {
                let mut vars = self.vars.clone();
                vars.push("Z".into());
                self.h_poly().fmt_with(&self.field, &vars)
            }
            Coeffs::Arithmetic { f, .. } => {
                let mut s = format!("X^{}", self.p);
                for (i, c) in f.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let pow = self.p as usize - i - 1;
                    let xs = match pow {
                        0 => String::new(),
                        1 => "*X".into(),
                        _ => format!("*X^{pow}"),
                    };
                    if c.is_negative() {
                        s.push_str(&format!(" - {}{}", -c, xs));
                    } else {
                        s.push_str(&format!(" + {c}{xs}"));
                    }
                }
                s
            }
        }
    }
}

/// Name of the residue of a coordinate after localization.
pub fn bar_name(v: &str) -> String {
    match v.strip_prefix('u') {
        Some(rest) if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) => format!("ubar{rest}"),
        _ => format!("{v}bar"),
    }
}

/// Minimal generators of the monomial ideal of J-exponents of `f`, with
/// cofactors; each term goes to the lexicographically smallest generator it
/// is divisible by.
pub fn monomial_expansion(k: &FieldCtx, f: &Poly, jset: &[usize]) -> Result<Vec<(Exp, Poly)>> {
    if f.is_zero() {
        return domain("monomial expansion of the zero polynomial");
    }
    let proj = |e: &Exp| -> Exp { jset.iter().map(|&j| e[j]).collect() };
    let mut cands: Vec<Exp> = f.terms.keys().map(proj).collect();
    cands.sort();
    cands.dedup();
    let divides = |a: &Exp, b: &Exp| a.iter().zip(b).all(|(x, y)| x <= y);
    let gens: Vec<Exp> = cands
        .iter()
        .filter(|a| !cands.iter().any(|b| b != *a && divides(b, a)))
        .cloned()
        .collect();
    let mut out: Vec<(Exp, Poly)> = gens.iter().map(|g| (g.clone(), Poly::zero(f.n))).collect();
    for (e, c) in &f.terms {
        let pe = proj(e);
        let idx = gens.iter().position(|g| divides(g, &pe)).expect("every exponent dominates a generator");
        let mut ee = e.clone();
        for (t, &j) in jset.iter().enumerate() {
            ee[j] -= gens[idx][t];
        }
        out[idx].1.add_term(k, ee, c.clone());
    }
    Ok(out)
}
