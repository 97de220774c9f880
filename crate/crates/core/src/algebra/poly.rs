//! Sparse multivariate polynomials in u_1..u_n with coefficients in a `FieldCtx`.

use std::collections::BTreeMap;

use super::field::{Elem, FieldCtx};

pub type Exp = Vec<u32>;

/// Sparse polynomial; no stored zero coefficients, every key of length `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    pub n: usize,
    pub terms: BTreeMap<Exp, Elem>,
}

/// Derivation selector acting on forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivation {
    /// U_j d/dU_j
    Log(usize),
    /// d/dU_j
    Plain(usize),
    /// d/dt_l applied coefficientwise
    Const(usize),
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly { n, terms: BTreeMap::new() }
    }

    pub fn constant(k: &FieldCtx, n: usize, c: Elem) -> Self {
        Self::monomial(k, vec![0; n], c)
    }

    pub fn one(k: &FieldCtx, n: usize) -> Self {
        Self::constant(k, n, k.one())
    }

    pub fn monomial(k: &FieldCtx, exp: Exp, c: Elem) -> Self {
        let mut p = Poly::zero(exp.len());
        if !k.is_zero(&c) {
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn var(k: &FieldCtx, n: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        Self::monomial(k, e, k.one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, k: &FieldCtx, exp: Exp, c: Elem) {
        if k.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(x) => {
                let s = k.add(x, &c);
                if k.is_zero(&s) {
                    self.terms.remove(&exp);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn coeff(&self, k: &FieldCtx, exp: &[u32]) -> Elem {
        self.terms.get(exp).cloned().unwrap_or_else(|| k.zero())
    }

    pub fn add(&self, k: &FieldCtx, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(k, e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, k: &FieldCtx, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(k, e.clone(), k.neg(c));
        }
        r
    }

    pub fn neg(&self, k: &FieldCtx) -> Poly {
        Poly { n: self.n, terms: self.terms.iter().map(|(e, c)| (e.clone(), k.neg(c))).collect() }
    }

    pub fn scale(&self, k: &FieldCtx, c: &Elem) -> Poly {
        if k.is_zero(c) {
            return Poly::zero(self.n);
        }
        Poly { n: self.n, terms: self.terms.iter().map(|(e, x)| (e.clone(), k.mul(x, c))).collect() }
    }

    pub fn mul(&self, k: &FieldCtx, o: &Poly) -> Poly {
        let mut r = Poly::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Exp = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                r.add_term(k, e, k.mul(ca, cb));
            }
        }
        r
    }

    pub fn mul_monomial(&self, k: &FieldCtx, exp: &[u32], c: &Elem) -> Poly {
        let mut r = Poly::zero(self.n);
        for (e, x) in &self.terms {
            let ee: Exp = e.iter().zip(exp).map(|(a, b)| a + b).collect();
            r.add_term(k, ee, k.mul(x, c));
        }
        r
    }

    pub fn pow(&self, k: &FieldCtx, e: u64) -> Poly {
        let mut r = Poly::one(k, self.n);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(k, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(k, &base);
            }
        }
        r
    }

    /// Divides by the monomial u^exp; `None` unless every term is divisible.
    pub fn div_monomial(&self, exp: &[u32]) -> Option<Poly> {
        let mut r = Poly::zero(self.n);
        for (e, c) in &self.terms {
            if e.iter().zip(exp).any(|(a, b)| a < b) {
                return None;
            }
            r.terms.insert(e.iter().zip(exp).map(|(a, b)| a - b).collect(), c.clone());
        }
        Some(r)
    }

    /// Total degree of the lowest-degree term (the order at the origin).
    pub fn ord(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match it.next() {
            None => true,
            Some(d) => it.all(|x| x == d),
        }
    }

    /// Homogeneous component of degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Poly {
        Poly {
            n: self.n,
            terms: self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() == d).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    pub fn derive(&self, k: &FieldCtx, d: Derivation) -> Poly {
        let mut r = Poly::zero(self.n);
        match d {
            Derivation::Log(j) => {
                for (e, c) in &self.terms {
                    r.add_term(k, e.clone(), k.mul(c, &k.from_i64(e[j] as i64)));
                }
            }
            Derivation::Plain(j) => {
                for (e, c) in &self.terms {
                    if e[j] == 0 {
                        continue;
                    }
                    let mut ee = e.clone();
                    ee[j] -= 1;
                    r.add_term(k, ee, k.mul(c, &k.from_i64(e[j] as i64)));
                }
            }
            Derivation::Const(l) => {
                for (e, c) in &self.terms {
                    r.add_term(k, e.clone(), k.deriv(c, l));
                }
            }
        }
        r
    }

    /// Hasse derivative D^(alpha).
    pub fn hasse(&self, k: &FieldCtx, alpha: &[u32]) -> Poly {
        let mut r = Poly::zero(self.n);
        let p = k.p() as u64;
        for (e, c) in &self.terms {
            if e.iter().zip(alpha).any(|(a, b)| a < b) {
                continue;
            }
            let mut coef = 1u64;
            for (&a, &b) in e.iter().zip(alpha) {
                coef = coef * binom_mod_p(a as u64, b as u64, p) % p;
            }
            if coef == 0 {
                continue;
            }
            let ee: Exp = e.iter().zip(alpha).map(|(a, b)| a - b).collect();
            r.add_term(k, ee, k.mul(c, &k.from_i64(coef as i64)));
        }
        r
    }

    /// Substitutes every u_j by `subs[j]` (all with the same variable count).
    pub fn compose(&self, k: &FieldCtx, subs: &[Poly]) -> Poly {
        let n2 = subs.first().map(|s| s.n).unwrap_or(0);
        let mut cache: Vec<Vec<Poly>> = subs.iter().map(|s| vec![Poly::one(k, n2), s.clone()]).collect();
        let mut r = Poly::zero(n2);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(k, n2, c.clone());
            for (j, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                while cache[j].len() <= x as usize {
                    let next = cache[j].last().unwrap().mul(k, &subs[j]);
                    cache[j].push(next);
                }
                t = t.mul(k, &cache[j][x as usize]);
            }
            r = r.add(k, &t);
        }
        r
    }

    /// Applies a map to all coefficients, dropping those that become zero.
    pub fn map_coeffs(&self, k2: &FieldCtx, f: impl Fn(&Elem) -> Elem) -> Poly {
        let mut r = Poly::zero(self.n);
        for (e, c) in &self.terms {
            r.add_term(k2, e.clone(), f(c));
        }
        r
    }

    /// Keeps only the variables listed in `keep` (others must have exponent zero
    /// or are dropped by `f` into the coefficient).
    pub fn select_vars(&self, keep: &[usize]) -> Poly {
        let mut r = Poly::zero(keep.len());
        for (e, c) in &self.terms {
            r.terms.insert(keep.iter().map(|&j| e[j]).collect(), c.clone());
        }
        r
    }

    /// Embeds into `n2` variables, variable j going to `map[j]`.
    pub fn embed_vars(&self, n2: usize, map: &[usize]) -> Poly {
        let mut r = Poly::zero(n2);
        for (e, c) in &self.terms {
            let mut ee = vec![0; n2];
            for (j, &x) in e.iter().enumerate() {
                ee[map[j]] += x;
            }
            r.terms.insert(ee, c.clone());
        }
        r
    }

    /// Evaluates the polynomial at a point of k^n.
    pub fn eval(&self, k: &FieldCtx, pt: &[Elem]) -> Elem {
        let mut acc = k.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (j, &x) in e.iter().enumerate() {
                if x > 0 {
                    t = k.mul(&t, &k.pow(&pt[j], x as u64));
                }
            }
            acc = k.add(&acc, &t);
        }
        acc
    }

    pub fn fmt_with(&self, k: &FieldCtx, vars: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts: Vec<(String, bool)> = vec![];
        for (e, c) in self.terms.iter().rev() {
            let mut factors = vec![];
            for (j, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(vars[j].clone()),
                    _ => factors.push(format!("{}^{}", vars[j], x)),
                }
            }
            let cs = k.fmt_elem(c);
            let is_compound = cs.contains(' ') || cs.contains('/');
            let (neg, cs) = if !is_compound && cs.starts_with('-') {
                (true, cs[1..].to_string())
            } else {
                (false, cs)
            };
            let cs = if is_compound && !factors.is_empty() { format!("({cs})") } else { cs };
            let body = if factors.is_empty() {
                cs
            } else if cs == "1" {
                factors.join("*")
            } else {
                format!("{}*{}", cs, factors.join("*"))
            };
            parts.push((body, neg));
        }
        let mut out = String::new();
        for (i, (b, neg)) in parts.iter().enumerate() {
            if i == 0 {
                if *neg {
                    out.push('-');
                }
            } else {
                out.push_str(if *neg { " - " } else { " + " });
            }
            out.push_str(b);
        }
        out
    }
}

/// Binomial coefficient C(n, k) mod p by Lucas' theorem.
pub fn binom_mod_p(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let (mut n, mut k) = (n, k);
    let mut r = 1u64;
    while n > 0 || k > 0 {
        let (a, b) = (n % p, k % p);
        if b > a {
            return 0;
        }
        r = r * small_binom(a, b) % p;
        n /= p;
        k /= p;
    }
    r
}

fn small_binom(n: u64, k: u64) -> u64 {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as u64
}
