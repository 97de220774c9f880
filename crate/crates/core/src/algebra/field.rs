//! Coefficient fields F_q(t_1..t_m) and their elements as reduced fractions.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::fq::Fq;
use super::tpoly::{gcd, Mono, TPoly};
use crate::error::{domain, Result};

/// Field descriptor: F_q together with transcendental names (a p-basis over F_q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCtx {
    pub fq: Fq,
    pub names: Vec<String>,
}

pub type Field = Arc<FieldCtx>;

/// Element num/den with gcd(num, den) = 1 and den monic under graded-lex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem {
    pub num: TPoly,
    pub den: TPoly,
}

/// Which kind of field this is, for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Prime,
    Extension,
    RationalFunction,
}

impl FieldCtx {
    pub fn prime(p: u32) -> Result<Field> {
        Ok(Arc::new(FieldCtx { fq: Fq::prime(p)?, names: vec![] }))
    }

    pub fn extension(p: u32, modulus: &[u32]) -> Result<Field> {
        Ok(Arc::new(FieldCtx { fq: Fq::extension(p, modulus)?, names: vec![] }))
    }

    pub fn rational_functions(fq: Fq, names: Vec<String>) -> Result<Field> {
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return domain(format!("duplicate transcendental {a}"));
            }
        }
        Ok(Arc::new(FieldCtx { fq, names }))
    }

    pub fn kind(&self) -> FieldKind {
        if !self.names.is_empty() {
            FieldKind::RationalFunction
        } else if self.fq.degree() > 1 {
            FieldKind::Extension
        } else {
            FieldKind::Prime
        }
    }

    pub fn p(&self) -> u32 {
        self.fq.p()
    }

    pub fn m(&self) -> usize {
        self.names.len()
    }

    pub fn is_finite(&self) -> bool {
        self.names.is_empty()
    }

    /// Field with extra transcendentals appended.
    pub fn with_names(&self, extra: &[String]) -> Result<Field> {
        let mut names = self.names.clone();
        names.extend(extra.iter().cloned());
        FieldCtx::rational_functions(self.fq.clone(), names)
    }

    pub fn zero(&self) -> Elem {
        Elem { num: TPoly::zero(self.m()), den: TPoly::constant(self.m(), 1) }
    }

    pub fn one(&self) -> Elem {
        self.from_fq(1)
    }

    pub fn from_fq(&self, c: u32) -> Elem {
        Elem { num: TPoly::constant(self.m(), c), den: TPoly::constant(self.m(), 1) }
    }

    pub fn from_i64(&self, n: i64) -> Elem {
        self.from_fq(self.fq.from_i64(n))
    }

    pub fn var(&self, l: usize) -> Elem {
        Elem { num: TPoly::var(self.m(), l), den: TPoly::constant(self.m(), 1) }
    }

    pub fn var_by_name(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name).map(|l| self.var(l))
    }

    /// The generator of F_q over F_p.
    pub fn generator(&self) -> Elem {
        self.from_fq(self.fq.generator())
    }

    pub fn from_tpoly(&self, num: TPoly) -> Elem {
        Elem { num, den: TPoly::constant(self.m(), 1) }
    }

    fn normalize(&self, num: TPoly, den: TPoly) -> Elem {
        let f = &self.fq;
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return self.zero();
        }
        if self.m() == 0 {
            let c = f.mul(num.as_constant().unwrap(), f.inv(den.as_constant().unwrap()));
            return self.from_fq(c);
        }
        let g = gcd(f, &num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(f, &g).unwrap(), den.div_exact(f, &g).unwrap())
        };
        let lc = den.lead().unwrap().1;
        let li = f.inv(lc);
        Elem { num: num.scale(f, li), den: den.scale(f, li) }
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        a.num.is_zero()
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        a.den.as_constant() == Some(1) && a.num.as_constant() == Some(1)
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        let f = &self.fq;
        if a.num.is_zero() {
            return b.clone();
        }
        if b.num.is_zero() {
            return a.clone();
        }
        if self.m() == 0 {
            return self.from_fq(f.add(a.num.as_constant().unwrap(), b.num.as_constant().unwrap()));
        }
        if a.den == b.den {
            return self.normalize(a.num.add(f, &b.num), a.den.clone());
        }
        let num = a.num.mul(f, &b.den).add(f, &b.num.mul(f, &a.den));
        self.normalize(num, a.den.mul(f, &b.den))
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        Elem { num: a.num.neg(&self.fq), den: a.den.clone() }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let f = &self.fq;
        if a.num.is_zero() || b.num.is_zero() {
            return self.zero();
        }
        if self.m() == 0 {
            return self.from_fq(f.mul(a.num.as_constant().unwrap(), b.num.as_constant().unwrap()));
        }
        self.normalize(a.num.mul(f, &b.num), a.den.mul(f, &b.den))
    }

    pub fn inv(&self, a: &Elem) -> Elem {
        assert!(!a.num.is_zero(), "inverse of zero");
        self.normalize(a.den.clone(), a.num.clone())
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Elem {
        self.mul(a, &self.inv(b))
    }

    pub fn pow(&self, a: &Elem, e: u64) -> Elem {
        let mut r = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        r
    }

    /// Root r with r^p = a, when one exists.
    pub fn pth_root(&self, a: &Elem) -> Option<Elem> {
        let p = self.p();
        let f = &self.fq;
        let root = |t: &TPoly| -> Option<TPoly> {
            let mut r = TPoly::zero(t.m);
            for (k, &c) in &t.terms {
                if k.iter().any(|&e| e % p != 0) {
                    return None;
                }
                r.terms.insert(k.iter().map(|&e| e / p).collect(), f.pth_root(c));
            }
            Some(r)
        };
        let n = root(&a.num)?;
        let d = root(&a.den)?;
        Some(Elem { num: n, den: d })
    }

    /// Some k-th root of `a` (k prime to p), when one exists.
    pub fn kth_root(&self, a: &Elem, k: u64) -> Option<Elem> {
        if a.num.is_zero() {
            return Some(self.zero());
        }
        let n = tpoly_kth_root(&self.fq, &a.num, k)?;
        let d = tpoly_kth_root(&self.fq, &a.den, k)?;
        let d = d.monic(&self.fq);
        let r = self.normalize(n, d);
        if self.pow(&r, k) == *a {
            return Some(r);
        }
        for u in 1..self.fq.size() {
            let c = self.from_fq(u);
            let rr = self.mul(&r, &c);
            if self.pow(&rr, k) == *a {
                return Some(rr);
            }
        }
        None
    }

    /// Derivation d/dt_l (quotient rule).
    pub fn deriv(&self, a: &Elem, l: usize) -> Elem {
        let f = &self.fq;
        if a.num.is_zero() {
            return self.zero();
        }
        let num = a.num.deriv(f, l).mul(f, &a.den).sub(f, &a.num.mul(f, &a.den.deriv(f, l)));
        if num.is_zero() {
            return self.zero();
        }
        self.normalize(num, a.den.mul(f, &a.den))
    }

    /// Components c_mu with a = sum_mu c_mu^q t^mu, mu in [0, q)^m, q = p^level.
    pub fn pbasis_split(&self, a: &Elem, q: u64) -> BTreeMap<Mono, Elem> {
        let f = &self.fq;
        let mut out = BTreeMap::new();
        if a.num.is_zero() {
            return out;
        }
        // a = num * den^(q-1) / den^q
        let numer = a.num.mul(f, &a.den.pow(f, q - 1));
        let mut comps: BTreeMap<Mono, TPoly> = BTreeMap::new();
        let qroot = |c: u32| -> u32 {
            let mut r = c;
            let steps = ilog(q, self.p() as u64);
            for _ in 0..steps {
                r = f.pth_root(r);
            }
            r
        };
        for (k, &c) in &numer.terms {
            let mu: Mono = k.iter().map(|&e| (e as u64 % q) as u32).collect();
            let rest: Mono = k.iter().map(|&e| (e as u64 / q) as u32).collect();
            let entry = comps.entry(mu).or_insert_with(|| TPoly::zero(self.m()));
            entry.terms.insert(rest, qroot(c));
        }
        for (mu, t) in comps {
            let e = self.normalize(t, a.den.clone());
            if !e.num.is_zero() {
                out.insert(mu, e);
            }
        }
        out
    }

    /// Image of `a` under t_l -> t_l^k for every l (exponents scaled by k).
    pub fn inflate(&self, a: &Elem, k: u32) -> Elem {
        let sc = |t: &TPoly| TPoly {
            m: t.m,
            terms: t.terms.iter().map(|(mo, &c)| (mo.iter().map(|&e| e * k).collect(), c)).collect(),
        };
        Elem { num: sc(&a.num), den: sc(&a.den) }
    }

    /// Inverse of `inflate` when every exponent is divisible by k.
    pub fn deflate(&self, a: &Elem, k: u32) -> Option<Elem> {
        let sc = |t: &TPoly| -> Option<TPoly> {
            let mut r = TPoly::zero(t.m);
            for (mo, &c) in &t.terms {
                if mo.iter().any(|&e| e % k != 0) {
                    return None;
                }
                r.terms.insert(mo.iter().map(|&e| e / k).collect(), c);
            }
            Some(r)
        };
        Some(Elem { num: sc(&a.num)?, den: sc(&a.den)? })
    }

    /// Substitutes t_l = 0 for masked transcendentals; `None` if a denominator vanishes.
    pub fn eval_zero(&self, a: &Elem, mask: &[bool]) -> Option<Elem> {
        let d = a.den.eval_zero(mask);
        if d.is_zero() {
            return None;
        }
        let n = a.num.eval_zero(mask);
        Some(self.normalize(n, d))
    }

    /// Image of `a` (an element of `src`) in `self`, where `map[l]` is the index
    /// of src's t_l in `self`.
    pub fn import(&self, a: &Elem, map: &[usize]) -> Elem {
        self.normalize(a.num.remap(self.m(), map), a.den.remap(self.m(), map))
    }

    /// Image in `self` of an element of a field whose first transcendentals are
    /// those of `self`; `None` if it involves any of the others.
    pub fn restrict(&self, a: &Elem) -> Option<Elem> {
        let m = self.m();
        let cut = |t: &TPoly| -> Option<TPoly> {
            let mut r = TPoly::zero(m);
            for (mo, &c) in &t.terms {
                if mo[m.min(mo.len())..].iter().any(|&e| e > 0) {
                    return None;
                }
                r.terms.insert(mo[..m].to_vec(), c);
            }
            Some(r)
        };
        Some(self.normalize(cut(&a.num)?, cut(&a.den)?))
    }

    /// F_q value of a constant element.
    pub fn as_fq(&self, a: &Elem) -> Option<u32> {
        if a.den.as_constant() != Some(1) {
            return None;
        }
        a.num.as_constant()
    }

    pub fn fmt_elem(&self, a: &Elem) -> String {
        if a.den.as_constant() == Some(1) {
            return self.fmt_tpoly(&a.num);
        }
        let wrap = |s: String, strict: bool| {
            if s.contains(' ') || (strict && s.contains('*')) {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{}/{}", wrap(self.fmt_tpoly(&a.num), false), wrap(self.fmt_tpoly(&a.den), true))
    }

    pub fn fmt_fq(&self, c: u32) -> String {
        if self.fq.degree() == 1 {
            // symmetric representative
            let p = self.p() as i64;
            let c = c as i64;
            if c > p / 2 && p > 2 {
                return format!("{}", c - p);
            }
            return format!("{c}");
        }
        let digits = self.fq.digits(c);
        let mut parts = vec![];
        for (i, &dgt) in digits.iter().enumerate().rev() {
            if dgt == 0 {
                continue;
            }
            let s = match i {
                0 => format!("{dgt}"),
                1 if dgt == 1 => "a".to_string(),
                1 => format!("{dgt}*a"),
                _ if dgt == 1 => format!("a^{i}"),
                _ => format!("{dgt}*a^{i}"),
            };
            parts.push(s);
        }
        if parts.is_empty() {
            "0".into()
        } else if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            format!("({})", parts.join(" + "))
        }
    }

    pub fn fmt_tpoly(&self, t: &TPoly) -> String {
        if t.is_zero() {
            return "0".into();
        }
        let mut keys: Vec<&Mono> = t.terms.keys().collect();
        keys.sort_by(|a, b| super::tpoly::grlex(b, a));
        let mut out = String::new();
        for (i, k) in keys.iter().enumerate() {
            let c = t.terms[*k];
            let mut factors = vec![];
            for (l, &e) in k.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.names[l].clone()),
                    _ => factors.push(format!("{}^{}", self.names[l], e)),
                }
            }
            let cs = self.fmt_fq(c);
            let (neg, cs) = match cs.strip_prefix('-') {
                Some(r) => (true, r.to_string()),
                None => (false, cs),
            };
            let body = if factors.is_empty() {
                cs
            } else if cs == "1" {
                factors.join("*")
            } else {
                format!("{}*{}", cs, factors.join("*"))
            };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

fn ilog(q: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut x = 1u64;
    while x < q {
        x *= p;
        k += 1;
    }
    k
}

/// k-th root of a polynomial (k prime to p) up to a constant factor, found
/// by graded-lex term-by-term extraction; `None` if no root exists.
fn tpoly_kth_root(f: &Fq, a: &TPoly, k: u64) -> Option<TPoly> {
    if k == 1 {
        return Some(a.clone());
    }
    let (lm, lc) = a.lead().map(|(m, c)| (m.clone(), c))?;
    if lm.iter().any(|&e| e as u64 % k != 0) {
        return None;
    }
    let g0c = f.kth_root(lc, k)?;
    let g0m: Mono = lm.iter().map(|&e| (e as u64 / k) as u32).collect();
    let (tm, _) = a.trailing().map(|(m, c)| (m.clone(), c))?;
    let low_deg: u64 = tm.iter().map(|&e| e as u64).sum::<u64>();
    let mut g = TPoly::monomial(a.m, g0m.clone(), g0c);
    // derivative factor k * g0^(k-1)
    let g0km1 = TPoly::monomial(a.m, g0m.clone(), g0c).pow(f, k - 1);
    let (dm, dc) = g0km1.lead().map(|(m, c)| (m.clone(), c)).unwrap();
    let kk = f.from_i64(k as i64);
    if kk == 0 {
        return None;
    }
    let denom = f.mul(dc, kk);
    for _ in 0..10_000 {
        let r = a.sub(f, &g.pow(f, k));
        if r.is_zero() {
            return Some(g);
        }
        let (rm, rc) = r.lead().map(|(m, c)| (m.clone(), c)).unwrap();
        if rm.iter().zip(&dm).any(|(x, y)| x < y) {
            return None;
        }
        let tmono: Mono = rm.iter().zip(&dm).map(|(x, y)| x - y).collect();
        let tdeg: u64 = tmono.iter().map(|&e| e as u64).sum();
        if tdeg * k < low_deg {
            return None;
        }
        g = g.add(f, &TPoly::monomial(a.m, tmono, f.mul(rc, f.inv(denom))));
    }
    None
}

/// Display adapter for an element in a given field.
pub struct ElemDisplay<'a>(pub &'a FieldCtx, pub &'a Elem);

impl fmt::Display for ElemDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.fmt_elem(self.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ff(p: u32, names: &[&str]) -> Field {
        FieldCtx::rational_functions(Fq::prime(p).unwrap(), names.iter().map(|s| s.to_string()).collect())
            .unwrap()
    }

    #[test]
    fn fraction_reduction() {
        let k = ff(3, &["t"]);
        let t = k.var(0);
        let one = k.one();
        let a = k.div(&k.sub(&k.mul(&t, &t), &one), &k.add(&t, &one));
        assert_eq!(a, k.sub(&t, &one));
    }

    #[test]
    fn pth_roots_in_function_field() {
        let k = ff(2, &["l", "m"]);
        let l = k.var(0);
        assert!(k.pth_root(&l).is_none());
        assert_eq!(k.pth_root(&k.mul(&l, &l)), Some(l.clone()));
        let x = k.div(&k.add(&l, &k.var(1)), &k.add(&l, &k.one()));
        assert_eq!(k.pth_root(&k.pow(&x, 2)), Some(x));
    }

    #[test]
    fn derivative_quotient_rule() {
        let k = ff(5, &["t"]);
        let t = k.var(0);
        let x = k.inv(&t);
        let d = k.deriv(&x, 0);
        assert_eq!(d, k.neg(&k.inv(&k.mul(&t, &t))));
    }

    #[test]
    fn pbasis_split_recombines() {
        let k = ff(2, &["a", "b"]);
        let a = k.var(0);
        let b = k.var(1);
        let x = k.div(&k.add(&k.mul(&a, &b), &k.pow(&b, 3)), &k.add(&a, &k.one()));
        let parts = k.pbasis_split(&x, 2);
        let mut sum = k.zero();
        for (mu, c) in &parts {
            let mono = k.mul(&k.pow(&a, mu[0] as u64), &k.pow(&b, mu[1] as u64));
            sum = k.add(&sum, &k.mul(&k.pow(c, 2), &mono));
        }
        assert_eq!(sum, x);
    }

    #[test]
    fn kth_roots() {
        let k = ff(5, &["t"]);
        let t = k.var(0);
        let g = k.add(&k.mul(&t, &t), &k.from_i64(2));
        let a = k.pow(&g, 4);
        let r = k.kth_root(&a, 4).unwrap();
        assert_eq!(k.pow(&r, 4), a);
        assert!(k.kth_root(&t, 4).is_none());
    }
}
