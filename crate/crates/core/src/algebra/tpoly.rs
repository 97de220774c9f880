//! Multivariate polynomials over F_q in the transcendentals t_1..t_m, with exact
//! division and gcd by recursive primitive pseudo-remainder sequences.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::fq::Fq;

pub type Mono = Vec<u32>;

/// Graded-lex comparison of exponent vectors.
pub fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&x| x as u64).sum();
    let db: u64 = b.iter().map(|&x| x as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// Sparse polynomial with nonzero F_q coefficients; every key has length `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TPoly {
    pub m: usize,
    pub terms: BTreeMap<Mono, u32>,
}

impl TPoly {
    pub fn zero(m: usize) -> Self {
        TPoly { m, terms: BTreeMap::new() }
    }

    pub fn constant(m: usize, c: u32) -> Self {
        let mut t = Self::zero(m);
        if c != 0 {
            t.terms.insert(vec![0; m], c);
        }
        t
    }

    pub fn monomial(m: usize, mono: Mono, c: u32) -> Self {
        let mut t = Self::zero(m);
        if c != 0 {
            t.terms.insert(mono, c);
        }
        t
    }

    pub fn var(m: usize, l: usize) -> Self {
        let mut e = vec![0; m];
        e[l] = 1;
        Self::monomial(m, e, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant term value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<u32> {
        match self.terms.len() {
            0 => Some(0),
            1 => {
                let (k, &v) = self.terms.iter().next().unwrap();
                if k.iter().all(|&x| x == 0) {
                    Some(v)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// Leading term under graded-lex.
    pub fn lead(&self) -> Option<(&Mono, u32)> {
        self.terms.iter().max_by(|a, b| grlex(a.0, b.0)).map(|(k, &v)| (k, v))
    }

    pub fn trailing(&self) -> Option<(&Mono, u32)> {
        self.terms.iter().min_by(|a, b| grlex(a.0, b.0)).map(|(k, &v)| (k, v))
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(|k| k.iter().map(|&x| x as u64).sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|k| k[v]).max().unwrap_or(0)
    }

    fn add_term(&mut self, f: &Fq, mono: Mono, c: u32) {
        if c == 0 {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(x) => {
                let s = f.add(*x, c);
                if s == 0 {
                    self.terms.remove(&mono);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn add(&self, f: &Fq, o: &TPoly) -> TPoly {
        let mut r = self.clone();
        for (k, &v) in &o.terms {
            r.add_term(f, k.clone(), v);
        }
        r
    }

    pub fn neg(&self, f: &Fq) -> TPoly {
        TPoly { m: self.m, terms: self.terms.iter().map(|(k, &v)| (k.clone(), f.neg(v))).collect() }
    }

    pub fn sub(&self, f: &Fq, o: &TPoly) -> TPoly {
        let mut r = self.clone();
        for (k, &v) in &o.terms {
            r.add_term(f, k.clone(), f.neg(v));
        }
        r
    }

    pub fn scale(&self, f: &Fq, c: u32) -> TPoly {
        if c == 0 {
            return TPoly::zero(self.m);
        }
        TPoly { m: self.m, terms: self.terms.iter().map(|(k, &v)| (k.clone(), f.mul(v, c))).collect() }
    }

    pub fn mul(&self, f: &Fq, o: &TPoly) -> TPoly {
        let mut r = TPoly::zero(self.m);
        for (ka, &va) in &self.terms {
            for (kb, &vb) in &o.terms {
                let k: Mono = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
                r.add_term(f, k, f.mul(va, vb));
            }
        }
        r
    }

    pub fn mul_mono(&self, f: &Fq, mono: &[u32], c: u32) -> TPoly {
        let mut r = TPoly::zero(self.m);
        for (k, &v) in &self.terms {
            let kk: Mono = k.iter().zip(mono).map(|(x, y)| x + y).collect();
            r.add_term(f, kk, f.mul(v, c));
        }
        r
    }

    pub fn pow(&self, f: &Fq, e: u64) -> TPoly {
        let mut r = TPoly::constant(self.m, 1);
        for _ in 0..e {
            r = r.mul(f, self);
        }
        r
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, f: &Fq, d: &TPoly) -> Option<TPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if let Some(c) = d.as_constant() {
            return Some(self.scale(f, f.inv(c)));
        }
        let (dl, dc) = d.lead().map(|(k, v)| (k.clone(), v)).unwrap();
        let dci = f.inv(dc);
        let mut r = self.clone();
        let mut q = TPoly::zero(self.m);
        while let Some((rl, rc)) = r.lead().map(|(k, v)| (k.clone(), v)) {
            if rl.iter().zip(&dl).any(|(a, b)| a < b) {
                return None;
            }
            let mono: Mono = rl.iter().zip(&dl).map(|(a, b)| a - b).collect();
            let c = f.mul(rc, dci);
            q.add_term(f, mono.clone(), c);
            r = r.sub(f, &d.mul_mono(f, &mono, c));
        }
        Some(q)
    }

    /// Partial derivative in t_l.
    pub fn deriv(&self, f: &Fq, l: usize) -> TPoly {
        let mut r = TPoly::zero(self.m);
        for (k, &v) in &self.terms {
            if k[l] == 0 {
                continue;
            }
            let c = f.mul(v, f.from_i64(k[l] as i64));
            let mut kk = k.clone();
            kk[l] -= 1;
            r.add_term(f, kk, c);
        }
        r
    }

    /// Coefficients as a polynomial in t_v: index = degree in t_v.
    fn coeffs_in(&self, v: usize) -> Vec<TPoly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![TPoly::zero(self.m); d + 1];
        for (k, &c) in &self.terms {
            let mut kk = k.clone();
            let e = kk[v] as usize;
            kk[v] = 0;
            out[e].terms.insert(kk, c);
        }
        out
    }

    fn from_coeffs_in(m: usize, v: usize, cs: &[TPoly]) -> TPoly {
        let mut r = TPoly::zero(m);
        for (e, c) in cs.iter().enumerate() {
            for (k, &x) in &c.terms {
                let mut kk = k.clone();
                kk[v] += e as u32;
                r.terms.insert(kk, x);
            }
        }
        r
    }

    /// Scales to make the graded-lex leading coefficient 1.
    pub fn monic(&self, f: &Fq) -> TPoly {
        match self.lead() {
            None => self.clone(),
            Some((_, c)) => self.scale(f, f.inv(c)),
        }
    }

    fn content_in(&self, f: &Fq, v: usize) -> TPoly {
        let mut g = TPoly::zero(self.m);
        for c in self.coeffs_in(v) {
            if c.is_zero() {
                continue;
            }
            g = gcd(f, &g, &c);
            if g.is_constant() {
                return TPoly::constant(self.m, 1);
            }
        }
        g
    }

    /// Substitutes t_l = 0 for every l with `mask[l]`.
    pub fn eval_zero(&self, mask: &[bool]) -> TPoly {
        let mut r = TPoly::zero(self.m);
        for (k, &c) in &self.terms {
            if k.iter().zip(mask).all(|(&e, &mz)| !mz || e == 0) {
                r.terms.insert(k.clone(), c);
            }
        }
        r
    }

    /// Re-indexes into `m2` variables; `map[l]` is the new index of t_l.
    pub fn remap(&self, m2: usize, map: &[usize]) -> TPoly {
        let mut r = TPoly::zero(m2);
        for (k, &c) in &self.terms {
            let mut kk = vec![0; m2];
            for (l, &e) in k.iter().enumerate() {
                kk[map[l]] += e;
            }
            r.terms.insert(kk, c);
        }
        r
    }
}

/// Pseudo-remainder of univariate (in t_v) polynomials over F_q[other t's].
fn prem(f: &Fq, a: &[TPoly], b: &[TPoly]) -> Vec<TPoly> {
    let mut r: Vec<TPoly> = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && r.len() > 0 {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        if lr.is_zero() {
            r.pop();
            continue;
        }
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = c.mul(f, lb);
        }
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = r[shift + i].sub(f, &bc.mul(f, &lr));
        }
        r.pop();
    }
    while r.last().map_or(false, |c| c.is_zero()) {
        r.pop();
    }
    r
}

/// Monic greatest common divisor (zero only when both inputs are zero).
pub fn gcd(f: &Fq, a: &TPoly, b: &TPoly) -> TPoly {
    if a.is_zero() {
        return b.monic(f);
    }
    if b.is_zero() {
        return a.monic(f);
    }
    if a.is_constant() || b.is_constant() {
        return TPoly::constant(a.m, 1);
    }
    let m = a.m;
    let v = (0..m).find(|&v| a.degree_in(v) > 0 || b.degree_in(v) > 0).unwrap();
    if a.degree_in(v) == 0 {
        return gcd(f, a, &b.content_in(f, v));
    }
    if b.degree_in(v) == 0 {
        return gcd(f, &a.content_in(f, v), b);
    }
    let ca = a.content_in(f, v);
    let cb = b.content_in(f, v);
    let gc = gcd(f, &ca, &cb);
    let pa = a.div_exact(f, &ca).unwrap();
    let pb = b.div_exact(f, &cb).unwrap();
    let (mut x, mut y) = if pa.degree_in(v) >= pb.degree_in(v) { (pa, pb) } else { (pb, pa) };
    loop {
        let r = prem(f, &x.coeffs_in(v), &y.coeffs_in(v));
        if r.is_empty() {
            break;
        }
        let rp = TPoly::from_coeffs_in(m, v, &r);
        if r.len() == 1 {
            return gc.monic(f);
        }
        let c = rp.content_in(f, v);
        x = y;
        y = rp.div_exact(f, &c).unwrap();
    }
    let yc = y.content_in(f, v);
    let y = y.div_exact(f, &yc).unwrap();
    gc.mul(f, &y).monic(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(f: &Fq, m: usize, terms: &[(&[u32], i64)]) -> TPoly {
        let mut t = TPoly::zero(m);
        for (k, c) in terms {
            t.add_term(f, k.to_vec(), f.from_i64(*c));
        }
        t
    }

    #[test]
    fn gcd_bivariate() {
        let f = Fq::prime(3).unwrap();
        // (t1 + t2)(t1 - t2^2) and (t1 + t2)(t1 + 1)
        let g = p(&f, 2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let a = g.mul(&f, &p(&f, 2, &[(&[1, 0], 1), (&[0, 2], -1)]));
        let b = g.mul(&f, &p(&f, 2, &[(&[1, 0], 1), (&[0, 0], 1)]));
        assert_eq!(gcd(&f, &a, &b), g.monic(&f));
    }

    #[test]
    fn exact_division() {
        let f = Fq::prime(5).unwrap();
        let a = p(&f, 1, &[(&[2], 1), (&[0], -1)]);
        let b = p(&f, 1, &[(&[1], 1), (&[0], 1)]);
        let q = a.div_exact(&f, &b).unwrap();
        assert_eq!(q, p(&f, 1, &[(&[1], 1), (&[0], -1)]));
        assert!(b.div_exact(&f, &a).is_none());
    }
}
