//! Finite fields F_q, q = p^d, with elements packed as base-p digit vectors.

use crate::error::{domain, Result};

/// Largest supported field size.
pub const MAX_Q: u32 = 4096;

/// A finite field F_{p^d} given by a monic irreducible modulus over F_p.
///
/// Element `a` encodes the polynomial sum_i digit_i(a) x^i in the generator x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fq {
    p: u32,
    d: u32,
    q: u32,
    modulus: Vec<u32>,
    log: Vec<u32>,
    exp: Vec<u32>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

fn poly_trim(a: &mut Vec<u32>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

/// Remainder of `a` modulo the monic `m` over F_p.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm && r.len() > 0 {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    if r.is_empty() {
        r.push(0);
    }
    poly_trim(&mut r);
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x * y) % p;
        }
    }
    poly_rem(&r, m, p)
}

/// True if the monic polynomial `m` (low to high) is irreducible over F_p,
/// by trial division with every monic polynomial of degree at most deg/2.
pub fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    if deg == 0 {
        return false;
    }
    for k in 1..=deg / 2 {
        let count = (p as u64).pow(k as u32);
        for idx in 0..count {
            let mut f = vec![0u32; k + 1];
            let mut t = idx;
            for c in f.iter_mut().take(k) {
                *c = (t % p as u64) as u32;
                t /= p as u64;
            }
            f[k] = 1;
            let r = poly_rem(m, &f, p);
            if r.len() == 1 && r[0] == 0 {
                return false;
            }
        }
    }
    true
}

/// First monic irreducible polynomial of degree `d` over F_p in enumeration order.
pub fn find_irreducible(p: u32, d: u32) -> Vec<u32> {
    if d == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(d);
    for idx in 0..count {
        let mut f = vec![0u32; d as usize + 1];
        let mut t = idx;
        for c in f.iter_mut().take(d as usize) {
            *c = (t % p as u64) as u32;
            t /= p as u64;
        }
        f[d as usize] = 1;
        if f[0] != 0 && is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Fq {
    pub fn prime(p: u32) -> Result<Self> {
        Self::extension(p, &[0, 1])
    }

    /// F_p[x]/(modulus); the modulus is monic, coefficients low to high.
    pub fn extension(p: u32, modulus: &[u32]) -> Result<Self> {
        if !is_prime(p as u64) {
            return domain(format!("{p} is not prime"));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return domain("modulus must be monic of positive degree");
        }
        let modulus: Vec<u32> = modulus.iter().map(|c| c % p).collect();
        let d = (modulus.len() - 1) as u32;
        let q64 = (p as u64).pow(d);
        if q64 > MAX_Q as u64 {
            return domain(format!("field size {q64} exceeds {MAX_Q}"));
        }
        if !is_irreducible(&modulus, p) {
            return domain("modulus is reducible over F_p");
        }
        let q = q64 as u32;
        let mut f = Fq { p, d, q, modulus, log: vec![0; q as usize], exp: vec![0; q as usize] };
        f.build_tables();
        Ok(f)
    }

    fn to_poly(&self, a: u32) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.d as usize);
        let mut t = a;
        for _ in 0..self.d {
            v.push(t % self.p);
            t /= self.p;
        }
        poly_trim(&mut v);
        v
    }

    fn from_poly(&self, v: &[u32]) -> u32 {
        let mut a = 0u32;
        for &c in v.iter().rev() {
            a = a * self.p + c;
        }
        a
    }

    fn build_tables(&mut self) {
        let q = self.q;
        for g in 1..q {
            if g == 1 && q > 2 {
                continue;
            }
            let gp = self.to_poly(g);
            let mut cur = vec![1u32];
            let mut seen = vec![false; q as usize];
            let mut ok = true;
            for k in 0..(q - 1) {
                let a = self.from_poly(&cur);
                if seen[a as usize] {
                    ok = false;
                    break;
                }
                seen[a as usize] = true;
                self.exp[k as usize] = a;
                self.log[a as usize] = k;
                cur = poly_mulmod(&cur, &gp, &self.modulus, self.p);
            }
            if ok {
                return;
            }
        }
        unreachable!("multiplicative group of a finite field is cyclic")
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.d
    }
    pub fn size(&self) -> u32 {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.d == 1 {
            return (a + b) % self.p;
        }
        let (mut x, mut y, mut r, mut place) = (a, b, 0u32, 1u32);
        while x > 0 || y > 0 {
            r += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        r
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.d == 1 {
            return (self.p - a) % self.p;
        }
        let (mut x, mut r, mut place) = (a, 0u32, 1u32);
        while x > 0 {
            r += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        r
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = (self.log[a as usize] + self.log[b as usize]) % (self.q - 1);
        self.exp[s as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let s = (self.q - 1 - self.log[a as usize]) % (self.q - 1);
        self.exp[s as usize]
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let s = (self.log[a as usize] as u64 * (e % (self.q as u64 - 1))) % (self.q as u64 - 1);
        self.exp[s as usize]
    }

    /// The unique p-th root (inverse Frobenius).
    pub fn pth_root(&self, a: u32) -> u32 {
        self.pow(a, (self.p as u64).pow(self.d - 1))
    }

    /// Some k-th root of `a` in F_q, if one exists.
    pub fn kth_root(&self, a: u32, k: u64) -> Option<u32> {
        if a == 0 {
            return Some(0);
        }
        (1..self.q).find(|&r| self.pow(r, k) == a)
    }

    /// Image of the generator of `self` inside `big`, when F_q embeds into `big`.
    pub fn embedding_into(&self, big: &Fq) -> Option<u32> {
        if big.p != self.p || big.d % self.d != 0 {
            return None;
        }
        if self.d == 1 {
            return Some(0);
        }
        (0..big.q).find(|&r| {
            let mut acc = 0u32;
            for &c in self.modulus.iter().rev() {
                acc = big.add(big.mul(acc, r), c);
            }
            acc == 0
        })
    }

    /// Maps `a` into `big` given the image `root` of the generator.
    pub fn embed(&self, a: u32, big: &Fq, root: u32) -> u32 {
        if self.d == 1 {
            return a;
        }
        let mut acc = 0u32;
        for &c in self.to_poly(a).iter().rev() {
            acc = big.add(big.mul(acc, root), c);
        }
        acc
    }

    /// Base-p digits of `a`, low to high, length d.
    pub fn digits(&self, a: u32) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.d as usize);
        let mut t = a;
        for _ in 0..self.d {
            v.push(t % self.p);
            t /= self.p;
        }
        v
    }

    pub fn from_digits(&self, v: &[u32]) -> u32 {
        self.from_poly(v)
    }

    /// The generator x of F_q over F_p (equal to 0 when d = 1 is never used).
    pub fn generator(&self) -> u32 {
        if self.d == 1 {
            return 1;
        }
        self.p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_arithmetic() {
        let f = Fq::extension(2, &[1, 1, 1]).unwrap();
        assert_eq!(f.size(), 4);
        for a in 1..4 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
            assert_eq!(f.pow(f.pth_root(a), 2), a);
        }
        let x = f.generator();
        assert_eq!(f.add(f.mul(x, x), f.add(x, 1)), 0);
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert!(Fq::extension(2, &[1, 0, 1]).is_err());
        assert!(Fq::prime(9).is_err());
    }

    #[test]
    fn embedding_f4_into_f16() {
        let small = Fq::extension(2, &[1, 1, 1]).unwrap();
        let big = Fq::extension(2, &find_irreducible(2, 4)).unwrap();
        let r = small.embedding_into(&big).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let lhs = small.embed(small.mul(a, b), &big, r);
                let rhs = big.mul(small.embed(a, &big, r), small.embed(b, &big, r));
                assert_eq!(lhs, rhs);
            }
        }
    }
}
