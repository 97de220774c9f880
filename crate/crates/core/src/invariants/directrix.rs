//! Directrix and Hilbert–Samuel cone of a finite family of forms.
//!
//! The directrix is the annihilator of the largest subspace K with
//! G(X + tv) = G(X) for every form G and v in K. K is found by layered
//! Frobenius descent: with coordinates Y adapted to the current candidate K,
//! every G is a polynomial P(Y_{<r}, W) with W = Y_{>=r}^q; the first-order
//! condition sum_j c_j v_j^q = 0 is split along a p-basis into linear
//! conditions on v. When it cuts nothing, ∂P/∂W = 0 and q is multiplied by p.

use std::collections::BTreeMap;

use super::linalg::{in_span, nullspace, rref, unit, Row};
use crate::algebra::{Exp, Field, FieldCtx, Poly};

/// Basis (reduced echelon) of Vdir, as coefficient rows of linear forms in n variables.
pub fn vdir(k: &FieldCtx, forms: &[Poly], n: usize) -> Vec<Row> {
    let p = k.p() as u64;
    let mut ys: Vec<Poly> = forms.iter().filter(|f| !f.is_zero()).cloned().collect();
    if ys.is_empty() {
        return vec![];
    }
    let mut cols: Vec<Row> = (0..n).map(|j| unit(k, n, j)).collect();
    let mut r = 0usize;
    let mut q = 1u64;
    while r < n {
        let mut rows: BTreeMap<(usize, Exp), Row> = BTreeMap::new();
        let mut depends = false;
        for (fi, f) in ys.iter().enumerate() {
            for (e, c) in &f.terms {
                for j in r..n {
                    if e[j] == 0 {
                        continue;
                    }
                    depends = true;
                    debug_assert_eq!(e[j] as u64 % q, 0);
                    let a = e[j] as u64 / q;
                    if a % p == 0 {
                        continue;
                    }
                    let mut ee = e.clone();
                    ee[j] -= q as u32;
                    let row = rows.entry((fi, ee)).or_insert_with(|| vec![k.zero(); n - r]);
                    row[j - r] = k.add(&row[j - r], &k.mul(c, &k.from_i64((a % p) as i64)));
                }
            }
        }
        if !depends {
            break;
        }
        let rows: Vec<Row> = rows.into_values().filter(|row| row.iter().any(|c| !k.is_zero(c))).collect();
        if rows.is_empty() {
            q *= p;
            continue;
        }
        let mut lin: Vec<Row> = vec![];
        for row in &rows {
            let splits: Vec<_> = row.iter().map(|c| k.pbasis_split(c, q)).collect();
            let mut keys: Vec<_> = splits.iter().flat_map(|s| s.keys().cloned()).collect();
            keys.sort();
            keys.dedup();
            for mu in keys {
                lin.push(splits.iter().map(|s| s.get(&mu).cloned().unwrap_or_else(|| k.zero())).collect());
            }
        }
        let ns = nullspace(k, &lin, n - r);
        let mut comp: Vec<Row> = vec![];
        let mut cur = ns.clone();
        for i in 0..n - r {
            let u = unit(k, n - r, i);
            if !in_span(k, &cur, &u) {
                comp.push(u.clone());
                cur.push(u);
            }
        }
        let newcols: Vec<Row> = comp.iter().chain(ns.iter()).cloned().collect();
        let mut subs: Vec<Poly> = (0..r).map(|j| Poly::var(k, n, j)).collect();
        for j in r..n {
            let mut s = Poly::zero(n);
            for (kk, col) in newcols.iter().enumerate() {
                let mut e = vec![0; n];
                e[r + kk] = 1;
                s.add_term(k, e, col[j - r].clone());
            }
            subs.push(s);
        }
        ys = ys.iter().map(|f| f.compose(k, &subs)).collect();
        let old = cols.clone();
        for (kk, col) in newcols.iter().enumerate() {
            let mut v = vec![k.zero(); n];
            for (i, m) in col.iter().enumerate() {
                if k.is_zero(m) {
                    continue;
                }
                for (x, o) in v.iter_mut().zip(&old[r + i]) {
                    *x = k.add(x, &k.mul(m, o));
                }
            }
            cols[r + kk] = v;
        }
        r += comp.len();
    }
    if r == n {
        return (0..n).map(|j| unit(k, n, j)).collect();
    }
    let kvecs: Vec<Row> = cols[r..].to_vec();
    rref(k, &nullspace(k, &kvecs, n)).0
}

/// True if every form is invariant under translation by the k-rational vector `v`.
pub fn translation_invariant(k: &FieldCtx, forms: &[Poly], v: &Row) -> bool {
    let n = v.len();
    let subs: Vec<Poly> = (0..n)
        .map(|j| Poly::var(k, n, j).add(k, &Poly::constant(k, n, v[j].clone())))
        .collect();
    forms.iter().all(|f| f.compose(k, &subs) == *f)
}

/// Max of the forms, computed as the directrix over k^{1/inflation}: the
/// field has the same transcendental names, read as t_l^{1/inflation}.
#[derive(Debug, Clone)]
pub struct MaxSpace {
    pub field: Field,
    pub inflation: u32,
    /// Reduced echelon basis of the linear equations, over `field`.
    pub basis: Vec<Row>,
}

impl MaxSpace {
    pub fn codim(&self) -> usize {
        self.basis.len()
    }

    /// Equations over the original field: each echelon row L contributes
    /// L^{p^e} for the least e that brings its coefficients back to k.
    pub fn generators(&self, k: &FieldCtx) -> Vec<Poly> {
        let kp = &self.field;
        let p = k.p();
        let mut out = vec![];
        for row in &self.basis {
            let n = row.len();
            let mut e = 1u32;
            loop {
                let pw: Vec<_> = row.iter().map(|c| kp.pow(c, e as u64)).collect();
                let back: Option<Vec<_>> = pw.iter().map(|c| kp.deflate(c, self.inflation)).collect();
                if let Some(cs) = back {
                    let mut g = Poly::zero(n);
                    for (j, c) in cs.into_iter().enumerate() {
                        let mut ex = vec![0; n];
                        ex[j] = e;
                        g.add_term(k, ex, c);
                    }
                    out.push(g);
                    break;
                }
                e *= p;
                assert!(e <= self.inflation, "coefficients outside k^(1/inflation)");
            }
        }
        out
    }
}

fn ceil_log(x: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut y = 1;
    while y < x {
        y *= p;
        k += 1;
    }
    k
}

/// Max(forms): the directrix over the perfect closure of k.
pub fn max_space(k: &Field, forms: &[Poly], n: usize) -> MaxSpace {
    if k.is_finite() {
        return MaxSpace { field: k.clone(), inflation: 1, basis: vdir(k, forms, n) };
    }
    let p = k.p() as u64;
    let deg = forms.iter().filter_map(|f| f.degree()).max().unwrap_or(1).max(1) as u64;
    let levels = ceil_log(deg, p).max(1);
    let mut big_n = n as u32 * levels;
    while p.pow(big_n) > 1 << 12 && big_n > levels {
        big_n -= 1;
    }
    let infl = p.pow(big_n) as u32;
    let inflated: Vec<Poly> = forms.iter().map(|f| f.map_coeffs(k, |c| k.inflate(c, infl))).collect();
    MaxSpace { field: k.clone(), inflation: infl, basis: vdir(k, &inflated, n) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;
    use crate::algebra::Fq;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn monomial_power() {
        let k = FieldCtx::prime(3).unwrap();
        let f = parse_poly(&k, &names(&["U1", "U2", "U3"]), "U1^5").unwrap();
        assert_eq!(vdir(&k, &[f], 3).len(), 1);
    }

    #[test]
    fn pth_power_over_function_field() {
        let k = FieldCtx::rational_functions(Fq::prime(2).unwrap(), names(&["l"])).unwrap();
        let vars = names(&["U1", "U2"]);
        let f = parse_poly(&k, &vars, "U1^2 + l*U2^2").unwrap();
        assert_eq!(vdir(&k, &[f.clone()], 2).len(), 2);
        assert_eq!(max_space(&k, &[f], 2).codim(), 1);
    }
}
