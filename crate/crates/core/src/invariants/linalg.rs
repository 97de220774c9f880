//! Dense linear algebra over a coefficient field, and spans of forms.

use std::collections::BTreeMap;

use crate::algebra::{Elem, Exp, FieldCtx, Poly};

pub type Row = Vec<Elem>;

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub fn rref(k: &FieldCtx, rows: &[Row]) -> (Vec<Row>, Vec<usize>) {
    let mut m: Vec<Row> = rows.to_vec();
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..m.len()).find(|&i| !k.is_zero(&m[i][c])) else { continue };
        m.swap(r, pr);
        let inv = k.inv(&m[r][c]);
        for x in m[r].iter_mut() {
            *x = k.mul(x, &inv);
        }
        for i in 0..m.len() {
            if i != r && !k.is_zero(&m[i][c]) {
                let f = m[i][c].clone();
                for cc in 0..ncols {
                    let d = k.mul(&f, &m[r][cc]);
                    m[i][cc] = k.sub(&m[i][cc], &d);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(k: &FieldCtx, rows: &[Row]) -> usize {
    rref(k, rows).0.len()
}

/// Basis of { v : rows . v = 0 } in k^ncols.
pub fn nullspace(k: &FieldCtx, rows: &[Row], ncols: usize) -> Vec<Row> {
    let (m, piv) = rref(k, rows);
    let mut out = vec![];
    for free in 0..ncols {
        if piv.contains(&free) {
            continue;
        }
        let mut v = vec![k.zero(); ncols];
        v[free] = k.one();
        for (i, &pc) in piv.iter().enumerate() {
            v[pc] = k.neg(&m[i][free]);
        }
        out.push(v);
    }
    out
}

/// True if `v` lies in the span of `basis`.
pub fn in_span(k: &FieldCtx, basis: &[Row], v: &Row) -> bool {
    let r0 = rank(k, basis);
    let mut b = basis.to_vec();
    b.push(v.clone());
    rank(k, &b) == r0
}

/// span(small) ⊆ span(big).
pub fn span_contains(k: &FieldCtx, big: &[Row], small: &[Row]) -> bool {
    let r0 = rank(k, big);
    let mut b = big.to_vec();
    b.extend(small.iter().cloned());
    rank(k, &b) == r0
}

/// Coefficient vectors of forms over the union of their monomials.
pub fn coefficient_matrix(k: &FieldCtx, forms: &[Poly]) -> (Vec<Exp>, Vec<Row>) {
    let mut monos: Vec<Exp> = forms.iter().flat_map(|f| f.terms.keys().cloned()).collect();
    monos.sort();
    monos.dedup();
    let idx: BTreeMap<&Exp, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let rows = forms
        .iter()
        .map(|f| {
            let mut r = vec![k.zero(); monos.len()];
            for (e, c) in &f.terms {
                r[idx[e]] = c.clone();
            }
            r
        })
        .collect();
    (monos, rows)
}

/// A basis (in echelon form) of the k-span of `forms`.
pub fn forms_basis(k: &FieldCtx, forms: &[Poly]) -> Vec<Poly> {
    let nonzero: Vec<Poly> = forms.iter().filter(|f| !f.is_zero()).cloned().collect();
    let Some(n) = nonzero.first().map(|f| f.n) else { return vec![] };
    let (monos, rows) = coefficient_matrix(k, &nonzero);
    let (m, _) = rref(k, &rows);
    m.iter()
        .map(|r| {
            let mut f = Poly::zero(n);
            for (i, c) in r.iter().enumerate() {
                f.add_term(k, monos[i].clone(), c.clone());
            }
            f
        })
        .collect()
}

/// Linear form sum_j row[j] U_j.
pub fn linear_form(k: &FieldCtx, row: &Row) -> Poly {
    let n = row.len();
    let mut f = Poly::zero(n);
    for (j, c) in row.iter().enumerate() {
        let mut e = vec![0; n];
        e[j] = 1;
        f.add_term(k, e, c.clone());
    }
    f
}

/// Unit vector e_j in k^n.
pub fn unit(k: &FieldCtx, n: usize, j: usize) -> Row {
    let mut v = vec![k.zero(); n];
    v[j] = k.one();
    v
}

/// Inverse of a square matrix, if invertible.
pub fn inverse(k: &FieldCtx, a: &[Row]) -> Option<Vec<Row>> {
    let n = a.len();
    let aug: Vec<Row> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut x = r.clone();
            x.extend(unit(k, n, i));
            x
        })
        .collect();
    let (m, piv) = rref(k, &aug);
    if m.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(m.iter().map(|r| r[n..].to_vec()).collect())
}
