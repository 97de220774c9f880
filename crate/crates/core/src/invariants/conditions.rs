//! Validators for the standing hypotheses: (G), (E), (E′) and the shape of
//! the initial form, together with the Z-discriminant of h.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{analyze, invariant_core};
use crate::algebra::parse::fmt_bigint;
use crate::algebra::{vp, Coeffs, FieldCtx, HypersurfaceState, Poly};
use crate::error::{Error, Result};
use crate::prepare::{minimize, DEFAULT_BUDGET};

/// Determinant by Laplace expansion along rows, memoized on the set of used columns.
pub fn determinant<T: Clone>(
    m: &[Vec<T>],
    zero: &T,
    one: &T,
    is_zero: &dyn Fn(&T) -> bool,
    add: &dyn Fn(&T, &T) -> T,
    mul: &dyn Fn(&T, &T) -> T,
    neg: &dyn Fn(&T) -> T,
) -> T {
    let n = m.len();
    assert!(n <= 63, "matrix too large");
    let mut memo: HashMap<u64, T> = HashMap::new();
    fn rec<T: Clone>(
        m: &[Vec<T>],
        used: u64,
        memo: &mut HashMap<u64, T>,
        zero: &T,
        one: &T,
        is_zero: &dyn Fn(&T) -> bool,
        add: &dyn Fn(&T, &T) -> T,
        mul: &dyn Fn(&T, &T) -> T,
        neg: &dyn Fn(&T) -> T,
    ) -> T {
        let r = used.count_ones() as usize;
        if r == m.len() {
            return one.clone();
        }
        if let Some(v) = memo.get(&used) {
            return v.clone();
        }
        let mut acc = zero.clone();
        // sign of column c among the unused columns
        let mut pos = 0usize;
        for c in 0..m.len() {
            if used >> c & 1 == 1 {
                continue;
            }
            let a = &m[r][c];
            if !is_zero(a) {
                let sub = rec(m, used | 1 << c, memo, zero, one, is_zero, add, mul, neg);
                if !is_zero(&sub) {
                    let t = mul(a, &sub);
                    acc = if pos % 2 == 0 { add(&acc, &t) } else { add(&acc, &neg(&t)) };
                }
            }
            pos += 1;
        }
        memo.insert(used, acc.clone());
        acc
    }
    if n == 0 {
        return one.clone();
    }
    rec(m, 0, &mut memo, zero, one, is_zero, add, mul, neg)
}

/// Sylvester matrix of a (degree da) and b (degree db); coefficients are
/// listed from the leading one down.
pub fn sylvester<T: Clone>(a: &[T], b: &[T], zero: &T) -> Vec<Vec<T>> {
    let da = a.len() - 1;
    let db = b.len() - 1;
    let size = da + db;
    let mut m = vec![vec![zero.clone(); size]; size];
    for r in 0..db {
        for (i, c) in a.iter().enumerate() {
            m[r][r + i] = c.clone();
        }
    }
    for r in 0..da {
        for (i, c) in b.iter().enumerate() {
            m[db + r][r + i] = c.clone();
        }
    }
    m
}

/// Res_Z(h, ∂h/∂Z), which generates the same divisor as Disc_Z(h).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Discriminant {
    Poly(Poly),
    Int(BigInt),
}

impl Discriminant {
    pub fn is_zero(&self) -> bool {
        match self {
            Discriminant::Poly(f) => f.is_zero(),
            Discriminant::Int(x) => x.is_zero(),
        }
    }
}

fn trim_leading<T: Clone>(v: Vec<T>, is_zero: impl Fn(&T) -> bool) -> Vec<T> {
    let first = v.iter().position(|c| !is_zero(c));
    match first {
        Some(i) => v[i..].to_vec(),
        None => vec![],
    }
}

pub fn discriminant(state: &HypersurfaceState) -> Discriminant {
    let p = state.p as usize;
    match &state.coeffs {
        Coeffs::Equichar(f) => {
            let k: &FieldCtx = &state.field;
            let n = state.n;
            let mut h = vec![Poly::one(k, n)];
            h.extend(f.iter().cloned());
            // ∂h/∂Z = sum_i (p - i) f_i Z^{p-i-1}
            let dh: Vec<Poly> = (1..p).map(|i| f[i - 1].scale(k, &k.from_i64((p - i) as i64))).collect();
            let dh = trim_leading(dh, |g| g.is_zero());
            if dh.is_empty() {
                return Discriminant::Poly(Poly::zero(n));
            }
            let zero = Poly::zero(n);
            let m = sylvester(&h, &dh, &zero);
            let d = determinant(
                &m,
                &zero,
                &Poly::one(k, n),
                &|a: &Poly| a.is_zero(),
                &|a: &Poly, b: &Poly| a.add(k, b),
                &|a: &Poly, b: &Poly| a.mul(k, b),
                &|a: &Poly| a.neg(k),
            );
            Discriminant::Poly(d)
        }
        Coeffs::Arithmetic { f, .. } => {
            let mut h = vec![BigInt::one()];
            h.extend(f.iter().cloned());
            let mut dh = vec![BigInt::from(p)];
            dh.extend((1..p).map(|i| &f[i - 1] * BigInt::from(p - i)));
            let m = sylvester(&h, &dh, &BigInt::zero());
            let d = determinant(
                &m,
                &BigInt::zero(),
                &BigInt::one(),
                &|a: &BigInt| a.is_zero(),
                &|a: &BigInt, b: &BigInt| a + b,
                &|a: &BigInt, b: &BigInt| a * b,
                &|a: &BigInt| -a,
            );
            Discriminant::Int(d)
        }
    }
}

/// Pass/fail flags for each hypothesis, with free-form notes.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ConditionReport {
    #[serde(rename = "G")]
    pub g: bool,
    #[serde(rename = "E")]
    pub e: bool,
    #[serde(rename = "Eprime")]
    pub eprime: bool,
    pub initform: bool,
    pub discriminant: String,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.g && self.e && self.eprime && self.initform
    }
}

/// True if D = u^a w with w(0) != 0 and a supported on the exceptional coordinates.
fn support_in_exceptional(d: &Poly, e: usize) -> bool {
    let n = d.n;
    let mut a = vec![u32::MAX; n];
    for ex in d.terms.keys() {
        for j in 0..n {
            a[j] = a[j].min(ex[j]);
        }
    }
    a[e..].iter().all(|&x| x == 0) && d.terms.keys().any(|ex| ex.iter().zip(&a).all(|(x, y)| x == y))
}

/// Multiplicity of h at the origin after minimization equals p.
fn has_mult_p(state: &HypersurfaceState) -> Result<bool> {
    if state.is_trivial() {
        return Ok(true);
    }
    let mz = minimize(state, DEFAULT_BUDGET)?;
    match invariant_core(&mz.state) {
        Ok(c) => Ok(c.m == state.p),
        Err(Error::EmptyPolyhedron) => Ok(true),
        Err(Error::Condition(_)) => Ok(true),
        Err(e) => Err(e),
    }
}

/// h = (Z - φ)^p over the fraction field of S.
fn generic_mult_p(state: &HypersurfaceState) -> bool {
    let k = &state.field;
    let p = state.p as usize;
    match &state.coeffs {
        Coeffs::Arithmetic { .. } => false,
        Coeffs::Equichar(f) => {
            f[..p - 1].iter().all(|g| g.is_zero())
                && f[p - 1]
                    .terms
                    .iter()
                    .all(|(ex, c)| ex.iter().all(|&x| x % state.p == 0) && k.pth_root(c).is_some())
        }
    }
}

fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![];
    for mask in 1u32..(1 << items.len()) {
        out.push(items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect());
    }
    out
}

pub fn validate_conditions(state: &HypersurfaceState) -> Result<ConditionReport> {
    let mut notes = vec![];
    let d = discriminant(state);
    let d_zero = d.is_zero();
    let names = state.vars.clone();
    let d_text = match &d {
        Discriminant::Poly(f) => f.fmt_with(&state.field, &names),
        Discriminant::Int(x) => fmt_bigint(x),
    };
    let g = state.is_purely_inseparable() || !d_zero;

    let e_ok = if !d_zero {
        match &d {
            Discriminant::Poly(f) => support_in_exceptional(f, state.e),
            Discriminant::Int(x) => {
                notes.push(format!("v_p(D) = {}", vp(x, state.p)));
                true
            }
        }
    } else if state.is_arithmetic() {
        false
    } else {
        let mut ok = !generic_mult_p(state);
        if !ok {
            notes.push("multiplicity p at the generic point".into());
        }
        let outside: Vec<usize> = (state.e..state.n).collect();
        for jset in subsets(&outside) {
            if !ok {
                break;
            }
            if jset.len() == state.n {
                continue;
            }
            let loc = state.localize(&jset)?;
            if has_mult_p(&loc)? {
                ok = false;
                notes.push(format!("multiplicity p along V({})", jset.iter().map(|&j| names[j].clone()).collect::<Vec<_>>().join(",")));
            }
        }
        ok
    };

    let mz = minimize(state, DEFAULT_BUDGET)?;
    let (initform, omega) = match analyze(&mz.state) {
        Ok(a) => (true, Some(a.omega)),
        Err(Error::Condition(msg)) => {
            notes.push(msg);
            (false, None)
        }
        Err(Error::EmptyPolyhedron) => (true, None),
        Err(e) => return Err(e),
    };

    let eprime = match omega {
        Some(w) if w >= state.p && !state.is_arithmetic() => {
            let mut ok = true;
            for j in 0..state.e {
                let loc = state.localize(&[j])?;
                if !has_mult_p(&loc)? {
                    ok = false;
                    notes.push(format!("omega >= p but multiplicity < p along V({})", names[j]));
                }
            }
            ok
        }
        Some(_) => true,
        None => initform,
    };

    Ok(ConditionReport { g, e: e_ok, eprime, initform, discriminant: d_text, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_input;

    #[test]
    fn quadratic_discriminant_over_integers() {
        let s = parse_input("p = 2\nmode = \"arithmetic\"\nh = \"X^2 + 3*X + 1\"\n").unwrap();
        // Res(Z^2 + 3Z + 1, 2Z + 3) = -(9 - 4)
        match discriminant(&s) {
            Discriminant::Int(x) => assert_eq!(num_traits::Signed::abs(&x), BigInt::from(5)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn purely_inseparable_has_zero_discriminant() {
        let s = parse_input(
            "p = 3\nmode = \"equichar\"\nvariables = [\"u1\",\"u2\"]\nexceptional = [\"u1\"]\nh = \"Z^3 + u1^4 + u1*u2^3\"\n",
        )
        .unwrap();
        assert!(discriminant(&s).is_zero());
    }
}
