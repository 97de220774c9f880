//! Input documents and the polynomial grammar.
//!
//! A document is TOML with keys `p`, `mode`, `variables`, `exceptional`,
//! `transcendentals`, `h`, and optionally `modulus` (extension of F_p, low to
//! high coefficients) and `precision` (arithmetic cap).

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Deserialize;

use super::field::{Field, FieldCtx};
use super::fq::Fq;
use super::poly::Poly;
use super::state::{Coeffs, HypersurfaceState};
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u64 = 64;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    p: u32,
    #[serde(default)]
    mode: Option<String>,
    #[serde(default)]
    variables: Vec<String>,
    #[serde(default)]
    exceptional: Vec<String>,
    #[serde(default)]
    transcendentals: Vec<String>,
    #[serde(default)]
    modulus: Option<Vec<u32>>,
    #[serde(default)]
    precision: Option<u64>,
    h: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> std::result::Result<Vec<(Tok, usize)>, (usize, String)> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = vec![];
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push((Tok::Num(t.parse().unwrap()), st));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(cs[st..i].iter().collect()), st));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err((i, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

/// Ring operations the expression parser needs.
trait ExprRing {
    type V: Clone;
    fn num(&self, n: &BigInt) -> Self::V;
    fn ident(&self, name: &str) -> Option<Self::V>;
    fn add(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn neg(&self, a: &Self::V) -> Self::V;
    fn div(&self, a: &Self::V, b: &Self::V) -> std::result::Result<Self::V, String>;
    fn pow(&self, a: &Self::V, e: u64) -> Self::V;
}

struct Parser<'a, R: ExprRing> {
    r: &'a R,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

type PResult<T> = std::result::Result<T, (usize, String)>;

impl<'a, R: ExprRing> Parser<'a, R> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }
    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }
    fn expr(&mut self) -> PResult<R::V> {
        let mut neg = false;
        if let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            neg = *c == '-';
            self.pos += 1;
        }
        let mut acc = self.term()?;
        if neg {
            acc = self.r.neg(&acc);
        }
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let minus = *c == '-';
            self.pos += 1;
            let t = self.term()?;
            acc = if minus { self.r.add(&acc, &self.r.neg(&t)) } else { self.r.add(&acc, &t) };
        }
        Ok(acc)
    }
    fn term(&mut self) -> PResult<R::V> {
        let mut acc = self.factor()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let div = *c == '/';
            self.pos += 1;
            let at = self.here();
            let f = self.factor()?;
            acc = if div { self.r.div(&acc, &f).map_err(|m| (at, m))? } else { self.r.mul(&acc, &f) };
        }
        Ok(acc)
    }
    fn factor(&mut self) -> PResult<R::V> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let at = self.here();
            match self.toks.get(self.pos).map(|t| t.0.clone()) {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e = n.to_u64().ok_or((at, "exponent too large".to_string()))?;
                    return Ok(self.r.pow(&base, e));
                }
                _ => return Err((at, "expected a nonnegative integer exponent".into())),
            }
        }
        Ok(base)
    }
    fn atom(&mut self) -> PResult<R::V> {
        let at = self.here();
        match self.toks.get(self.pos).map(|t| t.0.clone()) {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(self.r.num(&n))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                self.r.ident(&s).ok_or((at, format!("unknown symbol '{s}'")))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                match self.peek() {
                    Some(Tok::Op(')')) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    _ => Err((self.here(), "expected ')'".into())),
                }
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                let v = self.factor()?;
                Ok(self.r.neg(&v))
            }
            Some(t) => Err((at, format!("unexpected token {t:?}"))),
            None => Err((at, "unexpected end of input".into())),
        }
    }
}

fn parse_expr<R: ExprRing>(r: &R, s: &str) -> PResult<R::V> {
    let toks = tokenize(s)?;
    let mut ps = Parser { r, toks, pos: 0, end: s.chars().count() };
    let v = ps.expr()?;
    if ps.pos != ps.toks.len() {
        return Err((ps.here(), "trailing input".into()));
    }
    Ok(v)
}

/// Polynomials over a field in the variables `names` (the last may be Z).
struct PolyRing<'a> {
    k: &'a FieldCtx,
    names: &'a [String],
}

impl ExprRing for PolyRing<'_> {
    type V = Poly;
    fn num(&self, n: &BigInt) -> Poly {
        let pb = BigInt::from(self.k.p());
        let r: i64 = ((n % &pb + &pb) % &pb).to_i64().unwrap();
        Poly::constant(self.k, self.names.len(), self.k.from_i64(r))
    }
    fn ident(&self, name: &str) -> Option<Poly> {
        let n = self.names.len();
        if let Some(j) = self.names.iter().position(|v| v == name) {
            return Some(Poly::var(self.k, n, j));
        }
        if let Some(t) = self.k.var_by_name(name) {
            return Some(Poly::constant(self.k, n, t));
        }
        if name == "a" && self.k.fq.degree() > 1 {
            return Some(Poly::constant(self.k, n, self.k.generator()));
        }
        None
    }
    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a.add(self.k, b)
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a.mul(self.k, b)
    }
    fn neg(&self, a: &Poly) -> Poly {
        a.neg(self.k)
    }
    fn div(&self, a: &Poly, b: &Poly) -> std::result::Result<Poly, String> {
        let zero = vec![0; self.names.len()];
        if b.len() != 1 || !b.terms.contains_key(&zero) {
            return Err("division only by nonzero field elements".into());
        }
        let c = b.coeff(self.k, &zero);
        Ok(a.scale(self.k, &self.k.inv(&c)))
    }
    fn pow(&self, a: &Poly, e: u64) -> Poly {
        a.pow(self.k, e)
    }
}

/// Univariate integer polynomials in X, coefficients low to high.
struct IntRing<'a> {
    x: &'a str,
}

fn int_trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.len() > 1 && v.last().unwrap().is_zero() {
        v.pop();
    }
    v
}

impl ExprRing for IntRing<'_> {
    type V = Vec<BigInt>;
    fn num(&self, n: &BigInt) -> Vec<BigInt> {
        vec![n.clone()]
    }
    fn ident(&self, name: &str) -> Option<Vec<BigInt>> {
        (name == self.x).then(|| vec![BigInt::zero(), BigInt::one()])
    }
    fn add(&self, a: &Vec<BigInt>, b: &Vec<BigInt>) -> Vec<BigInt> {
        let mut r = vec![BigInt::zero(); a.len().max(b.len())];
        for (i, c) in a.iter().enumerate() {
            r[i] += c;
        }
        for (i, c) in b.iter().enumerate() {
            r[i] += c;
        }
        int_trim(r)
    }
    fn mul(&self, a: &Vec<BigInt>, b: &Vec<BigInt>) -> Vec<BigInt> {
        let mut r = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                r[i + j] += x * y;
            }
        }
        int_trim(r)
    }
    fn neg(&self, a: &Vec<BigInt>) -> Vec<BigInt> {
        a.iter().map(|c| -c).collect()
    }
    fn div(&self, a: &Vec<BigInt>, b: &Vec<BigInt>) -> std::result::Result<Vec<BigInt>, String> {
        if b.len() != 1 || b[0].is_zero() {
            return Err("division only by nonzero integers".into());
        }
        if a.iter().any(|c| !(c % &b[0]).is_zero()) {
            return Err("inexact integer division".into());
        }
        Ok(a.iter().map(|c| c / &b[0]).collect())
    }
    fn pow(&self, a: &Vec<BigInt>, e: u64) -> Vec<BigInt> {
        let mut r = vec![BigInt::one()];
        for _ in 0..e {
            r = self.mul(&r, a);
        }
        r
    }
}

fn line_col(text: &str, byte: usize) -> (usize, usize) {
    let before = &text[..byte.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map(|s| s.chars().count()).unwrap_or(0) + 1;
    (line, col)
}

/// Location of the first character inside the `h` string literal.
fn h_origin(text: &str) -> (usize, usize) {
    for (ln, line) in text.lines().enumerate() {
        let t = line.trim_start();
        if let Some(rest) = t.strip_prefix('h') {
            if rest.trim_start().starts_with('=') {
                if let Some(q) = line.find('"') {
                    return (ln + 1, line[..q].chars().count() + 2);
                }
            }
        }
    }
    (1, 1)
}

/// Parses a polynomial over `k` in the variables `names`.
pub fn parse_poly(k: &FieldCtx, names: &[String], s: &str) -> Result<Poly> {
    parse_expr(&PolyRing { k, names }, s).map_err(|(c, msg)| Error::Parse { line: 1, col: c + 1, msg })
}

/// Parses a field element (a polynomial with no variables).
pub fn parse_elem(k: &FieldCtx, s: &str) -> Result<super::field::Elem> {
    let p = parse_poly(k, &[], s)?;
    Ok(p.coeff(k, &[]))
}

/// Builds the coefficient field declared by `p`, `modulus` and `transcendentals`.
pub fn build_field(p: u32, modulus: Option<&[u32]>, transcendentals: &[String]) -> Result<Field> {
    let fq = match modulus {
        Some(m) => Fq::extension(p, m)?,
        None => Fq::prime(p)?,
    };
    FieldCtx::rational_functions(fq, transcendentals.to_vec())
}

/// Parses an input document into a state.
pub fn parse_input(text: &str) -> Result<HypersurfaceState> {
    let doc: Doc = toml::from_str(text).map_err(|e| {
        let (line, col) = e.span().map(|s| line_col(text, s.start)).unwrap_or((1, 1));
        Error::Parse { line, col, msg: e.message().to_string() }
    })?;
    let (hl, hc) = h_origin(text);
    let herr = move |e: Error| match e {
        Error::Parse { col, msg, .. } => Error::Parse { line: hl, col: hc + col - 1, msg },
        other => other,
    };
    let mode = doc.mode.as_deref().unwrap_or("equichar");
    let p = doc.p;
    if !super::fq::is_prime(p as u64) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    match mode {
        "arithmetic" => {
            let cap = doc.precision.unwrap_or(DEFAULT_PRECISION);
            let v = parse_expr(&IntRing { x: "X" }, &doc.h)
                .or_else(|_| parse_expr(&IntRing { x: "Z" }, &doc.h))
                .map_err(|(c, msg)| herr(Error::Parse { line: 1, col: c + 1, msg }))?;
            let deg = v.len() - 1;
            if deg > p as usize {
                return Err(Error::Domain("degree in Z exceeds p".into()));
            }
            if deg < p as usize || !v[p as usize].is_one() {
                return Err(Error::Domain("h is not monic of degree p".into()));
            }
            let f = (1..=p as usize).map(|i| v[p as usize - i].clone()).collect();
            HypersurfaceState::arithmetic(p, cap, f)
        }
        "equichar" => {
            if doc.variables.is_empty() {
                return Err(Error::Domain("no variables declared".into()));
            }
            for x in &doc.exceptional {
                if !doc.variables.contains(x) {
                    return Err(Error::Domain(format!("exceptional variable {x} is not declared")));
                }
            }
            let field = build_field(p, doc.modulus.as_deref(), &doc.transcendentals)?;
            let mut vars: Vec<String> = doc.variables.iter().filter(|v| doc.exceptional.contains(v)).cloned().collect();
            let e = vars.len();
            vars.extend(doc.variables.iter().filter(|v| !doc.exceptional.contains(v)).cloned());
            for (i, v) in vars.iter().enumerate() {
                if vars[..i].contains(v) || v == "Z" || field.names.contains(v) {
                    return Err(Error::Domain(format!("name {v} is declared twice")));
                }
            }
            let n = vars.len();
            let mut names = vars.clone();
            names.push("Z".into());
            let h = parse_poly(&field, &names, &doc.h).map_err(herr)?;
            let mut f = vec![Poly::zero(n); p as usize];
            let mut lead = field.zero();
            for (ex, c) in &h.terms {
                let z = ex[n];
                if z > p {
                    return Err(Error::Domain("degree in Z exceeds p".into()));
                }
                if z == p {
                    if ex[..n].iter().any(|&a| a > 0) {
                        return Err(Error::Domain("h is not monic in Z".into()));
                    }
                    lead = c.clone();
                    continue;
                }
                f[(p - z) as usize - 1].add_term(&field, ex[..n].to_vec(), c.clone());
            }
            if !field.is_one(&lead) {
                return Err(Error::Domain("h is not monic of degree p in Z".into()));
            }
            HypersurfaceState::equichar(field, vars, e, f)
        }
        other => Err(Error::Domain(format!("unknown mode {other}"))),
    }
}

fn toml_list(xs: &[String]) -> String {
    let inner: Vec<String> = xs.iter().map(|x| format!("\"{x}\"")).collect();
    format!("[{}]", inner.join(", "))
}

/// Canonical document for a state; `parse_input(&print_state(s))` reproduces `s`
/// up to translation history.
pub fn print_state(s: &HypersurfaceState) -> String {
    let mut out = format!("p = {}\n", s.p);
    match &s.coeffs {
        Coeffs::Arithmetic { cap, .. } => {
            out.push_str("mode = \"arithmetic\"\n");
            out.push_str(&format!("precision = {cap}\n"));
        }
        Coeffs::Equichar(_) => {
            out.push_str("mode = \"equichar\"\n");
            out.push_str(&format!("variables = {}\n", toml_list(&s.vars)));
            out.push_str(&format!("exceptional = {}\n", toml_list(&s.vars[..s.e])));
            out.push_str(&format!("transcendentals = {}\n", toml_list(&s.field.names)));
            if s.field.fq.degree() > 1 {
                let m: Vec<String> = s.field.fq.modulus().iter().map(|c| c.to_string()).collect();
                out.push_str(&format!("modulus = [{}]\n", m.join(", ")));
            }
        }
    }
    out.push_str(&format!("h = \"{}\"\n", s.h_string()));
    out
}

/// Sign-aware rendering helper used by reports.
pub fn fmt_bigint(x: &BigInt) -> String {
    if x.is_negative() {
        format!("-{}", -x)
    } else {
        x.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_error_position() {
        let doc = "p = 2\nvariables = [\"u1\"]\nh = \"Z^2 + u1 $ 3\"\n";
        match parse_input(doc) {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (3, 15)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degree_exceeds_p() {
        let doc = "p = 2\nvariables = [\"u1\"]\nh = \"Z^2 + Z^3\"\n";
        assert!(matches!(parse_input(doc), Err(Error::Domain(_))));
    }

    #[test]
    fn composite_p_rejected() {
        let doc = "p = 4\nvariables = [\"u1\"]\nh = \"Z^4\"\n";
        assert!(parse_input(doc).is_err());
    }
}
