//! Random instance generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use charpoly::algebra::{parse_input, Elem, Field, FieldCtx, Fq, HypersurfaceState, Poly};
use charpoly::polygon::translate_u3;
use charpoly::polyhedron::Q;
use charpoly::prepare::minimize;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn doc(p: u32, vars: &[&str], exc: &[&str], tr: &[&str], h: &str) -> String {
    let list = |v: &[&str]| v.iter().map(|s| format!("\"{s}\"")).collect::<Vec<_>>().join(",");
    format!(
        "p = {p}\nmode = \"equichar\"\nvariables = [{}]\nexceptional = [{}]\ntranscendentals = [{}]\nh = \"{h}\"\n",
        list(vars),
        list(exc),
        list(tr)
    )
}

pub fn state3(p: u32, exc: &[&str], tr: &[&str], h: &str) -> HypersurfaceState {
    parse_input(&doc(p, &["u1", "u2", "u3"], exc, tr, h)).unwrap()
}

pub fn names3() -> Vec<String> {
    vec!["u1".into(), "u2".into(), "u3".into()]
}

/// F₂, F₃ or F₂(l) by index.
pub fn field(which: usize) -> Field {
    match which {
        0 => FieldCtx::prime(2).unwrap(),
        1 => FieldCtx::prime(3).unwrap(),
        _ => FieldCtx::rational_functions(Fq::prime(2).unwrap(), vec!["l".into()]).unwrap(),
    }
}

/// A nonzero coefficient; over F₂(l) one of 1, l, 1+l, l².
pub fn coeff(rng: &mut TestRng, k: &FieldCtx) -> Elem {
    if k.m() == 0 {
        return k.from_fq(rng.gen_range(1..k.fq.size()));
    }
    let l = k.var(0);
    match rng.gen_range(0..4) {
        0 => k.one(),
        1 => l,
        2 => k.add(&k.one(), &l),
        _ => k.mul(&l, &l),
    }
}

/// Random f_1..f_p in three variables with at most `max_terms` terms each;
/// with `center`, every term of f_i has order ≥ i along the center coordinates.
pub fn random_coeffs(rng: &mut TestRng, k: &FieldCtx, max_terms: usize, center: Option<&[usize]>) -> Vec<Poly> {
    let p = k.p() as usize;
    let mut fs = vec![];
    for i in 1..=p {
        let mut f = Poly::zero(3);
        let nt = if i < p && rng.gen_bool(0.5) { 0 } else { rng.gen_range(1..=max_terms) };
        for _ in 0..nt {
            let mut e: Vec<u32> = (0..3).map(|_| rng.gen_range(0..=(i as u32 + 2))).collect();
            if let Some(js) = center {
                let mut tot: u32 = js.iter().map(|&j| e[j]).sum();
                while tot < i as u32 {
                    e[js[rng.gen_range(0..js.len())]] += 1;
                    tot += 1;
                }
            } else if e.iter().sum::<u32>() < i as u32 {
                e[rng.gen_range(0..3)] += i as u32;
            }
            f.add_term(k, e, coeff(rng, k));
        }
        fs.push(f);
    }
    if fs[p - 1].is_zero() {
        let mut e = vec![0u32; 3];
        match center {
            Some(js) => e[js[0]] = p as u32 + 1,
            None => e[rng.gen_range(0..3)] = p as u32 + 1,
        }
        fs[p - 1].add_term(k, e, k.one());
    }
    fs
}

/// Random minimal state; `None` when minimization does not finish.
pub fn random_minimal(rng: &mut TestRng, k: &Field, max_terms: usize, center: Option<&[usize]>) -> Option<HypersurfaceState> {
    let e = rng.gen_range(0..=3);
    let fs = random_coeffs(rng, k, max_terms, center);
    let s = HypersurfaceState::equichar(k.clone(), names3(), e, fs).ok()?;
    let m = minimize(&s, 64).ok()?;
    (m.status == charpoly::prepare::MinimizeStatus::Minimal).then_some(m.state)
}

/// Purely inseparable Z^p + f over F_p with m = p and a witness derivation
/// ∂/∂u_k (k non-exceptional) sending f to an exceptional monomial times a unit.
pub fn random_witnessed(rng: &mut TestRng, p: u32) -> Option<HypersurfaceState> {
    let k = FieldCtx::prime(p).unwrap();
    let e = rng.gen_range(1..=2usize);
    let wk = rng.gen_range(e..3);
    let mut a = vec![0u32; 3];
    for x in a.iter_mut().take(e) {
        *x = rng.gen_range(0..=p + 1);
    }
    let mut w = a.clone();
    w[wk] = 1;
    if w.iter().sum::<u32>() < p {
        w[0] += p - w.iter().sum::<u32>();
        a[0] = w[0];
    }
    let mut f = Poly::monomial(&k, w.clone(), coeff(rng, &k));
    let nt = rng.gen_range(1..=6);
    for _ in 0..nt {
        let mut t: Vec<u32> = (0..3).map(|_| rng.gen_range(0..=p + 2)).collect();
        if t[wk] % p != 0 {
            // ∂/∂u_k of this term must lie in u^a·m
            for j in 0..e {
                t[j] = t[j].max(a[j]);
            }
            let rest: u32 = (e..3).map(|j| t[j]).sum();
            if rest < 2 {
                t[wk] += 2;
                if t[wk] % p == 0 {
                    t[wk] += 1;
                }
            }
        }
        if t.iter().sum::<u32>() < p {
            continue;
        }
        f.add_term(&k, t, coeff(rng, &k));
    }
    let mut fs = vec![Poly::zero(3); p as usize];
    fs[p as usize - 1] = f;
    let s = HypersurfaceState::equichar(k, names3(), e, fs).ok()?;
    let m = minimize(&s, 64).ok()?;
    (m.status == charpoly::prepare::MinimizeStatus::Minimal).then_some(m.state)
}

/// ω = 0 instances: exceptional monomial u^A (A ∉ pℕ³) times a unit, or times a
/// non-exceptional coordinate (ε = 1).
pub fn random_omega0(rng: &mut TestRng, p: u32) -> Option<HypersurfaceState> {
    let k = FieldCtx::prime(p).unwrap();
    let linear = rng.gen_bool(0.3);
    let e = if linear { rng.gen_range(1..=2) } else { rng.gen_range(1..=3) };
    let mut a: Vec<u32> = (0..3).map(|j| if j < e { rng.gen_range(0..=2 * p + 1) } else { 0 }).collect();
    if a.iter().all(|x| x % p == 0) {
        a[0] += 1;
    }
    let mut lead = a.clone();
    if linear {
        lead[e] += 1;
    }
    if lead.iter().sum::<u32>() < p {
        return None;
    }
    let mut f = Poly::monomial(&k, lead.clone(), coeff(rng, &k));
    for _ in 0..rng.gen_range(0..=4) {
        let mut t = lead.clone();
        for x in t.iter_mut() {
            *x += rng.gen_range(0..=2);
        }
        if t == lead {
            t[rng.gen_range(0..3)] += 1;
        }
        f.add_term(&k, t, coeff(rng, &k));
    }
    let mut fs = vec![Poly::zero(3); p as usize];
    fs[p as usize - 1] = f;
    let s = HypersurfaceState::equichar(k, names3(), e, fs).ok()?;
    Some(minimize(&s, 64).ok()?.state)
}

/// Monic star instances over F₂/F₃: `kind` 1, 2 or 3 selects the intended
/// normal form; a random 2-solvable u₃-translation hides the preparation.
pub fn random_star(rng: &mut TestRng, kind: u8) -> Option<HypersurfaceState> {
    let p: u32 = if rng.gen_bool(0.5) { 2 } else { 3 };
    let k = FieldCtx::prime(p).unwrap();
    let omega = p * rng.gen_range(1..=2);
    let mut h1 = rng.gen_range(p + 1..=3 * p);
    while h1 % p == 0 {
        h1 += 1;
    }
    let e = if kind == 2 { 2 } else { 1 };
    let mut h2 = if kind == 2 { rng.gen_range(p..=2 * p) } else { 0 };
    if kind == 2 && h2 % p == 0 && h1 % p == 0 {
        h2 += 1;
    }
    let u2pow = if kind == 3 { 1 } else { h2 };
    let deg0 = h1 + u2pow + omega;
    let mut f = Poly::monomial(&k, vec![h1, u2pow, omega], k.from_fq(rng.gen_range(1..p)));
    for _ in 0..rng.gen_range(1..=5) {
        let a3 = rng.gen_range(0..omega);
        let a1 = h1 + rng.gen_range(0..=3 * p);
        let a2 = h2 + rng.gen_range(0..=3 * p);
        if a1 + a2 + a3 > deg0 {
            f.add_term(&k, vec![a1, a2, a3], k.from_fq(rng.gen_range(1..p)));
        }
    }
    // keeps the multiplicity-p locus inside E
    let wa = h1 + rng.gen_range(1..=2 * p);
    let wb = if kind == 2 { h2 } else { 1 };
    if wa + wb > deg0 {
        f.add_term(&k, vec![wa, wb, 0], k.one());
    }
    let mut fs = vec![Poly::zero(3); p as usize];
    fs[p as usize - 1] = f;
    let s = HypersurfaceState::equichar(k.clone(), names3(), e, fs).ok()?;
    let s = if rng.gen_bool(0.5) {
        let y = [rng.gen_range(0..3), rng.gen_range(0..3)];
        translate_u3(&s, y, &k.from_fq(rng.gen_range(1..p))).ok()?
    } else {
        s
    };
    Some(minimize(&s, 64).ok()?.state)
}

// ---------------------------------------------------------------------------
// Vertex oracle: x ∈ conv(S) + R^n_+ iff some basis of n+1 columns among the
// points and the unit vectors gives a nonnegative solution.

fn solve(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, piv);
        b.swap(c, piv);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                for j in c..n {
                    let t = &f * &a[c][j];
                    a[r][j] -= t;
                }
                let t = &f * &b[c];
                b[r] -= t;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur = vec![];
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub fn in_region(points: &[Vec<Q>], x: &[Q]) -> bool {
    if points.is_empty() {
        return false;
    }
    let n = x.len();
    // columns: (point, 1) and (e_j, 0)
    let mut cols: Vec<Vec<Q>> = points.iter().map(|p| p.iter().cloned().chain([Q::one()]).collect()).collect();
    for j in 0..n {
        let mut c = vec![Q::zero(); n + 1];
        c[j] = Q::one();
        cols.push(c);
    }
    let rhs: Vec<Q> = x.iter().cloned().chain([Q::one()]).collect();
    for idx in combinations(cols.len(), n + 1) {
        let a: Vec<Vec<Q>> = (0..=n).map(|r| idx.iter().map(|&c| cols[c][r].clone()).collect()).collect();
        if let Some(sol) = solve(a, rhs.clone()) {
            if sol.iter().all(|v| !v.is_negative()) {
                return true;
            }
        }
    }
    false
}

/// Vertices of conv(points) + R^n_+, sorted.
pub fn vertex_oracle(points: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    let mut out = vec![];
    for (i, v) in pts.iter().enumerate() {
        let others: Vec<Vec<Q>> = pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x.clone()).collect();
        if !in_region(&others, v) {
            out.push(v.clone());
        }
    }
    out
}

/// l: x_{j0} ↦ Σ_{j∈J} x_j − 1, other coordinates fixed.
pub fn l_oracle(x: &[Q], js: &[usize], j0: usize) -> Vec<Q> {
    let mut y = x.to_vec();
    let mut s = -Q::one();
    for &j in js {
        s += &x[j];
    }
    y[j0] = s;
    y
}
