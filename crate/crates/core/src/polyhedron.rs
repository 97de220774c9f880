//! Rational polyhedra conv(points) + R^n_{>=0}: vertices, weighted minima,
//! initial forms and coordinate projections.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::{HypersurfaceState, Poly};
use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `num/den` text, or an integer when den = 1.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn fmt_point(v: &[Q]) -> String {
    let parts: Vec<String> = v.iter().map(fmt_q).collect();
    format!("({})", parts.join(","))
}

/// Exact feasibility of { A x = b, x >= 0 } by two-phase simplex with
/// Bland's rule. Rows with negative b are negated first.
pub fn lp_feasible(a: &[Vec<Q>], b: &[Q]) -> bool {
    let m = a.len();
    if m == 0 {
        return true;
    }
    let nv = a[0].len();
    // tableau columns: nv originals, m artificials, rhs
    let w = nv + m + 1;
    let mut t: Vec<Vec<Q>> = Vec::with_capacity(m + 1);
    for r in 0..m {
        let neg = b[r].is_negative();
        let mut row = vec![Q::zero(); w];
        for c in 0..nv {
            row[c] = if neg { -a[r][c].clone() } else { a[r][c].clone() };
        }
        row[nv + r] = Q::one();
        row[w - 1] = if neg { -b[r].clone() } else { b[r].clone() };
        t.push(row);
    }
    // objective: minimize sum of artificials, stored as reduced costs
    let mut obj = vec![Q::zero(); w];
    for row in t.iter() {
        for c in 0..nv {
            obj[c] -= &row[c];
        }
        obj[w - 1] -= &row[w - 1];
    }
    let mut basis: Vec<usize> = (nv..nv + m).collect();
    loop {
        let enter = (0..nv + m).find(|&c| obj[c].is_negative());
        let Some(ec) = enter else { break };
        let mut best: Option<(usize, Q)> = None;
        for r in 0..m {
            if t[r][ec].is_positive() {
                let ratio = &t[r][w - 1] / &t[r][ec];
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && basis[r] < basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
        }
        let Some((pr, _)) = best else { break };
        let piv = t[pr][ec].clone();
        for c in 0..w {
            t[pr][c] = &t[pr][c] / &piv;
        }
        for r in 0..m {
            if r != pr && !t[r][ec].is_zero() {
                let f = t[r][ec].clone();
                for c in 0..w {
                    let d = &f * &t[pr][c];
                    t[r][c] -= d;
                }
            }
        }
        if !obj[ec].is_zero() {
            let f = obj[ec].clone();
            for c in 0..w {
                let d = &f * &t[pr][c];
                obj[c] -= d;
            }
        }
        basis[pr] = ec;
    }
    obj[w - 1].is_zero()
}

/// True if `x` lies in conv(points) + R^n_{>=0}.
pub fn in_hull_plus_orthant(points: &[Vec<Q>], x: &[Q]) -> bool {
    if points.is_empty() {
        return false;
    }
    if points.iter().any(|p| p.iter().zip(x).all(|(a, b)| a <= b)) {
        return true;
    }
    let n = x.len();
    let k = points.len();
    // variables: lambda_1..k, slack_1..n
    let mut a = vec![vec![Q::zero(); k + n]; n + 1];
    let mut b = vec![Q::zero(); n + 1];
    for j in 0..n {
        for (t, p) in points.iter().enumerate() {
            a[j][t] = p[j].clone();
        }
        a[j][k + j] = Q::one();
        b[j] = x[j].clone();
    }
    for t in 0..k {
        a[n][t] = Q::one();
    }
    b[n] = Q::one();
    lp_feasible(&a, &b)
}

/// conv(points) + R^n_{>=0} with its vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolyhedron {
    pub n: usize,
    pub points: Vec<Vec<Q>>,
    /// Sorted lexicographically.
    pub vertices: Vec<Vec<Q>>,
}

impl NewtonPolyhedron {
    pub fn new(n: usize, points: Vec<Vec<Q>>) -> Self {
        let mut pts = points;
        pts.sort();
        pts.dedup();
        let mut vertices = vec![];
        for (i, v) in pts.iter().enumerate() {
            let others: Vec<Vec<Q>> = pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
            if !in_hull_plus_orthant(&others, v) {
                vertices.push(v.clone());
            }
        }
        NewtonPolyhedron { n, points: pts, vertices }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        in_hull_plus_orthant(&self.vertices, x)
    }

    /// min |x|_alpha over the polyhedron.
    pub fn delta_alpha(&self, alpha: &[Q]) -> Result<Q> {
        self.vertices
            .iter()
            .map(|v| dot(alpha, v))
            .min()
            .ok_or(Error::EmptyPolyhedron)
    }

    /// min |x| over the polyhedron.
    pub fn delta(&self) -> Result<Q> {
        self.delta_alpha(&vec![Q::one(); self.n])
    }

    /// min x_j over the polyhedron.
    pub fn d(&self, j: usize) -> Result<Q> {
        self.vertices.iter().map(|v| v[j].clone()).min().ok_or(Error::EmptyPolyhedron)
    }

    /// Vertices on the face cut out by `alpha`.
    pub fn face(&self, alpha: &[Q]) -> Result<Vec<Vec<Q>>> {
        let da = self.delta_alpha(alpha)?;
        Ok(self.vertices.iter().filter(|v| dot(alpha, v) == da).cloned().collect())
    }

    /// Image under deletion of the coordinates outside `jset`.
    pub fn project(&self, jset: &[usize]) -> NewtonPolyhedron {
        let pts = self.vertices.iter().map(|v| jset.iter().map(|&j| v[j].clone()).collect()).collect();
        NewtonPolyhedron::new(jset.len(), pts)
    }

    /// Polyhedron generated by the vertices translated by `-shift`.
    pub fn shifted(&self, shift: &[Q]) -> NewtonPolyhedron {
        let pts = self.vertices.iter().map(|v| v.iter().zip(shift).map(|(a, b)| a - b).collect()).collect();
        NewtonPolyhedron::new(self.n, pts)
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

/// Generating points a/i for the J-exponents a of the support of each f_i.
pub fn generating_points(state: &HypersurfaceState, jset: &[usize]) -> Vec<Vec<Q>> {
    let mut pts = vec![];
    for i in 1..=state.p as usize {
        for e in state.support(i) {
            pts.push(jset.iter().map(|&j| Q::new(BigInt::from(e[j]), BigInt::from(i))).collect());
        }
    }
    pts
}

/// Delta(h; u_J; Z) for the current coordinates.
pub fn compute_polyhedron(state: &HypersurfaceState, jset: &[usize]) -> Result<NewtonPolyhedron> {
    if jset.iter().any(|&j| j >= state.n) {
        return Err(Error::Domain("coordinate index out of range".into()));
    }
    let poly = NewtonPolyhedron::new(jset.len(), generating_points(state, jset));
    if poly.is_empty() {
        return Err(Error::EmptyPolyhedron);
    }
    Ok(poly)
}

/// The full polyhedron in all coordinates.
pub fn polyhedron(state: &HypersurfaceState) -> Result<NewtonPolyhedron> {
    let all: Vec<usize> = (0..state.n).collect();
    compute_polyhedron(state, &all)
}

/// in_alpha h: F_{i} collects the support terms of f_i with |a|_alpha = i delta_alpha.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialForm {
    pub alpha: Vec<Q>,
    pub delta_alpha: Q,
    /// F_1..F_p as polynomials in U_1..U_n with residue-field coefficients.
    pub f: Vec<Poly>,
}

impl InitialForm {
    /// Least i with F_i nonzero.
    pub fn i0(&self) -> Option<usize> {
        self.f.iter().position(|g| !g.is_zero()).map(|i| i + 1)
    }
}

pub fn initial_form(state: &HypersurfaceState, alpha: &[Q]) -> Result<InitialForm> {
    if alpha.len() != state.n || alpha.iter().any(|a| !a.is_positive()) {
        return Err(Error::Domain("weight vector must be positive of length n".into()));
    }
    let k = &state.field;
    let p = state.p as usize;
    let mut best: Option<Q> = None;
    for i in 1..=p {
        for e in state.support(i) {
            let v = weighted(alpha, &e) / qi(i as i64);
            if best.as_ref().map_or(true, |b| v < *b) {
                best = Some(v);
            }
        }
    }
    let da = best.ok_or(Error::EmptyPolyhedron)?;
    let mut f = vec![Poly::zero(state.n); p];
    for i in 1..=p {
        for e in state.support(i) {
            if weighted(alpha, &e) == &da * qi(i as i64) {
                let c = state.term_residue(i, &e);
                f[i - 1].add_term(k, e.clone(), c);
            }
        }
    }
    Ok(InitialForm { alpha: alpha.to_vec(), delta_alpha: da, f })
}

pub fn weighted(alpha: &[Q], e: &[u32]) -> Q {
    alpha.iter().zip(e).fold(Q::zero(), |acc, (a, &x)| acc + a * qi(x as i64))
}
