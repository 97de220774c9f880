//! Solvable vertices, their dissolution by Z-translation, and minimization of Δ.

use num_bigint::BigInt;

use crate::algebra::{Coeffs, Elem, HypersurfaceState, Poly};
use crate::error::{Error, Result};
use crate::polyhedron::{polyhedron, NewtonPolyhedron, Q};

pub const DEFAULT_BUDGET: usize = 64;

/// Translation that dissolves a solvable vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lift {
    Poly(Poly),
    Int(BigInt),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolvableWitness {
    pub vertex: Vec<u32>,
    /// Residue λ with in_v h = (Z - λ U^v)^p.
    pub lambda: Elem,
    /// φ with Z' = Z - φ.
    pub lift: Lift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimizeStatus {
    Minimal,
    BudgetExceeded,
}

impl MinimizeStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            MinimizeStatus::Minimal => "minimal",
            MinimizeStatus::BudgetExceeded => "budget_exceeded",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimized {
    pub state: HypersurfaceState,
    pub status: MinimizeStatus,
    pub steps: Vec<SolvableWitness>,
}

fn modulus(v: &[Q]) -> Q {
    v.iter().fold(Q::from_integer(0.into()), |a, x| a + x)
}

/// Vertices ordered by |v| ascending, then lexicographically.
pub fn scan_order(d: &NewtonPolyhedron) -> Vec<Vec<Q>> {
    let mut vs = d.vertices.clone();
    vs.sort_by(|a, b| modulus(a).cmp(&modulus(b)).then_with(|| a.cmp(b)));
    vs
}

/// First solvable vertex in scan order, if any.
pub fn find_solvable_vertex(state: &HypersurfaceState) -> Result<Option<SolvableWitness>> {
    let d = match polyhedron(state) {
        Ok(d) => d,
        Err(Error::EmptyPolyhedron) => return Ok(None),
        Err(e) => return Err(e),
    };
    let k = &state.field;
    let p = state.p as usize;
    for v in scan_order(&d) {
        if v.iter().any(|x| !x.is_integer()) {
            continue;
        }
        let vn: Vec<u32> = v.iter().map(|x| x.numer().try_into().unwrap()).collect();
        let mixed = (1..p).any(|i| {
            let e: Vec<u32> = vn.iter().map(|&x| x * i as u32).collect();
            !k.is_zero(&state.term_residue(i, &e))
        });
        if mixed {
            continue;
        }
        let ep: Vec<u32> = vn.iter().map(|&x| x * p as u32).collect();
        let mu = state.term_residue(p, &ep);
        if k.is_zero(&mu) {
            continue;
        }
        // (-λ)^p = μ
        let Some(r) = k.pth_root(&mu) else { continue };
        let lambda = k.neg(&r);
        let lift = match &state.coeffs {
            Coeffs::Equichar(_) => Lift::Poly(Poly::monomial(k, vn.clone(), lambda.clone())),
            Coeffs::Arithmetic { f, .. } => {
                let pa = BigInt::from(state.p).pow(ep[0]);
                let c = &f[p - 1] / &pa;
                Lift::Int(-c * BigInt::from(state.p).pow(vn[0]))
            }
        };
        return Ok(Some(SolvableWitness { vertex: vn, lambda, lift }));
    }
    Ok(None)
}

/// Applies Z <- Z - φ for the witness.
pub fn dissolve(state: &HypersurfaceState, w: &SolvableWitness) -> Result<HypersurfaceState> {
    match &w.lift {
        Lift::Poly(phi) => state.translate_poly(phi),
        Lift::Int(phi) => state.translate_int(phi),
    }
}

/// Dissolves solvable vertices until none is left or `max_iter` dissolutions ran.
pub fn minimize(state: &HypersurfaceState, max_iter: usize) -> Result<Minimized> {
    let mut cur = state.clone();
    let mut steps = vec![];
    loop {
        match find_solvable_vertex(&cur)? {
            None => return Ok(Minimized { state: cur, status: MinimizeStatus::Minimal, steps }),
            Some(w) => {
                if steps.len() >= max_iter {
                    return Ok(Minimized { state: cur, status: MinimizeStatus::BudgetExceeded, steps });
                }
                cur = dissolve(&cur, &w)?;
                steps.push(w);
            }
        }
    }
}
