//! The ω = 0 resolution with its δ-descent certificate, and scripted
//! sequences of blowing ups with per-step assertions.

use serde::{Deserialize, Serialize};

use crate::algebra::parse::{parse_elem, parse_poly};
use crate::algebra::{FieldCtx, HypersurfaceState, Poly};
use crate::blowup::{blowup_chart, classify_center, rational_chart_points, BlowupOutcome, CenterKind, ChartChoice, Translation};
use crate::error::{domain, Error, Result};
use crate::invariants::{analyze, invariant_core, InvariantRecord};
use crate::polyhedron::{fmt_q, qi, Q};
use crate::prepare::{minimize, MinimizeStatus, DEFAULT_BUDGET};

/// Which points of each fiber become children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchPolicy {
    AllOriginCharts,
    /// Every rational point; the residue field must have at most 9 elements.
    RationalPoints,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeStatus {
    /// Internal node, blown up further.
    Expanded,
    MultiplicityDropped,
    Budget,
    Rejected(String),
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub parent: Option<usize>,
    pub depth: usize,
    pub state: HypersurfaceState,
    pub m: u32,
    pub delta: Option<Q>,
    pub eps: Option<u32>,
    /// Chart that produced this node, in the parent's coordinates.
    pub chart: Option<String>,
    /// Center blown up at this node, in its own coordinates.
    pub center: Option<Vec<usize>>,
    pub children: Vec<usize>,
    pub status: NodeStatus,
}

#[derive(Debug, Clone)]
pub struct ResolutionTree {
    pub p: u32,
    /// Node 0 is the root.
    pub nodes: Vec<TreeNode>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct NodeRecord {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub h: String,
    pub exceptional: Vec<String>,
    pub m: u32,
    pub delta: Option<String>,
    pub epsilon: Option<u32>,
    pub chart: Option<String>,
    pub center: Option<Vec<String>>,
    pub status: NodeStatus,
    /// δ(child) < δ(parent) on the edge into this node.
    pub delta_decreased: Option<bool>,
}

impl ResolutionTree {
    pub fn leaves(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(|n| n.children.is_empty())
    }

    /// δ strictly decreases along the edge into node `id`; a child with
    /// m < p counts as a decrease when δ(child) < 1 ≤ δ(parent).
    pub fn edge_decreases(&self, id: usize) -> Option<bool> {
        let node = &self.nodes[id];
        let parent = &self.nodes[node.parent?];
        let dp = parent.delta.as_ref()?;
        Some(match &node.delta {
            Some(dc) => dc < dp,
            None => node.m < self.p,
        })
    }

    /// Every edge decreases δ and every leaf has m < p.
    pub fn certified(&self) -> bool {
        (1..self.nodes.len()).all(|i| self.edge_decreases(i) == Some(true))
            && self.leaves().all(|l| l.status == NodeStatus::MultiplicityDropped)
    }

    pub fn max_depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    pub fn records(&self) -> Vec<NodeRecord> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(id, n)| NodeRecord {
                id,
                parent: n.parent,
                depth: n.depth,
                h: n.state.h_string(),
                exceptional: n.state.vars[..n.state.e].to_vec(),
                m: n.m,
                delta: n.delta.as_ref().map(fmt_q),
                epsilon: n.eps,
                chart: n.chart.clone(),
                center: n.center.as_ref().map(|c| c.iter().map(|&j| n.state.vars[j].clone()).collect()),
                status: n.status.clone(),
                delta_decreased: self.edge_decreases(id),
            })
            .collect()
    }
}

/// Smallest J ⊆ {1..e} (then lexicographically first) with Σ_J d_j ≥ 1.
pub fn smallest_exceptional_center(d: &[Q]) -> Option<Vec<usize>> {
    let e = d.len();
    let mut best: Option<Vec<usize>> = None;
    for mask in 1u32..(1 << e) {
        let js: Vec<usize> = (0..e).filter(|j| mask >> j & 1 == 1).collect();
        let s = js.iter().fold(qi(0), |a, &j| a + &d[j]);
        if s < qi(1) {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => js.len() < b.len() || (js.len() == b.len() && js < *b),
        };
        if better {
            best = Some(js);
        }
    }
    best
}

/// For ε = 1, δ = 1: brings H^{-1}F_p to a single non-exceptional variable
/// U_w by a linear change of u_w, and returns the state with w.
pub fn epsilon_witness(state: &HypersurfaceState) -> Result<(HypersurfaceState, usize)> {
    let k = &state.field;
    let n = state.n;
    let core = invariant_core(state)?;
    let fp = &core.initial.f[state.p as usize - 1];
    let l = fp
        .div_monomial(&core.h_exp(n))
        .ok_or_else(|| Error::Condition("F_p is not divisible by H".into()))?;
    if l.degree() != Some(1) || !l.is_homogeneous() {
        return Err(Error::Condition("H^-1 F_p is not a linear form".into()));
    }
    let alpha: Vec<_> = (0..n)
        .map(|j| {
            let mut e = vec![0; n];
            e[j] = 1;
            l.coeff(k, &e)
        })
        .collect();
    let w = (state.e..n)
        .find(|&j| !k.is_zero(&alpha[j]))
        .ok_or_else(|| Error::Condition("H^-1 F_p only involves exceptional variables".into()))?;
    let moved = if (0..n).any(|j| j != w && !k.is_zero(&alpha[j])) || !k.is_one(&alpha[w]) {
        // old u_w = (u_w - sum_{j != w} α_j u_j) / α_w
        let inv = k.inv(&alpha[w]);
        let mut sw = Poly::var(k, n, w);
        for j in 0..n {
            if j != w && !k.is_zero(&alpha[j]) {
                sw = sw.sub(k, &Poly::var(k, n, j).scale(k, &alpha[j]));
            }
        }
        let subs: Vec<Poly> = (0..n).map(|j| if j == w { sw.scale(k, &inv) } else { Poly::var(k, n, j) }).collect();
        minimize(&state.change_coordinates(&subs)?, DEFAULT_BUDGET)?.state
    } else {
        state.clone()
    };
    let core2 = invariant_core(&moved)?;
    let l2 = core2.initial.f[state.p as usize - 1].div_monomial(&core2.h_exp(n));
    if l2 != Some(Poly::var(k, n, w)) {
        return Err(Error::Condition("no linear change of coordinates gives H^-1 F_p = U_w".into()));
    }
    Ok((moved, w))
}

/// The center used by the ω = 0 algorithm at a minimal state with m = p,
/// possibly after a change of the witness coordinate.
pub fn omega_zero_center(state: &HypersurfaceState) -> Result<(HypersurfaceState, Vec<usize>)> {
    let core = invariant_core(state)?;
    let eps = core.eps_int();
    let one = qi(1);
    if eps == 0 || (eps == 1 && core.delta > one) {
        let js = smallest_exceptional_center(&core.d)
            .ok_or_else(|| Error::Condition("no exceptional center with sum of d_j >= 1".into()))?;
        return Ok((state.clone(), js));
    }
    if eps == 1 {
        let (moved, w) = epsilon_witness(state)?;
        let c2 = invariant_core(&moved)?;
        let mut js: Vec<usize> = (0..moved.e).filter(|&j| c2.d[j] > qi(0)).collect();
        js.push(w);
        let c = classify_center(&moved, &js)?;
        if c.kind != CenterKind::FirstKind {
            return Err(Error::Condition(format!(
                "witness center is {} rather than of equal epsilon",
                c.kind.as_str()
            )));
        }
        return Ok((moved, js));
    }
    domain(format!("epsilon = {eps} is not allowed when omega = 0"))
}

fn chart_label(state: &HypersurfaceState, ch: &ChartChoice) -> String {
    let k = &state.field;
    let mut s = state.vars[ch.j0].clone();
    for (j, t) in &ch.translations {
        match t {
            Translation::Rational(c) => s.push_str(&format!(",{}={}", state.vars[*j], k.fmt_elem(c))),
            Translation::Root(_) => s.push_str(&format!(",{}=root", state.vars[*j])),
        }
    }
    s
}

fn make_node(state: HypersurfaceState, parent: Option<usize>, depth: usize, chart: Option<String>) -> Result<TreeNode> {
    let (m, delta, eps) = match invariant_core(&state) {
        Ok(c) => {
            let eps = if c.m == state.p { Some(c.eps_int()) } else { None };
            (c.m, Some(c.delta), eps)
        }
        Err(Error::EmptyPolyhedron) => (state.p, None, None),
        Err(e) => return Err(e),
    };
    Ok(TreeNode { parent, depth, state, m, delta, eps, chart, center: None, children: vec![], status: NodeStatus::Expanded })
}

/// Resolves (m, ω) = (p, 0) by Hironaka-permissible blowing ups until m < p
/// on every branch, or `budget` levels are used.
pub fn resolve_omega0(state: &HypersurfaceState, policy: BranchPolicy, budget: usize) -> Result<ResolutionTree> {
    let mz = minimize(state, DEFAULT_BUDGET)?;
    if mz.status != MinimizeStatus::Minimal {
        return domain("the input could not be made minimal within the budget");
    }
    let a = analyze(&mz.state)?;
    if a.core.m == state.p && a.omega != 0 {
        return domain(format!("omega = {} is not 0", a.omega));
    }
    if policy == BranchPolicy::RationalPoints && (!state.field.is_finite() || state.field.fq.size() > 9) {
        return domain("rational point enumeration needs a residue field with at most 9 elements");
    }
    let mut tree = ResolutionTree { p: state.p, nodes: vec![make_node(mz.state, None, 0, None)?] };
    let mut stack = vec![0usize];
    while let Some(id) = stack.pop() {
        let node = &tree.nodes[id];
        if node.m < tree.p {
            tree.nodes[id].status = NodeStatus::MultiplicityDropped;
            continue;
        }
        if node.delta.is_none() {
            tree.nodes[id].status = NodeStatus::Rejected("h = Z^p".into());
            continue;
        }
        if node.depth >= budget {
            tree.nodes[id].status = NodeStatus::Budget;
            continue;
        }
        let (cur, js) = match omega_zero_center(&node.state) {
            Ok(x) => x,
            Err(Error::Condition(msg)) | Err(Error::Domain(msg)) => {
                tree.nodes[id].status = NodeStatus::Rejected(msg);
                continue;
            }
            Err(e) => return Err(e),
        };
        let charts = match policy {
            BranchPolicy::AllOriginCharts => js.iter().map(|&j| ChartChoice::origin(j)).collect(),
            BranchPolicy::RationalPoints => rational_chart_points(&cur.field, &js)?,
        };
        let depth = node.depth + 1;
        let mut kids = vec![];
        for ch in &charts {
            let out = blowup_chart(&cur, &js, ch)?;
            let child = make_node(out.state, Some(id), depth, Some(chart_label(&cur, ch)))?;
            tree.nodes.push(child);
            kids.push(tree.nodes.len() - 1);
        }
        tree.nodes[id].state = cur;
        tree.nodes[id].center = Some(js);
        tree.nodes[id].children = kids.clone();
        stack.extend(kids.into_iter().rev());
    }
    Ok(tree)
}

/// One scripted blowing up, with names in the coordinates current at that step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptStep {
    pub center: Vec<String>,
    pub chart: String,
    #[serde(default)]
    pub translate: std::collections::BTreeMap<String, String>,
    #[serde(default, rename = "assert")]
    pub assertions: Vec<String>,
}

/// Outcome of one named assertion; `None` when it does not apply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssertionResult {
    pub name: String,
    pub passed: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceStep {
    pub index: usize,
    pub center: Vec<String>,
    pub chart: String,
    pub kind: Option<String>,
    pub h_before: String,
    pub h_after: Option<String>,
    pub exceptional_after: Vec<String>,
    pub extension: Option<Vec<u32>>,
    pub iota_before: Option<[u32; 3]>,
    pub iota_after: Option<[u32; 3]>,
    pub in_pc: Option<bool>,
    pub before: Option<InvariantRecord>,
    pub after: Option<InvariantRecord>,
    pub assertions: Vec<AssertionResult>,
    pub error: Option<String>,
}

impl TraceStep {
    pub fn failed(&self) -> bool {
        self.error.is_some() || self.assertions.iter().any(|a| a.passed == Some(false))
    }
}

/// A chart translation value: a field element, or `root(P)` for a monic
/// irreducible P in the variable t.
pub fn parse_translation(k: &FieldCtx, text: &str) -> Result<Translation> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix("root(").and_then(|r| r.strip_suffix(')')) {
        let poly = parse_poly(k, &["t".to_string()], inner)?;
        let deg = poly.degree().unwrap_or(0) as usize;
        let mut coeffs = vec![k.zero(); deg + 1];
        for (e, c) in &poly.terms {
            coeffs[e[0] as usize] = c.clone();
        }
        return Ok(Translation::Root(coeffs));
    }
    Ok(Translation::Rational(parse_elem(k, t)?))
}

fn var_index(state: &HypersurfaceState, name: &str) -> Result<usize> {
    state
        .vars
        .iter()
        .position(|v| v == name)
        .ok_or_else(|| Error::Domain(format!("unknown variable {name}")))
}

/// Resolves a script step against the current coordinates.
pub fn resolve_step(state: &HypersurfaceState, step: &ScriptStep) -> Result<(Vec<usize>, ChartChoice)> {
    let js = step.center.iter().map(|v| var_index(state, v)).collect::<Result<Vec<_>>>()?;
    let j0 = var_index(state, &step.chart)?;
    let mut translations = vec![];
    for (v, c) in &step.translate {
        translations.push((var_index(state, v)?, parse_translation(&state.field, c)?));
    }
    Ok((js, ChartChoice { j0, translations }))
}

fn iota_arr(i: &crate::blowup::Iota) -> [u32; 3] {
    [i.m, i.omega, i.kappa as u32]
}

fn evaluate(name: &str, out: &BlowupOutcome) -> AssertionResult {
    let passed = match name {
        "monotone" => out.iota_after.map(|a| a <= out.iota_before),
        "H" => out.h_check,
        // equality of ι forces the point onto PC
        "pc" => match (out.iota_after, out.in_pc) {
            (Some(a), Some(pc)) => Some(a < out.iota_before || pc),
            _ => None,
        },
        "origin" => out.origin_check,
        "permissible" => Some(out.center.kind.is_permissible()),
        "minimal" => Some(out.status == MinimizeStatus::Minimal),
        _ => Some(false),
    };
    AssertionResult { name: name.to_string(), passed }
}

/// Runs the script from `state`; with `strict`, stops at the first failing step.
pub fn run_trace(state: &HypersurfaceState, script: &[ScriptStep], strict: bool) -> Result<Vec<TraceStep>> {
    let mut cur = minimize(state, DEFAULT_BUDGET)?.state;
    let mut steps = vec![];
    for (index, step) in script.iter().enumerate() {
        let mut ts = TraceStep {
            index,
            center: step.center.clone(),
            chart: step.chart.clone(),
            kind: None,
            h_before: cur.h_string(),
            h_after: None,
            exceptional_after: vec![],
            extension: None,
            iota_before: None,
            iota_after: None,
            in_pc: None,
            before: None,
            after: None,
            assertions: vec![],
            error: None,
        };
        let res = resolve_step(&cur, step).and_then(|(js, ch)| blowup_chart(&cur, &js, &ch));
        match res {
            Ok(out) => {
                ts.kind = Some(out.center.kind.as_str().into());
                ts.h_after = Some(out.state.h_string());
                ts.exceptional_after = out.state.vars[..out.state.e].to_vec();
                ts.extension = out.extension.clone();
                ts.iota_before = Some(iota_arr(&out.iota_before));
                ts.iota_after = out.iota_after.as_ref().map(iota_arr);
                ts.in_pc = out.in_pc;
                ts.before = Some(out.before.clone());
                ts.after = out.after.clone();
                ts.assertions = step.assertions.iter().map(|a| evaluate(a, &out)).collect();
                if let Some(msg) = &out.after_error {
                    ts.error = Some(msg.clone());
                }
                cur = out.state;
            }
            Err(e) => ts.error = Some(e.to_string()),
        }
        let stop = strict && ts.failed();
        steps.push(ts);
        if stop {
            break;
        }
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_input;

    #[test]
    fn monomial_chain_over_f2() {
        let s = parse_input(
            "p = 2\nmode = \"equichar\"\nvariables = [\"u1\",\"u2\"]\nexceptional = [\"u1\",\"u2\"]\nh = \"Z^2 + u1^3*u2^3\"\n",
        )
        .unwrap();
        let t = resolve_omega0(&s, BranchPolicy::AllOriginCharts, 10).unwrap();
        assert!(t.certified());
        let deltas: Vec<String> = t.nodes.iter().map(|n| n.delta.as_ref().map(fmt_q).unwrap_or_default()).collect();
        assert_eq!(&deltas[..2], &["3".to_string(), "2".to_string()]);
    }

    #[test]
    fn smallest_center_prefers_fewer_coordinates() {
        let d = vec![crate::polyhedron::q(1, 2), crate::polyhedron::q(1, 2), qi(1)];
        assert_eq!(smallest_exceptional_center(&d), Some(vec![2]));
    }
}
