//! Closed-form optimal mechanisms.
//!
//! On the `(n_B, n_R)`-line with a fixed wrong-answer probability `R_{n_B}` at
//! the blue boundary node, the optimal wrong-answer probabilities moving away
//! from the boundary follow the *initial* recurrence
//! `R_i = 1 − e^ε + e^ε R_{i+1} − δ` for the first `τ + 1` steps and the
//! *terminal* recurrence `R_i = (R_{i+1} − δ) / e^ε` afterwards, where `τ` is
//! the transition parameter. Every probability is clamped to `[0, 1]`.
//!
//! Pulling the line solution back along the boundary morphism gives the
//! optimal boundary-homogeneous mechanism of any colored graph.

use std::collections::BTreeMap;

use serde::ser::{Serialize, Serializer};
use serde::Serialize as DeriveSerialize;

use crate::error::{Error, Result};
use crate::graph::{boundary_graph_params_from, build_topology, Color, ColoredGraph, LineSpec};
use crate::mechanism::{Mechanism, PrivacyParams};
use crate::morphism::{build_boundary_morphism, pullback};

/// Transition parameter. `PosInfinity` arises when `R_{n_B} = 1` and `δ = 0`;
/// the initial recurrence then applies at every node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tau {
    Finite(i64),
    PosInfinity,
}

impl Tau {
    /// Whether step `i` away from the anchor uses the initial recurrence.
    pub fn is_initial_step(&self, i: usize) -> bool {
        match *self {
            Tau::PosInfinity => true,
            Tau::Finite(t) => (i as i64) <= t + 1,
        }
    }

    /// Number of initial steps taken before switching, capped at `max_steps`.
    pub fn initial_steps(&self, max_steps: usize) -> usize {
        match *self {
            Tau::PosInfinity => max_steps,
            Tau::Finite(t) => (t + 1).clamp(0, max_steps as i64) as usize,
        }
    }
}

impl Serialize for Tau {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Tau::Finite(t) => s.serialize_i64(*t),
            Tau::PosInfinity => s.serialize_str("+inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, DeriveSerialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Initial,
    Terminal,
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::PreconditionViolated(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(())
}

pub(crate) fn clamp_unit(x: f64) -> f64 {
    // `+ 0.0` turns a negative zero into a positive one.
    x.clamp(0.0, 1.0) + 0.0
}

/// Transition parameter for a boundary wrong-answer probability `r_nb`.
pub fn compute_tau(r_nb: f64, p: &PrivacyParams) -> Tau {
    if p.eps() == 0.0 {
        return Tau::Finite(-1);
    }
    let (y, z) = (p.exp_eps(), p.delta());
    let numerator = y + 2.0 * z - 1.0;
    let denominator = (1.0 - r_nb) * (p.exp_eps_times(3) - y) + z * (p.exp_eps_times(2) + y);
    if denominator <= 0.0 {
        return Tau::PosInfinity;
    }
    let t = ((numerator / denominator).ln() / p.eps()).ceil();
    Tau::Finite(t as i64)
}

/// Initial recurrence `1 − e^{εi}(1 − R_n) − δ(e^{εi} − 1)/(e^ε − 1)`, unclamped.
pub fn r_initial(r_n: f64, i: usize, p: &PrivacyParams) -> Result<f64> {
    if p.eps() == 0.0 {
        return Err(Error::UndefinedBranch);
    }
    let g = p.exp_eps_times(i as i64);
    Ok(1.0 - g * (1.0 - r_n) - p.delta() * (g - 1.0) / (p.exp_eps() - 1.0))
}

/// Terminal recurrence `R_n/e^{εi} − δ(e^{εi} − 1)/(e^{εi}(e^ε − 1))`, or
/// `R_n − iδ` when `ε = 0`. Unclamped.
pub fn r_terminal(r_n: f64, i: usize, p: &PrivacyParams) -> f64 {
    if p.eps() == 0.0 {
        return r_n - i as f64 * p.delta();
    }
    let g = p.exp_eps_times(i as i64);
    r_n / g - p.delta() * (g - 1.0) / (g * (p.exp_eps() - 1.0))
}

/// Raw optimal wrong-answer probability `steps` nodes away from an anchor whose
/// wrong-answer probability is `anchor`, along a path of same-colored nodes.
pub fn error_at_distance(anchor: f64, steps: usize, p: &PrivacyParams) -> f64 {
    let tau = compute_tau(anchor, p);
    let switch = tau.initial_steps(steps);
    if steps <= switch {
        if steps == 0 {
            anchor
        } else {
            r_initial(anchor, steps, p).expect("initial steps only occur when epsilon > 0")
        }
    } else {
        let pivot = if switch == 0 { anchor } else { r_initial(anchor, switch, p).expect("epsilon > 0") };
        r_terminal(pivot, steps - switch, p)
    }
}

/// One blue node of a line solution.
#[derive(Debug, Clone, Copy, PartialEq, DeriveSerialize)]
pub struct LineNode {
    pub raw: f64,
    pub clamped: f64,
    pub branch: Branch,
}

/// Optimal wrong-answer probabilities `R_1..R_{n_B}` on the blue side of a line.
#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct LineSolution {
    pub spec: LineSpec,
    pub tau: Tau,
    /// Keyed by 1-based node index.
    pub nodes: BTreeMap<usize, LineNode>,
}

impl LineSolution {
    pub fn clamped(&self, node: usize) -> Option<f64> {
        self.nodes.get(&node).map(|n| n.clamped)
    }

    pub fn raw(&self, node: usize) -> Option<f64> {
        self.nodes.get(&node).map(|n| n.raw)
    }
}

/// Blue side of the optimal line mechanism with `Pr[M(n_B) = red] = r_nb`.
pub fn optimal_line_blue(spec: LineSpec, r_nb: f64, p: &PrivacyParams) -> Result<LineSolution> {
    check_unit("boundary probability", r_nb)?;
    let tau = compute_tau(r_nb, p);
    let mut nodes = BTreeMap::new();
    for i in 0..spec.n_blue {
        let raw = error_at_distance(r_nb, i, p);
        let branch = if tau.is_initial_step(i) { Branch::Initial } else { Branch::Terminal };
        nodes.insert(spec.n_blue - i, LineNode { raw, clamped: clamp_unit(raw), branch });
    }
    Ok(LineSolution { spec, tau, nodes })
}

/// Smallest admissible wrong-answer probability next to a node whose
/// wrong-answer probability is `prev`: the larger of the two lower bounds.
fn next_min_error(prev: f64, p: &PrivacyParams) -> f64 {
    let (y, z) = (p.exp_eps(), p.delta());
    clamp_unit((1.0 - y + y * prev - z).max((prev - z) / y))
}

/// Optimal mechanism on the whole line. Red nodes are filled outward from the
/// blue boundary node, each taking the smallest blue probability its
/// predecessor allows.
pub fn optimal_line_full(spec: LineSpec, r_nb: f64, p: &PrivacyParams) -> Result<Mechanism> {
    let blue = optimal_line_blue(spec, r_nb, p)?;
    let mut prob_blue = BTreeMap::new();
    for (node, n) in &blue.nodes {
        prob_blue.insert(node.to_string(), 1.0 - n.clamped);
    }
    let mut b = 1.0 - r_nb;
    for k in 1..=spec.n_red {
        b = next_min_error(b, p);
        prob_blue.insert((spec.n_blue + k).to_string(), b);
    }
    Ok(Mechanism { prob_blue })
}

/// Optimal boundary-homogeneous mechanism with truthfulness `m_b` at every
/// blue boundary vertex, obtained by solving the boundary line and pulling the
/// solution back.
pub fn optimal_boundary_homogeneous(g: &ColoredGraph, m_b: f64, p: &PrivacyParams) -> Result<Mechanism> {
    check_unit("boundary truthfulness", m_b)?;
    let bm = build_boundary_morphism(g)?;
    let line_mech = optimal_line_full(bm.spec, 1.0 - m_b, p)?;
    pullback(&line_mech, &bm.morphism(g)?)
}

/// The same mechanism as [`optimal_boundary_homogeneous`], evaluated directly
/// from each vertex's distance to its own boundary. Red vertices sit one step
/// further from the blue boundary than their distance to the red boundary.
pub fn homogeneous_direct(g: &ColoredGraph, m_b: f64, p: &PrivacyParams) -> Result<Mechanism> {
    check_unit("boundary truthfulness", m_b)?;
    let topo = build_topology(g);
    boundary_graph_params_from(&topo)?;
    let mut prob_blue = BTreeMap::new();
    for v in g.vertices() {
        let d = topo.dist(v).expect("checked by boundary params");
        let b = match g.color(v)? {
            Color::Blue => 1.0 - clamp_unit(error_at_distance(1.0 - m_b, d, p)),
            Color::Red => clamp_unit(error_at_distance(m_b, d + 1, p)),
        };
        prob_blue.insert(v.to_string(), b);
    }
    Ok(Mechanism { prob_blue })
}

/// Wrong-answer probability of every blue vertex when the blue boundary
/// answers red with probability `r_boundary ≤ 1/2`; only the terminal
/// recurrence is involved.
pub fn half_condition_mechanism(g: &ColoredGraph, r_boundary: f64, p: &PrivacyParams) -> Result<BTreeMap<String, f64>> {
    if !(0.0..=0.5).contains(&r_boundary) {
        return Err(Error::PreconditionViolated(format!("boundary probability must lie in [0, 1/2], got {r_boundary}")));
    }
    let topo = build_topology(g);
    let mut out = BTreeMap::new();
    for v in &topo.blue_set {
        let d = topo.dist(v).ok_or_else(|| Error::NoBoundary {
            color: Color::Blue,
            detail: format!("vertex `{v}` cannot reach the blue boundary"),
        })?;
        out.insert(v.clone(), clamp_unit(r_terminal(r_boundary, d, p)));
    }
    Ok(out)
}

/// Truthfulness shared by both boundaries in the optimal balanced mechanism,
/// `(e^ε + δ)/(1 + e^ε)`.
pub fn balanced_boundary_truthfulness(p: &PrivacyParams) -> f64 {
    (p.exp_eps() + p.delta()) / (1.0 + p.exp_eps())
}

/// Raw wrong-answer probability of the optimal balanced mechanism at distance
/// `dist` from the vertex's own boundary.
pub fn balanced_error_probability(dist: usize, p: &PrivacyParams) -> f64 {
    let (y, z) = (p.exp_eps(), p.delta());
    if p.eps() == 0.0 {
        return (1.0 - z) / 2.0 - dist as f64 * z;
    }
    let k = dist as i64;
    let gk = p.exp_eps_times(k);
    let gk1 = p.exp_eps_times(k + 1);
    (y - 1.0 - z * (gk1 + gk - 2.0)) / (gk * (y + 1.0) * (y - 1.0))
}

/// `P_e(d) = max{·, 0}` for a vertex at distance `dist` from its own boundary,
/// i.e. one less than the path length to the nearest vertex of the opposite
/// color.
pub fn summary_error_probability(dist: usize, p: &PrivacyParams) -> f64 {
    let e = p.exp_eps();
    let z = p.delta();
    if p.eps() == 0.0 {
        return ((1.0 - z) / 2.0 - dist as f64 * z).max(0.0);
    }
    let d = dist as f64;
    let num = e - 1.0 - z * ((p.eps() * (d + 1.0)).exp() + (p.eps() * d).exp() - 2.0);
    let den = (p.eps() * d).exp() * (e + 1.0) * (e - 1.0);
    (num / den).max(0.0)
}

/// Optimal balanced mechanism: both boundaries equally truthful, every vertex's
/// wrong-answer probability given by [`balanced_error_probability`].
pub fn balanced_mechanism(g: &ColoredGraph, p: &PrivacyParams) -> Result<Mechanism> {
    let topo = build_topology(g);
    boundary_graph_params_from(&topo)?;
    let mut prob_blue = BTreeMap::new();
    for v in g.vertices() {
        let d = topo.dist(v).expect("checked by boundary params");
        let err = clamp_unit(balanced_error_probability(d, p));
        let b = match g.color(v)? {
            Color::Blue => 1.0 - err,
            Color::Red => err,
        };
        prob_blue.insert(v.to_string(), b);
    }
    Ok(Mechanism { prob_blue })
}
