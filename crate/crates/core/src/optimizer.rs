//! Optimal mechanism for arbitrary fixed boundary values.
//!
//! With the blue boundary fixed, every remaining privacy constraint between
//! two same-colored vertices is an upper bound `t_d ≤ h(t_{d'})` on
//! truthfulness with `h` monotone, and every constraint across a bichromatic
//! edge bounds a red vertex by a constant. The feasible set is therefore
//! closed under componentwise maximum, and its greatest element is the
//! greatest fixpoint of the bound maps. It is reached by Bellman-Ford style
//! sweeps starting from full truthfulness: both bound families satisfy
//! `h(x) ≥ x` on `[0, 1]`, so no cycle ever tightens a value and at most
//! `|V|` sweeps are needed.
//!
//! Constraints whose tightened side is a fixed value cannot be enforced by
//! relaxation; they are checked at the end and a violation proves that no
//! private mechanism meets the boundary condition.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::closed_form::clamp_unit;
use crate::error::{Error, Result};
use crate::graph::{build_topology, connected_components, Color, ColoredGraph, Topology};
use crate::mechanism::{verify_dp, Mechanism, PrivacyParams, Violation, DEFAULT_TOLERANCE};

/// Fixed truthfulness `Pr[M(d) = f(d)]` for boundary vertices. Must cover the
/// blue boundary exactly, optionally together with the whole red boundary.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pub fixed: BTreeMap<String, f64>,
}

impl BoundaryCondition {
    pub fn new(fixed: BTreeMap<String, f64>) -> Self {
        BoundaryCondition { fixed }
    }

    /// The same truthfulness on every blue boundary vertex.
    pub fn homogeneous(g: &ColoredGraph, m_b: f64) -> Self {
        let topo = build_topology(g);
        BoundaryCondition { fixed: topo.boundary_blue.iter().map(|v| (v.clone(), m_b)).collect() }
    }

    /// Checks the domain against the graph; returns whether the red boundary
    /// is fixed as well.
    pub fn validate(&self, g: &ColoredGraph, topo: &Topology) -> Result<bool> {
        for (v, &x) in &self.fixed {
            if !g.contains(v) {
                return Err(Error::BadBoundaryCondition(format!("`{v}` is not a vertex")));
            }
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::BadBoundaryCondition(format!("value {x} for `{v}` is outside [0, 1]")));
            }
        }
        if let Some(v) = topo.boundary_blue.iter().find(|v| !self.fixed.contains_key(*v)) {
            return Err(Error::BadBoundaryCondition(format!("blue boundary vertex `{v}` has no value")));
        }
        let extra: BTreeSet<&String> = self.fixed.keys().filter(|v| !topo.boundary_blue.contains(*v)).collect();
        if extra.is_empty() {
            return Ok(false);
        }
        if let Some(v) = extra.iter().find(|v| !topo.boundary_red.contains(**v)) {
            return Err(Error::BadBoundaryCondition(format!("`{v}` is not a boundary vertex")));
        }
        if extra.len() != topo.boundary_red.len() {
            return Err(Error::BadBoundaryCondition("red boundary values must be given for all or none of it".into()));
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeResult {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mechanism: Option<Mechanism>,
    /// The most violated inequality when infeasible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Violation>,
    pub rounds: usize,
    /// Free vertices whose same-colored component touches no anchor; they are
    /// left fully truthful.
    pub unanchored: Vec<String>,
}

impl OptimizeResult {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

/// Maximizes truthfulness everywhere subject to `bc` and `(ε, δ)`-DP.
pub fn optimize_with_boundary(g: &ColoredGraph, bc: &BoundaryCondition, p: &PrivacyParams) -> Result<OptimizeResult> {
    let order: Vec<usize> = (0..g.len()).collect();
    optimize_in_order(g, bc, p, &order)
}

/// As [`optimize_with_boundary`], sweeping free vertices in the given order.
/// The result does not depend on the order.
pub fn optimize_with_sweep_order(
    g: &ColoredGraph,
    bc: &BoundaryCondition,
    p: &PrivacyParams,
    order: &[&str],
) -> Result<OptimizeResult> {
    let idx: Vec<usize> = order.iter().map(|v| g.index_of(v)).collect::<Result<_>>()?;
    let distinct: BTreeSet<usize> = idx.iter().copied().collect();
    if distinct.len() != g.len() || idx.len() != g.len() {
        return Err(Error::PreconditionViolated("sweep order must list every vertex exactly once".into()));
    }
    optimize_in_order(g, bc, p, &idx)
}

fn optimize_in_order(g: &ColoredGraph, bc: &BoundaryCondition, p: &PrivacyParams, order: &[usize]) -> Result<OptimizeResult> {
    let topo = build_topology(g);
    bc.validate(g, &topo)?;

    let n = g.len();
    let mut truth = vec![1.0; n];
    let mut fixed = vec![false; n];
    for (v, &x) in &bc.fixed {
        let i = g.index_of(v)?;
        truth[i] = x;
        fixed[i] = true;
    }

    let mut rounds = 0;
    for color in [Color::Blue, Color::Red] {
        let free: Vec<usize> = order.iter().copied().filter(|&i| g.color_at(i) == color && !fixed[i]).collect();
        rounds += relax(g, p, &free, &mut truth)?;
    }

    let mut unanchored = Vec::new();
    for color in [Color::Blue, Color::Red] {
        for comp in connected_components(g, Some(color)) {
            let anchored = comp.iter().any(|v| {
                let i = g.index_of(v).expect("component of g");
                fixed[i] || g.is_boundary_at(i)
            });
            if !anchored {
                unanchored.extend(comp);
            }
        }
    }

    let truth_map: BTreeMap<String, f64> = (0..n).map(|i| (g.id(i).to_string(), truth[i])).collect();
    let mechanism = Mechanism::from_truthfulness(g, &truth_map)?;
    let report = verify_dp(g, &mechanism, p, DEFAULT_TOLERANCE)?;
    if report.satisfied {
        Ok(OptimizeResult { status: Status::Optimal, mechanism: Some(mechanism), witness: None, rounds, unanchored })
    } else {
        Ok(OptimizeResult { status: Status::Infeasible, mechanism: None, witness: report.worst().cloned(), rounds, unanchored })
    }
}

/// Sweeps the upper-bound maps over `free` until nothing moves. Neighbors of
/// the other color must already be final. Returns the number of sweeps.
fn relax(g: &ColoredGraph, p: &PrivacyParams, free: &[usize], truth: &mut [f64]) -> Result<usize> {
    let (y, z) = (p.exp_eps(), p.delta());
    let cap = g.len() + 1;
    for round in 1..=cap {
        let mut changed = false;
        for &d in free {
            let mut best = truth[d];
            for &j in g.neighbors_at(d) {
                let tj = truth[j];
                if g.color_at(j) == g.color_at(d) {
                    best = best.min(y * tj + z).min((tj + y + z - 1.0) / y);
                } else {
                    // `tj` is the truthfulness of a vertex of the other color,
                    // i.e. its probability of giving `d`'s wrong answer.
                    best = best.min(y * (1.0 - tj) + z).min(1.0 - (tj - z) / y);
                }
            }
            let best = clamp_unit(best);
            if best < truth[d] {
                if truth[d] - best > 1e-15 {
                    changed = true;
                }
                truth[d] = best;
            }
        }
        if !changed {
            return Ok(round);
        }
    }
    Err(Error::NoConvergence(cap))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Violation>,
}

pub fn feasibility_check(g: &ColoredGraph, bc: &BoundaryCondition, p: &PrivacyParams) -> Result<Feasibility> {
    let r = optimize_with_boundary(g, bc, p)?;
    Ok(Feasibility { feasible: r.is_optimal(), witness: r.witness })
}
