//! Brute-force grid search over mechanisms on tiny graphs.
//!
//! Used to certify analytic answers independently. The privacy predicate is
//! deliberately re-stated here from the defining inequality instead of
//! calling into [`crate::mechanism`].

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{connected_components, Color, ColoredGraph};
use crate::mechanism::{Mechanism, PrivacyParams};
use crate::optimizer::BoundaryCondition;

const CHECK_TOLERANCE: f64 = 1e-9;
const MAX_CANDIDATES: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub step: f64,
    pub max_vertices: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { step: 0.01, max_vertices: 4 }
    }
}

impl GridSpec {
    pub fn new(step: f64, max_vertices: usize) -> Result<Self> {
        let spec = GridSpec { step, max_vertices };
        spec.levels()?;
        Ok(spec)
    }

    /// Number of grid intervals in `[0, 1]`.
    pub fn levels(&self) -> Result<usize> {
        if !(self.step > 0.0 && self.step <= 1.0) {
            return Err(Error::InvalidParams(format!("grid step {} is outside (0, 1]", self.step)));
        }
        let inv = 1.0 / self.step;
        if (inv - inv.round()).abs() > 1e-9 {
            return Err(Error::InvalidParams(format!("1/step = {inv} is not an integer")));
        }
        Ok(inv.round() as usize)
    }

    fn value(levels: usize, k: usize) -> f64 {
        k as f64 / levels as f64
    }
}

/// A boundary value moved onto the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snap {
    pub vertex: String,
    pub requested: f64,
    pub snapped: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridStatus {
    Best,
    Pareto,
    InfeasibleOnGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub status: GridStatus,
    /// Componentwise-maximal feasible mechanism when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best: Option<Mechanism>,
    /// Non-dominated feasible mechanisms when no maximum exists.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pareto: Vec<Mechanism>,
    pub pareto_flag: bool,
    pub feasible_count: u64,
    pub snapped: Vec<Snap>,
    pub step: f64,
}

/// Backtracking enumerator over truthfulness values.
struct Search<'g> {
    g: &'g ColoredGraph,
    exp_eps: f64,
    delta: f64,
    order: Vec<usize>,
    /// Candidate truthfulness values per vertex, largest first.
    domains: Vec<Vec<f64>>,
    truth: Vec<f64>,
    assigned: Vec<bool>,
}

impl<'g> Search<'g> {
    /// Searches the vertices of one connected component; the rest of the
    /// graph is ignored.
    fn new(g: &'g ColoredGraph, fixed: &BTreeMap<usize, f64>, p: &PrivacyParams, levels: usize, component: &[usize]) -> Self {
        let n = g.len();
        let full: Vec<f64> = (0..=levels).rev().map(|k| GridSpec::value(levels, k)).collect();
        let domains = (0..n).map(|i| fixed.get(&i).map_or_else(|| full.clone(), |&x| vec![x])).collect();

        // Fixed vertices first, then breadth-first outwards so that edges are
        // checked as early as possible.
        let mut order: Vec<usize> = component.iter().copied().filter(|i| fixed.contains_key(i)).collect();
        let mut seen = vec![false; n];
        order.iter().for_each(|&i| seen[i] = true);
        let mut queue: VecDeque<usize> = order.iter().copied().collect();
        loop {
            while let Some(i) = queue.pop_front() {
                for &j in g.neighbors_at(i) {
                    if !seen[j] {
                        seen[j] = true;
                        order.push(j);
                        queue.push_back(j);
                    }
                }
            }
            match component.iter().copied().find(|&i| !seen[i]) {
                Some(i) => {
                    seen[i] = true;
                    order.push(i);
                    queue.push_back(i);
                }
                None => break,
            }
        }

        Search {
            g,
            exp_eps: p.exp_eps(),
            delta: p.delta(),
            order,
            domains,
            truth: vec![0.0; n],
            assigned: vec![false; n],
        }
    }

    fn prob_blue(&self, i: usize) -> f64 {
        match self.g.color_at(i) {
            Color::Blue => self.truth[i],
            Color::Red => 1.0 - self.truth[i],
        }
    }

    /// Pr[M(a)=v] ≤ e^ε Pr[M(b)=v] + δ for both outputs and both directions.
    fn edge_ok(&self, a: usize, b: usize) -> bool {
        let (ba, bb) = (self.prob_blue(a), self.prob_blue(b));
        let (ra, rb) = (1.0 - ba, 1.0 - bb);
        let le = |x: f64, y: f64| x <= self.exp_eps * y + self.delta + CHECK_TOLERANCE;
        le(ba, bb) && le(bb, ba) && le(ra, rb) && le(rb, ra)
    }

    fn consistent(&self, i: usize) -> bool {
        self.g.neighbors_at(i).iter().all(|&j| !self.assigned[j] || self.edge_ok(i, j))
    }

    /// Calls `visit` on every feasible point; stops early when it returns false.
    fn run(&mut self, visit: &mut dyn FnMut(&[f64]) -> bool) -> bool {
        self.descend(0, visit)
    }

    fn descend(&mut self, depth: usize, visit: &mut dyn FnMut(&[f64]) -> bool) -> bool {
        if depth == self.order.len() {
            return visit(&self.truth);
        }
        let i = self.order[depth];
        for k in 0..self.domains[i].len() {
            self.truth[i] = self.domains[i][k];
            self.assigned[i] = true;
            if self.consistent(i) && !self.descend(depth + 1, visit) {
                self.assigned[i] = false;
                return false;
            }
        }
        self.assigned[i] = false;
        true
    }

    fn feasible(&mut self, point: &[f64]) -> bool {
        self.truth.copy_from_slice(point);
        self.g.edge_indices().all(|(a, b)| self.edge_ok(a, b))
    }
}

struct Prepared {
    fixed: BTreeMap<usize, f64>,
    snapped: Vec<Snap>,
    levels: usize,
    /// Connected components as vertex indices. The feasible set is the
    /// product of the per-component feasible sets, so each is searched alone.
    components: Vec<Vec<usize>>,
}

fn prepare(g: &ColoredGraph, bc: &BoundaryCondition, spec: &GridSpec) -> Result<Prepared> {
    let levels = spec.levels()?;
    if g.len() > spec.max_vertices {
        return Err(Error::TooLarge(format!("{} vertices exceed the limit of {}", g.len(), spec.max_vertices)));
    }
    let mut fixed = BTreeMap::new();
    let mut snapped = Vec::new();
    for (v, &x) in &bc.fixed {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::BadBoundaryCondition(format!("value {x} for `{v}` is outside [0, 1]")));
        }
        let s = GridSpec::value(levels, (x * levels as f64).round() as usize);
        if s != x {
            snapped.push(Snap { vertex: v.clone(), requested: x, snapped: s });
        }
        fixed.insert(g.index_of(v)?, s);
    }
    let components: Vec<Vec<usize>> = connected_components(g, None)
        .into_iter()
        .map(|c| c.iter().map(|v| g.index_of(v).expect("own vertex")).collect())
        .collect();
    for comp in &components {
        let free = comp.iter().filter(|i| !fixed.contains_key(i)).count() as i32;
        if ((levels + 1) as f64).powi(free) > MAX_CANDIDATES {
            return Err(Error::TooLarge(format!("{free} connected free vertices at step {} exceed 1e8 candidates", spec.step)));
        }
    }
    Ok(Prepared { fixed, snapped, levels, components })
}

fn to_mechanism(g: &ColoredGraph, truth: &[f64]) -> Mechanism {
    let prob_blue = (0..g.len())
        .map(|i| {
            let b = match g.color_at(i) {
                Color::Blue => truth[i],
                Color::Red => 1.0 - truth[i],
            };
            (g.id(i).to_string(), b)
        })
        .collect();
    Mechanism { prob_blue }
}

/// Combines per-component point lists into whole-graph points.
fn product(n: usize, parts: &[(Vec<usize>, Vec<Vec<f64>>)]) -> Vec<Vec<f64>> {
    let mut acc = vec![vec![0.0; n]];
    for (comp, points) in parts {
        let mut next = Vec::with_capacity(acc.len() * points.len());
        for base in &acc {
            for pt in points {
                let mut full = base.clone();
                comp.iter().for_each(|&i| full[i] = pt[i]);
                next.push(full);
            }
        }
        acc = next;
    }
    acc
}

/// Enumerates every grid mechanism agreeing with `bc` (snapped) and reports
/// the componentwise-maximal feasible one, or the Pareto set if none exists.
pub fn grid_best(g: &ColoredGraph, bc: &BoundaryCondition, p: &PrivacyParams, spec: &GridSpec) -> Result<GridReport> {
    let prep = prepare(g, bc, spec)?;
    let n = g.len();
    let mut count = 1u64;
    let mut upper = vec![f64::NEG_INFINITY; n];
    for comp in &prep.components {
        let mut local = 0u64;
        Search::new(g, &prep.fixed, p, prep.levels, comp).run(&mut |t| {
            local += 1;
            comp.iter().for_each(|&i| upper[i] = upper[i].max(t[i]));
            true
        });
        count *= local;
    }

    let mut report = GridReport {
        status: GridStatus::InfeasibleOnGrid,
        best: None,
        pareto: Vec::new(),
        pareto_flag: false,
        feasible_count: count,
        snapped: prep.snapped,
        step: spec.step,
    };
    if count == 0 {
        return Ok(report);
    }
    let all: Vec<usize> = (0..n).collect();
    if Search::new(g, &prep.fixed, p, prep.levels, &all).feasible(&upper) {
        report.status = GridStatus::Best;
        report.best = Some(to_mechanism(g, &upper));
        return Ok(report);
    }

    // Non-dominated points of a product are products of non-dominated points.
    let mut fronts = Vec::new();
    for comp in &prep.components {
        let mut front: Vec<Vec<f64>> = Vec::new();
        Search::new(g, &prep.fixed, p, prep.levels, comp).run(&mut |t| {
            let ge = |a: &[f64], b: &[f64]| comp.iter().all(|&i| a[i] >= b[i]);
            if !front.iter().any(|f| ge(f, t)) {
                front.retain(|f| !ge(t, f));
                front.push(t.to_vec());
            }
            true
        });
        fronts.push((comp.clone(), front));
    }
    report.status = GridStatus::Pareto;
    report.pareto_flag = true;
    report.pareto = product(n, &fronts).iter().map(|t| to_mechanism(g, t)).collect();
    Ok(report)
}

/// Every grid-feasible mechanism agreeing with `bc`, as truthfulness maps.
pub fn grid_feasible_points(
    g: &ColoredGraph,
    bc: &BoundaryCondition,
    p: &PrivacyParams,
    spec: &GridSpec,
) -> Result<Vec<BTreeMap<String, f64>>> {
    let prep = prepare(g, bc, spec)?;
    let mut parts = Vec::new();
    for comp in &prep.components {
        let mut points = Vec::new();
        Search::new(g, &prep.fixed, p, prep.levels, comp).run(&mut |t| {
            points.push(t.to_vec());
            true
        });
        parts.push((comp.clone(), points));
    }
    Ok(product(g.len(), &parts)
        .into_iter()
        .map(|t| (0..g.len()).map(|i| (g.id(i).to_string(), t[i])).collect())
        .collect())
}

/// Whether some grid mechanism agreeing with `bc` satisfies the privacy
/// inequalities.
pub fn grid_feasible(g: &ColoredGraph, bc: &BoundaryCondition, p: &PrivacyParams, spec: &GridSpec) -> Result<bool> {
    let prep = prepare(g, bc, spec)?;
    Ok(prep.components.iter().all(|comp| !Search::new(g, &prep.fixed, p, prep.levels, comp).run(&mut |_| false)))
}

/// A grid-feasible mechanism beating `m` by more than one step at `vertex`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Improvement {
    pub vertex: String,
    pub mechanism: Mechanism,
}

pub fn find_improvement(
    g: &ColoredGraph,
    m: &Mechanism,
    bc: &BoundaryCondition,
    p: &PrivacyParams,
    spec: &GridSpec,
) -> Result<Option<Improvement>> {
    let prep = prepare(g, bc, spec)?;
    if !grid_feasible(g, bc, p, spec)? {
        return Ok(None);
    }
    for i in 0..g.len() {
        if prep.fixed.contains_key(&i) {
            continue;
        }
        let v = g.id(i);
        let b = m.prob_blue(v)?;
        let current = match g.color_at(i) {
            Color::Blue => b,
            Color::Red => 1.0 - b,
        };
        let comp = prep.components.iter().find(|c| c.contains(&i)).expect("every vertex has a component");
        let mut search = Search::new(g, &prep.fixed, p, prep.levels, comp);
        search.domains[i].retain(|&x| x > current + spec.step + 1e-12);
        if search.domains[i].is_empty() {
            continue;
        }
        let mut found = None;
        search.run(&mut |t| {
            found = Some(t.to_vec());
            false
        });
        if let Some(mut t) = found {
            // Complete the other components with any feasible values.
            for other in prep.components.iter().filter(|c| *c != comp) {
                Search::new(g, &prep.fixed, p, prep.levels, other).run(&mut |u| {
                    other.iter().for_each(|&j| t[j] = u[j]);
                    false
                });
            }
            return Ok(Some(Improvement { vertex: v.to_string(), mechanism: to_mechanism(g, &t) }));
        }
    }
    Ok(None)
}

/// True iff no grid-feasible mechanism with the same boundary values is more
/// truthful than `m` by more than one grid step at any vertex.
pub fn certify_no_improvement(
    g: &ColoredGraph,
    m: &Mechanism,
    bc: &BoundaryCondition,
    p: &PrivacyParams,
    spec: &GridSpec,
) -> Result<bool> {
    Ok(find_improvement(g, m, bc, p, spec)?.is_none())
}

/// Largest grid value `x` such that pinning every boundary vertex (of both
/// colors) to truthfulness `x` still admits a feasible grid mechanism.
pub fn balanced_grid_search(g: &ColoredGraph, p: &PrivacyParams, spec: &GridSpec) -> Result<Option<f64>> {
    let levels = spec.levels()?;
    let boundary: Vec<String> = (0..g.len()).filter(|&i| g.is_boundary_at(i)).map(|i| g.id(i).to_string()).collect();
    for k in (0..=levels).rev() {
        let x = GridSpec::value(levels, k);
        let bc = BoundaryCondition::new(boundary.iter().map(|v| (v.clone(), x)).collect());
        if grid_feasible(g, &bc, p, spec)? {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn bc(pairs: &[(&str, f64)]) -> BoundaryCondition {
        BoundaryCondition::new(pairs.iter().map(|(v, x)| (v.to_string(), *x)).collect())
    }

    #[test]
    fn grid_spec_validation() {
        assert_eq!(GridSpec::default().levels().unwrap(), 100);
        assert!(GridSpec::new(0.3, 4).is_err());
        assert!(GridSpec::new(0.0, 4).is_err());
        assert!(GridSpec::new(0.25, 4).is_ok());
    }

    #[test]
    fn balanced_two_vertex_search() {
        let g = catalog::two_vertex();
        let p = PrivacyParams::from_exp(2.0, 0.0).unwrap();
        let x = balanced_grid_search(&g, &p, &GridSpec::new(0.001, 4).unwrap()).unwrap().unwrap();
        assert!((x - 0.666).abs() < 1e-12);
    }

    #[test]
    fn three_node_line_matches_hand_values() {
        // (2,1)-line with boundary truthfulness 0.7 under (log 2, 0.1): node 1
        // is capped at (0.7 + 2 + 0.1 - 1) / 2 = 0.9 and node 3 at
        // min(2 * 0.3 + 0.1, 1 - 0.6 / 2) = 0.7.
        let g = catalog::line(2, 1);
        let p = PrivacyParams::from_exp(2.0, 0.1).unwrap();
        let r = grid_best(&g, &bc(&[("2", 0.7)]), &p, &GridSpec::default()).unwrap();
        assert_eq!(r.status, GridStatus::Best);
        let best = r.best.unwrap();
        assert!((best.prob_blue("1").unwrap() - 0.9).abs() < 1e-12);
        assert!((best.prob_blue("3").unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn adjacent_extreme_anchors_are_infeasible() {
        let g = catalog::two_vertex();
        let p = PrivacyParams::from_exp(2.0, 0.0).unwrap();
        let r = grid_best(&g, &bc(&[("1", 1.0), ("2", 1.0)]), &p, &GridSpec::default()).unwrap();
        assert_eq!(r.status, GridStatus::InfeasibleOnGrid);
        assert_eq!(r.feasible_count, 0);
    }

    #[test]
    fn off_grid_anchor_is_snapped_and_reported() {
        let g = catalog::line(2, 1);
        let p = PrivacyParams::from_exp(1.3, 0.1).unwrap();
        let r = grid_best(&g, &bc(&[("2", 12.0 / 13.0)]), &p, &GridSpec::default()).unwrap();
        assert_eq!(r.snapped.len(), 1);
        assert!((r.snapped[0].snapped - 0.92).abs() < 1e-12);
    }

    #[test]
    fn monochromatic_clique_is_certified() {
        let g = ColoredGraph::new([("a", Color::Blue), ("b", Color::Blue)], [("a", "b")]).unwrap();
        let p = PrivacyParams::from_exp(2.0, 0.0).unwrap();
        let m = Mechanism::truthful(&g);
        assert!(certify_no_improvement(&g, &m, &BoundaryCondition::default(), &p, &GridSpec::default()).unwrap());
    }

    #[test]
    fn lowered_value_is_not_certified() {
        let g = catalog::line(2, 1);
        let p = PrivacyParams::from_exp(2.0, 0.1).unwrap();
        let mut prob_blue = BTreeMap::new();
        prob_blue.insert("1".to_string(), 0.85);
        prob_blue.insert("2".to_string(), 0.7);
        prob_blue.insert("3".to_string(), 0.3);
        let m = Mechanism { prob_blue };
        let cond = bc(&[("2", 0.7)]);
        assert!(!certify_no_improvement(&g, &m, &cond, &p, &GridSpec::default()).unwrap());
    }

    #[test]
    fn too_many_vertices() {
        let g = catalog::line(3, 2);
        let p = PrivacyParams::from_exp(2.0, 0.1).unwrap();
        assert!(matches!(grid_best(&g, &bc(&[]), &p, &GridSpec::default()), Err(Error::TooLarge(_))));
    }

    #[test]
    fn enumeration_counts_match() {
        let g = catalog::two_vertex();
        let p = PrivacyParams::from_exp(2.0, 0.0).unwrap();
        let spec = GridSpec::new(0.1, 4).unwrap();
        let r = grid_best(&g, &bc(&[("1", 0.6)]), &p, &spec).unwrap();
        let pts = grid_feasible_points(&g, &bc(&[("1", 0.6)]), &p, &spec).unwrap();
        assert_eq!(r.feasible_count, pts.len() as u64);
        // B_2 must lie in [0.3, 0.8] (truthfulness of red in [0.2, 0.7]).
        assert_eq!(pts.len(), 6);
    }
}
