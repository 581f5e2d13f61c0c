//! Mechanisms as randomized colorings, the `(ε, δ)`-DP check, domination and
//! Hamming distortion.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Color, ColoredGraph};

/// Default tolerance for every floating-point comparison in the crate.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Privacy parameters `ε ≥ 0`, `0 ≤ δ < 1`.
///
/// `e^ε` is stored alongside `ε` so that parameters given as `ε = ln x` keep
/// `e^ε = x` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyParams {
    eps: f64,
    exp_eps: f64,
    delta: f64,
}

impl PrivacyParams {
    pub fn new(eps: f64, delta: f64) -> Result<Self> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::InvalidParams(format!("epsilon must be finite and >= 0, got {eps}")));
        }
        Self::check_delta(delta)?;
        Ok(PrivacyParams { eps, exp_eps: eps.exp(), delta })
    }

    /// Parameters with `ε = ln(exp_eps)`.
    pub fn from_exp(exp_eps: f64, delta: f64) -> Result<Self> {
        if !exp_eps.is_finite() || exp_eps < 1.0 {
            return Err(Error::InvalidParams(format!("e^epsilon must be finite and >= 1, got {exp_eps}")));
        }
        Self::check_delta(delta)?;
        Ok(PrivacyParams { eps: exp_eps.ln(), exp_eps, delta })
    }

    fn check_delta(delta: f64) -> Result<()> {
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::InvalidParams(format!("delta must lie in [0, 1), got {delta}")));
        }
        Ok(())
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn exp_eps(&self) -> f64 {
        self.exp_eps
    }

    /// `e^{ε k}`, evaluated as a single exponential.
    pub fn exp_eps_times(&self, k: i64) -> f64 {
        match k {
            0 => 1.0,
            1 => self.exp_eps,
            _ => (self.eps * k as f64).exp(),
        }
    }
}

/// Per-vertex probability of answering blue (`B_d`); `R_d = 1 − B_d`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Mechanism {
    pub prob_blue: BTreeMap<String, f64>,
}

impl Mechanism {
    pub fn new(prob_blue: BTreeMap<String, f64>) -> Result<Self> {
        for (v, &p) in &prob_blue {
            check_probability(v, p)?;
        }
        Ok(Mechanism { prob_blue })
    }

    /// Builds a mechanism from per-vertex probabilities of a truthful answer.
    pub fn from_truthfulness(g: &ColoredGraph, truth: &BTreeMap<String, f64>) -> Result<Self> {
        let mut prob_blue = BTreeMap::new();
        for (v, &t) in truth {
            check_probability(v, t)?;
            let b = match g.color(v)? {
                Color::Blue => t,
                Color::Red => 1.0 - t,
            };
            prob_blue.insert(v.clone(), b);
        }
        Ok(Mechanism { prob_blue })
    }

    /// Every vertex answers the same way.
    pub fn constant(g: &ColoredGraph, prob_blue: f64) -> Self {
        Mechanism { prob_blue: g.vertices().map(|v| (v.to_string(), prob_blue)).collect() }
    }

    /// Always answers the true color.
    pub fn truthful(g: &ColoredGraph) -> Self {
        let prob_blue = g
            .vertices()
            .map(|v| {
                let b = if g.color(v).expect("own vertex") == Color::Blue { 1.0 } else { 0.0 };
                (v.to_string(), b)
            })
            .collect();
        Mechanism { prob_blue }
    }

    pub fn prob_blue(&self, v: &str) -> Result<f64> {
        self.prob_blue.get(v).copied().ok_or_else(|| Error::IncompleteMechanism(v.to_string()))
    }

    pub fn prob_red(&self, v: &str) -> Result<f64> {
        Ok(1.0 - self.prob_blue(v)?)
    }

    pub fn prob_of(&self, v: &str, output: Color) -> Result<f64> {
        match output {
            Color::Blue => self.prob_blue(v),
            Color::Red => self.prob_red(v),
        }
    }

    /// `Pr[M(d) = f(d)]`.
    pub fn truthfulness(&self, g: &ColoredGraph, v: &str) -> Result<f64> {
        self.prob_of(v, g.color(v)?)
    }

    /// Probability of the wrong answer, `1 − Pr[M(d) = f(d)]`.
    pub fn error_probability(&self, g: &ColoredGraph, v: &str) -> Result<f64> {
        Ok(1.0 - self.truthfulness(g, v)?)
    }

    /// Checks the domain is exactly the vertex set of `g`.
    pub fn check_domain(&self, g: &ColoredGraph) -> Result<()> {
        for v in g.vertices() {
            if !self.prob_blue.contains_key(v) {
                return Err(Error::IncompleteMechanism(v.to_string()));
            }
        }
        if let Some(extra) = self.prob_blue.keys().find(|v| !g.contains(v)) {
            return Err(Error::UnknownVertex(extra.clone()));
        }
        Ok(())
    }

    /// Largest per-vertex absolute difference; both must share a domain.
    pub fn max_abs_diff(&self, other: &Mechanism) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (v, &p) in &self.prob_blue {
            worst = worst.max((p - other.prob_blue(v)?).abs());
        }
        if let Some(extra) = other.prob_blue.keys().find(|v| !self.prob_blue.contains_key(*v)) {
            return Err(Error::IncompleteMechanism(extra.clone()));
        }
        Ok(worst)
    }
}

fn check_probability(v: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability { vertex: v.to_string(), value: p });
    }
    Ok(())
}

/// One violated inequality `Pr[M(from)=output] ≤ e^ε Pr[M(to)=output] + δ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub from: String,
    pub to: String,
    pub output: Color,
    /// Amount by which the left side exceeds the right side.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DpReport {
    pub satisfied: bool,
    pub violations: Vec<Violation>,
}

impl DpReport {
    pub fn worst(&self) -> Option<&Violation> {
        self.violations.iter().max_by(|a, b| a.slack.total_cmp(&b.slack))
    }
}

/// Checks every edge in both directions and for both outputs, collecting all
/// violations larger than `tolerance`.
pub fn verify_dp(g: &ColoredGraph, m: &Mechanism, p: &PrivacyParams, tolerance: f64) -> Result<DpReport> {
    m.check_domain(g)?;
    let mut violations = Vec::new();
    for (a, b) in g.edges() {
        for (from, to) in [(a, b), (b, a)] {
            for output in [Color::Blue, Color::Red] {
                let slack = m.prob_of(from, output)? - p.exp_eps() * m.prob_of(to, output)? - p.delta();
                if slack > tolerance {
                    violations.push(Violation { from: from.to_string(), to: to.to_string(), output, slack });
                }
            }
        }
    }
    Ok(DpReport { satisfied: violations.is_empty(), violations })
}

/// Outcome of comparing two mechanisms under the domination order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    Dominates,
    DominatedBy,
    Equivalent,
    Incomparable,
}

/// Compares truthfulness vertex by vertex; differences within `tolerance`
/// count as ties.
pub fn compare_dominance(g: &ColoredGraph, m1: &Mechanism, m2: &Mechanism, tolerance: f64) -> Result<Dominance> {
    m1.check_domain(g)?;
    m2.check_domain(g)?;
    let (mut better, mut worse) = (false, false);
    for v in g.vertices() {
        let diff = m1.truthfulness(g, v)? - m2.truthfulness(g, v)?;
        if diff > tolerance {
            better = true;
        } else if diff < -tolerance {
            worse = true;
        }
    }
    Ok(match (better, worse) {
        (false, false) => Dominance::Equivalent,
        (true, false) => Dominance::Dominates,
        (false, true) => Dominance::DominatedBy,
        (true, true) => Dominance::Incomparable,
    })
}

/// `Σ_d Pr(d) (1 − Pr[M(d) = f(d)])`.
pub fn expected_hamming_distortion(g: &ColoredGraph, m: &Mechanism, dist: &BTreeMap<String, f64>) -> Result<f64> {
    m.check_domain(g)?;
    let mut total = 0.0;
    for (v, &w) in dist {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::BadDistribution(format!("weight {w} for `{v}`")));
        }
        if !g.contains(v) {
            return Err(Error::BadDistribution(format!("`{v}` is not a vertex")));
        }
        total += w;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::BadDistribution(format!("weights sum to {total}")));
    }
    let mut loss = 0.0;
    for (v, &w) in dist {
        loss += w * m.error_probability(g, v)?;
    }
    Ok(loss)
}

/// The same mechanism seen on the dual graph: outputs swap with the colors, so
/// truthfulness is unchanged at every vertex.
pub fn dual_mechanism(g: &ColoredGraph, m: &Mechanism) -> Result<Mechanism> {
    m.check_domain(g)?;
    Ok(Mechanism { prob_blue: m.prob_blue.iter().map(|(v, &b)| (v.clone(), 1.0 - b)).collect() })
}
