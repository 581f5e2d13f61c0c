//! Morphisms between colored graphs and mechanism pullback.
//!
//! A morphism sends every edge either to an edge or to a single vertex.
//! Pulling back a private mechanism along a morphism yields a private
//! mechanism on the source with the same `(ε, δ)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{boundary_graph_params_from, build_topology, Color, ColoredGraph, LineSpec};
use crate::mechanism::Mechanism;

/// Outcome of [`check_morphism`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismCheck {
    pub valid: bool,
    /// First source edge (in sorted order) whose image is neither an edge nor
    /// a single vertex.
    pub counterexample: Option<(String, String)>,
}

pub fn check_morphism(src: &ColoredGraph, tgt: &ColoredGraph, map: &BTreeMap<String, String>) -> Result<MorphismCheck> {
    for v in src.vertices() {
        let image = map.get(v).ok_or_else(|| Error::PartialMap(v.to_string()))?;
        if !tgt.contains(image) {
            return Err(Error::UnknownVertex(image.clone()));
        }
    }
    for (a, b) in src.edges() {
        let (ga, gb) = (&map[a], &map[b]);
        if ga != gb && !tgt.adjacent(ga, gb) {
            return Ok(MorphismCheck { valid: false, counterexample: Some((a.to_string(), b.to_string())) });
        }
    }
    Ok(MorphismCheck { valid: true, counterexample: None })
}

/// A validated morphism `source → target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Morphism<'a> {
    source: &'a ColoredGraph,
    target: &'a ColoredGraph,
    map: BTreeMap<String, String>,
}

impl<'a> Morphism<'a> {
    pub fn new(source: &'a ColoredGraph, target: &'a ColoredGraph, map: BTreeMap<String, String>) -> Result<Self> {
        let check = check_morphism(source, target, &map)?;
        if let Some((a, b)) = check.counterexample {
            return Err(Error::NotAMorphism(a, b));
        }
        // Entries outside the source are not part of the function.
        let map = map.into_iter().filter(|(k, _)| source.contains(k)).collect();
        Ok(Morphism { source, target, map })
    }

    pub fn identity(g: &'a ColoredGraph) -> Self {
        let map = g.vertices().map(|v| (v.to_string(), v.to_string())).collect();
        Morphism { source: g, target: g, map }
    }

    pub fn source(&self) -> &'a ColoredGraph {
        self.source
    }

    pub fn target(&self) -> &'a ColoredGraph {
        self.target
    }

    pub fn map(&self) -> &BTreeMap<String, String> {
        &self.map
    }

    pub fn image(&self, v: &str) -> Option<&str> {
        self.map.get(v).map(String::as_str)
    }

    /// `outer ∘ self`: first `self`, then `outer`.
    pub fn then(&self, outer: &Morphism<'a>) -> Result<Morphism<'a>> {
        if self.target != outer.source {
            return Err(Error::PreconditionViolated("composed morphisms do not share a middle graph".into()));
        }
        let map = self.map.iter().map(|(v, m)| (v.clone(), outer.map[m].clone())).collect();
        Ok(Morphism { source: self.source, target: outer.target, map })
    }
}

/// True iff the morphism maps every vertex to one of the same color.
pub fn check_color_preserving(m: &Morphism<'_>) -> bool {
    m.map.iter().all(|(v, img)| m.source.color(v).ok() == m.target.color(img).ok())
}

/// `M₁ = M₂ ∘ g`: every source vertex answers like its image.
pub fn pullback(m2: &Mechanism, g: &Morphism<'_>) -> Result<Mechanism> {
    let mut prob_blue = BTreeMap::new();
    for (v, img) in &g.map {
        prob_blue.insert(v.clone(), m2.prob_blue(img)?);
    }
    Ok(Mechanism { prob_blue })
}

/// The boundary graph of a colored graph together with the boundary map onto it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMorphism {
    pub spec: LineSpec,
    pub line: ColoredGraph,
    pub map: BTreeMap<String, String>,
}

impl BoundaryMorphism {
    pub fn morphism<'a>(&'a self, source: &'a ColoredGraph) -> Result<Morphism<'a>> {
        Morphism::new(source, &self.line, self.map.clone())
    }
}

/// Collapses `g` onto its `(n_B, n_R)` boundary line: a blue vertex at distance
/// `k` from the blue boundary goes to node `n_B − k`, a red one at distance `k`
/// to node `n_B + 1 + k`.
pub fn build_boundary_morphism(g: &ColoredGraph) -> Result<BoundaryMorphism> {
    let topo = build_topology(g);
    let spec = boundary_graph_params_from(&topo)?;
    let line = ColoredGraph::line(spec);
    let mut map = BTreeMap::new();
    for v in g.vertices() {
        let d = topo.dist(v).expect("params succeed only when every distance is defined");
        let node = match g.color(v)? {
            Color::Blue => spec.n_blue - d,
            Color::Red => spec.n_blue + 1 + d,
        };
        map.insert(v.to_string(), node.to_string());
    }
    Ok(BoundaryMorphism { spec, line, map })
}
