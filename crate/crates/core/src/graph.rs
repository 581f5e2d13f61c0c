//! Colored dataset graphs and their topology.
//!
//! A [`ColoredGraph`] is a family of datasets: vertices are datasets, an edge
//! joins two neighboring datasets, and every vertex carries the true value of
//! the binary query as a color. Vertices are opaque string ids and every
//! iteration order in this crate is sorted by id.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// True color of a dataset, i.e. the value of the binary query on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Color {
    Blue = 1,
    Red = 2,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Blue => Color::Red,
            Color::Red => Color::Blue,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Blue => "blue",
            Color::Red => "red",
        }
    }
}

impl TryFrom<u8> for Color {
    type Error = String;

    fn try_from(value: u8) -> std::result::Result<Self, Self::Error> {
        match value {
            1 => Ok(Color::Blue),
            2 => Ok(Color::Red),
            other => Err(format!("color must be 1 or 2, got {other}")),
        }
    }
}

impl From<Color> for u8 {
    fn from(c: Color) -> u8 {
        c as u8
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An undirected simple graph with a binary coloring of its vertices.
///
/// Vertices are stored sorted by id; internal algorithms address them by
/// their position in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    colors: Vec<Color>,
    adj: Vec<Vec<usize>>,
}

impl ColoredGraph {
    /// Builds a graph, rejecting duplicate ids, self-loops, duplicate edges and
    /// edges with undeclared endpoints.
    pub fn new<S, T>(vertices: impl IntoIterator<Item = (S, Color)>, edges: impl IntoIterator<Item = (T, T)>) -> Result<Self>
    where
        S: Into<String>,
        T: AsRef<str>,
    {
        let mut pairs: Vec<(String, Color)> = vertices.into_iter().map(|(v, c)| (v.into(), c)).collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidGraph(format!("duplicate vertex `{}`", w[0].0)));
            }
        }
        let ids: Vec<String> = pairs.iter().map(|p| p.0.clone()).collect();
        let colors: Vec<Color> = pairs.iter().map(|p| p.1).collect();
        let index: HashMap<String, usize> = ids.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let mut adj = vec![Vec::new(); ids.len()];
        let mut seen = BTreeSet::new();
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let ia = *index.get(a).ok_or_else(|| Error::InvalidGraph(format!("edge endpoint `{a}` is not a vertex")))?;
            let ib = *index.get(b).ok_or_else(|| Error::InvalidGraph(format!("edge endpoint `{b}` is not a vertex")))?;
            if ia == ib {
                return Err(Error::InvalidGraph(format!("self-loop at `{a}`")));
            }
            if !seen.insert((ia.min(ib), ia.max(ib))) {
                return Err(Error::InvalidGraph(format!("duplicate edge `{a}` ~ `{b}`")));
            }
            adj[ia].push(ib);
            adj[ib].push(ia);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(ColoredGraph { ids, index, colors, adj })
    }

    /// The `(n_blue, n_red)`-line: nodes `"1"..="n_blue + n_red"`, the first
    /// `n_blue` blue, consecutive nodes adjacent.
    pub fn line(spec: LineSpec) -> ColoredGraph {
        let n = spec.len();
        let vertices = (1..=n).map(|i| (i.to_string(), spec.color_of(i)));
        let edges: Vec<(String, String)> = (1..n).map(|i| (i.to_string(), (i + 1).to_string())).collect();
        ColoredGraph::new(vertices, edges).expect("line graphs are well formed")
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Vertex ids in sorted order.
    pub fn vertices(&self) -> impl Iterator<Item = &str> + '_ {
        self.ids.iter().map(String::as_str)
    }

    pub fn contains(&self, v: &str) -> bool {
        self.index.contains_key(v)
    }

    pub fn index_of(&self, v: &str) -> Result<usize> {
        self.index.get(v).copied().ok_or_else(|| Error::UnknownVertex(v.to_string()))
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn color(&self, v: &str) -> Result<Color> {
        Ok(self.colors[self.index_of(v)?])
    }

    pub fn color_at(&self, i: usize) -> Color {
        self.colors[i]
    }

    pub fn neighbors_at(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn neighbors(&self, v: &str) -> Result<impl Iterator<Item = &str> + '_> {
        let i = self.index_of(v)?;
        Ok(self.adj[i].iter().map(move |&j| self.ids[j].as_str()))
    }

    pub fn adjacent(&self, a: &str, b: &str) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&i), Some(&j)) => self.adj[i].binary_search(&j).is_ok(),
            _ => false,
        }
    }

    /// Each undirected edge once, as `(lower index, higher index)`.
    pub fn edge_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edge_indices().map(|(i, j)| (self.id(i), self.id(j)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// The same graph with blue and red swapped.
    pub fn dual(&self) -> ColoredGraph {
        ColoredGraph {
            ids: self.ids.clone(),
            index: self.index.clone(),
            colors: self.colors.iter().map(|c| c.opposite()).collect(),
            adj: self.adj.clone(),
        }
    }

    /// Relabels every vertex through `rename`, which must be injective.
    pub fn relabel(&self, rename: impl Fn(&str) -> String) -> Result<ColoredGraph> {
        let vertices: Vec<(String, Color)> = self.ids.iter().zip(&self.colors).map(|(v, &c)| (rename(v), c)).collect();
        let edges: Vec<(String, String)> = self.edges().map(|(a, b)| (rename(a), rename(b))).collect();
        ColoredGraph::new(vertices, edges)
    }

    pub fn color_class(&self, color: Color) -> BTreeSet<String> {
        self.ids.iter().zip(&self.colors).filter(|(_, &c)| c == color).map(|(v, _)| v.clone()).collect()
    }

    /// A vertex is on the boundary when it has a neighbor of the opposite color.
    pub fn is_boundary_at(&self, i: usize) -> bool {
        self.adj[i].iter().any(|&j| self.colors[j] != self.colors[i])
    }
}

/// Parameters of an `(n_blue, n_red)`-line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LineSpec {
    pub n_blue: usize,
    pub n_red: usize,
}

impl LineSpec {
    pub fn new(n_blue: usize, n_red: usize) -> Result<Self> {
        if n_blue == 0 || n_red == 0 {
            return Err(Error::PreconditionViolated(format!("line needs n_blue >= 1 and n_red >= 1, got ({n_blue}, {n_red})")));
        }
        Ok(LineSpec { n_blue, n_red })
    }

    pub fn len(&self) -> usize {
        self.n_blue + self.n_red
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Color of the 1-based node `i`.
    pub fn color_of(&self, i: usize) -> Color {
        if i <= self.n_blue {
            Color::Blue
        } else {
            Color::Red
        }
    }

    pub fn reversed(&self) -> LineSpec {
        LineSpec { n_blue: self.n_red, n_red: self.n_blue }
    }
}

/// Blue/red sets, their interiors and boundaries, and each vertex's distance
/// to the boundary of its own color.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Topology {
    pub blue_set: BTreeSet<String>,
    pub red_set: BTreeSet<String>,
    pub interior_blue: BTreeSet<String>,
    pub interior_red: BTreeSet<String>,
    pub boundary_blue: BTreeSet<String>,
    pub boundary_red: BTreeSet<String>,
    /// `None` when no boundary vertex of the same color is reachable through
    /// same-colored vertices.
    pub dist_to_boundary: BTreeMap<String, Option<usize>>,
    pub no_boundary_blue: bool,
    pub no_boundary_red: bool,
}

impl Topology {
    pub fn boundary(&self, color: Color) -> &BTreeSet<String> {
        match color {
            Color::Blue => &self.boundary_blue,
            Color::Red => &self.boundary_red,
        }
    }

    pub fn interior(&self, color: Color) -> &BTreeSet<String> {
        match color {
            Color::Blue => &self.interior_blue,
            Color::Red => &self.interior_red,
        }
    }

    pub fn class(&self, color: Color) -> &BTreeSet<String> {
        match color {
            Color::Blue => &self.blue_set,
            Color::Red => &self.red_set,
        }
    }

    pub fn dist(&self, v: &str) -> Option<usize> {
        self.dist_to_boundary.get(v).copied().flatten()
    }
}

/// Computes the topology of `g`. Distances to the boundary are found by a
/// multi-source BFS that only walks through vertices of the source's color.
pub fn build_topology(g: &ColoredGraph) -> Topology {
    let dist = same_color_boundary_distances(g);
    let mut topo = Topology {
        blue_set: BTreeSet::new(),
        red_set: BTreeSet::new(),
        interior_blue: BTreeSet::new(),
        interior_red: BTreeSet::new(),
        boundary_blue: BTreeSet::new(),
        boundary_red: BTreeSet::new(),
        dist_to_boundary: BTreeMap::new(),
        no_boundary_blue: false,
        no_boundary_red: false,
    };
    for i in 0..g.len() {
        let v = g.id(i).to_string();
        let on_boundary = g.is_boundary_at(i);
        match (g.color_at(i), on_boundary) {
            (Color::Blue, true) => topo.boundary_blue.insert(v.clone()),
            (Color::Blue, false) => topo.interior_blue.insert(v.clone()),
            (Color::Red, true) => topo.boundary_red.insert(v.clone()),
            (Color::Red, false) => topo.interior_red.insert(v.clone()),
        };
        match g.color_at(i) {
            Color::Blue => topo.blue_set.insert(v.clone()),
            Color::Red => topo.red_set.insert(v.clone()),
        };
        topo.dist_to_boundary.insert(v, dist[i]);
    }
    topo.no_boundary_blue = topo.boundary_blue.is_empty();
    topo.no_boundary_red = topo.boundary_red.is_empty();
    topo
}

pub(crate) fn same_color_boundary_distances(g: &ColoredGraph) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.len()];
    let mut queue = VecDeque::new();
    for i in 0..g.len() {
        if g.is_boundary_at(i) {
            dist[i] = Some(0);
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let d = dist[i].unwrap_or(0);
        for &j in g.neighbors_at(i) {
            if g.color_at(j) == g.color_at(i) && dist[j].is_none() {
                dist[j] = Some(d + 1);
                queue.push_back(j);
            }
        }
    }
    dist
}

/// Unrestricted shortest-path distance (edge count) from `d` to the nearest
/// vertex of `targets`.
pub fn distance<'a>(g: &ColoredGraph, d: &str, targets: impl IntoIterator<Item = &'a str>) -> Result<usize> {
    let start = g.index_of(d)?;
    let mut is_target = vec![false; g.len()];
    let mut any = false;
    for t in targets {
        is_target[g.index_of(t)?] = true;
        any = true;
    }
    if !any {
        return Err(Error::Unreachable(d.to_string()));
    }
    let mut dist = vec![usize::MAX; g.len()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        if is_target[i] {
            return Ok(dist[i]);
        }
        for &j in g.neighbors_at(i) {
            if dist[j] == usize::MAX {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
        }
    }
    Err(Error::Unreachable(d.to_string()))
}

/// Vertices whose same-color boundary distance differs from the unrestricted
/// one. Returns `(vertex, same_color, unrestricted)` triples.
pub fn distance_discrepancies(g: &ColoredGraph) -> Vec<(String, Option<usize>, Option<usize>)> {
    let topo = build_topology(g);
    let mut out = Vec::new();
    for v in g.vertices() {
        let color = g.color(v).expect("own vertex");
        let boundary = topo.boundary(color);
        let unrestricted = distance(g, v, boundary.iter().map(String::as_str)).ok();
        let restricted = topo.dist(v);
        if restricted != unrestricted {
            out.push((v.to_string(), restricted, unrestricted));
        }
    }
    out
}

/// Line parameters of the boundary graph: `n = max dist + 1` per color.
pub fn boundary_graph_params(g: &ColoredGraph) -> Result<LineSpec> {
    let topo = build_topology(g);
    boundary_graph_params_from(&topo)
}

pub(crate) fn boundary_graph_params_from(topo: &Topology) -> Result<LineSpec> {
    let side = |color: Color| -> Result<usize> {
        if topo.boundary(color).is_empty() {
            return Err(Error::NoBoundary { color, detail: "color class has no boundary vertex".into() });
        }
        let mut max = 0;
        for v in topo.class(color) {
            match topo.dist(v) {
                Some(d) => max = max.max(d),
                None => {
                    return Err(Error::NoBoundary {
                        color,
                        detail: format!("vertex `{v}` cannot reach the boundary through its own color"),
                    })
                }
            }
        }
        Ok(max + 1)
    };
    Ok(LineSpec { n_blue: side(Color::Blue)?, n_red: side(Color::Red)? })
}

/// Connected components, optionally restricted to the subgraph induced by one
/// color. Components are sorted sets, listed in order of their smallest id.
pub fn connected_components(g: &ColoredGraph, within_color: Option<Color>) -> Vec<BTreeSet<String>> {
    let keep = |i: usize| within_color.is_none_or(|c| g.color_at(i) == c);
    let mut seen = vec![false; g.len()];
    let mut out = Vec::new();
    for s in 0..g.len() {
        if seen[s] || !keep(s) {
            continue;
        }
        seen[s] = true;
        let mut comp = BTreeSet::new();
        let mut stack = vec![s];
        while let Some(i) = stack.pop() {
            comp.insert(g.id(i).to_string());
            for &j in g.neighbors_at(i) {
                if !seen[j] && keep(j) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        out.push(comp);
    }
    out
}
