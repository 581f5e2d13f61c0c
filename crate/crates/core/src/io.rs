//! File formats: graph, mechanism, boundary condition, morphism and
//! distribution documents, canonical JSON output, DOT and CSV export.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::{build_topology, Color, ColoredGraph};
use crate::mechanism::Mechanism;
use crate::optimizer::BoundaryCondition;

/// Decimals used for every float in canonical output.
pub const CANONICAL_DECIMALS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: String,
    pub color: Color,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<[String; 2]>,
}

impl From<&ColoredGraph> for GraphDoc {
    fn from(g: &ColoredGraph) -> Self {
        GraphDoc {
            vertices: (0..g.len()).map(|i| VertexDoc { id: g.id(i).to_string(), color: g.color_at(i) }).collect(),
            edges: g.edges().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
        }
    }
}

impl TryFrom<GraphDoc> for ColoredGraph {
    type Error = Error;

    fn try_from(doc: GraphDoc) -> Result<Self> {
        ColoredGraph::new(doc.vertices.into_iter().map(|v| (v.id, v.color)), doc.edges.into_iter().map(|[a, b]| (a, b)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub map: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionDoc {
    pub weights: BTreeMap<String, f64>,
}

fn parse<T: DeserializeOwned>(what: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn parse_graph(text: &str) -> Result<ColoredGraph> {
    parse::<GraphDoc>("graph", text)?.try_into()
}

pub fn parse_mechanism(text: &str) -> Result<Mechanism> {
    let m: Mechanism = parse("mechanism", text)?;
    Mechanism::new(m.prob_blue)
}

pub fn parse_boundary_condition(text: &str) -> Result<BoundaryCondition> {
    parse("boundary condition", text)
}

pub fn parse_morphism(text: &str) -> Result<MorphismDoc> {
    parse("morphism", text)
}

pub fn parse_distribution(text: &str) -> Result<DistributionDoc> {
    parse("distribution", text)
}

/// Sorted keys, two-space indent and every float printed with
/// [`CANONICAL_DECIMALS`] decimals.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

/// Shortest round-trip representation; re-parsing gives bit-identical values.
pub fn to_exact_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn graph_to_json(g: &ColoredGraph) -> Result<String> {
    to_canonical_json(&GraphDoc::from(g))
}

pub fn format_float(x: f64) -> String {
    let s = format!("{:.*}", CANONICAL_DECIMALS, x);
    // -0.000000000000 and friends.
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().expect("f64 number")));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, item, indent + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            // serde_json's default map is ordered by key.
            for (k, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz document with nodes colored by their true color and, when a
/// mechanism is given, labeled with its probability of answering blue.
pub fn to_dot(g: &ColoredGraph, m: Option<&Mechanism>) -> Result<String> {
    let mut out = String::from("graph G {\n");
    for i in 0..g.len() {
        let id = dot_escape(g.id(i));
        let label = match m {
            Some(m) => format!("{id}\\nB={}", format_float(m.prob_blue(g.id(i))?)),
            None => id.clone(),
        };
        writeln!(out, "  \"{id}\" [color={}, label=\"{label}\"];", g.color_at(i)).expect("write to string");
    }
    for (a, b) in g.edges() {
        writeln!(out, "  \"{}\" -- \"{}\";", dot_escape(a), dot_escape(b)).expect("write to string");
    }
    out.push_str("}\n");
    Ok(out)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per vertex: id, color, distance to its own boundary (empty when
/// unreachable), probability of blue, probability of red.
pub fn to_csv(g: &ColoredGraph, m: &Mechanism) -> Result<String> {
    let topo = build_topology(g);
    let mut out = String::from("vertex,color,dist,B,R\n");
    for v in g.vertices() {
        let b = m.prob_blue(v)?;
        let dist = topo.dist(v).map(|d| d.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{},{}", csv_field(v), g.color(v)?, dist, format_float(b), format_float(1.0 - b))
            .expect("write to string");
    }
    Ok(out)
}
