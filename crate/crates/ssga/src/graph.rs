//! Finite directed graphs, path spaces and the canonical level basis.
//!
//! Conventions (they are the main trap in this subject):
//!
//! - An edge is written `source -> range` in all I/O.
//! - A path `e1 e2 ... ek` reads left to right from its range toward its
//!   source: `r(e_{i+1}) = s(e_i)`, `r(path) = r(e1)`, `s(path) = s(ek)`.
//! - `vE^n` is the set of length-`n` paths with *range* `v`; the forest of
//!   paths hangs one tree below each vertex, children of `α` being the
//!   extensions `αe` with `r(e) = s(α)`.
//! - The canonical order of `E^n` is prefix-major: `E^0` in vertex
//!   declaration order, and `E^{n+1}` lists the extensions of each `α ∈ E^n`
//!   contiguously, last edge in declaration order. Level matrices then carry
//!   the contiguous block structure the trace monotonicity argument uses.

use crate::error::{Error, Result};
use crate::scalar::Rational;
use num::bigint::BigInt;
use num::One;
use std::collections::HashMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

/// A finite directed graph with ordered vertices and edges.
///
/// Every vertex must have a nonempty range fiber `vE^1 = {e : r(e) = v}`
/// ("no sources"), so that every vertex roots an infinite tree of paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    /// (source, range) per edge, in declaration order.
    endpoints: Vec<(VertexId, VertexId)>,
    /// Edges e with r(e) = v, in declaration order, per vertex.
    range_fibers: Vec<Vec<EdgeId>>,
    vertex_index: HashMap<String, VertexId>,
    edge_index: HashMap<String, EdgeId>,
}

impl Graph {
    /// Builds and validates a graph from named vertices and `(edge, source, range)`
    /// triples. All violations are reported at once.
    pub fn build(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Graph> {
        let mut problems = Vec::new();
        let mut vertex_index = HashMap::new();
        let mut vertex_names = Vec::new();
        for name in vertices {
            if vertex_index.contains_key(*name) {
                problems.push(format!("duplicate vertex id `{name}`"));
                continue;
            }
            vertex_index.insert(name.to_string(), VertexId(vertex_names.len()));
            vertex_names.push(name.to_string());
        }

        let mut edge_index = HashMap::new();
        let mut edge_names = Vec::new();
        let mut endpoints = Vec::new();
        for (name, src, rng) in edges {
            if edge_index.contains_key(*name) {
                problems.push(format!("duplicate edge id `{name}`"));
                continue;
            }
            let s = vertex_index.get(*src).copied();
            let r = vertex_index.get(*rng).copied();
            if s.is_none() {
                problems.push(format!("edge `{name}`: undeclared source vertex `{src}`"));
            }
            if r.is_none() {
                problems.push(format!("edge `{name}`: undeclared range vertex `{rng}`"));
            }
            if let (Some(s), Some(r)) = (s, r) {
                edge_index.insert(name.to_string(), EdgeId(edge_names.len()));
                edge_names.push(name.to_string());
                endpoints.push((s, r));
            }
        }

        let mut range_fibers = vec![Vec::new(); vertex_names.len()];
        for (i, (_, r)) in endpoints.iter().enumerate() {
            range_fibers[r.0].push(EdgeId(i));
        }
        for (v, fiber) in range_fibers.iter().enumerate() {
            if fiber.is_empty() {
                problems.push(format!(
                    "vertex `{}` has empty range fiber (graph must have no sources)",
                    vertex_names[v]
                ));
            }
        }

        if !problems.is_empty() {
            return Err(Error::InvalidGraph(problems.join("\n")));
        }
        Ok(Graph {
            vertex_names,
            edge_names,
            endpoints,
            range_fibers,
            vertex_index,
            edge_index,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_names.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_names.len()).map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edge_names.len()).map(EdgeId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edge_names[e.0]
    }

    pub fn vertex_id(&self, name: &str) -> Result<VertexId> {
        self.vertex_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn edge_id(&self, name: &str) -> Result<EdgeId> {
        self.edge_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(name.to_string()))
    }

    pub fn source(&self, e: EdgeId) -> VertexId {
        self.endpoints[e.0].0
    }

    pub fn range(&self, e: EdgeId) -> VertexId {
        self.endpoints[e.0].1
    }

    /// Edges with range `v`, in declaration order.
    pub fn range_fiber(&self, v: VertexId) -> &[EdgeId] {
        &self.range_fibers[v.0]
    }

    /// Per-vertex out-degrees `|vE^1|`, plus the constant value if they agree.
    pub fn degree_profile(&self) -> DegreeProfile {
        let per_vertex: Vec<usize> = self.range_fibers.iter().map(|f| f.len()).collect();
        let constant = match per_vertex.first() {
            Some(&d) if per_vertex.iter().all(|&x| x == d) => Some(d),
            _ => None,
        };
        DegreeProfile {
            per_vertex,
            constant,
        }
    }

    /// The constant out-degree `p >= 2`, or an error describing the profile.
    pub fn constant_degree(&self) -> Result<usize> {
        let profile = self.degree_profile();
        match profile.constant {
            Some(p) if p >= 2 => Ok(p),
            _ => Err(Error::NonConstantDegree {
                profile: profile.describe(self),
            }),
        }
    }

    /// All paths of length `n` in canonical (prefix-major) order.
    pub fn enumerate_level(&self, n: usize) -> LevelBasis {
        let mut paths: Vec<Path> = self.vertices().map(Path::vertex).collect();
        for _ in 0..n {
            let mut next = Vec::new();
            for path in &paths {
                for &e in self.range_fiber(path.source(self)) {
                    next.push(path.extend(e));
                }
            }
            paths = next;
        }
        let index = paths
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        LevelBasis {
            level: n,
            paths,
            index,
        }
    }

    /// ν(Z(α)) = 1 / (|E^0| p^{|α|}), the uniform cylinder measure.
    /// Requires constant out-degree.
    pub fn cylinder_measure(&self, path: &Path) -> Result<Rational> {
        let p = self.constant_degree()?;
        let denom = BigInt::from(self.vertex_count())
            * BigInt::from(p).pow(path.len() as u32);
        Ok(Rational::new(BigInt::one(), denom))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    pub per_vertex: Vec<usize>,
    pub constant: Option<usize>,
}

impl DegreeProfile {
    pub fn describe(&self, graph: &Graph) -> String {
        let mut s = String::new();
        for (v, d) in self.per_vertex.iter().enumerate() {
            if v > 0 {
                s.push_str(", ");
            }
            let _ = write!(s, "{}:{}", graph.vertex_name(VertexId(v)), d);
        }
        s
    }
}

/// A finite path: a composable edge sequence hanging below its range vertex.
/// The empty sequence is the vertex itself.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    range: VertexId,
    edges: Vec<EdgeId>,
}

impl Path {
    pub fn vertex(v: VertexId) -> Path {
        Path {
            range: v,
            edges: Vec::new(),
        }
    }

    /// Builds a path from edges, checking composability.
    pub fn new(graph: &Graph, edges: Vec<EdgeId>) -> Result<Path> {
        if edges.is_empty() {
            return Err(Error::Io("a nonempty path needs at least one edge".into()));
        }
        for i in 1..edges.len() {
            if graph.range(edges[i]) != graph.source(edges[i - 1]) {
                return Err(Error::BrokenPath {
                    position: i,
                    edge: graph.edge_name(edges[i]).to_string(),
                    range: graph.vertex_name(graph.range(edges[i])).to_string(),
                    expected: graph.vertex_name(graph.source(edges[i - 1])).to_string(),
                });
            }
        }
        Ok(Path {
            range: graph.range(edges[0]),
            edges,
        })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn range(&self) -> VertexId {
        self.range
    }

    pub fn source(&self, graph: &Graph) -> VertexId {
        match self.edges.last() {
            Some(&e) => graph.source(e),
            None => self.range,
        }
    }

    /// Assembles a path from pieces already known to compose.
    pub(crate) fn from_parts(range: VertexId, edges: Vec<EdgeId>) -> Path {
        Path { range, edges }
    }

    /// Appends an edge with `r(e) = s(self)`. Panics are avoided by contract;
    /// used internally on fibers that match by construction.
    pub fn extend(&self, e: EdgeId) -> Path {
        let mut edges = self.edges.clone();
        edges.push(e);
        Path {
            range: self.range,
            edges,
        }
    }

    /// The first `n` edges (a prefix closer to the range).
    pub fn prefix(&self, n: usize) -> Path {
        Path {
            range: self.range,
            edges: self.edges[..n].to_vec(),
        }
    }

    pub fn display(&self, graph: &Graph) -> String {
        if self.edges.is_empty() {
            graph.vertex_name(self.range).to_string()
        } else {
            self.edges
                .iter()
                .map(|&e| graph.edge_name(e))
                .collect::<Vec<_>>()
                .join(" ")
        }
    }
}

/// The canonical ordered basis of level `n`: all of `E^n` in prefix-major
/// order, with a reverse index.
#[derive(Debug, Clone)]
pub struct LevelBasis {
    pub level: usize,
    pub paths: Vec<Path>,
    index: HashMap<Path, usize>,
}

impl LevelBasis {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn position(&self, path: &Path) -> Option<usize> {
        self.index.get(path).copied()
    }
}
