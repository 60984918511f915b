//! Finite bidirected graphs and their directed-path bases.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

/// A directed path as its vertex sequence `v₀ → v₁ → … → vₙ`. Degree-0 paths
/// are single vertices.
pub type Path = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("loop edge {0}→{0}")]
    LoopEdge(String),
    #[error("duplicate edge {0}→{1}")]
    DuplicateEdge(String, String),
    #[error("edge {0}→{1} has no reverse {1}→{0}")]
    MissingReverse(String, String),
    #[error("edge {0}→{1} uses an unknown vertex")]
    UnknownVertex(String, String),
    #[error("vertex `{0}` listed twice")]
    DuplicateVertex(String),
    #[error("graph has no vertices")]
    Empty,
}

/// Graph input file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphInput {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
}

/// A validated graph: no loops, no multiple edges, every edge paired with its
/// reverse. Vertices keep their input order; edges are sorted by vertex index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BidiGraph {
    labels: Vec<String>,
    label_index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    out: Vec<Vec<usize>>,
}

impl BidiGraph {
    pub fn validate_bidirected(vertices: Vec<String>, raw_edges: Vec<(String, String)>) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut label_index = HashMap::new();
        for (k, v) in vertices.iter().enumerate() {
            if label_index.insert(v.clone(), k).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut set = BTreeSet::new();
        for (x, y) in &raw_edges {
            let (Some(&a), Some(&b)) = (label_index.get(x), label_index.get(y)) else {
                return Err(GraphError::UnknownVertex(x.clone(), y.clone()));
            };
            if a == b {
                return Err(GraphError::LoopEdge(x.clone()));
            }
            if !set.insert((a, b)) {
                return Err(GraphError::DuplicateEdge(x.clone(), y.clone()));
            }
        }
        for (x, y) in &raw_edges {
            if !set.contains(&(label_index[y], label_index[x])) {
                return Err(GraphError::MissingReverse(x.clone(), y.clone()));
            }
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let edge_index = edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();
        let mut out = vec![Vec::new(); vertices.len()];
        for &(a, b) in &edges {
            out[a].push(b);
        }
        Ok(BidiGraph { labels: vertices, label_index, edges, edge_index, out })
    }

    pub fn from_input(input: GraphInput) -> Result<Self, GraphError> {
        Self::validate_bidirected(input.vertices, input.edges)
    }

    pub fn to_input(&self) -> GraphInput {
        GraphInput {
            vertices: self.labels.clone(),
            edges: self.edges.iter().map(|&(a, b)| (self.labels[a].clone(), self.labels[b].clone())).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn vertex(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    /// Directed edges in canonical order (the degree-1 path basis).
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_index(&self, x: usize, y: usize) -> Option<usize> {
        self.edge_index.get(&(x, y)).copied()
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.edge_index.contains_key(&(x, y))
    }

    /// Out-neighbours of `x` in increasing index order.
    pub fn successors(&self, x: usize) -> &[usize] {
        &self.out[x]
    }

    /// All `n`-step paths in lexicographic order of vertex indices. For
    /// `n = 0` this is the vertex list.
    pub fn enumerate_paths(&self, n: usize) -> Vec<Path> {
        let mut paths: Vec<Path> = (0..self.vertex_count()).map(|v| vec![v]).collect();
        for _ in 0..n {
            let mut next = Vec::new();
            for p in &paths {
                let last = *p.last().expect("nonempty path");
                for &w in &self.out[last] {
                    let mut q = p.clone();
                    q.push(w);
                    next.push(q);
                }
            }
            paths = next;
        }
        paths
    }

    pub fn render_path(&self, p: &[usize]) -> String {
        p.iter().map(|&v| self.labels[v].as_str()).collect::<Vec<_>>().join("→")
    }

    /// Weak connectivity of the subgraph on all vertices spanned by `edges`.
    pub fn weakly_connected(&self, edges: &[(usize, usize)]) -> bool {
        let n = self.vertex_count();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// The ordered basis of `n`-step paths with an index lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSpace {
    degree: usize,
    paths: Vec<Path>,
    index: HashMap<Path, usize>,
}

impl PathSpace {
    pub fn new(graph: &BidiGraph, degree: usize) -> Self {
        let paths = graph.enumerate_paths(degree);
        let index = paths.iter().enumerate().map(|(k, p)| (p.clone(), k)).collect();
        PathSpace { degree, paths, index }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.paths.len()
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn path(&self, k: usize) -> &Path {
        &self.paths[k]
    }

    pub fn index_of(&self, p: &[usize]) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn source(&self, k: usize) -> usize {
        self.paths[k][0]
    }

    pub fn target(&self, k: usize) -> usize {
        *self.paths[k].last().expect("nonempty path")
    }
}

impl fmt::Display for BidiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BidiGraph({} vertices, {} edges)", self.vertex_count(), self.edges.len())
    }
}
