use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Internal,
    /// External vertex carrying its leg index (1-based).
    External(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub id: u32,
    pub kind: VertexKind,
}

/// A φ³ Feynman graph: trivalent internal vertices, univalent external
/// vertices, multi-edges and self-loops allowed.
///
/// Edges are stored as pairs of vertex *positions* (indices into
/// [`FeynmanGraph::vertices`]), normalized so that `a <= b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeynmanGraph {
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

impl FeynmanGraph {
    /// Build a graph from vertices and edges given by vertex id.
    pub fn new(vertices: Vec<Vertex>, edges: &[(u32, u32)]) -> Result<Self> {
        let pos = |id: u32| {
            vertices
                .iter()
                .position(|v| v.id == id)
                .ok_or_else(|| Error::InvalidGraph(format!("edge refers to unknown vertex {id}")))
        };
        let mut idx = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            idx.push((pos(a)?, pos(b)?));
        }
        Self::from_positions(vertices, idx)
    }

    /// Build a graph from vertices and edges given by vertex position.
    pub fn from_positions(vertices: Vec<Vertex>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let edges = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        let g = FeynmanGraph { vertices, edges };
        g.validate()?;
        Ok(g)
    }

    /// Graph whose vertex ids are their positions; externals are numbered
    /// in the order they appear.
    pub fn from_kinds(internal: usize, external: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut vertices: Vec<Vertex> = (0..internal)
            .map(|i| Vertex { id: i as u32, kind: VertexKind::Internal })
            .collect();
        vertices.extend((0..external).map(|j| Vertex {
            id: (internal + j) as u32,
            kind: VertexKind::External(j as u32 + 1),
        }));
        Self::from_positions(vertices, edges)
    }

    fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        for (i, v) in self.vertices.iter().enumerate() {
            if self.vertices[..i].iter().any(|w| w.id == v.id) {
                return Err(Error::InvalidGraph(format!("duplicate vertex id {}", v.id)));
            }
        }
        if self.edges.iter().any(|&(a, b)| a >= n || b >= n) {
            return Err(Error::InvalidGraph("edge endpoint out of range".into()));
        }
        let val = self.valences();
        for (v, &d) in self.vertices.iter().zip(&val) {
            let want = match v.kind {
                VertexKind::Internal => 3,
                VertexKind::External(_) => 1,
            };
            if d != want {
                return Err(Error::InvalidGraph(format!(
                    "vertex {} has valence {d}, expected {want}",
                    v.id
                )));
            }
        }
        let mut ext: Vec<u32> = self
            .vertices
            .iter()
            .filter_map(|v| match v.kind {
                VertexKind::External(k) => Some(k),
                VertexKind::Internal => None,
            })
            .collect();
        ext.sort_unstable();
        if ext.iter().enumerate().any(|(i, &k)| k != i as u32 + 1) {
            return Err(Error::InvalidGraph(format!("external indices {ext:?} are not 1..E")));
        }
        if n > 0 && !self.connected_without(None) {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_internal(&self, v: usize) -> bool {
        self.vertices[v].kind == VertexKind::Internal
    }

    /// Valence of every vertex; a self-loop counts twice.
    pub fn valences(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn internal_vertex_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.kind == VertexKind::Internal).count()
    }

    pub fn external_count(&self) -> usize {
        self.vertices.len() - self.internal_vertex_count()
    }

    /// Indices of edges joining two internal vertices.
    pub fn internal_edges(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.is_internal(self.edges[e].0) && self.is_internal(self.edges[e].1))
            .collect()
    }

    pub fn internal_edge_count(&self) -> usize {
        self.internal_edges().len()
    }

    /// Position of the external vertex with leg index `k`.
    pub fn external_position(&self, k: u32) -> Option<usize> {
        self.vertices.iter().position(|v| v.kind == VertexKind::External(k))
    }

    /// The internal vertex an external leg attaches to, by leg index.
    pub fn leg_attachment(&self, k: u32) -> Option<usize> {
        let p = self.external_position(k)?;
        self.edges.iter().find_map(|&(a, b)| {
            if a == p {
                Some(b)
            } else if b == p {
                Some(a)
            } else {
                None
            }
        })
    }

    pub(crate) fn connected_without(&self, skip: Option<usize>) -> bool {
        let n = self.vertices.len();
        let mut uf = UnionFind::new(n);
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if Some(i) != skip {
                uf.union(a, b);
            }
        }
        let r = uf.find(0);
        (1..n).all(|v| uf.find(v) == r)
    }

    /// Connected, and stays connected after removing any single internal
    /// edge. Graphs without internal edges are not 1PI.
    pub fn is_one_particle_irreducible(&self) -> bool {
        let internal = self.internal_edges();
        !internal.is_empty() && internal.iter().all(|&e| self.connected_without(Some(e)))
    }

    /// First Betti number of the internal part.
    pub fn loop_number(&self) -> u32 {
        let v = self.internal_vertex_count();
        if v == 0 {
            return 0;
        }
        let internal = self.internal_edges();
        let mut uf = UnionFind::new(self.vertices.len());
        for &e in &internal {
            uf.union(self.edges[e].0, self.edges[e].1);
        }
        let mut roots: Vec<usize> = (0..self.vertices.len())
            .filter(|&x| self.is_internal(x))
            .map(|x| uf.find(x))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        (internal.len() + roots.len() - v) as u32
    }

    /// Superficial degree of divergence `dim·L − 2I`.
    pub fn superficial_degree(&self, dim: u32) -> Result<i64> {
        if !self.is_one_particle_irreducible() {
            return Err(Error::Domain("superficial degree needs a 1PI graph".into()));
        }
        Ok(dim as i64 * self.loop_number() as i64 - 2 * self.internal_edge_count() as i64)
    }

    pub fn has_self_loop(&self) -> bool {
        self.edges.iter().any(|&(a, b)| a == b)
    }

    /// Copy with vertex positions permuted: old position `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut vertices = self.vertices.clone();
        for (i, &p) in perm.iter().enumerate() {
            vertices[p] = self.vertices[i];
        }
        let edges = self
            .edges
            .iter()
            .map(|&(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b])))
            .collect();
        FeynmanGraph { vertices, edges }
    }

    /// Copy with every vertex id replaced by `f(id)`.
    pub fn relabeled(&self, f: impl Fn(u32) -> u32) -> Self {
        let vertices = self.vertices.iter().map(|v| Vertex { id: f(v.id), kind: v.kind }).collect();
        FeynmanGraph { vertices, edges: self.edges.clone() }
    }
}

/// Fixture graphs used throughout the tests and the CLI.
pub mod fixtures {
    use super::*;

    fn ints_exts(internal: u32, exts: u32) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = (1..=internal).map(|i| Vertex { id: i, kind: VertexKind::Internal }).collect();
        v.extend((1..=exts).map(|k| Vertex { id: 100 + k, kind: VertexKind::External(k) }));
        v
    }

    /// One-loop self-energy: two vertices joined by a double edge.
    pub fn bubble() -> FeynmanGraph {
        FeynmanGraph::new(ints_exts(2, 2), &[(1, 2), (1, 2), (101, 1), (102, 2)]).unwrap()
    }

    /// One-loop vertex graph.
    pub fn triangle() -> FeynmanGraph {
        FeynmanGraph::new(
            ints_exts(3, 3),
            &[(1, 2), (2, 3), (3, 1), (101, 1), (102, 2), (103, 3)],
        )
        .unwrap()
    }

    /// Two-loop self-energy with a bubble inserted on one line.
    pub fn gamma2() -> FeynmanGraph {
        FeynmanGraph::new(
            ints_exts(4, 2),
            &[(1, 2), (1, 3), (3, 4), (3, 4), (4, 2), (101, 1), (102, 2)],
        )
        .unwrap()
    }

    /// One-loop box; convergent in six dimensions.
    pub fn square() -> FeynmanGraph {
        FeynmanGraph::new(
            ints_exts(4, 4),
            &[(1, 2), (2, 3), (3, 4), (4, 1), (101, 1), (102, 2), (103, 3), (104, 4)],
        )
        .unwrap()
    }

    /// Single vertex with three external legs.
    pub fn vertex() -> FeynmanGraph {
        FeynmanGraph::new(ints_exts(1, 3), &[(101, 1), (102, 1), (103, 1)]).unwrap()
    }

    /// Two external vertices joined by one edge.
    pub fn propagator() -> FeynmanGraph {
        FeynmanGraph::new(ints_exts(0, 2), &[(101, 102)]).unwrap()
    }

    /// Two tadpoles joined by a bridge; the legs sit on the bridge.
    pub fn dumbbell() -> FeynmanGraph {
        FeynmanGraph::new(
            ints_exts(4, 2),
            &[(1, 1), (1, 3), (2, 2), (2, 4), (3, 4), (101, 3), (102, 4)],
        )
        .unwrap()
    }

    /// Three-loop self-energy: an outer loop with a bubble on each line.
    pub fn double_insertion() -> FeynmanGraph {
        FeynmanGraph::new(
            ints_exts(6, 2),
            &[
                (1, 3),
                (3, 4),
                (3, 4),
                (4, 2),
                (1, 5),
                (5, 6),
                (5, 6),
                (6, 2),
                (101, 1),
                (102, 2),
            ],
        )
        .unwrap()
    }
}
