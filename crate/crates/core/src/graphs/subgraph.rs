use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::graph::{FeynmanGraph, UnionFind, Vertex, VertexKind};
use crate::error::{Error, Result};

/// Largest number of internal edges for which subsets are enumerated.
const MAX_SUBSET_EDGES: usize = 20;

/// One connected piece of a subgraph: the parent vertices and internal
/// edges it occupies.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Component {
    /// Parent vertex positions, sorted.
    pub vertices: Vec<usize>,
    /// Parent edge indices, sorted.
    pub edges: Vec<usize>,
}

impl Component {
    /// External legs of the component: `3|V| − 2|edges|`.
    pub fn legs(&self) -> usize {
        3 * self.vertices.len() - 2 * self.edges.len()
    }

    /// The component as a standalone graph, with one new external vertex
    /// per leg, numbered in order of the parent vertices.
    pub fn as_graph(&self, parent: &FeynmanGraph) -> FeynmanGraph {
        let local = |v: usize| self.vertices.binary_search(&v).unwrap();
        let n = self.vertices.len();
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&e| {
                let (a, b) = parent.edges()[e];
                (local(a), local(b))
            })
            .collect();
        let mut deg = vec![0usize; n];
        for &(a, b) in &edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        let mut ext = 0;
        for (v, d) in deg.iter().enumerate() {
            for _ in *d..3 {
                edges.push((v, n + ext));
                ext += 1;
            }
        }
        FeynmanGraph::from_kinds(n, ext, edges).expect("component of a valid graph")
    }
}

/// A proper admissible subgraph: disjoint union of divergent 1PI pieces.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubgraphEmbedding {
    pub components: Vec<Component>,
}

impl SubgraphEmbedding {
    pub fn loop_number(&self, parent: &FeynmanGraph) -> u32 {
        self.components.iter().map(|c| c.as_graph(parent).loop_number()).sum()
    }

    /// Component graphs, in component order.
    pub fn component_graphs(&self, parent: &FeynmanGraph) -> Vec<FeynmanGraph> {
        self.components.iter().map(|c| c.as_graph(parent)).collect()
    }
}

fn divergent_component(parent: &FeynmanGraph, c: &Component) -> bool {
    matches!(c.legs(), 2 | 3) && c.as_graph(parent).is_one_particle_irreducible()
}

fn components_of(parent: &FeynmanGraph, edges: &[usize]) -> Vec<Component> {
    let n = parent.vertices().len();
    let mut uf = UnionFind::new(n);
    let mut touched = vec![false; n];
    for &e in edges {
        let (a, b) = parent.edges()[e];
        uf.union(a, b);
        touched[a] = true;
        touched[b] = true;
    }
    let mut comps: Vec<Component> = Vec::new();
    let mut root_of: Vec<(usize, usize)> = Vec::new();
    for v in (0..n).filter(|&v| touched[v]) {
        let r = uf.find(v);
        match root_of.iter().find(|&&(root, _)| root == r) {
            Some(&(_, i)) => comps[i].vertices.push(v),
            None => {
                root_of.push((r, comps.len()));
                comps.push(Component { vertices: vec![v], edges: Vec::new() });
            }
        }
    }
    for &e in edges {
        let r = uf.find(parent.edges()[e].0);
        let i = root_of.iter().find(|&&(root, _)| root == r).unwrap().1;
        comps[i].edges.push(e);
    }
    comps.sort();
    comps
}

/// All proper, nonempty admissible subgraphs of a 1PI graph.
///
/// Subgraphs are determined by their internal edge sets; every connected
/// component must be 1PI with two or three external legs.
pub fn enumerate_admissible_subgraphs(g: &FeynmanGraph) -> Result<Vec<SubgraphEmbedding>> {
    if !g.is_one_particle_irreducible() {
        return Err(Error::Domain("admissible subgraphs need a 1PI host".into()));
    }
    let internal = g.internal_edges();
    if internal.len() > MAX_SUBSET_EDGES {
        return Err(Error::Resource(format!(
            "{} internal edges exceed the subgraph enumeration bound {MAX_SUBSET_EDGES}",
            internal.len()
        )));
    }
    let full = (1u64 << internal.len()) - 1;
    let mut out = Vec::new();
    for mask in 1..full {
        let edges: Vec<usize> = (0..internal.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| internal[i])
            .collect();
        let comps = components_of(g, &edges);
        if comps.iter().all(|c| divergent_component(g, c)) {
            out.push(SubgraphEmbedding { components: comps });
        }
    }
    out.sort();
    Ok(out)
}

/// Whether `s` is a proper admissible subgraph of `g`.
pub fn is_admissible(g: &FeynmanGraph, s: &SubgraphEmbedding) -> bool {
    let internal = g.internal_edges();
    let mut all: Vec<usize> = s.components.iter().flat_map(|c| c.edges.iter().copied()).collect();
    all.sort_unstable();
    let n = all.len();
    all.dedup();
    if n == 0 || all.len() != n || all.len() == internal.len() {
        return false;
    }
    if !all.iter().all(|e| internal.contains(e)) {
        return false;
    }
    let mut comps = components_of(g, &all);
    let mut given = s.components.clone();
    comps.sort();
    given.sort();
    comps == given && comps.iter().all(|c| divergent_component(g, c))
}

/// Contract each component of `s` to a vertex.
///
/// A three-leg component becomes a trivalent vertex. A two-leg component
/// would leave a bivalent vertex; it is smoothed into a single edge, so the
/// result is again a φ³ graph.
pub fn contract(g: &FeynmanGraph, s: &SubgraphEmbedding) -> Result<FeynmanGraph> {
    if !g.is_one_particle_irreducible() || !is_admissible(g, s) {
        return Err(Error::Domain("contraction needs a proper admissible subgraph".into()));
    }
    let n = g.vertices().len();
    // map parent position -> new position; collapsed vertices get fresh slots
    let mut target = vec![usize::MAX; n];
    let mut removed = vec![false; g.edges().len()];
    for (ci, c) in s.components.iter().enumerate() {
        for &v in &c.vertices {
            target[v] = n + ci;
        }
        for &e in &c.edges {
            removed[e] = true;
        }
    }
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut new_pos = vec![usize::MAX; n + s.components.len()];
    for v in 0..n {
        if target[v] == usize::MAX {
            new_pos[v] = vertices.len();
            vertices.push(Vertex { id: vertices.len() as u32, kind: g.vertices()[v].kind });
        }
    }
    for ci in 0..s.components.len() {
        new_pos[n + ci] = vertices.len();
        vertices.push(Vertex { id: vertices.len() as u32, kind: VertexKind::Internal });
    }
    let at = |v: usize| new_pos[if target[v] == usize::MAX { v } else { target[v] }];
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(e, _)| !removed[e])
        .map(|(_, &(a, b))| (at(a), at(b)))
        .collect();
    // smooth the bivalent collapsed vertices
    let mut dead: Vec<usize> = Vec::new();
    for (ci, c) in s.components.iter().enumerate() {
        if c.legs() != 2 {
            continue;
        }
        let v = new_pos[n + ci];
        let incident: Vec<usize> = (0..edges.len()).filter(|&i| edges[i].0 == v || edges[i].1 == v).collect();
        if incident.len() != 2 {
            return Err(Error::Internal("bivalent vertex with a self-loop".into()));
        }
        let other = |i: usize| if edges[i].0 == v { edges[i].1 } else { edges[i].0 };
        let (x, y) = (other(incident[0]), other(incident[1]));
        edges[incident[0]] = (x, y);
        edges.remove(incident[1]);
        dead.push(v);
    }
    dead.sort_unstable();
    let shift = |p: usize| p - dead.iter().filter(|&&d| d < p).count();
    let vertices: Vec<Vertex> = vertices
        .into_iter()
        .enumerate()
        .filter(|(i, _)| dead.binary_search(i).is_err())
        .map(|(i, v)| Vertex { id: shift(i) as u32, kind: v.kind })
        .collect();
    let edges = edges.into_iter().map(|(a, b)| (shift(a), shift(b))).collect();
    FeynmanGraph::from_positions(vertices, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::canon::GraphLabel;
    use crate::graphs::fixtures::*;

    #[test]
    fn bubble_has_no_subgraphs() {
        assert!(enumerate_admissible_subgraphs(&bubble()).unwrap().is_empty());
        assert!(enumerate_admissible_subgraphs(&triangle()).unwrap().is_empty());
    }

    #[test]
    fn gamma2_has_inner_bubble() {
        let g = gamma2();
        let subs = enumerate_admissible_subgraphs(&g).unwrap();
        assert_eq!(subs.len(), 1);
        let s = &subs[0];
        assert_eq!(s.components.len(), 1);
        assert_eq!(s.components[0].legs(), 2);
        assert_eq!(GraphLabel::of(&s.components[0].as_graph(&g)), GraphLabel::of(&bubble()));
        let q = contract(&g, s).unwrap();
        assert_eq!(GraphLabel::of(&q), GraphLabel::of(&bubble()));
    }

    #[test]
    fn disjoint_union_is_enumerated() {
        let g = double_insertion();
        let subs = enumerate_admissible_subgraphs(&g).unwrap();
        assert!(subs.iter().any(|s| s.components.len() == 2));
        for s in &subs {
            let q = contract(&g, s).unwrap();
            assert_eq!(q.loop_number(), g.loop_number() - s.loop_number(&g));
            for c in &s.components {
                assert!(matches!(c.legs(), 2 | 3));
            }
        }
    }

    #[test]
    fn three_leg_contraction_gives_vertex() {
        // two-loop self-energy with a vertex correction
        let g = FeynmanGraph::from_kinds(
            4,
            2,
            alloc::vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (0, 4), (3, 5)],
        )
        .unwrap();
        assert_eq!(g.loop_number(), 2);
        let subs = enumerate_admissible_subgraphs(&g).unwrap();
        let tri: Vec<_> = subs.iter().filter(|s| s.components[0].legs() == 3).collect();
        assert!(!tri.is_empty());
        for s in tri {
            let q = contract(&g, s).unwrap();
            assert_eq!(GraphLabel::of(&q), GraphLabel::of(&bubble()));
        }
    }

    #[test]
    fn contract_rejects_full_graph() {
        let g = bubble();
        let all = g.internal_edges();
        let s = SubgraphEmbedding {
            components: alloc::vec![Component { vertices: alloc::vec![0, 1], edges: all }],
        };
        assert!(contract(&g, &s).is_err());
    }
}
