//! φ³ Feynman graphs: validation, 1PI test, loop number, admissible
//! subgraphs, contraction, canonical labels and enumeration.

mod canon;
mod enumerate;
mod graph;
mod subgraph;

pub use canon::{canonical_form, symmetry_factor, CanonicalForm, GraphLabel};
pub use enumerate::{enumerate_1pi_graphs, enumerate_exact, EnumerationOptions, MAX_LEGS, MAX_LOOPS};
pub use graph::{fixtures, FeynmanGraph, Vertex, VertexKind};
pub use subgraph::{contract, enumerate_admissible_subgraphs, is_admissible, Component, SubgraphEmbedding};
