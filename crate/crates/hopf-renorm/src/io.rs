//! JSON file formats.

use std::collections::BTreeMap;
use std::path::Path;

use hopf_renorm_core::feynman::FeynmanEvaluation;
use hopf_renorm_core::graphs::{canonical_form, symmetry_factor, Vertex};
use hopf_renorm_core::spectral::{Manifold, SpectralBackend};
use hopf_renorm_core::{Character, Complex64, FeynmanGraph, GraphLabel, LaurentSeries, VertexKind};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Internal,
    External,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexJson {
    pub id: u32,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ext_index: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[u32; 2]>,
}

impl GraphJson {
    pub fn from_graph(g: &FeynmanGraph) -> Self {
        let vertices = g
            .vertices()
            .iter()
            .map(|v| match v.kind {
                VertexKind::Internal => VertexJson { id: v.id, kind: Kind::Internal, ext_index: None },
                VertexKind::External(k) => VertexJson { id: v.id, kind: Kind::External, ext_index: Some(k) },
            })
            .collect();
        let vs = g.vertices();
        let edges = g.edges().iter().map(|&(a, b)| [vs[a].id, vs[b].id]).collect();
        GraphJson { vertices, edges }
    }

    /// `None` for the empty graph, which stands for the unit of the algebra.
    pub fn to_graph(&self) -> Result<Option<FeynmanGraph>, CliError> {
        if self.vertices.is_empty() && self.edges.is_empty() {
            return Ok(None);
        }
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            let kind = match (v.kind, v.ext_index) {
                (Kind::Internal, None) => VertexKind::Internal,
                (Kind::External, Some(k)) => VertexKind::External(k),
                (Kind::Internal, Some(_)) => return Err(CliError::input(format!("internal vertex {} has an ext_index", v.id))),
                (Kind::External, None) => return Err(CliError::input(format!("external vertex {} lacks an ext_index", v.id))),
            };
            vertices.push(Vertex { id: v.id, kind });
        }
        let edges: Vec<(u32, u32)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        Ok(Some(FeynmanGraph::new(vertices, &edges)?))
    }
}

/// Entry of the `graphs` listing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphEntry {
    pub label: String,
    pub loops: u32,
    pub legs: u32,
    /// `1/|Aut|` with externals fixed, as `"p/q"`.
    pub symmetry_factor: String,
    pub automorphisms: u64,
    pub graph: GraphJson,
}

impl GraphEntry {
    pub fn of(g: &FeynmanGraph) -> Self {
        let label = GraphLabel::of(g);
        GraphEntry {
            label: label.to_string(),
            loops: label.loops(),
            legs: label.legs(),
            symmetry_factor: symmetry_factor(g).to_string(),
            automorphisms: canonical_form(g).automorphisms,
            graph: GraphJson::from_graph(g),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaurentJson {
    pub lowest: i32,
    pub coeffs: Vec<[f64; 2]>,
    /// Highest known power; absent for terminating series.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<i32>,
}

impl LaurentJson {
    pub fn from_series(s: &LaurentSeries) -> Self {
        LaurentJson {
            lowest: s.lowest(),
            coeffs: s.coeffs().iter().map(|c| [c.re, c.im]).collect(),
            order: s.order(),
        }
    }

    pub fn to_series(&self) -> LaurentSeries {
        let coeffs = self.coeffs.iter().map(|c| Complex64::new(c[0], c[1])).collect();
        LaurentSeries::with_order(self.lowest, coeffs, self.order)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Torus,
    Circle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendJson {
    pub kind: BackendKind,
    pub dim: usize,
    /// Side lengths; the circumference for a circle.
    pub periods: Vec<f64>,
    pub mass: f64,
    pub cutoff: u32,
}

impl Default for BackendJson {
    fn default() -> Self {
        BackendJson { kind: BackendKind::Torus, dim: 6, periods: vec![1.0; 6], mass: 1.0, cutoff: 6 }
    }
}

impl BackendJson {
    pub fn from_backend(b: &SpectralBackend) -> Self {
        let kind = match b.manifold() {
            Manifold::Circle { .. } => BackendKind::Circle,
            Manifold::Torus { .. } => BackendKind::Torus,
        };
        BackendJson { kind, dim: b.dim(), periods: b.periods(), mass: b.mass(), cutoff: b.cutoff() }
    }

    pub fn to_backend(&self) -> Result<SpectralBackend, CliError> {
        if self.periods.len() != self.dim {
            return Err(CliError::input(format!("{} periods given for dimension {}", self.periods.len(), self.dim)));
        }
        let b = match self.kind {
            BackendKind::Torus => SpectralBackend::torus(self.periods.clone(), self.mass, self.cutoff)?,
            BackendKind::Circle => {
                if self.dim != 1 {
                    return Err(CliError::input("a circle has dimension 1"));
                }
                SpectralBackend::circle(self.periods[0] / (2.0 * std::f64::consts::PI), self.mass, self.cutoff)?
            }
        };
        Ok(b)
    }
}

/// A character as a map from generator label to value.
pub type CharacterJson = BTreeMap<String, LaurentJson>;

pub fn character_to_json(c: &Character) -> CharacterJson {
    c.values().map(|(l, v)| (l.to_string(), LaurentJson::from_series(v))).collect()
}

pub fn character_from_json(c: &CharacterJson, order: i32) -> Result<Character, CliError> {
    let mut out = Character::new(order);
    for (label, v) in c {
        out.insert(GraphLabel::parse(label)?, v.to_series())?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationJson {
    pub label: String,
    pub backend: BackendJson,
    pub series: LaurentJson,
    pub lattice_sum: LaurentJson,
    pub prefactor: f64,
    pub cutoffs: [u32; 2],
    pub tolerance: f64,
}

impl EvaluationJson {
    pub fn of(e: &FeynmanEvaluation) -> Self {
        EvaluationJson {
            label: e.label.to_string(),
            backend: BackendJson::from_backend(&e.backend),
            series: LaurentJson::from_series(&e.series),
            lattice_sum: LaurentJson::from_series(&e.lattice_sum),
            prefactor: e.prefactor,
            cutoffs: [e.cutoffs.0, e.cutoffs.1],
            tolerance: e.tolerance,
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}
