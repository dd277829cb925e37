//! Implementations behind the subcommands. Each returns a serializable
//! report; the binary only parses flags and prints.

use std::collections::BTreeMap;

use hopf_renorm_core::conformal::{conformal_expansion_check, yamabe_pairing, ConformalMetric, Density, Grid};
use hopf_renorm_core::feynman::{ExternalData, FeynmanRules};
use hopf_renorm_core::graphs::{enumerate_1pi_graphs, EnumerationOptions, MAX_LEGS, MAX_LOOPS};
use hopf_renorm_core::rg::{self, LiteratureBeta, DEFAULT_LOCALITY_TOLERANCE, DEFAULT_SAMPLES, LITERATURE};
use hopf_renorm_core::{birkhoff, Character, FeynmanGraph, GraphLabel, HopfAlgebra, HopfPolynomial};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::io::{character_to_json, BackendJson, EvaluationJson, GraphEntry, LaurentJson};
use crate::{render, CliError};

pub fn graphs(loops: u32, ext: u32, tadpoles: bool) -> Result<Vec<GraphEntry>, CliError> {
    if loops > MAX_LOOPS || ext > MAX_LEGS {
        return Err(hopf_renorm_core::Error::Resource(format!(
            "enumeration bound is {MAX_LOOPS} loops and {MAX_LEGS} legs, got {loops} and {ext}"
        ))
        .into());
    }
    let gs = enumerate_1pi_graphs(loops, ext, EnumerationOptions { include_tadpoles: tadpoles })?;
    Ok(gs.iter().map(GraphEntry::of).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HopfOp {
    Coproduct,
    Antipode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopfReport {
    pub op: HopfOp,
    /// Canonical label, absent for the empty graph.
    pub label: Option<String>,
    pub result: String,
    /// Short names used in `result`.
    pub aliases: BTreeMap<String, String>,
}

/// Coproduct or antipode of a generator (`None`: the unit).
pub fn hopf(op: HopfOp, graph: Option<&FeynmanGraph>) -> Result<HopfReport, CliError> {
    let Some(g) = graph else {
        let result = match op {
            HopfOp::Coproduct => "1 ⊗ 1",
            HopfOp::Antipode => "1",
        };
        return Ok(HopfReport { op, label: None, result: result.into(), aliases: BTreeMap::new() });
    };
    let h = HopfAlgebra::generated_by(std::slice::from_ref(g))?;
    let label = GraphLabel::of(g);
    let result = match op {
        HopfOp::Coproduct => render::tensor(&h.coproduct_generator(&label)?),
        HopfOp::Antipode => render::polynomial(&h.antipode(&HopfPolynomial::generator(label.clone()))?),
    };
    let aliases = h
        .labels()
        .filter_map(|l| render::alias(l).map(|a| (a.to_string(), l.to_string())))
        .collect();
    Ok(HopfReport { op, label: Some(label.to_string()), result, aliases })
}

/// Where the unrenormalized character comes from.
#[derive(Clone, Debug)]
pub enum Source {
    /// Regularized Feynman rules on a universe of generators.
    Rules { rules: FeynmanRules, universe: HopfAlgebra },
    /// A given character; the universe is generated by its labels.
    Given(Character),
}

impl Source {
    pub fn rules(rules: FeynmanRules, loops: u32, legs: &[u32], tadpoles: bool) -> Result<Self, CliError> {
        let universe = HopfAlgebra::complete(loops, legs, EnumerationOptions { include_tadpoles: tadpoles })?;
        Ok(Source::Rules { rules, universe })
    }

    fn backend(&self) -> Option<BackendJson> {
        match self {
            Source::Rules { rules, .. } => Some(BackendJson::from_backend(&rules.backend)),
            Source::Given(_) => None,
        }
    }

    /// Universe, character and, for the rules, the per-graph evaluations.
    fn resolve(&self) -> Result<(HopfAlgebra, Character, Vec<EvaluationJson>), CliError> {
        match self {
            Source::Given(c) => {
                let graphs: Vec<FeynmanGraph> = c.labels().map(GraphLabel::graph).collect();
                let h = HopfAlgebra::from_universe(&graphs)?;
                Ok((h, c.clone(), Vec::new()))
            }
            Source::Rules { rules, universe } => {
                let labels: Vec<&GraphLabel> = universe.labels().collect();
                let evals = labels
                    .par_iter()
                    .map(|&l| {
                        let g = universe.graph(l)?;
                        rules
                            .laurent_expansion(g, &ExternalData::zero_momentum(g.external_count()))
                            .map_err(|e| CliError::from(e).labelled(l.as_str()))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                let mut c = Character::new(rules.order);
                for e in &evals {
                    c.insert(e.label.clone(), e.series.clone())?;
                }
                Ok((universe.clone(), c, evals.iter().map(EvaluationJson::of).collect()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BphzEntry {
    pub label: String,
    pub alias: Option<String>,
    pub loops: u32,
    pub gamma: LaurentJson,
    pub counterterm: LaurentJson,
    pub renormalized: LaurentJson,
    /// `γ₊(x_Γ)` at `z = 0`.
    pub value: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BphzReport {
    pub backend: Option<BackendJson>,
    pub order: i32,
    pub graphs: Vec<BphzEntry>,
    pub evaluations: Vec<EvaluationJson>,
}

pub fn bphz(source: &Source) -> Result<BphzReport, CliError> {
    let (h, gamma, evaluations) = source.resolve()?;
    let bk = birkhoff(&gamma, &h)?;
    let mut graphs = Vec::new();
    for l in h.labels() {
        let v = bk.renormalized_value(l)?;
        graphs.push(BphzEntry {
            label: l.to_string(),
            alias: render::alias(l).map(String::from),
            loops: l.loops(),
            gamma: LaurentJson::from_series(gamma.get(l)?),
            counterterm: LaurentJson::from_series(bk.minus.get(l)?),
            renormalized: LaurentJson::from_series(bk.plus.get(l)?),
            value: [v.re, v.im],
        });
    }
    Ok(BphzReport { backend: source.backend(), order: gamma.order(), graphs, evaluations })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaRow {
    pub label: String,
    pub alias: Option<String>,
    pub loops: u32,
    pub residue: [f64; 2],
    /// Absent when the locality gate fails.
    pub beta: Option<[f64; 2]>,
    pub locality_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaReport {
    pub backend: Option<BackendJson>,
    pub local: bool,
    pub tolerance: f64,
    pub samples: Vec<f64>,
    pub rows: Vec<BetaRow>,
    pub character: BTreeMap<String, LaurentJson>,
}

impl BetaReport {
    /// Error for a failed locality gate, naming the worst generator.
    pub fn refusal(&self) -> Option<CliError> {
        if self.local {
            return None;
        }
        let worst = self.rows.iter().max_by(|a, b| a.locality_deviation.total_cmp(&b.locality_deviation))?;
        Some(CliError::numerical(format!(
            "counterterm of {} depends on the scale (deviation {:e}); beta undefined",
            worst.label, worst.locality_deviation
        )))
    }

    pub fn table(&self) -> String {
        let mut out = format!("{:<40} {:>5} {:>16} {:>16} {:>12}\n", "generator", "loops", "residue", "beta", "locality");
        for r in &self.rows {
            let name = r.alias.clone().unwrap_or_else(|| r.label.clone());
            let beta = r.beta.map_or_else(|| "undefined".to_string(), |b| format!("{:.9e}", b[0]));
            out.push_str(&format!(
                "{:<40} {:>5} {:>16.9e} {:>16} {:>12.3e}\n",
                name, r.loops, r.residue[0], beta, r.locality_deviation
            ));
        }
        out
    }
}

pub fn beta(source: &Source, tolerance: f64) -> Result<BetaReport, CliError> {
    let (h, gamma, _) = source.resolve()?;
    let locality = rg::check_locality(&gamma, &h, &DEFAULT_SAMPLES, tolerance)?;
    let residues = rg::residue(&gamma, &h)?;
    let betas = if locality.passed { Some(rg::beta(&gamma, &h)?) } else { None };
    let rows = h
        .labels()
        .map(|l| BetaRow {
            label: l.to_string(),
            alias: render::alias(l).map(String::from),
            loops: l.loops(),
            residue: [residues[l].re, residues[l].im],
            beta: betas.as_ref().map(|b| [b[l].re, b[l].im]),
            locality_deviation: locality.deviations[l],
        })
        .collect();
    Ok(BetaReport {
        backend: source.backend(),
        local: locality.passed,
        tolerance,
        samples: DEFAULT_SAMPLES.to_vec(),
        rows,
        character: character_to_json(&gamma),
    })
}

pub const DEFAULT_BETA_TOLERANCE: f64 = DEFAULT_LOCALITY_TOLERANCE;

pub fn literature() -> &'static [LiteratureBeta] {
    &LITERATURE
}

pub fn literature_table() -> String {
    let mut out = String::from("one-loop flat-space literature values (not computed)\n");
    for b in literature() {
        out.push_str(&format!("{:<12} beta({}) = {}\n", b.theory, b.coupling, b.beta));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalReport {
    pub dim: usize,
    pub points: usize,
    pub f: String,
    pub z: f64,
    pub mass: f64,
    pub constant_f: bool,
    /// `‖Ỹ_ḡ(z) − e^{−2fz}Ỹ_g(z)‖ / ‖e^{−2fz}Ỹ_g(z)‖`.
    pub deviation: f64,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    /// Yamabe pairing of a fixed trigonometric density in `g` and `ḡ`.
    pub yamabe_flat: f64,
    pub yamabe_rescaled: f64,
    pub yamabe_deviation: f64,
}

/// Coordinates are `x`, `y`, `w` (first three axes) and `x0, x1, …`.
pub fn parse_exponent(expr: &str, dim: usize) -> Result<impl Fn(&[f64]) -> f64, CliError> {
    let e: meval::Expr = expr.parse().map_err(|err| CliError::input(format!("cannot parse {expr:?}: {err}")))?;
    let names: Vec<String> = (0..dim)
        .map(|i| match i {
            0 => "x".into(),
            1 => "y".into(),
            2 => "w".into(),
            _ => format!("x{i}"),
        })
        .collect();
    // checked once at the origin so unknown names fail early
    let probe = move |x: &[f64]| {
        let mut ctx = meval::Context::new();
        for (i, &v) in x.iter().enumerate() {
            ctx.var(names[i].as_str(), v);
            ctx.var(format!("x{i}"), v);
        }
        e.eval_with_context(ctx)
    };
    probe(&vec![0.0; dim]).map_err(|err| CliError::input(format!("cannot evaluate {expr:?}: {err}")))?;
    Ok(move |x: &[f64]| probe(x).unwrap_or(f64::NAN))
}

pub fn conformal_check(dim: usize, points: usize, f: &str, z: f64, mass: f64) -> Result<ConformalReport, CliError> {
    if dim < 2 {
        return Err(CliError::input("conformal checks need n >= 2"));
    }
    let grid = Grid::new(dim, points)?;
    let exponent = grid.sample(parse_exponent(f, dim)?);
    if exponent.iter().any(|v| !v.is_finite()) {
        return Err(CliError::input(format!("{f:?} is not finite on the grid")));
    }
    let flat = ConformalMetric::flat(grid);
    let report = conformal_expansion_check(&flat, &exponent, mass, z)?;
    let bent = flat.rescaled(&exponent)?;
    let tau = 2.0 * std::f64::consts::PI;
    let phi = Density::new(
        (dim as f64 - 2.0) / 2.0,
        grid.sample(|x| (tau * x[0]).sin() * (2.0 * tau * x[1]).cos()),
        flat.clone(),
    )?;
    let yamabe_flat = yamabe_pairing(&phi, &flat)?;
    let yamabe_rescaled = yamabe_pairing(&phi, &bent)?;
    Ok(ConformalReport {
        dim,
        points,
        f: f.into(),
        z,
        mass,
        constant_f: report.constant_f,
        deviation: report.deviation,
        lhs_norm: report.lhs_norm,
        rhs_norm: report.rhs_norm,
        yamabe_flat,
        yamabe_rescaled,
        yamabe_deviation: (yamabe_rescaled - yamabe_flat).abs() / yamabe_flat.abs().max(f64::MIN_POSITIVE),
    })
}
