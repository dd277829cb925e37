//! Renormalization group action `γ_t(Γ) = t^{zL(Γ)} γ(Γ)`, the locality
//! test on counterterms, and the beta function
//! `β = d/dt|_{t=1} lim_{z→0} γ^{⋆−1} ⋆ γ_t`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::characters::{birkhoff, Character};
use crate::error::{Error, Result};
use crate::graphs::GraphLabel;
use crate::hopf::HopfAlgebra;
use crate::laurent::LaurentSeries;

/// Scales at which locality is sampled by default.
pub const DEFAULT_SAMPLES: [f64; 3] = [0.367_879_441_171_442_33, 1.648_721_270_700_128_1, 2.0];
/// Default locality tolerance, relative to the size of the counterterms.
pub const DEFAULT_LOCALITY_TOLERANCE: f64 = 1e-9;

/// `γ_t`: every generator value multiplied by `exp(z L ln t)`.
pub fn scale(gamma: &Character, t: f64) -> Result<Character> {
    let order = gamma.order();
    gamma.map_values(|l, v| {
        let depth = order - v.lowest().min(0);
        Ok(&LaurentSeries::scale_factor(t, l.loops(), depth)? * v)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalityReport {
    /// Largest coefficient deviation of `γ₋` from its `t = 1` value.
    pub deviations: BTreeMap<GraphLabel, f64>,
    pub tolerance: f64,
    pub passed: bool,
}

impl LocalityReport {
    pub fn worst(&self) -> Option<(&GraphLabel, f64)> {
        self.deviations
            .iter()
            .map(|(l, &d)| (l, d))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Compare the counterterms of `γ_t` with those of `γ` for each sampled `t`.
pub fn check_locality(gamma: &Character, h: &HopfAlgebra, samples: &[f64], tolerance: f64) -> Result<LocalityReport> {
    let base = birkhoff(gamma, h)?.minus;
    let size = base.values().map(|(_, v)| v.max_abs()).fold(1.0, f64::max);
    let mut deviations: BTreeMap<GraphLabel, f64> = h.labels().map(|l| (l.clone(), 0.0)).collect();
    for &t in samples {
        let scaled = birkhoff(&scale(gamma, t)?, h)?.minus;
        for l in h.labels() {
            let d = scaled.get(l)?.max_deviation(base.get(l)?, -1);
            let e = deviations.get_mut(l).unwrap();
            *e = e.max(d);
        }
    }
    let passed = deviations.values().all(|&d| d <= tolerance * size);
    Ok(LocalityReport { deviations, tolerance, passed })
}

/// Polar residue `−[z⁻¹] γ₋(x_Γ)`.
pub fn residue(gamma: &Character, h: &HopfAlgebra) -> Result<BTreeMap<GraphLabel, Complex64>> {
    let minus = birkhoff(gamma, h)?.minus;
    h.labels()
        .map(|l| Ok((l.clone(), -minus.get(l)?.coeff_or_zero(-1))))
        .collect()
}

/// `(γ^{⋆−1} ⋆ zYγ)(x_Γ)` for every generator: the exact `ln t`
/// derivative of `γ^{⋆−1} ⋆ γ_t` at `t = 1`.
pub fn beta_series(gamma: &Character, h: &HopfAlgebra) -> Result<BTreeMap<GraphLabel, LaurentSeries>> {
    let inv = gamma.star_inverse(h)?;
    let z = LaurentSeries::monomial(Complex64::new(1.0, 0.0), 1);
    let d = |l: &GraphLabel| -> Result<LaurentSeries> {
        Ok((&z * gamma.get(l)?).scale(Complex64::new(l.loops() as f64, 0.0)))
    };
    let mut out = BTreeMap::new();
    for l in h.labels() {
        let mut v = d(l)?;
        for t in h.proper_terms(l)? {
            let term = &inv.evaluate_monomial(&t.subgraph)? * &d(&t.quotient)?;
            v = &v + &term.scale(Complex64::new(t.count as f64, 0.0));
        }
        out.insert(l.clone(), v);
    }
    Ok(out)
}

/// The beta function on every generator. Refuses characters whose
/// counterterms depend on the scale.
pub fn beta(gamma: &Character, h: &HopfAlgebra) -> Result<BTreeMap<GraphLabel, Complex64>> {
    let report = check_locality(gamma, h, &DEFAULT_SAMPLES, DEFAULT_LOCALITY_TOLERANCE)?;
    if !report.passed {
        let (label, deviation) = report.worst().unwrap();
        return Err(Error::Locality { label: format!("{label}"), deviation });
    }
    let series = beta_series(gamma, h)?;
    let size = series.values().map(LaurentSeries::max_abs).fold(1.0, f64::max);
    let mut out = BTreeMap::new();
    for (l, v) in series {
        let polar = v.polar_part();
        if polar.max_abs() > 1e-8 * size {
            return Err(Error::Internal(format!("residual pole in the beta limit on {l}: {polar}")));
        }
        out.insert(l, v.coeff(0)?);
    }
    Ok(out)
}

/// One-loop flat-space beta functions from the literature, reported
/// verbatim for reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiteratureBeta {
    pub theory: &'static str,
    pub coupling: &'static str,
    pub beta: &'static str,
}

pub const LITERATURE: [LiteratureBeta; 5] = [
    LiteratureBeta { theory: "phi3", coupling: "g", beta: "-g^3/(128 pi^3)" },
    LiteratureBeta { theory: "phi4", coupling: "g", beta: "3 g^2/(16 pi^2)" },
    LiteratureBeta { theory: "qed", coupling: "e", beta: "e^3/(12 pi^2) + O(e^5)" },
    LiteratureBeta { theory: "yang-mills", coupling: "g", beta: "-11 g^3 C2(G)/(48 pi^2)" },
    LiteratureBeta { theory: "qcd", coupling: "g", beta: "-(33 - 2 N_f) g^3/(48 pi^2)" },
];

/// Literature value for a theory tag.
pub fn literature_beta(tag: &str) -> Result<LiteratureBeta> {
    LITERATURE
        .iter()
        .find(|b| b.theory.eq_ignore_ascii_case(tag))
        .copied()
        .ok_or_else(|| Error::Domain(format!("unknown theory {tag:?}")))
}

/// Local synthetic character with prescribed beta values.
///
/// Builds the polar character `φ` from `zYφ = φ ⋆ β` and returns
/// `γ = φ ⋆ γ₊`; its counterterm is `φ^{⋆−1}`, independent of the scale.
pub fn local_character(betas: &BTreeMap<GraphLabel, f64>, plus: &Character, h: &HopfAlgebra) -> Result<Character> {
    let order = plus.order();
    let mut phi = Character::unbounded(order);
    for l in h.labels() {
        let b = |l: &GraphLabel| {
            betas
                .get(l)
                .copied()
                .ok_or_else(|| Error::UnknownGenerator(format!("no beta value for {l}")))
        };
        let mut v = LaurentSeries::constant(Complex64::new(b(l)?, 0.0));
        for t in h.proper_terms(l)? {
            let term = phi.evaluate_monomial(&t.subgraph)?.scale(Complex64::new(t.count as f64 * b(&t.quotient)?, 0.0));
            v = &v + &term;
        }
        let inv_zl = LaurentSeries::monomial(Complex64::new(1.0 / l.loops() as f64, 0.0), -1);
        phi.insert(l.clone(), &inv_zl * &v)?;
    }
    phi.convolve(plus, h)
}

/// Finite-difference-free cross-check: the `z⁰` coefficient of
/// `γ^{⋆−1} ⋆ γ_t` sampled at `ln t = k·step` for `k = −n..=n`, with the
/// derivative at `ln t = 0` taken from the interpolating polynomial.
pub fn beta_by_fit(gamma: &Character, h: &HopfAlgebra, label: &GraphLabel, step: f64) -> Result<Complex64> {
    let inv = gamma.star_inverse(h)?;
    let n = label.loops() as i32;
    let nodes: Vec<f64> = (-n..=n).map(|k| k as f64 * step).collect();
    let mut values = Vec::with_capacity(nodes.len());
    for &s in &nodes {
        let f = inv.convolve(&scale(gamma, libm::exp(s))?, h)?;
        values.push(f.get(label)?.coeff(0)?);
    }
    // derivative of the Lagrange interpolant at 0
    let mut d = Complex64::new(0.0, 0.0);
    for (j, &xj) in nodes.iter().enumerate() {
        let mut w = 0.0;
        for (m, &xm) in nodes.iter().enumerate() {
            if m == j {
                continue;
            }
            let mut prod = 1.0 / (xj - xm);
            for (k, &xk) in nodes.iter().enumerate() {
                if k != j && k != m {
                    prod *= (0.0 - xk) / (xj - xk);
                }
            }
            w += prod;
        }
        d += values[j] * w;
    }
    Ok(d)
}
