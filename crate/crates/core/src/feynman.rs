//! Regularized Feynman rules on flat tori.
//!
//! Every internal edge carries a mode `k` and the propagator `λ_k^{−(1+z)}`;
//! every internal vertex integrates three eigenfunctions, which on a torus
//! is `V^{−1/2}` times momentum conservation. External legs are amputated:
//! leg `e` injects the mode of its external datum at the vertex it hangs
//! on. The pairing of a graph is therefore
//!
//! `λ^{V} |Aut|^{−1} V^{−V/2} Σ_{loop modes} Π_e λ_{k_e}^{−(1+z)}`
//!
//! with the sum running over the free loop momenta and all edge modes kept
//! inside the cutoff cube.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::characters::Character;
use crate::error::{Error, Result};
use crate::graphs::{symmetry_factor, FeynmanGraph, GraphLabel};
use crate::hopf::HopfAlgebra;
use crate::laurent::LaurentSeries;
use crate::spectral::SpectralBackend;

/// Upper bound on the number of mode configurations one direct sum visits.
pub const MODE_BUDGET: u64 = 50_000_000;

/// One external datum per leg, ordered by leg index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExternalLeg {
    /// The normalized constant eigenfunction.
    Constant,
    Mode(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExternalData {
    pub legs: Vec<ExternalLeg>,
}

impl ExternalData {
    pub fn zero_momentum(legs: usize) -> Self {
        ExternalData { legs: vec![ExternalLeg::Constant; legs] }
    }

    pub fn modes(modes: Vec<Vec<i64>>) -> Self {
        ExternalData { legs: modes.into_iter().map(ExternalLeg::Mode).collect() }
    }

    fn momenta(&self, dim: usize) -> Result<Vec<Vec<i64>>> {
        self.legs
            .iter()
            .map(|l| match l {
                ExternalLeg::Constant => Ok(vec![0; dim]),
                ExternalLeg::Mode(k) if k.len() == dim => Ok(k.clone()),
                ExternalLeg::Mode(k) => Err(Error::Domain(format!("external mode {k:?} is not {dim}-dimensional"))),
            })
            .collect()
    }

    pub fn is_zero_momentum(&self) -> bool {
        self.legs.iter().all(|l| match l {
            ExternalLeg::Constant => true,
            ExternalLeg::Mode(k) => k.iter().all(|&x| x == 0),
        })
    }
}

/// Result of a Laurent expansion at `z = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeynmanEvaluation {
    pub label: GraphLabel,
    pub backend: SpectralBackend,
    pub external: ExternalData,
    /// Full amplitude, prefactor included.
    pub series: LaurentSeries,
    /// The mode sum alone.
    pub lattice_sum: LaurentSeries,
    /// `λ^V |Aut|^{−1} V^{−V/2}`.
    pub prefactor: f64,
    pub cutoffs: (u32, u32),
    /// Largest coefficient of the numerically summed part at each cutoff.
    pub at_cutoff: f64,
    pub at_double: f64,
    /// Estimated error of the extrapolated numerical part.
    pub tolerance: f64,
}

/// Settings of the regularized rules.
#[derive(Clone, Debug, PartialEq)]
pub struct FeynmanRules {
    pub backend: SpectralBackend,
    pub coupling: f64,
    /// Truncation order of the expansions.
    pub order: i32,
    /// Allowed relative change under cutoff doubling.
    pub tolerance: f64,
    /// Mass-expansion terms handled by zeta continuation; `None` picks two
    /// above the minimum.
    pub subtraction_depth: Option<usize>,
}

impl FeynmanRules {
    pub fn new(backend: SpectralBackend) -> Self {
        FeynmanRules { backend, coupling: 1.0, order: crate::characters::DEFAULT_ORDER, tolerance: 1e-3, subtraction_depth: None }
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_order(mut self, order: i32) -> Self {
        self.order = order;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_subtraction_depth(mut self, depth: usize) -> Self {
        self.subtraction_depth = Some(depth);
        self
    }

    pub fn prefactor(&self, graph: &FeynmanGraph) -> f64 {
        let v = graph.internal_vertex_count() as i32;
        let r = symmetry_factor(graph);
        let sym = *r.numer() as f64 / *r.denom() as f64;
        libm::pow(self.coupling, v as f64) * sym * libm::pow(self.backend.volume(), -(v as f64) / 2.0)
    }

    /// `⟨A_Γ(z) φ_e, φ_f⟩`, summed at the cutoff and its double; fails if
    /// the two differ by more than the tolerance.
    pub fn pair(&self, graph: &FeynmanGraph, ext: &ExternalData, z: Complex64) -> Result<Complex64> {
        let label = GraphLabel::of(graph);
        let routing = Routing::new(graph, ext, self.backend.dim())?;
        let pre = self.prefactor(graph);
        if !routing.conserved {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if routing.chords.is_empty() {
            return Ok(routing.tree_value(&self.backend, z).map(|v| v * pre).unwrap_or_default());
        }
        let n = self.backend.cutoff();
        let (a, b) = if routing.chords.len() == 1 && routing.single_cycle() && ext.is_zero_momentum() {
            let s = (z + 1.0) * routing.edges.len() as f64;
            (shell_sum(&self.backend, n, s)?, shell_sum(&self.backend, 2 * n, s)?)
        } else {
            (
                routing.sum(&self.backend, n, |s| vec![(-(z + 1.0) * s).exp()], 1)?[0],
                routing.sum(&self.backend, 2 * n, |s| vec![(-(z + 1.0) * s).exp()], 1)?[0],
            )
        };
        if (a - b).norm() > self.tolerance * b.norm().max(f64::MIN_POSITIVE) {
            return Err(Error::Convergence { label: label.to_string(), at_cutoff: a.norm(), at_double: b.norm() });
        }
        Ok(b * pre)
    }

    /// Laurent expansion of the pairing at `z = 0`.
    pub fn laurent_expansion(&self, graph: &FeynmanGraph, ext: &ExternalData) -> Result<FeynmanEvaluation> {
        let label = GraphLabel::of(graph);
        let routing = Routing::new(graph, ext, self.backend.dim())?;
        let pre = self.prefactor(graph);
        let n = self.backend.cutoff();
        let order = self.order;
        let mut eval = FeynmanEvaluation {
            label: label.clone(),
            backend: self.backend.clone(),
            external: ext.clone(),
            series: LaurentSeries::zero_through(order),
            lattice_sum: LaurentSeries::zero_through(order),
            prefactor: pre,
            cutoffs: (n, 2 * n),
            at_cutoff: 0.0,
            at_double: 0.0,
            tolerance: 0.0,
        };
        if !routing.conserved {
            return Ok(eval);
        }
        if routing.chords.is_empty() {
            // tree: z enters only through tree propagators at fixed modes
            let sum = match routing.tree_log_eigen(&self.backend) {
                Some(s) => taylor_exp(-s, order),
                None => LaurentSeries::zero_through(order),
            };
            eval.lattice_sum = sum;
        } else if routing.chords.len() == 1 && routing.single_cycle() && ext.is_zero_momentum() {
            let lattice = one_loop_zero_momentum(self, routing.edges.len(), &mut eval)?;
            eval.lattice_sum = lattice;
        } else if routing.is_convergent(graph, self.backend.dim()) {
            let rate = -routing.worst_degree(graph, self.backend.dim()) as f64;
            let len = order as usize + 1;
            let taylor = |s: f64| {
                let mut out = Vec::with_capacity(len);
                let mut w = libm::exp(-s);
                for p in 0..len {
                    out.push(Complex64::new(w, 0.0));
                    w *= -s / (p + 1) as f64;
                }
                out
            };
            let a = routing.sum(&self.backend, n, |s| taylor(s.re), len)?;
            let b = routing.sum(&self.backend, 2 * n, |s| taylor(s.re), len)?;
            let (coeffs, err) = richardson(&a, &b, rate);
            eval.at_cutoff = max_norm(&a);
            eval.at_double = max_norm(&b);
            eval.tolerance = err;
            if err > self.tolerance * eval.at_double.max(f64::MIN_POSITIVE) {
                return Err(Error::Convergence { label: label.to_string(), at_cutoff: eval.at_cutoff, at_double: eval.at_double });
            }
            eval.lattice_sum = LaurentSeries::with_order(0, coeffs, Some(order));
        } else {
            return Err(Error::Capability(format!(
                "no pole extraction for {label}: only trees, zero-momentum one-loop graphs and convergent graphs are expandable"
            )));
        }
        eval.series = eval.lattice_sum.scale(Complex64::new(pre, 0.0));
        if eval.series.pole_order() > label.loops() {
            return Err(Error::Internal(format!("pole order of {label} exceeds its loop number")));
        }
        Ok(eval)
    }

    /// The character assigning every generator of `h` its expansion with
    /// zero-momentum external legs.
    pub fn character(&self, h: &HopfAlgebra) -> Result<Character> {
        let mut c = Character::new(self.order);
        for label in h.labels() {
            let g = h.graph(label)?;
            let eval = self
                .laurent_expansion(g, &ExternalData::zero_momentum(g.external_count()))
                .map_err(|e| with_label(e, label))?;
            c.insert(label.clone(), eval.series)?;
        }
        Ok(c)
    }
}

fn with_label(e: Error, label: &GraphLabel) -> Error {
    match e {
        Error::Convergence { at_cutoff, at_double, .. } => Error::Convergence { label: label.to_string(), at_cutoff, at_double },
        Error::Capability(m) if m.contains(label.as_str()) => Error::Capability(m),
        Error::Capability(m) => Error::Capability(format!("{label}: {m}")),
        Error::PoleInstability(m) => Error::PoleInstability(format!("{label}: {m}")),
        Error::Resource(m) => Error::Resource(format!("{label}: {m}")),
        Error::UnsupportedBackend(m) => Error::UnsupportedBackend(format!("{label}: {m}")),
        Error::Internal(m) => Error::Internal(format!("{label}: {m}")),
        other => other,
    }
}

/// Pairing with coupling one and default tolerance.
pub fn pair(graph: &FeynmanGraph, backend: &SpectralBackend, ext: &ExternalData, z: Complex64) -> Result<Complex64> {
    FeynmanRules::new(backend.clone()).pair(graph, ext, z)
}

pub fn laurent_expansion(graph: &FeynmanGraph, backend: &SpectralBackend, ext: &ExternalData, order: i32) -> Result<FeynmanEvaluation> {
    FeynmanRules::new(backend.clone()).with_order(order).laurent_expansion(graph, ext)
}

/// `γ_𝓛` on the generators of `universe`, zero-momentum legs, coupling one.
pub fn character_from_rules(backend: &SpectralBackend, universe: &HopfAlgebra, order: i32) -> Result<Character> {
    FeynmanRules::new(backend.clone()).with_order(order).character(universe)
}

/// Momentum routing: every internal edge mode is an integer combination of
/// chord (loop) momenta plus a fixed external part.
struct Routing {
    dim: usize,
    /// Internal edges as (chord coefficients, fixed momentum).
    edges: Vec<(Vec<i64>, Vec<i64>)>,
    chords: Vec<usize>,
    conserved: bool,
    /// Internal edge positions in graph order.
    internal: Vec<usize>,
}

impl Routing {
    fn new(graph: &FeynmanGraph, ext: &ExternalData, dim: usize) -> Result<Self> {
        let e = graph.external_count();
        if ext.legs.len() != e {
            return Err(Error::Domain(format!("{} external data for a graph with {e} legs", ext.legs.len())));
        }
        let momenta = ext.momenta(dim)?;
        let nv = graph.vertices().len();
        let mut inject = vec![vec![0i64; dim]; nv];
        let mut total = vec![0i64; dim];
        for (i, p) in momenta.iter().enumerate() {
            let leg = i as u32 + 1;
            let at = graph.leg_attachment(leg).ok_or_else(|| Error::InvalidGraph(format!("leg {leg} missing")))?;
            for d in 0..dim {
                inject[at][d] += p[d];
                total[d] += p[d];
            }
        }
        let conserved = total.iter().all(|&x| x == 0);
        let internal = graph.internal_edges();
        let ivs: Vec<usize> = (0..nv).filter(|&v| graph.is_internal(v)).collect();
        // spanning tree over internal vertices
        let mut parent_edge = vec![usize::MAX; nv];
        let mut seen = vec![false; nv];
        let mut order = Vec::new();
        let mut tree = vec![false; internal.len()];
        if let Some(&root) = ivs.first() {
            seen[root] = true;
            order.push(root);
            let mut head = 0;
            while head < order.len() {
                let u = order[head];
                head += 1;
                for (slot, &ei) in internal.iter().enumerate() {
                    let (a, b) = graph.edges()[ei];
                    let other = if a == u { b } else if b == u { a } else { continue };
                    if !seen[other] {
                        seen[other] = true;
                        parent_edge[other] = slot;
                        tree[slot] = true;
                        order.push(other);
                    }
                }
            }
        }
        let chords: Vec<usize> = (0..internal.len()).filter(|&s| !tree[s]).collect();
        let l = chords.len();
        let mut edges = vec![(vec![0i64; l], vec![0i64; dim]); internal.len()];
        for (c, &slot) in chords.iter().enumerate() {
            edges[slot].0[c] = 1;
        }
        // subtree membership by walking up parents
        let in_subtree = |w: usize, v: usize| -> bool {
            let mut x = w;
            loop {
                if x == v {
                    return true;
                }
                let pe = parent_edge[x];
                if pe == usize::MAX {
                    return false;
                }
                let (a, b) = graph.edges()[internal[pe]];
                x = if a == x { b } else { a };
            }
        };
        for &v in order.iter().skip(1) {
            let slot = parent_edge[v];
            let mut coeffs = vec![0i64; l];
            let mut fixed = vec![0i64; dim];
            for &w in &ivs {
                if in_subtree(w, v) {
                    for d in 0..dim {
                        fixed[d] += inject[w][d];
                    }
                }
            }
            for (c, &cs) in chords.iter().enumerate() {
                let (a, b) = graph.edges()[internal[cs]];
                let (ia, ib) = (in_subtree(a, v), in_subtree(b, v));
                if ia != ib {
                    coeffs[c] += if ia { 1 } else { -1 };
                }
            }
            let (a, _) = graph.edges()[internal[slot]];
            // σ k_tree = −(p(T_v) + Σ σ_c k_c)
            let sigma = if in_subtree(a, v) { 1 } else { -1 };
            edges[slot] = (
                coeffs.iter().map(|c| -sigma * c).collect(),
                fixed.iter().map(|p| -sigma * p).collect(),
            );
        }
        Ok(Routing { dim, edges, chords, conserved, internal })
    }

    /// One loop whose every edge carries the loop momentum.
    fn single_cycle(&self) -> bool {
        self.edges.iter().all(|(c, _)| c.len() == 1 && c[0].abs() == 1)
    }

    fn tree_log_eigen(&self, b: &SpectralBackend) -> Option<f64> {
        let mut s = 0.0;
        for (_, p) in &self.edges {
            if !b.is_retained(p) || p.iter().any(|x| x.unsigned_abs() > b.cutoff() as u64) {
                return None;
            }
            s += libm::log(b.eigenvalue(p));
        }
        Some(s)
    }

    fn tree_value(&self, b: &SpectralBackend, z: Complex64) -> Option<Complex64> {
        self.tree_log_eigen(b).map(|s| (-(z + 1.0) * s).exp())
    }

    /// `Σ f(Σ_e ln λ_e)` over chord momenta in the cube of side `cutoff`,
    /// keeping configurations whose every edge mode is retained and inside
    /// the cube.
    fn sum(
        &self,
        b: &SpectralBackend,
        cutoff: u32,
        f: impl Fn(Complex64) -> Vec<Complex64>,
        len: usize,
    ) -> Result<Vec<Complex64>> {
        let l = self.chords.len();
        let side = 2 * cutoff as u64 + 1;
        let count = (0..l * self.dim).try_fold(1u64, |acc, _| acc.checked_mul(side));
        if count.map_or(true, |c| c > MODE_BUDGET) {
            return Err(Error::Resource(format!(
                "{l}-loop mode sum at cutoff {cutoff} in {} dimensions exceeds {MODE_BUDGET} configurations",
                self.dim
            )));
        }
        let c = cutoff as i64;
        let periods = b.periods();
        let m2 = b.mass() * b.mass();
        let scale: Vec<f64> = periods.iter().map(|l| libm::pow(2.0 * core::f64::consts::PI / l, 2.0)).collect();
        let mut acc = vec![Complex64::new(0.0, 0.0); len];
        let mut ks = vec![-c; l * self.dim];
        let mut mode = vec![0i64; self.dim];
        'outer: loop {
            let mut s = 0.0;
            let mut ok = true;
            for (coeffs, fixed) in &self.edges {
                let mut q = m2;
                let mut zero = true;
                for d in 0..self.dim {
                    let mut k = fixed[d];
                    for (ci, &cc) in coeffs.iter().enumerate() {
                        k += cc * ks[ci * self.dim + d];
                    }
                    if k.abs() > c {
                        ok = false;
                        break;
                    }
                    zero &= k == 0;
                    mode[d] = k;
                    q += scale[d] * (k * k) as f64;
                }
                if !ok || (zero && m2 == 0.0) {
                    ok = false;
                    break;
                }
                s += libm::log(q);
            }
            if ok {
                for (a, v) in acc.iter_mut().zip(f(Complex64::new(s, 0.0))) {
                    *a += v;
                }
            }
            let mut i = ks.len();
            loop {
                if i == 0 {
                    break 'outer;
                }
                i -= 1;
                if ks[i] < c {
                    ks[i] += 1;
                    break;
                }
                ks[i] = -c;
            }
        }
        Ok(acc)
    }

    /// Every subset of internal edges with loops has `nL − 2I < 0`.
    fn is_convergent(&self, graph: &FeynmanGraph, dim: usize) -> bool {
        self.worst_degree(graph, dim) < 0
    }

    /// Largest `nL − 2I` over internal edge subsets with at least one loop.
    fn worst_degree(&self, graph: &FeynmanGraph, dim: usize) -> i64 {
        let m = self.internal.len();
        if m > 20 {
            return i64::MAX;
        }
        let nv = graph.vertices().len();
        let mut worst = i64::MIN;
        for mask in 1u32..(1 << m) {
            let mut parent: Vec<usize> = (0..nv).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                let mut r = x;
                while p[r] != r {
                    r = p[r];
                }
                p[x] = r;
                r
            }
            let mut loops = 0i64;
            for bit in 0..m {
                if mask & (1 << bit) != 0 {
                    let (a, b) = graph.edges()[self.internal[bit]];
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra == rb {
                        loops += 1;
                    } else {
                        parent[ra] = rb;
                    }
                }
            }
            if loops > 0 {
                worst = worst.max(dim as i64 * loops - 2 * mask.count_ones() as i64);
            }
        }
        worst
    }
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.norm()))
}

/// Richardson extrapolation of values at `N` and `2N` for an `N^{−rate}`
/// tail. Returns the extrapolated values and the size of the correction.
fn richardson(a: &[Complex64], b: &[Complex64], rate: f64) -> (Vec<Complex64>, f64) {
    let denom = libm::pow(2.0, rate) - 1.0;
    let mut err: f64 = 0.0;
    let out = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            let corr = (y - x) / denom;
            err = err.max(corr.norm());
            y + corr
        })
        .collect();
    (out, err)
}

/// `e^{a z}` through `z^order`.
fn taylor_exp(a: f64, order: i32) -> LaurentSeries {
    LaurentSeries::exp_linear(Complex64::new(a, 0.0), order)
}

/// Truncated power series helpers in `ε`.
fn ser_mul_linear(a: &[f64], c0: f64, c1: f64) -> Vec<f64> {
    let mut out = vec![0.0; a.len()];
    for i in 0..a.len() {
        out[i] += c0 * a[i];
        if i + 1 < a.len() {
            out[i + 1] += c1 * a[i];
        }
    }
    out
}

/// Taylor coefficients of `A^{−(s0+ε)}`.
fn power_series(a: f64, s0: f64, len: usize) -> Vec<f64> {
    let la = libm::log(a);
    let mut w = libm::exp(-s0 * la);
    let mut out = Vec::with_capacity(len);
    for p in 0..len {
        out.push(w);
        w *= -la / (p + 1) as f64;
    }
    out
}

/// `Σ_k λ_k^{−s}` for `s = I(1+z)` over retained modes, continued to
/// `z = 0`. The mass expansion of each summand up to `m^{2J}` is summed
/// exactly through the massless zeta trace; the remainder converges and is
/// extrapolated from the cutoff and its double.
fn one_loop_zero_momentum(rules: &FeynmanRules, edges: usize, eval: &mut FeynmanEvaluation) -> Result<LaurentSeries> {
    let b = &rules.backend;
    let n = b.dim();
    let order = rules.order;
    let len = order as usize + 1;
    let s0 = edges as f64;
    let m2 = b.mass() * b.mass();
    let massless = b.with_mass(0.0)?;
    let eps = Complex64::new(edges as f64, 0.0);
    if m2 == 0.0 {
        return Ok(massless.zeta_trace_expansion(s0, order)?.rescale_variable(eps));
    }
    // smallest J with 2(s0 + J + 1) > n
    let j_min = (libm::floor(n as f64 / 2.0 - s0) as i64).max(0) as usize;
    let depth = rules.subtraction_depth.unwrap_or(j_min + 2);
    if depth < j_min {
        return Err(Error::PoleInstability(format!(
            "subtraction depth {depth} below the minimum {j_min} for {edges} propagators in {n} dimensions"
        )));
    }
    // zero mode
    let mut total = LaurentSeries::with_order(
        0,
        power_series(m2, s0, len).into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        Some(order),
    );
    // binomial coefficients binom(−s, j) as series in ε
    let mut binoms = vec![{
        let mut one = vec![0.0; len];
        one[0] = 1.0;
        one
    }];
    for j in 0..depth {
        let next = ser_mul_linear(&binoms[j], -(s0 + j as f64) / (j + 1) as f64, -1.0 / (j + 1) as f64);
        binoms.push(next);
    }
    for (j, bj) in binoms.iter().enumerate() {
        let zeta = massless.zeta_trace_expansion(s0 + j as f64, order)?;
        let coef = LaurentSeries::with_order(
            0,
            bj.iter().map(|&x| Complex64::new(x * libm::pow(m2, j as f64), 0.0)).collect(),
            None,
        );
        total = &total + &(&coef * &zeta);
    }
    let rate = 2.0 * (s0 + depth as f64 + 1.0) - n as f64;
    let r1 = remainder(b, b.cutoff(), s0, depth, &binoms, len)?;
    let r2 = remainder(b, 2 * b.cutoff(), s0, depth, &binoms, len)?;
    let a: Vec<Complex64> = r1.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let c: Vec<Complex64> = r2.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let (r, err) = richardson(&a, &c, rate);
    eval.at_cutoff = max_norm(&a);
    eval.at_double = max_norm(&c);
    eval.tolerance = err;
    let scale = total.max_abs().max(eval.at_double);
    if err > rules.tolerance * scale {
        return Err(Error::Convergence { label: eval.label.to_string(), at_cutoff: eval.at_cutoff, at_double: eval.at_double });
    }
    total = &total + &LaurentSeries::with_order(0, r, Some(order));
    Ok(total.rescale_variable(eps).truncate(order))
}

/// `Σ_{k≠0, |k|∞≤N} [λ_k^{−s} − Σ_{j≤J} binom(−s,j) m^{2j} Q_k^{−s−j}]` as a
/// series in `ε = s − s0`, grouped by the value of `Q_k = |2πk/L|²`.
fn remainder(b: &SpectralBackend, cutoff: u32, s0: f64, depth: usize, binoms: &[Vec<f64>], len: usize) -> Result<Vec<f64>> {
    let m2 = b.mass() * b.mass();
    let shells = shells(b, cutoff)?;
    let mut out = vec![0.0; len];
    for (q, count) in shells {
        let x = m2 / q;
        let mut r = vec![0.0; len];
        if x >= 0.5 {
            r = power_series(q + m2, s0, len);
            for (j, bj) in binoms.iter().enumerate() {
                let p = power_series(q, s0 + j as f64, len);
                let t = crate::special::mul_series(bj, &p, len);
                let w = libm::pow(m2, j as f64);
                for i in 0..len {
                    r[i] -= w * t[i];
                }
            }
        } else {
            // Σ_{j>J} binom(−s,j) x^j, then times Q^{−s}
            let mut bj = binoms[depth].clone();
            let mut xj = libm::pow(x, depth as f64);
            let mut j = depth;
            loop {
                bj = ser_mul_linear(&bj, -(s0 + j as f64) / (j + 1) as f64, -1.0 / (j + 1) as f64);
                xj *= x;
                j += 1;
                let mut big: f64 = 0.0;
                for i in 0..len {
                    let t = bj[i] * xj;
                    r[i] += t;
                    big = big.max(libm::fabs(t));
                }
                if big < 1e-19 * r.iter().fold(0.0_f64, |m, v| m.max(libm::fabs(*v))) || j > 4000 {
                    break;
                }
            }
            r = crate::special::mul_series(&r, &power_series(q, s0, len), len);
        }
        for i in 0..len {
            out[i] += count * r[i];
        }
    }
    Ok(out)
}

/// `Σ_{|k|∞ ≤ N} λ_k^{−s}` over retained modes, by shells.
fn shell_sum(b: &SpectralBackend, cutoff: u32, s: Complex64) -> Result<Complex64> {
    let m2 = b.mass() * b.mass();
    let mut acc = Complex64::new(0.0, 0.0);
    if m2 > 0.0 {
        acc += (-s * libm::log(m2)).exp();
    }
    for (q, count) in shells(b, cutoff)? {
        acc += (-s * libm::log(q + m2)).exp() * count;
    }
    Ok(acc)
}

/// Distinct values of `Q_k` over nonzero modes in the cutoff cube, with
/// multiplicities.
fn shells(b: &SpectralBackend, cutoff: u32) -> Result<Vec<(f64, f64)>> {
    let n = b.dim();
    let c = cutoff as i64;
    let periods = b.periods();
    if b.is_isotropic() {
        let alpha = libm::pow(2.0 * core::f64::consts::PI / periods[0], 2.0);
        // counts of |k|² over the cube, one axis at a time
        let top = (n as i64 * c * c) as usize;
        let mut counts = vec![0.0f64; top + 1];
        counts[0] = 1.0;
        let mut reach = 0usize;
        for _ in 0..n {
            let mut next = vec![0.0f64; top + 1];
            for (q, &w) in counts.iter().enumerate().take(reach + 1) {
                if w == 0.0 {
                    continue;
                }
                for k in -c..=c {
                    next[q + (k * k) as usize] += w;
                }
            }
            counts = next;
            reach += (c * c) as usize;
        }
        return Ok(counts
            .into_iter()
            .enumerate()
            .skip(1)
            .filter(|&(_, w)| w > 0.0)
            .map(|(q, w)| (alpha * q as f64, w))
            .collect());
    }
    let side = 2 * cutoff as u64 + 1;
    if (0..n).try_fold(1u64, |a, _| a.checked_mul(side)).map_or(true, |v| v > MODE_BUDGET) {
        return Err(Error::Resource(format!("anisotropic shell sum at cutoff {cutoff} is too large")));
    }
    let mut out = Vec::new();
    let massless = b.with_mass(0.0)?.with_cutoff(cutoff);
    crate::spectral::for_each_mode(n, c, |k| {
        if k.iter().any(|&x| x != 0) {
            out.push((massless.eigenvalue(k), 1.0));
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::fixtures;
    use core::f64::consts::PI;

    #[test]
    fn tree_is_constant() {
        let b = SpectralBackend::unit_torus(2, 1.0, 4).unwrap();
        let ext = ExternalData::modes(vec![vec![1, 0], vec![0, 1], vec![-1, -1]]);
        let v = pair(&fixtures::vertex(), &b, &ext, Complex64::new(0.3, 0.0)).unwrap();
        assert!((v.re - 1.0).abs() < 1e-15);
        let e = laurent_expansion(&fixtures::vertex(), &b, &ext, 3).unwrap();
        assert!((e.series.coeff(0).unwrap().re - 1.0).abs() < 1e-15);
        assert!(e.series.coeff(1).unwrap().norm() < 1e-15);
    }

    #[test]
    fn momentum_violation_vanishes() {
        let b = SpectralBackend::unit_torus(2, 1.0, 4).unwrap();
        let ext = ExternalData::modes(vec![vec![1, 0], vec![0, 0]]);
        let v = pair(&fixtures::bubble(), &b, &ext, Complex64::new(2.0, 0.0)).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn bubble_pair_matches_lattice_sum() {
        let b = SpectralBackend::unit_torus(2, 1.0, 10).unwrap();
        let z = 1.5;
        let v = pair(&fixtures::bubble(), &b, &ExternalData::zero_momentum(2), Complex64::new(z, 0.0)).unwrap();
        let mut direct = 0.0;
        for k1 in -20i64..=20 {
            for k2 in -20i64..=20 {
                let l = 4.0 * PI * PI * (k1 * k1 + k2 * k2) as f64 + 1.0;
                direct += libm::pow(l, -2.0 * (1.0 + z));
            }
        }
        assert!((v.re - 0.5 * direct).abs() < 1e-10 * direct);
    }

    #[test]
    fn routing_with_external_momentum() {
        // triangle on a circle with momenta p, q, −p−q: direct sum over the loop
        let b = SpectralBackend::circle(1.0, 1.0, 30).unwrap();
        let ext = ExternalData::modes(vec![vec![1], vec![2], vec![-3]]);
        let z = Complex64::new(0.5, 0.0);
        let v = pair(&fixtures::triangle(), &b, &ext, z).unwrap();
        let v_rot = pair(&fixtures::triangle(), &b, &ExternalData::modes(vec![vec![2], vec![-3], vec![1]]), z).unwrap();
        assert!((v - v_rot).norm() < 1e-12 * v.norm());
        assert!(v.re > 0.0);
    }
}
