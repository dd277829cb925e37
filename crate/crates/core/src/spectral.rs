//! Flat model manifolds: circles and tori with the massive Laplacian
//! `A = −Δ + m²`, their eigen-data, zeta-regularized traces and Green's
//! functions, and the triple overlap integrals of eigenfunctions.
//!
//! The eigenfunctions are `φ_k(x) = e^{2πi k·x/L}/√V` for `k ∈ ℤⁿ`, with
//! eigenvalue `λ_k = Σ (2πk_i/L_i)² + m²`. When `m = 0` the constant mode
//! is dropped and `A` is inverted on its complement.
//!
//! Traces use the Mellin split at `t = 1`. Below it, Poisson summation
//! gives `θ(t) = e^{−tm²} V (4πt)^{−n/2} (1 + ε(t))` with `ε` exponentially
//! small; the power terms are continued analytically term by term. Above
//! it, the mode sum converges exponentially and is integrated numerically.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::special::{integrate, mul_series, recip_gamma, recip_gamma_series};

/// Number of heat-kernel coefficients the backends can supply.
pub const MAX_HEAT_COEFFICIENTS: usize = 64;

const QUAD_TOL: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub enum Manifold {
    Circle { radius: f64 },
    Torus { periods: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralBackend {
    manifold: Manifold,
    mass: f64,
    cutoff: u32,
}

/// Small-time heat expansion `θ(t) ~ (4πt)^{−n/2} Σ a_j t^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatKernelExpansion {
    pub dim: usize,
    pub coefficients: Vec<f64>,
}

impl SpectralBackend {
    pub fn torus(periods: Vec<f64>, mass: f64, cutoff: u32) -> Result<Self> {
        if periods.is_empty() || periods.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::Domain(format!("torus periods must be positive, got {periods:?}")));
        }
        Self::checked(Manifold::Torus { periods }, mass, cutoff)
    }

    /// Unit torus `ℝⁿ/ℤⁿ`.
    pub fn unit_torus(dim: usize, mass: f64, cutoff: u32) -> Result<Self> {
        Self::torus(vec![1.0; dim], mass, cutoff)
    }

    pub fn circle(radius: f64, mass: f64, cutoff: u32) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("circle radius must be positive, got {radius}")));
        }
        Self::checked(Manifold::Circle { radius }, mass, cutoff)
    }

    fn checked(manifold: Manifold, mass: f64, cutoff: u32) -> Result<Self> {
        if !(mass >= 0.0) || !mass.is_finite() {
            return Err(Error::Domain(format!("mass must be non-negative, got {mass}")));
        }
        if cutoff == 0 {
            return Err(Error::Domain("mode cutoff must be positive".into()));
        }
        Ok(SpectralBackend { manifold, mass, cutoff })
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn with_cutoff(&self, cutoff: u32) -> Self {
        SpectralBackend { cutoff, ..self.clone() }
    }

    pub fn with_mass(&self, mass: f64) -> Result<Self> {
        Self::checked(self.manifold.clone(), mass, self.cutoff)
    }

    /// Periods scaled by `alpha`.
    pub fn rescaled(&self, alpha: f64) -> Result<Self> {
        let manifold = match &self.manifold {
            Manifold::Circle { radius } => Manifold::Circle { radius: radius * alpha },
            Manifold::Torus { periods } => Manifold::Torus { periods: periods.iter().map(|l| l * alpha).collect() },
        };
        Self::checked(manifold, self.mass, self.cutoff)
    }

    pub fn dim(&self) -> usize {
        match &self.manifold {
            Manifold::Circle { .. } => 1,
            Manifold::Torus { periods } => periods.len(),
        }
    }

    pub fn periods(&self) -> Vec<f64> {
        match &self.manifold {
            Manifold::Circle { radius } => vec![2.0 * PI * radius],
            Manifold::Torus { periods } => periods.clone(),
        }
    }

    pub fn volume(&self) -> f64 {
        self.periods().iter().product()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// Whether the constant mode is part of the spectrum.
    pub fn keeps_zero_mode(&self) -> bool {
        self.mass > 0.0
    }

    /// All periods equal.
    pub fn is_isotropic(&self) -> bool {
        let p = self.periods();
        p.iter().all(|&l| l == p[0])
    }

    pub fn eigenvalue(&self, k: &[i64]) -> f64 {
        self.periods()
            .iter()
            .zip(k)
            .map(|(l, &ki)| {
                let w = 2.0 * PI * ki as f64 / l;
                w * w
            })
            .sum::<f64>()
            + self.mass * self.mass
    }

    pub fn is_retained(&self, k: &[i64]) -> bool {
        self.keeps_zero_mode() || k.iter().any(|&x| x != 0)
    }

    /// `φ_k(x)`.
    pub fn eigenfunction(&self, k: &[i64], x: &[f64]) -> Complex64 {
        let phase: f64 = self
            .periods()
            .iter()
            .zip(k)
            .zip(x)
            .map(|((l, &ki), &xi)| 2.0 * PI * ki as f64 * xi / l)
            .sum();
        Complex64::from_polar(1.0 / libm::sqrt(self.volume()), phase)
    }

    /// Retained modes with `|k|_∞ ≤ cutoff`, in lexicographic order.
    pub fn modes(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        for_each_mode(self.dim(), self.cutoff as i64, |k| {
            if self.is_retained(k) {
                out.push(k.to_vec());
            }
        });
        out
    }

    /// Smallest retained eigenvalue.
    pub fn spectral_gap(&self) -> f64 {
        if self.keeps_zero_mode() {
            return self.mass * self.mass;
        }
        let lmax = self.periods().iter().cloned().fold(0.0, f64::max);
        libm::pow(2.0 * PI / lmax, 2.0)
    }

    pub fn heat_coefficients(&self, count: usize) -> Result<HeatKernelExpansion> {
        if count > MAX_HEAT_COEFFICIENTS {
            return Err(Error::Capability(format!(
                "{count} heat coefficients requested, {MAX_HEAT_COEFFICIENTS} available"
            )));
        }
        let v = self.volume();
        let m2 = self.mass * self.mass;
        let mut c = 1.0;
        let mut coefficients = Vec::with_capacity(count);
        for j in 0..count {
            coefficients.push(v * c);
            c *= -m2 / (j + 1) as f64;
        }
        Ok(HeatKernelExpansion { dim: self.dim(), coefficients })
    }

    /// Poles `s = n/2 − j` of the zeta trace with their residues, for the
    /// first `count` heat coefficients. Residues vanish where `1/Γ(s)` does.
    pub fn zeta_poles(&self, count: usize) -> Result<Vec<(f64, f64)>> {
        let heat = self.heat_coefficients(count)?;
        let n = self.dim() as f64;
        let pref = libm::pow(4.0 * PI, -n / 2.0);
        Ok(heat
            .coefficients
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let s = n / 2.0 - j as f64;
                (s, pref * a * recip_gamma_series(s, 1)[0])
            })
            .collect())
    }

    /// `Θ(t) − 1` where `Θ(t) = Σ_k e^{−t|2πk/L|²}` (no mass).
    fn theta_excess(&self, t: f64) -> f64 {
        excess_product(self.periods().iter().map(|&l| axis_theta_excess(t, l)))
    }

    /// `ε(t)` in the Poisson-dual form of `Θ`.
    fn dual_excess(&self, t: f64) -> f64 {
        excess_product(self.periods().iter().map(|&l| axis_dual_excess(t, l)))
    }

    /// `Tr e^{−tA}` over retained modes.
    pub fn heat_trace(&self, t: f64) -> f64 {
        let damp = libm::exp(-t * self.mass * self.mass);
        if self.keeps_zero_mode() {
            damp * (1.0 + self.theta_excess(t))
        } else {
            self.theta_excess(t)
        }
    }

    /// Laurent expansion of `ζ_A(s0 + ε) = Tr A^{−(s0+ε)}` in `ε`, through
    /// `ε^order`.
    pub fn zeta_trace_expansion(&self, s0: f64, order: i32) -> Result<LaurentSeries> {
        if order < 0 {
            return Err(Error::Domain("expansion order must be non-negative".into()));
        }
        let len = order as usize + 2;
        let n = self.dim() as f64;
        let v = self.volume();
        let m2 = self.mass * self.mass;
        let pref = v * libm::pow(4.0 * PI, -n / 2.0);
        // bracket coefficients for ε^{-1} .. ε^{len-1}
        let mut polar = 0.0;
        let mut reg = vec![0.0; len];
        let add_simple = |delta: f64, c: f64, polar: &mut f64, reg: &mut [f64]| {
            if libm::fabs(delta) < 1e-12 {
                *polar += c;
            } else {
                let mut p = c / delta;
                for r in reg.iter_mut() {
                    *r += p;
                    p *= -1.0 / delta;
                }
            }
        };
        // analytically continued ∫_0^1 t^{s−n/2−1} e^{−tm²} dt
        let mut c = 1.0;
        let mut converged = m2 == 0.0;
        for j in 0..MAX_HEAT_COEFFICIENTS {
            add_simple(s0 - n / 2.0 + j as f64, pref * c, &mut polar, &mut reg);
            c *= -m2 / (j + 1) as f64;
            if m2 == 0.0 {
                break;
            }
            if libm::fabs(c) < 1e-18 * (1.0 + pref) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Capability(format!(
                "heat expansion needs more than {MAX_HEAT_COEFFICIENTS} coefficients at mass {}",
                self.mass
            )));
        }
        if !self.keeps_zero_mode() {
            add_simple(s0, -1.0, &mut polar, &mut reg);
        }
        // exponentially small part of the small-time integral
        let lmin = self.periods().iter().cloned().fold(f64::INFINITY, f64::min);
        let t0 = lmin * lmin / 2800.0;
        if t0 < 1.0 {
            let a = s0 - n / 2.0;
            let small = integrate(
                |t, out| {
                    let lt = libm::log(t);
                    let mut w = libm::exp((a - 1.0) * lt - t * m2) * self.dual_excess(t);
                    for (k, o) in out.iter_mut().enumerate() {
                        *o = w;
                        w *= lt / (k + 1) as f64;
                    }
                },
                t0,
                1.0,
                len,
                QUAD_TOL,
            );
            for (r, s) in reg.iter_mut().zip(small) {
                *r += pref * s;
            }
        }
        // large-time integral
        let gap = self.spectral_gap();
        let mut top = 2.0;
        while gap * top - (s0 - 1.0).max(0.0) * libm::log(top) - (len as f64) * libm::log(libm::log(top) + 1.0) < 55.0 {
            top *= 1.5;
        }
        let large = integrate(
            |t, out| {
                let lt = libm::log(t);
                let mut w = libm::exp((s0 - 1.0) * lt) * self.heat_trace(t);
                for (k, o) in out.iter_mut().enumerate() {
                    *o = w;
                    w *= lt / (k + 1) as f64;
                }
            },
            1.0,
            top,
            len,
            QUAD_TOL,
        );
        for (r, s) in reg.iter_mut().zip(large) {
            *r += s;
        }
        let rg = recip_gamma_series(s0, len);
        // (polar/ε + reg) · rg
        let mut coeffs = vec![0.0; len + 1];
        for (i, &g) in rg.iter().enumerate() {
            coeffs[i] += polar * g;
        }
        let prod = mul_series(&reg, &rg, len);
        for (i, p) in prod.into_iter().enumerate() {
            coeffs[i + 1] += p;
        }
        Ok(LaurentSeries::with_order(
            -1,
            coeffs.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
            Some(order),
        ))
    }

    /// `Tr A^{−s}`; an error at poles.
    pub fn zeta_trace(&self, s: Complex64) -> Result<Complex64> {
        if s.im == 0.0 {
            return self.zeta_trace_expansion(s.re, 0)?.eval_at_zero();
        }
        let n = self.dim() as f64;
        let m2 = self.mass * self.mass;
        let pref = self.volume() * libm::pow(4.0 * PI, -n / 2.0);
        let mut bracket = Complex64::new(0.0, 0.0);
        let mut c = 1.0;
        for j in 0..MAX_HEAT_COEFFICIENTS {
            bracket += pref * c / (s - n / 2.0 + j as f64);
            c *= -m2 / (j + 1) as f64;
            if c == 0.0 || libm::fabs(c) < 1e-18 {
                break;
            }
        }
        if !self.keeps_zero_mode() {
            bracket -= 1.0 / s;
        }
        let lmin = self.periods().iter().cloned().fold(f64::INFINITY, f64::min);
        let t0 = lmin * lmin / 2800.0;
        let a = s - n / 2.0 - 1.0;
        if t0 < 1.0 {
            let v = integrate(
                |t, out| {
                    let w = (a * libm::log(t)).exp() * libm::exp(-t * m2) * self.dual_excess(t);
                    out[0] = w.re;
                    out[1] = w.im;
                },
                t0,
                1.0,
                2,
                QUAD_TOL,
            );
            bracket += pref * Complex64::new(v[0], v[1]);
        }
        let gap = self.spectral_gap();
        let mut top = 2.0;
        while gap * top - (s.re - 1.0).max(0.0) * libm::log(top) < 55.0 {
            top *= 1.5;
        }
        let v = integrate(
            |t, out| {
                let w = ((s - 1.0) * libm::log(t)).exp() * self.heat_trace(t);
                out[0] = w.re;
                out[1] = w.im;
            },
            1.0,
            top,
            2,
            QUAD_TOL,
        );
        bracket += Complex64::new(v[0], v[1]);
        Ok(recip_gamma(s) * bracket)
    }

    /// Truncated eigen-sum `Σ_{|k|_∞ ≤ N} λ_k^{−s}` over retained modes.
    pub fn zeta_partial_sum(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for_each_mode(self.dim(), self.cutoff as i64, |k| {
            if self.is_retained(k) {
                acc += (-s * libm::log(self.eigenvalue(k))).exp();
            }
        });
        acc
    }

    fn green_sum(&self, z: Complex64, x: &[f64], y: &[f64], cutoff: u32) -> Complex64 {
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        let e = -(z + 1.0);
        let b = self.with_cutoff(cutoff);
        for_each_mode(self.dim(), cutoff as i64, |k| {
            if b.is_retained(k) {
                let phase = b.eigenfunction(k, &diff) * libm::sqrt(b.volume());
                acc += phase * (e * libm::log(b.eigenvalue(k))).exp();
            }
        });
        acc / self.volume()
    }

    /// Kernel of `A^{−(1+z)}` at `(x, y)`, truncated at the cutoff. On the
    /// diagonal the sum must converge: `2 Re(1+z) > n`, otherwise the values
    /// at the cutoff and its double are returned in the error.
    pub fn green_function(&self, z: Complex64, x: &[f64], y: &[f64]) -> Result<Complex64> {
        let n = self.dim();
        if x.len() != n || y.len() != n {
            return Err(Error::Domain(format!("points must have {n} coordinates")));
        }
        let g = self.green_sum(z, x, y, self.cutoff);
        if x == y && 2.0 * (1.0 + z.re) <= n as f64 {
            let g2 = self.green_sum(z, x, y, 2 * self.cutoff);
            return Err(Error::Divergent { cutoff: self.cutoff, at_cutoff: g.norm(), at_double: g2.norm() });
        }
        Ok(g)
    }

    /// `a(i, j, k) = ∫ φ_i φ_j φ_k dvol = V^{−1/2} δ_{i+j+k, 0}`.
    pub fn momentum_tensor(&self, i: &[i64], j: &[i64], k: &[i64]) -> Result<f64> {
        let n = self.dim();
        let c = self.cutoff as i64;
        for idx in [i, j, k] {
            if idx.len() != n || idx.iter().any(|x| x.abs() > c) {
                return Err(Error::Domain(format!("mode {idx:?} outside the cutoff {c}")));
            }
        }
        let conserved = (0..n).all(|a| i[a] + j[a] + k[a] == 0);
        Ok(if conserved { 1.0 / libm::sqrt(self.volume()) } else { 0.0 })
    }
}

fn axis_theta_excess(t: f64, l: f64) -> f64 {
    let q = libm::pow(2.0 * PI / l, 2.0);
    let mut acc = 0.0;
    let mut k = 1.0;
    loop {
        let term = libm::exp(-t * q * k * k);
        acc += term;
        if term < 1e-18 * acc.max(1e-300) || term == 0.0 {
            break;
        }
        k += 1.0;
    }
    2.0 * acc
}

fn axis_dual_excess(t: f64, l: f64) -> f64 {
    let q = l * l / (4.0 * t);
    let mut acc = 0.0;
    let mut w = 1.0;
    loop {
        let term = libm::exp(-q * w * w);
        acc += term;
        if term < 1e-18 * acc.max(1e-300) || term == 0.0 {
            break;
        }
        w += 1.0;
    }
    2.0 * acc
}

/// `Π(1 + e_i) − 1` without cancellation.
fn excess_product(es: impl Iterator<Item = f64>) -> f64 {
    let mut r = 0.0;
    for e in es {
        r = r + e + r * e;
    }
    r
}

/// Visit every `k ∈ ℤⁿ` with `|k|_∞ ≤ cutoff` in lexicographic order.
pub fn for_each_mode(dim: usize, cutoff: i64, mut f: impl FnMut(&[i64])) {
    let mut k = vec![-cutoff; dim];
    loop {
        f(&k);
        let mut a = dim;
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            if k[a] < cutoff {
                k[a] += 1;
                break;
            }
            k[a] = -cutoff;
        }
    }
}

/// Real orthonormal basis of `L²` on a circle of length `L`: index `0` is
/// the constant, `k > 0` is `√(2/L) cos(2πkx/L)`, `k < 0` is
/// `√(2/L) sin(2π|k|x/L)`. Overlaps use the periodic trapezoid rule, which is
/// exact for trigonometric polynomials below its node count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleRealBasis {
    pub length: f64,
}

impl CircleRealBasis {
    pub fn eval(&self, k: i64, x: f64) -> f64 {
        let l = self.length;
        if k == 0 {
            return 1.0 / libm::sqrt(l);
        }
        let arg = 2.0 * PI * k.unsigned_abs() as f64 * x / l;
        let amp = libm::sqrt(2.0 / l);
        if k > 0 {
            amp * libm::cos(arg)
        } else {
            amp * libm::sin(arg)
        }
    }

    fn trapezoid(&self, modes: &[i64]) -> f64 {
        let top: u64 = modes.iter().map(|k| k.unsigned_abs()).sum();
        let nodes = 2 * top as usize + 8;
        let h = self.length / nodes as f64;
        let mut acc = 0.0;
        for p in 0..nodes {
            let x = p as f64 * h;
            acc += modes.iter().map(|&k| self.eval(k, x)).product::<f64>();
        }
        acc * h
    }

    pub fn overlap(&self, i: i64, j: i64) -> f64 {
        self.trapezoid(&[i, j])
    }

    pub fn momentum_tensor(&self, i: i64, j: i64, k: i64) -> f64 {
        self.trapezoid(&[i, j, k])
    }
}
