//! Densities and conformally covariant operators on periodic grids.
//!
//! The base manifold is the unit torus `[0,1)ⁿ` sampled on `Nⁿ` points,
//! with conformally flat metrics `g = e^{2f}δ`. An `r`-density is stored
//! by its coefficient in the trivialization of a metric:
//! `φ = c·|g|^{r/2n}` with `|g| = e^{2nf}`.
//!
//! Operators that are self-adjoint for the weighted product
//! `⟨a, b⟩ = Σ a b e^{nf}` are diagonalized through their symmetric
//! conjugate `W^{1/2} X W^{−1/2}`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Largest dense operator dimension `Nⁿ` accepted.
pub const MAX_DENSE: usize = 4096;

/// Uniform periodic grid on the unit torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub dim: usize,
    pub points: usize,
}

impl Grid {
    pub fn new(dim: usize, points: usize) -> Result<Self> {
        if dim == 0 || points < 3 {
            return Err(Error::Domain(format!("grid needs dim ≥ 1 and ≥ 3 points per axis, got {dim}, {points}")));
        }
        if (0..dim).try_fold(1usize, |a, _| a.checked_mul(points)).is_none() {
            return Err(Error::Resource(format!("{points}^{dim} grid is too large")));
        }
        Ok(Grid { dim, points })
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.points as f64
    }

    /// Cell volume `hⁿ`.
    pub fn cell(&self) -> f64 {
        libm::pow(self.spacing(), self.dim as f64)
    }

    pub fn coords(&self, i: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim);
        let mut r = i;
        for _ in 0..self.dim {
            out.push((r % self.points) as f64 * self.spacing());
            r /= self.points;
        }
        out
    }

    /// Index of the neighbour of `i` one step along `axis` (`±1`).
    pub fn shift(&self, i: usize, axis: usize, step: isize) -> usize {
        let stride = self.points.pow(axis as u32);
        let c = (i / stride) % self.points;
        let nc = (c as isize + step).rem_euclid(self.points as isize) as usize;
        i - c * stride + nc * stride
    }

    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(&self.coords(i))).collect()
    }
}

/// Conformally flat metric `e^{2f}δ` on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalMetric {
    grid: Grid,
    f: Vec<f64>,
}

impl ConformalMetric {
    pub fn flat(grid: Grid) -> Self {
        ConformalMetric { grid, f: vec![0.0; grid.len()] }
    }

    pub fn new(grid: Grid, f: Vec<f64>) -> Result<Self> {
        if f.len() != grid.len() {
            return Err(Error::Domain(format!("conformal exponent has {} values for {} grid points", f.len(), grid.len())));
        }
        if f.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("conformal exponent must be finite".into()));
        }
        Ok(ConformalMetric { grid, f })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::new(grid, grid.sample(f))
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn exponent(&self) -> &[f64] {
        &self.f
    }

    pub fn is_flat(&self) -> bool {
        self.f.iter().all(|&x| x == 0.0)
    }

    /// `|g| = e^{2nf}` at every point.
    pub fn determinant(&self) -> Vec<f64> {
        let n = self.dim() as f64;
        self.f.iter().map(|&f| libm::exp(2.0 * n * f)).collect()
    }

    /// Riemannian volume of each cell, `e^{nf}hⁿ`.
    pub fn volume_weights(&self) -> Vec<f64> {
        let n = self.dim() as f64;
        let cell = self.grid.cell();
        self.f.iter().map(|&f| libm::exp(n * f) * cell).collect()
    }

    pub fn volume(&self) -> f64 {
        self.volume_weights().iter().sum()
    }

    /// `ḡ = e^{2h}g`.
    pub fn rescaled(&self, h: &[f64]) -> Result<Self> {
        if h.len() != self.f.len() {
            return Err(Error::Domain("rescaling exponent has the wrong length".into()));
        }
        Self::new(self.grid, self.f.iter().zip(h).map(|(a, b)| a + b).collect())
    }

    fn laplacian0(&self, u: &[f64]) -> Vec<f64> {
        let g = self.grid;
        let h2 = g.spacing() * g.spacing();
        (0..g.len())
            .map(|i| {
                (0..g.dim)
                    .map(|a| u[g.shift(i, a, 1)] + u[g.shift(i, a, -1)] - 2.0 * u[i])
                    .sum::<f64>()
                    / h2
            })
            .collect()
    }

    /// `R = −e^{−2f}[2(n−1)Δ₀f + (n−2)(n−1)|∇f|²]`, central differences.
    pub fn scalar_curvature(&self) -> Vec<f64> {
        let g = self.grid;
        let n = g.dim as f64;
        let lap = self.laplacian0(&self.f);
        let h = g.spacing();
        (0..g.len())
            .map(|i| {
                let grad2: f64 = (0..g.dim)
                    .map(|a| {
                        let d = (self.f[g.shift(i, a, 1)] - self.f[g.shift(i, a, -1)]) / (2.0 * h);
                        d * d
                    })
                    .sum();
                -libm::exp(-2.0 * self.f[i]) * (2.0 * (n - 1.0) * lap[i] + (n - 2.0) * (n - 1.0) * grad2)
            })
            .collect()
    }

    /// Nonzero entries `(row, column, value)` of `Δ_[g]`, rows in order.
    fn stencil(&self) -> Result<Vec<(usize, usize, f64)>> {
        let g = self.grid;
        let n = g.dim;
        if n < 2 {
            return Err(Error::Domain("the conformal Laplacian needs n ≥ 2".into()));
        }
        let nf = n as f64;
        let h2 = g.spacing() * g.spacing();
        let a: Vec<f64> = self.f.iter().map(|&f| libm::exp((nf - 2.0) * f)).collect();
        let curv = self.scalar_curvature();
        let shift = 0.25 * (nf - 2.0) / (nf - 1.0);
        let mut out = Vec::with_capacity(g.len() * (2 * n + 1));
        for i in 0..g.len() {
            let pre = libm::exp(-nf * self.f[i]) / h2;
            let mut diag = -shift * curv[i];
            for axis in 0..n {
                for step in [-1isize, 1] {
                    let j = g.shift(i, axis, step);
                    let w = 0.5 * (a[i] + a[j]) * pre;
                    out.push((i, j, w));
                    diag -= w;
                }
            }
            out.push((i, i, diag));
        }
        Ok(out)
    }

    /// `Δ_[g] u`.
    pub fn apply_conformal_laplacian(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.grid.len()];
        for (i, j, w) in self.stencil()? {
            out[i] += w * u[j];
        }
        Ok(out)
    }
}

/// An `r`-density stored by its coefficient in the trivialization of
/// `metric`.
#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    pub weight: f64,
    pub coeffs: Vec<f64>,
    pub metric: ConformalMetric,
}

impl Density {
    pub fn new(weight: f64, coeffs: Vec<f64>, metric: ConformalMetric) -> Result<Self> {
        if coeffs.len() != metric.grid.len() {
            return Err(Error::Domain(format!("{} coefficients on a {}-point grid", coeffs.len(), metric.grid.len())));
        }
        Ok(Density { weight, coeffs, metric })
    }

    /// The same density written in the trivialization of `other`.
    pub fn retrivialize(&self, other: &ConformalMetric) -> Result<Density> {
        if other.grid != self.metric.grid {
            return Err(Error::Domain("densities live on different grids".into()));
        }
        // c' = c (|g|/|g'|)^{r/2n} = c e^{r(f − f')}
        let r = self.weight;
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.metric.f.iter().zip(&other.f))
            .map(|(&c, (&f0, &f1))| c * libm::exp(r * (f0 - f1)))
            .collect();
        Ok(Density { weight: r, coeffs, metric: other.clone() })
    }

    /// Pointwise product; weights add.
    pub fn product(&self, other: &Density) -> Result<Density> {
        let other = other.retrivialize(&self.metric)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).collect();
        Ok(Density { weight: self.weight + other.weight, coeffs, metric: self.metric.clone() })
    }
}

/// `(∫|φ|^{n/r})^{r/n}`; weight zero gives the supremum.
pub fn density_norm(phi: &Density) -> Result<f64> {
    let r = phi.weight;
    if r < 0.0 {
        return Err(Error::Domain(format!("norm of a density of negative weight {r}")));
    }
    if r == 0.0 {
        return Ok(phi.coeffs.iter().fold(0.0, |m, c| m.max(libm::fabs(*c))));
    }
    let p = phi.metric.dim() as f64 / r;
    let s: f64 = phi
        .coeffs
        .iter()
        .zip(phi.metric.volume_weights())
        .map(|(c, w)| libm::pow(libm::fabs(*c), p) * w)
        .sum();
    Ok(libm::pow(s, 1.0 / p))
}

/// `∫ φψ` for two `n/2`-densities; needs no metric.
pub fn inner_product(phi: &Density, psi: &Density) -> Result<f64> {
    let half = phi.metric.dim() as f64 / 2.0;
    for d in [phi, psi] {
        if d.weight != half {
            return Err(Error::WeightMismatch { expected: half, found: d.weight });
        }
    }
    let psi = psi.retrivialize(&phi.metric)?;
    Ok(phi
        .coeffs
        .iter()
        .zip(&psi.coeffs)
        .zip(phi.metric.volume_weights())
        .map(|((a, b), w)| a * b * w)
        .sum())
}

/// Multiply the coefficient by `|g|^{(d₁−d₀)/2n}` and relabel the weight.
pub fn change_weight(phi: &Density, d1: f64) -> Density {
    let k = d1 - phi.weight;
    let coeffs = phi.coeffs.iter().zip(&phi.metric.f).map(|(&c, &f)| c * libm::exp(k * f)).collect();
    Density { weight: d1, coeffs, metric: phi.metric.clone() }
}

/// Dense `Δ_[g] = Δ_g − ¼(n−2)/(n−1)R`. The weighted form `W·Δ_[g]` is
/// checked for symmetry and symmetrized before converting back.
pub fn conformal_laplacian(gm: &ConformalMetric) -> Result<DMatrix<f64>> {
    let len = gm.grid.len();
    if len > MAX_DENSE {
        return Err(Error::Resource(format!("dense operator of size {len} exceeds {MAX_DENSE}")));
    }
    let w = gm.volume_weights();
    let mut wa: DMatrix<f64> = DMatrix::zeros(len, len);
    for (i, j, v) in gm.stencil()? {
        wa[(i, j)] += w[i] * v;
    }
    let asym = (&wa - wa.transpose()).amax();
    let scale = wa.amax().max(f64::MIN_POSITIVE);
    if asym > 1e-10 * scale {
        return Err(Error::Internal(format!("weighted Laplacian asymmetric by {asym:e}")));
    }
    let sym = (&wa + wa.transpose()) * 0.5;
    let mut a = sym;
    for i in 0..len {
        let inv = 1.0 / w[i];
        for j in 0..len {
            a[(i, j)] *= inv;
        }
    }
    Ok(a)
}

/// `∫ φ(−Δ_[g])φ dvol(g)` for a `(n−2)/2`-density.
pub fn yamabe_pairing(phi: &Density, gm: &ConformalMetric) -> Result<f64> {
    let n = gm.dim() as f64;
    let want = (n - 2.0) / 2.0;
    if phi.weight != want {
        return Err(Error::WeightMismatch { expected: want, found: phi.weight });
    }
    let c = phi.retrivialize(gm)?.coeffs;
    let lap = gm.apply_conformal_laplacian(&c)?;
    Ok(-c.iter().zip(&lap).zip(gm.volume_weights()).map(|((a, b), w)| a * b * w).sum::<f64>())
}

/// `Y_g = |g|^{−1/2n}(−Δ_[g] + m²)|g|^{−1/2n}` held through its symmetric
/// conjugate `Ŷ = W^{1/2} Y W^{−1/2}` with `W = e^{nf}`.
#[derive(Clone, Debug)]
pub struct YOperator {
    symmetric: DMatrix<f64>,
    w_half: Vec<f64>,
    /// `|g|^{1/2n} = e^{f}`.
    g_root: Vec<f64>,
}

impl YOperator {
    pub fn new(gm: &ConformalMetric, mass: f64) -> Result<Self> {
        if !(mass >= 0.0) {
            return Err(Error::Domain(format!("mass must be non-negative, got {mass}")));
        }
        let a = conformal_laplacian(gm)?;
        let n = gm.dim() as f64;
        let len = gm.grid.len();
        let w_half: Vec<f64> = gm.f.iter().map(|&f| libm::exp(0.5 * n * f)).collect();
        let g_root: Vec<f64> = gm.f.iter().map(|&f| libm::exp(f)).collect();
        let mut y = DMatrix::zeros(len, len);
        for i in 0..len {
            for j in 0..len {
                let mut v = -a[(i, j)];
                if i == j {
                    v += mass * mass;
                }
                y[(i, j)] = w_half[i] / g_root[i] * v / g_root[j] / w_half[j];
            }
        }
        let sym = (&y + y.transpose()) * 0.5;
        Ok(YOperator { symmetric: sym, w_half, g_root })
    }

    /// `Ŷ`, symmetric.
    pub fn symmetric(&self) -> &DMatrix<f64> {
        &self.symmetric
    }

    /// `Y` itself.
    pub fn matrix(&self) -> DMatrix<f64> {
        self.unconjugate(&self.symmetric)
    }

    fn unconjugate(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let len = m.nrows();
        DMatrix::from_fn(len, len, |i, j| m[(i, j)] / self.w_half[i] * self.w_half[j])
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(self.symmetric.clone()).eigenvalues.iter().cloned().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    fn positive_eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
        let e = SymmetricEigen::new(m.clone());
        let min = e.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = e.eigenvalues.amax();
        if !(min > 1e-12 * max.max(1.0)) {
            return Err(Error::Spectrum(format!("smallest eigenvalue {min:e} is not positive")));
        }
        // ‖A V − V Λ‖ guards against a solver that stopped early
        let mut av = m * &e.eigenvectors;
        for (k, mut col) in av.column_iter_mut().enumerate() {
            col.axpy(-e.eigenvalues[k], &e.eigenvectors.column(k), 1.0);
        }
        let residual = av.amax();
        if !(residual <= 1e-10 * max) {
            return Err(Error::Spectrum(format!("eigen-decomposition residual {residual:e} at scale {max:e}")));
        }
        Ok(e)
    }

    /// `|g|^{1/2n} (D^{−1} Y D^{−1})^{1+z} |g|^{1/2n}` with `D = diag(d)`
    /// folded on both sides, `D·…·D` restored outside the power.
    fn tilde_with(&self, d: &[f64], z: f64) -> Result<DMatrix<f64>> {
        let len = self.symmetric.nrows();
        let inner = DMatrix::from_fn(len, len, |i, j| self.symmetric[(i, j)] / (d[i] * d[j]));
        let e = Self::positive_eigen(&inner)?;
        let p = spectral_map(&e, |l| libm::pow(l, 1.0 + z));
        let y = self.unconjugate(&p);
        Ok(DMatrix::from_fn(len, len, |i, j| self.g_root[i] * d[i] * y[(i, j)] * d[j] * self.g_root[j]))
    }

    /// `Ỹ_g(z) = |g|^{1/2n} Y_g^{1+z} |g|^{1/2n}`.
    pub fn tilde(&self, z: f64) -> Result<DMatrix<f64>> {
        self.tilde_with(&vec![1.0; self.w_half.len()], z)
    }

    /// Operator coefficients `b_i` of `Ỹ_g(z) = Σ b_i zⁱ` for `i ≤ order`,
    /// from `Y^{1+z} = Y Σ (ln Y)ⁱ zⁱ/i!`.
    pub fn tilde_series(&self, order: usize) -> Result<Vec<DMatrix<f64>>> {
        let e = Self::positive_eigen(&self.symmetric)?;
        let len = self.symmetric.nrows();
        let mut out = Vec::with_capacity(order + 1);
        let mut fact = 1.0;
        for i in 0..=order {
            if i > 0 {
                fact *= i as f64;
            }
            let p = spectral_map(&e, |l| l * libm::pow(libm::log(l), i as f64) / fact);
            let y = self.unconjugate(&p);
            out.push(DMatrix::from_fn(len, len, |a, b| self.g_root[a] * y[(a, b)] * self.g_root[b]));
        }
        Ok(out)
    }
}

/// `V φ(Λ) Vᵀ`.
fn spectral_map(e: &SymmetricEigen<f64, nalgebra::Dyn>, phi: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let mut scaled = e.eigenvectors.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phi(e.eigenvalues[k]);
    }
    scaled * e.eigenvectors.transpose()
}

pub fn y_operator(gm: &ConformalMetric, mass: f64) -> Result<YOperator> {
    YOperator::new(gm, mass)
}

pub fn y_tilde(gm: &ConformalMetric, mass: f64, z: f64) -> Result<DMatrix<f64>> {
    YOperator::new(gm, mass)?.tilde(z)
}

/// Largest singular value by power iteration on `MᵀM`.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    let n = m.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.001 * (i % 7) as f64);
    v /= v.norm();
    let mut sigma = 0.0;
    for _ in 0..300 {
        let w = m.transpose() * (m * &v);
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = libm::sqrt(norm);
        v = w / norm;
        if libm::fabs(next - sigma) <= 1e-13 * next {
            sigma = next;
            break;
        }
        sigma = next;
    }
    sigma
}

/// Comparison of `Ỹ_ḡ(z)` for `ḡ = e^{2f}g` with `e^{−2fz}Ỹ_g(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionReport {
    pub dim: usize,
    pub points: usize,
    pub z: f64,
    pub mass: f64,
    pub constant_f: bool,
    /// `‖LHS − RHS‖ / ‖RHS‖` in the operator norm.
    pub deviation: f64,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
}

/// LHS `|g|^{1/2n} u (u^{−1}Y_g u^{−1})^{1+z} u |g|^{1/2n}` with `u = e^f`,
/// RHS the pointwise multiplier `e^{−2fz}` applied to `Ỹ_g(z)`.
pub fn conformal_expansion_check(base: &ConformalMetric, f: &[f64], mass: f64, z: f64) -> Result<ExpansionReport> {
    if f.len() != base.grid.len() {
        return Err(Error::Domain("conformal exponent has the wrong length".into()));
    }
    let y = YOperator::new(base, mass)?;
    let u: Vec<f64> = f.iter().map(|&x| libm::exp(x)).collect();
    let lhs = y.tilde_with(&u, z)?;
    let t = y.tilde(z)?;
    let len = t.nrows();
    let rhs = DMatrix::from_fn(len, len, |i, j| libm::exp(-2.0 * f[i] * z) * t[(i, j)]);
    let rhs_norm = operator_norm(&rhs);
    let deviation = operator_norm(&(&lhs - &rhs)) / rhs_norm.max(f64::MIN_POSITIVE);
    Ok(ExpansionReport {
        dim: base.dim(),
        points: base.grid.points,
        z,
        mass,
        constant_f: f.iter().all(|&x| x == f[0]),
        deviation,
        lhs_norm: operator_norm(&lhs),
        rhs_norm,
    })
}

/// The constant-`f` identity in any dimension, mode by mode: on the flat
/// torus `Y_g` is diagonal in Fourier modes, so both sides reduce to
/// eigenvalue formulas. Returns the largest relative deviation.
pub fn constant_expansion_check_spectral(dim: usize, points: usize, c: f64, mass: f64, z: f64) -> Result<f64> {
    let grid = Grid::new(dim, points)?;
    if dim < 2 {
        return Err(Error::Domain("the conformal Laplacian needs n ≥ 2".into()));
    }
    let h = grid.spacing();
    // 1-D symbols of the second difference
    let sym: Vec<f64> = (0..points).map(|k| 4.0 / (h * h) * libm::pow(libm::sin(PI * k as f64 * h), 2.0)).collect();
    let u = libm::exp(c);
    let mut worst: f64 = 0.0;
    let mut idx = vec![0usize; dim];
    loop {
        let y = idx.iter().map(|&k| sym[k]).sum::<f64>() + mass * mass;
        if !(y > 0.0) {
            return Err(Error::Spectrum("zero mode with zero mass".into()));
        }
        let lhs = u * libm::pow(y / (u * u), 1.0 + z) * u;
        let rhs = libm::exp(-2.0 * c * z) * libm::pow(y, 1.0 + z);
        worst = worst.max(libm::fabs(lhs - rhs) / libm::fabs(rhs));
        let mut a = 0;
        loop {
            if a == dim {
                return Ok(worst);
            }
            idx[a] += 1;
            if idx[a] < points {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}
