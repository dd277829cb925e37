//! Special functions and quadrature used by the spectral layer.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// Bernoulli numbers `B_2, B_4, …, B_20`.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Digamma function for real `x > 0`.
pub fn digamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    let mut series = 0.0;
    let mut p = x2;
    for (k, b) in BERNOULLI.iter().enumerate().take(8) {
        series += b / (2.0 * (k + 1) as f64) * p;
        p *= x2;
    }
    acc + libm::log(x) - 0.5 / x - series
}

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (k+a)^{−s}` for real `s > 1`, `a > 0`.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    const N: usize = 12;
    let mut sum = 0.0;
    for k in 0..N {
        sum += libm::pow(a + k as f64, -s);
    }
    let x = a + N as f64;
    sum += libm::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * libm::pow(x, -s);
    // Euler–Maclaurin tail: Σ B_2j/(2j)! s(s+1)…(s+2j−2) x^{−s−2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut xp = libm::pow(x, -s - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        let term = b / fact * rising * xp;
        sum += term;
        if libm::fabs(term) < 1e-17 * libm::fabs(sum) {
            break;
        }
        let k = 2 * j as u32 + 2;
        rising *= (s + k as f64 - 1.0) * (s + k as f64);
        fact *= (k + 1) as f64 * (k + 2) as f64;
        xp /= x * x;
    }
    sum
}

/// Riemann zeta for real `s > 1`.
pub fn riemann_zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}

/// `exp` of a truncated power series `Σ a_k ε^k`.
pub fn exp_series(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let mut b = vec![0.0; n];
    b[0] = libm::exp(a[0]);
    for m in 1..n {
        let mut acc = 0.0;
        for k in 1..=m {
            acc += k as f64 * a[k] * b[m - k];
        }
        b[m] = acc / m as f64;
    }
    b
}

/// Product of two truncated power series, keeping `len` terms.
pub fn mul_series(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut c = vec![0.0; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        for (j, &y) in b.iter().enumerate().take(len - i) {
            c[i + j] += x * y;
        }
    }
    c
}

/// Taylor coefficients of `1/Γ(s0 + ε)` in `ε`, `len` terms, real `s0`.
pub fn recip_gamma_series(s0: f64, len: usize) -> Vec<f64> {
    let shift = if s0 < 1.0 { libm::ceil(1.0 - s0) as usize } else { 0 };
    let w = s0 + shift as f64;
    let mut log = vec![0.0; len];
    if len > 0 {
        log[0] = -libm::lgamma(w);
    }
    if len > 1 {
        log[1] = -digamma(w);
    }
    for (k, c) in log.iter_mut().enumerate().skip(2) {
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        *c = sign * hurwitz_zeta(k as f64, w) / k as f64;
    }
    let mut out = exp_series(&log);
    for i in 0..shift {
        let factor = [s0 + i as f64, 1.0];
        out = mul_series(&out, &factor, len);
    }
    out
}

const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `1/Γ(s)` for complex `s` (entire; zero at the non-positive integers).
pub fn recip_gamma(s: Complex64) -> Complex64 {
    if s.im == 0.0 && s.re <= 0.0 && s.re == libm::floor(s.re) {
        return Complex64::new(0.0, 0.0);
    }
    if s.re < 0.5 {
        // reflection: 1/Γ(s) = Γ(1−s) sin(πs)/π
        let one = Complex64::new(1.0, 0.0);
        return (s * PI).sin() / (PI * recip_gamma(one - s));
    }
    let z = s - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + 7.5;
    let gamma = libm::sqrt(2.0 * PI) * t.powc(z + 0.5) * (-t).exp() * x;
    1.0 / gamma
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_KRONROD: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const GK_GAUSS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &mut dyn FnMut(f64, &mut [f64]), a: f64, b: f64, dim: usize, buf: &mut [f64]) -> (Vec<f64>, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    for i in 0..8 {
        let xs: &[f64] = if i == 7 { &[0.0] } else { &[-1.0, 1.0] };
        for &sgn in xs {
            f(c + sgn * h * GK_NODES[i], buf);
            for d in 0..dim {
                k[d] += GK_KRONROD[i] * buf[d];
                if i % 2 == 1 {
                    g[d] += GK_GAUSS[i / 2] * buf[d];
                }
            }
        }
    }
    let mut err: f64 = 0.0;
    for d in 0..dim {
        k[d] *= h;
        g[d] *= h;
        err = err.max(libm::fabs(k[d] - g[d]));
    }
    (k, err)
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of a vector-valued
/// integrand. `f(x, out)` writes the `dim` components at `x`. Refinement
/// stops once the summed error estimate is below `tol` in absolute terms or
/// relative to the largest component, or after a fixed interval budget.
pub fn integrate(mut f: impl FnMut(f64, &mut [f64]), a: f64, b: f64, dim: usize, tol: f64) -> Vec<f64> {
    const BUDGET: usize = 4000;
    let mut buf = vec![0.0; dim];
    let mut heap = BinaryHeap::new();
    let (v, err) = gk15(&mut f, a, b, dim, &mut buf);
    let mut total = v.clone();
    let mut total_err = err;
    heap.push(Piece { err, lo: a, hi: b, v });
    while heap.len() < BUDGET {
        let scale = total.iter().fold(0.0_f64, |m, x| m.max(libm::fabs(*x)));
        if total_err <= tol.max(tol * scale) {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        let (v1, e1) = gk15(&mut f, worst.lo, mid, dim, &mut buf);
        let (v2, e2) = gk15(&mut f, mid, worst.hi, dim, &mut buf);
        for d in 0..dim {
            total[d] += v1[d] + v2[d] - worst.v[d];
        }
        total_err += e1 + e2 - worst.err;
        heap.push(Piece { err: e1, lo: worst.lo, hi: mid, v: v1 });
        heap.push(Piece { err: e2, lo: mid, hi: worst.hi, v: v2 });
    }
    total
}

struct Piece {
    err: f64,
    lo: f64,
    hi: f64,
    v: Vec<f64>,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err).is_eq()
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}
