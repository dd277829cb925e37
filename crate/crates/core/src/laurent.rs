//! Truncated formal Laurent series in the regulator `z`.
//!
//! A series stores the coefficients of `z^lowest ..= z^order`. The order is
//! the highest exponent whose coefficient is known; everything above it is
//! `O(z^(order+1))`. A series with no order is *exact*: it terminates, which
//! is the case for polar parts, constants and other finite sums. Arithmetic
//! propagates the known order the usual way, so multiplying by a pole
//! lowers the order of the result.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Number of coefficients kept above the lowest exponent unless stated otherwise.
pub const DEFAULT_TERMS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries {
    lowest: i32,
    coeffs: Vec<Complex64>,
    order: Option<i32>,
}

fn min_order(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

impl LaurentSeries {
    /// Truncated series `Σ coeffs[i] z^(lowest+i) + O(z^(lowest+len))`.
    pub fn new(lowest: i32, coeffs: Vec<Complex64>) -> Self {
        let order = lowest + coeffs.len() as i32 - 1;
        Self::with_order(lowest, coeffs, Some(order))
    }

    /// Real-coefficient convenience form of [`LaurentSeries::new`].
    pub fn from_real(lowest: i32, coeffs: &[f64]) -> Self {
        Self::new(lowest, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Terminating series; no truncation error.
    pub fn exact(lowest: i32, coeffs: Vec<Complex64>) -> Self {
        Self::with_order(lowest, coeffs, None)
    }

    pub fn exact_real(lowest: i32, coeffs: &[f64]) -> Self {
        Self::exact(lowest, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Series known through `z^order` (`None`: exact). Coefficients beyond
    /// `order` are dropped, missing ones are zero.
    pub fn with_order(lowest: i32, mut coeffs: Vec<Complex64>, order: Option<i32>) -> Self {
        if let Some(o) = order {
            let keep = (o - lowest + 1).max(0) as usize;
            coeffs.truncate(keep);
        }
        let mut s = LaurentSeries { lowest, coeffs, order };
        s.normalize();
        s
    }

    pub fn zero() -> Self {
        Self::exact(0, Vec::new())
    }

    /// `O(z^(order+1))`.
    pub fn zero_through(order: i32) -> Self {
        Self::with_order(order + 1, Vec::new(), Some(order))
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::exact(0, vec![c])
    }

    pub fn monomial(c: Complex64, exponent: i32) -> Self {
        Self::exact(exponent, vec![c])
    }

    /// `exp(a z)` through `z^order`.
    pub fn exp_linear(a: Complex64, order: i32) -> Self {
        let mut coeffs = Vec::with_capacity(order.max(-1) as usize + 1);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 0..=order {
            coeffs.push(term);
            term = term * a / (k + 1) as f64;
        }
        Self::with_order(0, coeffs, Some(order))
    }

    /// The scale action `t^(zL) = exp(z L ln t)` on a loop-`L` generator,
    /// through `z^order`.
    pub fn scale_factor(t: f64, loops: u32, order: i32) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(alloc::format!("scale must be positive, got {t}")));
        }
        Ok(Self::exp_linear(Complex64::new(loops as f64 * libm::log(t), 0.0), order))
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lowest += lead as i32;
        }
        if self.order.is_none() {
            while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                self.coeffs.pop();
            }
        }
        if self.coeffs.is_empty() {
            self.lowest = match self.order {
                Some(o) => o + 1,
                None => 0,
            };
        }
    }

    /// Lowest exponent with a nonzero coefficient (for the zero series, one
    /// past the known order).
    pub fn lowest(&self) -> i32 {
        self.lowest
    }

    /// Highest known exponent; `None` for exact series.
    pub fn order(&self) -> Option<i32> {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Stored coefficients, starting at [`LaurentSeries::lowest`].
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Highest exponent with a stored coefficient, or the known order.
    pub fn top(&self) -> i32 {
        match self.order {
            Some(o) => o,
            None => self.lowest + self.coeffs.len() as i32 - 1,
        }
    }

    pub fn pole_order(&self) -> u32 {
        if self.is_zero() || self.lowest >= 0 {
            0
        } else {
            (-self.lowest) as u32
        }
    }

    /// Coefficient of `z^k`; an error if `k` lies beyond the known order.
    pub fn coeff(&self, k: i32) -> Result<Complex64> {
        if let Some(o) = self.order {
            if k > o {
                return Err(Error::Precision { requested: k, known: o });
            }
        }
        Ok(self.coeff_or_zero(k))
    }

    /// Coefficient of `z^k`, zero outside the stored range.
    pub fn coeff_or_zero(&self, k: i32) -> Complex64 {
        if k < self.lowest {
            return Complex64::zero();
        }
        self.coeffs.get((k - self.lowest) as usize).copied().unwrap_or_else(Complex64::zero)
    }

    /// Drop everything above `z^order`.
    pub fn truncate(&self, order: i32) -> Self {
        let order = min_order(self.order, Some(order));
        Self::with_order(self.lowest, self.coeffs.clone(), order)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::with_order(self.lowest, self.coeffs.iter().map(|&x| x * c).collect(), self.order)
    }

    /// Substitute `z -> factor * z`.
    pub fn rescale_variable(&self, factor: Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * factor.powi(self.lowest + i as i32))
            .collect();
        Self::with_order(self.lowest, coeffs, self.order)
    }

    /// Split into the polar part (strictly negative powers) and the regular part.
    pub fn split(&self) -> (Self, Self) {
        let minus_coeffs: Vec<Complex64> = (self.lowest..0).map(|k| self.coeff_or_zero(k)).collect();
        let minus_order = match self.order {
            Some(o) if o < -1 => Some(o),
            _ => None,
        };
        let minus = Self::with_order(self.lowest.min(0), minus_coeffs, minus_order);
        let start = self.lowest.max(0);
        let plus_coeffs: Vec<Complex64> = (start..=self.top()).map(|k| self.coeff_or_zero(k)).collect();
        let plus = Self::with_order(start, plus_coeffs, self.order);
        (minus, plus)
    }

    pub fn polar_part(&self) -> Self {
        self.split().0
    }

    pub fn regular_part(&self) -> Self {
        self.split().1
    }

    /// Constant coefficient of a pole-free series.
    pub fn eval_at_zero(&self) -> Result<Complex64> {
        let poles = self.pole_order();
        if poles > 0 {
            return Err(Error::Pole { order: poles });
        }
        self.coeff(0)
    }

    /// Sum of the known terms at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * z.powi(self.lowest + i as i32))
            .sum()
    }

    /// Multiplicative inverse. Exact series with more than one term are
    /// expanded to [`DEFAULT_TERMS`] coefficients.
    pub fn invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let v = self.lowest;
        if self.order.is_none() && self.coeffs.len() == 1 {
            return Ok(Self::monomial(Complex64::new(1.0, 0.0) / self.coeffs[0], -v));
        }
        let terms = match self.order {
            Some(o) => (o - v + 1) as usize,
            None => DEFAULT_TERMS,
        };
        let u = &self.coeffs;
        let u0_inv = Complex64::new(1.0, 0.0) / u[0];
        let mut b = Vec::with_capacity(terms);
        for k in 0..terms {
            if k == 0 {
                b.push(u0_inv);
                continue;
            }
            let mut acc = Complex64::zero();
            for j in 1..=k.min(u.len() - 1) {
                acc += u[j] * b[k - j];
            }
            b.push(-acc * u0_inv);
        }
        Ok(Self::with_order(-v, b, Some(-v + terms as i32 - 1)))
    }

    /// Largest coefficient difference over exponents up to `through`
    /// (capped at the known orders of both series).
    pub fn max_deviation(&self, other: &Self, through: i32) -> f64 {
        let top = min_order(min_order(self.order, other.order), Some(through)).unwrap_or(through);
        let bottom = self.lowest.min(other.lowest);
        (bottom..=top)
            .map(|k| (self.coeff_or_zero(k) - other.coeff_or_zero(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;

    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        let order = min_order(self.order, rhs.order);
        let lo = self.lowest.min(rhs.lowest);
        let hi = match order {
            Some(o) => o,
            None => self.top().max(rhs.top()),
        };
        let coeffs = (lo..=hi)
            .map(|k| self.coeff_or_zero(k) + rhs.coeff_or_zero(k))
            .collect();
        LaurentSeries::with_order(lo, coeffs, order)
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;

    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self + &(-rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;

    fn neg(self) -> LaurentSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;

    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        let (va, vb) = (self.lowest, rhs.lowest);
        let order = min_order(self.order.map(|o| o + vb), rhs.order.map(|o| o + va));
        if self.is_zero() || rhs.is_zero() {
            return LaurentSeries::with_order(va + vb, Vec::new(), order);
        }
        let lo = va + vb;
        let full = self.coeffs.len() + rhs.coeffs.len() - 1;
        let len = match order {
            Some(o) => ((o - lo + 1).max(0) as usize).min(full),
            None => full,
        };
        let mut coeffs = vec![Complex64::zero(); len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        LaurentSeries::with_order(lo, coeffs, order)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentSeries {
            type Output = LaurentSeries;
            fn $m(self, rhs: LaurentSeries) -> LaurentSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        -&self
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let k = self.lowest + i as i32;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            if k != 0 {
                write!(f, "*z^{k}")?;
            }
        }
        match self.order {
            Some(o) if first => write!(f, "O(z^{})", o + 1),
            Some(o) => write!(f, " + O(z^{})", o + 1),
            None if first => write!(f, "0"),
            None => Ok(()),
        }
    }
}
