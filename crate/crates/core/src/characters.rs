//! Characters of the Hopf algebra with values in Laurent series, their
//! convolution group, and the Birkhoff decomposition by minimal subtraction.

use alloc::collections::BTreeMap;
use alloc::format;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::graphs::GraphLabel;
use crate::hopf::{HopfAlgebra, HopfPolynomial, Monomial, Rational};
use crate::laurent::{LaurentSeries, DEFAULT_TERMS};

/// Truncation order used when none is given: coefficients through `z^7`.
pub const DEFAULT_ORDER: i32 = DEFAULT_TERMS as i32 - 1;

/// A multiplicative map from ℋ to Laurent series, stored by its values on
/// generators. Every value is truncated to the character's order.
#[derive(Clone, Debug, PartialEq)]
pub struct Character {
    values: BTreeMap<GraphLabel, LaurentSeries>,
    order: i32,
    pole_bound: bool,
}

fn rational_to_complex(c: Rational) -> Complex64 {
    let re = c.numer().to_f64().unwrap_or(f64::NAN) / c.denom().to_f64().unwrap_or(f64::NAN);
    Complex64::new(re, 0.0)
}

impl Character {
    /// Empty character with truncation order `order`. Inserted values must
    /// have pole order at most the loop number of their generator.
    pub fn new(order: i32) -> Self {
        Character { values: BTreeMap::new(), order, pole_bound: true }
    }

    /// Like [`Character::new`] but without the pole-order bound.
    pub fn unbounded(order: i32) -> Self {
        Character { values: BTreeMap::new(), order, pole_bound: false }
    }

    /// The counit character: zero on every generator of `h`.
    pub fn epsilon(h: &HopfAlgebra, order: i32) -> Self {
        let mut c = Self::new(order);
        for l in h.labels() {
            c.values.insert(l.clone(), LaurentSeries::zero_through(order));
        }
        c
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn insert(&mut self, label: GraphLabel, value: LaurentSeries) -> Result<()> {
        if self.pole_bound && value.pole_order() > label.loops() {
            return Err(Error::Domain(format!(
                "value on {label} has a pole of order {} above its loop number {}",
                value.pole_order(),
                label.loops()
            )));
        }
        self.values.insert(label, value.truncate(self.order));
        Ok(())
    }

    pub fn with(mut self, label: GraphLabel, value: LaurentSeries) -> Result<Self> {
        self.insert(label, value)?;
        Ok(self)
    }

    pub fn labels(&self) -> impl Iterator<Item = &GraphLabel> {
        self.values.keys()
    }

    pub fn values(&self) -> impl Iterator<Item = (&GraphLabel, &LaurentSeries)> {
        self.values.iter()
    }

    pub fn get(&self, label: &GraphLabel) -> Result<&LaurentSeries> {
        self.values
            .get(label)
            .ok_or_else(|| Error::UnknownGenerator(format!("{label}")))
    }

    pub fn evaluate_monomial(&self, m: &Monomial) -> Result<LaurentSeries> {
        let mut v = LaurentSeries::one();
        for l in m.labels() {
            v = &v * self.get(l)?;
        }
        Ok(v)
    }

    /// Multiplicative, linear extension to polynomials.
    pub fn evaluate(&self, p: &HopfPolynomial) -> Result<LaurentSeries> {
        let mut acc = LaurentSeries::zero();
        for (m, &c) in p.terms() {
            acc = &acc + &self.evaluate_monomial(m)?.scale(rational_to_complex(c));
        }
        Ok(acc)
    }

    fn check_aligned(&self, other: &Character) -> Result<()> {
        if self.order != other.order {
            return Err(Error::Alignment {
                left: (self.order + 1).max(0) as usize,
                right: (other.order + 1).max(0) as usize,
            });
        }
        Ok(())
    }

    /// `(a⋆b)(x) = (a⊗b)Δx` on every generator of `h`.
    pub fn convolve(&self, other: &Character, h: &HopfAlgebra) -> Result<Character> {
        self.check_aligned(other)?;
        let mut out = Character::unbounded(self.order);
        for l in h.labels() {
            let mut v = self.get(l)? + other.get(l)?;
            for t in h.proper_terms(l)? {
                let term = &self.evaluate_monomial(&t.subgraph)? * other.get(&t.quotient)?;
                v = &v + &term.scale(Complex64::new(t.count as f64, 0.0));
            }
            out.values.insert(l.clone(), v.truncate(self.order));
        }
        Ok(out)
    }

    /// `a∘S`, the inverse for the convolution product.
    pub fn star_inverse(&self, h: &HopfAlgebra) -> Result<Character> {
        let mut out = Character::unbounded(self.order);
        for l in h.labels() {
            let s = h.antipode(&HopfPolynomial::generator(l.clone()))?;
            out.values.insert(l.clone(), self.evaluate(&s)?.truncate(self.order));
        }
        Ok(out)
    }

    /// Largest coefficient difference over shared generators, through
    /// exponent `through`.
    pub fn max_deviation(&self, other: &Character, through: i32) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (l, v) in &self.values {
            worst = worst.max(v.max_deviation(other.get(l)?, through));
        }
        Ok(worst)
    }

    /// Drop the pole-order bound (used for derived characters).
    pub fn into_unbounded(mut self) -> Self {
        self.pole_bound = false;
        self
    }

    pub(crate) fn map_values(&self, f: impl Fn(&GraphLabel, &LaurentSeries) -> Result<LaurentSeries>) -> Result<Self> {
        let mut out = Character { values: BTreeMap::new(), order: self.order, pole_bound: self.pole_bound };
        for (l, v) in &self.values {
            out.values.insert(l.clone(), f(l, v)?.truncate(self.order));
        }
        Ok(out)
    }
}

/// Result of the Birkhoff decomposition `γ = γ₋^{⋆−1} ⋆ γ₊`.
#[derive(Clone, Debug, PartialEq)]
pub struct Birkhoff {
    /// Counterterms: purely polar on every generator.
    pub minus: Character,
    /// Renormalized values: pole-free on every generator.
    pub plus: Character,
}

impl Birkhoff {
    /// `γ₊(x_Γ)` at `z = 0`.
    pub fn renormalized_value(&self, label: &GraphLabel) -> Result<Complex64> {
        self.plus.get(label)?.eval_at_zero()
    }
}

/// Bogoliubov recursion with minimal subtraction. Generators are visited in
/// ascending label order, so every subgraph and quotient is done first.
pub fn birkhoff(gamma: &Character, h: &HopfAlgebra) -> Result<Birkhoff> {
    let mut minus = Character::unbounded(gamma.order);
    let mut plus = Character::unbounded(gamma.order);
    let closure = |e: Error| match e {
        Error::UnknownGenerator(l) => Error::IncompleteUniverse(format!("character has no value on {l}")),
        other => other,
    };
    for l in h.labels() {
        let mut bracket = gamma.get(l).map_err(closure)?.clone();
        for t in h.proper_terms(l)? {
            let sub = minus.evaluate_monomial(&t.subgraph).map_err(closure)?;
            let quo = gamma.get(&t.quotient).map_err(closure)?;
            bracket = &bracket + &(&sub * quo).scale(Complex64::new(t.count as f64, 0.0));
        }
        let (polar, regular) = bracket.split();
        minus.values.insert(l.clone(), -&polar);
        plus.values.insert(l.clone(), regular);
    }
    Ok(Birkhoff { minus, plus })
}
