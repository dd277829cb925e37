use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::graphs::GraphLabel;

pub type Rational = num_rational::Ratio<i128>;

/// A commutative monomial: sorted multiset of generator labels. The empty
/// monomial is the unit `1 = x_∅`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<GraphLabel>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn generator(label: GraphLabel) -> Self {
        Monomial(alloc::vec![label])
    }

    pub fn from_labels(mut labels: Vec<GraphLabel>) -> Self {
        labels.sort();
        Monomial(labels)
    }

    pub fn labels(&self) -> &[GraphLabel] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Total loop number.
    pub fn loops(&self) -> u32 {
        self.0.iter().map(GraphLabel::loops).sum()
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            if self.0[i] <= other.0[j] {
                v.push(self.0[i].clone());
                i += 1;
            } else {
                v.push(other.0[j].clone());
                j += 1;
            }
        }
        v.extend_from_slice(&self.0[i..]);
        v.extend_from_slice(&other.0[j..]);
        Monomial(v)
    }

    /// Factors grouped with their powers.
    pub fn powers(&self) -> Vec<(&GraphLabel, u32)> {
        let mut out: Vec<(&GraphLabel, u32)> = Vec::new();
        for l in &self.0 {
            match out.last_mut() {
                Some((last, k)) if *last == l => *k += 1,
                _ => out.push((l, 1)),
            }
        }
        out
    }

    pub fn render(&self, name: &dyn Fn(&GraphLabel) -> String) -> String {
        if self.is_one() {
            return "1".into();
        }
        let parts: Vec<String> = self
            .powers()
            .into_iter()
            .map(|(l, k)| {
                if k == 1 {
                    format!("x[{}]", name(l))
                } else {
                    format!("x[{}]^{k}", name(l))
                }
            })
            .collect();
        parts.join("*")
    }
}

fn insert<K: Ord>(map: &mut BTreeMap<K, Rational>, key: K, c: Rational) {
    if c.is_zero() {
        return;
    }
    *map.entry(key).or_insert_with(Rational::zero) += c;
}

fn prune<K: Ord>(map: &mut BTreeMap<K, Rational>) {
    map.retain(|_, c| !c.is_zero());
}

/// Element of the polynomial algebra on generator labels, with exact
/// rational coefficients. No zero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HopfPolynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl HopfPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(Monomial::one(), Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn generator(label: GraphLabel) -> Self {
        Self::term(Monomial::generator(label), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        insert(&mut self.terms, m, c);
        prune(&mut self.terms);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).copied().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: Rational) -> Self {
        let mut p = Self::zero();
        for (m, &k) in &self.terms {
            p.add_term(m.clone(), k * c);
        }
        p
    }

    /// Split by the total loop number of each monomial.
    pub fn loop_grade(&self) -> BTreeMap<u32, HopfPolynomial> {
        let mut out: BTreeMap<u32, HopfPolynomial> = BTreeMap::new();
        for (m, &c) in &self.terms {
            out.entry(m.loops()).or_default().add_term(m.clone(), c);
        }
        out
    }

    /// Linear part: generators with their coefficients. `None` if some
    /// monomial is not a single generator.
    pub fn as_linear(&self) -> Option<Vec<(GraphLabel, Rational)>> {
        self.terms
            .iter()
            .map(|(m, &c)| (m.degree() == 1).then(|| (m.labels()[0].clone(), c)))
            .collect()
    }

    /// Render as text, e.g. `x[B]^2 - x[G2]`.
    pub fn render(&self, name: &dyn Fn(&GraphLabel) -> String) -> String {
        render_terms(self.terms.iter().map(|(m, c)| (m.render(name), *c)))
    }
}

fn render_terms(terms: impl Iterator<Item = (String, Rational)>) -> String {
    let mut s = String::new();
    for (i, (body, c)) in terms.enumerate() {
        let neg = c < Rational::zero();
        let a = if neg { -c } else { c };
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if body == "1" {
            s.push_str(&format!("{a}"));
        } else if a.is_one() {
            s.push_str(&body);
        } else {
            s.push_str(&format!("{a}*{body}"));
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

impl fmt::Display for HopfPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&|l| String::from(l.as_str())))
    }
}

impl Add for &HopfPolynomial {
    type Output = HopfPolynomial;
    fn add(self, rhs: &HopfPolynomial) -> HopfPolynomial {
        let mut p = self.clone();
        for (m, &c) in &rhs.terms {
            insert(&mut p.terms, m.clone(), c);
        }
        prune(&mut p.terms);
        p
    }
}

impl Neg for &HopfPolynomial {
    type Output = HopfPolynomial;
    fn neg(self) -> HopfPolynomial {
        self.scale(-Rational::one())
    }
}

impl Sub for &HopfPolynomial {
    type Output = HopfPolynomial;
    fn sub(self, rhs: &HopfPolynomial) -> HopfPolynomial {
        self + &(-rhs)
    }
}

impl Mul for &HopfPolynomial {
    type Output = HopfPolynomial;
    fn mul(self, rhs: &HopfPolynomial) -> HopfPolynomial {
        let mut p = HopfPolynomial::zero();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &rhs.terms {
                insert(&mut p.terms, a.times(b), ca * cb);
            }
        }
        prune(&mut p.terms);
        p
    }
}

/// Element of ℋ ⊗ ℋ in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TensorPolynomial {
    terms: BTreeMap<(Monomial, Monomial), Rational>,
}

impl TensorPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        let mut t = Self::zero();
        t.add_term(Monomial::one(), Monomial::one(), Rational::one());
        t
    }

    pub fn add_term(&mut self, a: Monomial, b: Monomial, c: Rational) {
        insert(&mut self.terms, (a, b), c);
        prune(&mut self.terms);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Monomial, &Rational)> {
        self.terms.iter().map(|((a, b), c)| (a, b, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: &Monomial, b: &Monomial) -> Rational {
        self.terms.get(&(a.clone(), b.clone())).copied().unwrap_or_else(Rational::zero)
    }

    /// Product in ℋ ⊗ ℋ.
    pub fn times(&self, other: &TensorPolynomial) -> TensorPolynomial {
        let mut t = TensorPolynomial::zero();
        for ((a1, b1), &c1) in &self.terms {
            for ((a2, b2), &c2) in &other.terms {
                insert(&mut t.terms, (a1.times(a2), b1.times(b2)), c1 * c2);
            }
        }
        prune(&mut t.terms);
        t
    }

    pub fn plus(&self, other: &TensorPolynomial) -> TensorPolynomial {
        let mut t = self.clone();
        for (k, &c) in &other.terms {
            insert(&mut t.terms, k.clone(), c);
        }
        prune(&mut t.terms);
        t
    }

    pub fn scale(&self, c: Rational) -> TensorPolynomial {
        let mut t = TensorPolynomial::zero();
        for (k, &v) in &self.terms {
            insert(&mut t.terms, k.clone(), v * c);
        }
        prune(&mut t.terms);
        t
    }

    pub fn render(&self, name: &dyn Fn(&GraphLabel) -> String) -> String {
        render_terms(
            self.terms
                .iter()
                .map(|((a, b), c)| (format!("{} ⊗ {}", a.render(name), b.render(name)), *c)),
        )
    }
}

impl fmt::Display for TensorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&|l| String::from(l.as_str())))
    }
}

/// Element of ℋ ⊗ ℋ ⊗ ℋ, used to compare the two sides of coassociativity.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TriplePolynomial {
    terms: BTreeMap<(Monomial, Monomial, Monomial), Rational>,
}

impl TriplePolynomial {
    pub fn add_term(&mut self, a: Monomial, b: Monomial, c: Monomial, k: Rational) {
        insert(&mut self.terms, (a, b, c), k);
        prune(&mut self.terms);
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}
