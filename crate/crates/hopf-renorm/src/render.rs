//! Short names for the reference graphs in rendered polynomials.

use hopf_renorm_core::graphs::fixtures;
use hopf_renorm_core::hopf::{HopfPolynomial, TensorPolynomial};
use hopf_renorm_core::GraphLabel;

/// `B`, `T` and `G2` for the bubble, triangle and nested two-loop
/// self-energy; `None` otherwise.
pub fn alias(label: &GraphLabel) -> Option<&'static str> {
    let known = [("B", fixtures::bubble()), ("T", fixtures::triangle()), ("G2", fixtures::gamma2())];
    known.into_iter().find(|(_, g)| GraphLabel::of(g) == *label).map(|(a, _)| a)
}

/// Alias if there is one, the canonical label otherwise.
pub fn name(label: &GraphLabel) -> String {
    alias(label).map_or_else(|| label.to_string(), String::from)
}

pub fn polynomial(p: &HopfPolynomial) -> String {
    p.render(&name)
}

pub fn tensor(t: &TensorPolynomial) -> String {
    t.render(&name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hopf_renorm_core::hopf::{Monomial, Rational};

    #[test]
    fn aliases_in_text() {
        let b = GraphLabel::of(&fixtures::bubble());
        let g2 = GraphLabel::of(&fixtures::gamma2());
        let mut p = HopfPolynomial::zero();
        p.add_term(Monomial::from_labels(vec![b.clone(), b]), Rational::from_integer(1));
        p.add_term(Monomial::generator(g2), Rational::from_integer(-1));
        assert_eq!(polynomial(&p), "x[B]^2 - x[G2]");
    }
}
