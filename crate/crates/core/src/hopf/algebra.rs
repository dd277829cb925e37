use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use num_traits::One;

use super::polynomial::{HopfPolynomial, Monomial, Rational, TensorPolynomial, TriplePolynomial};
use crate::error::{Error, Result};
use crate::graphs::{contract, enumerate_1pi_graphs, enumerate_admissible_subgraphs, EnumerationOptions};
use crate::graphs::{FeynmanGraph, GraphLabel};

/// A proper coproduct term `count · x_γ ⊗ x_{Γ//γ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoproductTerm {
    pub subgraph: Monomial,
    pub quotient: GraphLabel,
    pub count: u32,
}

#[derive(Clone, Debug)]
struct Generator {
    graph: FeynmanGraph,
    terms: Vec<CoproductTerm>,
    antipode: HopfPolynomial,
}

/// The Hopf algebra on a finite set of 1PI generators that is closed under
/// taking admissible subgraphs and quotients.
#[derive(Clone, Debug)]
pub struct HopfAlgebra {
    generators: BTreeMap<GraphLabel, Generator>,
    /// Loop order and leg counts for which every 1PI graph is present.
    complete: Option<(u32, Vec<u32>)>,
}

fn proper_terms(g: &FeynmanGraph) -> Result<Vec<CoproductTerm>> {
    let mut acc: BTreeMap<(Monomial, GraphLabel), u32> = BTreeMap::new();
    for s in enumerate_admissible_subgraphs(g)? {
        let sub = Monomial::from_labels(s.component_graphs(g).iter().map(GraphLabel::of).collect());
        let quotient = GraphLabel::of(&contract(g, &s)?);
        *acc.entry((sub, quotient)).or_insert(0) += 1;
    }
    Ok(acc
        .into_iter()
        .map(|((subgraph, quotient), count)| CoproductTerm { subgraph, quotient, count })
        .collect())
}

impl HopfAlgebra {
    /// The algebra generated by `seeds` and everything their coproducts
    /// reach.
    pub fn generated_by(seeds: &[FeynmanGraph]) -> Result<Self> {
        let mut graphs: BTreeMap<GraphLabel, FeynmanGraph> = BTreeMap::new();
        let mut work: Vec<FeynmanGraph> = seeds.to_vec();
        while let Some(g) = work.pop() {
            let label = GraphLabel::of(&g);
            if graphs.contains_key(&label) {
                continue;
            }
            if !g.is_one_particle_irreducible() {
                return Err(Error::Domain(format!("generator {label} is not 1PI")));
            }
            for s in enumerate_admissible_subgraphs(&g)? {
                work.extend(s.component_graphs(&g));
                work.push(contract(&g, &s)?);
            }
            graphs.insert(label, g);
        }
        Self::build(graphs, None)
    }

    /// The algebra on exactly `universe`, which must be closed.
    pub fn from_universe(universe: &[FeynmanGraph]) -> Result<Self> {
        let mut graphs = BTreeMap::new();
        for g in universe {
            if !g.is_one_particle_irreducible() {
                return Err(Error::Domain(format!("generator {} is not 1PI", GraphLabel::of(g))));
            }
            graphs.insert(GraphLabel::of(g), g.clone());
        }
        Self::build(graphs, None)
    }

    /// Every 1PI graph with at most `max_loops` loops and leg count in `legs`.
    pub fn complete(max_loops: u32, legs: &[u32], opts: EnumerationOptions) -> Result<Self> {
        let mut graphs = BTreeMap::new();
        for &e in legs {
            for g in enumerate_1pi_graphs(max_loops, e, opts)? {
                graphs.insert(GraphLabel::of(&g), g);
            }
        }
        let mut legs = legs.to_vec();
        legs.sort_unstable();
        legs.dedup();
        Self::build(graphs, Some((max_loops, legs)))
    }

    fn build(graphs: BTreeMap<GraphLabel, FeynmanGraph>, complete: Option<(u32, Vec<u32>)>) -> Result<Self> {
        let mut generators: BTreeMap<GraphLabel, Generator> = BTreeMap::new();
        // labels sort by loop number first, so subgraphs and quotients are
        // always processed before their parents
        for (label, graph) in graphs.iter() {
            let terms = proper_terms(graph)?;
            for t in &terms {
                for l in t.subgraph.labels().iter().chain(core::iter::once(&t.quotient)) {
                    if !graphs.contains_key(l) {
                        return Err(Error::IncompleteUniverse(format!(
                            "{label} needs {l}, which is not in the universe"
                        )));
                    }
                }
            }
            let mut s = -&HopfPolynomial::generator(label.clone());
            for t in &terms {
                let mut left = HopfPolynomial::one();
                for l in t.subgraph.labels() {
                    left = &left * &generators[l].antipode;
                }
                let right = HopfPolynomial::generator(t.quotient.clone());
                s = &s - &(&left * &right).scale(Rational::from(t.count as i128));
            }
            generators.insert(label.clone(), Generator { graph: graph.clone(), terms, antipode: s });
        }
        Ok(HopfAlgebra { generators, complete })
    }

    /// Generator labels in ascending order.
    pub fn labels(&self) -> impl Iterator<Item = &GraphLabel> {
        self.generators.keys()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn contains(&self, label: &GraphLabel) -> bool {
        self.generators.contains_key(label)
    }

    fn get(&self, label: &GraphLabel) -> Result<&Generator> {
        self.generators
            .get(label)
            .ok_or_else(|| Error::UnknownGenerator(format!("{label}")))
    }

    pub fn graph(&self, label: &GraphLabel) -> Result<&FeynmanGraph> {
        Ok(&self.get(label)?.graph)
    }

    /// Proper terms of `Δx_Γ`, i.e. all but `1⊗x_Γ` and `x_Γ⊗1`.
    pub fn proper_terms(&self, label: &GraphLabel) -> Result<&[CoproductTerm]> {
        Ok(&self.get(label)?.terms)
    }

    pub fn is_primitive(&self, label: &GraphLabel) -> Result<bool> {
        Ok(self.get(label)?.terms.is_empty())
    }

    pub fn coproduct_generator(&self, label: &GraphLabel) -> Result<TensorPolynomial> {
        let g = self.get(label)?;
        let x = Monomial::generator(label.clone());
        let mut t = TensorPolynomial::zero();
        t.add_term(Monomial::one(), x.clone(), Rational::one());
        t.add_term(x, Monomial::one(), Rational::one());
        for term in &g.terms {
            t.add_term(
                term.subgraph.clone(),
                Monomial::generator(term.quotient.clone()),
                Rational::from(term.count as i128),
            );
        }
        Ok(t)
    }

    pub fn coproduct_monomial(&self, m: &Monomial) -> Result<TensorPolynomial> {
        let mut t = TensorPolynomial::one();
        for l in m.labels() {
            t = t.times(&self.coproduct_generator(l)?);
        }
        Ok(t)
    }

    /// `Δ`, extended as an algebra morphism.
    pub fn coproduct(&self, p: &HopfPolynomial) -> Result<TensorPolynomial> {
        let mut t = TensorPolynomial::zero();
        for (m, &c) in p.terms() {
            t = t.plus(&self.coproduct_monomial(m)?.scale(c));
        }
        Ok(t)
    }

    /// `ε`: the coefficient of the unit.
    pub fn counit(&self, p: &HopfPolynomial) -> Rational {
        p.coeff(&Monomial::one())
    }

    pub fn antipode_monomial(&self, m: &Monomial) -> Result<HopfPolynomial> {
        let mut p = HopfPolynomial::one();
        for l in m.labels() {
            p = &p * &self.get(l)?.antipode;
        }
        Ok(p)
    }

    /// `S`, extended as an algebra morphism (ℋ is commutative).
    pub fn antipode(&self, p: &HopfPolynomial) -> Result<HopfPolynomial> {
        let mut out = HopfPolynomial::zero();
        for (m, &c) in p.terms() {
            out = &out + &self.antipode_monomial(m)?.scale(c);
        }
        Ok(out)
    }

    /// `(id⊗Δ)Δ` and `(Δ⊗id)Δ` applied to `p`.
    pub fn coassociativity_sides(&self, p: &HopfPolynomial) -> Result<(TriplePolynomial, TriplePolynomial)> {
        let d = self.coproduct(p)?;
        let mut left = TriplePolynomial::default();
        let mut right = TriplePolynomial::default();
        for (a, b, &c) in d.terms() {
            for (b1, b2, &k) in self.coproduct_monomial(b)?.terms() {
                left.add_term(a.clone(), b1.clone(), b2.clone(), c * k);
            }
            for (a1, a2, &k) in self.coproduct_monomial(a)?.terms() {
                right.add_term(a1.clone(), a2.clone(), b.clone(), c * k);
            }
        }
        Ok((left, right))
    }

    /// `(id⊗ε)Δp` and `(ε⊗id)Δp`.
    pub fn counit_sides(&self, p: &HopfPolynomial) -> Result<(HopfPolynomial, HopfPolynomial)> {
        let d = self.coproduct(p)?;
        let mut left = HopfPolynomial::zero();
        let mut right = HopfPolynomial::zero();
        for (a, b, &c) in d.terms() {
            if b.is_one() {
                left.add_term(a.clone(), c);
            }
            if a.is_one() {
                right.add_term(b.clone(), c);
            }
        }
        Ok((left, right))
    }

    /// `m(S⊗id)Δp` and `m(id⊗S)Δp`; both equal `ε(p)·1`.
    pub fn antipode_sides(&self, p: &HopfPolynomial) -> Result<(HopfPolynomial, HopfPolynomial)> {
        let d = self.coproduct(p)?;
        let mut left = HopfPolynomial::zero();
        let mut right = HopfPolynomial::zero();
        for (a, b, &c) in d.terms() {
            let xa = HopfPolynomial::term(a.clone(), Rational::one());
            let xb = HopfPolynomial::term(b.clone(), Rational::one());
            left = &left + &(&self.antipode_monomial(a)? * &xb).scale(c);
            right = &right + &(&xa * &self.antipode_monomial(b)?).scale(c);
        }
        Ok((left, right))
    }

    /// `x_a ⋆ x_b = Σ_Γ ⟨δ_a⊗δ_b, Δx_Γ⟩ x_Γ`, summed over the universe.
    ///
    /// The universe is closed by construction, so the sum is well defined;
    /// it only sees hosts that are in the universe (see
    /// [`HopfAlgebra::completeness`]).
    pub fn insertion_product(&self, a: &GraphLabel, b: &GraphLabel) -> Result<HopfPolynomial> {
        self.get(a)?;
        self.get(b)?;
        let want = Monomial::generator(a.clone());
        let mut out = HopfPolynomial::zero();
        for (label, g) in &self.generators {
            for t in &g.terms {
                if t.subgraph == want && t.quotient == *b {
                    out.add_term(Monomial::generator(label.clone()), Rational::from(t.count as i128));
                }
            }
        }
        Ok(out)
    }

    /// Bilinear extension of the insertion product to linear polynomials.
    pub fn insert(&self, p: &HopfPolynomial, q: &HopfPolynomial) -> Result<HopfPolynomial> {
        let lp = p
            .as_linear()
            .ok_or_else(|| Error::Domain("insertion needs linear combinations of generators".into()))?;
        let lq = q
            .as_linear()
            .ok_or_else(|| Error::Domain("insertion needs linear combinations of generators".into()))?;
        let mut out = HopfPolynomial::zero();
        for (a, ca) in &lp {
            for (b, cb) in &lq {
                out = &out + &self.insertion_product(a, b)?.scale(*ca * *cb);
            }
        }
        Ok(out)
    }

    /// `[p, q] = p⋆q − q⋆p`.
    pub fn lie_bracket(&self, p: &HopfPolynomial, q: &HopfPolynomial) -> Result<HopfPolynomial> {
        Ok(&self.insert(p, q)? - &self.insert(q, p)?)
    }

    /// Loop orders and leg counts for which the universe is complete.
    pub fn completeness(&self) -> Option<(u32, &[u32])> {
        self.complete.as_ref().map(|(l, e)| (*l, e.as_slice()))
    }

    /// Labels reachable below `label` (subgraph components and quotients),
    /// including `label` itself.
    pub fn closure_of(&self, label: &GraphLabel) -> Result<BTreeSet<GraphLabel>> {
        let mut seen = BTreeSet::new();
        let mut work = alloc::vec![label.clone()];
        while let Some(l) = work.pop() {
            if !seen.insert(l.clone()) {
                continue;
            }
            for t in &self.get(&l)?.terms {
                work.extend(t.subgraph.labels().iter().cloned());
                work.push(t.quotient.clone());
            }
        }
        Ok(seen)
    }
}
