use std::collections::BTreeMap;

use hopf_renorm_core::graphs::{fixtures, EnumerationOptions};
use hopf_renorm_core::rg::{beta, beta_by_fit, check_locality, local_character, residue, DEFAULT_SAMPLES};
use hopf_renorm_core::{birkhoff, Character, Error, GraphLabel, HopfAlgebra, HopfPolynomial, LaurentSeries};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lab(g: &hopf_renorm_core::FeynmanGraph) -> GraphLabel {
    GraphLabel::of(g)
}

#[test]
fn hopf_axioms_through_two_loops() {
    let h = HopfAlgebra::complete(2, &[2, 3], EnumerationOptions::default()).unwrap();
    for l in h.labels() {
        let x = HopfPolynomial::generator(l.clone());
        let (a, b) = h.coassociativity_sides(&x).unwrap();
        assert_eq!(a, b, "coassociativity on {l}");
        let (a, b) = h.counit_sides(&x).unwrap();
        assert_eq!(a, x);
        assert_eq!(b, x);
        let (a, b) = h.antipode_sides(&x).unwrap();
        assert!(a.is_zero() && b.is_zero(), "antipode on {l}");
    }
}

#[test]
fn two_loop_counterterm_by_hand() {
    let (c1, d1, a, b, e) = (1.5, -0.25, 0.75, 2.0, 3.0);
    let h = HopfAlgebra::generated_by(&[fixtures::gamma2()]).unwrap();
    let gamma = Character::new(7)
        .with(lab(&fixtures::bubble()), LaurentSeries::exact_real(-1, &[c1, d1]))
        .unwrap()
        .with(lab(&fixtures::gamma2()), LaurentSeries::exact_real(-2, &[a, b, e]))
        .unwrap();
    let m = birkhoff(&gamma, &h).unwrap().minus;
    let v = m.get(&lab(&fixtures::gamma2())).unwrap();
    assert_eq!(v.coeff(-2).unwrap().re, -(a - c1 * c1));
    assert_eq!(v.coeff(-1).unwrap().re, -(b - c1 * d1));
    assert_eq!(v.coeff(0).unwrap().re, 0.0);
}

/// Regular character vanishing at z = 0.
fn plus_vanishing_at_zero(h: &HopfAlgebra, rng: &mut ChaCha8Rng) -> Character {
    let mut c = Character::new(7);
    for l in h.labels() {
        let mut coeffs = vec![0.0];
        coeffs.extend((1..=7).map(|_| rng.gen_range(-1.0..1.0)));
        c.insert(l.clone(), LaurentSeries::from_real(0, &coeffs)).unwrap();
    }
    c
}

#[test]
fn beta_is_loop_number_times_residue_on_local_characters() {
    let h = HopfAlgebra::generated_by(&[fixtures::double_insertion(), fixtures::gamma2(), fixtures::triangle()]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let betas: BTreeMap<GraphLabel, f64> = h.labels().map(|l| (l.clone(), rng.gen_range(-2.0..2.0))).collect();
        let plus = plus_vanishing_at_zero(&h, &mut rng);
        let gamma = local_character(&betas, &plus, &h).unwrap();
        assert!(check_locality(&gamma, &h, &DEFAULT_SAMPLES, 1e-9).unwrap().passed);
        let b = beta(&gamma, &h).unwrap();
        let res = residue(&gamma, &h).unwrap();
        for l in h.labels() {
            let want = res[l] * l.loops() as f64;
            assert!((b[l] - want).norm() < 1e-12 * (1.0 + want.norm()), "{l}");
            assert!((b[l] - Complex64::new(betas[l], 0.0)).norm() < 1e-12 * (1.0 + betas[l].abs()));
        }
    }
}

#[test]
fn beta_matches_a_polynomial_fit() {
    let h = HopfAlgebra::generated_by(&[fixtures::gamma2()]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let betas: BTreeMap<GraphLabel, f64> = h.labels().map(|l| (l.clone(), rng.gen_range(-2.0..2.0))).collect();
    let mut plus = Character::new(7);
    for l in h.labels() {
        let coeffs: Vec<f64> = (0..=7).map(|_| rng.gen_range(-1.0..1.0)).collect();
        plus.insert(l.clone(), LaurentSeries::from_real(0, &coeffs)).unwrap();
    }
    let gamma = local_character(&betas, &plus, &h).unwrap();
    let exact = beta(&gamma, &h).unwrap();
    for l in h.labels() {
        let fit = beta_by_fit(&gamma, &h, l, 0.05).unwrap();
        assert!((fit - exact[l]).norm() < 1e-6 * (1.0 + exact[l].norm()), "{l}: {fit} vs {}", exact[l]);
    }
}

#[test]
fn locality_gate_on_the_two_loop_fixture() {
    let h = HopfAlgebra::generated_by(&[fixtures::gamma2()]).unwrap();
    let make = |c1: f64, a: f64| {
        Character::new(7)
            .with(lab(&fixtures::bubble()), LaurentSeries::from_real(-1, &[c1, 0.4, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]))
            .unwrap()
            .with(lab(&fixtures::gamma2()), LaurentSeries::from_real(-2, &[a, -0.3, 1.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]))
            .unwrap()
    };
    for (c1, a) in [(1.0, 0.5), (2.0, 2.0), (-3.0, 4.5)] {
        assert!(check_locality(&make(c1, a), &h, &DEFAULT_SAMPLES, 1e-9).unwrap().passed);
        assert!(beta(&make(c1, a), &h).is_ok());
    }
    for (c1, a) in [(1.0, 0.6), (2.0, 1.0)] {
        let r = check_locality(&make(c1, a), &h, &[3.0], 1e-9).unwrap();
        assert!(!r.passed);
        let want = (2.0 * a - c1 * c1) * 3f64.ln();
        assert!((r.deviations[&lab(&fixtures::gamma2())] - want.abs()).abs() < 1e-12);
        assert!(matches!(beta(&make(c1, a), &h), Err(Error::Locality { .. })));
    }
}
