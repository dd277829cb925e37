use hopf_renorm_core::conformal::{change_weight, inner_product, ConformalMetric, Density, Grid};
use hopf_renorm_core::graphs::{canonical_form, enumerate_1pi_graphs, fixtures, EnumerationOptions};
use hopf_renorm_core::rg::scale;
use hopf_renorm_core::spectral::SpectralBackend;
use hopf_renorm_core::{birkhoff, Character, FeynmanGraph, GraphLabel, HopfAlgebra, HopfPolynomial, LaurentSeries};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graphs() -> Vec<FeynmanGraph> {
    let mut out = vec![
        fixtures::bubble(),
        fixtures::triangle(),
        fixtures::gamma2(),
        fixtures::square(),
        fixtures::dumbbell(),
        fixtures::double_insertion(),
    ];
    out.extend(enumerate_1pi_graphs(2, 3, EnumerationOptions::default()).unwrap());
    out
}

fn universe() -> HopfAlgebra {
    HopfAlgebra::generated_by(&[fixtures::double_insertion(), fixtures::gamma2(), fixtures::triangle()]).unwrap()
}

/// Values with pole order at most the loop number, eight coefficients.
fn random_character(h: &HopfAlgebra, rng: &mut ChaCha8Rng) -> Character {
    let mut c = Character::new(7);
    for l in h.labels() {
        let lo = -(l.loops() as i32);
        let coeffs: Vec<f64> = (lo..=7).map(|_| rng.gen_range(-2.0..2.0)).collect();
        c.insert(l.clone(), LaurentSeries::from_real(lo, &coeffs)).unwrap();
    }
    c
}

fn series(rng: &mut ChaCha8Rng, lowest: i32) -> LaurentSeries {
    let coeffs: Vec<Complex64> = (lowest..=6).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    LaurentSeries::with_order(lowest, coeffs, Some(6))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn canonical_label_ignores_vertex_order(idx in 0usize..64, seed in any::<u64>()) {
        let all = graphs();
        let g = &all[idx % all.len()];
        let mut perm: Vec<usize> = (0..g.vertices().len()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let p = g.permuted(&perm);
        prop_assert_eq!(GraphLabel::of(&p), GraphLabel::of(g));
        prop_assert_eq!(canonical_form(&p), canonical_form(g));
    }

    #[test]
    fn birkhoff_reconstructs(seed in any::<u64>()) {
        let h = universe();
        let gamma = random_character(&h, &mut ChaCha8Rng::seed_from_u64(seed));
        let b = birkhoff(&gamma, &h).unwrap();
        let back = b.minus.star_inverse(&h).unwrap().convolve(&b.plus, &h).unwrap();
        let size = gamma.values().map(|(_, v)| v.max_abs()).fold(1.0, f64::max);
        prop_assert!(back.max_deviation(&gamma, 7).unwrap() < 1e-12 * size * size);
        for (l, v) in b.plus.values() {
            prop_assert!(v.pole_order() == 0, "γ₊ has a pole on {}", l);
        }
        for (_, v) in b.minus.values() {
            prop_assert!(v.regular_part().is_zero());
        }
        prop_assert_eq!(b.minus.evaluate(&HopfPolynomial::one()).unwrap(), LaurentSeries::one());
    }

    #[test]
    fn scaling_is_a_semigroup(seed in any::<u64>(), s in 0.2f64..3.0, t in 0.2f64..3.0) {
        let h = universe();
        let gamma = random_character(&h, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(scale(&gamma, 1.0).unwrap().max_deviation(&gamma, 7).unwrap(), 0.0);
        let twice = scale(&scale(&gamma, s).unwrap(), t).unwrap();
        let once = scale(&gamma, s * t).unwrap();
        prop_assert!(twice.max_deviation(&once, 7).unwrap() < 1e-11);
    }

    #[test]
    fn laurent_ring_laws(seed in any::<u64>(), la in -3i32..2, lb in -3i32..2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (series(&mut rng, la), series(&mut rng, lb), series(&mut rng, 0));
        prop_assert!((&(&a + &b) - &b).max_deviation(&a, 6 + la.min(lb).min(0)) < 1e-14);
        prop_assert!((&a * &b).max_deviation(&(&b * &a), 0) < 1e-13);
        let left = &(&a * &b) * &c;
        let right = &a * &(&b * &c);
        let through = left.order().unwrap().min(right.order().unwrap());
        prop_assert!(left.max_deviation(&right, through) < 1e-12);
        if a.coeff_or_zero(la).norm() > 0.1 {
            let one = &a * &a.invert().unwrap();
            prop_assert!(one.max_deviation(&LaurentSeries::one(), one.order().unwrap()) < 1e-9);
        }
    }

    #[test]
    fn insertion_bracket_is_antisymmetric(i in 0usize..8, j in 0usize..8) {
        let h = universe();
        let labels: Vec<GraphLabel> = h.labels().cloned().collect();
        let a = HopfPolynomial::generator(labels[i % labels.len()].clone());
        let b = HopfPolynomial::generator(labels[j % labels.len()].clone());
        let ab = h.lie_bracket(&a, &b).unwrap();
        let ba = h.lie_bracket(&b, &a).unwrap();
        prop_assert!((&ab + &ba).is_zero());
    }

    #[test]
    fn momentum_tensor_symmetric(i in -2i64..=2, j in -2i64..=2, k in -2i64..=2, l in -2i64..=2) {
        let b = SpectralBackend::unit_torus(2, 1.0, 5).unwrap();
        let (p, q, r) = (vec![i, j], vec![k, l], vec![-i - k, -j - l]);
        let v = b.momentum_tensor(&p, &q, &r).unwrap();
        prop_assert_eq!(v, 1.0);
        prop_assert_eq!(b.momentum_tensor(&q, &r, &p).unwrap(), v);
        prop_assert_eq!(b.momentum_tensor(&r, &p, &q).unwrap(), v);
        prop_assert_eq!(b.momentum_tensor(&p, &q, &[r[0] + 1, r[1]]).unwrap_or(0.0), 0.0);
    }

    #[test]
    fn inner_product_is_metric_free(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Grid::new(2, 6).unwrap();
        let gm = ConformalMetric::new(g, (0..g.len()).map(|_| rng.gen_range(-0.5..0.5)).collect()).unwrap();
        let other = ConformalMetric::new(g, (0..g.len()).map(|_| rng.gen_range(-0.5..0.5)).collect()).unwrap();
        let phi = Density::new(1.0, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(), gm.clone()).unwrap();
        let psi = Density::new(1.0, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(), gm).unwrap();
        let before = inner_product(&phi, &psi).unwrap();
        let after = inner_product(&phi.retrivialize(&other).unwrap(), &psi.retrivialize(&other).unwrap()).unwrap();
        prop_assert!((before - after).abs() < 1e-12 * (1.0 + before.abs()));
        prop_assert!(inner_product(&phi, &phi).unwrap() >= 0.0);
    }

    #[test]
    fn weights_add_under_products(seed in any::<u64>(), r1 in 0.0f64..2.0, r2 in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Grid::new(2, 4).unwrap();
        let gm = ConformalMetric::new(g, (0..g.len()).map(|_| rng.gen_range(-0.5..0.5)).collect()).unwrap();
        let other = ConformalMetric::new(g, (0..g.len()).map(|_| rng.gen_range(-0.5..0.5)).collect()).unwrap();
        let a = Density::new(r1, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(), gm.clone()).unwrap();
        let b = Density::new(r2, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(), gm).unwrap();
        let ab = a.product(&b).unwrap();
        prop_assert_eq!(ab.weight, r1 + r2);
        let moved = a.retrivialize(&other).unwrap().product(&b.retrivialize(&other).unwrap()).unwrap();
        let ab_moved = ab.retrivialize(&other).unwrap();
        for (x, y) in moved.coeffs.iter().zip(&ab_moved.coeffs) {
            prop_assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()));
        }
        let back = change_weight(&change_weight(&a, r2), r1);
        for (x, y) in back.coeffs.iter().zip(&a.coeffs) {
            prop_assert!((x - y).abs() < 1e-14);
        }
    }
}

#[test]
fn scaling_composition_on_many_characters() {
    let h = universe();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let gamma = random_character(&h, &mut rng);
        let (s, t) = (rng.gen_range(0.1..4.0), rng.gen_range(0.1..4.0));
        let d = scale(&scale(&gamma, s).unwrap(), t).unwrap().max_deviation(&scale(&gamma, s * t).unwrap(), 7).unwrap();
        worst = worst.max(d);
    }
    assert!(worst < 1e-10, "{worst}");
}
