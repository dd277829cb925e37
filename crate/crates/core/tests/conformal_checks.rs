use std::f64::consts::PI;

use hopf_renorm_core::conformal::{
    conformal_expansion_check, density_norm, operator_norm, y_operator, yamabe_pairing, ConformalMetric, Density, Grid,
};
use nalgebra::DVector;

fn trig(x: &[f64]) -> f64 {
    (2.0 * PI * x[0]).sin() * (4.0 * PI * x[1]).cos()
}

/// `|P_h(ḡ, φ) − ∫|∇φ|²|` for the bent metric on an `N²` grid.
fn yamabe_deviation(points: usize) -> f64 {
    let g = Grid::new(2, points).unwrap();
    let flat = ConformalMetric::flat(g);
    let phi = Density::new(0.0, g.sample(trig), flat.clone()).unwrap();
    let bent = flat.rescaled(&g.sample(|x| 0.2 * (2.0 * PI * x[0]).cos() * (2.0 * PI * x[1]).sin())).unwrap();
    // ∫|∇φ|² = (4π² + 16π²)/4
    (yamabe_pairing(&phi, &bent).unwrap() - 5.0 * PI * PI).abs()
}

#[test]
fn yamabe_deviation_is_second_order() {
    let ratio = yamabe_deviation(64) / yamabe_deviation(128);
    assert!((ratio - 4.0).abs() < 0.8, "{ratio}");
}

#[test]
fn constant_rescaling_keeps_the_pairing() {
    let g = Grid::new(2, 16).unwrap();
    let flat = ConformalMetric::flat(g);
    let phi = Density::new(0.0, g.sample(trig), flat.clone()).unwrap();
    let scaled = flat.rescaled(&vec![0.7; g.len()]).unwrap();
    let (a, b) = (yamabe_pairing(&phi, &flat).unwrap(), yamabe_pairing(&phi, &scaled).unwrap());
    assert!((a - b).abs() < 1e-12 * a.abs());
    let zero = Density::new(0.0, vec![0.0; g.len()], flat.clone()).unwrap();
    assert_eq!(yamabe_pairing(&zero, &flat).unwrap(), 0.0);
    assert_eq!(density_norm(&Density::new(1.0, vec![0.0; g.len()], flat).unwrap()).unwrap(), 0.0);
}

#[test]
fn quadratic_form_matches_pairing_on_flat_metric() {
    let g = Grid::new(2, 8).unwrap();
    let flat = ConformalMetric::flat(g);
    let m = 0.7;
    let c = g.sample(|x| trig(x) + 0.3);
    let phi = Density::new(0.0, c.clone(), flat.clone()).unwrap();
    let t = y_operator(&flat, m).unwrap().tilde(0.0).unwrap();
    let v = DVector::from_vec(c.clone());
    let form = v.dot(&(&t * &v)) * g.cell();
    let mass: f64 = c.iter().map(|x| x * x).sum::<f64>() * g.cell() * m * m;
    let pairing = yamabe_pairing(&phi, &flat).unwrap();
    assert!((form - pairing - mass).abs() < 1e-10 * form.abs());
}

#[test]
fn tilde_series_obeys_its_remainder_bound() {
    let g = Grid::new(2, 16).unwrap();
    let y = y_operator(&ConformalMetric::flat(g), 1.0).unwrap();
    let series = y.tilde_series(4).unwrap();
    let z: f64 = 0.1;
    let direct = y.tilde(z).unwrap();
    let mut sum = series[0].clone();
    for (i, b) in series.iter().enumerate().skip(1) {
        sum += b * z.powi(i as i32);
    }
    let rel = operator_norm(&(&sum - &direct)) / operator_norm(&direct);
    // each eigenvalue λ errs by at most λ (z ln λ)⁵/5! e^{z|ln λ|}
    let ev = y.eigenvalues();
    let top = ev[ev.len() - 1];
    let bound = ev
        .iter()
        .map(|&l| l * (z * l.ln()).abs().powi(5) / 120.0 * (z * l.ln().abs()).exp())
        .fold(0.0, f64::max)
        / top.powf(1.0 + z);
    assert!(rel <= bound * 1.0001, "{rel} vs {bound}");
    assert!(rel > 1e-6, "truncation error unexpectedly small: {rel}");
}

#[test]
fn non_constant_rescaling_leaves_a_commutator() {
    let g = Grid::new(2, 8).unwrap();
    let base = ConformalMetric::flat(g);
    let f = g.sample(|x| 0.1 * (2.0 * PI * x[0]).cos());
    let r = conformal_expansion_check(&base, &f, 1.0, 0.1).unwrap();
    assert!(!r.constant_f);
    assert!(r.deviation > 1e-6 && r.deviation < 0.1, "{}", r.deviation);
    let c = conformal_expansion_check(&base, &vec![-0.4; g.len()], 1.0, 0.1).unwrap();
    assert!(c.deviation < 1e-10);
}
