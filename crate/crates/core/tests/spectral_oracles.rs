use std::f64::consts::PI;

use hopf_renorm_core::spectral::{CircleRealBasis, SpectralBackend};
use hopf_renorm_core::Error;
use num_complex::Complex64;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn circle_zeta_matches_riemann_values() {
    let b = SpectralBackend::circle(1.0, 0.0, 20).unwrap();
    assert!((b.zeta_trace(c(2.0)).unwrap().re - PI.powi(4) / 45.0).abs() < 1e-10);
    assert!((b.zeta_trace(c(0.0)).unwrap().re + 1.0).abs() < 1e-8);
    let e = b.zeta_trace_expansion(0.5, 1).unwrap();
    assert!((e.coeff(-1).unwrap().re - 1.0).abs() < 1e-6);
    // 2ζ(6) = 2π⁶/945
    assert!((b.zeta_trace(c(3.0)).unwrap().re - 2.0 * PI.powi(6) / 945.0).abs() < 1e-10);
}

#[test]
fn circle_of_other_radius_scales() {
    // eigenvalues k²/r², so ζ(s) = 2 r^{2s} ζ_R(2s)
    let r = 1.7;
    let b = SpectralBackend::circle(r, 0.0, 20).unwrap();
    let want = 2.0 * r.powi(4) * PI.powi(4) / 90.0;
    assert!((b.zeta_trace(c(2.0)).unwrap().re - want).abs() < 1e-9 * want);
}

#[test]
fn massive_circle_against_coth_sum() {
    // Σ_k (k² + m²)^{-1} = (π/m) coth(πm)
    let m = 0.8;
    let b = SpectralBackend::circle(1.0, m, 20).unwrap();
    let want = PI / m / (PI * m).tanh();
    assert!((b.zeta_trace(c(1.0)).unwrap().re - want).abs() < 1e-10);
}

#[test]
fn six_torus_epstein_residue() {
    let b = SpectralBackend::unit_torus(6, 0.0, 6).unwrap();
    let e = b.zeta_trace_expansion(3.0, 1).unwrap();
    let want = 1.0 / (128.0 * PI.powi(3));
    assert!((e.coeff(-1).unwrap().re - want).abs() < 1e-12 * want.max(1.0));
    // the only massless pole sits at n/2
    let poles = b.zeta_poles(4).unwrap();
    assert!((poles[0].0 - 3.0).abs() < 1e-15 && (poles[0].1 - want).abs() < 1e-15);
    assert!(poles[1..].iter().all(|p| p.1 == 0.0));
    assert!(b.zeta_trace_expansion(2.0, 1).unwrap().pole_order() == 0);
}

#[test]
fn massive_poles_follow_heat_coefficients() {
    // n = 2: poles at s = 1 only; massive a_j with 1/Γ zeros at s ≤ 0
    let m = 1.3;
    let b = SpectralBackend::unit_torus(2, m, 10).unwrap();
    let e = b.zeta_trace_expansion(1.0, 1).unwrap();
    assert!((e.coeff(-1).unwrap().re - 1.0 / (4.0 * PI)).abs() < 1e-12);
    for s0 in [0.0, -1.0, -2.0] {
        assert_eq!(b.zeta_trace_expansion(s0, 1).unwrap().pole_order(), 0);
    }
}

#[test]
fn large_s_agrees_with_truncated_sum() {
    let b = SpectralBackend::unit_torus(3, 0.5, 8).unwrap();
    for s in [4.0, 6.5] {
        let full = b.zeta_trace(c(s)).unwrap();
        let partial = b.zeta_partial_sum(c(s));
        // tail over |k|∞ > 8 is below 26·9² ... ≲ N^{n−1} Σ (2πN)^{−2s}
        let tail = 6.0 * 81.0 * (2.0 * PI * 9.0f64).powf(-2.0 * s) * 10.0;
        assert!((full - partial).norm() < tail + 1e-13 * full.norm(), "{s}");
    }
}

#[test]
fn heat_coefficient_capability() {
    let b = SpectralBackend::unit_torus(2, 1.0, 4).unwrap();
    assert_eq!(b.heat_coefficients(3).unwrap().coefficients, vec![1.0, -1.0, 0.5]);
    assert!(matches!(b.heat_coefficients(65), Err(Error::Capability(_))));
    // a mass too large for the series fails the same way
    let heavy = SpectralBackend::unit_torus(2, 9.0, 4).unwrap();
    assert!(matches!(heavy.zeta_trace_expansion(0.5, 1), Err(Error::Capability(_))));
}

#[test]
fn green_function_diagonal_oracle() {
    // Σ_k (4π²k² + 1)^{-2} = (2π)^{-4} Σ (k² + c²)^{-2}, c = 1/2π
    let cc = 1.0 / (2.0 * PI);
    let x = PI * cc;
    let sum = (PI / (cc * cc) / x.tanh() + PI * PI / (cc * x.sinh().powi(2))) / (2.0 * cc);
    let want = sum / (2.0 * PI).powi(4);
    let g = |n: u32| {
        SpectralBackend::unit_torus(1, 1.0, n).unwrap().green_function(c(1.0), &[0.3], &[0.3]).unwrap().re
    };
    let (a, b) = (g(200), g(400));
    // tail ∝ N^{-3}
    let extrapolated = b + (b - a) / 7.0;
    assert!((extrapolated - want).abs() < 1e-12, "{extrapolated} vs {want}");
}

#[test]
fn green_function_large_z_is_the_mode_sum() {
    let b = SpectralBackend::circle(1.0, 1.0, 20).unwrap();
    let z = c(3.0);
    let g = b.green_function(z, &[0.4], &[2.1]).unwrap();
    let mut direct = Complex64::new(0.0, 0.0);
    for k in -20i64..=20 {
        let lam = (k * k) as f64 + 1.0;
        direct += Complex64::from_polar(1.0, k as f64 * (0.4 - 2.1)) * lam.powf(-4.0) / (2.0 * PI);
    }
    assert!((g - direct).norm() < 1e-14);
}

#[test]
fn real_circle_basis_against_trig_integrals() {
    let l = 2.0 * PI;
    let basis = CircleRealBasis { length: l };
    let amp = (2.0 / l).sqrt();
    // ∫ cos a cos b cos c = (L/4) [δ(a=b+c) + δ(b=a+c) + δ(c=a+b)] for positive a, b, c
    let closed = |i: i64, j: i64, k: i64| -> f64 {
        let pos = |x: i64| x > 0;
        if pos(i) && pos(j) && pos(k) {
            let hits = [(i == j + k), (j == i + k), (k == i + j)].iter().filter(|&&h| h).count() as f64;
            return amp.powi(3) * l / 4.0 * hits;
        }
        if i == 0 {
            // constant times orthonormal pair
            return if j == k { 1.0 / l.sqrt() } else { 0.0 };
        }
        f64::NAN
    };
    for i in 1..5 {
        for j in 1..5 {
            for k in 1..7 {
                assert!((basis.momentum_tensor(i, j, k) - closed(i, j, k)).abs() < 1e-12);
            }
        }
    }
    for j in -3..=3 {
        for k in -3..=3 {
            assert!((basis.momentum_tensor(0, j, k) - closed(0, j, k)).abs() < 1e-12);
        }
    }
    // sin a sin b cos c: (L/4)[δ(c=a−b) + δ(c=b−a) − δ(c=a+b)] times amplitudes
    let v = basis.momentum_tensor(-1, -2, 3);
    assert!((v + amp.powi(3) * l / 4.0).abs() < 1e-12);
    let v = basis.momentum_tensor(-3, -2, 1);
    assert!((v - amp.powi(3) * l / 4.0).abs() < 1e-12);
    let mut worst: f64 = 0.0;
    for i in -6..=6 {
        for j in -6..=6 {
            worst = worst.max((basis.overlap(i, j) - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    assert!(worst < 1e-10);
}
