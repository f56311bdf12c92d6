use proptest::prelude::*;
use zenotraj::dephasing::*;
use zenotraj::model::{normalize, QubitState};
use zenotraj::SpectralDensity;

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn ohmic(s: f64) -> SpectralDensity {
    SpectralDensity::ohmic(1.0 / 3.0, s, 1.0).unwrap()
}

#[test]
fn ohmic_exponent_matches_simpson() {
    let eta = 1.0 / 3.0;
    for (s, temp, t) in [(1.0, 0.0, 1.0), (1.0, 0.5, 2.0), (3.0, 0.2, 5.0), (2.0, 1.0, 0.7)] {
        let p = DephasingParams::new(ohmic(s), temp).unwrap();
        let integrand = |w: f64| {
            if w == 0.0 {
                // ω → 0 limit of the integrand.
                if temp == 0.0 || s > 1.0 {
                    return 0.0;
                }
                return 4.0 * eta * 2.0 * temp * t * t / 2.0;
            }
            let coth = if temp == 0.0 { 1.0 } else { 1.0 / (w / (2.0 * temp)).tanh() };
            4.0 * eta * w.powf(s) * (-w).exp() / (w * w) * coth * (1.0 - (w * t).cos())
        };
        let oracle = simpson(integrand, 0.0, 50.0, 2_000_000);
        let g = dephasing_exponent(&p, t).unwrap();
        assert!((g - oracle).abs() < 1e-7 * oracle.max(1.0), "s={s} T={temp} t={t}: {g} vs {oracle}");
    }
    let p = DephasingParams::new(ohmic(1.0), 0.0).unwrap();
    assert!((dephasing_exponent(&p, 1.0).unwrap() - 2f64.ln() * 2.0 / 3.0).abs() < 1e-10);
}

#[test]
fn exponent_grows_with_temperature() {
    for s in [1.0, 2.0, 4.0] {
        for t in [0.5, 2.0, 8.0] {
            let mut prev = -1.0;
            for temp in [0.0, 0.05, 0.2, 1.0, 3.0] {
                let g = dephasing_exponent(&DephasingParams::new(ohmic(s), temp).unwrap(), t).unwrap();
                assert!(g >= prev, "s={s} t={t} T={temp}");
                prev = g;
            }
        }
    }
}

#[test]
fn super_ohmic_exponent_saturates() {
    let p = DephasingParams::new(ohmic(4.0), 0.0).unwrap();
    // Γ_∞ = 4η Γ(s-1) = 8η for s = 4, ωc = 1.
    let g = dephasing_exponent(&p, 100.0).unwrap();
    assert!((g - 8.0 / 3.0).abs() < 1e-6, "{g}");
    assert!(single_path_factor(g).unwrap() > 0.06);
}

#[test]
fn sudden_death_where_root_phi_is_two_thirds() {
    let p = DephasingParams::new(ohmic(1.0), 0.0).unwrap();
    let t_phi = coherence_zero_crossing(&p, 3, 1, 0.5, 3.0, 1e-12).unwrap();
    let t_level = single_path_level_crossing(&p, 4.0 / 9.0, 0.5, 3.0, 1e-12).unwrap();
    let exact = ((9.0f64 / 4.0).powf(1.5) - 1.0).sqrt();
    assert!((t_phi - t_level).abs() < 1e-6 * t_level);
    assert!((t_phi - exact).abs() < 1e-8);
    // Exactly one sign change on a monotone φ_T.
    let times: Vec<f64> = (1..=400).map(|k| k as f64 * 0.01).collect();
    let f = dephasing_factors(&p, &times, 3, 1).unwrap();
    let flips = f.modified.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
    assert_eq!(flips, 1);
}

proptest! {
    #[test]
    fn no_shift_mitigates_dephasing(phi in 1e-6f64..=1.0, paths in 1usize..=12) {
        prop_assert!(modified_dephasing(phi, paths, 0).unwrap() >= phi - 1e-15);
    }

    #[test]
    fn postselected_state_is_physical(phi in 1e-6f64..=1.0, paths in 1usize..=8, frac in 0.0f64..1.0, theta in 0.0f64..3.2, arg in 0.0f64..6.3) {
        let n = (((paths - 1) / 2) as f64 * frac).round() as usize;
        let ce = num_complex::Complex64::new((theta / 2.0).cos(), 0.0);
        let cg = num_complex::Complex64::from_polar((theta / 2.0).sin(), arg);
        let rho0 = QubitState::pure(ce, cg).unwrap();
        let s = postselected_state_deph(&rho0, phi, paths, n).unwrap();
        prop_assert!(s.min_eigenvalue() >= -1e-12);
        let (norm, p) = normalize(&s).unwrap();
        prop_assert!((p - s.trace()).abs() < 1e-15);
        prop_assert!((norm.excited_population() - rho0.excited_population()).abs() < 1e-12);
        if rho0.coherence().norm() > 1e-6 {
            let ratio = norm.coherence() / rho0.coherence();
            prop_assert!((ratio.re - modified_dephasing(phi, paths, n).unwrap()).abs() < 1e-10);
            prop_assert!(ratio.im.abs() < 1e-10);
        }
    }
}
