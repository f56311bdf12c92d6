use proptest::prelude::*;
use std::f64::consts::PI;
use zenotraj::dephasing::{dephasing_exponent, single_path_factor, DephasingParams};
use zenotraj::numerics::integrate_adaptive_with_limit;
use zenotraj::zeno_filter::*;
use zenotraj::SpectralDensity;

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn fig2_density() -> SpectralDensity {
    SpectralDensity::gaussian_peak(1.5, 0.2).unwrap()
}

#[test]
fn gaussian_overlap_matches_simpson() {
    let j = fig2_density();
    for t in [1.0, 5.0, 12.0] {
        let f = FilterSpec::diss(1, 0, t, 1.0).unwrap();
        let gamma = decay_factor_overlap(&j, &f).unwrap();
        let oracle = simpson(
            |w| {
                let x = 0.5 * (w - 1.0) * t;
                let s = if x == 0.0 { 1.0 } else { x.sin() / x };
                (-(w - 1.5f64).powi(2) / 0.2).exp() * t * t * s * s
            },
            0.0,
            j.omega_max(),
            1_000_000,
        );
        assert!((gamma - oracle).abs() < 1e-8 * oracle, "t={t}: {gamma} vs {oracle}");
    }
}

#[test]
fn overlap_scales_exactly_with_paths() {
    let j = fig2_density();
    let base = decay_factor_overlap(&j, &FilterSpec::diss(1, 0, 5.0, 1.0).unwrap()).unwrap();
    for paths in [2usize, 4, 8, 16] {
        let g = decay_factor_overlap(&j, &FilterSpec::diss(paths, 0, 5.0, 1.0).unwrap()).unwrap();
        assert!((g - base / paths as f64).abs() <= 1e-12 * g);
    }
    let g = decay_factor_overlap(&j, &FilterSpec::diss(5, 1, 5.0, 1.0).unwrap()).unwrap();
    assert!((g - base * 5.0 / 9.0).abs() <= 1e-12 * g);
}

#[test]
fn traditional_filter_weight_is_conserved() {
    let t = 5.0;
    let half_width = 4000.0;
    for m in [1.0, 4.0, 8.0] {
        let f = FilterSpec::traditional(m, t, 1.0).unwrap();
        let spacing = f.zero_spacing();
        let lobes = (half_width / spacing).round();
        let w = lobes * spacing;
        let mut total = 0.0;
        let panels = 400;
        for k in 0..panels {
            let a = 1.0 - w + 2.0 * w * k as f64 / panels as f64;
            let b = a + 2.0 * w / panels as f64;
            total += integrate_adaptive_with_limit(|x| f.eval(x), a, b, 1e-13, 0.0, 100_000).unwrap().value;
        }
        // Mean tail of (t²/Ñ) sinc² beyond |Δ| = w on both sides.
        let tail = 4.0 * m / w;
        let weight = total + tail;
        assert!((weight - 2.0 * PI * t).abs() < 1e-6 * 2.0 * PI * t, "Ñ={m}: {weight}");
    }
}

fn grid_fwhm(spec: impl Fn(f64) -> f64) -> f64 {
    let h = 1e-4;
    let omegas: Vec<f64> = (0..=240_000).map(|k| -11.0 + k as f64 * h).collect();
    let values: Vec<f64> = omegas.iter().map(|&w| spec(w)).collect();
    fwhm(&omegas, &values).unwrap()
}

#[test]
fn superposed_width_is_fixed_traditional_width_grows() {
    let t = 5.0;
    let w1 = grid_fwhm(|w| filter_diss(w, t, 1, 0, 1.0).unwrap());
    let tw1 = grid_fwhm(|w| filter_traditional_zeno(w, t, 1.0, 1.0).unwrap());
    for n in [4usize, 8] {
        let w = grid_fwhm(|x| filter_diss(x, t, n, 0, 1.0).unwrap());
        assert!((w - w1).abs() <= 1e-9 * w1);
        let tw = grid_fwhm(|x| filter_traditional_zeno(x, t, n as f64, 1.0).unwrap());
        assert!((tw / tw1 - n as f64).abs() < 1e-6 * n as f64, "{}", tw / tw1);
    }
}

#[test]
fn perturbative_limit_is_second_order() {
    let j = SpectralDensity::lorentzian(1.0, 0.1, 1.0).unwrap();
    let mismatch: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&eps| perturbative_consistency(&j, 1.0, 0.2, 1, 0, eps, 5e-4).unwrap().relative_mismatch())
        .collect();
    for w in mismatch.windows(2) {
        let ratio = w[0] / w[1];
        assert!((2.5..=6.0).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn perturbative_path_scaling() {
    let j = SpectralDensity::lorentzian(1.0, 0.1, 1.0).unwrap();
    let one = perturbative_consistency(&j, 1.0, 0.2, 1, 0, 0.1, 5e-4).unwrap();
    let four = perturbative_consistency(&j, 1.0, 0.2, 4, 0, 0.1, 5e-4).unwrap();
    assert!((four.exact / one.exact - 0.25).abs() < 0.05 * 0.25);
    assert!((four.overlap / one.overlap - 0.25).abs() < 1e-12);
}

#[test]
fn printed_deph_filter_is_a_quarter_of_exact_decay() {
    // For |+⟩ on a single path, -ln p = -ln[(1 + e^{-Γ})/2] ≈ Γ/2, while the
    // printed filter integrates to Γ/8.
    let eps2 = 1e-6;
    let j = SpectralDensity::ohmic(1.0 / 3.0, 1.0, 1.0).unwrap().scaled(eps2).unwrap();
    let t = 1.0;
    let gamma = dephasing_exponent(&DephasingParams::new(j.clone(), 0.0).unwrap(), t).unwrap();
    let exact = -(0.5 * (1.0 + single_path_factor(gamma).unwrap())).ln();
    let overlap = decay_factor_overlap(&j, &FilterSpec::deph(1, 0, t).unwrap()).unwrap();
    let constant = exact / overlap;
    println!("exact/printed deph overlap = {constant:.6}");
    assert!((constant - 4.0).abs() < 1e-3);
}

proptest! {
    #[test]
    fn diss_filter_prefactor_is_exact(w in -5.0f64..5.0, t in 0.01f64..20.0, paths in 1usize..=10, frac in 0.0f64..1.0) {
        let n = (((paths - 1) / 2) as f64 * frac).round() as usize;
        let a = filter_diss(w, t, paths, n, 1.0).unwrap();
        let b = filter_diss(w, t, 1, 0, 1.0).unwrap();
        let pre = paths as f64 / (paths as f64 - 2.0 * n as f64).powi(2);
        prop_assert_eq!(a, pre * b);
        prop_assert!(a <= filter_diss(1.0, t, paths, n, 1.0).unwrap());
    }

    #[test]
    fn overlap_is_non_negative(t in 0.0f64..30.0, centre in 0.1f64..3.0, width in 0.01f64..1.0, paths in 1usize..=6) {
        let j = SpectralDensity::gaussian_peak(centre, width).unwrap();
        let g = decay_factor_overlap(&j, &FilterSpec::diss(paths, 0, t, 1.0).unwrap()).unwrap();
        prop_assert!(g >= 0.0);
        let g = decay_factor_overlap(&j, &FilterSpec::deph(paths, 0, t).unwrap()).unwrap();
        prop_assert!(g >= 0.0);
    }
}
