use bilop::signal::{dft_forward, lp_norm, spectral_derivative, Exponent, Grid, SampledFunction};
use bilop::weights::*;
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> Complex<f64> {
    Complex::new(re, 0.0)
}

fn bump(grid: Grid<f64>) -> SampledFunction<f64> {
    SampledFunction::from_fn(grid, |x| Complex::new((-x * x / 2.0).exp(), 0.3 * (-(x - 1.0).powi(2)).exp()))
}

fn small_scan() -> ClassScan {
    ClassScan { radius: 256.0, step: 0.5, max_k: 8, resolution: 8, ceiling: 1e3 }
}

fn pair_scan() -> PairScan {
    PairScan { radius: 256.0, points: 257, ceiling: 1e3 }
}

#[test]
fn constant_weight_has_constant_one() {
    let w = Weight::constant(3.0);
    for theta in [0.0, 0.5, 2.0] {
        let r = weight_class_check(&w, theta, 1.0, &small_scan()).unwrap();
        assert_eq!(r.per_k[0], 1.0);
        assert_eq!(r.constant, 1.0);
        assert!(r.pass);
        assert!(r.per_k.iter().all(|&v| v <= 1.0));
    }
    let e = weight_equiv_check(&w, 1.0, 1.0, &pair_scan()).unwrap();
    assert_eq!(e.max_ratio, 1.0);
    assert!(e.pass);
}

#[test]
fn example_weights_pass_both_characterizations() {
    let theta = 1.0;
    for spec in [
        WeightSpec::Const { value: 1.0 },
        WeightSpec::Poly { alpha: 0.5, sign: 1 },
        WeightSpec::Poly { alpha: 0.9, sign: -1 },
    ] {
        let w = Weight::from_spec(&spec, theta).unwrap();
        let a = weight_class_check(&w, theta, 1.0, &small_scan()).unwrap();
        let b = weight_equiv_check(&w, theta, 1.0, &pair_scan()).unwrap();
        assert!(a.pass && b.pass, "{}: C = {}, equiv = {}", w.name(), a.constant, b.max_ratio);
        assert!(a.constant < 4.0, "{} {}", w.name(), a.constant);
    }
}

#[test]
fn poly_constant_bounded_as_box_grows() {
    // α < θ: the class constant should saturate, not grow with the box.
    let w = Weight::from_spec(&WeightSpec::Poly { alpha: 0.5, sign: 1 }, 1.0).unwrap();
    let mut prev = 0.0;
    for (radius, k) in [(64.0, 6), (256.0, 8), (1024.0, 10)] {
        let scan = ClassScan { radius, step: 1.0, max_k: k, resolution: 4, ceiling: 1e3 };
        let r = weight_class_check(&w, 1.0, 1.0, &scan).unwrap();
        assert!(r.constant >= prev - 1e-12);
        assert!(r.constant < 2.0, "{}", r.constant);
        prev = r.constant;
    }
}

#[test]
fn exponential_weight_fails_with_witness() {
    let w = Weight::from_spec(&WeightSpec::Exp { rate: 1.0 }, 1.0).unwrap();
    let scan = ClassScan { radius: 64.0, step: 0.5, max_k: 6, resolution: 8, ceiling: 1e3 };
    let r = weight_class_check(&w, 1.0, 1.0, &scan).unwrap();
    assert!(!r.pass);
    assert!(r.constant > 1e10);
    let (center, k) = r.witness;
    assert!(center.is_finite());
    assert!(k >= 1);
    // Roughly 2^{-k} e^{2^{k-1}}: unbounded in k.
    for pair in r.per_k[1..].windows(2) {
        assert!(pair[1] > pair[0]);
    }
    assert_eq!(k, 6);
    let e = weight_equiv_check(&w, 1.0, 1.0, &PairScan { radius: 64.0, points: 129, ceiling: 1e3 }).unwrap();
    assert!(!e.pass);
    assert!((e.witness.0.abs() - 64.0).abs() < 1e-12);
}

#[test]
fn negative_weight_is_an_invariant_error() {
    let w = Weight::new("dip", 1.0, 1.0, |x: f64| x - 3.0).unwrap();
    assert!(matches!(weight_class_check(&w, 1.0, 1.0, &small_scan()), Err(bilop::Error::Invariant(_))));
    assert!(matches!(weight_equiv_check(&w, 1.0, 1.0, &pair_scan()), Err(bilop::Error::Invariant(_))));
}

#[test]
fn zero_weight_samples_are_guarded() {
    let w = Weight::new("hole", 1.0, 1.0, |x: f64| if x.abs() < 1.0 { 0.0 } else { 1.0 }).unwrap();
    let e = weight_equiv_check(&w, 1.0, 1.0, &PairScan { radius: 4.0, points: 9, ceiling: 1e3 }).unwrap();
    assert_eq!(e.zero_guard, 9);
    let r = weight_class_check(&w, 1.0, 1.0, &ClassScan { radius: 8.0, step: 0.5, max_k: 2, resolution: 8, ceiling: 1e3 }).unwrap();
    assert!(!r.pass);
}

#[test]
fn equal_points_give_ratio_one() {
    let w = Weight::from_spec(&WeightSpec::Poly { alpha: 0.7, sign: 1 }, 1.0).unwrap();
    let e = weight_equiv_check(&w, 1.0, 1.0, &PairScan { radius: 5.0, points: 1, ceiling: 1e3 }).unwrap();
    assert_eq!(e.max_ratio, 1.0);
}

#[test]
fn weighted_lp_examples() {
    let grid = Grid::new(0.0, 1.0 / 64.0, 64).unwrap();
    let f = SampledFunction::from_fn(grid, |_| c(1.0));
    let two = Weight::constant(2.0);
    assert!((weighted_lp_norm(&f, Exponent::Finite(1.0), &two, None).unwrap() - 2.0).abs() < 1e-14);

    let grid = Grid::new(-8.0, 1.0 / 32.0, 512).unwrap();
    let g = bump(grid);
    let one = Weight::constant(1.0);
    for p in [Exponent::Finite(1.0), Exponent::Finite(2.5), Exponent::Infinity] {
        let a = weighted_lp_norm(&g, p, &one, None).unwrap();
        let b = lp_norm(&g, p, None).unwrap();
        assert!((a - b).abs() <= 1e-13 * b);
    }
    let mask: Vec<bool> = grid.points().map(|x| x > 0.0).collect();
    let a = weighted_lp_norm(&g, Exponent::Finite(2.0), &one, Some(&mask)).unwrap();
    let b = lp_norm(&g, Exponent::Finite(2.0), Some(&mask)).unwrap();
    assert!((a - b).abs() <= 1e-13 * b);
}

/// Double-double accumulation of `Σ |f|^p ω h`.
fn dd_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut hi, mut lo) = (0.0f64, 0.0f64);
    for t in terms {
        let s = hi + t;
        let bb = s - hi;
        let err = (hi - (s - bb)) + (t - bb);
        hi = s;
        lo += err;
    }
    hi + lo
}

#[test]
fn weighted_lp_matches_compensated_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grid = Grid::new(-50.0, 100.0 / 4096.0, 4096).unwrap();
    let vals: Vec<Complex<f64>> = (0..4096).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let f = SampledFunction::new(grid, vals.clone()).unwrap();
    let w = Weight::from_spec(&WeightSpec::Poly { alpha: 0.5, sign: 1 }, 1.0).unwrap();
    for p in [1.0, 1.5, 3.0] {
        let got = weighted_lp_norm(&f, Exponent::Finite(p), &w, None).unwrap();
        let sum = dd_sum(grid.points().zip(&vals).map(|(x, v)| v.norm().powf(p) * (1.0 + x.abs()).sqrt() * grid.spacing()));
        let want = sum.powf(1.0 / p);
        assert!((got - want).abs() <= 1e-12 * want, "p = {p}: {got} vs {want}");
    }
}

#[test]
fn jm_identity_and_inverse() {
    let grid = Grid::new(-8.0, 1.0 / 16.0, 256).unwrap();
    let f = bump(grid);
    let id = sobolev_jm(&f, 0.0).unwrap();
    let back = sobolev_jm(&sobolev_jm(&f, 1.5).unwrap(), -1.5).unwrap();
    for ((a, b), v) in id.values().iter().zip(back.values()).zip(f.values()) {
        assert!((a - v).norm() < 1e-12);
        assert!((b - v).norm() < 1e-10);
    }
}

#[test]
fn j2_is_identity_minus_laplacian() {
    let grid = Grid::new(-8.0, 1.0 / 16.0, 256).unwrap();
    let f = bump(grid);
    let j2 = sobolev_jm(&f, 2.0).unwrap();
    let d2 = spectral_derivative(&f, 2).unwrap();
    for ((a, v), d) in j2.values().iter().zip(f.values()).zip(d2.values()) {
        assert!((a - (v - d)).norm() < 1e-8);
    }
}

#[test]
fn sobolev_norm_oracles() {
    let grid = Grid::new(-8.0, 1.0 / 16.0, 256).unwrap();
    let f = bump(grid);
    let one = Weight::constant(1.0);
    for p in [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinity] {
        let a = sobolev_norm(&f, 0.0, p, &one).unwrap();
        let b = lp_norm(&f, p, None).unwrap();
        assert!((a - b).abs() <= 1e-12 * b);
    }
    let mut prev = 0.0;
    for m in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let v = sobolev_norm(&f, m, Exponent::Finite(2.0), &one).unwrap();
        assert!(v >= prev);
        prev = v;
    }
    let spec = dft_forward(&f).unwrap();
    let oracle: f64 = (0..grid.len())
        .map(|k| {
            let xi = grid.freq(k);
            (1.0 + 4.0 * std::f64::consts::PI.powi(2) * xi * xi) * spec.values()[k].norm_sqr()
        })
        .sum::<f64>()
        * grid.spacing();
    let got = sobolev_norm(&f, 1.0, Exponent::Finite(2.0), &one).unwrap();
    assert!((got * got - oracle).abs() <= 1e-10 * oracle);
}

proptest! {
    #[test]
    fn multiplier_real_even_and_at_least_one(xi in -100.0f64..100.0, m in 0.0f64..6.0) {
        let a = bessel_multiplier(xi, m);
        prop_assert!(a >= 1.0);
        prop_assert_eq!(a, bessel_multiplier(-xi, m));
        prop_assert!((bessel_multiplier(xi, -m) * a - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weighted_norm_homogeneous_in_weight(p in 1.0f64..4.0, s in 0.1f64..10.0) {
        let grid = Grid::new(-4.0, 1.0 / 16.0, 128).unwrap();
        let f = bump(grid);
        let w = Weight::from_spec(&WeightSpec::Poly { alpha: 0.5, sign: 1 }, 1.0).unwrap();
        let ws = Weight::new("scaled", 1.0, 1.0, move |x: f64| s * (1.0 + x.abs()).sqrt()).unwrap();
        let a = weighted_lp_norm(&f, Exponent::Finite(p), &w, None).unwrap();
        let b = weighted_lp_norm(&f, Exponent::Finite(p), &ws, None).unwrap();
        prop_assert!((b - s.powf(1.0 / p) * a).abs() <= 1e-12 * b);
    }
}

#[test]
fn weight_spec_serde() {
    let spec: WeightSpec = serde_json::from_str(r#"{"kind":"poly","alpha":0.5,"sign":1}"#).unwrap();
    assert_eq!(spec, WeightSpec::Poly { alpha: 0.5, sign: 1 });
    assert!(Weight::<f64>::from_spec(&WeightSpec::Poly { alpha: 0.5, sign: 2 }, 1.0).is_err());
}
