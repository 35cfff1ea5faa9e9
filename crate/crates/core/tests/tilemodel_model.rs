use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bilop::signal::{make_bump, Grid, Interval, SampledFunction};
use bilop::tilemodel::{
    model_sum_decompose, model_sum_eval, trilinear_form, wave_packet, Collection, ModelSum, TriTile, WavePacketProfile,
};
use bilop::Error;

type C = Complex<f64>;

fn iv(c: f64, l: f64) -> Interval<f64> {
    Interval::new(c, l).unwrap()
}

fn grid() -> Grid<f64> {
    Grid::centered(16.0, 128).unwrap()
}

fn stacked(center: f64, len: f64, x: f64) -> TriTile<f64> {
    let w = 1.0 / len;
    TriTile::new(
        iv(center, len),
        iv(x + 1.5 * w, 3.0 * w),
        [iv(x + 0.5 * w, w), iv(x + 1.5 * w, w), iv(x + 2.5 * w, w)],
    )
    .unwrap()
}

fn random_collection(rng: &mut ChaCha8Rng, count: usize) -> Collection<f64> {
    let tiles = (0..count)
        .map(|_| {
            let len: f64 = [0.5, 1.0, 2.0, 4.0][rng.gen_range(0..4)];
            let w = 1.0 / len;
            let steps = (7.0 / w).floor() as i32 - 3;
            let x = -3.5 + w * rng.gen_range(0..=steps) as f64;
            let c = -8.0 + len * (rng.gen_range(0..(16.0 / len) as i32) as f64 + 0.5);
            stacked(c, len, x)
        })
        .collect();
    Collection::new(tiles)
}

fn random_fn(rng: &mut ChaCha8Rng, g: &Grid<f64>) -> SampledFunction<f64> {
    let c = rng.gen_range(-4.0..4.0);
    let xi = rng.gen_range(-2.0..2.0);
    make_bump(c, rng.gen_range(2.0..6.0), g).unwrap().modulate(2.0 * std::f64::consts::PI * xi)
}

fn random_eps(rng: &mut ChaCha8Rng, n: usize) -> Vec<C> {
    (0..n).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// `∫ f conj(φ)` by a plain loop over samples.
fn quad(f: &SampledFunction<f64>, phi: &SampledFunction<f64>) -> C {
    let h = f.grid().spacing();
    f.values().iter().zip(phi.values()).map(|(a, b)| a * b.conj() * h).sum()
}

#[test]
fn empty_model_sum_is_zero() {
    let g = grid();
    let m = ModelSum::new(Collection::empty(), vec![]).unwrap();
    let f = make_bump(0.0, 4.0, &g).unwrap();
    assert_eq!(model_sum_eval(&m, &f, &f).unwrap().max_abs(), 0.0);
}

#[test]
fn single_tri_tile_is_rank_one() {
    let g = grid();
    let s = stacked(1.0, 2.0, -0.5);
    let eps = C::new(0.3, -0.7);
    let m = ModelSum::new(Collection::new(vec![s]), vec![eps]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (f, gg) = (random_fn(&mut rng, &g), random_fn(&mut rng, &g));
    let p = WavePacketProfile::standard();
    let phi: Vec<_> = (0..3).map(|i| wave_packet(&s.tile(i).unwrap(), &p, &g).unwrap()).collect();
    let scalar = eps / 2f64.sqrt() * quad(&f, &phi[0]) * quad(&gg, &phi[1]);
    let want = phi[2].scale(scalar);
    let got = model_sum_eval(&m, &f, &gg).unwrap();
    assert!(got.max_abs_diff(&want).unwrap() < 1e-13 * (1.0 + want.max_abs()));
}

#[test]
fn linear_in_coefficients() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let c = random_collection(&mut rng, 20);
    let eps = random_eps(&mut rng, 20);
    let twice: Vec<C> = eps.iter().map(|e| e * 2.0).collect();
    let (f, gg) = (random_fn(&mut rng, &g), random_fn(&mut rng, &g));
    let a = model_sum_eval(&ModelSum::new(c.clone(), eps).unwrap(), &f, &gg).unwrap();
    let b = model_sum_eval(&ModelSum::new(c, twice).unwrap(), &f, &gg).unwrap();
    assert!(a.scale(C::new(2.0, 0.0)).max_abs_diff(&b).unwrap() < 1e-14 * (1.0 + b.max_abs()));
}

#[test]
fn normalize_keeps_the_operator() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = random_collection(&mut rng, 10);
    let eps: Vec<C> = random_eps(&mut rng, 10).into_iter().map(|e| e * 7.0).collect();
    let mut m = ModelSum::new(c, eps).unwrap();
    let (f, gg) = (random_fn(&mut rng, &g), random_fn(&mut rng, &g));
    let before = model_sum_eval(&m, &f, &gg).unwrap();
    m.normalize();
    assert!((m.max_eps() - 1.0).abs() < 1e-15);
    let after = model_sum_eval(&m, &f, &gg).unwrap();
    assert!(before.max_abs_diff(&after).unwrap() < 1e-13 * (1.0 + before.max_abs()));
}

#[test]
fn only_first_corona_inside_double_interval() {
    let g = grid();
    let i = iv(0.0, 4.0);
    let tiles = vec![stacked(-1.0, 2.0, 0.0), stacked(0.5, 1.0, -1.0), stacked(2.0, 4.0, 0.5)];
    let m = ModelSum::new(Collection::new(tiles), vec![C::new(1.0, 0.0); 3]).unwrap();
    let f = make_bump(0.5, 3.0, &g).unwrap();
    let h = make_bump(-0.5, 2.0, &g).unwrap();
    let d = model_sum_decompose(&m, &i, &f, &h, 2.0).unwrap();
    assert!(d.t1.is_empty());
    for ((k1, k2), piece) in &d.t0 {
        if (*k1, *k2) == (0, 0) {
            assert!(piece.max_abs() > 0.0);
        } else {
            assert_eq!(piece.max_abs(), 0.0, "piece ({k1}, {k2})");
        }
    }
}

#[test]
fn decomposition_reconstructs() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let i = iv(0.5, 4.0);
    for _ in 0..5 {
        let n = rng.gen_range(1..=64);
        let c = random_collection(&mut rng, n);
        let m = ModelSum::new(c, random_eps(&mut rng, n)).unwrap();
        let (f, gg) = (random_fn(&mut rng, &g), random_fn(&mut rng, &g));
        let whole = model_sum_eval(&m, &f, &gg).unwrap();
        let d = model_sum_decompose(&m, &i, &f, &gg, 2.0).unwrap();
        assert_eq!(d.t0_terms.len() + d.t1_terms.values().map(Vec::len).sum::<usize>(), n);
        assert!(d.sum(&g).unwrap().max_abs_diff(&whole).unwrap() <= 1e-10);
    }
}

#[test]
fn scale_bucketing() {
    let g = grid();
    let i = iv(0.0, 2.0);
    // |I_s| = |I|/2, far outside 2I
    let far = stacked(6.5, 1.0, 0.0);
    let m = ModelSum::new(Collection::new(vec![far]), vec![C::new(1.0, 0.0)]).unwrap();
    let f = make_bump(0.0, 2.0, &g).unwrap();
    let d = model_sum_decompose(&m, &i, &f, &f, 2.0).unwrap();
    assert!(d.t0_terms.is_empty());
    assert_eq!(d.t1_terms.keys().copied().collect::<Vec<_>>(), vec![-1]);
    assert!(d.t1.keys().all(|k| k.2 == -1));
}

#[test]
fn oversized_tile_is_a_precondition_error() {
    let g = grid();
    let big = stacked(0.0, 4.0, 0.0);
    let m = ModelSum::new(Collection::new(vec![big]), vec![C::new(1.0, 0.0)]).unwrap();
    let f = make_bump(0.0, 2.0, &g).unwrap();
    match model_sum_decompose(&m, &iv(0.0, 1.0), &f, &f, 2.0) {
        Err(Error::Precondition(msg)) => assert!(msg.contains("tri-tile 0")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn trilinear_form_examples() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = random_collection(&mut rng, 12);
    let eps = random_eps(&mut rng, 12);
    let m = ModelSum::new(c.clone(), eps.clone()).unwrap();
    let (f1, f2, f3) = (random_fn(&mut rng, &g), random_fn(&mut rng, &g), random_fn(&mut rng, &g));
    let i = iv(0.5, 6.0);
    assert_eq!(trilinear_form(&m, &f1, &f2, &SampledFunction::zeros(g), &i).unwrap(), C::new(0.0, 0.0));

    // term by term
    let p = WavePacketProfile::standard();
    let mask = i.mask(&g);
    let f3i = f3.restrict(&mask).unwrap();
    let mut want = C::new(0.0, 0.0);
    for (s, e) in c.tiles.iter().zip(&eps) {
        let phi: Vec<_> = (0..3).map(|k| wave_packet(&s.tile(k).unwrap(), &p, &g).unwrap()).collect();
        want += e / s.time.length().sqrt() * quad(&f1, &phi[0]) * quad(&f2, &phi[1]) * quad(&phi[2], &f3i);
    }
    let got = trilinear_form(&m, &f1, &f2, &f3, &i).unwrap();
    assert!((got - want).norm() < 1e-12 * (1.0 + want.norm()), "{got} vs {want}");

    // conjugating inputs and coefficients conjugates the form; the standard
    // profile is real and even, so conj(φ_P) is the packet of the reflected tile
    let reflected = Collection::new(c.tiles.iter().map(|t| t.reflect_frequency()).collect());
    let conj_eps: Vec<C> = eps.iter().map(|e| e.conj()).collect();
    let mc = ModelSum::new(reflected, conj_eps).unwrap();
    let back = trilinear_form(&mc, &f1.conj(), &f2.conj(), &f3.conj(), &i).unwrap();
    assert!((back - got.conj()).norm() < 1e-12 * (1.0 + got.norm()));
}
