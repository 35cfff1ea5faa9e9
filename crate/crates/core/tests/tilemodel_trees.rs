use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bilop::signal::{make_bump, Grid, Interval, SampledFunction};
use bilop::tilemodel::{
    size_bound_check, size_star, size_star_sampled, size_tree, text, tree_proposition_diagnostic, Collection,
    PacketCoefficients, Tree, TriTile, WavePacketProfile,
};
use bilop::Error;

fn iv(c: f64, l: f64) -> Interval<f64> {
    Interval::new(c, l).unwrap()
}

fn grid() -> Grid<f64> {
    Grid::centered(16.0, 128).unwrap()
}

fn corpus() -> Vec<Collection<f64>> {
    let mut paths: Vec<_> = std::fs::read_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    paths.iter().map(|p| text::read_collection(p).unwrap()).collect()
}

fn random_fn(rng: &mut ChaCha8Rng, g: &Grid<f64>) -> SampledFunction<f64> {
    let c = rng.gen_range(-4.0..4.0);
    let xi = rng.gen_range(-1.0..1.0);
    make_bump(c, rng.gen_range(2.0..6.0), g).unwrap().modulate(2.0 * std::f64::consts::PI * xi)
}

fn is_tree(top: &TriTile<f64>, i: usize, s: &TriTile<f64>) -> bool {
    top.time.contains_interval(&s.time) && s.subs[i - 1].contains_interval(&top.subs[i - 1])
}

/// Sup over every subset of `Q` that is an `i`-tree (`i ≠ j`) for some top in `Q`.
fn powerset_oracle(q: &Collection<f64>, c: &PacketCoefficients<f64>) -> f64 {
    let n = q.len();
    let mut best = 0.0f64;
    for mask in 1u32..(1u32 << n) {
        let members: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
        for top in &q.tiles {
            for i in (1..=3).filter(|&i| i != c.j) {
                if members.iter().all(|&m| is_tree(top, i, &q.tiles[m])) {
                    let sum = members.iter().fold(0.0, |a, &m| a + c.values[m].norm_sqr());
                    best = best.max((sum / top.time.length()).sqrt());
                }
            }
        }
    }
    best
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

/// Eight tri-tiles nested in time and frequency around `ξ = 0.1`.
fn nested_eight() -> Collection<f64> {
    Collection::new(vec![
        stacked(-2.0, 4.0, 0.0),
        stacked(-3.0, 2.0, -0.5),
        stacked(-1.0, 2.0, 0.0),
        stacked(-3.5, 1.0, -1.0),
        stacked(-2.5, 1.0, -2.0),
        stacked(-1.5, 1.0, 0.0),
        stacked(-0.5, 1.0, -1.0),
        stacked(2.0, 4.0, -0.25),
    ])
}

#[test]
fn tree_invariant_is_checked() {
    let q = nested_eight();
    let top = q.tiles[0];
    assert!(Tree::new(&q, 1, top, vec![0, 2, 5]).is_ok());
    assert!(matches!(Tree::new(&q, 1, top, vec![7]), Err(Error::Invariant(_))));
    assert!(matches!(Tree::new(&q, 4, top, vec![]), Err(Error::Parameter(_))));
    let t = Tree::maximal(&q, 1, top).unwrap();
    for &m in &t.members {
        assert!(is_tree(&top, 1, &q.tiles[m]));
    }
}

#[test]
fn size_tree_examples() {
    let g = grid();
    let q = nested_eight();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = random_fn(&mut rng, &g);
    let c = PacketCoefficients::new(&q, &f, 1, &WavePacketProfile::standard()).unwrap();
    let top = q.tiles[0];
    assert_eq!(size_tree(&Tree::new(&q, 2, top, vec![]).unwrap(), &c).unwrap(), 0.0);
    let single = size_tree(&Tree::new(&q, 2, top, vec![0]).unwrap(), &c).unwrap();
    assert!((single - c.values[0].norm() / 2.0).abs() < 1e-15);
    let full = Tree::maximal(&q, 1, top).unwrap();
    let mut last = 0.0;
    for k in 0..=full.members.len() {
        let s = size_tree(&Tree::new(&q, 1, top, full.members[..k].to_vec()).unwrap(), &c).unwrap();
        assert!(s >= last);
        last = s;
    }
}

#[test]
fn size_star_small_cases() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let f = random_fn(&mut rng, &g);
    let p = WavePacketProfile::standard();
    let empty = Collection::<f64>::empty();
    let c = PacketCoefficients::new(&empty, &f, 2, &p).unwrap();
    assert_eq!(size_star(&empty, &c).unwrap(), 0.0);
    let one = Collection::new(vec![stacked(0.5, 1.0, 0.0)]);
    let c = PacketCoefficients::new(&one, &f, 2, &p).unwrap();
    assert_eq!(size_star(&one, &c).unwrap(), c.values[0].norm());
}

#[test]
fn size_star_matches_powerset_on_nested_family() {
    let g = grid();
    let q = nested_eight();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for j in 1..=3 {
        let f = random_fn(&mut rng, &g);
        let c = PacketCoefficients::new(&q, &f, j, &WavePacketProfile::standard()).unwrap();
        assert_eq!(size_star(&q, &c).unwrap(), powerset_oracle(&q, &c));
    }
}

#[test]
fn size_star_matches_powerset_on_corpus() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for q in corpus() {
        assert!(q.len() <= 12);
        for j in 1..=3 {
            let f = random_fn(&mut rng, &g);
            let c = PacketCoefficients::new(&q, &f, j, &WavePacketProfile::standard()).unwrap();
            assert_eq!(size_star(&q, &c).unwrap(), powerset_oracle(&q, &c));
        }
    }
}

#[test]
fn size_star_limit_and_sampling() {
    let g = grid();
    let tiles: Vec<_> = (0..65).map(|k| stacked(-8.0 + 0.25 * (k % 64) as f64 + 0.5, 1.0, (k / 64) as f64)).collect();
    let q = Collection::new(tiles);
    let f = make_bump(0.0, 4.0, &g).unwrap();
    let c = PacketCoefficients::new(&q, &f, 1, &WavePacketProfile::standard()).unwrap();
    assert!(matches!(size_star(&q, &c), Err(Error::Size(_))));
    let small = Collection::new(q.tiles[..40].to_vec());
    let cs = PacketCoefficients::new(&small, &f, 1, &WavePacketProfile::standard()).unwrap();
    let exact = size_star(&small, &cs).unwrap();
    let (est, used) = size_star_sampled(&small, &cs, 10, 3).unwrap();
    assert_eq!(used, 10);
    assert!(est <= exact);
    assert_eq!(size_star_sampled(&small, &cs, 100, 3).unwrap().0, exact);
}

#[test]
fn size_bound_examples() {
    let g = grid();
    let q = nested_eight();
    let p = WavePacketProfile::standard();
    let r = size_bound_check(&q, &SampledFunction::zeros(g), 1, 4.0, &p).unwrap();
    assert_eq!((r.lhs, r.rhs, r.ratio), (0.0, 0.0, 0.0));

    // translation scan inside I_s = [−4, 0]
    let ratios: Vec<f64> = (0..9)
        .map(|k| {
            let f = make_bump(-3.0 + 0.25 * k as f64, 4.0, &g).unwrap();
            size_bound_check(&q, &f, 1, 4.0, &p).unwrap().ratio
        })
        .collect();
    let mid = ratios[4];
    for r in &ratios {
        assert!(r.is_finite() && (r / mid - 1.0).abs() < 0.2, "{ratios:?}");
    }

    // N sweep
    let f = make_bump(-2.0, 2.0, &g).unwrap();
    let sweep: Vec<f64> = [2.0, 3.0, 4.0, 5.0, 6.0].iter().map(|&n| size_bound_check(&q, &f, 1, n, &p).unwrap().ratio).collect();
    for w in sweep.windows(2) {
        assert!(w[1] < 2.0 * w[0], "{sweep:?}");
    }
}

#[test]
fn proposition_diagnostic() {
    let g = grid();
    let p = WavePacketProfile::standard();
    let profiles = [p.clone(), p.clone(), p];
    let q = nested_eight();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let theta = [0.4, 0.3, 0.3];
    let zero = SampledFunction::zeros(g);
    let f = random_fn(&mut rng, &g);
    let r = tree_proposition_diagnostic(&q, [&f, &zero, &f], theta, &profiles).unwrap();
    assert_eq!(r.lhs, 0.0);
    assert!(matches!(
        tree_proposition_diagnostic(&q, [&f, &f, &f], [0.5, 0.5, 0.5], &profiles),
        Err(Error::Parameter(_))
    ));

    let mut all = corpus();
    while all.len() < 50 {
        let n = rng.gen_range(1..=16);
        let tiles = (0..n)
            .map(|_| {
                let len: f64 = [1.0, 2.0, 4.0][rng.gen_range(0..3)];
                let w = 1.0 / len;
                let x = w * rng.gen_range(-(2.0 / w) as i32..=(0.5 / w) as i32) as f64;
                let c = -8.0 + len * (rng.gen_range(0..(16.0 / len) as i32) as f64 + 0.5);
                stacked(c, len, x)
            })
            .collect();
        all.push(Collection::new(tiles));
    }
    for q in &all {
        let fs: Vec<_> = (0..3).map(|_| random_fn(&mut rng, &g)).collect();
        let r = tree_proposition_diagnostic(q, [&fs[0], &fs[1], &fs[2]], theta, &profiles).unwrap();
        assert!(r.ratio.is_finite());
        let scaled: Vec<_> = fs.iter().map(|f| f.scale(Complex::new(0.0, 3.0))).collect();
        let s = tree_proposition_diagnostic(q, [&scaled[0], &scaled[1], &scaled[2]], theta, &profiles).unwrap();
        assert!((s.ratio - r.ratio).abs() <= 1e-12 * r.ratio.max(1e-300), "{} vs {}", s.ratio, r.ratio);
    }
}
