use approx::assert_abs_diff_eq;
use num_complex::Complex;
use proptest::prelude::*;

use bilop::signal::{dft_forward, make_bump, Grid, Interval, SampledFunction};
use bilop::tilemodel::{
    collection_validate, profile_seminorm, text, wave_packet, Collection, Tile, TriTile, WavePacketProfile,
};
use bilop::Error;

fn iv(c: f64, l: f64) -> Interval<f64> {
    Interval::new(c, l).unwrap()
}

fn grid() -> Grid<f64> {
    Grid::centered(16.0, 128).unwrap()
}

/// Tri-tile whose sub-frequencies are the consecutive thirds of `[x, x + 3/|I|]`.
fn stacked(center: f64, len: f64, x: f64) -> TriTile<f64> {
    let w = 1.0 / len;
    TriTile::new(
        iv(center, len),
        iv(x + 1.5 * w, 3.0 * w),
        [iv(x + 0.5 * w, w), iv(x + 1.5 * w, w), iv(x + 2.5 * w, w)],
    )
    .unwrap()
}

#[test]
fn unit_tile_packet_is_the_profile() {
    let g = grid();
    let p = WavePacketProfile::standard();
    let tile = Tile::new(iv(0.0, 1.0), iv(0.0, 1.0)).unwrap();
    let a = wave_packet(&tile, &p, &g).unwrap();
    let b = p.sample(&g).unwrap();
    assert_eq!(a, b);
    // real and even
    for j in 1..g.len() {
        assert_abs_diff_eq!(a.values()[j].im, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.values()[j].re, a.values()[g.len() - j].re, epsilon = 1e-12);
    }
}

#[test]
fn packet_matches_dilation_formula() {
    // Φ_P(x) = |I|^{-1/2} Φ((x − c)/|I|) e^{2πi x w}, compared on a grid where the
    // dilated profile is sampled exactly: |I| = 2, c = 1, spacing halves.
    let coarse = Grid::centered(16.0, 128).unwrap();
    let fine = Grid::centered(32.0, 128).unwrap();
    let p = WavePacketProfile::standard();
    let phi = p.sample(&coarse).unwrap();
    let tile = Tile::new(iv(2.0, 2.0), iv(0.75, 0.5)).unwrap();
    let pk = wave_packet(&tile, &p, &fine).unwrap();
    for j in 0..fine.len() {
        let x = fine.x(j);
        let s = (x - 2.0) / 2.0;
        // s lies on the coarse grid up to periodic wrap
        let k = ((s - coarse.origin()) / coarse.spacing()).round().rem_euclid(128.0) as usize;
        let want = phi.values()[k] * (1.0 / 2f64.sqrt()) * Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * x * 0.75);
        assert!((pk.values()[j] - want).norm() < 1e-10, "j {j}");
    }
}

#[test]
fn packet_resolution_errors() {
    let g = grid();
    let p = WavePacketProfile::standard();
    let narrow = Tile::new(iv(0.0, 0.25), iv(0.0, 4.0)).unwrap();
    assert!(matches!(wave_packet(&narrow, &p, &g), Err(Error::Resolution(_))));
    let high = Tile::new(iv(0.0, 1.0), iv(3.8, 1.0)).unwrap();
    assert!(matches!(wave_packet(&high, &p, &g), Err(Error::Resolution(_))));
    let long = Tile::new(iv(0.0, 16.0), iv(0.0, 1.0 / 16.0)).unwrap();
    assert!(matches!(wave_packet(&long, &p, &g), Err(Error::Resolution(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn packets_are_normalized_and_band_limited(a in 0usize..4, c in -8.0f64..8.0, w in -3.0f64..3.0) {
        let g = grid();
        let len = [0.5, 1.0, 2.0, 4.0][a];
        let half = 0.5 / len;
        prop_assume!(w.abs() + half <= g.nyquist());
        let tile = Tile::from_time(iv(c, len), w).unwrap();
        let pk = wave_packet(&tile, &WavePacketProfile::standard(), &g).unwrap();
        let s = dft_forward(&pk).unwrap();
        prop_assert!((s.l2_norm() - 1.0).abs() < 1e-8);
        prop_assert!(s.mass_outside(w - half, w + half) < 1e-8);
    }
}

#[test]
fn seminorm_examples() {
    let g = grid();
    assert_eq!(profile_seminorm(&SampledFunction::zeros(g), 3).unwrap(), 0.0);
    let bump = make_bump(0.0, 4.0, &g).unwrap();
    let c0 = profile_seminorm(&bump, 0).unwrap();
    let at_center = bump.values()[g.len() / 2].norm();
    assert_abs_diff_eq!(c0, at_center, epsilon = 1e-14);
    assert_abs_diff_eq!(c0, bump.max_abs(), epsilon = 1e-14);
    let phi = WavePacketProfile::standard().sample(&g).unwrap();
    let mut last = 0.0;
    for m in 0..5 {
        let c = profile_seminorm(&phi, m).unwrap();
        assert!(c >= last);
        last = c;
    }
}

#[test]
fn empty_collection_validates() {
    let r = collection_validate(&Collection::<f64>::empty());
    assert!(r.pass);
    assert_eq!(r.time_overlap, 0.0);
    assert_eq!(r.freq_overlap, 0.0);
}

/// Tri-tile on the dyadic interval `[4m, 4m + 4]/|I|` carrying quarters 0, 1 and 3.
fn quartered(center: f64, len: f64, m: i32) -> TriTile<f64> {
    let w = 1.0 / len;
    let lo = 4.0 * m as f64 * w;
    TriTile::new(
        iv(center, len),
        iv(lo + 2.0 * w, 4.0 * w),
        [iv(lo + 0.5 * w, w), iv(lo + 1.5 * w, w), iv(lo + 3.5 * w, w)],
    )
    .unwrap()
}

/// Dyadic family on two well separated scales, `|I| = 1` and `|I| = 8`.
fn dyadic_family() -> Collection<f64> {
    let mut tiles = Vec::new();
    for k in 0..16 {
        for m in [-1, 0] {
            tiles.push(quartered(-7.5 + k as f64, 1.0, m));
        }
    }
    for c in [-4.0, 4.0] {
        for m in -4..4 {
            tiles.push(quartered(c, 8.0, m));
        }
    }
    Collection::new(tiles)
}

#[test]
fn dyadic_family_passes_with_overlap_two() {
    let r = collection_validate(&dyadic_family());
    assert!(r.pass, "{r:?}");
    assert_eq!(r.time_overlap, 1.0);
    assert_eq!(r.freq_overlap, 2.0);
}

#[test]
fn consecutive_dyadic_scales_overlap_three() {
    let mut tiles = Vec::new();
    for a in 0..3 {
        let len = 2f64.powi(a);
        let mut c = -8.0 + len / 2.0;
        while c < 8.0 {
            tiles.push(stacked(c, len, 0.0));
            c += len;
        }
    }
    let r = collection_validate(&Collection::new(tiles));
    assert_eq!(r.time_overlap, 3.0);
}

#[test]
fn duplicated_tri_tiles_fail_with_witness() {
    let t = stacked(0.5, 1.0, 0.0);
    let c = Collection::new(vec![t; 10]);
    let r = collection_validate(&c);
    assert!(!r.pass);
    assert_eq!(r.time_overlap, 10.0);
    assert_eq!(r.duplicates, 9);
    assert!(r.witnesses.iter().any(|w| w.contains("time overlap 10 at x = 0.5")), "{:?}", r.witnesses);
}

#[test]
fn validation_flags_area_and_nesting() {
    let big = TriTile::new(iv(0.5, 1.0), iv(2.5, 5.0), [iv(0.5, 1.0), iv(1.5, 1.0), iv(4.5, 1.0)]).unwrap();
    let r = collection_validate(&Collection::new(vec![big]));
    assert!(!r.area_ok && !r.pass);
    // ω_{s1} of the second tri-tile sits strictly inside ω_s of the first
    let a = stacked(0.5, 1.0, 0.0);
    let b = TriTile::new(iv(0.5, 2.0), iv(1.0, 4.0 / 2.0 * 1.5), [iv(0.25, 0.5), iv(1.25, 0.5), iv(1.75, 0.5)]).unwrap();
    let r = collection_validate(&Collection::new(vec![a, b]));
    assert!(!r.nesting_ok, "{r:?}");
}

#[test]
fn text_round_trip() {
    let c = dyadic_family();
    let s = text::to_text(&c).unwrap();
    assert!(s.starts_with("# tri-tiles 48\n"));
    assert!(s.contains("# time_overlap 1"));
    let back: Collection<f64> = text::from_text(&s).unwrap();
    assert_eq!(back, c);
}

#[test]
fn text_errors_carry_line_numbers() {
    let bad = "# tri-tiles 1\n0.5 1 1.5 3 0.5 1 1.5 1 2.5\n";
    match text::from_text::<f64>(bad) {
        Err(Error::Format(m)) => assert!(m.contains("line 2"), "{m}"),
        other => panic!("{other:?}"),
    }
    let overlap = "0.5 1 1.5 3 0.5 1 1.0 1 2.5 1\n";
    assert!(matches!(text::from_text::<f64>(overlap), Err(Error::Format(_))));
    let count = "# tri-tiles 2\n0.5 1 1.5 3 0.5 1 1.5 1 2.5 1\n";
    assert!(text::from_text::<f64>(count).is_err());
}

#[test]
fn corpus_files_parse_and_validate() {
    for entry in std::fs::read_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data")).unwrap() {
        let path = entry.unwrap().path();
        let c: Collection<f64> = text::read_collection(&path).unwrap();
        assert!(c.len() <= 12 && !c.is_empty());
        let r = collection_validate(&c);
        assert!(r.area_ok && r.disjoint_ok, "{path:?}");
    }
}
