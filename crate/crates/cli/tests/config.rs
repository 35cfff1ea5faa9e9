use bilop_cli::config::REQUIRED_KEYS;
use bilop_cli::{parse_config, parse_config_with, Experiment, Origin, SymbolKind};
use proptest::prelude::*;

const MINIMAL: &str = "kind = holder_sweep\n[symbol]\nkind = product\n[grid]\nn = 128\n\nseed = 1\n";

#[test]
fn empty_file_lists_every_required_key() {
    let errs = parse_config("").unwrap_err();
    let keys: Vec<&str> = errs.iter().map(|e| e.key.as_str()).collect();
    for k in REQUIRED_KEYS {
        assert!(keys.contains(&k), "{k} missing from {keys:?}");
    }
    assert_eq!(errs.len(), REQUIRED_KEYS.len());
    assert!(errs.iter().all(|e| e.origin == Origin::Missing));
}

#[test]
fn minimal_config_parses_and_round_trips() {
    // `seed` after a section header belongs to that section, so keep it top level
    let text = "kind = holder_sweep\nseed = 1\n[symbol]\nkind = product\n[grid]\nn = 128\n";
    let cfg = parse_config(text).unwrap();
    assert_eq!(cfg.kind, Experiment::HolderSweep);
    assert_eq!(cfg.symbol.kind, SymbolKind::Product);
    assert_eq!(cfg.grid.n, 128);
    assert_eq!(cfg.seed, 1);
    let again = parse_config(&cfg.to_text()).unwrap();
    assert_eq!(again, cfg);
    assert_eq!(again.to_text(), cfg.to_text());
}

#[test]
fn key_after_section_is_scoped_to_it() {
    let errs = parse_config(MINIMAL).unwrap_err();
    assert!(errs.iter().any(|e| e.key == "grid.seed" && e.origin == Origin::Line(7) && e.message.contains("unknown")));
    assert!(errs.iter().any(|e| e.key == "seed" && e.origin == Origin::Missing));
}

#[test]
fn n_not_power_of_two_is_one_precise_error() {
    let text = "kind = holder_sweep\nseed = 1\nsymbol.kind = product\ngrid.n = 100\n";
    let errs = parse_config(text).unwrap_err();
    assert_eq!(errs.len(), 1, "{errs:?}");
    let e = &errs[0];
    assert_eq!(e.key, "grid.n");
    assert_eq!(e.origin, Origin::Line(4));
    assert!(e.message.contains("power of two"), "{}", e.message);
    assert!(e.to_string().starts_with("line 4: grid.n"), "{e}");
}

#[test]
fn all_errors_are_reported_with_lines() {
    let text = "kind = nonsense\nseed = -3\n[symbol]\nkind = product\ncolour = red\n[grid]\nn = 128\nperiod = -1\nperiod = 2\n";
    let errs = parse_config(text).unwrap_err();
    let at = |line: usize, key: &str| errs.iter().any(|e| e.origin == Origin::Line(line) && e.key == key);
    assert!(at(1, "kind"), "{errs:?}");
    assert!(at(2, "seed"));
    assert!(at(5, "symbol.colour"));
    assert!(at(8, "grid.period"));
    assert!(at(9, "grid.period"));
    assert_eq!(errs.len(), 5, "{errs:?}");
}

#[test]
fn syntax_errors_carry_lines() {
    let errs = parse_config("kind holder_sweep\n[grid\n").unwrap_err();
    assert!(errs.iter().any(|e| e.origin == Origin::Line(1)));
    assert!(errs.iter().any(|e| e.origin == Origin::Line(2)));
}

#[test]
fn range_checks() {
    let base = "kind = holder_sweep\nseed = 1\nsymbol.kind = bht\ngrid.n = 128\n";
    for (extra, key) in [
        ("exponents.triples = 1,2,0.6666666666666666", "exponents.triples"),
        ("exponents.triples = 2,2,2", "exponents.triples"),
        ("exponents.inv_p = 0.5, 0.5, 0.5", "exponents.inv_p"),
        ("symbol.lambda2 = 1", "symbol.lambda"),
        ("ladder.offsets = 2, 1", "ladder.offsets"),
        ("ensemble.members = 0", "ensemble.members"),
        ("interval.length = 0", "interval.length"),
        ("grid.n = 8", "grid.n"),
        ("weight.kind = cubic", "weight.kind"),
    ] {
        let errs = parse_config(&format!("{base}{extra}\n")).unwrap_err();
        assert_eq!(errs.len(), 1, "{extra}: {errs:?}");
        assert_eq!(errs[0].key, key, "{extra}");
    }
}

#[test]
fn weighted_needs_a_weight() {
    let base = "kind = weighted_continuity\nseed = 1\nsymbol.kind = bht\ngrid.n = 128\n";
    let errs = parse_config(base).unwrap_err();
    assert_eq!(errs.len(), 1);
    assert_eq!(errs[0].key, "weight.kind");
    let cfg = parse_config(&format!("{base}[weight]\nkind = poly\nalpha = 0.5\nsign = -1\n")).unwrap();
    let w = cfg.weight.clone().unwrap();
    assert_eq!(w.theta, 0.5);
    assert_eq!(parse_config(&cfg.to_text()).unwrap(), cfg);
}

#[test]
fn flags_override_file_values() {
    let text = "kind = holder_sweep\nseed = 1\nsymbol.kind = product\ngrid.n = 128\n";
    let cfg = parse_config_with(text, &[("grid.n".into(), "256".into()), ("seed".into(), "9".into())]).unwrap();
    assert_eq!((cfg.grid.n, cfg.seed), (256, 9));
    let errs = parse_config_with(text, &[("grid.n".into(), "100".into())]).unwrap_err();
    assert_eq!(errs.len(), 1);
    assert_eq!(errs[0].origin, Origin::Flag);
    let errs = parse_config_with(text, &[("grid.m".into(), "1".into())]).unwrap_err();
    assert_eq!(errs[0].origin, Origin::Flag);
}

#[test]
fn period_default_depends_on_kind() {
    let cfg = parse_config("kind = offdiag_decay\nseed = 0\nsymbol.kind = product\ngrid.n = 256\n").unwrap();
    assert_eq!(cfg.grid.period, 256.0);
    let cfg = parse_config("kind = limsup_bound\nseed = 0\nsymbol.kind = product\ngrid.n = 256\n").unwrap();
    assert_eq!(cfg.grid.period, 32.0);
}

proptest! {
    #[test]
    fn text_form_round_trips(
        seed in any::<u64>(),
        log_n in 4u32..12,
        period in 1.0f64..1e3,
        center in -10.0f64..10.0,
        length in 1e-3f64..10.0,
        p in 1.5f64..20.0,
        q in 1.5f64..20.0,
        members in 1usize..500,
        kind in 0usize..6,
    ) {
        let t = bilop::experiments::Triple::holder(p, q);
        let text = format!(
            "kind = {}\nseed = {seed}\nsymbol.kind = truncated_bht\ngrid.n = {}\ngrid.period = {period}\n\
             interval.center = {center}\ninterval.length = {length}\nexponents.triples = {},{},{}\n\
             ensemble.members = {members}\nweight.kind = exp\nweight.rate = {period}\n",
            Experiment::ALL[kind].name(), 1usize << log_n, t.p, t.q, t.r
        );
        let cfg = parse_config(&text).unwrap();
        prop_assert_eq!(parse_config(&cfg.to_text()).unwrap(), cfg);
    }
}
