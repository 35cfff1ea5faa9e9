//! Line-oriented `key = value` run configuration with `[section]` headers.
//!
//! A key `n` under `[grid]` is addressed as `grid.n`; dotted keys may also be
//! written at top level. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use bilop::experiments::{RestrictedConfig, Triple};
use bilop::weights::WeightSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    OffdiagDecay,
    HolderSweep,
    WeightedContinuity,
    RestrictedType,
    LimsupBound,
    LocalEstimate,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::OffdiagDecay,
        Experiment::HolderSweep,
        Experiment::WeightedContinuity,
        Experiment::RestrictedType,
        Experiment::LimsupBound,
        Experiment::LocalEstimate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::OffdiagDecay => "offdiag_decay",
            Experiment::HolderSweep => "holder_sweep",
            Experiment::WeightedContinuity => "weighted_continuity",
            Experiment::RestrictedType => "restricted_type",
            Experiment::LimsupBound => "limsup_bound",
            Experiment::LocalEstimate => "local_estimate",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    /// `σ ≡ 1`, so `T(f, g) = f·g`.
    Product,
    /// `iπ·sign(λ1α + λ2β)`.
    Bht,
    /// The sign symbol cut off smoothly within `1/L` of its singular line.
    TruncatedBht,
}

impl SymbolKind {
    pub fn name(self) -> &'static str {
        match self {
            SymbolKind::Product => "product",
            SymbolKind::Bht => "bht",
            SymbolKind::TruncatedBht => "truncated_bht",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [SymbolKind::Product, SymbolKind::Bht, SymbolKind::TruncatedBht].into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSpec {
    pub kind: SymbolKind,
    pub lambda: (f64, f64),
    /// Truncation length `L`.
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub period: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSpec {
    pub center: f64,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightConfig {
    pub spec: WeightSpec,
    pub theta: f64,
    pub l: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderSpec {
    /// Separations of `E` and `F` from `I` in units of `|I|`.
    pub offsets: Vec<f64>,
    /// Interval lengths in units of `L`.
    pub lengths: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: Experiment,
    pub symbol: SymbolSpec,
    pub grid: GridSpec,
    pub triples: Vec<Triple>,
    pub inv_p: [f64; 3],
    pub interval: IntervalSpec,
    pub weight: Option<WeightConfig>,
    pub ladder: LadderSpec,
    pub members: usize,
    pub configurations: usize,
    pub delta: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
}

/// Where a config value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag,
    Missing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub origin: Origin,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.origin {
            Origin::Line(l) => write!(f, "line {l}: {}: {}", self.key, self.message),
            Origin::Flag => write!(f, "flag --{}: {}", self.key, self.message),
            Origin::Missing => write!(f, "missing required key {}: {}", self.key, self.message),
        }
    }
}

pub const REQUIRED_KEYS: [&str; 4] = ["kind", "seed", "symbol.kind", "grid.n"];

pub const KNOWN_KEYS: [&str; 25] = [
    "kind",
    "seed",
    "symbol.kind",
    "symbol.lambda1",
    "symbol.lambda2",
    "symbol.scale",
    "grid.n",
    "grid.period",
    "exponents.triples",
    "exponents.inv_p",
    "interval.center",
    "interval.length",
    "weight.kind",
    "weight.value",
    "weight.alpha",
    "weight.sign",
    "weight.rate",
    "weight.theta",
    "weight.l",
    "ladder.offsets",
    "ladder.lengths",
    "ensemble.members",
    "restricted.configurations",
    "local.delta",
    "output.dir",
];

const DEFAULT_TRIPLES: &str = "2,2,1; 4,4,2; 2,inf,2";
const DEFAULT_INV_P: &str = "0.6, 0.6, -0.2";
const DEFAULT_OFFSETS: &str = "1, 2, 4, 8, 16, 32, 64";
const DEFAULT_LENGTHS: &str = "1, 2, 4, 8, 16, 32";
pub const DEFAULT_OUTPUT_DIR: &str = "bilop-out";

/// Keys and values as written, before typing. Later assignments to the same
/// key are errors within a file and overrides when they come from flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, Origin)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> (Self, Vec<ConfigError>) {
        let mut raw = Self::default();
        let mut errors = Vec::new();
        let mut section = String::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let err = |key: &str, message: String| ConfigError { origin: Origin::Line(lineno), key: key.to_string(), message };
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                match rest.strip_suffix(']').map(str::trim) {
                    Some(name) if !name.is_empty() && !name.contains(char::is_whitespace) => section = name.to_string(),
                    _ => errors.push(err(line, "malformed section header".into())),
                }
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                errors.push(err(line, "expected `key = value`".into()));
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            let key = if section.is_empty() || k.contains('.') { k.to_string() } else { format!("{section}.{k}") };
            if !KNOWN_KEYS.contains(&key.as_str()) {
                errors.push(err(&key, "unknown key".into()));
                continue;
            }
            if let Some((_, Origin::Line(first))) = raw.entries.get(&key) {
                errors.push(err(&key, format!("duplicate key, first set on line {first}")));
                continue;
            }
            raw.entries.insert(key, (v.to_string(), Origin::Line(lineno)));
        }
        (raw, errors)
    }

    /// Sets `key` from a command-line flag, replacing any file value.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), ConfigError> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError { origin: Origin::Flag, key: key.to_string(), message: "unknown key".into() });
        }
        self.entries.insert(key.to_string(), (value.into(), Origin::Flag));
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, Vec<ConfigError>> {
    parse_config_with(text, &[])
}

/// As [`parse_config`], with `(key, value)` overrides applied on top.
pub fn parse_config_with(text: &str, overrides: &[(String, String)]) -> Result<RunConfig, Vec<ConfigError>> {
    let (mut raw, mut errors) = RawConfig::parse(text);
    for (k, v) in overrides {
        if let Err(e) = raw.set(k, v.clone()) {
            errors.push(e);
        }
    }
    match validate(&raw) {
        Ok(cfg) if errors.is_empty() => Ok(cfg),
        Ok(_) => Err(errors),
        Err(more) => {
            errors.extend(more);
            Err(errors)
        }
    }
}

struct Ctx<'a> {
    raw: &'a RawConfig,
    errors: Vec<ConfigError>,
}

impl Ctx<'_> {
    /// Typed value of `key`; `default = None` makes the key required.
    fn get<V>(&mut self, key: &str, default: Option<&str>, parse: impl Fn(&str) -> Result<V, String>) -> Option<V> {
        match self.raw.entries.get(key) {
            Some((text, origin)) => match parse(text) {
                Ok(v) => Some(v),
                Err(message) => {
                    self.errors.push(ConfigError { origin: *origin, key: key.into(), message });
                    None
                }
            },
            None => match default {
                Some(d) => Some(parse(d).unwrap_or_else(|e| panic!("bad default for {key}: {e}"))),
                None => {
                    self.errors.push(ConfigError { origin: Origin::Missing, key: key.into(), message: "required".into() });
                    None
                }
            },
        }
    }
}

fn float(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"))
}

fn finite(s: &str) -> Result<f64, String> {
    float(s).and_then(|v| if v.is_finite() { Ok(v) } else { Err(format!("{v} must be finite")) })
}

fn positive(s: &str) -> Result<f64, String> {
    finite(s).and_then(|v| if v > 0.0 { Ok(v) } else { Err(format!("{v} must be > 0")) })
}

fn count(min: usize) -> impl Fn(&str) -> Result<usize, String> {
    move |s| {
        let v = s.parse::<usize>().map_err(|_| format!("`{s}` is not a nonnegative integer"))?;
        if v < min {
            Err(format!("{v} must be ≥ {min}"))
        } else {
            Ok(v)
        }
    }
}

fn list(s: &str) -> Result<Vec<f64>, String> {
    let v = s.split(',').map(|t| finite(t.trim())).collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() {
        Err("empty list".into())
    } else {
        Ok(v)
    }
}

fn increasing_positive(s: &str) -> Result<Vec<f64>, String> {
    let v = list(s)?;
    if v.iter().any(|&x| x <= 0.0) || v.windows(2).any(|w| w[1] <= w[0]) {
        return Err("values must be positive and strictly increasing".into());
    }
    Ok(v)
}

fn triples(s: &str) -> Result<Vec<Triple>, String> {
    s.split(';')
        .map(|part| {
            let v = part.split(',').map(|t| float(t.trim())).collect::<Result<Vec<_>, _>>()?;
            let [p, q, r] = v[..] else {
                return Err(format!("`{}` is not a triple p,q,r", part.trim()));
            };
            let t = Triple { p, q, r };
            t.validate().map_err(|e| format!("({}) {e}", part.trim()))?;
            Ok(t)
        })
        .collect()
}

fn inv_p(s: &str) -> Result<[f64; 3], String> {
    let v = list(s)?;
    let [a, b, c] = v[..] else {
        return Err(format!("need three reciprocal exponents, got {}", v.len()));
    };
    let cfg = RestrictedConfig { inv_p: [a, b, c], ..RestrictedConfig::default() };
    cfg.alpha().map_err(|e| e.to_string())?;
    Ok([a, b, c])
}

fn grid_n(s: &str) -> Result<usize, String> {
    let n = s.parse::<usize>().map_err(|_| format!("`{s}` is not a nonnegative integer"))?;
    if !n.is_power_of_two() || !(16..=1 << 16).contains(&n) {
        return Err(format!("{n} must be a power of two in [16, 65536]"));
    }
    Ok(n)
}

fn weight(c: &mut Ctx<'_>) -> Option<WeightConfig> {
    let kind = c.get("weight.kind", None, |s| match s {
        "const" | "poly" | "exp" => Ok(s.to_string()),
        _ => Err(format!("`{s}` is not one of const, poly, exp")),
    })?;
    let (spec, theta_default) = match kind.as_str() {
        "const" => (WeightSpec::Const { value: c.get("weight.value", Some("1"), positive)? }, 0.0),
        "poly" => {
            let alpha = c.get("weight.alpha", Some("0"), |s| {
                finite(s).and_then(|v| if v >= 0.0 { Ok(v) } else { Err(format!("{v} must be ≥ 0; use weight.sign")) })
            })?;
            let sign = c.get("weight.sign", Some("1"), |s| match s.parse::<i8>() {
                Ok(v @ (1 | -1)) => Ok(v),
                _ => Err(format!("`{s}` must be 1 or -1")),
            })?;
            (WeightSpec::Poly { alpha, sign }, alpha)
        }
        _ => (WeightSpec::Exp { rate: c.get("weight.rate", Some("1"), positive)? }, 0.0),
    };
    let theta = c.get("weight.theta", Some(&theta_default.to_string()), |s| {
        finite(s).and_then(|v| if v >= 0.0 { Ok(v) } else { Err(format!("{v} must be ≥ 0")) })
    })?;
    let l = c.get("weight.l", Some("1"), positive)?;
    Some(WeightConfig { spec, theta, l })
}

fn validate(raw: &RawConfig) -> Result<RunConfig, Vec<ConfigError>> {
    let mut c = Ctx { raw, errors: Vec::new() };
    let kind = c.get("kind", None, |s| {
        Experiment::parse(s).ok_or_else(|| {
            let names: Vec<_> = Experiment::ALL.iter().map(|k| k.name()).collect();
            format!("`{s}` is not one of {}", names.join(", "))
        })
    });
    let seed = c.get("seed", None, |s| s.parse::<u64>().map_err(|_| format!("`{s}` is not a 64-bit unsigned integer")));
    let symbol_kind = c.get("symbol.kind", None, |s| {
        SymbolKind::parse(s).ok_or_else(|| format!("`{s}` is not one of product, bht, truncated_bht"))
    });
    let l1 = c.get("symbol.lambda1", Some("1"), finite);
    let l2 = c.get("symbol.lambda2", Some("-1"), finite);
    let scale = c.get("symbol.scale", Some("1"), positive);
    if let (Some(a), Some(b)) = (l1, l2) {
        if a == 0.0 || b == 0.0 || a == b {
            let origin = raw.entries.get("symbol.lambda2").or(raw.entries.get("symbol.lambda1")).map_or(Origin::Flag, |e| e.1);
            c.errors.push(ConfigError {
                origin,
                key: "symbol.lambda".into(),
                message: format!("line ({a}, {b}) is degenerate: need λ1, λ2 ≠ 0 and λ1 ≠ λ2"),
            });
        }
    }
    let n = c.get("grid.n", None, grid_n);
    let period_default = if kind == Some(Experiment::OffdiagDecay) { "256" } else { "32" };
    let period = c.get("grid.period", Some(period_default), positive);
    let triples = c.get("exponents.triples", Some(DEFAULT_TRIPLES), triples);
    let inv_p = c.get("exponents.inv_p", Some(DEFAULT_INV_P), inv_p);
    let center = c.get("interval.center", Some("0"), finite);
    let length = c.get("interval.length", Some("1"), positive);
    let weight = if kind == Some(Experiment::WeightedContinuity) || raw.entries.contains_key("weight.kind") {
        weight(&mut c)
    } else {
        None
    };
    let offsets = c.get("ladder.offsets", Some(DEFAULT_OFFSETS), increasing_positive);
    let lengths = c.get("ladder.lengths", Some(DEFAULT_LENGTHS), increasing_positive);
    let members = c.get("ensemble.members", Some("50"), count(1));
    let configurations = c.get("restricted.configurations", Some("100"), count(1));
    let delta = c.get("local.delta", Some("1"), positive);
    let output_dir = c.get("output.dir", Some(DEFAULT_OUTPUT_DIR), |s| {
        if s.is_empty() {
            Err("empty path".to_string())
        } else {
            Ok(PathBuf::from(s))
        }
    });
    if !c.errors.is_empty() {
        return Err(c.errors);
    }
    let weight_ok = kind != Some(Experiment::WeightedContinuity) || weight.is_some();
    match (kind, seed, symbol_kind, l1, l2, scale, n, period, triples, inv_p, center, length) {
        (Some(kind), Some(seed), Some(sk), Some(l1), Some(l2), Some(scale), Some(n), Some(period), Some(triples), Some(inv_p), Some(center), Some(length))
            if weight_ok =>
        {
            Ok(RunConfig {
                kind,
                symbol: SymbolSpec { kind: sk, lambda: (l1, l2), scale },
                grid: GridSpec { n, period },
                triples,
                inv_p,
                interval: IntervalSpec { center, length },
                weight,
                ladder: LadderSpec { offsets: offsets.unwrap(), lengths: lengths.unwrap() },
                members: members.unwrap(),
                configurations: configurations.unwrap(),
                delta: delta.unwrap(),
                seed,
                output_dir: output_dir.unwrap(),
            })
        }
        _ => unreachable!("every missing value records an error"),
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    /// Canonical text form; [`parse_config`] maps it back to `self`.
    pub fn to_text(&self) -> String {
        let mut s = format!("kind = {}\nseed = {}\n", self.kind.name(), self.seed);
        s += &format!(
            "\n[symbol]\nkind = {}\nlambda1 = {}\nlambda2 = {}\nscale = {}\n",
            self.symbol.kind.name(),
            self.symbol.lambda.0,
            self.symbol.lambda.1,
            self.symbol.scale
        );
        s += &format!("\n[grid]\nn = {}\nperiod = {}\n", self.grid.n, self.grid.period);
        let triples: Vec<String> = self.triples.iter().map(|t| format!("{},{},{}", t.p, t.q, t.r)).collect();
        s += &format!("\n[exponents]\ntriples = {}\ninv_p = {}\n", triples.join("; "), join(&self.inv_p));
        s += &format!("\n[interval]\ncenter = {}\nlength = {}\n", self.interval.center, self.interval.length);
        if let Some(w) = &self.weight {
            s += "\n[weight]\n";
            s += &match w.spec {
                WeightSpec::Const { value } => format!("kind = const\nvalue = {value}\n"),
                WeightSpec::Poly { alpha, sign } => format!("kind = poly\nalpha = {alpha}\nsign = {sign}\n"),
                WeightSpec::Exp { rate } => format!("kind = exp\nrate = {rate}\n"),
            };
            s += &format!("theta = {}\nl = {}\n", w.theta, w.l);
        }
        s += &format!("\n[ladder]\noffsets = {}\nlengths = {}\n", join(&self.ladder.offsets), join(&self.ladder.lengths));
        s += &format!("\n[ensemble]\nmembers = {}\n", self.members);
        s += &format!("\n[restricted]\nconfigurations = {}\n", self.configurations);
        s += &format!("\n[local]\ndelta = {}\n", self.delta);
        s += &format!("\n[output]\ndir = {}\n", self.output_dir.display());
        s
    }
}
