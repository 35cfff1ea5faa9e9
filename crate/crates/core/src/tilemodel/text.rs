//! Line-oriented text format for collections.
//!
//! ```text
//! # tri-tiles 2
//! # area_bound 4
//! # overlap_bound 4
//! # time_overlap 1
//! # freq_overlap 2
//! # chart 1 1 1
//! 0.5 1 1.5 3 0.5 1 1.5 1 2.5 1
//! ```
//! Each data line holds `I_center I_len w_center w_len` followed by center and
//! length of the three sub-frequencies. Unknown header keys are ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::{collection_validate, Collection, TriTile};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::Interval;

/// Renders a collection, recording the achieved overlap constants in the header.
pub fn to_text<T: Real>(c: &Collection<T>) -> Result<String> {
    let scales = c.tiles.first().map(|t| t.scales).unwrap_or([T::one(); 3]);
    if c.tiles.iter().any(|t| t.scales != scales) {
        return Err(Error::Format("all tri-tiles must share one chart".into()));
    }
    let r = collection_validate(c);
    let mut s = String::new();
    let _ = writeln!(s, "# tri-tiles {}", c.len());
    let _ = writeln!(s, "# area_bound {}", c.area_bound);
    let _ = writeln!(s, "# overlap_bound {}", c.overlap_bound);
    let _ = writeln!(s, "# time_overlap {}", r.time_overlap);
    let _ = writeln!(s, "# freq_overlap {}", r.freq_overlap);
    let _ = writeln!(s, "# chart {} {} {}", scales[0], scales[1], scales[2]);
    for t in &c.tiles {
        let mut fields = vec![t.time.center(), t.time.length(), t.freq.center(), t.freq.length()];
        for w in &t.subs {
            fields.push(w.center());
            fields.push(w.length());
        }
        let line: Vec<String> = fields.iter().map(|v| format!("{}", v.to_f64_lossy())).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    Ok(s)
}

fn num<T: Real>(tok: &str, line: usize) -> Result<T> {
    tok.parse::<f64>()
        .map(T::lit)
        .map_err(|_| Error::Format(format!("line {line}: cannot parse number {tok:?}")))
}

/// Parses the text format; tri-tile invariants are enforced per line.
pub fn from_text<T: Real>(text: &str) -> Result<Collection<T>> {
    let mut scales = [T::one(); 3];
    let mut area = T::lit(4.0);
    let mut overlap = T::lit(4.0);
    let mut declared: Option<usize> = None;
    let mut tiles = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(h) = l.strip_prefix('#') {
            let toks: Vec<&str> = h.split_whitespace().collect();
            match toks.as_slice() {
                ["tri-tiles", v] => {
                    declared = Some(v.parse().map_err(|_| Error::Format(format!("line {line}: bad count {v:?}")))?)
                }
                ["area_bound", v] => area = num(v, line)?,
                ["overlap_bound", v] => overlap = num(v, line)?,
                ["chart", a, b, c] => scales = [num(a, line)?, num(b, line)?, num(c, line)?],
                _ => {}
            }
            continue;
        }
        let v: Vec<T> = l.split_whitespace().map(|t| num(t, line)).collect::<Result<_>>()?;
        if v.len() != 10 {
            return Err(Error::Format(format!("line {line}: expected 10 fields, found {}", v.len())));
        }
        let iv = |i: usize| Interval::new(v[i], v[i + 1]).map_err(|e| Error::Format(format!("line {line}: {e}")));
        let t = TriTile::with_chart(iv(0)?, iv(2)?, [iv(4)?, iv(6)?, iv(8)?], scales)
            .map_err(|e| Error::Format(format!("line {line}: {e}")))?;
        tiles.push(t);
    }
    if let Some(d) = declared {
        if d != tiles.len() {
            return Err(Error::Format(format!("header declares {d} tri-tiles, found {}", tiles.len())));
        }
    }
    Collection::new(tiles).with_bounds(area, overlap)
}

pub fn write_collection<T: Real>(c: &Collection<T>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_text(c)?)?;
    Ok(())
}

pub fn read_collection<T: Real>(path: impl AsRef<Path>) -> Result<Collection<T>> {
    from_text(&std::fs::read_to_string(path)?)
}
