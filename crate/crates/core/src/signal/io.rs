//! CSV (`x,re,im`) and binary serialization of sampled functions.
//!
//! The binary record is little-endian: `origin: f64`, `spacing: f64`,
//! `count: u64`, then `count` pairs of `f64` (re, im).

use std::io::{Read, Write};

use num_complex::Complex;

use super::{Grid, SampledFunction};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn write_csv<T: Real, W: Write>(f: &SampledFunction<T>, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let fmt = |e: csv::Error| Error::Io(e.to_string());
    wr.write_record(["x", "re", "im"]).map_err(fmt)?;
    for (x, v) in f.grid().points().zip(f.values()) {
        wr.serialize((x.to_f64_lossy(), v.re.to_f64_lossy(), v.im.to_f64_lossy())).map_err(fmt)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<T: Real, R: Read>(r: R) -> Result<SampledFunction<T>> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let mut xs = Vec::new();
    let mut vals = Vec::new();
    for (i, rec) in rd.deserialize::<(f64, f64, f64)>().enumerate() {
        let (x, re, im) = rec.map_err(|e| Error::Format(format!("record {}: {e}", i + 1)))?;
        xs.push(x);
        vals.push(Complex::new(T::lit(re), T::lit(im)));
    }
    if xs.len() < 2 {
        return Err(Error::Format("csv needs at least two samples".into()));
    }
    let spacing = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    let grid = Grid::new(T::lit(xs[0]), T::lit(spacing), xs.len())?;
    SampledFunction::new(grid, vals)
}

pub fn write_binary<T: Real, W: Write>(f: &SampledFunction<T>, mut w: W) -> Result<()> {
    let g = f.grid();
    w.write_all(&g.origin().to_f64_lossy().to_le_bytes())?;
    w.write_all(&g.spacing().to_f64_lossy().to_le_bytes())?;
    w.write_all(&(g.len() as u64).to_le_bytes())?;
    for v in f.values() {
        w.write_all(&v.re.to_f64_lossy().to_le_bytes())?;
        w.write_all(&v.im.to_f64_lossy().to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<T: Real, R: Read>(mut r: R) -> Result<SampledFunction<T>> {
    let mut b = [0u8; 8];
    let mut next = |r: &mut R| -> Result<[u8; 8]> {
        r.read_exact(&mut b).map_err(|e| Error::Format(format!("truncated binary record: {e}")))?;
        Ok(b)
    };
    let origin = f64::from_le_bytes(next(&mut r)?);
    let spacing = f64::from_le_bytes(next(&mut r)?);
    let count = u64::from_le_bytes(next(&mut r)?) as usize;
    let grid = Grid::new(T::lit(origin), T::lit(spacing), count)?;
    let mut vals = Vec::with_capacity(count);
    for _ in 0..count {
        let re = f64::from_le_bytes(next(&mut r)?);
        let im = f64::from_le_bytes(next(&mut r)?);
        vals.push(Complex::new(T::lit(re), T::lit(im)));
    }
    SampledFunction::new(grid, vals)
}
