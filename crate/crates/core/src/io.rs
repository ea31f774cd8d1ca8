//! On-disk formats for sampled functions.
//!
//! Binary layout (little-endian): magic `UCP1`, `n` as `u64`, spacing as
//! `f64`, then `n` pairs `(re, im)` of `f64`. A matrix of functions is a plain
//! concatenation of such records. The text form is a JSON object
//! `{"grid": {"n", "spacing"}, "values": [[re, im], ...]}`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, UcpError};
use crate::grid::{Grid, SampledFunction};

pub const MAGIC: &[u8; 4] = b"UCP1";

#[derive(Serialize, Deserialize)]
struct GridRecord {
    n: usize,
    spacing: f64,
}

#[derive(Serialize, Deserialize)]
struct FunctionRecord {
    grid: GridRecord,
    values: Vec<[f64; 2]>,
}

pub fn write_binary<W: Write>(f: &SampledFunction, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(f.grid().n() as u64).to_le_bytes())?;
    w.write_all(&f.grid().spacing().to_le_bytes())?;
    for v in f.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Reads one record; `Ok(None)` on a clean end of stream.
fn read_binary_record<R: Read>(r: &mut R) -> Result<Option<SampledFunction>> {
    let mut magic = [0u8; 4];
    match r.read(&mut magic[..1])? {
        0 => return Ok(None),
        _ => r.read_exact(&mut magic[1..])?,
    }
    if &magic != MAGIC {
        return Err(UcpError::Format("bad magic, expected UCP1".into()));
    }
    let mut nb = [0u8; 8];
    r.read_exact(&mut nb)?;
    let n = usize::try_from(u64::from_le_bytes(nb))
        .map_err(|_| UcpError::Format("sample count overflows usize".into()))?;
    let spacing = read_f64(r)?;
    let grid = Grid::new(n, spacing)?;
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let re = read_f64(r)?;
        let im = read_f64(r)?;
        values.push(Complex64::new(re, im));
    }
    SampledFunction::new(grid, values).map(Some)
}

pub fn read_binary<R: Read>(mut r: R) -> Result<SampledFunction> {
    read_binary_record(&mut r)?.ok_or_else(|| UcpError::Format("empty input".into()))
}

pub fn write_matrix<W: Write>(rows: &[SampledFunction], mut w: W) -> Result<()> {
    for row in rows {
        write_binary(row, &mut w)?;
    }
    Ok(())
}

pub fn read_matrix<R: Read>(mut r: R) -> Result<Vec<SampledFunction>> {
    let mut rows = Vec::new();
    while let Some(f) = read_binary_record(&mut r)? {
        rows.push(f);
    }
    Ok(rows)
}

pub fn to_text(f: &SampledFunction) -> Result<String> {
    let rec = FunctionRecord {
        grid: GridRecord {
            n: f.grid().n(),
            spacing: f.grid().spacing(),
        },
        values: f.values().iter().map(|v| [v.re, v.im]).collect(),
    };
    serde_json::to_string(&rec).map_err(|e| UcpError::Format(e.to_string()))
}

pub fn from_text(s: &str) -> Result<SampledFunction> {
    let rec: FunctionRecord =
        serde_json::from_str(s).map_err(|e| UcpError::Format(e.to_string()))?;
    let grid = Grid::new(rec.grid.n, rec.grid.spacing)?;
    let values = rec
        .values
        .into_iter()
        .map(|[re, im]| Complex64::new(re, im))
        .collect();
    SampledFunction::new(grid, values)
}

/// Loads a function file, detecting the binary layout by its magic bytes.
pub fn load(path: impl AsRef<Path>) -> Result<SampledFunction> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(MAGIC) {
        read_binary(&bytes[..])
    } else {
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| UcpError::Format("neither UCP1 binary nor UTF-8 text".into()))?;
        from_text(text)
    }
}

pub fn save_binary(f: &SampledFunction, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::with_capacity(20 + 16 * f.grid().n());
    write_binary(f, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn save_text(f: &SampledFunction, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_text(f)?)?;
    Ok(())
}
