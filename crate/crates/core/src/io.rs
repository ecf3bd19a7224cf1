//! Little-endian binary containers for coefficient volumes and fields.
//!
//! `PUWV1`: magic, `n_dims: u32`, `n_dims × dim: u32`, `node_count: u64`, then
//! `node_count × ∏dim` complex samples as interleaved `f64` re/im, slice-major.
//!
//! `PUFD1`: magic, `n_dims: u32`, `n_dims × dim: u32`, then `∏dim` complex samples.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const VOLUME_MAGIC: &[u8; 5] = b"PUWV1";
pub const FIELD_MAGIC: &[u8; 5] = b"PUFD1";

/// Raw contents of a `PUWV1` container.
#[derive(Debug, Clone, PartialEq)]
pub struct RawVolume {
    pub dims: Vec<usize>,
    pub node_count: usize,
    pub data: Vec<Complex64>,
}

/// Raw contents of a `PUFD1` container.
#[derive(Debug, Clone, PartialEq)]
pub struct RawField {
    pub dims: Vec<usize>,
    pub data: Vec<Complex64>,
}

fn write_dims(w: &mut impl Write, dims: &[usize]) -> Result<()> {
    w.write_all(&(dims.len() as u32).to_le_bytes())?;
    for &d in dims {
        let d = u32::try_from(d).map_err(|_| Error::data("dimension does not fit in u32"))?;
        w.write_all(&d.to_le_bytes())?;
    }
    Ok(())
}

fn write_samples(w: &mut impl Write, data: &[Complex64]) -> Result<()> {
    for v in data {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_volume(
    w: &mut impl Write,
    dims: &[usize],
    node_count: usize,
    data: &[Complex64],
) -> Result<()> {
    let per: usize = dims.iter().product();
    if data.len() != per * node_count {
        return Err(Error::data("volume data length does not match header"));
    }
    w.write_all(VOLUME_MAGIC)?;
    write_dims(w, dims)?;
    w.write_all(&(node_count as u64).to_le_bytes())?;
    write_samples(w, data)
}

pub fn write_field(w: &mut impl Write, dims: &[usize], data: &[Complex64]) -> Result<()> {
    if data.len() != dims.iter().product::<usize>() {
        return Err(Error::data("field data length does not match header"));
    }
    w.write_all(FIELD_MAGIC)?;
    write_dims(w, dims)?;
    write_samples(w, data)
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_magic(r: &mut impl Read, want: &[u8; 5]) -> Result<()> {
    let mut m = [0u8; 5];
    r.read_exact(&mut m)?;
    if &m != want {
        return Err(Error::data(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&m),
            String::from_utf8_lossy(want)
        )));
    }
    Ok(())
}

fn read_dims(r: &mut impl Read) -> Result<Vec<usize>> {
    let n = read_u32(r)? as usize;
    if !(1..=3).contains(&n) {
        return Err(Error::data(format!("unsupported n_dims {n}")));
    }
    (0..n).map(|_| read_u32(r).map(|d| d as usize)).collect()
}

fn read_samples(r: &mut impl Read, count: usize) -> Result<Vec<Complex64>> {
    let mut buf = vec![0u8; count * 16];
    r.read_exact(&mut buf)
        .map_err(|e| Error::data(format!("truncated sample data: {e}")))?;
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::data("trailing bytes after sample data"));
    }
    Ok(buf
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect())
}

pub fn read_volume(r: &mut impl Read) -> Result<RawVolume> {
    read_magic(r, VOLUME_MAGIC)?;
    let dims = read_dims(r)?;
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    let node_count = u64::from_le_bytes(b) as usize;
    let per: usize = dims.iter().product();
    let data = read_samples(r, per * node_count)?;
    Ok(RawVolume {
        dims,
        node_count,
        data,
    })
}

pub fn read_field(r: &mut impl Read) -> Result<RawField> {
    read_magic(r, FIELD_MAGIC)?;
    let dims = read_dims(r)?;
    let data = read_samples(r, dims.iter().product())?;
    Ok(RawField { dims, data })
}

pub fn save_volume(
    path: &Path,
    dims: &[usize],
    node_count: usize,
    data: &[Complex64],
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_volume(&mut w, dims, node_count, data)?;
    w.flush()?;
    Ok(())
}

pub fn load_volume(path: &Path) -> Result<RawVolume> {
    read_volume(&mut BufReader::new(File::open(path)?))
}

pub fn save_field(path: &Path, dims: &[usize], data: &[Complex64]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_field(&mut w, dims, data)?;
    w.flush()?;
    Ok(())
}

pub fn load_field(path: &Path) -> Result<RawField> {
    read_field(&mut BufReader::new(File::open(path)?))
}
