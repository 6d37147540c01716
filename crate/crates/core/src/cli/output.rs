//! Result files: JSON summaries, CSV tables and little-endian binary dumps.
//!
//! Every float is written with 17 significant digits, enough to round-trip
//! an `f64` exactly.
//!
//! Sample dump (`samples.bin`):
//!
//! | offset | type       | content                         |
//! |--------|------------|---------------------------------|
//! | 0      | `[u8; 8]`  | `b"MFLSMPL1"`                   |
//! | 8      | `u64`      | `n`, particles per sample       |
//! | 16     | `u64`      | `d`, dimension                  |
//! | 24     | `u64`      | `count`, number of samples      |
//! | 32     | `f64` × …  | `count · n · d` coordinates     |
//!
//! Samples follow each other, particles inside a sample, coordinates inside
//! a particle.
//!
//! Complex matrix (`*.cmat`):
//!
//! | offset | type       | content                         |
//! |--------|------------|---------------------------------|
//! | 0      | `[u8; 8]`  | `b"MFLCMAT1"`                   |
//! | 8      | `u64`      | rows                            |
//! | 16     | `u64`      | cols                            |
//! | 24     | `f64` × …  | `(re, im)` pairs, row-major     |

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::definetti::CMatrix;
use crate::{Error, Result};

pub const SAMPLE_MAGIC: &[u8; 8] = b"MFLSMPL1";
pub const MATRIX_MAGIC: &[u8; 8] = b"MFLCMAT1";

/// `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Pretty JSON whose floats carry 17 significant digits.
struct ExactFloats<'a>(PrettyFormatter<'a>);

impl Formatter for ExactFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| Error::invalid(e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Header plus columns of equal length.
pub fn to_csv(header: &[&str], columns: &[&[f64]]) -> String {
    let rows = columns.first().map_or(0, |c| c.len());
    debug_assert!(columns.iter().all(|c| c.len() == rows));
    let mut s = header.join(",");
    s.push('\n');
    for i in 0..rows {
        let line: Vec<String> = columns.iter().map(|c| fmt_f64(c[i])).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

pub fn sample_dump(n: usize, d: usize, points: &[f64]) -> Vec<u8> {
    let count = points.len() / (n * d).max(1);
    let mut out = Vec::with_capacity(32 + 8 * points.len());
    out.extend_from_slice(SAMPLE_MAGIC);
    for v in [n as u64, d as u64, count as u64] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for x in &points[..count * n * d] {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn matrix_dump(m: &CMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + 16 * m.len());
    out.extend_from_slice(MATRIX_MAGIC);
    out.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.extend_from_slice(&m[(i, j)].re.to_le_bytes());
            out.extend_from_slice(&m[(i, j)].im.to_le_bytes());
        }
    }
    out
}

pub fn read_matrix(bytes: &[u8]) -> Result<CMatrix> {
    let word = |k: usize| -> Result<[u8; 8]> {
        bytes.get(k..k + 8).and_then(|s| s.try_into().ok()).ok_or_else(|| Error::invalid("truncated matrix file"))
    };
    if word(0)? != *MATRIX_MAGIC {
        return Err(Error::invalid("not a complex matrix file (bad magic)"));
    }
    let rows = u64::from_le_bytes(word(8)?) as usize;
    let cols = u64::from_le_bytes(word(16)?) as usize;
    let expected = rows.checked_mul(cols).and_then(|c| c.checked_mul(16)).and_then(|c| c.checked_add(24));
    if expected != Some(bytes.len()) {
        return Err(Error::invalid(format!("matrix file size does not match {rows}×{cols}")));
    }
    let f = |k: usize| f64::from_le_bytes(bytes[k..k + 8].try_into().expect("8 bytes"));
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        let k = 24 + 16 * (i * cols + j);
        Complex64::new(f(k), f(k + 8))
    }))
}

/// Files produced by a run, written only once the computation succeeded.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub files: Vec<(String, Vec<u8>)>,
}

impl RunOutput {
    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.files.push((name.to_string(), to_json(value)?.into_bytes()));
        Ok(())
    }

    pub fn csv(&mut self, name: &str, header: &[&str], columns: &[&[f64]]) {
        self.files.push((name.to_string(), to_csv(header, columns).into_bytes()));
    }

    pub fn bytes(&mut self, name: &str, data: Vec<u8>) {
        self.files.push((name.to_string(), data));
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, data) in &self.files {
            let path = dir.join(name);
            fs::write(&path, data)?;
            written.push(path);
        }
        Ok(written)
    }
}
