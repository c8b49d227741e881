//! Grid files, CSV export and provenance sidecars.
//!
//! Binary layout (little endian): magic `LZSM`, `u32` version, then for a
//! pattern `u32 n_eps`, `u32 n_A`, the `eps0` axis, the `A` axis and the
//! values as `f64`, row-major with `eps0` slow. Spectrum files carry one flag
//! byte after the version (`0` real magnitudes, `1` complex as interleaved
//! `re, im`) and store the `tau_eps` / `tau_A` axes in place of `eps0` / `A`.
//! Everything else (solver configuration, diagnostics) lives in a TOML
//! sidecar `<file>.toml`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::num::Real;
use crate::spectra::{PatternGrid, SpectrumGrid};

pub const MAGIC: &[u8; 4] = b"LZSM";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}: not a grid file (bad magic)")]
    BadMagic(PathBuf),
    #[error("{path}: unsupported format version {version}")]
    Version { path: PathBuf, version: u32 },
    #[error("{path}: unexpected payload flag {flag}")]
    BadFlag { path: PathBuf, flag: u8 },
    #[error("{path}: truncated or oversized payload ({detail})")]
    Length { path: PathBuf, detail: String },
    #[error("{path}: sidecar: {detail}")]
    Sidecar { path: PathBuf, detail: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.to_path_buf(), source }
}

/// Payload kind of a spectrum file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumPayload {
    Magnitude = 0,
    Complex = 1,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".toml");
    PathBuf::from(s)
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn f64s<T: Real>(&mut self, v: &[T]) {
        for x in v {
            self.buf.extend_from_slice(&x.to_f64_lossy().to_le_bytes());
        }
    }
}

struct Reader<'a> {
    path: &'a Path,
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], IoError> {
        if self.pos + n > self.data.len() {
            return Err(IoError::Length {
                path: self.path.to_path_buf(),
                detail: format!("need {} bytes at offset {}, file has {}", n, self.pos, self.data.len()),
            });
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, IoError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, IoError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn f64s<T: Real>(&mut self, n: usize) -> Result<Vec<T>, IoError> {
        let bytes = self.take(n.checked_mul(8).ok_or_else(|| IoError::Length {
            path: self.path.to_path_buf(),
            detail: "size overflow".into(),
        })?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| T::lit(f64::from_le_bytes(c.try_into().expect("8 bytes"))))
            .collect())
    }
    fn header(&mut self) -> Result<(), IoError> {
        if self.take(4)? != MAGIC {
            return Err(IoError::BadMagic(self.path.to_path_buf()));
        }
        let version = self.u32()?;
        if version != FORMAT_VERSION {
            return Err(IoError::Version { path: self.path.to_path_buf(), version });
        }
        Ok(())
    }
    fn finish(&self) -> Result<(), IoError> {
        if self.pos != self.data.len() {
            return Err(IoError::Length {
                path: self.path.to_path_buf(),
                detail: format!("{} trailing bytes", self.data.len() - self.pos),
            });
        }
        Ok(())
    }
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, bytes).map_err(io_err(path))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, IoError> {
    let mut data = Vec::new();
    fs::File::open(path).and_then(|mut f| f.read_to_end(&mut data)).map_err(io_err(path))?;
    Ok(data)
}

/// Serializes the binary body of a pattern file.
pub fn encode_pattern<T: Real>(p: &PatternGrid<T>) -> Vec<u8> {
    let mut w = Writer { buf: Vec::with_capacity(16 + 8 * (p.n_eps() + p.n_amp() + p.values.len())) };
    w.buf.extend_from_slice(MAGIC);
    w.u32(FORMAT_VERSION);
    w.u32(p.n_eps() as u32);
    w.u32(p.n_amp() as u32);
    w.f64s(&p.eps_axis);
    w.f64s(&p.amp_axis);
    w.f64s(&p.values);
    w.buf
}

pub fn decode_pattern<T: Real>(path: &Path, data: &[u8]) -> Result<PatternGrid<T>, IoError> {
    let mut r = Reader { path, data, pos: 0 };
    r.header()?;
    let ne = r.u32()? as usize;
    let na = r.u32()? as usize;
    let eps = r.f64s(ne)?;
    let amp = r.f64s(na)?;
    let values = r.f64s(ne * na)?;
    r.finish()?;
    Ok(PatternGrid::new(eps, amp, values))
}

pub fn encode_spectrum<T: Real>(s: &SpectrumGrid<T>, payload: SpectrumPayload) -> Vec<u8> {
    let mut w = Writer { buf: Vec::new() };
    w.buf.extend_from_slice(MAGIC);
    w.u32(FORMAT_VERSION);
    w.buf.push(payload as u8);
    w.u32(s.tau_eps.len() as u32);
    w.u32(s.tau_a.len() as u32);
    w.f64s(&s.tau_eps);
    w.f64s(&s.tau_a);
    match payload {
        SpectrumPayload::Magnitude => {
            let m: Vec<T> = s.values.iter().map(|z| z.norm()).collect();
            w.f64s(&m);
        }
        SpectrumPayload::Complex => {
            let v: Vec<T> = s.values.iter().flat_map(|z| [z.re, z.im]).collect();
            w.f64s(&v);
        }
    }
    w.buf
}

pub fn decode_spectrum<T: Real>(path: &Path, data: &[u8]) -> Result<(SpectrumGrid<T>, SpectrumPayload), IoError> {
    let mut r = Reader { path, data, pos: 0 };
    r.header()?;
    let flag = r.u8()?;
    let payload = match flag {
        0 => SpectrumPayload::Magnitude,
        1 => SpectrumPayload::Complex,
        _ => return Err(IoError::BadFlag { path: path.to_path_buf(), flag }),
    };
    let ne = r.u32()? as usize;
    let na = r.u32()? as usize;
    let tau_eps = r.f64s(ne)?;
    let tau_a = r.f64s(na)?;
    let values = match payload {
        SpectrumPayload::Magnitude => r.f64s::<T>(ne * na)?.into_iter().map(|m| Complex::new(m, T::zero())).collect(),
        SpectrumPayload::Complex => r
            .f64s::<T>(2 * ne * na)?
            .chunks_exact(2)
            .map(|c| Complex::new(c[0], c[1]))
            .collect(),
    };
    r.finish()?;
    Ok((
        SpectrumGrid {
            tau_eps,
            tau_a,
            values,
            pad: 1,
            mean_subtracted: false,
            mean: T::zero(),
            metadata: BTreeMap::new(),
        },
        payload,
    ))
}

/// Provenance sidecar: the run configuration (as TOML text) plus grid metadata.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    #[serde(default)]
    pub config: String,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
    #[serde(default)]
    pub missing: Vec<usize>,
    #[serde(default)]
    pub pad: Option<usize>,
    #[serde(default)]
    pub mean_subtracted: Option<bool>,
    #[serde(default)]
    pub mean: Option<f64>,
}

pub fn write_sidecar(path: &Path, sidecar: &Sidecar) -> Result<(), IoError> {
    let text = toml::to_string(sidecar).map_err(|e| IoError::Sidecar { path: path.to_path_buf(), detail: e.to_string() })?;
    write_bytes(&sidecar_path(path), text.as_bytes())
}

pub fn read_sidecar(path: &Path) -> Result<Option<Sidecar>, IoError> {
    let sp = sidecar_path(path);
    if !sp.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&sp).map_err(io_err(&sp))?;
    toml::from_str(&text)
        .map(Some)
        .map_err(|e| IoError::Sidecar { path: sp, detail: e.to_string() })
}

/// Writes the pattern file and its sidecar.
pub fn write_pattern<T: Real>(path: &Path, p: &PatternGrid<T>, config: &str) -> Result<(), IoError> {
    write_bytes(path, &encode_pattern(p))?;
    write_sidecar(
        path,
        &Sidecar { config: config.to_string(), metadata: p.metadata.clone(), missing: p.missing.clone(), ..Default::default() },
    )
}

/// Reads a pattern file, restoring metadata from the sidecar when present.
pub fn read_pattern<T: Real>(path: &Path) -> Result<PatternGrid<T>, IoError> {
    let mut p = decode_pattern(path, &read_bytes(path)?)?;
    if let Some(sc) = read_sidecar(path)? {
        p.metadata = sc.metadata;
        p.missing = sc.missing;
    }
    Ok(p)
}

pub fn write_spectrum<T: Real>(path: &Path, s: &SpectrumGrid<T>, payload: SpectrumPayload, config: &str) -> Result<(), IoError> {
    write_bytes(path, &encode_spectrum(s, payload))?;
    write_sidecar(
        path,
        &Sidecar {
            config: config.to_string(),
            metadata: s.metadata.clone(),
            pad: Some(s.pad),
            mean_subtracted: Some(s.mean_subtracted),
            mean: Some(s.mean.to_f64_lossy()),
            ..Default::default()
        },
    )
}

pub fn read_spectrum<T: Real>(path: &Path) -> Result<(SpectrumGrid<T>, SpectrumPayload), IoError> {
    let (mut s, payload) = decode_spectrum(path, &read_bytes(path)?)?;
    if let Some(sc) = read_sidecar(path)? {
        s.metadata = sc.metadata;
        s.pad = sc.pad.unwrap_or(1);
        s.mean_subtracted = sc.mean_subtracted.unwrap_or(false);
        s.mean = T::lit(sc.mean.unwrap_or(0.0));
    }
    Ok((s, payload))
}

/// Writes a CSV table preceded by `#`-prefixed comment lines echoing `config`.
pub fn write_csv(path: &Path, config: &str, columns: &[&str], rows: &[Vec<f64>]) -> Result<(), IoError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let f = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(f);
    let mut body = || -> io::Result<()> {
        for line in config.lines() {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "{}", columns.join(","))?;
        for r in rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        w.flush()
    };
    body().map_err(io_err(path))
}

/// Reads a CSV written by [`write_csv`]: `(config, columns, rows)`.
pub fn read_csv(path: &Path) -> Result<(String, Vec<String>, Vec<Vec<f64>>), IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut config = String::new();
    let mut columns = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(c) = line.strip_prefix('#') {
            config.push_str(c.strip_prefix(' ').unwrap_or(c));
            config.push('\n');
        } else if columns.is_empty() {
            columns = line.split(',').map(str::to_string).collect();
        } else if !line.trim().is_empty() {
            let row = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| IoError::Length { path: path.to_path_buf(), detail: e.to_string() })?;
            rows.push(row);
        }
    }
    Ok((config, columns, rows))
}

/// Pattern as long-format CSV rows `(eps0, A, P_ex)`.
pub fn pattern_rows<T: Real>(p: &PatternGrid<T>) -> Vec<Vec<f64>> {
    let mut rows = Vec::with_capacity(p.values.len());
    for (i, e) in p.eps_axis.iter().enumerate() {
        for (j, a) in p.amp_axis.iter().enumerate() {
            rows.push(vec![e.to_f64_lossy(), a.to_f64_lossy(), p.at(i, j).to_f64_lossy()]);
        }
    }
    rows
}
