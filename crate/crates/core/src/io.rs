//! File formats: binary volumes and cylinder data, CSV profiles, 16-bit PGM
//! slices and TOML phantom descriptions.
//!
//! Binary payloads are little-endian `f64`. Volume files start with a text
//! header padded to 64 bytes:
//!
//! ```text
//! SMTVOL n=3 G=<int> L=<float>\n        (x fastest, then y, then z)
//! SMTCYL npolar=<int> nazi=<int> nt=<int> tmax=<float>\n
//! ```
//!
//! A cylinder file continues with the `3 N` node coordinates, the `N`
//! weights and the `N x nt` samples row by row.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::field::{PhantomSpec, Point};
use crate::grid::{CylinderData, RadialProfile, SphereGrid, TimeGrid, VolumeGrid};

pub const VOLUME_HEADER_LEN: usize = 64;
const MAX_HEADER_LEN: usize = 256;

fn format_err(kind: &'static str, msg: impl Into<String>) -> Error {
    Error::Format {
        kind,
        msg: msg.into(),
    }
}

fn put_f64s(out: &mut impl Write, values: &[f64]) -> Result<()> {
    for v in values {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn take_f64s(kind: &'static str, bytes: &[u8], count: usize) -> Result<Vec<f64>> {
    if bytes.len() != 8 * count {
        return Err(format_err(
            kind,
            format!("expected {} payload bytes, found {}", 8 * count, bytes.len()),
        ));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

/// Parse `MAGIC key=value ...` into the values for `keys`, in order.
fn parse_header(kind: &'static str, line: &str, magic: &str, keys: &[&str]) -> Result<Vec<String>> {
    let mut words = line.split_whitespace();
    if words.next() != Some(magic) {
        return Err(format_err(kind, format!("missing {magic} magic")));
    }
    let pairs: Vec<(&str, &str)> = words
        .map(|w| w.split_once('=').ok_or_else(|| format_err(kind, format!("bad header field {w:?}"))))
        .collect::<Result<_>>()?;
    keys.iter()
        .map(|k| {
            pairs
                .iter()
                .find(|(key, _)| key == k)
                .map(|(_, v)| v.to_string())
                .ok_or_else(|| format_err(kind, format!("header lacks {k}")))
        })
        .collect()
}

fn parse_num<T: std::str::FromStr>(kind: &'static str, key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| format_err(kind, format!("{key}={v} is not a valid number")))
}

/// Split a file into its first line (without the newline) and the rest.
fn split_header<'a>(kind: &'static str, bytes: &'a [u8]) -> Result<(&'a str, &'a [u8])> {
    let end = bytes
        .iter()
        .take(MAX_HEADER_LEN)
        .position(|&b| b == b'\n')
        .ok_or_else(|| format_err(kind, "no header line"))?;
    let line = std::str::from_utf8(&bytes[..end]).map_err(|_| format_err(kind, "header is not text"))?;
    Ok((line, &bytes[end + 1..]))
}

pub fn write_volume(path: impl AsRef<Path>, v: &VolumeGrid) -> Result<()> {
    let mut header = format!("SMTVOL n=3 G={} L={}", v.size(), v.extent());
    if header.len() + 1 > VOLUME_HEADER_LEN {
        return Err(Error::invalid("volume header does not fit in 64 bytes"));
    }
    while header.len() + 1 < VOLUME_HEADER_LEN {
        header.push(' ');
    }
    header.push('\n');
    let mut out = BufWriter::new(fs::File::create(path)?);
    out.write_all(header.as_bytes())?;
    put_f64s(&mut out, v.values())?;
    out.flush()?;
    Ok(())
}

pub fn read_volume(path: impl AsRef<Path>) -> Result<VolumeGrid> {
    const KIND: &str = "volume";
    let bytes = fs::read(path)?;
    if bytes.len() < VOLUME_HEADER_LEN || bytes[VOLUME_HEADER_LEN - 1] != b'\n' {
        return Err(format_err(KIND, "header must be a 64-byte line"));
    }
    let line = std::str::from_utf8(&bytes[..VOLUME_HEADER_LEN - 1])
        .map_err(|_| format_err(KIND, "header is not text"))?;
    let f = parse_header(KIND, line, "SMTVOL", &["n", "G", "L"])?;
    if f[0] != "3" {
        return Err(format_err(KIND, format!("unsupported dimension n={}", f[0])));
    }
    let g: usize = parse_num(KIND, "G", &f[1])?;
    let extent: f64 = parse_num(KIND, "L", &f[2])?;
    let count = g
        .checked_pow(3)
        .ok_or_else(|| format_err(KIND, "grid size overflows"))?;
    let values = take_f64s(KIND, &bytes[VOLUME_HEADER_LEN..], count)?;
    VolumeGrid::new(g, extent, values).map_err(|e| format_err(KIND, e.to_string()))
}

pub fn write_cylinder(path: impl AsRef<Path>, data: &CylinderData) -> Result<()> {
    let s = data.sphere();
    let t = data.times();
    let header = format!(
        "SMTCYL npolar={} nazi={} nt={} tmax={}\n",
        s.n_polar(),
        s.n_azimuth(),
        t.len(),
        t.tmax()
    );
    let mut out = BufWriter::new(fs::File::create(path)?);
    out.write_all(header.as_bytes())?;
    for p in s.nodes() {
        put_f64s(&mut out, p)?;
    }
    put_f64s(&mut out, s.weights())?;
    put_f64s(&mut out, data.samples())?;
    out.flush()?;
    Ok(())
}

pub fn read_cylinder(path: impl AsRef<Path>) -> Result<CylinderData> {
    const KIND: &str = "cylinder";
    let bytes = fs::read(path)?;
    let (line, body) = split_header(KIND, &bytes)?;
    let f = parse_header(KIND, line, "SMTCYL", &["npolar", "nazi", "nt", "tmax"])?;
    let np: usize = parse_num(KIND, "npolar", &f[0])?;
    let na: usize = parse_num(KIND, "nazi", &f[1])?;
    let nt: usize = parse_num(KIND, "nt", &f[2])?;
    let tmax: f64 = parse_num(KIND, "tmax", &f[3])?;
    let n = np
        .checked_mul(na)
        .ok_or_else(|| format_err(KIND, "node count overflows"))?;
    let count = n
        .checked_mul(4 + nt)
        .ok_or_else(|| format_err(KIND, "sample count overflows"))?;
    let all = take_f64s(KIND, body, count)?;
    let (coords, rest) = all.split_at(3 * n);
    let (weights, samples) = rest.split_at(n);
    let nodes: Vec<Point> = coords.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    let sphere = SphereGrid::from_parts(np, na, nodes, weights.to_vec())
        .map_err(|e| format_err(KIND, e.to_string()))?;
    let times = TimeGrid::new(nt, tmax).map_err(|e| format_err(KIND, e.to_string()))?;
    CylinderData::new(sphere, times, samples.to_vec()).map_err(|e| format_err(KIND, e.to_string()))
}

/// Write columns under a header line; every number with 17 significant
/// digits.
pub fn write_csv(path: impl AsRef<Path>, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Two-column `t,value` CSV of a profile.
pub fn write_profile_csv(path: impl AsRef<Path>, p: &RadialProfile) -> Result<()> {
    let rows: Vec<Vec<f64>> = p
        .values()
        .iter()
        .enumerate()
        .map(|(j, &v)| vec![p.t(j), v])
        .collect();
    write_csv(path, &["t", "value"], &rows)
}

pub fn read_profile_csv(path: impl AsRef<Path>) -> Result<RadialProfile> {
    const KIND: &str = "profile csv";
    let text = fs::read_to_string(path)?;
    let mut ts = Vec::new();
    let mut vs = Vec::new();
    for (k, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 2 {
            return Err(format_err(KIND, format!("line {}: expected 2 columns", k + 1)));
        }
        ts.push(parse_num::<f64>(KIND, "t", cells[0].trim())?);
        vs.push(parse_num::<f64>(KIND, "value", cells[1].trim())?);
    }
    if ts.len() < 2 {
        return Err(format_err(KIND, "need at least two samples"));
    }
    let dt = (ts[ts.len() - 1] - ts[0]) / (ts.len() - 1) as f64;
    if ts
        .iter()
        .enumerate()
        .any(|(j, &t)| (t - (ts[0] + j as f64 * dt)).abs() > 1e-9 * dt.abs().max(1.0))
    {
        return Err(format_err(KIND, "samples are not uniformly spaced"));
    }
    RadialProfile::new(ts[0], dt, vs).map_err(|e| format_err(KIND, e.to_string()))
}

/// Path of the scaling sidecar written next to a PGM image.
pub fn pgm_sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".txt");
    PathBuf::from(s)
}

/// Binary 16-bit PGM of a row-major `width x height` image. Values are
/// mapped affinely from `[min, max]` to `[0, 65535]`; the map goes to the
/// sidecar file.
pub fn write_pgm(path: impl AsRef<Path>, width: usize, height: usize, image: &[f64]) -> Result<()> {
    if image.len() != width * height || image.is_empty() {
        return Err(Error::invalid("image size does not match its dimensions"));
    }
    let lo = image.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = image.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let path = path.as_ref();
    let mut out = BufWriter::new(fs::File::create(path)?);
    write!(out, "P5\n{width} {height}\n65535\n")?;
    for &v in image {
        let level = if span > 0.0 {
            ((v - lo) / span * 65535.0).round() as u16
        } else {
            0
        };
        out.write_all(&level.to_be_bytes())?;
    }
    out.flush()?;
    fs::write(
        pgm_sidecar(path),
        format!("# value = min + (max - min) * level / 65535\nmin={lo:.16e}\nmax={hi:.16e}\n"),
    )?;
    Ok(())
}

/// Read a 16-bit PGM written by [`write_pgm`] as `(width, height, levels)`.
pub fn read_pgm(path: impl AsRef<Path>) -> Result<(usize, usize, Vec<u16>)> {
    const KIND: &str = "pgm";
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(format_err(KIND, "truncated header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if fields[0] != "P5" || fields[3] != "65535" {
        return Err(format_err(KIND, "expected a 16-bit P5 image"));
    }
    let w: usize = parse_num(KIND, "width", &fields[1])?;
    let h: usize = parse_num(KIND, "height", &fields[2])?;
    let data = &bytes[pos + 1..];
    if data.len() != 2 * w * h {
        return Err(format_err(KIND, "pixel data length mismatch"));
    }
    Ok((
        w,
        h,
        data.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect(),
    ))
}

pub fn write_phantom(path: impl AsRef<Path>, spec: &PhantomSpec) -> Result<()> {
    fs::write(path, spec.to_toml())?;
    Ok(())
}

pub fn read_phantom(path: impl AsRef<Path>) -> Result<PhantomSpec> {
    PhantomSpec::from_toml(&fs::read_to_string(path)?)
}
