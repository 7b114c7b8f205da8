//! Single-file containers (one JSON header line + raw little-endian `f64` payload), CSV reports and PGM images.
//!
//! ```text
//! {"magic":"MTF1","kind":"mixed","k":1,"l":1,"nx":4,"ny":4,"x_min":-1.0,"x_max":1.0,"dtype":"f64le","order":"c_plane_row_major"}\n
//! <4·16 little-endian f64: plane c = p·(l+1)+q, rows y-outer, x-inner>
//! ```

use std::io::Write;
use std::path::Path;

use ndarray::{Array2, Array3, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Sinogram, SinogramGrid};
use crate::grid::GridSpec;
use crate::tensor::{n_components, MixedTensorField, SymmetricTensorField};

pub const MAGIC: &str = "MTF1";
const DTYPE: &str = "f64le";
const ORDER: &str = "c_plane_row_major";

#[derive(Debug, Serialize, Deserialize)]
struct FieldHeader {
    magic: String,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    m: Option<usize>,
    nx: usize,
    ny: usize,
    x_min: f64,
    x_max: f64,
    dtype: String,
    order: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct SinogramHeader {
    magic: String,
    kind: String,
    k: usize,
    l: usize,
    ns: usize,
    s_max: f64,
    ntheta: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    t_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    t_max: Option<f64>,
    dtype: String,
    order: String,
}

/// Whatever a container file holds.
#[derive(Debug, Clone, PartialEq)]
pub enum FileContent {
    Mixed(MixedTensorField),
    Symmetric(SymmetricTensorField),
    Sinogram(Sinogram),
}

impl FileContent {
    pub fn kind(&self) -> &'static str {
        match self {
            FileContent::Mixed(_) => "mixed",
            FileContent::Symmetric(_) => "symmetric",
            FileContent::Sinogram(_) => "sinogram",
        }
    }
}

fn push_payload<'a>(out: &mut Vec<u8>, values: impl Iterator<Item = &'a f64>) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn header_line<T: Serialize>(h: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec(h).expect("headers serialize");
    out.push(b'\n');
    out
}

pub fn encode_field(f: &MixedTensorField) -> Vec<u8> {
    let g = f.grid();
    let h = FieldHeader {
        magic: MAGIC.into(),
        kind: "mixed".into(),
        k: Some(f.k()),
        l: Some(f.l()),
        m: None,
        nx: g.nx,
        ny: g.ny,
        x_min: g.x_min,
        x_max: g.x_max,
        dtype: DTYPE.into(),
        order: ORDER.into(),
    };
    let mut out = header_line(&h);
    push_payload(&mut out, f.data().iter());
    out
}

pub fn encode_symmetric(f: &SymmetricTensorField) -> Vec<u8> {
    let g = f.grid();
    let h = FieldHeader {
        magic: MAGIC.into(),
        kind: "symmetric".into(),
        k: None,
        l: None,
        m: Some(f.m()),
        nx: g.nx,
        ny: g.ny,
        x_min: g.x_min,
        x_max: g.x_max,
        dtype: DTYPE.into(),
        order: ORDER.into(),
    };
    let mut out = header_line(&h);
    push_payload(&mut out, f.data().iter());
    out
}

pub fn encode_sinogram(s: &Sinogram) -> Vec<u8> {
    let g = s.grid;
    let h = SinogramHeader {
        magic: MAGIC.into(),
        kind: "sinogram".into(),
        k: s.k(),
        l: s.l(),
        ns: g.ns,
        s_max: g.s_max,
        ntheta: g.ntheta,
        t_step: Some(g.t_step),
        t_max: Some(g.t_max),
        dtype: DTYPE.into(),
        order: ORDER.into(),
    };
    let mut out = header_line(&h);
    push_payload(&mut out, s.data().iter());
    out
}

fn read_payload(bytes: &[u8], count: usize) -> Result<Vec<f64>> {
    let expected = count * 8;
    if bytes.len() < expected {
        return Err(Error::TruncatedPayload { expected, found: bytes.len() });
    }
    if bytes.len() > expected {
        return Err(Error::MalformedHeader(format!(
            "header declares {expected} payload bytes but the file carries {}",
            bytes.len()
        )));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect())
}

fn malformed(e: impl std::fmt::Display) -> Error {
    Error::MalformedHeader(e.to_string())
}

pub fn decode(bytes: &[u8]) -> Result<FileContent> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::MalformedHeader("no newline-terminated header line".into()))?;
    let text = std::str::from_utf8(&bytes[..nl]).map_err(malformed)?;
    let value: serde_json::Value = serde_json::from_str(text).map_err(malformed)?;
    let obj = value.as_object().ok_or_else(|| Error::MalformedHeader("header is not a JSON object".into()))?;
    match obj.get("magic").and_then(|m| m.as_str()) {
        Some(MAGIC) => {}
        Some(other) => return Err(Error::MagicMismatch(other.to_string())),
        None => return Err(Error::MagicMismatch(String::new())),
    }
    if obj.get("dtype").and_then(|d| d.as_str()) != Some(DTYPE) {
        return Err(Error::MalformedHeader(format!("unsupported dtype {:?}", obj.get("dtype"))));
    }
    if obj.get("order").and_then(|d| d.as_str()) != Some(ORDER) {
        return Err(Error::MalformedHeader(format!("unsupported order {:?}", obj.get("order"))));
    }
    let payload = &bytes[nl + 1..];
    let kind = obj.get("kind").and_then(|k| k.as_str()).unwrap_or("");
    match kind {
        "mixed" | "symmetric" => {
            let h: FieldHeader = serde_json::from_value(value.clone()).map_err(malformed)?;
            let grid = GridSpec { nx: h.nx, ny: h.ny, x_min: h.x_min, x_max: h.x_max };
            grid.validate().map_err(malformed)?;
            let (k, l) = if kind == "mixed" {
                (h.k.ok_or_else(|| malformed("mixed field without k"))?, h.l.ok_or_else(|| malformed("mixed field without l"))?)
            } else {
                (h.m.ok_or_else(|| malformed("symmetric field without m"))?, 0)
            };
            let nc = n_components(k, l);
            let values = read_payload(payload, nc * h.nx * h.ny)?;
            let data = Array3::from_shape_vec((nc, h.ny, h.nx), values).expect("length checked");
            if kind == "mixed" {
                Ok(FileContent::Mixed(MixedTensorField::from_array(k, l, grid, data)?))
            } else {
                Ok(FileContent::Symmetric(SymmetricTensorField::from_array(k, grid, data)?))
            }
        }
        "sinogram" => {
            let h: SinogramHeader = serde_json::from_value(value.clone()).map_err(malformed)?;
            let t_max = h.t_max.unwrap_or(h.s_max);
            let t_step = h.t_step.unwrap_or(2.0 * h.s_max / (h.ns.max(2) - 1) as f64);
            let grid = SinogramGrid::new(h.ns, h.s_max, h.ntheta, t_step, t_max).map_err(malformed)?;
            let values = read_payload(payload, h.ns * h.ntheta)?;
            let data = Array2::from_shape_vec((h.ntheta, h.ns), values).expect("length checked");
            Ok(FileContent::Sinogram(Sinogram::from_array(grid, h.k, h.l, data)?))
        }
        other => Err(Error::MalformedHeader(format!("unknown kind {other:?}"))),
    }
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn read(path: &Path) -> Result<FileContent> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

pub fn encode(content: &FileContent) -> Vec<u8> {
    match content {
        FileContent::Mixed(f) => encode_field(f),
        FileContent::Symmetric(f) => encode_symmetric(f),
        FileContent::Sinogram(s) => encode_sinogram(s),
    }
}

pub fn write(path: &Path, content: &FileContent) -> Result<()> {
    write_atomic(path, &encode(content))
}

pub fn write_field(path: &Path, f: &MixedTensorField) -> Result<()> {
    write_atomic(path, &encode_field(f))
}

pub fn write_sinogram(path: &Path, s: &Sinogram) -> Result<()> {
    write_atomic(path, &encode_sinogram(s))
}

/// Reads a mixed field; a symmetric file is accepted as an `(m, 0)` field.
pub fn read_field(path: &Path) -> Result<MixedTensorField> {
    match read(path)? {
        FileContent::Mixed(f) => Ok(f),
        FileContent::Symmetric(g) => Ok(g.to_mixed()),
        FileContent::Sinogram(_) => Err(Error::Invalid(format!("{} holds a sinogram, expected a field", path.display()))),
    }
}

pub fn read_sinogram(path: &Path) -> Result<Sinogram> {
    match read(path)? {
        FileContent::Sinogram(s) => Ok(s),
        other => Err(Error::Invalid(format!("{} holds a {} field, expected a sinogram", path.display(), other.kind()))),
    }
}

/// CSV text with a fixed header row.
pub fn encode_csv(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    write_atomic(path, &encode_csv(header, rows))
}

/// Plain-text (P2) 8-bit image of one plane, min–max normalized. Returns `(min, max)`.
pub fn encode_pgm(plane: ArrayView2<'_, f64>) -> (Vec<u8>, f64, f64) {
    let (lo, hi) = plane.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (rows, cols) = plane.dim();
    let mut out = format!("P2\n{cols} {rows}\n255\n").into_bytes();
    for row in plane.outer_iter() {
        let line: Vec<String> = row
            .iter()
            .map(|&v| if hi > lo { (((v - lo) / (hi - lo)) * 255.0).round() as u8 } else { 0 })
            .map(|b| b.to_string())
            .collect();
        out.extend_from_slice(line.join(" ").as_bytes());
        out.push(b'\n');
    }
    (out, lo, hi)
}

/// Writes `<prefix>_p{p}q{q}.pgm` per component plus `<prefix>_ranges.csv` with the normalization constants.
/// Row 0 of each image is the bottom row of the grid (smallest x₂).
pub fn write_pgm_planes(prefix: &Path, f: &MixedTensorField) -> Result<()> {
    let mut rows = Vec::new();
    let stem = prefix.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let dir = prefix.parent().unwrap_or(Path::new(""));
    for c in crate::tensor::ComponentIndex::all(f.k(), f.l()) {
        let name = format!("{stem}_p{}q{}.pgm", c.p, c.q);
        let (bytes, lo, hi) = encode_pgm(f.plane(c.p, c.q));
        write_atomic(&dir.join(&name), &bytes)?;
        rows.push(vec![name, c.p.to_string(), c.q.to_string(), format!("{lo:e}"), format!("{hi:e}"), (hi <= lo).to_string()]);
    }
    write_csv(&dir.join(format!("{stem}_ranges.csv")), &["file", "p", "q", "min", "max", "degenerate"], &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn payload_size() {
        let g = GridSpec::centered(4, 1.0).unwrap();
        let f = MixedTensorField::zeros(1, 1, g);
        let bytes = encode_field(&f);
        let nl = bytes.iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(bytes.len() - nl - 1, 512);
    }

    #[test]
    fn header_text() {
        let g = GridSpec::centered(4, 1.0).unwrap();
        let bytes = encode_field(&MixedTensorField::zeros(1, 1, g));
        let nl = bytes.iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(
            std::str::from_utf8(&bytes[..nl]).unwrap(),
            r#"{"magic":"MTF1","kind":"mixed","k":1,"l":1,"nx":4,"ny":4,"x_min":-1.0,"x_max":1.0,"dtype":"f64le","order":"c_plane_row_major"}"#
        );
    }

    #[test]
    fn distinct_errors() {
        let g = GridSpec::centered(4, 1.0).unwrap();
        let bytes = encode_field(&MixedTensorField::zeros(0, 1, g));
        assert!(matches!(decode(&bytes[..bytes.len() - 3]), Err(Error::TruncatedPayload { .. })));
        let text = String::from_utf8_lossy(&bytes).replace("MTF1", "MTF2");
        assert!(matches!(decode(text.as_bytes()), Err(Error::MagicMismatch(_))));
        assert!(matches!(decode(b"{\"magic\":\"MTF1\",\n"), Err(Error::MalformedHeader(_))));
        assert!(matches!(decode(b"no header"), Err(Error::MalformedHeader(_))));
    }

    #[test]
    fn zero_plane_pgm() {
        let p = Array2::<f64>::zeros((2, 3));
        let (bytes, lo, hi) = encode_pgm(p.view());
        assert_eq!(String::from_utf8(bytes).unwrap(), "P2\n3 2\n255\n0 0 0\n0 0 0\n");
        assert_eq!((lo, hi), (0.0, 0.0));
    }
}
