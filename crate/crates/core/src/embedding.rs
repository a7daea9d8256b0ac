//! Embedding matrices: validation, on-disk formats, a synthetic generator
//! and the cosine-similarity primitive.
//!
//! Two formats are supported:
//!
//! * **JSONL** — one `{"id": "...", "vector": [...]}` object per line.
//! * **Binary** — magic `FGEM`, `u32` version (1), `u64` count, `u32` dim,
//!   `count * dim` little-endian `f32` values row-major, then `count`
//!   ids each as a `u16` byte length followed by UTF-8 bytes.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

const MAGIC: &[u8; 4] = b"FGEM";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingFormat {
    Jsonl,
    Binary,
}

impl FromStr for EmbeddingFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(EmbeddingFormat::Jsonl),
            "binary" | "bin" => Ok(EmbeddingFormat::Binary),
            other => Err(Error::InvalidParameter(format!(
                "unknown embedding format {other:?} (expected jsonl or binary)"
            ))),
        }
    }
}

impl EmbeddingFormat {
    /// Guesses the format from a file extension; anything but `.jsonl`/`.json` is binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => EmbeddingFormat::Jsonl,
            _ => EmbeddingFormat::Binary,
        }
    }
}

/// The unlabeled pool: `n` instance vectors of dimension `dim`, each with a unique id.
///
/// Immutable once built; every constructor validates the invariants
/// (n >= 1, dim >= 1, unique ids, finite non-zero rows).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    ids: Vec<String>,
    data: Vec<f32>,
    dim: usize,
}

impl EmbeddingMatrix {
    /// Builds a matrix from row-major `data`. Errors name the 1-based record.
    pub fn new(ids: Vec<String>, data: Vec<f32>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if ids.is_empty() {
            return Err(Error::InvalidParameter("matrix must contain at least one row".into()));
        }
        if data.len() != ids.len() * dim {
            return Err(Error::InvalidParameter(format!(
                "{} values do not form {} rows of dimension {dim}",
                data.len(),
                ids.len()
            )));
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if !seen.insert(id.as_str()) {
                return Err(Error::format(i + 1, format!("duplicate id {id:?}")));
            }
        }
        for (i, row) in data.chunks_exact(dim).enumerate() {
            validate_row(row).map_err(|msg| Error::format(i + 1, msg))?;
        }
        Ok(Self { ids, data, dim })
    }

    pub fn from_rows(ids: Vec<String>, rows: Vec<Vec<f32>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::format(
                    i + 1,
                    format!("dimension {} differs from {dim}", row.len()),
                ));
            }
            data.extend_from_slice(row);
        }
        if ids.len() != rows.len() {
            return Err(Error::InvalidParameter(format!(
                "{} ids for {} rows",
                ids.len(),
                rows.len()
            )));
        }
        Self::new(ids, data, dim)
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    /// Rows scaled to unit Euclidean norm (norm computed in f64).
    pub fn normalized(&self) -> Vec<f32> {
        let mut out = Vec::with_capacity(self.data.len());
        for row in self.rows() {
            let norm = row.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt();
            out.extend(row.iter().map(|&x| (f64::from(x) / norm) as f32));
        }
        out
    }
}

fn validate_row(row: &[f32]) -> std::result::Result<(), String> {
    if let Some(j) = row.iter().position(|x| !x.is_finite()) {
        return Err(format!("non-finite value at component {j}"));
    }
    if row.iter().all(|&x| x == 0.0) {
        return Err("zero vector".into());
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct JsonlRecord {
    id: String,
    vector: Vec<f64>,
}

pub fn load_embeddings(path: impl AsRef<Path>, format: EmbeddingFormat) -> Result<EmbeddingMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    match format {
        EmbeddingFormat::Jsonl => read_jsonl(reader, path),
        EmbeddingFormat::Binary => read_binary(reader, path),
    }
}

pub fn save_embeddings(
    matrix: &EmbeddingMatrix,
    path: impl AsRef<Path>,
    format: EmbeddingFormat,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    match format {
        EmbeddingFormat::Jsonl => write_jsonl(matrix, &mut w),
        EmbeddingFormat::Binary => write_binary(matrix, &mut w),
    }
    .and_then(|_| w.flush())
    .map_err(|e| Error::io(path, e))
}

fn read_jsonl(reader: impl BufRead, path: &Path) -> Result<EmbeddingMatrix> {
    let mut ids = Vec::new();
    let mut data = Vec::new();
    let mut dim = None;
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let record_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonlRecord =
            serde_json::from_str(&line).map_err(|e| Error::format(record_no, e.to_string()))?;
        let d = *dim.get_or_insert(rec.vector.len());
        if rec.vector.len() != d {
            return Err(Error::format(
                record_no,
                format!("dimension {} differs from {d}", rec.vector.len()),
            ));
        }
        if d == 0 {
            return Err(Error::format(record_no, "empty vector"));
        }
        let row: Vec<f32> = rec.vector.iter().map(|&x| x as f32).collect();
        validate_row(&row).map_err(|msg| Error::format(record_no, msg))?;
        if !seen.insert(rec.id.clone()) {
            return Err(Error::format(record_no, format!("duplicate id {:?}", rec.id)));
        }
        ids.push(rec.id);
        data.extend(row);
    }
    let Some(dim) = dim else {
        return Err(Error::format(0, "no records"));
    };
    EmbeddingMatrix::new(ids, data, dim)
}

fn write_jsonl(matrix: &EmbeddingMatrix, w: &mut impl Write) -> std::io::Result<()> {
    for (id, row) in matrix.ids().iter().zip(matrix.rows()) {
        // f32 -> f64 is exact and serde_json prints the shortest round-trip form.
        let rec = JsonlRecord {
            id: id.clone(),
            vector: row.iter().map(|&x| f64::from(x)).collect(),
        };
        serde_json::to_writer(&mut *w, &rec)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

fn read_exact_or<R: Read>(r: &mut R, buf: &mut [u8], record: usize, what: &str) -> Result<()> {
    r.read_exact(buf)
        .map_err(|_| Error::format(record, format!("truncated file while reading {what}")))
}

fn read_binary(mut r: impl Read, _path: &Path) -> Result<EmbeddingMatrix> {
    let mut magic = [0u8; 4];
    read_exact_or(&mut r, &mut magic, 0, "magic")?;
    if &magic != MAGIC {
        return Err(Error::format(0, "bad magic bytes (expected FGEM)"));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    read_exact_or(&mut r, &mut b4, 0, "version")?;
    let version = u32::from_le_bytes(b4);
    if version != VERSION {
        return Err(Error::format(0, format!("unsupported version {version}")));
    }
    read_exact_or(&mut r, &mut b8, 0, "count")?;
    let n = usize::try_from(u64::from_le_bytes(b8))
        .map_err(|_| Error::format(0, "count does not fit in memory"))?;
    read_exact_or(&mut r, &mut b4, 0, "dimension")?;
    let dim = u32::from_le_bytes(b4) as usize;
    if n == 0 || dim == 0 {
        return Err(Error::format(0, format!("empty matrix (n = {n}, dim = {dim})")));
    }

    let mut raw = vec![0u8; dim * 4];
    let mut data = Vec::with_capacity(n.saturating_mul(dim).min(1 << 28));
    for i in 0..n {
        read_exact_or(&mut r, &mut raw, i + 1, "vector")?;
        data.extend(raw.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])));
    }
    let mut ids = Vec::with_capacity(n);
    let mut b2 = [0u8; 2];
    for i in 0..n {
        read_exact_or(&mut r, &mut b2, i + 1, "id length")?;
        let mut bytes = vec![0u8; u16::from_le_bytes(b2) as usize];
        read_exact_or(&mut r, &mut bytes, i + 1, "id")?;
        let id = String::from_utf8(bytes).map_err(|_| Error::format(i + 1, "id is not UTF-8"))?;
        ids.push(id);
    }
    EmbeddingMatrix::new(ids, data, dim)
}

fn write_binary(matrix: &EmbeddingMatrix, w: &mut impl Write) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(matrix.n() as u64).to_le_bytes())?;
    w.write_all(&(matrix.dim() as u32).to_le_bytes())?;
    for &x in matrix.as_slice() {
        w.write_all(&x.to_le_bytes())?;
    }
    for id in matrix.ids() {
        let len = u16::try_from(id.len()).map_err(|_| {
            std::io::Error::new(std::io::ErrorKind::InvalidInput, format!("id too long: {id:?}"))
        })?;
        w.write_all(&len.to_le_bytes())?;
        w.write_all(id.as_bytes())?;
    }
    Ok(())
}

/// Parameters of the Gaussian-mixture fixture generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n: usize,
    pub dim: usize,
    pub clusters: usize,
    pub spread: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(n: usize, dim: usize, clusters: usize, spread: f64, seed: u64) -> Self {
        Self {
            n,
            dim,
            clusters,
            spread,
            seed,
        }
    }
}

/// A synthetic pool plus the component each point was drawn from.
#[derive(Debug, Clone)]
pub struct SyntheticPool {
    pub matrix: EmbeddingMatrix,
    pub labels: Vec<usize>,
}

/// Draws `n` points from an equal-weight mixture of isotropic Gaussians.
///
/// Component means are unit-norm: the standard basis vector `e_c` when
/// `clusters <= dim`, otherwise seeded random directions. Point `i` belongs
/// to component `i % clusters`; ids are `syn-0 .. syn-(n-1)`.
pub fn generate_synthetic(
    n: usize,
    dim: usize,
    clusters: usize,
    spread: f64,
    seed: u64,
) -> Result<EmbeddingMatrix> {
    generate_synthetic_labeled(SyntheticSpec::new(n, dim, clusters, spread, seed)).map(|p| p.matrix)
}

pub fn generate_synthetic_labeled(spec: SyntheticSpec) -> Result<SyntheticPool> {
    let SyntheticSpec {
        n,
        dim,
        clusters,
        spread,
        seed,
    } = spec;
    if clusters == 0 || n < clusters {
        return Err(Error::InvalidParameter(format!(
            "need n >= clusters >= 1 (n = {n}, clusters = {clusters})"
        )));
    }
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    if !(spread > 0.0 && spread.is_finite()) {
        return Err(Error::InvalidParameter(format!("spread must be > 0, got {spread}")));
    }

    let mut mean_rng = rng::stream(seed, &[0]);
    let means: Vec<Vec<f64>> = (0..clusters)
        .map(|c| {
            if clusters <= dim {
                let mut m = vec![0.0; dim];
                m[c] = 1.0;
                m
            } else {
                loop {
                    let v: Vec<f64> = (0..dim).map(|_| mean_rng.sample(StandardNormal)).collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm > 1e-12 {
                        break v.into_iter().map(|x| x / norm).collect();
                    }
                }
            }
        })
        .collect();

    let noise = Normal::new(0.0, spread)
        .map_err(|e| Error::InvalidParameter(format!("spread: {e}")))?;
    let mut point_rng = rng::stream(seed, &[1]);
    let mut data = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % clusters;
        loop {
            let row: Vec<f32> = means[c]
                .iter()
                .map(|&m| (m + noise.sample(&mut point_rng)) as f32)
                .collect();
            if validate_row(&row).is_ok() {
                data.extend(row);
                break;
            }
        }
        labels.push(c);
    }
    let ids = (0..n).map(|i| format!("syn-{i}")).collect();
    Ok(SyntheticPool {
        matrix: EmbeddingMatrix::new(ids, data, dim)?,
        labels,
    })
}

/// `dot(u, v) / (|u| |v|)`, computed in f64 and clamped to `[-1, 1]`.
pub fn cosine_similarity<T: Copy + Into<f64>>(u: &[T], v: &[T]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    let (mut dot, mut nu, mut nv) = (0.0f64, 0.0f64, 0.0f64);
    for (&a, &b) in u.iter().zip(v) {
        let (a, b): (f64, f64) = (a.into(), b.into());
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}
