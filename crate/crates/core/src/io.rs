//! Embedding and label files.
//!
//! Binary layout (all little-endian):
//!
//! ```text
//! OODE: "OODE" | version u32 = 1 | n u64 | d u64 | n·d × f32, row-major
//! OODL: "OODL" | version u32 = 1 | n u64 | n × u32
//! ```
//!
//! Paths ending in `.csv` are read and written as plain comma-separated text
//! instead (no header row, one sample per line). Loading sniffs the magic
//! bytes first, so a binary file is recognized whatever its extension.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::data::{EmbeddingMatrix, LabelVector};
use crate::error::{Error, Result};

pub const EMBEDDING_MAGIC: &[u8; 4] = b"OODE";
pub const LABEL_MAGIC: &[u8; 4] = b"OODL";
pub const FORMAT_VERSION: u32 = 1;
pub const EMBEDDING_HEADER_LEN: usize = 24;
pub const LABEL_HEADER_LEN: usize = 16;

fn is_csv(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

fn read_u64(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"))
}

/// Validates magic, version and payload length; returns the payload.
fn binary_payload<'a>(
    path: &Path,
    bytes: &'a [u8],
    magic: &'static [u8; 4],
    header_len: usize,
    payload_len: impl FnOnce(&[u8]) -> Option<u64>,
) -> Result<&'a [u8]> {
    let expected_magic = std::str::from_utf8(magic).expect("ascii magic");
    if bytes.len() < 4 || &bytes[..4] != magic {
        return Err(Error::BadMagic {
            path: path.to_path_buf(),
            expected: expected_magic,
        });
    }
    if bytes.len() < header_len {
        return Err(Error::TruncatedFile {
            path: path.to_path_buf(),
            expected: header_len as u64,
            actual: bytes.len() as u64,
        });
    }
    let version = read_u32(bytes, 4);
    if version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion {
            path: path.to_path_buf(),
            version,
        });
    }
    let actual = (bytes.len() - header_len) as u64;
    let expected = payload_len(bytes).unwrap_or(u64::MAX);
    if expected != actual {
        return Err(Error::TruncatedFile {
            path: path.to_path_buf(),
            expected,
            actual,
        });
    }
    Ok(&bytes[header_len..])
}

/// Splits CSV text into trimmed fields per non-blank line.
fn csv_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split(',').map(str::trim).collect()))
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    if !bytes.starts_with(EMBEDDING_MAGIC) && is_csv(path) {
        return parse_embeddings_csv(&String::from_utf8_lossy(&bytes));
    }
    decode_embeddings(path, &bytes)
}

/// Decodes an in-memory OODE image; `path` is only used in errors.
pub fn decode_embeddings(path: &Path, bytes: &[u8]) -> Result<EmbeddingMatrix> {
    let payload = binary_payload(path, bytes, EMBEDDING_MAGIC, EMBEDDING_HEADER_LEN, |b| {
        read_u64(b, 8).checked_mul(read_u64(b, 16))?.checked_mul(4)
    })?;
    let n = read_u64(bytes, 8) as usize;
    let d = read_u64(bytes, 16) as usize;
    if n == 0 || d == 0 {
        return Err(Error::EmptyMatrix);
    }
    let data = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    EmbeddingMatrix::new(n, d, data)
}

pub fn parse_embeddings_csv(text: &str) -> Result<EmbeddingMatrix> {
    let mut rows: Vec<Vec<f32>> = Vec::new();
    for (line, fields) in csv_lines(text) {
        let row = fields
            .iter()
            .map(|f| {
                f.parse::<f32>().map_err(|e| Error::Csv {
                    line,
                    message: format!("{f:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Csv {
                    line,
                    message: format!("expected {} fields, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    EmbeddingMatrix::from_rows(&rows)
}

/// OODE image of `matrix`.
pub fn encode_embeddings(matrix: &EmbeddingMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(EMBEDDING_HEADER_LEN + 4 * matrix.as_slice().len());
    out.extend_from_slice(EMBEDDING_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(matrix.n() as u64).to_le_bytes());
    out.extend_from_slice(&(matrix.d() as u64).to_le_bytes());
    for v in matrix.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Writes OODE, or CSV when the path ends in `.csv`. Both reload bit-exactly.
pub fn save_embeddings(matrix: &EmbeddingMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if is_csv(path) {
        let mut text = String::new();
        for row in matrix.rows() {
            let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            text.push_str(&fields.join(","));
            text.push('\n');
        }
        fs::write(path, text)?;
    } else {
        let mut file = fs::File::create(path)?;
        file.write_all(&encode_embeddings(matrix))?;
        file.flush()?;
    }
    Ok(())
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<LabelVector> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    if !bytes.starts_with(LABEL_MAGIC) && is_csv(path) {
        return parse_labels_csv(&String::from_utf8_lossy(&bytes));
    }
    decode_labels(path, &bytes)
}

pub fn decode_labels(path: &Path, bytes: &[u8]) -> Result<LabelVector> {
    let payload = binary_payload(path, bytes, LABEL_MAGIC, LABEL_HEADER_LEN, |b| {
        read_u64(b, 8).checked_mul(4)
    })?;
    let labels = payload
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    LabelVector::new(labels)
}

/// Accepts one label per line or comma-separated labels.
pub fn parse_labels_csv(text: &str) -> Result<LabelVector> {
    let mut labels = Vec::new();
    for (line, fields) in csv_lines(text) {
        for f in fields {
            labels.push(f.parse::<u32>().map_err(|e| Error::Csv {
                line,
                message: format!("{f:?}: {e}"),
            })?);
        }
    }
    LabelVector::new(labels)
}

pub fn encode_labels(labels: &LabelVector) -> Vec<u8> {
    let mut out = Vec::with_capacity(LABEL_HEADER_LEN + 4 * labels.len());
    out.extend_from_slice(LABEL_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(labels.len() as u64).to_le_bytes());
    for v in labels.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn save_labels(labels: &LabelVector, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if is_csv(path) {
        let text: String = labels.as_slice().iter().map(|v| format!("{v}\n")).collect();
        fs::write(path, text)?;
    } else {
        fs::write(path, encode_labels(labels))?;
    }
    Ok(())
}
