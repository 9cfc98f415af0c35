//! Facet model file: 8-byte magic, little-endian u64 header length, a JSON
//! header, then theta, phi and pi as length-prefixed (u64) little-endian f64
//! arrays.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{JstHyperParams, JstModel};
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"JSTMODEL";
const VERSION: u32 = 1;

/// A trained facet model together with the vocabulary it was built from.
#[derive(Debug, Clone)]
pub struct FacetModelFile {
    pub model: JstModel,
    pub vocabulary: Option<Vocabulary>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    hyper: JstHyperParams,
    vocab_fingerprint: String,
    n_docs: usize,
    k: usize,
    l: usize,
    vocab_size: usize,
    words: Vec<String>,
    vocabulary: Option<Vocabulary>,
}

pub fn write_model(path: &Path, file: &FacetModelFile) -> Result<()> {
    let out = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(out);
    write_to(&mut out, file).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

fn write_to<W: Write>(out: &mut W, file: &FacetModelFile) -> std::io::Result<()> {
    let model = &file.model;
    let header = Header {
        format: "jst-model".into(),
        version: VERSION,
        hyper: *model.hyper(),
        vocab_fingerprint: model.vocab_fingerprint().to_string(),
        n_docs: model.n_docs(),
        k: model.k(),
        l: model.l(),
        vocab_size: model.vocab_size(),
        words: model.words().to_vec(),
        vocabulary: file.vocabulary.clone(),
    };
    let json = serde_json::to_vec(&header)?;
    out.write_all(MAGIC)?;
    out.write_all(&(json.len() as u64).to_le_bytes())?;
    out.write_all(&json)?;
    for tensor in [model.theta_raw(), model.phi_raw(), model.pi_raw()] {
        write_f64s(out, tensor)?;
    }
    Ok(())
}

pub(crate) fn write_f64s<W: Write>(out: &mut W, values: &[f64]) -> std::io::Result<()> {
    out.write_all(&(values.len() as u64).to_le_bytes())?;
    for v in values {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub(crate) fn read_u64<R: Read>(input: &mut R) -> std::io::Result<u64> {
    let mut buf = [0u8; 8];
    input.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

pub(crate) fn read_f64s<R: Read>(input: &mut R, limit: usize) -> Result<Vec<f64>> {
    let n = read_u64(input).map_err(|e| Error::Format(format!("truncated array length: {e}")))? as usize;
    if n > limit {
        return Err(Error::Format(format!("array of {n} values exceeds expected {limit}")));
    }
    let mut bytes = vec![0u8; n * 8];
    input
        .read_exact(&mut bytes)
        .map_err(|e| Error::Format(format!("truncated array: {e}")))?;
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

pub fn read_model(path: &Path) -> Result<FacetModelFile> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_from(&mut BufReader::new(file))
}

fn read_from<R: Read>(input: &mut R) -> Result<FacetModelFile> {
    let mut magic = [0u8; 8];
    input
        .read_exact(&mut magic)
        .map_err(|_| Error::Format("not a facet model (too short)".into()))?;
    if &magic != MAGIC {
        return Err(Error::Format("not a facet model (bad magic)".into()));
    }
    let len = read_u64(input).map_err(|e| Error::Format(e.to_string()))? as usize;
    let mut json = vec![0u8; len];
    input
        .read_exact(&mut json)
        .map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    let header: Header = serde_json::from_slice(&json)?;
    if header.format != "jst-model" || header.version != VERSION {
        return Err(Error::Format(format!(
            "unsupported facet model {} v{}",
            header.format, header.version
        )));
    }
    if header.words.len() != header.vocab_size || header.hyper.k != header.k || header.hyper.l != header.l {
        return Err(Error::Format("header fields disagree".into()));
    }
    let (d, k, l, v) = (header.n_docs, header.k, header.l, header.vocab_size);
    let theta = read_f64s(input, d * l * k)?;
    let phi = read_f64s(input, k * l * v)?;
    let pi = read_f64s(input, d * l)?;
    let vocabulary = header.vocabulary.map(Vocabulary::reindex);
    if let Some(vocab) = &vocabulary {
        if vocab.fingerprint() != header.vocab_fingerprint {
            return Err(Error::Format("embedded vocabulary does not match its fingerprint".into()));
        }
    }
    let model = JstModel::from_parts(header.hyper, header.words, d, theta, phi, pi, header.vocab_fingerprint)?;
    Ok(FacetModelFile { model, vocabulary })
}
