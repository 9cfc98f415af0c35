//! Linear model file: 8-byte magic, little-endian u64 header length, a JSON
//! header, the feature names (each a u32 byte length plus UTF-8), then the
//! weights as a length-prefixed little-endian f64 array followed by the bias.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{LinearModel, ModelKind, TrainConfig, TrainingSummary};
use crate::error::{Error, Result};
use crate::jst::io::{read_f64s, read_u64, write_f64s};

const MAGIC: &[u8; 8] = b"LINMODEL";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    kind: ModelKind,
    config: TrainConfig,
    summary: TrainingSummary,
    meta: BTreeMap<String, String>,
    name_count: usize,
}

pub fn write_linear_model(path: &Path, model: &LinearModel) -> Result<()> {
    let header = Header {
        format: "linear-model".into(),
        version: VERSION,
        kind: model.kind(),
        config: *model.config(),
        summary: *model.summary(),
        meta: model.meta.clone(),
        name_count: model.names().len(),
    };
    let json = serde_json::to_vec(&header)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&(json.len() as u64).to_le_bytes())?;
        out.write_all(&json)?;
        for name in model.names() {
            out.write_all(&(name.len() as u32).to_le_bytes())?;
            out.write_all(name.as_bytes())?;
        }
        write_f64s(out, model.weights())?;
        out.write_all(&model.bias().to_le_bytes())?;
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))
}

pub fn read_linear_model(path: &Path) -> Result<LinearModel> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_from(&mut BufReader::new(file))
}

fn read_from<R: Read>(input: &mut R) -> Result<LinearModel> {
    let mut magic = [0u8; 8];
    input
        .read_exact(&mut magic)
        .map_err(|_| Error::Format("not a linear model (too short)".into()))?;
    if &magic != MAGIC {
        return Err(Error::Format("not a linear model (bad magic)".into()));
    }
    let len = read_u64(input).map_err(|e| Error::Format(e.to_string()))? as usize;
    if len > 1 << 30 {
        return Err(Error::Format(format!("header length {len} is implausible")));
    }
    let mut json = vec![0u8; len];
    input
        .read_exact(&mut json)
        .map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    let header: Header = serde_json::from_slice(&json)?;
    if header.format != "linear-model" || header.version != VERSION {
        return Err(Error::Format(format!(
            "unsupported linear model {} v{}",
            header.format, header.version
        )));
    }
    let mut names = Vec::with_capacity(header.name_count.min(1 << 20));
    for _ in 0..header.name_count {
        let mut len = [0u8; 4];
        input
            .read_exact(&mut len)
            .map_err(|e| Error::Format(format!("truncated name list: {e}")))?;
        let mut bytes = vec![0u8; u32::from_le_bytes(len) as usize];
        input
            .read_exact(&mut bytes)
            .map_err(|e| Error::Format(format!("truncated name: {e}")))?;
        names.push(String::from_utf8(bytes).map_err(|_| Error::Format("feature name is not UTF-8".into()))?);
    }
    let weights = read_f64s(input, names.len())?;
    if weights.len() != names.len() {
        return Err(Error::Format(format!("expected {} weights, found {}", names.len(), weights.len())));
    }
    let mut bias = [0u8; 8];
    input
        .read_exact(&mut bias)
        .map_err(|e| Error::Format(format!("missing bias: {e}")))?;
    let mut model = LinearModel::new(
        header.kind,
        names,
        weights,
        f64::from_le_bytes(bias),
        header.config,
        header.summary,
    )?;
    model.meta = header.meta;
    Ok(model)
}
