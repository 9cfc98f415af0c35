//! Sparse feature matrix text format: one review per line,
//! `review_id [+1|-1] idx:value ...`, with 1-based column indices. A sidecar
//! `<file>.names` maps each index to its feature name (`idx<TAB>name`).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{FeatureSpace, FeatureVector};
use crate::corpus::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow {
    pub review_id: String,
    pub label: Option<Label>,
    pub features: FeatureVector,
}

pub fn names_path(matrix: &Path) -> PathBuf {
    let mut name = matrix.as_os_str().to_os_string();
    name.push(".names");
    PathBuf::from(name)
}

pub fn write_names(path: &Path, space: &FeatureSpace) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for (i, name) in space.names().iter().enumerate() {
        writeln!(out, "{}\t{name}", i + 1).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_names(path: &Path) -> Result<FeatureSpace> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut names = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let (idx, name) = line
            .split_once('\t')
            .ok_or_else(|| Error::record(n + 1, "name", "expected idx<TAB>name"))?;
        let idx: usize = idx
            .parse()
            .map_err(|_| Error::record(n + 1, "idx", format!("bad index \"{idx}\"")))?;
        if idx != names.len() + 1 {
            return Err(Error::record(n + 1, "idx", format!("expected index {}, got {idx}", names.len() + 1)));
        }
        names.push(name.to_string());
    }
    Ok(FeatureSpace::new(names))
}

/// Writes the matrix and its `.names` sidecar.
pub fn write_sparse(path: &Path, space: &FeatureSpace, rows: &[SparseRow]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for row in rows {
        if row.review_id.is_empty() || row.review_id.chars().any(char::is_whitespace) {
            return Err(Error::invalid(format!(
                "review id \"{}\" cannot be written to the sparse format",
                row.review_id
            )));
        }
        let mut line = row.review_id.clone();
        if let Some(label) = row.label {
            line.push_str(if label == Label::Credible { " +1" } else { " -1" });
        }
        for (col, value) in space.project(&row.features) {
            line.push_str(&format!(" {}:{value}", col + 1));
        }
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))?;
    write_names(&names_path(path), space)
}

pub fn read_sparse(path: &Path) -> Result<(FeatureSpace, Vec<SparseRow>)> {
    let space = read_names(&names_path(path))?;
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let mut parts = line.split_whitespace();
        let Some(review_id) = parts.next() else { continue };
        let mut label = None;
        let mut pairs = Vec::new();
        for (pos, part) in parts.enumerate() {
            match part.split_once(':') {
                Some((idx, value)) => {
                    let idx: usize = idx
                        .parse()
                        .map_err(|_| Error::record(line_no, "idx", format!("bad index \"{idx}\"")))?;
                    let name = idx
                        .checked_sub(1)
                        .and_then(|i| space.names().get(i))
                        .ok_or_else(|| Error::record(line_no, "idx", format!("index {idx} not in name file")))?;
                    let value: f64 = value
                        .parse()
                        .map_err(|_| Error::record(line_no, "value", format!("bad value \"{value}\"")))?;
                    pairs.push((name.clone(), value));
                }
                None if pos == 0 => {
                    label = Some(part.parse::<Label>().map_err(|e| Error::record(line_no, "label", e))?);
                }
                None => return Err(Error::record(line_no, "idx:value", format!("malformed \"{part}\""))),
            }
        }
        rows.push(SparseRow {
            review_id: review_id.to_string(),
            label,
            features: FeatureVector::from_pairs(pairs).map_err(|e| Error::record(line_no, "idx", e.to_string()))?,
        });
    }
    Ok((space, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::Block;

    #[test]
    fn matrix_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.svm");
        let space = FeatureSpace::new(["lang:good".to_string(), "cons:burstiness".to_string(), "beh:user_posts".to_string()]);
        let fv = FeatureVector::block(
            Block::Consistency,
            vec!["cons:burstiness".into(), "lang:good".into()],
            vec![0.1 + 0.2, 1.0 / 3.0],
        )
        .unwrap();
        let rows = vec![
            SparseRow { review_id: "r1".into(), label: Some(Label::NonCredible), features: fv },
            SparseRow { review_id: "r2".into(), label: None, features: FeatureVector::default() },
        ];
        write_sparse(&path, &space, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), "r1 -1 1:0.3333333333333333 2:0.30000000000000004");
        let (space2, back) = read_sparse(&path).unwrap();
        assert_eq!(space2.names(), space.names());
        assert_eq!(back[0].label, Some(Label::NonCredible));
        assert_eq!(back[0].features.get("cons:burstiness"), Some(0.1 + 0.2));
        assert_eq!(back[1].label, None);
        assert!(back[1].features.is_empty());
    }

    #[test]
    fn bad_ids_and_indices() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.svm");
        let space = FeatureSpace::new(["x".to_string()]);
        let rows = vec![SparseRow { review_id: "has space".into(), label: None, features: FeatureVector::default() }];
        assert!(write_sparse(&path, &space, &rows).is_err());

        std::fs::write(&path, "r1 +1 5:1.0\n").unwrap();
        write_names(&names_path(&path), &space).unwrap();
        assert!(read_sparse(&path).is_err());
    }
}
