use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::chat::Label;
use crate::error::{Error, Result};

use super::registry::FeatureRegistry;

const HASH_PREFIX: &str = "# registry=";
const FIXED_COLUMNS: [&str; 3] = ["id", "label", "mmse"];

/// Feature rows with optional labels and MMSE scores. A `None` value is a
/// masked feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub names: Vec<String>,
    pub registry_hash: String,
    pub ids: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub labels: Vec<Option<Label>>,
    pub mmse: Vec<Option<f64>>,
}

impl Dataset {
    pub fn new(names: Vec<String>, registry_hash: impl Into<String>) -> Self {
        Dataset {
            names,
            registry_hash: registry_hash.into(),
            ids: Vec::new(),
            rows: Vec::new(),
            labels: Vec::new(),
            mmse: Vec::new(),
        }
    }

    pub fn for_registry(registry: &FeatureRegistry) -> Self {
        Dataset::new(registry.names().iter().map(|s| s.to_string()).collect(), registry.hash())
    }

    pub fn push(&mut self, id: impl Into<String>, row: Vec<Option<f64>>, label: Option<Label>, mmse: Option<f64>) -> Result<()> {
        if row.len() != self.names.len() {
            return Err(Error::data(format!(
                "row has {} values, dataset has {} features",
                row.len(),
                self.names.len()
            )));
        }
        if let Some(v) = row.iter().flatten().find(|v| !v.is_finite()) {
            return Err(Error::data(format!("non-finite feature value {v}")));
        }
        self.ids.push(id.into());
        self.rows.push(row);
        self.labels.push(label);
        self.mmse.push(mmse);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    /// Binary labels (AD = 1); an error when any row is unlabeled.
    pub fn binary_labels(&self) -> Result<Vec<u8>> {
        self.labels
            .iter()
            .zip(&self.ids)
            .map(|(l, id)| {
                l.map(Label::as_binary)
                    .ok_or_else(|| Error::data(format!("sample {id} has no label")))
            })
            .collect()
    }

    /// MMSE targets; an error when any row lacks one.
    pub fn mmse_targets(&self) -> Result<Vec<f64>> {
        self.mmse
            .iter()
            .zip(&self.ids)
            .map(|(m, id)| m.ok_or_else(|| Error::data(format!("sample {id} has no MMSE score"))))
            .collect()
    }

    /// Keep only the rows at `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            names: self.names.clone(),
            registry_hash: self.registry_hash.clone(),
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            mmse: idx.iter().map(|&i| self.mmse[i]).collect(),
        }
    }

    pub fn masked_count(&self) -> usize {
        self.rows.iter().flatten().filter(|v| v.is_none()).count()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        writeln!(out, "{HASH_PREFIX}{}", self.registry_hash)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(FIXED_COLUMNS.iter().copied().chain(self.names.iter().map(String::as_str)))?;
        for i in 0..self.len() {
            let mut rec: Vec<String> = Vec::with_capacity(3 + self.n_features());
            rec.push(self.ids[i].clone());
            rec.push(self.labels[i].map_or(String::new(), |l| l.as_binary().to_string()));
            rec.push(self.mmse[i].map_or(String::new(), |m| m.to_string()));
            rec.extend(self.rows[i].iter().map(|v| v.map_or(String::new(), |x| x.to_string())));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Parse a matrix. When `registry` is given, the embedded hash and the
    /// header must both match it.
    pub fn read_csv<R: std::io::Read>(input: R, registry: Option<&FeatureRegistry>) -> Result<Dataset> {
        let mut reader = BufReader::new(input);
        let mut first = String::new();
        reader.read_line(&mut first)?;
        let hash = first
            .trim_end()
            .strip_prefix(HASH_PREFIX)
            .ok_or_else(|| Error::data("matrix file does not start with a registry hash line"))?
            .to_string();
        if let Some(reg) = registry {
            if reg.hash() != hash {
                return Err(Error::RegistryMismatch {
                    expected: reg.hash().to_string(),
                    found: hash,
                });
            }
        }
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header.len() < 3 || header[..3] != FIXED_COLUMNS {
            return Err(Error::data("matrix header must start with id,label,mmse"));
        }
        let names = header[3..].to_vec();
        if let Some(reg) = registry {
            if names.iter().map(String::as_str).ne(reg.names()) {
                return Err(Error::RegistryMismatch {
                    expected: format!("{} registry columns", reg.len()),
                    found: format!("{} columns that differ from the registry", names.len()),
                });
            }
        }
        let mut ds = Dataset::new(names, hash);
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let ctx = |m: String| Error::data(format!("matrix row {}: {m}", line + 1));
            if rec.len() != header.len() {
                return Err(ctx(format!("{} fields, header has {}", rec.len(), header.len())));
            }
            let label = match &rec[1] {
                "" => None,
                s => Some(s.parse::<Label>().map_err(|e| ctx(e.to_string()))?),
            };
            let mmse = match &rec[2] {
                "" => None,
                s => Some(s.parse::<f64>().map_err(|_| ctx(format!("bad mmse {s:?}")))?),
            };
            let row = rec
                .iter()
                .skip(3)
                .map(|c| match c {
                    "" => Ok(None),
                    s => s.parse::<f64>().map(Some).map_err(|_| ctx(format!("bad value {s:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            ds.push(&rec[0], row, label, mmse).map_err(|e| ctx(e.to_string()))?;
        }
        Ok(ds)
    }

    /// Write through a temporary file in the same directory, then rename.
    pub fn write_path(&self, path: &Path) -> Result<()> {
        write_atomic(path, |w| self.write_csv(w))
    }

    pub fn read_path(path: &Path, registry: Option<&FeatureRegistry>) -> Result<Dataset> {
        let f = std::fs::File::open(path).map_err(|e| Error::resource(path, e.to_string()))?;
        Dataset::read_csv(f, registry)
    }
}

/// Create `path` atomically: the content goes to a sibling temporary file
/// that is renamed into place once complete.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut std::fs::File) -> Result<()>) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::InvalidArgument(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        body(&mut f)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}
