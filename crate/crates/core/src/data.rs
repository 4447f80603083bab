//! Paired lifetime datasets and their CSV representation.
//!
//! Input files are UTF-8, comma separated, two columns, with an optional `x,y`
//! header. A first row whose fields do not parse as numbers is taken as a header.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bitl::ObsPair;
use crate::error::{Error, Result};

/// A nonempty, ordered sample of strictly positive pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pairs: Vec<ObsPair>,
    pub label: String,
}

impl Dataset {
    pub fn new(pairs: Vec<ObsPair>, label: impl Into<String>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Data("dataset has no observations".into()));
        }
        if let Some((i, o)) = pairs
            .iter()
            .enumerate()
            .find(|(_, o)| !(o.x.is_finite() && o.y.is_finite() && o.x > 0.0 && o.y > 0.0))
        {
            return Err(Error::Data(format!(
                "observation {} = ({}, {}) is not strictly positive and finite",
                i + 1,
                o.x,
                o.y
            )));
        }
        Ok(Self {
            pairs,
            label: label.into(),
        })
    }

    pub fn pairs(&self) -> &[ObsPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.pairs.iter().map(|o| o.x).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.pairs.iter().map(|o| o.y).collect()
    }

    /// Parses CSV text. Every malformed or non-positive row is reported, by
    /// 1-based line number, in a single error.
    pub fn from_csv_reader<R: Read>(reader: R, label: impl Into<String>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);

        let mut pairs = Vec::new();
        let mut problems = Vec::new();
        for (idx, rec) in rdr.records().enumerate() {
            let line = idx + 1;
            let rec = rec.map_err(|e| Error::Data(format!("line {line}: {e}")))?;
            if rec.iter().all(|f| f.is_empty()) {
                continue;
            }
            if idx == 0 && rec.iter().any(|f| f.parse::<f64>().is_err()) {
                // header row
                continue;
            }
            if rec.len() != 2 {
                problems.push(format!("line {line}: expected 2 fields, found {}", rec.len()));
                continue;
            }
            let parsed: Vec<std::result::Result<f64, _>> =
                rec.iter().map(|f| f.parse::<f64>()).collect();
            match (&parsed[0], &parsed[1]) {
                (Ok(x), Ok(y)) => match ObsPair::new(*x, *y) {
                    Ok(o) => pairs.push(o),
                    Err(_) => problems.push(format!(
                        "line {line}: values ({x}, {y}) must be positive and finite"
                    )),
                },
                _ => problems.push(format!(
                    "line {line}: malformed number in `{}`",
                    rec.iter().collect::<Vec<_>>().join(",")
                )),
            }
        }
        if !problems.is_empty() {
            return Err(Error::Data(format!(
                "{} invalid row(s): {}",
                problems.len(),
                problems.join("; ")
            )));
        }
        if pairs.is_empty() {
            return Err(Error::Data("no valid observation rows".into()));
        }
        Self::new(pairs, label)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file, path.display().to_string())
    }

    /// Writes `x,y` CSV with shortest round-trip decimal representations.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_pairs_csv(&self.pairs, writer)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path.as_ref())?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

pub fn write_pairs_csv<W: Write>(pairs: &[ObsPair], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["x", "y"]).map_err(io)?;
    for o in pairs {
        w.write_record([o.x.to_string(), o.y.to_string()]).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
