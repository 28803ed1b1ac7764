//! CSV and JSON encodings of shot tables, noise models and sweep results.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use qroute_core::chan::SweepRow;
use qroute_core::noise::{BcnotModel, BiasVector};
use qroute_core::rng::StreamKey;
use qroute_core::sim::ShotTable;

use crate::error::{Error, Result};

/// Writes rows as CSV with a header taken from the field names.
pub fn write_csv<T: Serialize>(w: impl Write, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(r: impl Read) -> Result<Vec<T>> {
    csv::Reader::from_reader(r).deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Writes `text` to `path`, or to standard output when `path` is `None`.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

/// Rows rendered as a CSV string.
pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| Error::format("<csv>", e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct ShotRecord {
    bitstring: String,
    count: u64,
}

/// Serializes a shot table as `bitstring,count` rows in bitstring order.
pub fn write_shot_table(w: impl Write, t: &ShotTable) -> Result<()> {
    let rows: Vec<ShotRecord> = t.counts.iter().map(|(b, &c)| ShotRecord { bitstring: b.clone(), count: c }).collect();
    write_csv(w, &rows)
}

/// Reads a `bitstring,count` table. Bitstrings must be binary, equally long and
/// unique; the shot total is the sum of the counts.
pub fn read_shot_table(r: impl Read) -> Result<ShotTable> {
    let rows: Vec<ShotRecord> = read_csv(r)?;
    let mut t = ShotTable::default();
    let width = rows.first().map(|r| r.bitstring.len());
    for (k, row) in rows.into_iter().enumerate() {
        let context = format!("shot table row {}", k + 1);
        if row.bitstring.is_empty() || !row.bitstring.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::format(context, format!("`{}` is not a bitstring", row.bitstring)));
        }
        if Some(row.bitstring.len()) != width {
            return Err(Error::format(context, "bitstring width differs from the first row"));
        }
        t.shots += row.count;
        if t.counts.insert(row.bitstring, row.count).is_some() {
            return Err(Error::format(context, "repeated bitstring"));
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub master: u64,
    pub experiment: u64,
    pub trial: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub a: usize,
    pub b: usize,
    pub beta: [f64; 5],
}

/// JSON form of a biased-CNOT model: `{beta_max, seed, pairs: [{a, b, beta}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub beta_max: f64,
    pub seed: SeedRecord,
    pub pairs: Vec<PairRecord>,
}

impl From<&BcnotModel> for ModelRecord {
    fn from(m: &BcnotModel) -> Self {
        let StreamKey { master, experiment, trial } = m.seed;
        ModelRecord {
            beta_max: m.beta_max,
            seed: SeedRecord { master, experiment, trial },
            pairs: m.pairs().map(|((a, b), beta)| PairRecord { a, b, beta: beta.values() }).collect(),
        }
    }
}

impl ModelRecord {
    pub fn to_model(&self) -> Result<BcnotModel> {
        let pairs = self.pairs.iter().map(|p| Ok(((p.a, p.b), BiasVector::new(p.beta)?))).collect::<Result<Vec<_>>>()?;
        let SeedRecord { master, experiment, trial } = self.seed;
        Ok(BcnotModel::new(self.beta_max, StreamKey::new(master, experiment, trial), pairs))
    }
}

pub fn model_to_json(m: &BcnotModel) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ModelRecord::from(m))?)
}

pub fn model_from_json(text: &str) -> Result<BcnotModel> {
    serde_json::from_str::<ModelRecord>(text)?.to_model()
}

/// One CSV row of the averaging-gap sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub gate: String,
    pub beta_max: f64,
    pub model_index: usize,
    pub mean_single_circuit_dd: f64,
    pub eca_dd: f64,
}

impl From<&SweepRow> for SweepRecord {
    fn from(r: &SweepRow) -> Self {
        SweepRecord {
            gate: r.gate.to_string(),
            beta_max: r.beta_max,
            model_index: r.model_index,
            mean_single_circuit_dd: r.mean_single_circuit_dd,
            eca_dd: r.eca_dd,
        }
    }
}

pub fn write_sweep(w: impl Write, rows: &[SweepRow]) -> Result<()> {
    write_csv(w, &rows.iter().map(SweepRecord::from).collect::<Vec<_>>())
}
