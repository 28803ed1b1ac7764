//! Corpus directories: one OpenQASM file per circuit plus a `family.json`
//! sidecar describing the gate, connectivity, odd-qubit placement and CX count
//! shared by every entry.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qroute_core::decomp::{validate_family, CnotBudget, Connectivity, EquivalentFamily, GateSpec, Placement, ValidationFailure, Which};
use qroute_core::qasm::{emit_qasm, parse_qasm};
use qroute_core::Circuit;

use crate::error::{Error, Result};

pub const SIDECAR: &str = "family.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateKind {
    Toffoli,
    Fredkin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConnectivityKind {
    AllToAll,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementKind {
    Anywhere,
    Ends,
    Center,
}

/// Contents of the sidecar file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMeta {
    pub gate: GateKind,
    pub connectivity: ConnectivityKind,
    pub odd_qubit_placement: PlacementKind,
    /// CX count of the entries; the optimum for the spec, or one more.
    pub cnot_count: usize,
}

impl FamilyMeta {
    pub fn for_spec(spec: GateSpec) -> Self {
        FamilyMeta {
            gate: match spec.which {
                Which::Toffoli => GateKind::Toffoli,
                Which::Fredkin => GateKind::Fredkin,
            },
            connectivity: match spec.connectivity {
                Connectivity::AllToAll => ConnectivityKind::AllToAll,
                Connectivity::Linear => ConnectivityKind::Linear,
            },
            odd_qubit_placement: match spec.placement {
                Placement::Anywhere => PlacementKind::Anywhere,
                Placement::Ends => PlacementKind::Ends,
                Placement::Center => PlacementKind::Center,
            },
            cnot_count: spec.optimal_cnots(),
        }
    }

    pub fn spec(&self) -> Result<GateSpec> {
        let which = match self.gate {
            GateKind::Toffoli => Which::Toffoli,
            GateKind::Fredkin => Which::Fredkin,
        };
        let connectivity = match self.connectivity {
            ConnectivityKind::AllToAll => Connectivity::AllToAll,
            ConnectivityKind::Linear => Connectivity::Linear,
        };
        let placement = match self.odd_qubit_placement {
            PlacementKind::Anywhere => Placement::Anywhere,
            PlacementKind::Ends => Placement::Ends,
            PlacementKind::Center => Placement::Center,
        };
        let spec = GateSpec::new(which, connectivity, placement);
        spec.validate()?;
        Ok(spec)
    }

    /// Budget implied by `cnot_count`.
    pub fn budget(&self) -> Result<CnotBudget> {
        let optimum = self.spec()?.optimal_cnots();
        match self.cnot_count {
            n if n == optimum => Ok(CnotBudget::Optimal),
            n if n == optimum + 1 => Ok(CnotBudget::PlusOne),
            n => Err(Error::format(SIDECAR, format!("cnot_count {n} is neither the optimum {optimum} nor one more"))),
        }
    }
}

/// A loaded corpus: the accepted, deduplicated family and every rejected entry.
#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub meta: FamilyMeta,
    pub family: EquivalentFamily,
    pub failures: Vec<ValidationFailure>,
    /// Entries that passed validation but repeat an existing structure.
    pub duplicates: usize,
}

fn file_stem(k: usize, name: &str) -> String {
    let clean: String = name.chars().map(|ch| if ch.is_ascii_alphanumeric() || ch == '-' || ch == '_' { ch } else { '_' }).collect();
    if clean.is_empty() {
        format!("{k:02}")
    } else {
        format!("{k:02}-{clean}")
    }
}

/// Writes every family member as `NN-name.qasm` and the sidecar into `dir`.
pub fn write_corpus(dir: &Path, family: &EquivalentFamily) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::with_capacity(family.len());
    for (k, c) in family.circuits.iter().enumerate() {
        let path = dir.join(format!("{}.qasm", file_stem(k, &c.name)));
        fs::write(&path, emit_qasm(c)?).map_err(|e| Error::io(&path, e))?;
        paths.push(path);
    }
    let meta = FamilyMeta::for_spec(family.spec);
    let sidecar = dir.join(SIDECAR);
    fs::write(&sidecar, serde_json::to_string_pretty(&meta)? + "\n").map_err(|e| Error::io(&sidecar, e))?;
    Ok(paths)
}

/// Reads the sidecar of a corpus directory.
pub fn read_meta(dir: &Path) -> Result<FamilyMeta> {
    let path = dir.join(SIDECAR);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path.display().to_string(), e.to_string()))
}

/// `.qasm` files of a directory in file-name order.
pub fn qasm_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "qasm") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Parses, validates and deduplicates a corpus directory.
///
/// Files that fail to parse are reported as failures alongside circuits that
/// fail the equivalence, connectivity or CX-budget checks.
pub fn load_corpus(dir: &Path) -> Result<LoadedCorpus> {
    let meta = read_meta(dir)?;
    let spec = meta.spec()?;
    let budget = meta.budget()?;
    let mut entries: Vec<(String, Circuit)> = Vec::new();
    let mut parse_failures = Vec::new();
    for path in qasm_files(dir)? {
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        match parse_qasm(&text) {
            Ok(c) => entries.push((name, c)),
            Err(e) => parse_failures.push(ValidationFailure { name, reason: e.to_string() }),
        }
    }
    let parsed = entries.len();
    let (family, mut failures) = validate_family(spec, None, entries, budget)?;
    let duplicates = parsed - failures.len() - family.len();
    failures.extend(parse_failures);
    failures.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(LoadedCorpus { meta, family, failures, duplicates })
}
