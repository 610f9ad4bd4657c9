//! Ensemble files and run manifests.
//!
//! An ensemble file is a JSON object
//!
//! ```json
//! {"lambda": {"2": 0.5, "3": 0.5}, "rho": {"6": 1.0}, "meta": {}}
//! ```
//!
//! with degrees as string keys and full-precision coefficients. `meta` is
//! optional and carried through untouched.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ensemble::{DegreeDistribution, Ensemble};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct EnsembleDoc {
    lambda: BTreeMap<String, f64>,
    rho: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    meta: Value,
}

fn to_map(d: &DegreeDistribution) -> BTreeMap<String, f64> {
    // zero-padded keys would sort numerically, but plain keys are what users write
    d.iter().map(|(k, c)| (k.to_string(), c)).collect()
}

fn from_map(field: &str, m: &BTreeMap<String, f64>) -> Result<Vec<(u32, f64)>> {
    m.iter()
        .map(|(k, &c)| {
            k.trim()
                .parse::<u32>()
                .map(|d| (d, c))
                .map_err(|_| Error::Parse(format!("{field}: degree key `{k}` is not an integer")))
        })
        .collect()
}

/// An ensemble plus free-form metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleFile {
    pub ensemble: Ensemble,
    pub meta: Value,
}

impl EnsembleFile {
    pub fn new(ensemble: Ensemble) -> Self {
        Self {
            ensemble,
            meta: Value::Null,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: EnsembleDoc = serde_json::from_str(text)?;
        let lambda = DegreeDistribution::variable(from_map("lambda", &doc.lambda)?)?;
        let rho = DegreeDistribution::check(from_map("rho", &doc.rho)?)?;
        Ok(Self {
            ensemble: Ensemble::new(lambda, rho),
            meta: doc.meta,
        })
    }

    pub fn to_json(&self) -> String {
        let doc = EnsembleDoc {
            lambda: to_map(&self.ensemble.lambda),
            rho: to_map(&self.ensemble.rho),
            meta: self.meta.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("plain maps serialize")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json() + "\n")
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

/// Parses a check side given as `regular:Dc`, as `d:c,d:c,...`, or as the path
/// of an ensemble file whose `rho` is used.
pub fn parse_rho(spec: &str) -> Result<DegreeDistribution> {
    let spec = spec.trim();
    if let Some(dc) = spec.strip_prefix("regular:") {
        let dc = dc
            .trim()
            .parse::<u32>()
            .map_err(|_| Error::Parse(format!("`{spec}`: check degree is not an integer")))?;
        return DegreeDistribution::check_regular(dc);
    }
    if spec.contains(':') && !Path::new(spec).exists() {
        return DegreeDistribution::check(parse_pairs(spec)?);
    }
    Ok(EnsembleFile::load(spec)?.ensemble.rho)
}

/// Parses `d:c,d:c,...` into degree/coefficient pairs.
pub fn parse_pairs(spec: &str) -> Result<Vec<(u32, f64)>> {
    spec.split(',')
        .enumerate()
        .map(|(i, item)| {
            let (d, c) = item.split_once(':').ok_or_else(|| {
                Error::Parse(format!("`{spec}`, item {}: expected degree:coefficient", i + 1))
            })?;
            let d = d.trim().parse::<u32>().map_err(|_| {
                Error::Parse(format!("`{spec}`, item {}: bad degree `{d}`", i + 1))
            })?;
            let c = c.trim().parse::<f64>().map_err(|_| {
                Error::Parse(format!("`{spec}`, item {}: bad coefficient `{c}`", i + 1))
            })?;
            Ok((d, c))
        })
        .collect()
}

/// Provenance for every artifact the command line writes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: Value,
    pub version: String,
    pub master_seed: Option<u64>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, params: Value, master_seed: Option<u64>) -> Self {
        Self {
            command: command.into(),
            params,
            version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    /// `<path>.manifest.json`.
    pub fn sidecar_path(path: &Path) -> PathBuf {
        let mut s = path.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    /// Writes `contents` to `path` and this manifest next to it.
    pub fn write_with(&self, path: &Path, contents: &str) -> Result<()> {
        fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let side = Self::sidecar_path(path);
        let json = serde_json::to_string_pretty(self)?;
        fs::write(&side, json + "\n").map_err(|e| Error::Io(format!("{}: {e}", side.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let e = Ensemble::new(
            DegreeDistribution::variable([(2, 0.1 + 0.2), (13, 0.7 - 1e-17)]).unwrap(),
            DegreeDistribution::check_regular(6).unwrap(),
        );
        let f = EnsembleFile::new(e.clone());
        assert_eq!(EnsembleFile::from_json(&f.to_json()).unwrap().ensemble, e);
    }

    #[test]
    fn parse_error_has_location() {
        let err = EnsembleFile::from_json("{\"lambda\": {\"2\": 1.0},\n \"rho\": }").unwrap_err();
        match err {
            Error::Parse(msg) => assert!(msg.contains("line 2"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_key_is_a_parse_error() {
        let err = EnsembleFile::from_json(r#"{"lambda": {"two": 1.0}, "rho": {"6": 1.0}}"#);
        assert!(matches!(err, Err(Error::Parse(_))));
    }

    #[test]
    fn rho_specs() {
        assert_eq!(
            parse_rho("regular:6").unwrap(),
            DegreeDistribution::check_regular(6).unwrap()
        );
        let mixed = parse_rho("5:0.5, 6:0.5").unwrap();
        assert_eq!(mixed.degrees(), vec![5, 6]);
        assert!(matches!(parse_rho("regular:x"), Err(Error::Parse(_))));
        assert!(matches!(parse_rho("5:0.5,6"), Err(Error::Parse(_))));
    }

    #[test]
    fn manifest_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("curve.csv");
        let m = RunManifest::new("simulate", serde_json::json!({"n": 10}), Some(3));
        m.write_with(&out, "a,b\n").unwrap();
        let side = RunManifest::sidecar_path(&out);
        let back: RunManifest =
            serde_json::from_str(&fs::read_to_string(side).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
