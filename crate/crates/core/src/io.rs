//! JSON state files.
//!
//! ```json
//! {
//!   "dims": [2, 2],                 // computational basis, or
//!   "qubits": 4, "basis": "dicke",  // symmetric N-qubit state
//!   "matrix": [[[re, im], ...], ...],
//!   "metadata": { "name": "...", "seed": 1, "provenance": "..." }
//! }
//! ```
//!
//! Numbers are written in the shortest decimal form that parses back to the
//! same `f64`, so a write/read cycle is bit-exact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Basis, ComplexMatrix, DensityMatrix, C64};
use crate::symspace::SymmetricState;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl Metadata {
    pub fn named(name: impl Into<String>) -> Self {
        Self { name: Some(name.into()), ..Self::default() }
    }

    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

fn default_basis() -> Basis {
    Basis::Computational
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<usize>,
    #[serde(default = "default_basis")]
    pub basis: Basis,
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Metadata::is_empty")]
    pub metadata: Metadata,
}

/// A parsed state file.
#[derive(Clone, Debug, PartialEq)]
pub enum LoadedState {
    Density(DensityMatrix),
    Symmetric(SymmetricState),
}

fn rows_of(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix, metadata: Metadata) -> Self {
        match rho.basis() {
            Basis::Computational => Self {
                dims: Some(rho.dims().to_vec()),
                qubits: None,
                basis: Basis::Computational,
                matrix: rows_of(rho.matrix()),
                metadata,
            },
            Basis::Dicke => Self {
                dims: None,
                qubits: Some(rho.dims().len()),
                basis: Basis::Dicke,
                matrix: rows_of(rho.matrix()),
                metadata,
            },
        }
    }

    pub fn from_symmetric(sigma: &SymmetricState, metadata: Metadata) -> Self {
        Self::from_density(&sigma.to_density(), metadata)
    }

    fn matrix(&self) -> Result<ComplexMatrix> {
        let n = self.matrix.len();
        if self.matrix.iter().any(|row| row.len() != n) {
            return Err(Error::Parse("matrix must be square".into()));
        }
        let data = self.matrix.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
        ComplexMatrix::new(n, n, data)
    }

    pub fn to_state(&self) -> Result<LoadedState> {
        let m = self.matrix()?;
        match self.basis {
            Basis::Computational => {
                let dims = self.dims.clone().ok_or_else(|| Error::Parse("missing \"dims\"".into()))?;
                Ok(LoadedState::Density(DensityMatrix::new(m, dims, Basis::Computational)?))
            }
            Basis::Dicke => {
                let qubits = match (self.qubits, &self.dims) {
                    (Some(q), _) => q,
                    (None, Some(d)) => d.len(),
                    (None, None) => return Err(Error::Parse("missing \"qubits\"".into())),
                };
                Ok(LoadedState::Symmetric(SymmetricState::new(m, qubits)?))
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

pub fn read_state(path: &Path) -> Result<LoadedState> {
    StateFile::read(path)?.to_state()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{breuer, rho_be4};
    use proptest::prelude::*;

    #[test]
    fn dicke_file_layout() {
        let f = StateFile::from_symmetric(&rho_be4(), Metadata::named("be4"));
        let json = f.to_json();
        assert!(json.contains("\"basis\": \"dicke\""));
        assert!(json.contains("\"qubits\": 4"));
        assert!(json.contains("0.22"));
        match StateFile::from_json(&json).unwrap().to_state().unwrap() {
            LoadedState::Symmetric(s) => assert_eq!(s, rho_be4()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(StateFile::from_json("{not json"), Err(Error::Parse(_))));
        let missing = r#"{"matrix": [[[1.0, 0.0]]]}"#;
        assert!(matches!(StateFile::from_json(missing).unwrap().to_state(), Err(Error::Parse(_))));
        let ragged = r#"{"dims": [2], "matrix": [[[1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]}"#;
        assert!(matches!(StateFile::from_json(ragged).unwrap().to_state(), Err(Error::Parse(_))));
        let bad_trace = r#"{"dims": [1], "matrix": [[[0.5, 0.0]]]}"#;
        assert!(matches!(StateFile::from_json(bad_trace).unwrap().to_state(), Err(Error::BadTrace { .. })));
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(lambda in 0.0f64..=1.0, seed in any::<u64>()) {
            let rho = breuer(4, lambda).unwrap();
            let meta = Metadata { name: Some("breuer".into()), seed: Some(seed), provenance: None };
            let f = StateFile::from_density(&rho, meta);
            let back = StateFile::from_json(&f.to_json()).unwrap();
            prop_assert_eq!(&back, &f);
            match back.to_state().unwrap() {
                LoadedState::Density(d) => prop_assert_eq!(d.matrix(), rho.matrix()),
                LoadedState::Symmetric(_) => prop_assert!(false),
            }
        }
    }
}
