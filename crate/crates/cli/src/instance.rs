//! Instance files: a sparse JSON schema with a pinned field order so that
//! read -> write reproduces the input byte for byte.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use qubo_admm::qkp::{QkpInstance, GENERATOR_ID};

use crate::CliError;

/// On-disk form of a knapsack instance. Profits are upper-triangle triplets
/// `[i, j, v]` with zeros omitted; `generator` names the algorithm that
/// produced the file so foreign files are rejected instead of misread.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub delta: f64,
    pub seed: u64,
    pub profits: Vec<(usize, usize, i64)>,
    pub weights: Vec<i64>,
    pub capacity: i64,
    pub generator: String,
}

impl InstanceFile {
    pub fn from_instance(inst: &QkpInstance) -> Self {
        InstanceFile {
            n: inst.n,
            delta: inst.delta,
            seed: inst.seed,
            profits: inst.profits.clone(),
            weights: inst.weights.clone(),
            capacity: inst.capacity,
            generator: GENERATOR_ID.to_string(),
        }
    }

    pub fn into_instance(self) -> Result<QkpInstance, CliError> {
        self.validate()?;
        Ok(QkpInstance {
            n: self.n,
            profits: self.profits,
            weights: self.weights,
            capacity: self.capacity,
            delta: self.delta,
            seed: self.seed,
        })
    }

    fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Input(msg));
        if self.generator != GENERATOR_ID {
            return fail(format!(
                "unknown generator {:?}, expected {GENERATOR_ID:?}",
                self.generator
            ));
        }
        if self.n == 0 {
            return fail("instance must have at least one variable".into());
        }
        if !(self.delta.is_finite() && self.delta > 0.0 && self.delta <= 1.0) {
            return fail(format!("density {} outside (0, 1]", self.delta));
        }
        if self.weights.len() != self.n {
            return fail(format!(
                "expected {} weights, found {}",
                self.n,
                self.weights.len()
            ));
        }
        if let Some(w) = self.weights.iter().find(|&&w| w < 1) {
            return fail(format!("weights must be positive, found {w}"));
        }
        let mut prev: Option<(usize, usize)> = None;
        for &(i, j, v) in &self.profits {
            if i > j || j >= self.n {
                return fail(format!(
                    "profit index ({i}, {j}) outside the upper triangle"
                ));
            }
            if v < 1 {
                return fail(format!("profits must be positive, found {v} at ({i}, {j})"));
            }
            if prev.is_some_and(|p| p >= (i, j)) {
                return fail(format!(
                    "profit triplets not strictly ordered at ({i}, {j})"
                ));
            }
            prev = Some((i, j));
        }
        Ok(())
    }

    /// Canonical serialization: pretty JSON in declaration order plus a
    /// trailing newline. This is the byte-for-byte round-trip format.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serialization");
        s.push('\n');
        s
    }
}

pub fn read_instance(path: &Path) -> Result<QkpInstance, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let file: InstanceFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed instance {}: {e}", path.display())))?;
    file.into_instance()
}

pub fn write_instance(dir: &Path, inst: &QkpInstance) -> Result<std::path::PathBuf, CliError> {
    let name = format!("qkp_n{}_d{}_s{}.json", inst.n, inst.delta, inst.seed);
    let path = dir.join(name);
    fs::write(&path, InstanceFile::from_instance(inst).to_json())
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qubo_admm::qkp;

    #[test]
    fn round_trip_is_byte_identical() {
        let inst = qkp::generate(12, 0.6, 99);
        let first = InstanceFile::from_instance(&inst).to_json();
        let parsed: InstanceFile = serde_json::from_str(&first).unwrap();
        let reparsed = parsed.into_instance().unwrap();
        let second = InstanceFile::from_instance(&reparsed).to_json();
        assert_eq!(first, second);
        assert_eq!(reparsed, inst);
    }

    #[test]
    fn foreign_generator_is_rejected() {
        let inst = qkp::generate(4, 1.0, 1);
        let mut file = InstanceFile::from_instance(&inst);
        file.generator = "somebody-elses-generator".to_string();
        assert!(matches!(file.into_instance(), Err(CliError::Input(_))));
    }

    #[test]
    fn unsorted_or_out_of_range_profits_are_rejected() {
        let inst = qkp::generate(4, 1.0, 1);
        let mut file = InstanceFile::from_instance(&inst);
        file.profits.swap(0, 1);
        assert!(matches!(file.into_instance(), Err(CliError::Input(_))));

        let mut file = InstanceFile::from_instance(&inst);
        file.profits[0] = (3, 1, 5);
        assert!(matches!(file.into_instance(), Err(CliError::Input(_))));

        let mut file = InstanceFile::from_instance(&inst);
        file.profits[0].2 = 0;
        assert!(matches!(file.into_instance(), Err(CliError::Input(_))));
    }

    #[test]
    fn negative_capacity_is_allowed_for_infeasible_files() {
        let inst = qkp::generate(4, 1.0, 1);
        let mut file = InstanceFile::from_instance(&inst);
        file.capacity = -1;
        assert_eq!(file.into_instance().unwrap().capacity, -1);
    }
}
