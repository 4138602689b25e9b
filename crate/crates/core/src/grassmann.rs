//! Parity signs for reorderings of variable lists that contain Grassmann-odd entries.
//!
//! Only fermi-grade variables contribute: the sign is `(-1)^k` with `k` the number of
//! pairs of odd variables whose relative order differs between the source list and the
//! concatenation of the partition blocks.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grade {
    Bose = 0,
    Fermi = 1,
}

impl Grade {
    pub fn is_odd(self) -> bool {
        matches!(self, Grade::Fermi)
    }
}

/// A variable carrying a Grassmann grade.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedVar {
    pub id: String,
    pub grade: Grade,
}

impl GradedVar {
    pub fn bose(id: impl Into<String>) -> Self {
        GradedVar {
            id: id.into(),
            grade: Grade::Bose,
        }
    }

    pub fn fermi(id: impl Into<String>) -> Self {
        GradedVar {
            id: id.into(),
            grade: Grade::Fermi,
        }
    }
}

impl fmt::Display for GradedVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.grade {
            Grade::Bose => write!(f, "{}", self.id),
            Grade::Fermi => write!(f, "{}*", self.id),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("duplicate variable id `{0}` in source list")]
    DuplicateSource(String),
    #[error("variable `{0}` appears more than once in the blocks")]
    DuplicateInBlocks(String),
    #[error("variable `{0}` is not part of the source list")]
    Unknown(String),
    #[error("variable `{0}` from the source list is missing from the blocks")]
    Missing(String),
    #[error("variable `{0}` has a different grade in the blocks than in the source")]
    GradeMismatch(String),
}

/// A division of an ordered variable list into ordered blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub source: Vec<GradedVar>,
    pub blocks: Vec<Vec<GradedVar>>,
}

impl Partition {
    pub fn new(source: Vec<GradedVar>, blocks: Vec<Vec<GradedVar>>) -> Result<Self, PartitionError> {
        let p = Partition { source, blocks };
        p.validate()?;
        Ok(p)
    }

    /// Single-block reordering of `source` into `target`.
    pub fn reordering(source: Vec<GradedVar>, target: Vec<GradedVar>) -> Result<Self, PartitionError> {
        Self::new(source, vec![target])
    }

    pub fn validate(&self) -> Result<(), PartitionError> {
        self.source_positions().map(|_| ())
    }

    fn source_positions(&self) -> Result<Vec<usize>, PartitionError> {
        let mut index: HashMap<&str, usize> = HashMap::with_capacity(self.source.len());
        for (i, v) in self.source.iter().enumerate() {
            if index.insert(v.id.as_str(), i).is_some() {
                return Err(PartitionError::DuplicateSource(v.id.clone()));
            }
        }
        let mut seen = vec![false; self.source.len()];
        let mut order = Vec::with_capacity(self.source.len());
        for v in self.blocks.iter().flatten() {
            let &i = index
                .get(v.id.as_str())
                .ok_or_else(|| PartitionError::Unknown(v.id.clone()))?;
            if seen[i] {
                return Err(PartitionError::DuplicateInBlocks(v.id.clone()));
            }
            if self.source[i].grade != v.grade {
                return Err(PartitionError::GradeMismatch(v.id.clone()));
            }
            seen[i] = true;
            order.push(i);
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(PartitionError::Missing(self.source[i].id.clone()));
        }
        Ok(order)
    }
}

/// Sign `+1` / `-1` picked up by the odd variables when the source order is
/// rearranged into the concatenated block order.
pub fn parity_sign(partition: &Partition) -> Result<i8, PartitionError> {
    let order = partition.source_positions()?;
    let odd: Vec<usize> = order
        .into_iter()
        .filter(|&i| partition.source[i].grade.is_odd())
        .collect();
    Ok(sign_of_sequence(&odd))
}

/// Sign of the permutation given as a sequence of distinct ranks (inversion parity).
pub fn sign_of_sequence(ranks: &[usize]) -> i8 {
    let mut inversions = 0usize;
    for i in 0..ranks.len() {
        for j in i + 1..ranks.len() {
            if ranks[i] > ranks[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign for a reordering given as `target[k] = index into source`, counting only the
/// positions flagged odd in `odd`.
pub fn graded_permutation_sign(target: &[usize], odd: &[bool]) -> i8 {
    let ranks: Vec<usize> = target.iter().copied().filter(|&i| odd[i]).collect();
    sign_of_sequence(&ranks)
}
