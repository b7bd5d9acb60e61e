//! Truncated multi-species bosonic Fock spaces.
//!
//! The truncation bounds the *total* occupation `Σ n_j ≤ D`. Operators that
//! are linear in `a`, `a†` are then exact on the block `Σ n_j ≤ D − 1`, which
//! is where every algebraic check is evaluated.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Matrix;

/// How the number operator `ℕ` is ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumberOrdering {
    /// `Σ a† a`, annihilates the vacuum.
    Normal,
    /// `Σ a a† = Σ a† a + m`, taken from the untruncated algebra.
    Antinormal,
}

impl NumberOrdering {
    pub fn name(self) -> &'static str {
        match self {
            NumberOrdering::Normal => "normal",
            NumberOrdering::Antinormal => "antinormal",
        }
    }
}

impl std::str::FromStr for NumberOrdering {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(NumberOrdering::Normal),
            "antinormal" => Ok(NumberOrdering::Antinormal),
            other => Err(Error::InvalidArgument(format!("unknown ordering {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FockSpace {
    species: usize,
    cutoff: usize,
    basis: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

/// Number of occupation tuples of `species` entries with total `total`.
fn compositions(species: usize, total: usize) -> Vec<Vec<usize>> {
    if species == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut tail in compositions(species - 1, total - first) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

impl FockSpace {
    /// Enumerates the basis in graded lexicographic order: by total
    /// occupation, then lexicographically. Index 0 is the vacuum.
    pub fn new(species: usize, cutoff: usize) -> Result<Self> {
        if species == 0 {
            return Err(Error::InvalidArgument("Fock space needs at least one species".into()));
        }
        let basis: Vec<Vec<usize>> = (0..=cutoff)
            .flat_map(|total| compositions(species, total))
            .collect();
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(FockSpace {
            species,
            cutoff,
            basis,
            index,
        })
    }

    pub fn species(&self) -> usize {
        self.species
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<usize>] {
        &self.basis
    }

    pub fn index_of(&self, occupation: &[usize]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn total_occupation(&self, idx: usize) -> usize {
        self.basis[idx].iter().sum()
    }

    /// Basis indices with total occupation `≤ D − 1`.
    pub fn sub_cutoff_block(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.total_occupation(i) < self.cutoff)
            .collect()
    }

    pub fn vacuum(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.dim()];
        v[0] = Complex64::new(1.0, 0.0);
        v
    }

    /// Lowering and raising operators for species `j` (1-based). Raising out
    /// of the cutoff maps to zero.
    pub fn ladder_ops(&self, j: usize) -> Result<(Matrix, Matrix)> {
        if j == 0 || j > self.species {
            return Err(Error::IndexOutOfRange {
                what: "species",
                index: j,
                bound: self.species,
            });
        }
        let n = self.dim();
        let mut a = Matrix::zeros(n, n);
        for (col, occ) in self.basis.iter().enumerate() {
            let nj = occ[j - 1];
            if nj == 0 {
                continue;
            }
            let mut lowered = occ.clone();
            lowered[j - 1] -= 1;
            let row = self.index[&lowered];
            a[(row, col)] = Complex64::new((nj as f64).sqrt(), 0.0);
        }
        let adag = a.adjoint();
        Ok((a, adag))
    }

    /// Normal-ordered number operator `Σ a† a`.
    pub fn number_op(&self) -> Matrix {
        self.number_op_ordered(NumberOrdering::Normal)
    }

    pub fn number_op_ordered(&self, ordering: NumberOrdering) -> Matrix {
        let offset = match ordering {
            NumberOrdering::Normal => 0.0,
            NumberOrdering::Antinormal => self.species as f64,
        };
        let diag: Vec<Complex64> = (0..self.dim())
            .map(|i| Complex64::new(self.total_occupation(i) as f64 + offset, 0.0))
            .collect();
        Matrix::diagonal(&diag)
    }
}
