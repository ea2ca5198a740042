//! Cost functions `f: {0,1}ⁿ → ℝ` stored as value/multiplicity spectra.
//!
//! Every gap computation in this crate depends on `f` only through the
//! multiset of its values, so instances are kept compressed: one entry per
//! distinct value. Builders cover the standard instance families.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound `B` on `|f(z)|`.
pub const DEFAULT_BOUND: f64 = 100.0;

/// Largest `n` for which `2ⁿ` function values are enumerated explicitly.
pub const ENUMERATION_LIMIT: u32 = 26;

/// Largest `n` representable by a compressed table.
pub const MAX_QUBITS: u32 = 62;

/// One distinct cost value and the number of inputs attaining it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub value: f64,
    #[serde(rename = "mult")]
    pub mult: u64,
}

/// The multiset `{f(z)}` as strictly increasing distinct values with
/// multiplicities summing to `2ⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumTable {
    n: u32,
    entries: Vec<Level>,
    bound: f64,
}

/// Merge tolerance for a given bound: `1e-12·max(1, B)`.
pub fn merge_tolerance(bound: f64) -> f64 {
    1e-12 * bound.max(1.0)
}

impl SpectrumTable {
    /// Builds a table from `(value, multiplicity)` pairs in any order.
    /// Values closer than the merge tolerance are coalesced.
    pub fn new(n: u32, entries: impl IntoIterator<Item = (f64, u64)>, bound: f64) -> Result<Self> {
        check_qubits(n)?;
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::InvalidInstance(format!(
                "bound must be positive, got {bound}"
            )));
        }
        let mut raw: Vec<Level> = entries
            .into_iter()
            .map(|(value, mult)| Level { value, mult })
            .collect();
        for level in &raw {
            if !level.value.is_finite() {
                return Err(Error::InvalidInstance(format!(
                    "non-finite value {}",
                    level.value
                )));
            }
            if level.mult == 0 {
                return Err(Error::InvalidInstance(format!(
                    "value {} has zero multiplicity",
                    level.value
                )));
            }
            if level.value.abs() > bound {
                return Err(Error::InvalidInstance(format!(
                    "value {} exceeds bound {bound}",
                    level.value
                )));
            }
        }
        raw.sort_by(|a, b| a.value.total_cmp(&b.value));

        let tol = merge_tolerance(bound);
        let mut merged: Vec<Level> = Vec::with_capacity(raw.len());
        for level in raw {
            match merged.last_mut() {
                // Clusters are anchored at their smallest member, so every
                // merged value stays within `tol` of its representative.
                Some(last) if level.value - last.value <= tol => {
                    last.mult = last
                        .mult
                        .checked_add(level.mult)
                        .ok_or_else(|| Error::InvalidInstance("multiplicity overflow".into()))?
                }
                _ => merged.push(level),
            }
        }

        let total = merged
            .iter()
            .try_fold(0u64, |acc, l| acc.checked_add(l.mult))
            .ok_or_else(|| Error::InvalidInstance("multiplicity overflow".into()))?;
        if total != 1u64 << n {
            return Err(Error::InvalidInstance(format!(
                "multiplicities sum to {total}, expected 2^{n} = {}",
                1u64 << n
            )));
        }
        Ok(SpectrumTable {
            n,
            entries: merged,
            bound,
        })
    }

    /// Builds a table from an explicit list of `2ⁿ` values.
    pub fn from_values(n: u32, values: &[f64], bound: f64) -> Result<Self> {
        check_qubits(n)?;
        if values.len() as u64 != 1u64 << n {
            return Err(Error::Dimension {
                expected: 1usize << n,
                got: values.len(),
            });
        }
        Self::new(n, values.iter().map(|&v| (v, 1)), bound)
    }

    /// Enumerates `f` on every `n`-bit input. Inputs are passed as the integer
    /// whose binary digits are the bit string.
    pub fn from_function<F>(n: u32, f: F, bound: f64) -> Result<Self>
    where
        F: Fn(u64) -> f64 + Sync,
    {
        if n == 0 {
            return Err(Error::InvalidInstance("n must be at least 1".into()));
        }
        if n > ENUMERATION_LIMIT {
            return Err(Error::Capacity {
                what: "function enumeration (qubits)",
                requested: n as usize,
                limit: ENUMERATION_LIMIT as usize,
            });
        }
        let mut values: Vec<f64> = (0..1u64 << n).into_par_iter().map(&f).collect();
        values.par_sort_unstable_by(f64::total_cmp);
        Self::from_values(n, &values, bound)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Hilbert-space dimension `N = 2ⁿ`.
    pub fn dim(&self) -> u64 {
        1u64 << self.n
    }

    pub fn dim_f64(&self) -> f64 {
        (self.n as f64).exp2()
    }

    pub fn entries(&self) -> &[Level] {
        &self.entries
    }

    /// Number of distinct values `K`.
    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn min_value(&self) -> f64 {
        self.entries[0].value
    }

    pub fn max_value(&self) -> f64 {
        self.entries[self.entries.len() - 1].value
    }

    pub fn merge_tolerance(&self) -> f64 {
        merge_tolerance(self.bound)
    }

    pub fn is_normalized(&self) -> bool {
        self.min_value() == 0.0
    }

    /// Returns a copy with a different bound, re-validating every value.
    pub fn with_bound(&self, bound: f64) -> Result<Self> {
        Self::new(
            self.n,
            self.entries.iter().map(|l| (l.value, l.mult)),
            bound,
        )
    }

    /// Shifts every value by the minimum so the smallest becomes exactly 0.
    pub fn normalize_shift(&self) -> (SpectrumTable, f64) {
        let offset = self.min_value();
        if offset == 0.0 {
            return (self.clone(), 0.0);
        }
        let mut entries: Vec<Level> = self
            .entries
            .iter()
            .map(|l| Level {
                value: l.value - offset,
                mult: l.mult,
            })
            .collect();
        entries[0].value = 0.0;
        let largest = entries[entries.len() - 1].value;
        let table = SpectrumTable {
            n: self.n,
            entries,
            bound: self.bound.max(largest),
        };
        (table, offset)
    }

    /// The full multiset in ascending order (length `2ⁿ`).
    pub fn expand(&self) -> Result<Vec<f64>> {
        if self.n > ENUMERATION_LIMIT {
            return Err(Error::Capacity {
                what: "table expansion (qubits)",
                requested: self.n as usize,
                limit: ENUMERATION_LIMIT as usize,
            });
        }
        let mut out = Vec::with_capacity(self.dim() as usize);
        for level in &self.entries {
            out.extend(std::iter::repeat_n(level.value, level.mult as usize));
        }
        Ok(out)
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            n: self.n,
            entries: self.entries.clone(),
        }
    }

    pub fn from_file(file: &InstanceFile, bound: f64) -> Result<Self> {
        Self::new(
            file.n,
            file.entries.iter().map(|l| (l.value, l.mult)),
            bound,
        )
    }

    pub fn from_json_str(text: &str, bound: f64) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        Self::from_file(&file, bound)
    }

    pub fn load(path: &Path, bound: f64) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?, bound)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance file serializes")
    }
}

fn check_qubits(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInstance("n must be at least 1".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::Capacity {
            what: "qubit count",
            requested: n as usize,
            limit: MAX_QUBITS as usize,
        });
    }
    Ok(())
}

/// On-disk instance schema. Entries need not be sorted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: u32,
    pub entries: Vec<Level>,
}

/// Which family an instance was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    Grover,
    TwoLevel,
    HammingWeight,
    RandomPolyBounded,
    ExplicitFile,
    Fig1,
}

impl InstanceKind {
    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Grover => "grover",
            InstanceKind::TwoLevel => "two-level",
            InstanceKind::HammingWeight => "hamming-weight",
            InstanceKind::RandomPolyBounded => "random-poly-bounded",
            InstanceKind::ExplicitFile => "explicit-file",
            InstanceKind::Fig1 => "fig1",
        }
    }
}

/// Builder parameters per instance kind.
#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSpec {
    Grover,
    /// `ground` inputs at value 0, the rest at `gap`.
    TwoLevel {
        gap: f64,
        ground: u64,
    },
    HammingWeight,
    RandomPolyBounded {
        seed: u64,
    },
    ExplicitFile(PathBuf),
    /// `a₁ = 0`, `aᵢ = 2 + i/2` for `1 < i ≤ 16` (n = 4 only).
    Fig1,
}

impl InstanceSpec {
    pub fn kind(&self) -> InstanceKind {
        match self {
            InstanceSpec::Grover => InstanceKind::Grover,
            InstanceSpec::TwoLevel { .. } => InstanceKind::TwoLevel,
            InstanceSpec::HammingWeight => InstanceKind::HammingWeight,
            InstanceSpec::RandomPolyBounded { .. } => InstanceKind::RandomPolyBounded,
            InstanceSpec::ExplicitFile(_) => InstanceKind::ExplicitFile,
            InstanceSpec::Fig1 => InstanceKind::Fig1,
        }
    }
}

/// A built table together with the family it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub kind: InstanceKind,
    pub table: SpectrumTable,
}

impl Instance {
    /// Hamming-weight instances are analysed along the structured path whose
    /// initial Hamiltonian is the same weight function in the Hadamard basis;
    /// every other kind uses the uniform-projector initial Hamiltonian.
    pub fn uses_structured_path(&self) -> bool {
        self.kind == InstanceKind::HammingWeight
    }
}

/// Builds an instance of the given kind with `n` qubits.
pub fn build_instance(spec: &InstanceSpec, n: u32, bound: f64) -> Result<Instance> {
    check_qubits(n)?;
    let dim = 1u64 << n;
    let table = match spec {
        InstanceSpec::Grover => SpectrumTable::new(n, [(0.0, 1), (1.0, dim - 1)], bound)?,
        InstanceSpec::TwoLevel { gap, ground } => {
            if !(*gap > 0.0) {
                return Err(Error::InvalidInstance(format!(
                    "two-level gap must be > 0, got {gap}"
                )));
            }
            if *ground < 1 || *ground > dim - 1 {
                return Err(Error::InvalidInstance(format!(
                    "two-level ground count {ground} outside [1, {}]",
                    dim - 1
                )));
            }
            SpectrumTable::new(n, [(0.0, *ground), (*gap, dim - ground)], bound)?
        }
        InstanceSpec::HammingWeight => {
            let mut binom = 1u128;
            let mut entries = Vec::with_capacity(n as usize + 1);
            for w in 0..=n as u128 {
                entries.push((w as f64, binom as u64));
                binom = binom * (n as u128 - w) / (w + 1);
            }
            SpectrumTable::new(n, entries, bound)?
        }
        InstanceSpec::RandomPolyBounded { seed } => {
            if n > ENUMERATION_LIMIT {
                return Err(Error::Capacity {
                    what: "random instance (qubits)",
                    requested: n as usize,
                    limit: ENUMERATION_LIMIT as usize,
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let values: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..=bound)).collect();
            SpectrumTable::from_values(n, &values, bound)?
        }
        InstanceSpec::ExplicitFile(path) => {
            let table = SpectrumTable::load(path, bound)?;
            if table.n() != n {
                return Err(Error::InvalidInstance(format!(
                    "file declares n = {}, requested n = {n}",
                    table.n()
                )));
            }
            table
        }
        InstanceSpec::Fig1 => {
            if n != 4 {
                return Err(Error::InvalidInstance(format!(
                    "fig1 instance has n = 4, requested {n}"
                )));
            }
            fig1_table()
        }
    };
    Ok(Instance {
        kind: spec.kind(),
        table,
    })
}

/// The 16-value instance `a₁ = 0`, `aᵢ = 2 + i/2` (`i = 2..16`).
pub fn fig1_table() -> SpectrumTable {
    let entries = std::iter::once((0.0, 1)).chain((2..=16).map(|i| (2.0 + i as f64 / 2.0, 1)));
    SpectrumTable::new(4, entries, DEFAULT_BOUND).expect("fig1 instance is valid")
}
