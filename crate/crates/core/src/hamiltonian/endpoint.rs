use std::borrow::Cow;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::objective::{SpectrumTable, ENUMERATION_LIMIT};
use crate::walsh::{fwht, hadamard_entry};

/// Basis in which a cost Hamiltonian is diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Computational,
    /// Diagonal in `|ẑ⟩ = W|z⟩`, i.e. `W·diag(f)·W`.
    Hadamard,
}

/// How the values of a table are placed on basis states.
#[derive(Clone, Debug, PartialEq)]
pub enum Assignment {
    /// Ascending expansion of the table: `z = 0` carries the smallest value.
    Canonical,
    /// `f(z) = popcount(z)`.
    HammingWeight,
    Explicit(Arc<[f64]>),
}

/// The endpoint Hamiltonians an interpolation path is built from.
#[derive(Clone, Debug, PartialEq)]
pub enum EndpointForm {
    /// `I − |α⟩⟨α|` with `|α⟩` the uniform superposition.
    UniformProjectorComplement { n: u32 },
    /// `Σ f(z)|z⟩⟨z|` (or `|ẑ⟩⟨ẑ|` in the Hadamard basis).
    DiagonalCost {
        table: SpectrumTable,
        basis: Basis,
        assignment: Assignment,
    },
    /// `I − |x⟩⟨x|`.
    MarkedProjectorComplement { n: u32, marked: u64 },
}

impl EndpointForm {
    pub fn uniform_projector(n: u32) -> Self {
        EndpointForm::UniformProjectorComplement { n }
    }

    pub fn marked_projector(n: u32, marked: u64) -> Result<Self> {
        if marked >= 1u64 << n {
            return Err(Error::InvalidArgument(format!(
                "marked index {marked} outside [0, 2^{n})"
            )));
        }
        Ok(EndpointForm::MarkedProjectorComplement { n, marked })
    }

    /// Cost Hamiltonian with the table's values placed in ascending order.
    pub fn diagonal(table: SpectrumTable, basis: Basis) -> Self {
        EndpointForm::DiagonalCost {
            table,
            basis,
            assignment: Assignment::Canonical,
        }
    }

    /// `w(z) = z₁ + … + zₙ` in the given basis.
    pub fn hamming(n: u32, basis: Basis) -> Result<Self> {
        use crate::objective::{build_instance, InstanceSpec};
        let table = build_instance(&InstanceSpec::HammingWeight, n, (n as f64).max(1.0))?.table;
        Ok(EndpointForm::DiagonalCost {
            table,
            basis,
            assignment: Assignment::HammingWeight,
        })
    }

    /// Cost Hamiltonian with an explicit value per basis state.
    pub fn diagonal_values(n: u32, values: Vec<f64>, basis: Basis, bound: f64) -> Result<Self> {
        let table = SpectrumTable::from_values(n, &values, bound)?;
        Ok(EndpointForm::DiagonalCost {
            table,
            basis,
            assignment: Assignment::Explicit(values.into()),
        })
    }

    pub fn n(&self) -> u32 {
        match self {
            EndpointForm::UniformProjectorComplement { n } => *n,
            EndpointForm::DiagonalCost { table, .. } => table.n(),
            EndpointForm::MarkedProjectorComplement { n, .. } => *n,
        }
    }

    pub fn dim(&self) -> usize {
        1usize << self.n()
    }

    /// Largest `|eigenvalue|`.
    pub fn norm(&self) -> f64 {
        match self {
            EndpointForm::DiagonalCost { table, .. } => {
                table.min_value().abs().max(table.max_value().abs())
            }
            _ => 1.0,
        }
    }

    /// Per-basis-state values of a cost Hamiltonian (`None` for projectors).
    pub fn diagonal_entries(&self) -> Result<Option<Cow<'_, [f64]>>> {
        let EndpointForm::DiagonalCost {
            table, assignment, ..
        } = self
        else {
            return Ok(None);
        };
        let values = match assignment {
            Assignment::Canonical => Cow::Owned(table.expand()?),
            Assignment::HammingWeight => {
                guard_enumeration(table.n())?;
                Cow::Owned((0..table.dim()).map(|z| z.count_ones() as f64).collect())
            }
            Assignment::Explicit(values) => Cow::Borrowed(&values[..]),
        };
        Ok(Some(values))
    }

    /// `out += weight · H·v`.
    pub fn apply_add(&self, v: &[Complex64], weight: f64, out: &mut [Complex64]) -> Result<()> {
        if weight == 0.0 {
            return Ok(());
        }
        match self {
            EndpointForm::UniformProjectorComplement { .. } => {
                let mean = v.iter().sum::<Complex64>() / v.len() as f64;
                for (o, x) in out.iter_mut().zip(v) {
                    *o += (x - mean) * weight;
                }
            }
            EndpointForm::MarkedProjectorComplement { marked, .. } => {
                for (z, (o, x)) in out.iter_mut().zip(v).enumerate() {
                    if z as u64 != *marked {
                        *o += x * weight;
                    }
                }
            }
            EndpointForm::DiagonalCost { basis, .. } => {
                let diag = self
                    .diagonal_entries()?
                    .expect("cost endpoint has a diagonal");
                match basis {
                    Basis::Computational => {
                        for ((o, x), a) in out.iter_mut().zip(v).zip(diag.iter()) {
                            *o += x * (a * weight);
                        }
                    }
                    Basis::Hadamard => {
                        let mut w = v.to_vec();
                        fwht(&mut w);
                        for (x, a) in w.iter_mut().zip(diag.iter()) {
                            *x *= *a;
                        }
                        fwht(&mut w);
                        for (o, x) in out.iter_mut().zip(&w) {
                            *o += x * weight;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Dense matrix of this endpoint.
    pub fn dense(&self) -> Result<DMatrix<f64>> {
        let dim = self.dim();
        Ok(match self {
            EndpointForm::UniformProjectorComplement { .. } => {
                let inv = 1.0 / dim as f64;
                DMatrix::from_fn(dim, dim, |i, j| if i == j { 1.0 - inv } else { -inv })
            }
            EndpointForm::MarkedProjectorComplement { marked, .. } => {
                let m = *marked as usize;
                DMatrix::from_fn(dim, dim, |i, j| if i == j && i != m { 1.0 } else { 0.0 })
            }
            EndpointForm::DiagonalCost { basis, .. } => {
                let diag = self
                    .diagonal_entries()?
                    .expect("cost endpoint has a diagonal");
                match basis {
                    Basis::Computational => {
                        DMatrix::from_fn(dim, dim, |i, j| if i == j { diag[i] } else { 0.0 })
                    }
                    Basis::Hadamard => {
                        let mut m = DMatrix::zeros(dim, dim);
                        let mut col = vec![0.0; dim];
                        for j in 0..dim {
                            for (k, c) in col.iter_mut().enumerate() {
                                *c = hadamard_entry(k, j, dim) * diag[k];
                            }
                            fwht(&mut col);
                            m.column_mut(j).copy_from_slice(&col);
                        }
                        m
                    }
                }
            }
        })
    }

    /// A normalized ground state. Degenerate ground levels give the uniform
    /// superposition over the level.
    pub fn ground_state(&self) -> Result<Vec<Complex64>> {
        let dim = self.dim();
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        match self {
            EndpointForm::UniformProjectorComplement { .. } => {
                v.fill(Complex64::new(1.0 / (dim as f64).sqrt(), 0.0));
            }
            EndpointForm::MarkedProjectorComplement { marked, .. } => {
                v[*marked as usize] = Complex64::new(1.0, 0.0);
            }
            EndpointForm::DiagonalCost { table, basis, .. } => {
                let diag = self
                    .diagonal_entries()?
                    .expect("cost endpoint has a diagonal");
                let min = table.min_value();
                let tol = table.merge_tolerance();
                let ground: Vec<usize> = (0..dim).filter(|&z| diag[z] - min <= tol).collect();
                let amp = 1.0 / (ground.len() as f64).sqrt();
                for z in ground {
                    v[z] = Complex64::new(amp, 0.0);
                }
                if *basis == Basis::Hadamard {
                    fwht(&mut v);
                }
            }
        }
        Ok(v)
    }

    /// Probability weight of `psi` inside this endpoint's ground eigenspace.
    pub fn ground_space_weight(&self, psi: &[Complex64]) -> Result<f64> {
        Ok(match self {
            EndpointForm::UniformProjectorComplement { .. } => {
                let overlap = psi.iter().sum::<Complex64>() / (psi.len() as f64).sqrt();
                overlap.norm_sqr()
            }
            EndpointForm::MarkedProjectorComplement { marked, .. } => {
                psi[*marked as usize].norm_sqr()
            }
            EndpointForm::DiagonalCost { table, basis, .. } => {
                let diag = self
                    .diagonal_entries()?
                    .expect("cost endpoint has a diagonal");
                let min = table.min_value();
                let rotated;
                let amps: &[Complex64] = match basis {
                    Basis::Computational => psi,
                    Basis::Hadamard => {
                        let mut w = psi.to_vec();
                        fwht(&mut w);
                        rotated = w;
                        &rotated
                    }
                };
                amps.iter()
                    .zip(diag.iter())
                    .filter(|(_, a)| **a - min <= table.merge_tolerance())
                    .map(|(x, _)| x.norm_sqr())
                    .sum()
            }
        })
    }
}

fn guard_enumeration(n: u32) -> Result<()> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::Capacity {
            what: "basis-state enumeration (qubits)",
            requested: n as usize,
            limit: ENUMERATION_LIMIT as usize,
        });
    }
    Ok(())
}
