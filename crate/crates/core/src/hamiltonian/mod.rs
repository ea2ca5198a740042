//! Endpoint Hamiltonians, schedules and the interpolation path between them.
//!
//! `H(u) = f(u)·H₀ + g(u)·H₁` is never stored as a matrix on the hot paths:
//! [`PathOperator::apply`] acts matrix-free in `O(n·2ⁿ)`, and the dense form
//! exists only for oracles and small equivalence checks.

mod endpoint;
mod schedule;

pub use endpoint::{Assignment, Basis, EndpointForm};
pub use schedule::{
    normalize_weights, zero_crossings, NormalizedPoint, Schedule, ScheduleShape, ScheduleTable,
    CONTINUITY_BUDGET, VALIDATION_GRID,
};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::objective::{Instance, SpectrumTable};

/// Default largest dimension materialized densely.
pub const DEFAULT_DENSE_CAPACITY: usize = 4096;

/// Environment variable overriding [`DEFAULT_DENSE_CAPACITY`].
pub const DENSE_CAPACITY_ENV: &str = "ADGAP_DENSE_CAPACITY";

pub fn dense_capacity() -> usize {
    std::env::var(DENSE_CAPACITY_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAPACITY)
}

pub fn check_dense(dim: usize) -> Result<()> {
    let limit = dense_capacity();
    if dim > limit {
        return Err(Error::Capacity {
            what: "dense matrix dimension",
            requested: dim,
            limit,
        });
    }
    Ok(())
}

/// Structure of a path, used to pick a solver.
#[derive(Clone, Debug, PartialEq)]
pub enum PathFamily<'a> {
    /// `H₀ = I − |α⟩⟨α|`, `H₁` diagonal in the computational basis: diagonal
    /// plus rank one at every point.
    UniformProjector {
        table: &'a SpectrumTable,
    },
    /// `H₀` diagonal in the Hadamard basis, `H₁ = I − |x⟩⟨x|`. Conjugating by
    /// `W` and a sign flip maps it onto the uniform-projector family with the
    /// two weights exchanged.
    MirroredProjector {
        table: &'a SpectrumTable,
        marked: u64,
    },
    /// Hamming weight in the Hadamard basis to Hamming weight in the
    /// computational basis: a sum of identical single-qubit terms.
    HammingSeparable {
        n: u32,
    },
    General,
}

/// An interpolation path between two endpoint forms.
#[derive(Clone, Debug, PartialEq)]
pub struct PathOperator {
    h0: EndpointForm,
    h1: EndpointForm,
    schedule: Schedule,
}

impl PathOperator {
    pub fn new(h0: EndpointForm, h1: EndpointForm, schedule: Schedule) -> Result<Self> {
        if h0.n() != h1.n() {
            return Err(Error::Dimension {
                expected: h0.dim(),
                got: h1.dim(),
            });
        }
        Ok(PathOperator { h0, h1, schedule })
    }

    /// `H₀ = I − |α⟩⟨α|` to the cost diagonal.
    pub fn uniform_to_cost(table: SpectrumTable, schedule: Schedule) -> Self {
        let n = table.n();
        PathOperator {
            h0: EndpointForm::uniform_projector(n),
            h1: EndpointForm::diagonal(table, Basis::Computational),
            schedule,
        }
    }

    /// Cost diagonal in the Hadamard basis to `I − |x⟩⟨x|`.
    pub fn mirrored(table: SpectrumTable, marked: u64, schedule: Schedule) -> Result<Self> {
        let n = table.n();
        Ok(PathOperator {
            h0: EndpointForm::diagonal(table, Basis::Hadamard),
            h1: EndpointForm::marked_projector(n, marked)?,
            schedule,
        })
    }

    /// Hamming weight in the Hadamard basis to Hamming weight in the
    /// computational basis.
    pub fn hamming(n: u32, schedule: Schedule) -> Result<Self> {
        Ok(PathOperator {
            h0: EndpointForm::hamming(n, Basis::Hadamard)?,
            h1: EndpointForm::hamming(n, Basis::Computational)?,
            schedule,
        })
    }

    /// The natural path of an instance: Hamming-weight instances use the
    /// separable Hadamard-to-computational path, all others start from the
    /// uniform projector.
    pub fn for_instance(instance: &Instance, schedule: Schedule) -> Result<Self> {
        if instance.uses_structured_path() {
            Self::hamming(instance.table.n(), schedule)
        } else {
            Ok(Self::uniform_to_cost(instance.table.clone(), schedule))
        }
    }

    pub fn h0(&self) -> &EndpointForm {
        &self.h0
    }

    pub fn h1(&self) -> &EndpointForm {
        &self.h1
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn n(&self) -> u32 {
        self.h0.n()
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn with_schedule(&self, schedule: Schedule) -> Self {
        PathOperator {
            schedule,
            ..self.clone()
        }
    }

    pub fn family(&self) -> PathFamily<'_> {
        use EndpointForm::*;
        match (&self.h0, &self.h1) {
            (
                UniformProjectorComplement { .. },
                DiagonalCost {
                    table,
                    basis: Basis::Computational,
                    ..
                },
            ) => PathFamily::UniformProjector { table },
            (
                DiagonalCost {
                    table,
                    basis: Basis::Hadamard,
                    ..
                },
                MarkedProjectorComplement { marked, .. },
            ) => PathFamily::MirroredProjector {
                table,
                marked: *marked,
            },
            (
                DiagonalCost {
                    basis: Basis::Hadamard,
                    assignment: Assignment::HammingWeight,
                    ..
                },
                DiagonalCost {
                    basis: Basis::Computational,
                    assignment: Assignment::HammingWeight,
                    ..
                },
            ) => PathFamily::HammingSeparable { n: self.n() },
            _ => PathFamily::General,
        }
    }

    /// Bound on `‖H(u)‖` over the validation grid.
    pub fn max_energy(&self) -> f64 {
        let (a, b) = (self.h0.norm(), self.h1.norm());
        (0..VALIDATION_GRID)
            .map(|i| {
                let (f, g) = self
                    .schedule
                    .weights(i as f64 / (VALIDATION_GRID - 1) as f64);
                f.abs() * a + g.abs() * b
            })
            .fold(0.0, f64::max)
    }

    /// `H(u)·v`, matrix-free.
    pub fn apply(&self, u: f64, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let (f, g) = self.schedule.weights(u);
        self.apply_weighted(f, g, v)
    }

    /// `(f·H₀ + g·H₁)·v` for explicit weights.
    pub fn apply_weighted(&self, f: f64, g: f64, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: v.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        self.h0.apply_add(v, f, &mut out)?;
        self.h1.apply_add(v, g, &mut out)?;
        Ok(out)
    }

    /// Entrywise `H(u)`.
    pub fn materialize_dense(&self, u: f64) -> Result<DMatrix<f64>> {
        let (f, g) = self.schedule.weights(u);
        self.dense_weighted(f, g)
    }

    pub fn dense_weighted(&self, f: f64, g: f64) -> Result<DMatrix<f64>> {
        check_dense(self.dim())?;
        let m = self.h0.dense()? * f + self.h1.dense()? * g;
        // exact symmetry: averaging removes rounding asymmetry from the
        // Hadamard-basis products
        Ok((&m + m.transpose()) * 0.5)
    }
}
