//! Eigenvalues of `p·(I − |α⟩⟨α|) + q·diag(f)` from the value/multiplicity
//! table alone.
//!
//! Writing `d_j = p + q·a_j` for the distinct values `a_j` (multiplicity
//! `μ_j`), the matrix is `diag(d) − p·|α⟩⟨α|`. A distinct value with
//! multiplicity `μ_j` contributes the eigenvalue `d_j` exactly `μ_j − 1` times
//! (its eigenvectors are orthogonal to `|α⟩`); the remaining `K` eigenvalues are
//! the roots of
//!
//! ```text
//!     Σ_j (μ_j/N) / (d_j − λ) = 1/p
//! ```
//!
//! which interlace the poles `d_j`: below each pole for `p > 0`, above each
//! pole for `p < 0`. Each root is located by bisection in offset coordinates
//! `λ = d_origin + δ`, with the origin at whichever bracketing pole the root
//! is closer to, so that `d_j − λ = q·(a_j − a_origin) − δ` keeps full relative
//! precision even when the root sits exponentially close to a pole.

use crate::error::{Error, Result};
use crate::objective::SpectrumTable;

/// Largest dimension for which the full eigenvalue list is expanded.
pub const FULL_SPECTRUM_LIMIT: u64 = 1 << 20;

const MAX_BISECTION_STEPS: usize = 2200;

#[derive(Clone, Debug)]
struct Pole {
    /// Representative table value.
    a: f64,
    mult: u64,
    /// Table entries whose `d_j` coincide with this pole.
    first: usize,
    last: usize,
}

/// One eigenvalue, stored relative to a pole for accuracy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecularLevel {
    /// Index into the pole list (ascending `d`).
    pub pole: usize,
    /// `λ − d_pole`.
    pub offset: f64,
    /// Pinned at a repeated value (eigenvector orthogonal to `|α⟩`).
    pub deflated: bool,
}

/// Diagonal-plus-rank-one eigenproblem for one point of the path.
#[derive(Clone, Debug)]
pub struct SecularProblem<'a> {
    table: &'a SpectrumTable,
    p: f64,
    q: f64,
    inv_n: f64,
    poles: Vec<Pole>,
}

impl<'a> SecularProblem<'a> {
    /// `H(s) = (1 − s)·(I − |α⟩⟨α|) + s·diag(f)`.
    pub fn linear(table: &'a SpectrumTable, s: f64) -> Self {
        Self::weighted(table, 1.0 - s, s)
    }

    /// `p·(I − |α⟩⟨α|) + q·diag(f)` for arbitrary real weights.
    pub fn weighted(table: &'a SpectrumTable, p: f64, q: f64) -> Self {
        let entries = table.entries();
        let mut order: Vec<usize> = (0..entries.len()).collect();
        if q < 0.0 {
            order.reverse();
        }
        let mut poles: Vec<Pole> = Vec::with_capacity(entries.len());
        for idx in order {
            let e = entries[idx];
            match poles.last_mut() {
                // d_j coincides with the previous pole (q = 0, or the spacing
                // underflows): merge into one pole
                Some(last) if q * (e.value - last.a) == 0.0 => {
                    last.mult += e.mult;
                    last.first = last.first.min(idx);
                    last.last = last.last.max(idx);
                }
                _ => poles.push(Pole {
                    a: e.value,
                    mult: e.mult,
                    first: idx,
                    last: idx,
                }),
            }
        }
        SecularProblem {
            table,
            p,
            q,
            inv_n: 1.0 / table.dim_f64(),
            poles,
        }
    }

    pub fn table(&self) -> &SpectrumTable {
        self.table
    }

    pub fn weights(&self) -> (f64, f64) {
        (self.p, self.q)
    }

    /// Number of distinct poles (`K`, or 1 when all `d_j` coincide).
    pub fn pole_count(&self) -> usize {
        self.poles.len()
    }

    pub fn pole_value(&self, k: usize) -> f64 {
        self.p + self.q * self.poles[k].a
    }

    pub fn pole_multiplicity(&self, k: usize) -> u64 {
        self.poles[k].mult
    }

    /// `d_j − d_origin`.
    fn diff(&self, j: usize, origin: usize) -> f64 {
        self.q * (self.poles[j].a - self.poles[origin].a)
    }

    /// Secular function in offset coordinates; increasing in `delta`.
    pub fn secular(&self, origin: usize, delta: f64) -> f64 {
        let sum: f64 = (0..self.poles.len())
            .map(|j| self.poles[j].mult as f64 * self.inv_n / (self.diff(j, origin) - delta))
            .sum();
        sum - 1.0 / self.p
    }

    fn secular_derivative(&self, origin: usize, delta: f64) -> f64 {
        (0..self.poles.len())
            .map(|j| {
                let t = self.diff(j, origin) - delta;
                self.poles[j].mult as f64 * self.inv_n / (t * t)
            })
            .sum()
    }

    /// The secular root paired with pole `k`: the one just below it for
    /// `p > 0`, just above it for `p < 0`.
    pub fn root(&self, k: usize) -> Result<SecularLevel> {
        let count = self.poles.len();
        if k >= count {
            return Err(Error::InvalidArgument(format!("root {k} of {count}")));
        }
        if self.p == 0.0 {
            return Ok(SecularLevel {
                pole: k,
                offset: 0.0,
                deflated: false,
            });
        }
        if count == 1 {
            // one pole carrying all the weight: λ = d − p exactly
            return Ok(SecularLevel {
                pole: 0,
                offset: -self.p,
                deflated: false,
            });
        }
        let (origin, lo, hi) = if self.p > 0.0 {
            if k == 0 {
                (0, -self.p, 0.0)
            } else {
                self.inner_bracket(k - 1)
            }
        } else if k == count - 1 {
            (k, 0.0, -self.p)
        } else {
            self.inner_bracket(k)
        };
        let offset = self.bisect(origin, lo, hi)?;
        Ok(SecularLevel {
            pole: origin,
            offset,
            deflated: false,
        })
    }

    /// Bracket for the root between poles `left` and `left + 1`, expressed
    /// relative to the nearer pole.
    fn inner_bracket(&self, left: usize) -> (usize, f64, f64) {
        let width = self.diff(left + 1, left);
        let half = 0.5 * width;
        if self.secular(left, half) > 0.0 {
            (left, 0.0, half)
        } else {
            (left + 1, half - width, 0.0)
        }
    }

    fn bisect(&self, origin: usize, mut lo: f64, mut hi: f64) -> Result<f64> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InternalInvariant(format!(
                "empty interlacing bracket ({lo}, {hi}) at pole {origin}, p = {}, q = {}",
                self.p, self.q
            )));
        }
        let (blo, bhi) = (lo, hi);
        for _ in 0..MAX_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = self.secular(origin, mid);
            if v.is_nan() {
                return Err(Error::InternalInvariant(format!(
                    "secular function NaN at offset {mid} from pole {origin}"
                )));
            }
            if v < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut x = 0.5 * (lo + hi);
        // one safeguarded Newton polish
        let fx = self.secular(origin, x);
        let dfx = self.secular_derivative(origin, x);
        if fx != 0.0 && dfx.is_finite() && dfx > 0.0 {
            let y = x - fx / dfx;
            if y > blo && y < bhi && self.secular(origin, y).abs() < fx.abs() {
                x = y;
            }
        }
        Ok(x)
    }

    /// The `count` smallest eigenvalues in ascending order, with
    /// multiplicity.
    pub fn lowest_levels(&self, count: usize) -> Result<Vec<SecularLevel>> {
        let mut out = Vec::with_capacity(count.min(1 << 16));
        let deflated = |k: usize| SecularLevel {
            pole: k,
            offset: 0.0,
            deflated: true,
        };
        for k in 0..self.poles.len() {
            if out.len() >= count {
                break;
            }
            let extra = (self.poles[k].mult - 1).min((count - out.len()) as u64) as usize;
            if self.p < 0.0 {
                out.extend(std::iter::repeat_n(deflated(k), extra));
                if out.len() < count {
                    out.push(self.root(k)?);
                }
            } else {
                out.push(self.root(k)?);
                let extra = extra.min(count - out.len());
                out.extend(std::iter::repeat_n(deflated(k), extra));
            }
        }
        if out.len() < count {
            return Err(Error::InvalidArgument(format!(
                "requested {count} eigenvalues of a {}-dimensional problem",
                self.table.dim()
            )));
        }
        Ok(out)
    }

    pub fn value(&self, level: &SecularLevel) -> f64 {
        self.pole_value(level.pole) + level.offset
    }

    /// `value(upper) − value(lower)` without cancellation between the poles.
    pub fn separation(&self, lower: &SecularLevel, upper: &SecularLevel) -> f64 {
        self.diff(upper.pole, lower.pole) + (upper.offset - lower.offset)
    }

    /// The `count` smallest eigenvalues.
    pub fn lowest(&self, count: usize) -> Result<Vec<f64>> {
        Ok(self
            .lowest_levels(count)?
            .iter()
            .map(|l| self.value(l))
            .collect())
    }

    /// Every eigenvalue, ascending (dimension-guarded).
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let dim = self.table.dim();
        if dim > FULL_SPECTRUM_LIMIT {
            return Err(Error::Capacity {
                what: "full spectrum expansion",
                requested: dim as usize,
                limit: FULL_SPECTRUM_LIMIT as usize,
            });
        }
        self.lowest(dim as usize)
    }

    /// Eigenvector of a non-deflated level in value/multiplicity coordinates:
    /// entry `j` is the amplitude on the normalized uniform superposition of
    /// the inputs with value `a_j`. Sign fixed by `⟨α|v⟩ ≥ 0`.
    pub fn eigenvector(&self, level: &SecularLevel) -> Result<Vec<f64>> {
        if level.deflated {
            return Err(Error::DeflatedLevel {
                level: level.pole,
                pole: self.pole_value(level.pole),
            });
        }
        let entries = self.table.entries();
        let mut v = vec![0.0; entries.len()];
        let on_pole = |k: usize, v: &mut Vec<f64>| {
            let pole = &self.poles[k];
            for (j, x) in v
                .iter_mut()
                .enumerate()
                .take(pole.last + 1)
                .skip(pole.first)
            {
                *x = (entries[j].mult as f64).sqrt();
            }
        };
        if self.p == 0.0 {
            on_pole(level.pole, &mut v);
        } else {
            for k in 0..self.poles.len() {
                let t = self.diff(k, level.pole) - level.offset;
                if t == 0.0 {
                    return Err(Error::DeflatedLevel {
                        level: k,
                        pole: self.pole_value(k),
                    });
                }
                let pole = &self.poles[k];
                for j in pole.first..=pole.last {
                    v[j] = (entries[j].mult as f64).sqrt() / t;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let overlap: f64 = v
            .iter()
            .zip(entries)
            .map(|(x, e)| x * (e.mult as f64).sqrt())
            .sum();
        let scale = if overlap < 0.0 {
            -1.0 / norm
        } else {
            1.0 / norm
        };
        v.iter_mut().for_each(|x| *x *= scale);
        Ok(v)
    }

    /// Largest `|d_j − λ|⁻¹`-weighted residual of the secular equation at a
    /// level; used by tests to confirm roots.
    pub fn residual(&self, level: &SecularLevel) -> f64 {
        if level.deflated || self.p == 0.0 {
            return 0.0;
        }
        self.secular(level.pole, level.offset).abs() * self.p.abs()
    }
}

/// Expands a value/multiplicity vector to all `2ⁿ` amplitudes under the
/// canonical (ascending) assignment.
pub fn expand_vector(table: &SpectrumTable, compressed: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(table.dim() as usize);
    if table.n() > crate::objective::ENUMERATION_LIMIT {
        return Err(Error::Capacity {
            what: "vector expansion (qubits)",
            requested: table.n() as usize,
            limit: crate::objective::ENUMERATION_LIMIT as usize,
        });
    }
    for (e, c) in table.entries().iter().zip(compressed) {
        let amp = c / (e.mult as f64).sqrt();
        out.extend(std::iter::repeat_n(amp, e.mult as usize));
    }
    Ok(out)
}

/// A real number as sign and natural log of magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLog {
    pub negative: bool,
    /// `-∞` encodes zero.
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        negative: false,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn to_f64(self) -> f64 {
        let m = self.ln_abs.exp();
        if self.negative {
            -m
        } else {
            m
        }
    }
}

/// Characteristic polynomial of the linear path,
///
/// ```text
/// A(λ) = Π_i (1 − s − λ + s·a_i) − ((1 − s)/N)·Σ_j Π_{k≠j} (1 − s − λ + s·a_k)
/// ```
///
/// with multiplicity-aware products accumulated in log space.
pub fn char_poly_log(table: &SpectrumTable, s: f64, lambda: f64) -> SignedLog {
    let entries = table.entries();
    let factors: Vec<f64> = entries
        .iter()
        .map(|e| 1.0 - s - lambda + s * e.value)
        .collect();
    let zero_mult: u64 = entries
        .iter()
        .zip(&factors)
        .filter(|(_, t)| **t == 0.0)
        .map(|(e, _)| e.mult)
        .sum();
    if zero_mult >= 2 {
        return SignedLog::ZERO;
    }
    let mut negative = false;
    let mut ln_abs = 0.0;
    for (e, t) in entries.iter().zip(&factors) {
        if *t == 0.0 {
            continue;
        }
        ln_abs += e.mult as f64 * t.abs().ln();
        if *t < 0.0 && e.mult % 2 == 1 {
            negative = !negative;
        }
    }
    let coupling = (1.0 - s) / table.dim_f64();
    let factor = if zero_mult == 1 {
        // the vanishing factor survives only in the term that omits it
        -coupling
    } else {
        let sum: f64 = entries
            .iter()
            .zip(&factors)
            .map(|(e, t)| e.mult as f64 / t)
            .sum();
        1.0 - coupling * sum
    };
    if factor == 0.0 {
        return SignedLog::ZERO;
    }
    SignedLog {
        negative: negative ^ (factor < 0.0),
        ln_abs: ln_abs + factor.abs().ln(),
    }
}

/// [`char_poly_log`] as a plain number (may overflow to ±∞ for large `N`).
pub fn char_poly_eval(table: &SpectrumTable, s: f64, lambda: f64) -> f64 {
    char_poly_log(table, s, lambda).to_f64()
}
