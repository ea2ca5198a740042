//! Data behind the four-lowest-eigenvalues figure for the 16-value instance
//! `a = (0, 3, 3.5, …, 10)`.

use crate::error::Result;
use crate::objective::fig1_table;
use crate::output::fmt_f64;
use crate::spectral::SecularProblem;

pub const FIG1_POINTS: usize = 512;

pub const FIG1_HEADER: &str = "s,lambda1,lambda2,lambda3,lambda4,line_1ms,line_1ms_a2";

#[derive(Clone, Debug, PartialEq)]
pub struct Fig1Row {
    pub s: f64,
    pub lambda: [f64; 4],
    /// `1 − s`.
    pub line_1ms: f64,
    /// `1 − s + s·a₂`.
    pub line_1ms_a2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig1Data {
    pub rows: Vec<Fig1Row>,
    /// Interior rows breaking `0 < λ₁ < 1 − s < λ₂ < 1 − s + s·a₂`.
    pub violations: Vec<usize>,
}

impl Fig1Data {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(FIG1_HEADER);
        out.push('\n');
        for r in &self.rows {
            let cols: Vec<String> = std::iter::once(r.s)
                .chain(r.lambda)
                .chain([r.line_1ms, r.line_1ms_a2])
                .map(fmt_f64)
                .collect();
            out.push_str(&cols.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn fig1() -> Result<Fig1Data> {
    let table = fig1_table();
    let a2 = table.entries()[1].value;
    let mut rows = Vec::with_capacity(FIG1_POINTS);
    let mut violations = Vec::new();
    for k in 0..FIG1_POINTS {
        let s = k as f64 / (FIG1_POINTS - 1) as f64;
        let low = SecularProblem::linear(&table, s).lowest(4)?;
        let row = Fig1Row {
            s,
            lambda: [low[0], low[1], low[2], low[3]],
            line_1ms: 1.0 - s,
            line_1ms_a2: 1.0 - s + s * a2,
        };
        let interior = k > 0 && k + 1 < FIG1_POINTS;
        if interior
            && !(0.0 < row.lambda[0]
                && row.lambda[0] < row.line_1ms
                && row.line_1ms < row.lambda[1]
                && row.lambda[1] < row.line_1ms_a2)
        {
            violations.push(k);
        }
        rows.push(row);
    }
    Ok(Fig1Data { rows, violations })
}
