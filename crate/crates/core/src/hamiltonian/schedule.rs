//! Interpolation schedules `H(u) = f(u)·H₀ + g(u)·H₁`, `u = t/T ∈ [0, 1]`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of uniform points on which schedule properties are checked.
pub const VALIDATION_GRID: usize = 4097;

/// Adjacent-grid jump (relative to `c2`) above which a schedule is treated as
/// discontinuous.
pub const CONTINUITY_BUDGET: f64 = 1.0 / 64.0;

/// Relative padding applied to the observed range of `f + g` when the sum
/// bounds are derived automatically.
const AUTO_BOUND_PADDING: f64 = 1.0 / 64.0;

const BOUNDARY_TOL: f64 = 1e-12;

/// Sampled schedule table: linear interpolation between samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleTable {
    pub u: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleFile {
    #[serde(rename = "type")]
    kind: String,
    u: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
}

impl ScheduleTable {
    pub fn new(u: Vec<f64>, f: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if u.len() < 2 || u.len() != f.len() || u.len() != g.len() {
            return Err(Error::InvalidSchedule(format!(
                "table needs ≥ 2 samples with equal lengths (u: {}, f: {}, g: {})",
                u.len(),
                f.len(),
                g.len()
            )));
        }
        if u[0] != 0.0 || u[u.len() - 1] != 1.0 {
            return Err(Error::InvalidSchedule(
                "table u must cover [0, 1] exactly".into(),
            ));
        }
        if u.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSchedule(
                "table u must be strictly increasing".into(),
            ));
        }
        if f.iter().chain(&g).any(|x| !x.is_finite()) {
            return Err(Error::InvalidSchedule(
                "table contains non-finite weights".into(),
            ));
        }
        Ok(ScheduleTable { u, f, g })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ScheduleFile = serde_json::from_str(text)?;
        if file.kind != "table" {
            return Err(Error::InvalidSchedule(format!(
                "unsupported schedule type {:?}",
                file.kind
            )));
        }
        Self::new(file.u, file.f, file.g)
    }

    pub fn to_json(&self) -> String {
        let file = ScheduleFile {
            kind: "table".into(),
            u: self.u.clone(),
            f: self.f.clone(),
            g: self.g.clone(),
        };
        serde_json::to_string_pretty(&file).expect("schedule file serializes")
    }

    fn segment(&self, u: f64) -> usize {
        // index i with u[i] ≤ u ≤ u[i+1]
        let pos = self.u.partition_point(|&x| x <= u);
        pos.clamp(1, self.u.len() - 1) - 1
    }

    fn eval(&self, u: f64) -> (f64, f64) {
        let i = self.segment(u);
        let w = (u - self.u[i]) / (self.u[i + 1] - self.u[i]);
        (
            self.f[i] + w * (self.f[i + 1] - self.f[i]),
            self.g[i] + w * (self.g[i + 1] - self.g[i]),
        )
    }

    fn slope(&self, u: f64) -> (f64, f64) {
        let i = self.segment(u);
        let du = self.u[i + 1] - self.u[i];
        (
            (self.f[i + 1] - self.f[i]) / du,
            (self.g[i + 1] - self.g[i]) / du,
        )
    }
}

/// Shape of the weight functions.
#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleShape {
    /// `f = 1 − u`, `g = u`.
    Linear,
    /// `f = 1 − uᵖ`, `g = uᵖ`.
    Power(f64),
    /// `g = 3u² − 2u³`, `f = 1 − g`.
    Smoothstep,
    /// `f = (1 − u)(1 + b·u)`, `g = u`; `f + g = 1 + b·u(1 − u)`.
    Bump(f64),
    Table(ScheduleTable),
}

/// Result of splitting `H(u)` into `scale · ((1 − s)·H₀ + s·H₁)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizedPoint {
    pub scale: f64,
    pub s: f64,
}

/// A validated schedule together with its sum bounds `c1 < f + g < c2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    shape: ScheduleShape,
    c1: f64,
    c2: f64,
}

impl Schedule {
    pub fn linear() -> Self {
        Self::with_auto_bounds(ScheduleShape::Linear).expect("linear schedule is valid")
    }

    pub fn power(p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "power exponent must be > 0, got {p}"
            )));
        }
        Self::with_auto_bounds(ScheduleShape::Power(p))
    }

    pub fn smoothstep() -> Self {
        Self::with_auto_bounds(ScheduleShape::Smoothstep).expect("smoothstep schedule is valid")
    }

    pub fn bump(b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "bump height must be finite, got {b}"
            )));
        }
        Self::with_auto_bounds(ScheduleShape::Bump(b))
    }

    pub fn table(table: ScheduleTable) -> Result<Self> {
        Self::with_auto_bounds(ScheduleShape::Table(table))
    }

    pub fn load_table(path: &Path) -> Result<Self> {
        Self::table(ScheduleTable::from_json_str(&std::fs::read_to_string(
            path,
        )?)?)
    }

    /// Parses `linear`, `smoothstep`, `power:P`, `bump:B`, or a path to a
    /// JSON schedule table.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, arg) = match spec.split_once(':') {
            Some((name, arg)) => (name, Some(arg)),
            None => (spec, None),
        };
        let number = |arg: Option<&str>| -> Result<f64> {
            arg.ok_or_else(|| Error::InvalidSchedule(format!("{name} needs a parameter")))?
                .parse::<f64>()
                .map_err(|e| Error::InvalidSchedule(format!("{spec}: {e}")))
        };
        match name {
            "linear" => Ok(Self::linear()),
            "smoothstep" => Ok(Self::smoothstep()),
            "power" => Self::power(number(arg)?),
            "bump" => Self::bump(number(arg)?),
            _ if spec.ends_with(".json") => Self::load_table(Path::new(spec)),
            _ => Err(Error::InvalidSchedule(format!("unknown schedule {spec:?}"))),
        }
    }

    /// Validates the shape and derives `c1`, `c2` from the observed range of
    /// `f + g`, padded by 1/64 on each side.
    pub fn with_auto_bounds(shape: ScheduleShape) -> Result<Self> {
        let (lo, hi) = sum_range(&shape);
        if !(lo > 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "f + g must stay positive, minimum on grid is {lo}"
            )));
        }
        Self::with_bounds(
            shape,
            lo * (1.0 - AUTO_BOUND_PADDING),
            hi * (1.0 + AUTO_BOUND_PADDING),
        )
    }

    pub fn with_bounds(shape: ScheduleShape, c1: f64, c2: f64) -> Result<Self> {
        let schedule = Schedule { shape, c1, c2 };
        schedule.validate()?;
        Ok(schedule)
    }

    fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.c2 > self.c1 && self.c2.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "need 0 < c1 < c2, got c1 = {}, c2 = {}",
                self.c1, self.c2
            )));
        }
        let (f0, g0) = self.weights(0.0);
        let (f1, g1) = self.weights(1.0);
        if (f0 - 1.0).abs() > BOUNDARY_TOL
            || g0.abs() > BOUNDARY_TOL
            || f1.abs() > BOUNDARY_TOL
            || (g1 - 1.0).abs() > BOUNDARY_TOL
        {
            return Err(Error::InvalidSchedule(format!(
                "boundary conditions violated: f(0) = {f0}, g(0) = {g0}, f(1) = {f1}, g(1) = {g1}"
            )));
        }
        let budget = self.c2 * CONTINUITY_BUDGET;
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..VALIDATION_GRID {
            let u = i as f64 / (VALIDATION_GRID - 1) as f64;
            let (f, g) = self.weights(u);
            if !(f.is_finite() && g.is_finite()) {
                return Err(Error::InvalidSchedule(format!(
                    "non-finite weights at u = {u}"
                )));
            }
            let sum = f + g;
            if !(self.c1 < sum && sum < self.c2) {
                return Err(Error::InvalidSchedule(format!(
                    "f + g = {sum} at u = {u} outside ({}, {})",
                    self.c1, self.c2
                )));
            }
            if let Some((pf, pg)) = prev {
                if (f - pf).abs() > budget || (g - pg).abs() > budget {
                    return Err(Error::InvalidSchedule(format!(
                        "jump larger than {budget} near u = {u}; schedule is not continuous"
                    )));
                }
            }
            prev = Some((f, g));
        }
        Ok(())
    }

    pub fn shape(&self) -> &ScheduleShape {
        &self.shape
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn is_linear(&self) -> bool {
        self.shape == ScheduleShape::Linear
    }

    /// `(f(u), g(u))`.
    pub fn weights(&self, u: f64) -> (f64, f64) {
        shape_weights(&self.shape, u)
    }

    /// `(f′(u), g′(u))` with respect to normalized time. Tables use the slope
    /// of the segment containing `u`.
    pub fn derivatives(&self, u: f64) -> (f64, f64) {
        match &self.shape {
            ScheduleShape::Linear => (-1.0, 1.0),
            ScheduleShape::Power(p) => {
                let d = if u == 0.0 {
                    if *p < 1.0 {
                        f64::INFINITY
                    } else if *p == 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    p * u.powf(p - 1.0)
                };
                (-d, d)
            }
            ScheduleShape::Smoothstep => {
                let d = 6.0 * u * (1.0 - u);
                (-d, d)
            }
            ScheduleShape::Bump(b) => (b - 1.0 - 2.0 * b * u, 1.0),
            ScheduleShape::Table(t) => t.slope(u),
        }
    }

    pub fn normalized_point(&self, u: f64) -> NormalizedPoint {
        let (f, g) = self.weights(u);
        normalize_weights(f, g)
    }

    /// Every `u` on the uniform `grid` (plus bisection inside sign-changing
    /// cells) with `s(u) = target`.
    pub fn preimages(&self, target: f64, grid: usize) -> Vec<f64> {
        zero_crossings(|u| self.normalized_point(u).s - target, grid)
    }

    pub fn name(&self) -> String {
        match &self.shape {
            ScheduleShape::Linear => "linear".into(),
            ScheduleShape::Power(p) => format!("power:{p}"),
            ScheduleShape::Smoothstep => "smoothstep".into(),
            ScheduleShape::Bump(b) => format!("bump:{b}"),
            ScheduleShape::Table(_) => "table".into(),
        }
    }
}

fn shape_weights(shape: &ScheduleShape, u: f64) -> (f64, f64) {
    match shape {
        ScheduleShape::Linear => (1.0 - u, u),
        ScheduleShape::Power(p) => {
            let g = u.powf(*p);
            (1.0 - g, g)
        }
        ScheduleShape::Smoothstep => {
            let g = u * u * (3.0 - 2.0 * u);
            (1.0 - g, g)
        }
        ScheduleShape::Bump(b) => ((1.0 - u) * (1.0 + b * u), u),
        ScheduleShape::Table(t) => t.eval(u),
    }
}

/// Zeros of `h` on `[0, 1]`: exact grid hits plus one bisected root in every
/// sign-changing cell of the uniform `grid`.
pub fn zero_crossings(h: impl Fn(f64) -> f64, grid: usize) -> Vec<f64> {
    let grid = grid.max(2);
    let mut out = Vec::new();
    let mut u_prev = 0.0;
    let mut h_prev = h(0.0);
    if h_prev == 0.0 {
        out.push(0.0);
    }
    for i in 1..grid {
        let u = i as f64 / (grid - 1) as f64;
        let hu = h(u);
        if hu == 0.0 {
            out.push(u);
        } else if h_prev != 0.0 && (hu > 0.0) != (h_prev > 0.0) {
            let (mut lo, mut hi) = (u_prev, u);
            let lo_sign = h_prev > 0.0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if (h(mid) > 0.0) == lo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        u_prev = u;
        h_prev = hu;
    }
    out
}

/// Splits `f·H₀ + g·H₁` into `scale·((1 − s)·H₀ + s·H₁)`.
pub fn normalize_weights(f: f64, g: f64) -> NormalizedPoint {
    let scale = f + g;
    NormalizedPoint {
        scale,
        s: g / scale,
    }
}

fn sum_range(shape: &ScheduleShape) -> (f64, f64) {
    (0..VALIDATION_GRID)
        .map(|i| {
            let (f, g) = shape_weights(shape, i as f64 / (VALIDATION_GRID - 1) as f64);
            f + g
        })
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_point_examples() {
        let p = Schedule::linear().normalized_point(0.3);
        assert!((p.scale - 1.0).abs() < 1e-15 && (p.s - 0.3).abs() < 1e-15);

        let p = Schedule::power(2.0).unwrap().normalized_point(0.5);
        assert!((p.scale - 1.0).abs() < 1e-15 && (p.s - 0.25).abs() < 1e-15);

        // f = 2(1 − u) violates f(0) = 1, so it is only a raw weight pair.
        let p = normalize_weights(2.0 * (1.0 - 0.5), 0.5);
        assert!((p.scale - 1.5).abs() < 1e-15 && (p.s - 1.0 / 3.0).abs() < 1e-15);
        assert!(Schedule::table(
            ScheduleTable::new(vec![0.0, 1.0], vec![2.0, 0.0], vec![0.0, 1.0]).unwrap()
        )
        .is_err());

        let p = Schedule::bump(2.0).unwrap().normalized_point(0.5);
        assert!((p.scale - 1.5).abs() < 1e-15 && (p.s - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn endpoints_map_to_zero_and_one() {
        for sched in [
            Schedule::linear(),
            Schedule::smoothstep(),
            Schedule::power(3.0).unwrap(),
            Schedule::bump(2.5).unwrap(),
            Schedule::bump(-1.0).unwrap(),
        ] {
            assert_eq!(sched.normalized_point(0.0).s, 0.0);
            assert_eq!(sched.normalized_point(1.0).s, 1.0);
            for i in 0..=100 {
                let p = sched.normalized_point(i as f64 / 100.0);
                assert!(sched.c1() < p.scale && p.scale < sched.c2());
                assert!((0.0..=1.0).contains(&p.s));
            }
        }
    }

    #[test]
    fn rejects_bad_boundaries_and_jumps() {
        let bad_start = ScheduleTable::new(vec![0.0, 1.0], vec![0.9, 0.0], vec![0.0, 1.0]).unwrap();
        assert!(Schedule::table(bad_start).is_err());

        let jump = ScheduleTable::new(
            vec![0.0, 0.5, 0.5 + 1e-9, 1.0],
            vec![1.0, 0.9, 0.1, 0.0],
            vec![0.0, 0.1, 0.9, 1.0],
        )
        .unwrap();
        assert!(matches!(
            Schedule::table(jump),
            Err(Error::InvalidSchedule(_))
        ));

        assert!(Schedule::with_bounds(ScheduleShape::Linear, 1.0, 2.0).is_err());
        assert!(Schedule::with_bounds(ScheduleShape::Linear, 0.5, 2.0).is_ok());
    }

    #[test]
    fn negative_weights_accepted_when_sum_bounded() {
        // f dips below zero while f + g stays in (c1, c2).
        let t = ScheduleTable::new(
            vec![0.0, 0.5, 1.0],
            vec![1.0, -0.1, 0.0],
            vec![0.0, 1.2, 1.0],
        )
        .unwrap();
        let s = Schedule::table(t).unwrap();
        assert!(s.normalized_point(0.5).s > 1.0);
    }

    #[test]
    fn table_matches_linear() {
        let t = ScheduleTable::new(
            vec![0.0, 0.25, 1.0],
            vec![1.0, 0.75, 0.0],
            vec![0.0, 0.25, 1.0],
        )
        .unwrap();
        let json = t.to_json();
        let back = ScheduleTable::from_json_str(&json).unwrap();
        let s = Schedule::table(back).unwrap();
        for i in 0..=20 {
            let u = i as f64 / 20.0;
            let (f, g) = s.weights(u);
            assert!((f - (1.0 - u)).abs() < 1e-15 && (g - u).abs() < 1e-15);
            assert_eq!(s.derivatives(u), (-1.0, 1.0));
        }
    }

    #[test]
    fn parse_names() {
        assert!(Schedule::parse("linear").unwrap().is_linear());
        assert_eq!(Schedule::parse("power:2").unwrap().name(), "power:2");
        assert_eq!(Schedule::parse("bump:2").unwrap().name(), "bump:2");
        assert!(Schedule::parse("power").is_err());
        assert!(Schedule::parse("bogus").is_err());
    }

    #[test]
    fn preimages_of_monotone_schedule() {
        let s = Schedule::bump(2.0).unwrap();
        let pre = s.preimages(0.5, 101);
        assert_eq!(pre.len(), 1);
        // u = (1 − u)(1 + 2u)  ⇒  u = 1/√2
        assert!((pre[0] - 0.5f64.sqrt()).abs() < 1e-12);
    }
}
