use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Lemma2,
    Rescaling,
}

/// Every knob of a run. Fields left unset fall back to the `--config` file,
/// then to the command's default.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// grover | two-level | hamming | random | file | fig1
    #[arg(long)]
    pub instance: Option<String>,
    /// Instance JSON file (implies --instance file)
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Inclusive qubit range `a..b`
    #[arg(long = "n-range")]
    pub n_range: Option<String>,
    /// linear | smoothstep | power:P | bump:B | path to a schedule table JSON
    #[arg(long)]
    pub schedule: Option<String>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Crossing-line scale; defaults to 2^(n/2 − n/divisor)
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub divisor: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Total evolution time T
    #[arg(long)]
    pub time: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Value bound B for instance entries
    #[arg(long)]
    pub bound: Option<f64>,
    /// Excited value of the two-level instance
    #[arg(long = "level-gap")]
    pub level_gap: Option<f64>,
    /// Ground multiplicity of the two-level instance
    #[arg(long = "ground-mult")]
    pub ground_mult: Option<u64>,
    /// Trajectory samples for `evolve`
    #[arg(long)]
    pub trajectory: Option<usize>,
    /// Equivalence check to run
    #[arg(long, value_enum)]
    pub check: Option<Check>,
    /// Drop the value-0 term from the crossing sums
    #[arg(long = "exclude-ground-term", num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exclude_ground_term: Option<bool>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident: $($field:ident),*) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field.clone(); } )*
    };
}

impl RunConfig {
    /// Fills unset fields from `file`.
    pub fn or(mut self, file: RunConfig) -> RunConfig {
        overlay!(self, file: instance, file, n, n_range, schedule, grid, tol, m, divisor,
            epsilon, time, steps, seed, out, format, bound, level_gap, ground_mult,
            trajectory, check, exclude_ground_term);
        self
    }

    pub fn load(path: &Path) -> Result<RunConfig, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

/// Parses `a..b` (inclusive).
pub fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<u32>, String> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| format!("expected a..b, got {text:?}"))?;
    let a: u32 = a.trim().parse().map_err(|e| format!("{text:?}: {e}"))?;
    let b: u32 = b
        .trim_start_matches('=')
        .trim()
        .parse()
        .map_err(|e| format!("{text:?}: {e}"))?;
    if a > b {
        return Err(format!("empty range {text:?}"));
    }
    Ok(a..=b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let flags = RunConfig {
            n: Some(5),
            ..RunConfig::default()
        };
        let file = RunConfig {
            n: Some(9),
            epsilon: Some(0.2),
            ..RunConfig::default()
        };
        let merged = flags.or(file);
        assert_eq!(merged.n, Some(5));
        assert_eq!(merged.epsilon, Some(0.2));
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("4..20").unwrap(), 4..=20);
        assert_eq!(parse_range("3..=3").unwrap(), 3..=3);
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("7").is_err());
    }

    #[test]
    fn config_round_trips() {
        let c = RunConfig {
            instance: Some("grover".into()),
            n: Some(10),
            format: Some(Format::Json),
            check: Some(Check::Lemma2),
            ..RunConfig::default()
        };
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), c);
        assert!(serde_json::from_str::<RunConfig>("{\"bogus\": 1}").is_err());
    }
}
