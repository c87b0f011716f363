//! CSV and JSON writers. Every number is printed with 17 significant digits
//! in scientific notation so that repeated runs produce identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use spinboson_core::{ConvergenceReport, EvolutionResult};

use crate::config::ConfigFile;
use crate::error::CliError;

pub const EVOLUTION_HEADER: [&str; 16] = [
    "t",
    "rho00_re",
    "rho00_im",
    "rho01_re",
    "rho01_im",
    "rho10_re",
    "rho10_im",
    "rho11_re",
    "rho11_im",
    "sx",
    "sy",
    "sz",
    "coherence_abs",
    "purity",
    "parity_J",
    "method",
];

/// Extra column written when both propagator routes are run.
pub const DISCREPANCY_COLUMN: &str = "max_discrepancy";

/// Negative zero is printed as zero.
pub fn fmt_num(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

/// Writes the evolution table. With one result, one row per time. With two
/// results on the same grid, their rows are interleaved per time and a
/// final column holds the largest absolute difference between the two rows.
pub fn write_evolution_csv(out: &mut impl Write, results: &[EvolutionResult]) -> std::io::Result<()> {
    let both = results.len() > 1;
    let mut header = EVOLUTION_HEADER.join(",");
    if both {
        header.push(',');
        header.push_str(DISCREPANCY_COLUMN);
    }
    writeln!(out, "{header}")?;

    let n = results.first().map_or(0, |r| r.len());
    for k in 0..n {
        let discrepancy = both.then(|| row_discrepancy(results, k));
        for r in results {
            let mut line = fmt_num(r.times[k]);
            for v in r.row(k) {
                line.push(',');
                line.push_str(&fmt_num(v));
            }
            line.push(',');
            line.push_str(r.method.as_str());
            if let Some(d) = discrepancy {
                line.push(',');
                line.push_str(&fmt_num(d));
            }
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

fn row_discrepancy(results: &[EvolutionResult], k: usize) -> f64 {
    let first = results[0].row(k);
    results[1..]
        .iter()
        .flat_map(|r| {
            let row = r.row(k);
            (0..row.len()).map(move |i| (row[i] - first[i]).abs())
        })
        .fold(0.0, f64::max)
}

pub fn write_evolution_file(path: &Path, results: &[EvolutionResult]) -> Result<(), CliError> {
    let mut w = create(path)?;
    write_evolution_csv(&mut w, results)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}

/// Long-format spectrum table: `kind,index,eigenvalue`.
pub fn write_spectrum_file(path: &Path, series: &[(&str, &[f64])]) -> Result<(), CliError> {
    let mut w = create(path)?;
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "kind,index,eigenvalue")?;
        for (kind, values) in series {
            for (i, v) in values.iter().enumerate() {
                writeln!(w, "{kind},{i},{}", fmt_num(*v))?;
            }
        }
        w.flush()
    };
    write().map_err(|e| CliError::io(path, e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// A float serialized as a 17-digit scientific string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sci(pub f64);

impl Serialize for Sci {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_num(self.0))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStepJson {
    pub cutoffs: Vec<usize>,
    pub max_change: Sci,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceJson {
    pub initial_cutoffs: Vec<usize>,
    pub target: Sci,
    pub converged: bool,
    pub steps: Vec<ConvergenceStepJson>,
}

impl From<&ConvergenceReport> for ConvergenceJson {
    fn from(r: &ConvergenceReport) -> Self {
        Self {
            initial_cutoffs: r.initial_cutoffs.clone(),
            target: Sci(r.target),
            converged: r.converged,
            steps: r
                .steps
                .iter()
                .map(|s| ConvergenceStepJson {
                    cutoffs: s.cutoffs.clone(),
                    max_change: Sci(s.max_change),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub tolerance: Sci,
    pub convergence_target: Sci,
}

/// Residuals reported by `evolve`, all relative to the operator norms
/// named in their keys.
#[derive(Debug, Clone, Serialize)]
pub struct Residuals {
    /// `‖αP² + PH₊ − H₋P − α‖ / ‖H₊‖`.
    pub riccati_over_h_plus: Sci,
    /// `‖[σ_x ⊗ P, H]‖ / ‖H‖`.
    pub constant_of_motion_over_h: Sci,
    /// `max_t |⟨J⟩(t) − ⟨J⟩(0)|`, per method.
    pub parity_drift: BTreeMap<String, Sci>,
    /// Largest row difference between the two routes; present for `both`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_vs_oracle: Option<Sci>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveSummary {
    pub config: ConfigFile,
    pub methods: Vec<String>,
    pub points: usize,
    pub csv: PathBuf,
    pub tolerances: Tolerances,
    pub residuals: Residuals,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_convergence: Option<ConvergenceJson>,
}
