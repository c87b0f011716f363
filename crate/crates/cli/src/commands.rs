//! The three subcommands. Each validates the configuration before doing any
//! numerical work, writes its artifacts under the output directory and
//! returns a summary for the caller to print.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;
use spinboson_core::dynamics::{continue_convergence, parity_expectation_series, reduced_dynamics};
use spinboson_core::fock;
use spinboson_core::model::{assemble_block, parity_constant_of_motion, riccati_residual, spectral_obstruction_check};
use spinboson_core::propagator::{dressed_spectrum, OracleSolver};
use spinboson_core::linalg::max_spectrum_gap;
use spinboson_core::{ConvergenceReport, EvolutionResult};

use crate::config::{ConfigFile, RunConfig};
use crate::error::CliError;
use crate::output::{
    ensure_dir, write_evolution_file, write_json, write_spectrum_file, ConvergenceJson, EvolveSummary, Residuals,
    Sci, Tolerances,
};
use crate::verify::{run_suite, Comparison, VerifyReport};

/// Largest change of any reported observable accepted when cutoffs double.
pub const CONVERGENCE_TARGET: f64 = 1e-6;

pub const EVOLUTION_CSV: &str = "evolution.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const VERIFY_JSON: &str = "verify.json";
pub const SPECTRUM_CSV: &str = "spectrum.csv";
pub const SPECTRUM_JSON: &str = "spectrum.json";

/// Runs the invariant suite, prints one line per check and writes
/// `verify.json`. Any failing check turns into [`CliError::VerificationFailed`]
/// after the report is written.
pub fn cmd_verify(cfg: &RunConfig) -> Result<VerifyReport, CliError> {
    let report = run_suite(cfg)?;
    for c in &report.checks {
        let op = match c.comparison {
            Comparison::AtMost => "<=",
            Comparison::Above => ">",
        };
        println!(
            "{} {:<42} {:.3e} {op} {:.3e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.threshold
        );
    }
    ensure_dir(&cfg.out)?;
    write_json(&cfg.out.join(VERIFY_JSON), &report)?;
    let failed = report.failures();
    println!(
        "{} of {} checks passed over {} parameter sets (seed {})",
        report.checks.len() - failed,
        report.checks.len(),
        report.parameter_sets,
        report.seed
    );
    if failed > 0 {
        return Err(CliError::VerificationFailed {
            failed,
            total: report.checks.len(),
        });
    }
    Ok(report)
}

/// Evolves the configured state with every selected method. The
/// convergence report is computed from the first method's run.
pub fn run_evolution(cfg: &RunConfig) -> Result<(Vec<EvolutionResult>, Option<ConvergenceReport>), CliError> {
    cfg.require_closed_form_allowed()?;
    let bath = cfg.bath.build(&cfg.params)?;
    let results = cfg
        .method
        .methods()
        .into_iter()
        .map(|m| reduced_dynamics(&cfg.params, &cfg.initial, &bath, &cfg.times, m))
        .collect::<Result<Vec<_>, _>>()?;
    let convergence = if cfg.convergence_doublings > 0 {
        Some(continue_convergence(
            &cfg.params,
            &results[0],
            &cfg.initial,
            &cfg.bath,
            CONVERGENCE_TARGET,
            cfg.convergence_doublings,
        )?)
    } else {
        None
    };
    Ok((results, convergence))
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<EvolveSummary, CliError> {
    let (results, convergence) = run_evolution(cfg)?;
    ensure_dir(&cfg.out)?;
    let csv = cfg.out.join(EVOLUTION_CSV);
    write_evolution_file(&csv, &results)?;

    let bh = assemble_block(&cfg.params);
    let p = fock::parity(cfg.params.space());
    let hp_norm = cfg.norm.of(&bh.h_plus).max(1.0);
    let h_norm = cfg.norm.of(&bh.to_total().entries).max(1.0);
    let parity_drift: BTreeMap<String, Sci> = results
        .iter()
        .map(|r| (r.method.as_str().to_string(), Sci(parity_expectation_series(r).max_drift)))
        .collect();
    let closed_vs_oracle = match results.as_slice() {
        [a, b] => Some(Sci(a.max_row_difference(b)?)),
        _ => None,
    };

    let summary = EvolveSummary {
        config: cfg.file.clone(),
        methods: results.iter().map(|r| r.method.as_str().to_string()).collect(),
        points: cfg.times.len(),
        csv,
        tolerances: Tolerances {
            tolerance: Sci(cfg.tolerance),
            convergence_target: Sci(CONVERGENCE_TARGET),
        },
        residuals: Residuals {
            riccati_over_h_plus: Sci(riccati_residual(&p, &bh, cfg.norm)? / hp_norm),
            constant_of_motion_over_h: Sci(parity_constant_of_motion(&cfg.params, cfg.norm) / h_norm),
            parity_drift,
            closed_vs_oracle,
        },
        truncation_convergence: convergence.as_ref().map(ConvergenceJson::from),
    };
    write_json(&cfg.out.join(SUMMARY_JSON), &summary)?;

    println!("wrote {} rows to {}", cfg.times.len() * results.len(), summary.csv.display());
    if let Some(c) = &convergence {
        let last = c.steps.last().map_or(0.0, |s| s.max_change);
        println!(
            "truncation convergence: max change {last:.3e} after {} doubling(s), target {CONVERGENCE_TARGET:.0e}: {}",
            c.steps.len(),
            if c.converged { "converged" } else { "not converged" }
        );
    }
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct DressedReport {
    /// Largest gap between the sorted union of the dressed spectra and the
    /// full spectrum, divided by `‖H‖_F`.
    pub union_vs_full_over_h: Sci,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockComparison {
    /// Largest gap between the sorted spectra of `H₊` and `H₋`.
    pub max_gap: Sci,
    pub expected_gap: Sci,
    /// Largest gap between `spec(H₊) − 2β` and `spec(H₋)`.
    pub shift_residual: Sci,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub config: ConfigFile,
    pub csv: PathBuf,
    pub full_dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dressed: Option<DressedReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dressed_refused: Option<String>,
    pub blocks: BlockComparison,
}

/// Writes the full spectrum, the spectra of both diagonal blocks and, when
/// `β = 0`, the two dressed spectra. For `β ≠ 0` the dressed spectra are
/// refused and everything else is still written.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<SpectrumSummary, CliError> {
    let params = &cfg.params;
    let beta = params.beta();
    let oracle = OracleSolver::new(params);
    let full = oracle.spectrum();
    let blocks = spectral_obstruction_check(params, cfg.tolerance);
    let shifted: Vec<f64> = blocks.spectrum_plus.iter().map(|l| l - 2.0 * beta).collect();
    let h_norm = assemble_block(params).to_total().entries.norm().max(1.0);

    let (dressed, refused) = match dressed_spectrum(params) {
        Ok(ds) => (Some(ds), None),
        Err(e @ spinboson_core::Error::ClosedFormRequiresZeroBeta(_)) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };

    let mut series: Vec<(&str, Vec<f64>)> = vec![
        ("full", full.clone()),
        ("h_plus", blocks.spectrum_plus.clone()),
        ("h_minus", blocks.spectrum_minus.clone()),
    ];
    let mut dressed_report = None;
    if let Some(ds) = &dressed {
        series.push(("dressed_plus", ds.eigenvalues_pp()));
        series.push(("dressed_minus", ds.eigenvalues_pm()));
        dressed_report = Some(DressedReport {
            union_vs_full_over_h: Sci(max_spectrum_gap(&ds.union_sorted(), &full) / h_norm),
        });
    }
    if let Some(msg) = &refused {
        eprintln!("dressed spectra refused: {msg}");
    }

    ensure_dir(&cfg.out)?;
    let csv = cfg.out.join(SPECTRUM_CSV);
    let borrowed: Vec<(&str, &[f64])> = series.iter().map(|(k, v)| (*k, v.as_slice())).collect();
    write_spectrum_file(&csv, &borrowed)?;

    let summary = SpectrumSummary {
        config: cfg.file.clone(),
        csv,
        full_dimension: full.len(),
        dressed: dressed_report,
        dressed_refused: refused,
        blocks: BlockComparison {
            max_gap: Sci(blocks.max_gap),
            expected_gap: Sci(2.0 * beta.abs()),
            shift_residual: Sci(max_spectrum_gap(&shifted, &blocks.spectrum_minus)),
        },
    };
    write_json(&cfg.out.join(SPECTRUM_JSON), &summary)?;
    println!("wrote {} eigenvalues to {}", full.len(), summary.csv.display());
    Ok(summary)
}
