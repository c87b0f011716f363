//! The invariant suite behind `verify`.
//!
//! Relative checks divide the measured residual by the natural operator
//! norm (`‖H₊‖_F` or `‖H_SB‖_F`) before comparing it with the threshold.
//! Exact-algebra checks use fixed thresholds; numerical checks scale with
//! the configured tolerance (default 1e-10).

use serde::Serialize;
use spinboson_core::dynamics::{parity_expectation_series, reduced_dynamics};
use spinboson_core::fock::{self, annihilation, creation, displacement, phase_operator, restrict};
use spinboson_core::linalg::{identity, max_spectrum_gap, unitarity_error, CMatrix};
use spinboson_core::model::{
    assemble_block, assemble_total, parity_constant_of_motion, riccati_residual, similarity_transform,
    spectral_obstruction_check, total_parity,
};
use spinboson_core::propagator::{dressed_spectrum, ClosedFormSolver, OracleSolver};
use spinboson_core::sampling::{ParamSampler, SampleRanges};
use spinboson_core::{FockSpace, Method, ModelParams, Norm, C64};

use crate::config::RunConfig;
use crate::error::CliError;

/// Exact-algebra relative threshold.
pub const EXACT_REL: f64 = 1e-12;
/// Times at which the two propagator routes are compared.
pub const COMPARISON_TIMES: [f64; 4] = [0.1, 1.0, 5.0, 20.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    Above,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub parameter_sets: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn all_passed(&self) -> bool {
        self.failures() == 0
    }

    /// Keeps the worst value seen for `name` across parameter sets.
    fn record(&mut self, name: &str, measured: f64, threshold: f64, comparison: Comparison) {
        let measured = if measured.is_nan() { f64::INFINITY } else { measured };
        if let Some(c) = self.checks.iter_mut().find(|c| c.name == name) {
            c.measured = match comparison {
                Comparison::AtMost => c.measured.max(measured),
                Comparison::Above => c.measured.min(measured),
            };
            c.passed = passes(c.measured, c.threshold, comparison);
        } else {
            self.checks.push(Check {
                name: name.to_string(),
                measured,
                threshold,
                comparison,
                passed: passes(measured, threshold, comparison),
            });
        }
    }

    fn at_most(&mut self, name: &str, measured: f64, threshold: f64) {
        self.record(name, measured, threshold, Comparison::AtMost);
    }

    fn above(&mut self, name: &str, measured: f64, threshold: f64) {
        self.record(name, measured, threshold, Comparison::Above);
    }
}

fn passes(measured: f64, threshold: f64, comparison: Comparison) -> bool {
    match comparison {
        Comparison::AtMost => measured <= threshold,
        Comparison::Above => measured > threshold,
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Operator identities on a single mode with cutoff 30.
pub fn fock_checks(report: &mut VerifyReport) -> Result<(), CliError> {
    let d = 30;
    let space = FockSpace::single(d)?;
    let (f, g, phi) = (c(0.3, 0.0), c(0.0, 0.2), 1.1);

    let a = annihilation(&space, 0)?;
    let ad = creation(&space, 0)?;
    let mut expected = identity(d);
    expected[(d - 1, d - 1)] = c(1.0 - d as f64, 0.0);
    report.at_most(
        "fock.truncated_commutator",
        (&a * &ad - &ad * &a - expected).norm(),
        1e-14 * d as f64,
    );

    let p = fock::parity(&space);
    report.at_most("fock.parity_involution", (&p * &p - identity(d)).norm(), 0.0);
    report.at_most("fock.parity_flips_ladder", (&p * &a * &p + &a).norm(), 0.0);

    let d_f = displacement(&space, 0, f)?;
    let d_mf = displacement(&space, 0, -f)?;
    report.at_most("fock.parity_conjugates_displacement", (&p * &d_f * &p - &d_mf).norm(), 0.0);
    report.at_most("fock.displacement_inverse", (&d_f * &d_mf - identity(d)).norm(), 1e-12);
    report.at_most(
        "fock.vacuum_amplitude",
        (d_f[(0, 0)] - c((-f.norm_sqr() / 2.0).exp(), 0.0)).norm(),
        1e-10,
    );

    let lhs = &d_f * displacement(&space, 0, g)?;
    let rhs = displacement(&space, 0, f + g)? * C64::from_polar(1.0, (f * g.conj()).im);
    report.at_most(
        "fock.composition_law_leading_block",
        restrict(&(lhs - rhs), &space.leading_block()).norm(),
        1e-8,
    );

    let rotated = phase_operator(&space, 0, phi)? * &d_f * phase_operator(&space, 0, -phi)?;
    report.at_most(
        "fock.phase_rotation",
        (rotated - displacement(&space, 0, f * C64::from_polar(1.0, phi))?).norm(),
        1e-10,
    );
    // The phases nφ reach ~40 rad at this cutoff, so rounding of the angle
    // alone is ~1e-14 per entry.
    report.at_most(
        "fock.phase_composition",
        (phase_operator(&space, 0, phi)? * phase_operator(&space, 0, 0.4)? - phase_operator(&space, 0, phi + 0.4)?)
            .norm(),
        EXACT_REL,
    );
    Ok(())
}

/// Hamiltonian-level checks for one parameter set.
pub fn model_checks(report: &mut VerifyReport, params: &ModelParams, tol: f64, norm: Norm) -> Result<(), CliError> {
    let bh = assemble_block(params);
    let tensor = assemble_total(params).entries;
    let block = bh.to_total().entries;
    let h_norm = tensor.norm();
    let hp_norm = bh.h_plus.norm().max(1.0);
    let p = fock::parity(params.space());
    let beta = params.beta();

    report.at_most("model.block_tensor_equivalence", (&tensor - &block).norm() / h_norm, 1e-14);
    report.at_most("model.hermiticity", (&tensor - tensor.adjoint()).norm(), 0.0);

    let spectra = spectral_obstruction_check(params, tol);
    let scale = spectra
        .spectrum_plus
        .iter()
        .chain(&spectra.spectrum_minus)
        .fold(1.0f64, |acc, l| acc.max(l.abs()));
    let commutator = parity_constant_of_motion(params, norm) / h_norm;

    if beta == 0.0 {
        let residual = riccati_residual(&p, &bh, norm)?;
        report.at_most("model.riccati_residual", residual / hp_norm, EXACT_REL);

        let st = similarity_transform(&bh, &p, EXACT_REL)?;
        let diag = &st.diagonalized;
        let off = diag.block(0, 1).norm().max(diag.block(1, 0).norm());
        report.at_most("model.diagonalization_off_diagonal", off / h_norm, EXACT_REL);
        let alpha_p = &p * c(params.alpha(), 0.0);
        let blocks = (diag.block(0, 0) - (&bh.h_plus + &alpha_p))
            .norm()
            .max((diag.block(1, 1) - (&bh.h_minus - &alpha_p)).norm());
        report.at_most("model.diagonalization_blocks", blocks / h_norm, EXACT_REL);

        report.at_most("model.constant_of_motion", commutator, EXACT_REL);
        report.at_most("model.spectra_matched", spectra.max_gap / scale, tol);
    } else {
        let r = spinboson_core::model::riccati_operator(&p, &bh)?;
        let expected = &p * c(2.0 * beta, 0.0);
        report.at_most("model.riccati_residual_is_2beta_parity", (r - expected).norm() / hp_norm, EXACT_REL);
        report.above("model.constant_of_motion_broken", commutator, EXACT_REL);
        let shifted: Vec<f64> = spectra.spectrum_plus.iter().map(|l| l - 2.0 * beta).collect();
        report.at_most(
            "model.spectral_shift_2beta",
            max_spectrum_gap(&shifted, &spectra.spectrum_minus) / scale,
            tol,
        );
        report.above("model.spectra_separated", spectra.max_gap / scale, tol);
    }
    Ok(())
}

/// Propagator-level checks for one parameter set.
pub fn propagator_checks(report: &mut VerifyReport, params: &ModelParams, tol: f64) -> Result<(), CliError> {
    let h = assemble_total(params).entries;
    let h_norm = h.norm();
    let dim = h.nrows() as f64;
    let j = total_parity(params.space()).entries;
    let oracle = OracleSolver::new(params);

    let u1 = oracle.propagator(0.7)?.matrix.entries;
    let u2 = oracle.propagator(1.6)?.matrix.entries;
    let u12 = oracle.propagator(2.3)?.matrix.entries;
    report.at_most("propagator.oracle_group_law", (u1 * u2 - u12).norm(), tol);

    if params.beta() != 0.0 {
        for &t in &COMPARISON_TIMES {
            let uo = oracle.propagator(t)?.matrix.entries;
            report.at_most("propagator.unitarity", unitarity_error(&uo), tol);
        }
        return Ok(());
    }

    let union = dressed_spectrum(params)?.union_sorted();
    report.at_most(
        "propagator.dressed_union_vs_full",
        max_spectrum_gap(&union, &oracle.spectrum()) / h_norm,
        tol,
    );

    let closed = ClosedFormSolver::new(params)?;
    for &t in &COMPARISON_TIMES {
        let uc = closed.propagator(t)?.matrix.entries;
        let uo = oracle.propagator(t)?.matrix.entries;
        report.at_most("propagator.closed_vs_oracle", (&uc - &uo).norm() / dim, 10.0 * tol);
        report.at_most("propagator.unitarity", unitarity_error(&uc).max(unitarity_error(&uo)), tol);
        report.at_most("propagator.parity_conservation", conjugation_drift(&uc, &j), tol);
    }
    Ok(())
}

fn conjugation_drift(u: &CMatrix, j: &CMatrix) -> f64 {
    (u.adjoint() * j * u - j).norm()
}

/// Reduced-dynamics contracts along the configured trajectory.
pub fn dynamics_checks(report: &mut VerifyReport, cfg: &RunConfig) -> Result<(), CliError> {
    let tol = cfg.tolerance;
    let bath = cfg.bath.build(&cfg.params)?;
    let primary = if cfg.params.beta() == 0.0 { Method::ClosedForm } else { Method::Oracle };
    let result = reduced_dynamics(&cfg.params, &cfg.initial, &bath, &cfg.times, primary)?;

    let mut trace_err = 0.0f64;
    let mut min_eig = f64::INFINITY;
    let mut purity_violation = 0.0f64;
    for s in &result.reduced_states {
        trace_err = trace_err.max((s.trace() - c(1.0, 0.0)).norm());
        min_eig = min_eig.min(s.min_eigenvalue());
        let purity = s.purity();
        purity_violation = purity_violation.max(0.5 - purity).max(purity - 1.0);
    }
    report.at_most("dynamics.trace", trace_err, tol);
    report.at_most("dynamics.negative_eigenvalue", (-min_eig).max(0.0), 1e-9);
    report.at_most("dynamics.purity_bounds", purity_violation.max(0.0), 1e-10);

    if cfg.params.beta() == 0.0 {
        report.at_most("dynamics.parity_drift", parity_expectation_series(&result).max_drift, 10.0 * tol);
        let oracle = reduced_dynamics(&cfg.params, &cfg.initial, &bath, &cfg.times, Method::Oracle)?;
        let gap = result
            .state_discrepancy(&oracle)?
            .into_iter()
            .fold(0.0, f64::max);
        report.at_most("dynamics.closed_vs_oracle", gap, 10.0 * tol);
    }
    if cfg.params.alpha() == 0.0 {
        let initial = cfg.initial.rho;
        let drift = result
            .reduced_states
            .iter()
            .map(|s| (s.rho[(0, 0)] - initial[(0, 0)]).norm().max((s.rho[(1, 1)] - initial[(1, 1)]).norm()))
            .fold(0.0, f64::max);
        report.at_most("dynamics.populations_constant", drift, tol);
    }
    Ok(())
}

/// Runs every check on the configured parameters plus `random_sets` seeded
/// sets with the same cutoffs and splitting.
pub fn run_suite(cfg: &RunConfig) -> Result<VerifyReport, CliError> {
    cfg.require_closed_form_allowed()?;
    let mut sets = vec![cfg.params.clone()];
    let mut sampler = ParamSampler::new(
        cfg.seed,
        SampleRanges {
            beta: cfg.params.beta(),
            ..SampleRanges::default()
        },
    );
    for _ in 0..cfg.random_sets {
        sets.push(sampler.sample(cfg.params.space().cutoffs())?);
    }

    let mut report = VerifyReport {
        seed: cfg.seed,
        parameter_sets: sets.len(),
        checks: Vec::new(),
    };
    fock_checks(&mut report)?;
    for p in &sets {
        model_checks(&mut report, p, cfg.tolerance, cfg.norm)?;
        propagator_checks(&mut report, p, cfg.tolerance)?;
    }
    dynamics_checks(&mut report, cfg)?;
    Ok(report)
}
