//! Initial states, composite evolution and reduced qubit dynamics.
//!
//! The composite state is always the product `ρ₀ ⊗ ω_B`. For a propagator
//! with blocks `U_ij` (qubit indices), the reduced state is
//!
//! ```text
//! (ρ_t)_ij = Σ_kl (ρ₀)_kl Tr(U_ik ω_B U_jl†)
//! ```
//!
//! which avoids forming the full `2N × 2N` density matrix.

use nalgebra::Matrix2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{self, FockSpace};
use crate::linalg::{hermiticity_error, CMatrix, HermitianEigen, C64, ONE, ZERO};
use crate::model::ModelParams;
use crate::propagator::{Method, Propagator, Solver};

pub const STATE_TRACE_TOL: f64 = 1e-12;
pub const STATE_POSITIVITY_TOL: f64 = 1e-10;
/// Largest Poisson tail mass tolerated beyond the cutoff for coherent states.
pub const COHERENT_TAIL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub rho: Matrix2<C64>,
}

impl QubitState {
    /// `ρ = (I + r·σ)/2`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidState("Bloch vector must be finite".into()));
        }
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if len > 1.0 + 1e-12 {
            return Err(Error::InvalidState(format!("Bloch vector length {len} exceeds 1")));
        }
        let rho = Matrix2::new(
            C64::new(0.5 * (1.0 + r[2]), 0.0),
            C64::new(0.5 * r[0], -0.5 * r[1]),
            C64::new(0.5 * r[0], 0.5 * r[1]),
            C64::new(0.5 * (1.0 - r[2]), 0.0),
        );
        Ok(Self { rho })
    }

    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(rho: Matrix2<C64>) -> Result<Self> {
        let s = Self { rho };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let herm = (self.rho - self.rho.adjoint()).norm();
        if herm > STATE_TRACE_TOL {
            return Err(Error::InvalidState(format!("qubit state not Hermitian ({herm:e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > STATE_TRACE_TOL || tr.im.abs() > STATE_TRACE_TOL {
            return Err(Error::InvalidState(format!("qubit state trace is {tr}")));
        }
        if self.min_eigenvalue() < -STATE_POSITIVITY_TOL {
            return Err(Error::InvalidState("qubit state is not positive".into()));
        }
        Ok(())
    }

    pub fn trace(&self) -> C64 {
        self.rho[(0, 0)] + self.rho[(1, 1)]
    }

    pub fn sx(&self) -> f64 {
        2.0 * self.rho[(0, 1)].re
    }

    pub fn sy(&self) -> f64 {
        -2.0 * self.rho[(0, 1)].im
    }

    pub fn sz(&self) -> f64 {
        (self.rho[(0, 0)] - self.rho[(1, 1)]).re
    }

    pub fn coherence_abs(&self) -> f64 {
        self.rho[(0, 1)].norm()
    }

    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }

    /// Smaller eigenvalue of the Hermitian part, in closed form.
    pub fn min_eigenvalue(&self) -> f64 {
        let a = self.rho[(0, 0)].re;
        let d = self.rho[(1, 1)].re;
        let b = 0.5 * (self.rho[(0, 1)] + self.rho[(1, 0)].conj());
        0.5 * (a + d) - (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt()
    }
}

/// Which family an initial bath state belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum BathKind {
    Vacuum,
    /// Occupation of every mode.
    Fock(Vec<usize>),
    /// Displacement amplitude `f_k` of every mode; the state is `D_f|0⟩`.
    Coherent(Vec<C64>),
    /// Inverse temperature θ (inverse energy units).
    Thermal(f64),
}

impl BathKind {
    /// Builds the state on the space of `params`; thermal states use the
    /// mode frequencies of `params`.
    pub fn build(&self, params: &ModelParams) -> Result<BathState> {
        let space = params.space();
        match self {
            BathKind::Vacuum => Ok(vacuum_state(space)),
            BathKind::Fock(levels) => fock_state(space, levels),
            BathKind::Coherent(f) => coherent_state(space, f),
            BathKind::Thermal(theta) => {
                let omegas: Vec<f64> = params.modes().iter().map(|m| m.omega).collect();
                thermal_state(space, &omegas, *theta)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathState {
    pub rho_b: CMatrix,
    /// `F` with `ω_B = F F†`: one column per nonzero weight (a single
    /// column for pure states).
    pub factor: CMatrix,
    pub kind: BathKind,
}

impl BathState {
    pub fn dim(&self) -> usize {
        self.rho_b.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        let herm = hermiticity_error(&self.rho_b);
        if herm > STATE_POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("bath state not Hermitian ({herm:e})")));
        }
        let tr = self.rho_b.trace();
        if (tr.re - 1.0).abs() > STATE_POSITIVITY_TOL || tr.im.abs() > STATE_POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("bath state trace is {tr}")));
        }
        let min = if self.is_diagonal() {
            self.rho_b.diagonal().iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
        } else {
            HermitianEigen::new(&self.rho_b).values[0]
        };
        if min < -STATE_POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("bath state has eigenvalue {min:e}")));
        }
        let factor_err = if self.factor.nrows() == self.dim() {
            (&self.factor * self.factor.adjoint() - &self.rho_b).norm()
        } else {
            f64::INFINITY
        };
        if factor_err > STATE_POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("bath factor does not reproduce the state ({factor_err:e})")));
        }
        Ok(())
    }

    pub fn purity(&self) -> f64 {
        (&self.rho_b * &self.rho_b).trace().re
    }

    /// Mean occupation `Tr(ω_B a_k†a_k)` of one mode.
    pub fn mean_occupation(&self, space: &FockSpace, mode: usize) -> Result<f64> {
        let n = fock::number(space, mode)?;
        Ok((&self.rho_b * n).trace().re)
    }

    fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|r| (0..n).all(|c| r == c || self.rho_b[(r, c)] == ZERO))
    }
}

pub fn vacuum_state(space: &FockSpace) -> BathState {
    let mut rho_b = CMatrix::zeros(space.dim(), space.dim());
    rho_b[(0, 0)] = ONE;
    BathState {
        rho_b,
        factor: basis_column(space.dim(), 0),
        kind: BathKind::Vacuum,
    }
}

pub fn fock_state(space: &FockSpace, levels: &[usize]) -> Result<BathState> {
    let i = space.index_of(levels)?;
    let mut rho_b = CMatrix::zeros(space.dim(), space.dim());
    rho_b[(i, i)] = ONE;
    Ok(BathState {
        rho_b,
        factor: basis_column(space.dim(), i),
        kind: BathKind::Fock(levels.to_vec()),
    })
}

fn basis_column(dim: usize, i: usize) -> CMatrix {
    let mut col = CMatrix::zeros(dim, 1);
    col[(i, 0)] = ONE;
    col
}

/// Poisson mass beyond level `d − 1` for mean occupation `mean`.
pub fn poisson_tail(mean: f64, d: usize) -> f64 {
    let mut weight = (-mean).exp();
    let mut kept = 0.0;
    for n in 0..d {
        if n > 0 {
            weight *= mean / n as f64;
        }
        kept += weight;
    }
    (1.0 - kept).max(0.0)
}

/// `D_f|0⟩⟨0|D_{−f}` with `D_f = exp(Σ_k f_k* a_k − f_k a_k†)`.
pub fn coherent_state(space: &FockSpace, f: &[C64]) -> Result<BathState> {
    if f.len() != space.n_modes() {
        return Err(Error::LengthMismatch {
            expected: space.n_modes(),
            found: f.len(),
        });
    }
    let kept: f64 = f
        .iter()
        .zip(space.cutoffs())
        .map(|(fk, &d)| 1.0 - poisson_tail(fk.norm_sqr(), d))
        .product();
    let tail = 1.0 - kept;
    if tail > COHERENT_TAIL_TOL {
        return Err(Error::Truncation(format!(
            "coherent amplitude too large for cutoffs {:?}: truncated norm error {tail:e}",
            space.cutoffs()
        )));
    }
    let d = fock::multimode_displacement(space, f)?;
    let ket = d.columns(0, 1).into_owned();
    Ok(BathState {
        rho_b: &ket * ket.adjoint(),
        factor: ket,
        kind: BathKind::Coherent(f.to_vec()),
    })
}

/// Truncated Gibbs state `e^{−θH_B} / Tr e^{−θH_B}`.
pub fn thermal_state(space: &FockSpace, omegas: &[f64], theta: f64) -> Result<BathState> {
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::InvalidParams(format!("inverse temperature must be > 0, got {theta}")));
    }
    if omegas.len() != space.n_modes() {
        return Err(Error::LengthMismatch {
            expected: space.n_modes(),
            found: omegas.len(),
        });
    }
    let energies: Vec<f64> = (0..space.dim())
        .map(|i| {
            omegas
                .iter()
                .enumerate()
                .map(|(k, w)| w * space.level(i, k) as f64)
                .sum()
        })
        .collect();
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = energies.iter().map(|e| (-theta * (e - e_min)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let mut rho_b = CMatrix::zeros(space.dim(), space.dim());
    for (i, w) in weights.iter().enumerate() {
        rho_b[(i, i)] = C64::new(w / z, 0.0);
    }
    let occupied: Vec<usize> = (0..space.dim()).filter(|&i| weights[i] > 0.0).collect();
    let mut factor = CMatrix::zeros(space.dim(), occupied.len());
    for (c, &i) in occupied.iter().enumerate() {
        factor[(i, c)] = C64::new((weights[i] / z).sqrt(), 0.0);
    }
    Ok(BathState {
        rho_b,
        factor,
        kind: BathKind::Thermal(theta),
    })
}

/// `ρ₀ ⊗ ω_B`.
pub fn product_density(rho0: &QubitState, bath: &BathState) -> CMatrix {
    let q = CMatrix::from_fn(2, 2, |r, c| rho0.rho[(r, c)]);
    q.kronecker(&bath.rho_b)
}

/// `Tr_B ρ`: `(ρ_S)_ij = Σ_n ⟨i,n|ρ|j,n⟩`.
pub fn partial_trace(rho_total: &CMatrix, space: &FockSpace) -> Result<QubitState> {
    let n = space.dim();
    if rho_total.nrows() != 2 * n || rho_total.ncols() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            found: rho_total.nrows(),
        });
    }
    let mut rho = Matrix2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            rho[(i, j)] = (0..n).map(|m| rho_total[(i * n + m, j * n + m)]).sum();
        }
    }
    Ok(QubitState { rho })
}

/// Observables recorded at each grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    pub coherence_abs: f64,
    pub purity: f64,
    /// `⟨σ_x ⊗ P⟩` of the composite state.
    pub parity_j: f64,
}

impl Observables {
    fn new(state: &QubitState, parity_j: f64) -> Self {
        Self {
            sx: state.sx(),
            sy: state.sy(),
            sz: state.sz(),
            coherence_abs: state.coherence_abs(),
            purity: state.purity(),
            parity_j,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub method: Method,
    pub times: Vec<f64>,
    pub reduced_states: Vec<QubitState>,
    pub observables: Vec<Observables>,
}

impl EvolutionResult {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The numeric row written per grid point: the eight real/imaginary
    /// parts of `ρ_t` followed by sx, sy, sz, |ρ₀₁|, purity, ⟨J⟩.
    pub fn row(&self, k: usize) -> [f64; 14] {
        let r = &self.reduced_states[k].rho;
        let o = &self.observables[k];
        [
            r[(0, 0)].re,
            r[(0, 0)].im,
            r[(0, 1)].re,
            r[(0, 1)].im,
            r[(1, 0)].re,
            r[(1, 0)].im,
            r[(1, 1)].re,
            r[(1, 1)].im,
            o.sx,
            o.sy,
            o.sz,
            o.coherence_abs,
            o.purity,
            o.parity_j,
        ]
    }

    /// Largest absolute difference over every row value of two results on
    /// the same grid.
    pub fn max_row_difference(&self, other: &EvolutionResult) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok((0..self.len())
            .flat_map(|k| {
                let a = self.row(k);
                let b = other.row(k);
                (0..a.len()).map(move |i| (a[i] - b[i]).abs())
            })
            .fold(0.0, f64::max))
    }

    /// Largest entrywise `|ρ_a(t) − ρ_b(t)|` at each grid point.
    pub fn state_discrepancy(&self, other: &EvolutionResult) -> Result<Vec<f64>> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(self
            .reduced_states
            .iter()
            .zip(&other.reduced_states)
            .map(|(a, b)| (a.rho - b.rho).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .collect())
    }
}

/// `t_k = k · t_max / steps` for `k = 0..=steps`; a single point when
/// `t_max = 0`.
pub fn uniform_grid(t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !t_max.is_finite() || t_max < 0.0 {
        return Err(Error::InvalidParams(format!("t_max must be finite and >= 0, got {t_max}")));
    }
    if steps == 0 {
        return Err(Error::InvalidParams("steps must be at least 1".into()));
    }
    if t_max == 0.0 {
        return Ok(vec![0.0]);
    }
    Ok((0..=steps).map(|k| t_max * k as f64 / steps as f64).collect())
}

/// `Tr(A B†)`.
fn trace_a_bdag(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

/// `Tr(A B† P)` for diagonal `P = diag(signs)`.
fn trace_a_bdag_parity(a: &CMatrix, b: &CMatrix, signs: &[f64]) -> C64 {
    let mut acc = ZERO;
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            acc += a[(r, c)] * b[(r, c)].conj() * signs[r];
        }
    }
    acc
}

/// Evolves `ρ₀ ⊗ ω_B` with `u` and returns the reduced state and `⟨σ_x⊗P⟩`.
#[allow(clippy::needless_range_loop)]
pub fn evolve_product(
    u: &Propagator,
    rho0: &QubitState,
    bath: &BathState,
    parity_signs: &[f64],
) -> Result<(QubitState, f64)> {
    let n = u.matrix.block_dim;
    if bath.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bath.dim(),
        });
    }
    let blocks: [[CMatrix; 2]; 2] = [
        [u.matrix.block(0, 0), u.matrix.block(0, 1)],
        [u.matrix.block(1, 0), u.matrix.block(1, 1)],
    ];
    let diagonal_bath = bath.is_diagonal();
    let apply_bath = |m: &CMatrix| -> CMatrix {
        if diagonal_bath {
            let mut out = m.clone();
            for (j, mut col) in out.column_iter_mut().enumerate() {
                col *= bath.rho_b[(j, j)];
            }
            out
        } else {
            m * &bath.rho_b
        }
    };
    let with_bath: [[CMatrix; 2]; 2] = [
        [apply_bath(&blocks[0][0]), apply_bath(&blocks[0][1])],
        [apply_bath(&blocks[1][0]), apply_bath(&blocks[1][1])],
    ];

    let mut rho = Matrix2::zeros();
    let mut parity_j = ZERO;
    for k in 0..2 {
        for l in 0..2 {
            let r = rho0.rho[(k, l)];
            if r == ZERO {
                continue;
            }
            for i in 0..2 {
                for j in 0..2 {
                    rho[(i, j)] += r * trace_a_bdag(&with_bath[i][k], &blocks[j][l]);
                }
            }
            parity_j += r
                * (trace_a_bdag_parity(&with_bath[0][k], &blocks[1][l], parity_signs)
                    + trace_a_bdag_parity(&with_bath[1][k], &blocks[0][l], parity_signs));
        }
    }
    Ok((QubitState { rho }, parity_j.re))
}

/// `[e₀⊗F, e₁⊗F]` for the bath factor `F`: the columns whose images under
/// `U(t)` determine every reduced quantity.
fn initial_columns(bath: &BathState) -> CMatrix {
    let (n, r) = bath.factor.shape();
    let mut x = CMatrix::zeros(2 * n, 2 * r);
    x.view_mut((0, 0), (n, r)).copy_from(&bath.factor);
    x.view_mut((n, r), (n, r)).copy_from(&bath.factor);
    x
}

/// Reduced state and `⟨σ_x⊗P⟩` from `Y = U(t)[e₀⊗F, e₁⊗F]`. With `A_k^i`
/// the qubit-`i` rows of the `k`-th column group,
/// `(ρ_t)_ij = Σ_kl (ρ₀)_kl Tr(A_k^i A_l^j†)`.
fn reduce_columns(y: &CMatrix, rho0: &QubitState, signs: &[f64]) -> (QubitState, f64) {
    let n = signs.len();
    let r = y.ncols() / 2;
    let part = |k: usize, i: usize| y.view((i * n, k * r), (n, r)).into_owned();
    let a = [[part(0, 0), part(0, 1)], [part(1, 0), part(1, 1)]];

    let mut rho = Matrix2::zeros();
    let mut parity_j = ZERO;
    for k in 0..2 {
        for l in 0..2 {
            let w = rho0.rho[(k, l)];
            if w == ZERO {
                continue;
            }
            for i in 0..2 {
                for j in 0..2 {
                    rho[(i, j)] += w * trace_a_bdag(&a[k][i], &a[l][j]);
                }
            }
            parity_j += w
                * (trace_a_bdag_parity(&a[k][0], &a[l][1], signs) + trace_a_bdag_parity(&a[k][1], &a[l][0], signs));
        }
    }
    (QubitState { rho }, parity_j.re)
}

/// `ρ_t = Tr_B(U_t ρ₀⊗ω_B U_t†)` over `times`, with the propagator route
/// chosen by `method`. Grid points are evaluated in parallel; the result is
/// ordered like `times`.
pub fn reduced_dynamics(
    params: &ModelParams,
    rho0: &QubitState,
    bath: &BathState,
    times: &[f64],
    method: Method,
) -> Result<EvolutionResult> {
    let solver = Solver::new(params, method)?;
    reduced_dynamics_with(&solver, params, rho0, bath, times)
}

/// As [`reduced_dynamics`], reusing an already-built solver.
pub fn reduced_dynamics_with(
    solver: &Solver,
    params: &ModelParams,
    rho0: &QubitState,
    bath: &BathState,
    times: &[f64],
) -> Result<EvolutionResult> {
    rho0.validate()?;
    bath.validate()?;
    if bath.dim() != params.block_dim() {
        return Err(Error::DimensionMismatch {
            expected: params.block_dim(),
            found: bath.dim(),
        });
    }
    let signs = fock::parity_signs(params.space());
    let columns = initial_columns(bath);
    let action = solver.action(&columns)?;
    let points: Vec<(QubitState, f64)> = times
        .par_iter()
        .map(|&t| {
            if t == 0.0 {
                let (_, parity_j) = reduce_columns(&columns, rho0, &signs);
                Ok((*rho0, parity_j))
            } else {
                Ok(reduce_columns(&action.apply(t)?, rho0, &signs))
            }
        })
        .collect::<Result<_>>()?;
    let (reduced_states, observables) = points
        .into_iter()
        .map(|(s, j)| (s, Observables::new(&s, j)))
        .unzip();
    Ok(EvolutionResult {
        method: solver.method(),
        times: times.to_vec(),
        reduced_states,
        observables,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParitySeries {
    pub values: Vec<f64>,
    /// `max_t |⟨J⟩(t) − ⟨J⟩(0)|`.
    pub max_drift: f64,
}

pub fn parity_expectation_series(result: &EvolutionResult) -> ParitySeries {
    let values: Vec<f64> = result.observables.iter().map(|o| o.parity_j).collect();
    let first = values.first().copied().unwrap_or(0.0);
    let max_drift = values.iter().map(|v| (v - first).abs()).fold(0.0, f64::max);
    ParitySeries { values, max_drift }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStep {
    pub cutoffs: Vec<usize>,
    /// Largest change of any row value relative to the previous cutoffs.
    pub max_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub initial_cutoffs: Vec<usize>,
    pub steps: Vec<ConvergenceStep>,
    pub converged: bool,
    pub target: f64,
}

/// Doubles every cutoff until no reported observable changes by more than
/// `target`, or `max_doublings` is reached.
pub fn truncation_convergence(
    params: &ModelParams,
    rho0: &QubitState,
    bath: &BathKind,
    times: &[f64],
    method: Method,
    target: f64,
    max_doublings: usize,
) -> Result<ConvergenceReport> {
    let base = reduced_dynamics(params, rho0, &bath.build(params)?, times, method)?;
    continue_convergence(params, &base, rho0, bath, target, max_doublings)
}

/// As [`truncation_convergence`], starting from an existing run at the
/// cutoffs of `params`. The time grid and method are taken from `base`.
pub fn continue_convergence(
    params: &ModelParams,
    base: &EvolutionResult,
    rho0: &QubitState,
    bath: &BathKind,
    target: f64,
    max_doublings: usize,
) -> Result<ConvergenceReport> {
    let mut current = params.clone();
    let mut previous = base.clone();
    let mut steps = Vec::new();
    let mut converged = false;
    for _ in 0..max_doublings {
        current = current.with_space(current.space().doubled())?;
        let next = reduced_dynamics(&current, rho0, &bath.build(&current)?, &base.times, base.method)?;
        let max_change = next.max_row_difference(&previous)?;
        steps.push(ConvergenceStep {
            cutoffs: current.space().cutoffs().to_vec(),
            max_change,
        });
        previous = next;
        if max_change < target {
            converged = true;
            break;
        }
    }
    Ok(ConvergenceReport {
        initial_cutoffs: params.space().cutoffs().to_vec(),
        steps,
        converged,
        target,
    })
}
