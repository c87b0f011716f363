//! Time-evolution operators built two independent ways.
//!
//! The oracle diagonalizes the full `H_SB` on `C² ⊗ F`. The closed form
//! uses the parity operator `P` as the Riccati solution and only needs the
//! two dressed blocks `H₊ + αP` and `H₋ − αP`:
//!
//! ```text
//! U(t) = ½ [[ U₊(t),    V₊(t) P ],
//!           [ V₋(t) P,  U₋(t)   ]]
//! U±(t) = e^{−i(H± + αP)t} + e^{−i(H± − αP)t}
//! V±(t) = e^{−i(H± + αP)t} − e^{−i(H± − αP)t}
//! ```
//!
//! With `β = 0`, `P H₋ P = H₊`, so the two remaining exponentials are parity
//! conjugates of the dressed ones: `e^{−i(H₊ − αP)t} = P e^{−i(H₋ − αP)t} P`
//! and `e^{−i(H₋ + αP)t} = P e^{−i(H₊ + αP)t} P`.

use std::fmt;

use crate::error::{Error, Result};
use crate::fock::parity_signs;
use crate::linalg::{identity, sign_conjugate, CMatrix, CVector, HermitianEigen, C64};
use crate::model::{assemble_block, assemble_total, ModelParams, TotalOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct Propagator {
    pub time: f64,
    pub matrix: TotalOperator,
    pub method: Method,
}

impl Propagator {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Pure state on `C² ⊗ F`.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalState(pub CVector);

impl TotalState {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// `|q⟩ ⊗ |b⟩`.
    pub fn product(qubit: &CVector, bath: &CVector) -> Self {
        Self(qubit.kronecker(bath))
    }
}

/// `|Ψ_t⟩ = U_t |Ψ⟩`.
pub fn propagate_state(u: &Propagator, psi: &TotalState) -> Result<TotalState> {
    if psi.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: psi.dim(),
        });
    }
    Ok(TotalState(&u.matrix.entries * &psi.0))
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("time must be finite, got {t}")))
    }
}

/// Eigendecompositions of `H₊ + αP` and `H₋ − αP`.
#[derive(Debug, Clone)]
pub struct DressedSpectrum {
    pub plus: HermitianEigen,
    pub minus: HermitianEigen,
}

impl DressedSpectrum {
    /// Sorted spectrum of `H₊ + αP`.
    pub fn eigenvalues_pp(&self) -> Vec<f64> {
        self.plus.sorted_values()
    }

    /// Sorted spectrum of `H₋ − αP`.
    pub fn eigenvalues_pm(&self) -> Vec<f64> {
        self.minus.sorted_values()
    }

    pub fn union_sorted(&self) -> Vec<f64> {
        let mut all = self.eigenvalues_pp();
        all.extend(self.eigenvalues_pm());
        all.sort_by(f64::total_cmp);
        all
    }
}

pub fn dressed_spectrum(params: &ModelParams) -> Result<DressedSpectrum> {
    if params.beta() != 0.0 {
        return Err(Error::ClosedFormRequiresZeroBeta(params.beta()));
    }
    let bh = assemble_block(params);
    let p = crate::fock::parity(params.space()) * C64::new(params.alpha(), 0.0);
    let plus = &bh.h_plus + &p;
    let minus = &bh.h_minus - &p;
    let (plus, minus) = rayon::join(|| HermitianEigen::new(&plus), || HermitianEigen::new(&minus));
    Ok(DressedSpectrum { plus, minus })
}

/// Closed-form propagator with the dressed spectrum cached across times.
#[derive(Debug, Clone)]
pub struct ClosedFormSolver {
    spectrum: DressedSpectrum,
    signs: Vec<f64>,
}

impl ClosedFormSolver {
    pub fn new(params: &ModelParams) -> Result<Self> {
        Ok(Self {
            spectrum: dressed_spectrum(params)?,
            signs: parity_signs(params.space()),
        })
    }

    pub fn spectrum(&self) -> &DressedSpectrum {
        &self.spectrum
    }

    pub fn propagator(&self, t: f64) -> Result<Propagator> {
        check_time(t)?;
        let e_pp = self.spectrum.plus.evolution(t);
        let e_mm = self.spectrum.minus.evolution(t);
        let e_pm = sign_conjugate(&e_mm, &self.signs);
        let e_mp = sign_conjugate(&e_pp, &self.signs);

        let half = C64::new(0.5, 0.0);
        let u_plus = (&e_pp + &e_pm) * half;
        let v_plus = self.times_parity((&e_pp - &e_pm) * half);
        let v_minus = self.times_parity((&e_mp - &e_mm) * half);
        let u_minus = (&e_mp + &e_mm) * half;
        Ok(Propagator {
            time: t,
            matrix: TotalOperator::from_blocks(&u_plus, &v_plus, &v_minus, &u_minus),
            method: Method::ClosedForm,
        })
    }

    fn times_parity(&self, mut m: CMatrix) -> CMatrix {
        for (j, mut col) in m.column_iter_mut().enumerate() {
            if self.signs[j] < 0.0 {
                col.neg_mut();
            }
        }
        m
    }
}

/// Brute-force `exp(−i H_SB t)` from the full Hermitian eigendecomposition.
#[derive(Debug, Clone)]
pub struct OracleSolver {
    eigen: HermitianEigen,
    block_dim: usize,
}

impl OracleSolver {
    pub fn new(params: &ModelParams) -> Self {
        let h = assemble_total(params);
        Self {
            eigen: HermitianEigen::new(&h.entries),
            block_dim: h.block_dim,
        }
    }

    pub fn spectrum(&self) -> Vec<f64> {
        self.eigen.sorted_values()
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }

    pub fn propagator(&self, t: f64) -> Result<Propagator> {
        check_time(t)?;
        Ok(Propagator {
            time: t,
            matrix: TotalOperator {
                entries: self.eigen.evolution(t),
                block_dim: self.block_dim,
            },
            method: Method::Oracle,
        })
    }
}

/// Multiplies row `r` of `m` by `signs[r]`, i.e. `P·m` for diagonal `P`.
fn signed_rows(m: &CMatrix, signs: &[f64]) -> CMatrix {
    let mut out = m.clone();
    for (r, mut row) in out.row_iter_mut().enumerate() {
        if signs[r] < 0.0 {
            row.neg_mut();
        }
    }
    out
}

/// `U(t)·X` for a fixed block of columns `X`, evaluated through the cached
/// eigendecompositions. Each time costs `O(N²m)` for `m` columns, where
/// forming `U(t)` costs `O(N³)`.
#[derive(Debug, Clone)]
pub struct PropagatorAction<'a> {
    solver: &'a Solver,
    coords: ActionCoords,
}

#[derive(Debug, Clone)]
enum ActionCoords {
    /// Eigen-coordinates of `X₀ + P X₁` (plus block) and `P X₀ − X₁`
    /// (minus block).
    ClosedForm { a: CMatrix, b: CMatrix },
    Oracle(CMatrix),
}

impl PropagatorAction<'_> {
    pub fn apply(&self, t: f64) -> Result<CMatrix> {
        check_time(t)?;
        match (self.solver, &self.coords) {
            (Solver::ClosedForm(s), ActionCoords::ClosedForm { a, b }) => {
                // U X = ½ [E₊a + P E₋b ; P E₊a − E₋b]
                let ea = s.spectrum.plus.evolve_coordinates(a, t);
                let eb = s.spectrum.minus.evolve_coordinates(b, t);
                let half = C64::new(0.5, 0.0);
                let top = (&ea + signed_rows(&eb, &s.signs)) * half;
                let bottom = (signed_rows(&ea, &s.signs) - &eb) * half;
                let n = s.signs.len();
                let mut out = CMatrix::zeros(2 * n, a.ncols());
                out.rows_mut(0, n).copy_from(&top);
                out.rows_mut(n, n).copy_from(&bottom);
                Ok(out)
            }
            (Solver::Oracle(s), ActionCoords::Oracle(y)) => Ok(s.eigen.evolve_coordinates(y, t)),
            _ => unreachable!("coordinates are built for the solver they borrow"),
        }
    }
}

/// Either propagator route behind one interface.
#[derive(Debug, Clone)]
pub enum Solver {
    ClosedForm(ClosedFormSolver),
    Oracle(OracleSolver),
}

impl Solver {
    pub fn new(params: &ModelParams, method: Method) -> Result<Self> {
        Ok(match method {
            Method::ClosedForm => Solver::ClosedForm(ClosedFormSolver::new(params)?),
            Method::Oracle => Solver::Oracle(OracleSolver::new(params)),
        })
    }

    pub fn method(&self) -> Method {
        match self {
            Solver::ClosedForm(_) => Method::ClosedForm,
            Solver::Oracle(_) => Method::Oracle,
        }
    }

    pub fn propagator(&self, t: f64) -> Result<Propagator> {
        match self {
            Solver::ClosedForm(s) => s.propagator(t),
            Solver::Oracle(s) => s.propagator(t),
        }
    }

    pub fn block_dim(&self) -> usize {
        match self {
            Solver::ClosedForm(s) => s.signs.len(),
            Solver::Oracle(s) => s.block_dim,
        }
    }

    /// Prepares `U(t)·x` for repeated evaluation; `x` has `2N` rows.
    pub fn action(&self, x: &CMatrix) -> Result<PropagatorAction<'_>> {
        let n = self.block_dim();
        if x.nrows() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                found: x.nrows(),
            });
        }
        let coords = match self {
            Solver::ClosedForm(s) => {
                let x0 = x.rows(0, n).into_owned();
                let x1 = x.rows(n, n).into_owned();
                let a = &x0 + signed_rows(&x1, &s.signs);
                let b = signed_rows(&x0, &s.signs) - &x1;
                ActionCoords::ClosedForm {
                    a: s.spectrum.plus.project(&a),
                    b: s.spectrum.minus.project(&b),
                }
            }
            Solver::Oracle(s) => ActionCoords::Oracle(s.eigen.project(x)),
        };
        Ok(PropagatorAction { solver: self, coords })
    }
}

pub fn oracle_propagator(params: &ModelParams, t: f64) -> Result<Propagator> {
    OracleSolver::new(params).propagator(t)
}

pub fn closed_form_propagator(params: &ModelParams, t: f64) -> Result<Propagator> {
    ClosedFormSolver::new(params)?.propagator(t)
}

/// Identity propagator, useful as a neutral element.
pub fn identity_propagator(params: &ModelParams, method: Method) -> Propagator {
    let n = params.block_dim();
    Propagator {
        time: 0.0,
        matrix: TotalOperator {
            entries: identity(2 * n),
            block_dim: n,
        },
        method,
    }
}
