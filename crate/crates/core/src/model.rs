//! Spin-boson Hamiltonian in tensor form and in 2×2 block-operator form.
//!
//! The total space is `C² ⊗ F`, with the qubit index outermost: basis index
//! `i · dim(F) + n`. Qubit state `|0⟩` is the `σ_z = +1` eigenstate, so the
//! top-left block is `H₊ = H_B + V + β` and the bottom-right block is
//! `H₋ = H_B − V − β`, with `H_B = Σ_k ω_k a_k†a_k` and
//! `V = Σ_k (g_k* a_k + g_k a_k†)`.

use crate::error::{Error, Result};
use crate::fock::{self, BosonOperator, FockSpace};
use crate::linalg::{identity, kron, max_spectrum_gap, CMatrix, HermitianEigen, Norm, C64, I, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub omega: f64,
    pub coupling: C64,
}

impl Mode {
    pub fn new(omega: f64, coupling: C64) -> Self {
        Self { omega, coupling }
    }

    /// `f = g / ω`.
    pub fn displacement(&self) -> C64 {
        self.coupling / self.omega
    }
}

/// Validated physical parameters together with the truncated bath space.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    alpha: f64,
    beta: f64,
    modes: Vec<Mode>,
    space: FockSpace,
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64, modes: Vec<Mode>, space: FockSpace) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidParams(format!("alpha must be finite and >= 0, got {alpha}")));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidParams(format!("beta must be finite and >= 0, got {beta}")));
        }
        if modes.is_empty() {
            return Err(Error::InvalidParams("at least one bath mode is required".into()));
        }
        if modes.len() != space.n_modes() {
            return Err(Error::LengthMismatch {
                expected: space.n_modes(),
                found: modes.len(),
            });
        }
        for (k, m) in modes.iter().enumerate() {
            if !m.omega.is_finite() || m.omega <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "omega of mode {k} must be finite and > 0, got {}",
                    m.omega
                )));
            }
            if !m.coupling.re.is_finite() || !m.coupling.im.is_finite() {
                return Err(Error::InvalidParams(format!("coupling of mode {k} is not finite")));
            }
        }
        Ok(Self {
            alpha,
            beta,
            modes,
            space,
        })
    }

    /// One mode with cutoff `d`.
    pub fn single_mode(alpha: f64, beta: f64, omega: f64, g: C64, d: usize) -> Result<Self> {
        Self::new(alpha, beta, vec![Mode::new(omega, g)], FockSpace::single(d)?)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn block_dim(&self) -> usize {
        self.space.dim()
    }

    pub fn with_space(&self, space: FockSpace) -> Result<Self> {
        Self::new(self.alpha, self.beta, self.modes.clone(), space)
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.alpha, beta, self.modes.clone(), self.space.clone())
    }

    /// `E = Σ_k |g_k|² / ω_k`.
    pub fn reference_shift(&self) -> f64 {
        self.modes.iter().map(|m| m.coupling.norm_sqr() / m.omega).sum()
    }

    pub fn bath_hamiltonian(&self) -> BosonOperator {
        let mut h = CMatrix::zeros(self.block_dim(), self.block_dim());
        for (k, m) in self.modes.iter().enumerate() {
            h += fock::number(&self.space, k).expect("mode index within space") * C64::new(m.omega, 0.0);
        }
        h
    }

    /// `V = Σ_k (g_k* a_k + g_k a_k†)`.
    pub fn interaction(&self) -> BosonOperator {
        let mut v = CMatrix::zeros(self.block_dim(), self.block_dim());
        for (k, m) in self.modes.iter().enumerate() {
            let a = fock::annihilation(&self.space, k).expect("mode index within space");
            v += &a * m.coupling.conj() + a.adjoint() * m.coupling;
        }
        v
    }
}

/// Operator on `C² ⊗ F` stored densely, with `block_dim = dim(F)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalOperator {
    pub entries: CMatrix,
    pub block_dim: usize,
}

impl TotalOperator {
    pub fn from_blocks(b00: &CMatrix, b01: &CMatrix, b10: &CMatrix, b11: &CMatrix) -> Self {
        let n = b00.nrows();
        let mut entries = CMatrix::zeros(2 * n, 2 * n);
        entries.view_mut((0, 0), (n, n)).copy_from(b00);
        entries.view_mut((0, n), (n, n)).copy_from(b01);
        entries.view_mut((n, 0), (n, n)).copy_from(b10);
        entries.view_mut((n, n), (n, n)).copy_from(b11);
        Self { entries, block_dim: n }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Block `(i, j)` with `i, j ∈ {0, 1}`.
    pub fn block(&self, i: usize, j: usize) -> CMatrix {
        let n = self.block_dim;
        self.entries.view((i * n, j * n), (n, n)).into_owned()
    }
}

/// `[[H₊, α], [α, H₋]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockHamiltonian {
    pub h_plus: BosonOperator,
    pub h_minus: BosonOperator,
    pub alpha: f64,
}

impl BlockHamiltonian {
    pub fn block_dim(&self) -> usize {
        self.h_plus.nrows()
    }

    pub fn to_total(&self) -> TotalOperator {
        let n = self.block_dim();
        let coupling = identity(n) * C64::new(self.alpha, 0.0);
        TotalOperator::from_blocks(&self.h_plus, &coupling, &coupling, &self.h_minus)
    }
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn assemble_block(params: &ModelParams) -> BlockHamiltonian {
    let h_b = params.bath_hamiltonian();
    let v = params.interaction();
    let shift = identity(params.block_dim()) * C64::new(params.beta, 0.0);
    BlockHamiltonian {
        h_plus: &h_b + &v + &shift,
        h_minus: &h_b - &v - &shift,
        alpha: params.alpha,
    }
}

/// `(βσ_z + ασ_x) ⊗ I + I ⊗ H_B + σ_z ⊗ V`, built from Kronecker products.
pub fn assemble_total(params: &ModelParams) -> TotalOperator {
    let n = params.block_dim();
    let h_s = sigma_z() * C64::new(params.beta, 0.0) + sigma_x() * C64::new(params.alpha, 0.0);
    let entries = kron(&h_s, &identity(n))
        + kron(&identity(2), &params.bath_hamiltonian())
        + kron(&sigma_z(), &params.interaction());
    TotalOperator { entries, block_dim: n }
}

/// `J = σ_x ⊗ P`.
pub fn total_parity(space: &FockSpace) -> TotalOperator {
    TotalOperator {
        entries: kron(&sigma_x(), &fock::parity(space)),
        block_dim: space.dim(),
    }
}

/// `R = αX² + X H₊ − H₋ X − α`.
pub fn riccati_operator(x: &BosonOperator, bh: &BlockHamiltonian) -> Result<CMatrix> {
    let n = bh.block_dim();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if x.nrows() != n { x.nrows() } else { x.ncols() },
        });
    }
    let alpha = C64::new(bh.alpha, 0.0);
    Ok(x * x * alpha + x * &bh.h_plus - &bh.h_minus * x - identity(n) * alpha)
}

/// `‖αX² + X H₊ − H₋ X − α‖` in the chosen norm.
pub fn riccati_residual(x: &BosonOperator, bh: &BlockHamiltonian, norm: Norm) -> Result<f64> {
    Ok(norm.of(&riccati_operator(x, bh)?))
}

#[derive(Debug, Clone)]
pub struct SimilarityTransform {
    /// `S⁻¹ H S`.
    pub diagonalized: TotalOperator,
    /// `S = [[1, −X†], [X, 1]]`.
    pub s: TotalOperator,
    pub s_inverse: TotalOperator,
}

/// Block-diagonalizes `H` with the Riccati solution `X`.
///
/// `tolerance` is relative: the residual must satisfy
/// `‖R‖_F ≤ tolerance · max(1, ‖H₊‖_F)`.
pub fn similarity_transform(
    bh: &BlockHamiltonian,
    x: &BosonOperator,
    tolerance: f64,
) -> Result<SimilarityTransform> {
    let residual = riccati_residual(x, bh, Norm::Frobenius)?;
    let bound = tolerance * bh.h_plus.norm().max(1.0);
    if residual > bound {
        return Err(Error::NotRiccatiSolution {
            residual,
            tolerance: bound,
        });
    }
    let n = bh.block_dim();
    let one = identity(n);
    let s = TotalOperator::from_blocks(&one, &(-x.adjoint()), x, &one);
    let s_inverse = s
        .entries
        .clone()
        .lu()
        .solve(&identity(2 * n))
        .ok_or(Error::SingularTransform)?;
    let check = (&s.entries * &s_inverse - identity(2 * n)).norm();
    if !check.is_finite() || check > 1e-8 * (2 * n) as f64 {
        return Err(Error::SingularTransform);
    }
    let h = bh.to_total();
    let diagonalized = TotalOperator {
        entries: &s_inverse * &h.entries * &s.entries,
        block_dim: n,
    };
    Ok(SimilarityTransform {
        diagonalized,
        s,
        s_inverse: TotalOperator {
            entries: s_inverse,
            block_dim: n,
        },
    })
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `‖[σ_x ⊗ P, H_SB]‖`.
pub fn parity_constant_of_motion(params: &ModelParams, norm: Norm) -> f64 {
    let h = assemble_total(params);
    let j = total_parity(params.space());
    norm.of(&commutator(&j.entries, &h.entries))
}

#[derive(Debug, Clone)]
pub struct SpectralComparison {
    pub spectrum_plus: Vec<f64>,
    pub spectrum_minus: Vec<f64>,
    pub max_gap: f64,
    pub matched: bool,
}

/// Compares the sorted spectra of `H₊` and `H₋`. They agree when `β = 0`
/// (unitary equivalence through `P`) and are rigidly shifted by `2β`
/// otherwise. `tolerance` is relative to `max(1, max|λ|)`.
pub fn spectral_obstruction_check(params: &ModelParams, tolerance: f64) -> SpectralComparison {
    let bh = assemble_block(params);
    let (plus, minus) = rayon::join(
        || HermitianEigen::new(&bh.h_plus).sorted_values(),
        || HermitianEigen::new(&bh.h_minus).sorted_values(),
    );
    let scale = plus
        .iter()
        .chain(&minus)
        .fold(1.0f64, |acc, l| acc.max(l.abs()));
    let max_gap = max_spectrum_gap(&plus, &minus);
    SpectralComparison {
        matched: max_gap <= tolerance * scale,
        spectrum_plus: plus,
        spectrum_minus: minus,
        max_gap,
    }
}

/// Shifts both diagonal blocks by `E = Σ_k |g_k|²/ω_k`.
pub fn rescale_reference(bh: &BlockHamiltonian, params: &ModelParams) -> Result<BlockHamiltonian> {
    if params.modes().iter().any(|m| m.omega <= 0.0) {
        return Err(Error::InvalidParams("reference shift needs every omega > 0".into()));
    }
    if bh.block_dim() != params.block_dim() {
        return Err(Error::DimensionMismatch {
            expected: params.block_dim(),
            found: bh.block_dim(),
        });
    }
    let shift = identity(bh.block_dim()) * C64::new(params.reference_shift(), 0.0);
    Ok(BlockHamiltonian {
        h_plus: &bh.h_plus + &shift,
        h_minus: &bh.h_minus + &shift,
        alpha: bh.alpha,
    })
}
