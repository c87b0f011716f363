//! Bosonic operators on truncated single- and multi-mode Fock spaces.
//!
//! Mode `k` keeps the levels `0..d_k`. Multi-mode basis states `|n₀ n₁ …⟩`
//! are ordered lexicographically, with the last mode varying fastest:
//! `index = Σ_k n_k · stride_k`, `stride_k = Π_{j>k} d_j`.
//!
//! Diagonal constructions (number, parity, phase) are exact. Displacement
//! operators are matrix exponentials of the truncated generator, so they
//! carry truncation error only in the levels close to the cutoff.

use crate::error::{Error, Result};
use crate::linalg::{expm, CMatrix, C64, ZERO};

/// Dense operator on a (possibly multi-mode) truncated Fock space.
pub type BosonOperator = CMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FockSpace {
    cutoffs: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl FockSpace {
    pub fn new(cutoffs: Vec<usize>) -> Result<Self> {
        if cutoffs.is_empty() {
            return Err(Error::InvalidParams("at least one mode is required".into()));
        }
        if let Some((k, &d)) = cutoffs.iter().enumerate().find(|(_, &d)| d < 2) {
            return Err(Error::InvalidParams(format!(
                "cutoff of mode {k} is {d}; every cutoff must be at least 2"
            )));
        }
        let mut strides = vec![1usize; cutoffs.len()];
        for k in (0..cutoffs.len() - 1).rev() {
            strides[k] = strides[k + 1]
                .checked_mul(cutoffs[k + 1])
                .ok_or_else(|| Error::InvalidParams("Fock space dimension overflows".into()))?;
        }
        let dim = strides[0]
            .checked_mul(cutoffs[0])
            .ok_or_else(|| Error::InvalidParams("Fock space dimension overflows".into()))?;
        Ok(Self {
            cutoffs,
            strides,
            dim,
        })
    }

    pub fn single(cutoff: usize) -> Result<Self> {
        Self::new(vec![cutoff])
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn n_modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Same number of modes with every cutoff doubled.
    pub fn doubled(&self) -> Self {
        Self::new(self.cutoffs.iter().map(|d| d * 2).collect()).expect("doubling keeps cutoffs valid")
    }

    /// Occupation of `mode` in basis state `index`.
    pub fn level(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % self.cutoffs[mode]
    }

    pub fn levels(&self, index: usize) -> Vec<usize> {
        (0..self.n_modes()).map(|k| self.level(index, k)).collect()
    }

    pub fn index_of(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.n_modes() {
            return Err(Error::LengthMismatch {
                expected: self.n_modes(),
                found: levels.len(),
            });
        }
        levels
            .iter()
            .zip(&self.cutoffs)
            .zip(&self.strides)
            .try_fold(0, |acc, ((&n, &d), &s)| {
                if n < d {
                    Ok(acc + n * s)
                } else {
                    Err(Error::InvalidState(format!("level {n} exceeds cutoff {d}")))
                }
            })
    }

    /// Total excitation number `Σ_k n_k` of basis state `index`.
    pub fn total_level(&self, index: usize) -> usize {
        (0..self.n_modes()).map(|k| self.level(index, k)).sum()
    }

    /// Basis indices whose every occupation lies in the lower half of its
    /// mode (`n_k < d_k / 2`). Identities that hold only up to truncation are
    /// compared on this block.
    pub fn leading_block(&self) -> Vec<usize> {
        (0..self.dim)
            .filter(|&i| (0..self.n_modes()).all(|k| self.level(i, k) < self.cutoffs[k] / 2))
            .collect()
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.n_modes() {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange {
                mode,
                modes: self.n_modes(),
            })
        }
    }
}

/// Restricts `m` to the rows and columns in `indices`.
pub fn restrict(m: &CMatrix, indices: &[usize]) -> CMatrix {
    CMatrix::from_fn(indices.len(), indices.len(), |r, c| m[(indices[r], indices[c])])
}

/// `a_mode`: `a|n⟩ = √n |n−1⟩` on the mode factor, identity elsewhere.
pub fn annihilation(space: &FockSpace, mode: usize) -> Result<BosonOperator> {
    space.check_mode(mode)?;
    let stride = space.strides[mode];
    let mut m = CMatrix::zeros(space.dim, space.dim);
    for col in 0..space.dim {
        let n = space.level(col, mode);
        if n > 0 {
            m[(col - stride, col)] = C64::new((n as f64).sqrt(), 0.0);
        }
    }
    Ok(m)
}

pub fn creation(space: &FockSpace, mode: usize) -> Result<BosonOperator> {
    Ok(annihilation(space, mode)?.adjoint())
}

/// `a†a` on `mode`, built directly as a diagonal.
pub fn number(space: &FockSpace, mode: usize) -> Result<BosonOperator> {
    space.check_mode(mode)?;
    Ok(diagonal(space, |i| C64::new(space.level(i, mode) as f64, 0.0)))
}

/// `D_f = exp(f* a − f a†)` on one mode.
pub fn displacement(space: &FockSpace, mode: usize, f: C64) -> Result<BosonOperator> {
    space.check_mode(mode)?;
    let mut couplings = vec![ZERO; space.n_modes()];
    couplings[mode] = f;
    multimode_displacement(space, &couplings)
}

/// `exp(A − A†)` with `A = Σ_k f_k* a_k`.
pub fn multimode_displacement(space: &FockSpace, couplings: &[C64]) -> Result<BosonOperator> {
    if couplings.len() != space.n_modes() {
        return Err(Error::LengthMismatch {
            expected: space.n_modes(),
            found: couplings.len(),
        });
    }
    if couplings.iter().any(|f| !f.re.is_finite() || !f.im.is_finite()) {
        return Err(Error::InvalidParams("displacement amplitudes must be finite".into()));
    }
    let mut a_sum = CMatrix::zeros(space.dim, space.dim);
    for (k, f) in couplings.iter().enumerate() {
        if *f != ZERO {
            a_sum += annihilation(space, k)? * f.conj();
        }
    }
    let generator = &a_sum - a_sum.adjoint();
    Ok(expm(&generator))
}

/// Diagonal of the total parity `(−1)^{Σ_k n_k}`.
pub fn parity_signs(space: &FockSpace) -> Vec<f64> {
    (0..space.dim)
        .map(|i| if space.total_level(i).is_multiple_of(2) { 1.0 } else { -1.0 })
        .collect()
}

/// Total bosonic parity `P = exp(iπ Σ_k a_k†a_k)`.
pub fn parity(space: &FockSpace) -> BosonOperator {
    let signs = parity_signs(space);
    diagonal(space, |i| C64::new(signs[i], 0.0))
}

/// `P_φ = exp(iφ a†a)` on one mode. At `φ = π` the phases are set to exactly
/// `±1` so that `P_π` coincides with [`parity`] on a single mode.
pub fn phase_operator(space: &FockSpace, mode: usize, phi: f64) -> Result<BosonOperator> {
    space.check_mode(mode)?;
    if !phi.is_finite() {
        return Err(Error::InvalidParams("phase must be finite".into()));
    }
    Ok(diagonal(space, |i| {
        let n = space.level(i, mode);
        if phi == std::f64::consts::PI {
            C64::new(if n.is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0)
        } else {
            C64::from_polar(1.0, phi * n as f64)
        }
    }))
}

fn diagonal(space: &FockSpace, entry: impl Fn(usize) -> C64) -> CMatrix {
    let mut m = CMatrix::zeros(space.dim, space.dim);
    for i in 0..space.dim {
        m[(i, i)] = entry(i);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, unitarity_error};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rejects_small_cutoffs_and_empty_spaces() {
        assert!(matches!(FockSpace::new(vec![]), Err(Error::InvalidParams(_))));
        assert!(matches!(FockSpace::new(vec![3, 1]), Err(Error::InvalidParams(_))));
        assert_eq!(FockSpace::new(vec![2, 3, 4]).unwrap().dim(), 24);
    }

    #[test]
    fn lexicographic_index_arithmetic() {
        let s = FockSpace::new(vec![2, 3]).unwrap();
        assert_eq!(s.index_of(&[1, 2]).unwrap(), 5);
        assert_eq!(s.levels(4), vec![1, 1]);
        assert!(s.index_of(&[2, 0]).is_err());
        assert!(s.index_of(&[0]).is_err());
    }

    #[test]
    fn annihilation_d2_single_entry() {
        let s = FockSpace::single(2).unwrap();
        let a = annihilation(&s, 0).unwrap();
        let mut expected = CMatrix::zeros(2, 2);
        expected[(0, 1)] = c(1.0, 0.0);
        assert_eq!(a, expected);
    }

    #[test]
    fn annihilation_lowers_level_three() {
        let s = FockSpace::single(3).unwrap();
        let a = annihilation(&s, 0).unwrap();
        let ket2 = crate::linalg::CVector::from_vec(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let out = a * ket2;
        assert_eq!(out[1], c(2f64.sqrt(), 0.0));
        assert_eq!(out[0], c(0.0, 0.0));
        assert_eq!(out[2], c(0.0, 0.0));
    }

    #[test]
    fn truncated_commutator_d4() {
        let s = FockSpace::single(4).unwrap();
        let a = annihilation(&s, 0).unwrap();
        let ad = creation(&s, 0).unwrap();
        let comm = &a * &ad - &ad * &a;
        let expected = crate::linalg::from_real_diagonal(&[1.0, 1.0, 1.0, -3.0]);
        assert!((comm - expected).norm() < 1e-14);
    }

    #[test]
    fn mode_out_of_range_is_rejected() {
        let s = FockSpace::new(vec![3, 3]).unwrap();
        assert_eq!(
            annihilation(&s, 2).unwrap_err(),
            Error::ModeOutOfRange { mode: 2, modes: 2 }
        );
        assert!(number(&s, 5).is_err());
        assert!(displacement(&s, 2, c(0.1, 0.0)).is_err());
        assert!(phase_operator(&s, 2, 0.3).is_err());
    }

    #[test]
    fn number_operator_examples() {
        let s = FockSpace::single(3).unwrap();
        let n = number(&s, 0).unwrap();
        assert_eq!(n, crate::linalg::from_real_diagonal(&[0.0, 1.0, 2.0]));
        let a = annihilation(&s, 0).unwrap();
        assert!((a.adjoint() * a - &n).norm() < 1e-14);

        let s2 = FockSpace::new(vec![2, 2]).unwrap();
        assert_eq!(
            number(&s2, 1).unwrap(),
            crate::linalg::from_real_diagonal(&[0.0, 1.0, 0.0, 1.0])
        );
    }

    #[test]
    fn displacement_of_zero_is_exact_identity() {
        let s = FockSpace::new(vec![5, 4]).unwrap();
        assert_eq!(displacement(&s, 1, ZERO).unwrap(), identity(20));
        assert_eq!(multimode_displacement(&s, &[ZERO, ZERO]).unwrap(), identity(20));
    }

    #[test]
    fn displacement_rejects_non_finite_and_length_mismatch() {
        let s = FockSpace::new(vec![4, 4]).unwrap();
        assert!(displacement(&s, 0, c(f64::NAN, 0.0)).is_err());
        assert_eq!(
            multimode_displacement(&s, &[ZERO]).unwrap_err(),
            Error::LengthMismatch { expected: 2, found: 1 }
        );
    }

    #[test]
    fn displacement_inverse_and_unitarity() {
        let s = FockSpace::single(30).unwrap();
        let d = displacement(&s, 0, c(0.3, 0.0)).unwrap();
        let dm = displacement(&s, 0, c(-0.3, 0.0)).unwrap();
        assert!((&d * &dm - identity(30)).norm() < 1e-12);
        assert!(unitarity_error(&d) < 1e-12);
    }

    #[test]
    fn parity_examples() {
        let s = FockSpace::single(2).unwrap();
        assert_eq!(parity(&s), crate::linalg::from_real_diagonal(&[1.0, -1.0]));

        let s = FockSpace::new(vec![3, 4]).unwrap();
        let p = parity(&s);
        assert_eq!(&p * &p, identity(12));
        for mode in 0..2 {
            let a = annihilation(&s, mode).unwrap();
            assert_eq!(&p * &a * &p, -a);
        }
    }

    #[test]
    fn phase_operator_examples() {
        let s = FockSpace::single(6).unwrap();
        assert_eq!(phase_operator(&s, 0, 0.0).unwrap(), identity(6));
        assert_eq!(phase_operator(&s, 0, std::f64::consts::PI).unwrap(), parity(&s));
        assert!(phase_operator(&s, 0, f64::INFINITY).is_err());
    }

    #[test]
    fn leading_block_selects_lower_half_levels() {
        let s = FockSpace::new(vec![4, 6]).unwrap();
        let block = s.leading_block();
        assert_eq!(block.len(), 2 * 3);
        assert!(block.iter().all(|&i| s.level(i, 0) < 2 && s.level(i, 1) < 3));
    }
}
