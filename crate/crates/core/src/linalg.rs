//! Dense complex linear-algebra helpers shared by the operator, model and
//! propagator modules.

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Matrix norm used for residuals and comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Norm {
    #[default]
    Frobenius,
    /// Largest singular value.
    Spectral,
}

impl Norm {
    pub fn of(self, m: &CMatrix) -> f64 {
        match self {
            Norm::Frobenius => m.norm(),
            Norm::Spectral => spectral_norm(m),
        }
    }
}

/// Largest singular value. Non-finite input gives NaN.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    match to_faer(m).singular_values() {
        Ok(values) => values.into_iter().fold(0.0, f64::max),
        Err(_) => f64::NAN,
    }
}

fn to_faer(m: &CMatrix) -> Mat<faer::c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |r, c| {
        let z = m[(r, c)];
        faer::c64::new(z.re, z.im)
    })
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn from_real_diagonal(diag: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        diag.len(),
        diag.iter().map(|&d| C64::new(d, 0.0)),
    ))
}

/// `‖M − M†‖_F`.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// `‖M M† − I‖_F`.
pub fn unitarity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    (m * m.adjoint() - identity(n)).norm()
}

/// `D M D` for a diagonal sign pattern `D = diag(signs)`. Only flips signs,
/// so it is exact in floating point.
pub fn sign_conjugate(m: &CMatrix, signs: &[f64]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)] * (signs[r] * signs[c]))
}

/// Matrix exponential by Taylor series with scaling and squaring.
///
/// Every step is a polynomial in `m` evaluated with a norm-dependent (but
/// sign-independent) schedule, so for any exact sign pattern `D`,
/// `expm(D m D) == D expm(m) D` bit for bit.
pub fn expm(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let norm = m.norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m * C64::new(0.5f64.powi(squarings), 0.0);

    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=40 {
        term = &term * &scaled / C64::new(k as f64, 0.0);
        result += &term;
        if term.norm() <= f64::EPSILON * 0.5 * result.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    /// Columns are the orthonormal eigenvectors, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// The input is symmetrized as `(M + M†)/2` before solving.
    pub fn try_new(m: &CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParams("eigendecomposition of a non-finite matrix".into()));
        }
        let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = to_faer(&sym)
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::InvalidParams(format!("Hermitian eigensolver did not converge: {e:?}")))?;
        let (s, u) = (eig.S(), eig.U());
        let n = m.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
        let values = DVector::from_iterator(n, order.iter().map(|&i| s[i].re));
        let vectors = CMatrix::from_fn(n, n, |r, c| {
            let z = u[(r, order[c])];
            C64::new(z.re, z.im)
        });
        Ok(Self { values, vectors })
    }

    /// As [`try_new`](Self::try_new) for input known to be square and
    /// finite. Panics otherwise.
    pub fn new(m: &CMatrix) -> Self {
        Self::try_new(m).expect("Hermitian eigendecomposition of a square finite matrix")
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn sorted_values(&self) -> Vec<f64> {
        self.values.iter().copied().collect()
    }

    /// `exp(−i M t) = V e^{−iΛt} V†`. Degenerate eigenvalues need no special
    /// handling: the result does not depend on the basis chosen inside an
    /// eigenspace.
    pub fn evolution(&self, t: f64) -> CMatrix {
        self.apply_function(|lambda| C64::from_polar(1.0, -lambda * t))
    }

    /// `V† X`: coordinates of the columns of `X` in the eigenbasis.
    pub fn project(&self, x: &CMatrix) -> CMatrix {
        self.vectors.adjoint() * x
    }

    /// `V e^{−iΛt} Y` for eigenbasis coordinates `Y`, so that
    /// `evolve_coordinates(&project(x), t) = evolution(t) · x`.
    pub fn evolve_coordinates(&self, y: &CMatrix, t: f64) -> CMatrix {
        let mut scaled = y.clone();
        for (r, mut row) in scaled.row_iter_mut().enumerate() {
            row *= C64::from_polar(1.0, -self.values[r] * t);
        }
        &self.vectors * scaled
    }

    /// `f(M) = V f(Λ) V†` for a scalar function of the eigenvalues.
    pub fn apply_function(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.values[j]);
        }
        scaled * self.vectors.adjoint()
    }
}

/// Largest elementwise gap between two sorted spectra; `∞` when the lengths
/// differ.
pub fn max_spectrum_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
