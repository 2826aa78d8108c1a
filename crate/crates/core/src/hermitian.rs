//! Hermitian matrices `re + i im` handled through their real embedding.

use crate::config::tolerances;
use crate::error::{Error, Result};
use crate::linalg::{block2x2, max_abs, sym_eigen, Matrix};

/// A Hermitian matrix stored as symmetric real part and antisymmetric
/// imaginary part.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianPair {
    pub re: Matrix,
    pub im: Matrix,
}

impl HermitianPair {
    pub fn new(re: Matrix, im: Matrix) -> Result<Self> {
        if !re.is_square() || re.shape() != im.shape() {
            return Err(Error::DimensionMismatch {
                context: "hermitian pair",
                expected: format!("square {}x{} parts", re.nrows(), re.nrows()),
                found: format!(
                    "re {}x{}, im {}x{}",
                    re.nrows(),
                    re.ncols(),
                    im.nrows(),
                    im.ncols()
                ),
            });
        }
        Ok(Self { re, im })
    }

    pub fn dim(&self) -> usize {
        self.re.nrows()
    }

    pub fn neg(&self) -> Self {
        Self {
            re: -&self.re,
            im: -&self.im,
        }
    }

    /// Complex conjugate `re - i im`; it has the same spectrum.
    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// The real symmetric matrix `[[re, -im], [im, re]]`, whose spectrum is
    /// that of `re + i im` with every eigenvalue doubled.
    pub fn real_embedding(&self) -> Matrix {
        block2x2(&self.re, &(-&self.im), &self.im, &self.re)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let (doubled, _) = sym_eigen(&self.real_embedding());
        doubled.iter().step_by(2).copied().collect()
    }

    pub fn scale(&self) -> f64 {
        max_abs(&self.re).max(1.0)
    }
}

/// Positivity witness: `(is_psd, smallest eigenvalue)`.
pub fn psd_check(h: &HermitianPair, tol: f64) -> (bool, f64) {
    let min_eig = h.eigenvalues().first().copied().unwrap_or(0.0);
    (min_eig >= -tol * h.scale(), min_eig)
}

pub fn psd_check_default(h: &HermitianPair) -> (bool, f64) {
    psd_check(h, tolerances().psd)
}
