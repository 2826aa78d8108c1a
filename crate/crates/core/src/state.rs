//! Gaussian states at the level of first and second moments.

use crate::error::{Error, Result};
use crate::hermitian::{psd_check, HermitianPair};
use crate::linalg::{
    block2x2, diagonal, ensure_finite, ensure_symmetric, inverse, max_abs, Matrix, Vector,
};
use crate::symplectic::standard_form;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    pub modes: usize,
    pub covariance: Matrix,
    pub mean: Vector,
}

impl GaussianState {
    /// Builds a state with zero mean. Validity (`gamma >= i sigma`) is not
    /// enforced here; see [`validate_state`].
    pub fn new(covariance: Matrix) -> Result<Self> {
        let modes = covariance_modes(&covariance)?;
        Ok(Self {
            modes,
            covariance,
            mean: Vector::zeros(2 * modes),
        })
    }

    pub fn with_mean(covariance: Matrix, mean: Vector) -> Result<Self> {
        let mut state = Self::new(covariance)?;
        if mean.len() != 2 * state.modes {
            return Err(Error::DimensionMismatch {
                context: "state mean",
                expected: (2 * state.modes).to_string(),
                found: mean.len().to_string(),
            });
        }
        if !mean.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        state.mean = mean;
        Ok(state)
    }

    pub fn vacuum(modes: usize) -> Result<Self> {
        thermal_state(&vec![0.0; modes])
    }
}

fn covariance_modes(gamma: &Matrix) -> Result<usize> {
    ensure_finite(gamma)?;
    if !gamma.is_square() || !gamma.nrows().is_multiple_of(2) || gamma.nrows() == 0 {
        return Err(Error::DimensionMismatch {
            context: "covariance matrix",
            expected: "nonzero even square dimension".into(),
            found: format!("{}x{}", gamma.nrows(), gamma.ncols()),
        });
    }
    ensure_symmetric(gamma, "covariance matrix")?;
    Ok(gamma.nrows() / 2)
}

/// The uncertainty relation `gamma - i sigma >= 0`, with its smallest
/// eigenvalue as witness.
pub fn validate_state(gamma: &Matrix, tol: f64) -> Result<(bool, f64)> {
    let modes = covariance_modes(gamma)?;
    let pair = HermitianPair::new(gamma.clone(), -standard_form(modes))?;
    Ok(psd_check(&pair, tol))
}

/// `|| gamma + sigma gamma^{-1} sigma ||_max / || gamma ||_max` and `det gamma`.
pub fn purity_witness(gamma: &Matrix) -> Result<(f64, f64)> {
    let modes = covariance_modes(gamma)?;
    let sigma = standard_form(modes);
    let inv = inverse(gamma, "covariance matrix")?;
    let residual = max_abs(&(gamma + &sigma * inv * &sigma)) / max_abs(gamma);
    Ok((residual, gamma.determinant()))
}

pub fn is_pure(gamma: &Matrix, tol: f64) -> Result<bool> {
    let (residual, _) = purity_witness(gamma)?;
    Ok(residual <= tol)
}

pub fn thermal_state(occupations: &[f64]) -> Result<GaussianState> {
    if occupations.is_empty() {
        return Err(Error::ZeroModes);
    }
    if let Some(&bad) = occupations.iter().find(|n| !(**n >= 0.0) || !n.is_finite()) {
        return Err(Error::NegativeOccupation(bad));
    }
    let mut diag: Vec<f64> = occupations.iter().map(|n| 2.0 * n + 1.0).collect();
    diag.extend_from_within(..);
    GaussianState::new(diagonal(&diag))
}

/// Two-mode covariance in standard form: `[[x, z-], [z-, y]]` on `(Q1, Q2)`
/// and `[[x, z+], [z+, y]]` on `(P1, P2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoModeStandardForm {
    pub x: f64,
    pub y: f64,
    pub z_minus: f64,
    pub z_plus: f64,
}

impl TwoModeStandardForm {
    pub fn symmetric(x: f64, z_plus: f64) -> Self {
        Self {
            x,
            y: x,
            z_minus: 0.0,
            z_plus,
        }
    }

    pub fn check(&self) -> Result<()> {
        let Self {
            x,
            y,
            z_minus: zm,
            z_plus: zp,
        } = *self;
        if ![x, y, zm, zp].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let slack = 1e-12 * (1.0 + x.abs() + y.abs()).powi(4);
        let trace = x + y;
        if trace < 0.0 {
            return Err(Error::StandardForm {
                inequality: "x + y >= 0",
                value: trace,
            });
        }
        let minor = x * y - zm * zm - 1.0;
        if minor < -slack {
            return Err(Error::StandardForm {
                inequality: "x y - z-^2 >= 1",
                value: minor + 1.0,
            });
        }
        let full = x * x * y * y - y * y - x * x + (zm * zp - 1.0).powi(2)
            - x * y * (zm * zm + zp * zp);
        if full < -slack {
            return Err(Error::StandardForm {
                inequality: "x^2 y^2 - y^2 - x^2 + (z- z+ - 1)^2 - x y (z-^2 + z+^2) >= 0",
                value: full,
            });
        }
        Ok(())
    }

    pub fn covariance(&self) -> Matrix {
        let q_block = Matrix::from_row_slice(2, 2, &[self.x, self.z_minus, self.z_minus, self.y]);
        let p_block = Matrix::from_row_slice(2, 2, &[self.x, self.z_plus, self.z_plus, self.y]);
        let zero = Matrix::zeros(2, 2);
        block2x2(&q_block, &zero, &zero, &p_block)
    }
}

pub fn two_mode_standard(form: &TwoModeStandardForm) -> Result<GaussianState> {
    form.check()?;
    GaussianState::new(form.covariance())
}

/// `V = R^{-T} ⊕ R` with `R = [[c + h s, -q s], [-q s, c - h s]]`,
/// `c = cosh 2r`, `s = sinh 2r`, `h = cos 2 phi`, `q = sin 2 phi`.
pub fn two_mode_squeezer(r: f64, phi: f64) -> Matrix {
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let (h, q) = ((2.0 * phi).cos(), (2.0 * phi).sin());
    let scale = Matrix::from_row_slice(2, 2, &[c + h * s, -q * s, -q * s, c - h * s]);
    // det R = c^2 - s^2 = 1, so the inverse transpose is explicit.
    let inv_t = Matrix::from_row_slice(2, 2, &[c - h * s, q * s, q * s, c + h * s]);
    let zero = Matrix::zeros(2, 2);
    block2x2(&inv_t, &zero, &zero, &scale)
}
