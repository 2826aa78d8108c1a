//! Weak degradability and anti-degradability through the W matrix
//! `W = Ytilde - Xtilde^T X^{-T} (Y + i sigma) X^{-1} Xtilde + i sigma_E`.

use crate::channel::GaussianChannel;
use crate::dilation::UnitaryDilation;
use crate::error::{Error, Result};
use crate::hermitian::HermitianPair;
use crate::linalg::{block, ensure_square, identity, inverse, max_abs, symmetrize, Matrix};
use crate::symplectic::{skew_normal_form, standard_form};
use crate::linalg::diagonal;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerdictKind {
    /// Weakly degradable.
    WD,
    /// Anti-degradable.
    AD,
    /// Both (`W` vanishes within tolerance).
    Both,
    Neither,
}

impl VerdictKind {
    pub fn from_flags(weakly_degradable: bool, anti_degradable: bool) -> Self {
        match (weakly_degradable, anti_degradable) {
            (true, true) => VerdictKind::Both,
            (true, false) => VerdictKind::WD,
            (false, true) => VerdictKind::AD,
            (false, false) => VerdictKind::Neither,
        }
    }

    pub fn is_weakly_degradable(self) -> bool {
        matches!(self, VerdictKind::WD | VerdictKind::Both)
    }

    pub fn is_anti_degradable(self) -> bool {
        matches!(self, VerdictKind::AD | VerdictKind::Both)
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VerdictKind::WD => "WD",
            VerdictKind::AD => "AD",
            VerdictKind::Both => "Both",
            VerdictKind::Neither => "Neither",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegradabilityVerdict {
    pub kind: VerdictKind,
    pub w_min_eig: f64,
    pub w_max_eig: f64,
    /// Full spectrum of `W`, ascending.
    pub spectrum: Vec<f64>,
}

/// Environment-output channel `Xtilde = s3^T`, `Ytilde = s4 gamma_E s4^T`,
/// expressed in coordinates where the environment form is standard.
pub fn weak_complement(d: &UnitaryDilation) -> Result<GaussianChannel> {
    let s3 = d.env_from_sys();
    let s4 = d.env_from_env();
    let transfer = s3.transpose();
    let noise = symmetrize(&(&s4 * &d.env_covariance * s4.transpose()));
    let to_standard = env_standardizer(&d.env_form)?;
    GaussianChannel::centered(
        transfer * to_standard.transpose(),
        symmetrize(&(&to_standard * noise * to_standard.transpose())),
    )
}

/// `L` with `L sigma_E L^T = sigma_2l`: identity for a standard form, a signed
/// permutation for direct sums of standard forms.
fn env_standardizer(env_form: &Matrix) -> Result<Matrix> {
    let dim = ensure_square(env_form, "environment form")?;
    if *env_form == standard_form(dim / 2) {
        return Ok(identity(dim));
    }
    let normal = skew_normal_form(env_form)?;
    if normal.rank != dim {
        return Err(Error::Singular {
            what: "environment symplectic form",
        });
    }
    let inv_root: Vec<f64> = normal
        .values
        .iter()
        .chain(normal.values.iter())
        .map(|v| 1.0 / v.sqrt())
        .collect();
    Ok(diagonal(&inv_root) * normal.orthogonal)
}

/// `X^{-1} Xtilde`, the transfer matrix of the connecting map.
fn connecting_transfer(ch: &GaussianChannel, comp: &GaussianChannel) -> Result<Matrix> {
    let n = ch.same_modes()?;
    if comp.modes_in != n {
        return Err(Error::DimensionMismatch {
            context: "weak complement input",
            expected: format!("{n} modes"),
            found: format!("{} modes", comp.modes_in),
        });
    }
    let x_inv = inverse(&ch.transfer, "channel transfer matrix X")?;
    Ok(x_inv * &comp.transfer)
}

/// The W matrix as a Hermitian pair. Only `X` must be invertible.
pub fn wd_matrix(ch: &GaussianChannel, comp: &GaussianChannel) -> Result<HermitianPair> {
    let c = connecting_transfer(ch, comp)?;
    let sigma = standard_form(ch.modes_out);
    let sigma_env = standard_form(comp.modes_out);
    let re = symmetrize(&(&comp.noise - c.transpose() * &ch.noise * &c));
    let im = &sigma_env - c.transpose() * sigma * &c;
    let im = (&im - im.transpose()) * 0.5;
    HermitianPair::new(re, im)
}

/// `Y - X^T Xtilde^{-T} (Ytilde + i sigma_E) Xtilde^{-1} X + i sigma`, whose
/// negativity is anti-degradability. Needs a square invertible `Xtilde`.
pub fn antidegradability_matrix(
    ch: &GaussianChannel,
    comp: &GaussianChannel,
) -> Result<HermitianPair> {
    let n = ch.same_modes()?;
    if comp.modes_out != n || comp.modes_in != n {
        return Err(Error::Singular {
            what: "weak complement transfer matrix (not square)",
        });
    }
    let d = inverse(&comp.transfer, "weak complement transfer matrix")? * &ch.transfer;
    let sigma = standard_form(n);
    let re = symmetrize(&(&ch.noise - d.transpose() * &comp.noise * &d));
    let im = &sigma - d.transpose() * &sigma * &d;
    let im = (&im - im.transpose()) * 0.5;
    HermitianPair::new(re, im)
}

/// `D = Xtilde^{-1} X`, with `antidegradability_matrix = -D^T W D`.
pub fn duality_congruence(ch: &GaussianChannel, comp: &GaussianChannel) -> Result<Matrix> {
    Ok(inverse(&comp.transfer, "weak complement transfer matrix")? * &ch.transfer)
}

/// Verdict from a W matrix. Anti-degradability is only certified when the
/// weak complement's transfer matrix is invertible.
pub fn verdict_from_matrix(w: &HermitianPair, ad_certifiable: bool, tol: f64) -> DegradabilityVerdict {
    let spectrum = w.eigenvalues();
    let w_min_eig = spectrum.first().copied().unwrap_or(0.0);
    let w_max_eig = spectrum.last().copied().unwrap_or(0.0);
    let slack = tol * w.scale();
    let kind = VerdictKind::from_flags(w_min_eig >= -slack, ad_certifiable && w_max_eig <= slack);
    DegradabilityVerdict {
        kind,
        w_min_eig,
        w_max_eig,
        spectrum,
    }
}

pub fn classify(
    ch: &GaussianChannel,
    comp: &GaussianChannel,
    tol: f64,
) -> Result<DegradabilityVerdict> {
    let w = wd_matrix(ch, comp)?;
    let square = comp.modes_in == comp.modes_out;
    let ad_certifiable = square && inverse(&comp.transfer, "weak complement").is_ok();
    Ok(verdict_from_matrix(&w, ad_certifiable, tol))
}

/// The map `T` with `T ∘ Phi = Phi_tilde`: `X_T = X^{-1} Xtilde`,
/// `Y_T = Ytilde - X_T^T Y X_T`. It is CP exactly when `W >= 0`.
pub fn connecting_map(ch: &GaussianChannel, comp: &GaussianChannel) -> Result<GaussianChannel> {
    let c = connecting_transfer(ch, comp)?;
    let noise = symmetrize(&(&comp.noise - c.transpose() * &ch.noise * &c));
    GaussianChannel::centered(c, noise)
}

/// An `n x n` complex block stored as real and imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBlock {
    pub re: Matrix,
    pub im: Matrix,
}

/// The blocks of `W = [[W1, W2], [W2^dagger, W3]]` for a canonical channel,
/// written in terms of the blocks `Y1 = Y_QQ`, `Y2 = Y_QP`, `Y3 = Y_PP`:
///
/// * `W1 = (1 - J^{-T})^{-1} Y1 (1 - J^{-1})^{-1} - Y1`
/// * `W2 = i (J^{-T} - 2) - Y2 (J^{-T} - 1) - (1 - J^{-T})^{-1} Y2`
/// * `W3 = Y3 - (J^{-1} - 1) Y3 (J^{-T} - 1)`
///
/// This sign of the imaginary part gives the complex conjugate of the matrix
/// from [`wd_matrix`]; both have the same spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurBlocks {
    pub w1: Matrix,
    pub w2: ComplexBlock,
    pub w3: Matrix,
}

impl SchurBlocks {
    pub fn assemble(&self) -> HermitianPair {
        let n = self.w1.nrows();
        let zero = Matrix::zeros(n, n);
        HermitianPair {
            re: crate::linalg::block2x2(&self.w1, &self.w2.re, &self.w2.re.transpose(), &self.w3),
            im: crate::linalg::block2x2(&zero, &self.w2.im, &(-self.w2.im.transpose()), &zero),
        }
    }

    /// `W3 - W2^dagger W1^{-1} W2`, or `None` when `W1` is singular.
    pub fn complement(&self) -> Option<HermitianPair> {
        let w1_inv = inverse(&self.w1, "W1").ok()?;
        let (r, i) = (&self.w2.re, &self.w2.im);
        let re = &self.w3 - r.transpose() * &w1_inv * r - i.transpose() * &w1_inv * i;
        let im = -(r.transpose() * &w1_inv * i - i.transpose() * &w1_inv * r);
        Some(HermitianPair {
            re: symmetrize(&re),
            im: (&im - im.transpose()) * 0.5,
        })
    }
}

pub fn schur_blocks(j: &Matrix, noise: &Matrix) -> Result<SchurBlocks> {
    let n = ensure_square(j, "J")?;
    crate::linalg::ensure_shape(noise, 2 * n, 2 * n, "canonical noise matrix")?;
    // Validates J the same way the canonical dilation does.
    crate::dilation::canonical_dilation_s(j)?;
    let one = identity(n);
    let j_inv = inverse(j, "J")?;
    let j_inv_t = j_inv.transpose();
    let y1 = block(noise, 0, 0, n, n);
    let y2 = block(noise, 0, n, n, n);
    let y3 = block(noise, n, n, n, n);
    let left = inverse(&(&one - &j_inv_t), "1 - J^{-T}")?;
    let w1 = symmetrize(&(&left * &y1 * left.transpose() - &y1));
    let w2 = ComplexBlock {
        re: -(&y2 * (&j_inv_t - &one)) - &left * &y2,
        im: &j_inv_t - &one * 2.0,
    };
    let w3 = symmetrize(&(&y3 - (&j_inv - &one) * &y3 * (&j_inv_t - &one)));
    Ok(SchurBlocks { w1, w2, w3 })
}

/// Verdict from the Schur-complement test, falling back to the assembled
/// matrix when `W1` is numerically singular.
pub fn schur_verdict(blocks: &SchurBlocks, tol: f64) -> VerdictKind {
    let full = blocks.assemble();
    let slack = tol * full.scale();
    let (w1_eig, _) = crate::linalg::sym_eigen(&blocks.w1);
    let w1_min = w1_eig.first().copied().unwrap_or(0.0);
    let w1_max = w1_eig.last().copied().unwrap_or(0.0);
    let definite = w1_min > slack || w1_max < -slack;
    match blocks.complement() {
        Some(complement) if definite => {
            let eig = complement.eigenvalues();
            let c_min = eig.first().copied().unwrap_or(0.0);
            let c_max = eig.last().copied().unwrap_or(0.0);
            let c_slack = tol * complement.scale().max(full.scale());
            VerdictKind::from_flags(
                w1_min > 0.0 && c_min >= -c_slack,
                w1_max < 0.0 && c_max <= c_slack,
            )
        }
        _ => verdict_from_matrix(&full, true, tol).kind,
    }
}

/// Largest entry of `X`, used by callers to scale comparisons.
pub fn transfer_scale(ch: &GaussianChannel) -> f64 {
    max_abs(&ch.transfer).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::{canonical_dilation, dilate_case_i, dilate_ideal_like};
    use crate::linalg::diagonal;
    use approx::assert_relative_eq;

    fn beam_splitter(eta: f64) -> (GaussianChannel, GaussianChannel) {
        let ch = GaussianChannel::thermal_gain(1, eta, 0.0).unwrap();
        let d = dilate_case_i(&ch).unwrap();
        let comp = weak_complement(&d).unwrap();
        (ch, comp)
    }

    #[test]
    fn beam_splitter_complement_is_attenuator() {
        let eta: f64 = 0.7;
        let (_, comp) = beam_splitter(eta);
        let mut gram = comp.transfer.transpose() * &comp.transfer;
        gram /= 1.0 - eta;
        assert_relative_eq!(gram, identity(2), epsilon = 1e-12);
        assert_relative_eq!(comp.noise, identity(2) * eta, epsilon = 1e-12);
        assert!(comp.validate_cp(1e-9).0);
    }

    #[test]
    fn canonical_complement_structure() {
        let j = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]);
        let d = canonical_dilation(&j, &identity(4)).unwrap();
        let comp = weak_complement(&d).unwrap();
        let mut expected = identity(4);
        expected
            .view_mut((2, 2), (2, 2))
            .copy_from(&(identity(2) - j.transpose()));
        assert_relative_eq!(comp.transfer, expected, epsilon = 1e-15);
    }

    #[test]
    fn attenuators_split_at_one_half() {
        let (ch, comp) = beam_splitter(0.8);
        assert_eq!(classify(&ch, &comp, 1e-9).unwrap().kind, VerdictKind::WD);
        let (ch, comp) = beam_splitter(0.2);
        assert_eq!(classify(&ch, &comp, 1e-9).unwrap().kind, VerdictKind::AD);
        let (ch, comp) = beam_splitter(0.5);
        assert_eq!(classify(&ch, &comp, 1e-9).unwrap().kind, VerdictKind::Both);
    }

    #[test]
    fn connecting_map_cp_matches_verdict() {
        for eta in [0.2, 0.8] {
            let (ch, comp) = beam_splitter(eta);
            let verdict = classify(&ch, &comp, 1e-9).unwrap();
            let t = connecting_map(&ch, &comp).unwrap();
            assert_eq!(t.validate_cp(1e-9).0, verdict.kind.is_weakly_degradable());
        }
    }

    #[test]
    fn ideal_like_spectrum() {
        let (n_occ, m_occ) = (0.5, 1.0);
        let env = diagonal(&[2.0 * n_occ + 1.0, 2.0 * m_occ + 1.0, 2.0 * n_occ + 1.0, 2.0 * m_occ + 1.0]);
        let d = dilate_ideal_like(&identity(2), &env).unwrap();
        let ch = d.channel().unwrap();
        let comp = weak_complement(&d).unwrap();
        let verdict = classify(&ch, &comp, 1e-9).unwrap();
        let mut expected = vec![2.0 * m_occ, 2.0 * m_occ + 2.0, 2.0 * n_occ, 2.0 * n_occ + 2.0];
        expected.sort_by(f64::total_cmp);
        for (got, want) in verdict.spectrum.iter().zip(&expected) {
            assert_relative_eq!(got, want, epsilon = 1e-12);
        }
        assert_eq!(verdict.kind, VerdictKind::WD);
    }

    #[test]
    fn schur_decoupled_vacuum_is_wd() {
        let j = diagonal(&[2.0, 2.0]);
        let d = canonical_dilation(&j, &identity(4)).unwrap();
        let ch = d.channel().unwrap();
        let blocks = schur_blocks(&j, &ch.noise).unwrap();
        assert_eq!(schur_verdict(&blocks, 1e-9), VerdictKind::WD);
        let comp = weak_complement(&d).unwrap();
        let w = wd_matrix(&ch, &comp).unwrap();
        let mut a = w.eigenvalues();
        let mut b = blocks.assemble().eigenvalues();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert_relative_eq!(x, y, epsilon = 1e-12);
        }
        assert_relative_eq!(blocks.assemble().re, w.re, epsilon = 1e-12);
        assert_relative_eq!(blocks.assemble().im, -w.im, epsilon = 1e-12);
    }

    #[test]
    fn schur_rejects_unit_eigenvalue() {
        assert!(schur_blocks(&identity(2), &identity(4)).is_err());
    }
}
