//! Bosonic Gaussian channels `gamma -> X^T gamma X + Y`, `m -> X^T m + v`.

use crate::config::tolerances;
use crate::dilation::case_one_environment;
use crate::error::{Error, Result};
use crate::hermitian::{psd_check, HermitianPair};
use crate::linalg::{
    ensure_finite, ensure_shape, ensure_symmetric, identity, inverse, max_abs, pseudo_inverse,
    rank_with_floor, singular_values, symmetrize, Matrix, Vector,
};
use crate::state::GaussianState;
use crate::symplectic::{is_symplectic, standard_form, williamson};

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianChannel {
    pub modes_in: usize,
    pub modes_out: usize,
    /// `2 n_in x 2 n_out`, acting as `gamma -> X^T gamma X`.
    pub transfer: Matrix,
    /// `2 n_out x 2 n_out`, symmetric.
    pub noise: Matrix,
    /// Length `2 n_out`.
    pub displacement: Vector,
}

/// `r = rank Sigma`, `r' = k - rank(Y - Sigma Y^+ Sigma^T)`, `k = rank Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankInvariants {
    pub defect_rank: usize,
    pub extremal_rank: usize,
    pub noise_rank: usize,
}

/// The trichotomy on `(rank Y, rank Sigma)` versus `2n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseClass {
    /// `Y` invertible and `Sigma` invertible.
    FullRank,
    /// `Y` invertible, `Sigma` singular.
    SingularDefect,
    /// `Y` singular.
    SingularNoise,
}

impl NoiseClass {
    pub fn label(self) -> &'static str {
        match self {
            NoiseClass::FullRank => "i",
            NoiseClass::SingularDefect => "ii",
            NoiseClass::SingularNoise => "iii",
        }
    }
}

impl GaussianChannel {
    pub fn new(transfer: Matrix, noise: Matrix, displacement: Vector) -> Result<Self> {
        ensure_finite(&transfer)?;
        ensure_finite(&noise)?;
        let rows = transfer.nrows();
        let cols = transfer.ncols();
        if rows == 0 || cols == 0 || !rows.is_multiple_of(2) || !cols.is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                context: "channel transfer matrix",
                expected: "nonzero even dimensions".into(),
                found: format!("{rows}x{cols}"),
            });
        }
        ensure_shape(&noise, cols, cols, "channel noise matrix")?;
        ensure_symmetric(&noise, "channel noise matrix")?;
        if displacement.len() != cols {
            return Err(Error::DimensionMismatch {
                context: "channel displacement",
                expected: cols.to_string(),
                found: displacement.len().to_string(),
            });
        }
        if !displacement.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            modes_in: rows / 2,
            modes_out: cols / 2,
            transfer,
            noise,
            displacement,
        })
    }

    /// Channel without displacement.
    pub fn centered(transfer: Matrix, noise: Matrix) -> Result<Self> {
        let cols = transfer.ncols();
        Self::new(transfer, noise, Vector::zeros(cols))
    }

    pub fn identity(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::ZeroModes);
        }
        Self::centered(identity(2 * modes), Matrix::zeros(2 * modes, 2 * modes))
    }

    /// Attenuator (`eta < 1`) or amplifier (`eta > 1`) on every mode with
    /// thermal noise `N`.
    pub fn thermal_gain(modes: usize, eta: f64, occupation: f64) -> Result<Self> {
        if modes == 0 {
            return Err(Error::ZeroModes);
        }
        if !(eta >= 0.0) {
            return Err(Error::Domain {
                name: "eta",
                value: eta,
                reason: "must be non-negative",
            });
        }
        let dim = 2 * modes;
        Self::centered(
            identity(dim) * eta.sqrt(),
            identity(dim) * ((1.0 - eta).abs() * (2.0 * occupation + 1.0)),
        )
    }

    pub fn additive_noise(noise: Matrix) -> Result<Self> {
        let dim = noise.nrows();
        Self::centered(identity(dim), noise)
    }

    pub fn same_modes(&self) -> Result<usize> {
        if self.modes_in == self.modes_out {
            Ok(self.modes_in)
        } else {
            Err(Error::DimensionMismatch {
                context: "channel with equal input and output modes",
                expected: format!("{} output modes", self.modes_in),
                found: self.modes_out.to_string(),
            })
        }
    }

    /// `Sigma = sigma_out - X^T sigma_in X`.
    pub fn form_defect(&self) -> Matrix {
        let sigma_in = standard_form(self.modes_in);
        let sigma_out = standard_form(self.modes_out);
        let defect = sigma_out - self.transfer.transpose() * sigma_in * &self.transfer;
        (&defect - defect.transpose()) * 0.5
    }

    /// `Y - i Sigma` as a Hermitian pair.
    pub fn cp_matrix(&self) -> HermitianPair {
        HermitianPair {
            re: self.noise.clone(),
            im: -self.form_defect(),
        }
    }

    /// Complete positivity `Y >= i Sigma` with its smallest eigenvalue.
    pub fn validate_cp(&self, tol: f64) -> (bool, f64) {
        psd_check(&self.cp_matrix(), tol)
    }

    pub(crate) fn ensure_cp(&self) -> Result<()> {
        let (ok, min_eig) = self.validate_cp(tolerances().psd);
        if ok {
            Ok(())
        } else {
            Err(Error::NotCompletelyPositive { min_eig })
        }
    }

    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        if state.modes != self.modes_in {
            return Err(Error::DimensionMismatch {
                context: "channel input state",
                expected: format!("{} modes", self.modes_in),
                found: format!("{} modes", state.modes),
            });
        }
        let covariance =
            symmetrize(&(self.transfer.transpose() * &state.covariance * &self.transfer))
                + &self.noise;
        let mean = self.transfer.transpose() * &state.mean + &self.displacement;
        GaussianState::with_mean(covariance, mean)
    }

    /// `self` followed by `then`.
    pub fn then(&self, then: &GaussianChannel) -> Result<GaussianChannel> {
        compose(self, then)
    }

    /// `Y - Sigma Y^+ Sigma^T`, which vanishes exactly for minimal noise.
    pub fn excess_noise(&self) -> Result<Matrix> {
        let defect = self.form_defect();
        let pinv = pseudo_inverse(&self.noise)?;
        Ok(symmetrize(
            &(&self.noise - &defect * pinv.inverse * defect.transpose()),
        ))
    }

    pub fn rank_invariants(&self) -> Result<RankInvariants> {
        let defect = self.form_defect();
        let noise_scale = max_abs(&self.noise);
        let defect_floor = max_abs(&self.transfer).powi(2).max(1.0);
        let defect_rank = rank_with_floor(&defect, defect_floor);
        let noise_rank = pseudo_inverse(&self.noise)?.rank;
        let excess_rank = rank_with_floor(&self.excess_noise()?, noise_scale);
        Ok(RankInvariants {
            defect_rank,
            extremal_rank: noise_rank.saturating_sub(excess_rank),
            noise_rank,
        })
    }

    pub fn noise_class(&self) -> Result<NoiseClass> {
        let full = 2 * self.same_modes()?;
        let ranks = self.rank_invariants()?;
        Ok(if ranks.noise_rank < full {
            NoiseClass::SingularNoise
        } else if ranks.defect_rank < full {
            NoiseClass::SingularDefect
        } else {
            NoiseClass::FullRank
        })
    }

    /// `Y = 0` and `Sigma = 0`: a Gaussian unitary up to displacement.
    pub fn is_trivial(&self, tol: f64) -> bool {
        let scale = max_abs(&self.transfer).powi(2).max(1.0);
        max_abs(&self.noise) <= tol * scale && max_abs(&self.form_defect()) <= tol * scale
    }

    /// `|| Y - Sigma Y^+ Sigma^T ||_max / max(1, ||Y||_max)`.
    pub fn minimality_residual(&self) -> Result<f64> {
        Ok(max_abs(&self.excess_noise()?) / max_abs(&self.noise).max(1.0))
    }

    pub fn is_minimal_noise(&self, tol: f64) -> Result<bool> {
        Ok(self.minimality_residual()? <= tol)
    }

    /// The three equivalent minimality tests for class (i) channels.
    pub fn minimal_noise_conditions(&self, tol: f64) -> Result<MinimalityConditions> {
        let full = 2 * self.same_modes()?;
        let ranks = self.rank_invariants()?;
        if ranks.noise_rank < full || ranks.defect_rank < full {
            return Err(Error::NotClassOne {
                noise_rank: ranks.noise_rank,
                defect_rank: ranks.defect_rank,
                full,
            });
        }
        let det_noise = self.noise.determinant();
        let det_defect = self.form_defect().determinant();
        // r' is counted at the caller's tolerance, on the same scale as the
        // extremality residual.
        let threshold = tol * max_abs(&self.noise).max(1.0);
        let excess_rank = singular_values(&self.excess_noise()?)
            .iter()
            .filter(|&&s| s > threshold)
            .count();
        Ok(MinimalityConditions {
            extremal: self.is_minimal_noise(tol)?,
            determinant: (det_noise - det_defect).abs() <= tol * det_defect.abs().max(1.0),
            rank: ranks.noise_rank - excess_rank == ranks.defect_rank,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinimalityConditions {
    /// `Y = Sigma Y^-1 Sigma^T`
    pub extremal: bool,
    /// `det Y = det Sigma`
    pub determinant: bool,
    /// `r = r'`
    pub rank: bool,
}

impl MinimalityConditions {
    pub fn agree(&self) -> bool {
        self.extremal == self.determinant && self.determinant == self.rank
    }
}

/// First `first`, then `second`.
pub fn compose(first: &GaussianChannel, second: &GaussianChannel) -> Result<GaussianChannel> {
    if first.modes_out != second.modes_in {
        return Err(Error::DimensionMismatch {
            context: "channel composition",
            expected: format!("second channel with {} input modes", first.modes_out),
            found: second.modes_in.to_string(),
        });
    }
    let transfer = &first.transfer * &second.transfer;
    let noise =
        symmetrize(&(second.transfer.transpose() * &first.noise * &second.transfer)) + &second.noise;
    let displacement = second.transfer.transpose() * &first.displacement + &second.displacement;
    GaussianChannel::new(transfer, noise, displacement)
}

/// `X = S1 X S2`, `Y = S2^T Y S2`, `v = S2^T v`.
pub fn conjugate(ch: &GaussianChannel, before: &Matrix, after: &Matrix) -> Result<GaussianChannel> {
    let sigma_in = standard_form(ch.modes_in);
    let sigma_out = standard_form(ch.modes_out);
    ensure_shape(before, sigma_in.nrows(), sigma_in.nrows(), "input symplectic")?;
    ensure_shape(after, sigma_out.nrows(), sigma_out.nrows(), "output symplectic")?;
    let tol = 1e-8 * max_abs(before).max(max_abs(after)).powi(2).max(1.0);
    if !is_symplectic(before, &sigma_in, tol)? {
        return Err(Error::NotSymplectic {
            what: "input conjugation",
            residual: crate::symplectic::symplectic_residual(before, &sigma_in)?,
        });
    }
    if !is_symplectic(after, &sigma_out, tol)? {
        return Err(Error::NotSymplectic {
            what: "output conjugation",
            residual: crate::symplectic::symplectic_residual(after, &sigma_out)?,
        });
    }
    GaussianChannel::new(
        before * &ch.transfer * after,
        symmetrize(&(after.transpose() * &ch.noise * after)),
        after.transpose() * &ch.displacement,
    )
}

/// Indices of the `k`-th factor's coordinates inside `(Q1..Qn; P1..Pn)`.
fn factor_indices(offset: usize, modes: usize, total: usize) -> Vec<usize> {
    (offset..offset + modes)
        .chain(total + offset..total + offset + modes)
        .collect()
}

/// Channel acting independently on consecutive groups of modes.
pub fn tensor_product(factors: &[GaussianChannel]) -> Result<GaussianChannel> {
    if factors.is_empty() {
        return Err(Error::ZeroModes);
    }
    let total_in: usize = factors.iter().map(|f| f.modes_in).sum();
    let total_out: usize = factors.iter().map(|f| f.modes_out).sum();
    let mut transfer = Matrix::zeros(2 * total_in, 2 * total_out);
    let mut noise = Matrix::zeros(2 * total_out, 2 * total_out);
    let mut displacement = Vector::zeros(2 * total_out);
    let (mut off_in, mut off_out) = (0, 0);
    for f in factors {
        let rows = factor_indices(off_in, f.modes_in, total_in);
        let cols = factor_indices(off_out, f.modes_out, total_out);
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                transfer[(r, c)] = f.transfer[(i, j)];
            }
        }
        for (i, &r) in cols.iter().enumerate() {
            displacement[r] = f.displacement[i];
            for (j, &c) in cols.iter().enumerate() {
                noise[(r, c)] = f.noise[(i, j)];
            }
        }
        off_in += f.modes_in;
        off_out += f.modes_out;
    }
    GaussianChannel::new(transfer, noise, displacement)
}

/// Splits a class-(i) channel into a minimal-noise channel with the same `X`
/// followed by additive classical noise.
pub fn minimal_noise_split(ch: &GaussianChannel) -> Result<(GaussianChannel, GaussianChannel)> {
    let env = case_one_environment(ch)?;
    let (env_symplectic, _) = williamson(&env.covariance)?;
    let lift = &env.noise_map * env_symplectic;
    let minimal_noise = symmetrize(&(&lift * lift.transpose()));
    let additive_noise = symmetrize(&(&ch.noise - &minimal_noise));
    let minimal = GaussianChannel::new(
        ch.transfer.clone(),
        minimal_noise,
        Vector::zeros(ch.displacement.len()),
    )?;
    let additive = GaussianChannel::new(
        identity(ch.noise.nrows()),
        additive_noise,
        ch.displacement.clone(),
    )?;
    Ok((minimal, additive))
}

/// For `X = 1` and `Y > 0`: symplectic `S2` with
/// `S2^T Y S2 = diag(l_1..l_n, l_1..l_n)`.
pub fn additive_noise_normal_form(ch: &GaussianChannel) -> Result<(Matrix, Vec<f64>)> {
    let dim = 2 * ch.same_modes()?;
    let scale = max_abs(&ch.transfer).max(1.0);
    if max_abs(&(&ch.transfer - identity(dim))) > 1e-12 * scale {
        return Err(Error::NotAdditive);
    }
    let (values, _) = crate::linalg::sym_eigen(&ch.noise);
    if values[0] <= tolerances().rank * values[dim - 1].abs() {
        return Err(Error::Singular {
            what: "additive noise matrix (use the ideal-like dilation for singular Y)",
        });
    }
    let (s, lambdas) = williamson(&ch.noise)?;
    let s2 = inverse(&s, "williamson symplectic")?.transpose();
    Ok((s2, lambdas))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diagonal, zeros};
    use crate::state::thermal_state;
    use crate::symplectic::symplectic_form;
    use approx::assert_relative_eq;

    fn attenuator(eta: f64, n: f64) -> GaussianChannel {
        GaussianChannel::thermal_gain(1, eta, n).unwrap()
    }

    #[test]
    fn tensor_product_of_thermal_modes() {
        let one = GaussianChannel::thermal_gain(1, 0.5, 1.0).unwrap();
        let two = GaussianChannel::thermal_gain(2, 0.5, 1.0).unwrap();
        assert_eq!(tensor_product(&[one.clone(), one]).unwrap(), two);
        let mixed = tensor_product(&[
            GaussianChannel::thermal_gain(1, 0.5, 0.0).unwrap(),
            GaussianChannel::identity(1).unwrap(),
        ])
        .unwrap();
        assert_eq!(mixed.transfer, diagonal(&[0.5f64.sqrt(), 1.0, 0.5f64.sqrt(), 1.0]));
        assert_eq!(mixed.noise, diagonal(&[0.5, 0.0, 0.5, 0.0]));
    }

    #[test]
    fn identity_channel_is_cp_with_zero_defect() {
        let ch = GaussianChannel::identity(2).unwrap();
        assert!(ch.validate_cp(1e-9).0);
        assert_eq!(ch.form_defect(), zeros(4, 4));
        assert!(ch.is_trivial(1e-12));
    }

    #[test]
    fn pure_loss_is_cp_on_the_boundary() {
        let ch = attenuator(0.7, 0.0);
        let (ok, min) = ch.validate_cp(1e-9);
        assert!(ok);
        assert!(min.abs() < 1e-14);
        assert_relative_eq!(ch.form_defect(), symplectic_form(1).unwrap() * 0.3, epsilon = 1e-15);
    }

    #[test]
    fn noiseless_attenuator_is_not_cp() {
        let ch = GaussianChannel::centered(identity(2) * 0.7f64.sqrt(), zeros(2, 2)).unwrap();
        let (ok, min) = ch.validate_cp(1e-9);
        assert!(!ok);
        assert_relative_eq!(min, -0.3, epsilon = 1e-14);
    }

    #[test]
    fn apply_examples() {
        let st = thermal_state(&[1.0]).unwrap();
        let out = attenuator(0.5, 0.0).apply(&st).unwrap();
        assert_relative_eq!(out.covariance, identity(2) * 2.0, epsilon = 1e-14);
        let vac = thermal_state(&[0.0]).unwrap();
        assert_relative_eq!(
            attenuator(0.3, 0.0).apply(&vac).unwrap().covariance,
            identity(2),
            epsilon = 1e-14
        );
        let id = GaussianChannel::identity(1).unwrap();
        assert_eq!(id.apply(&st).unwrap(), st);
        assert!(id.apply(&thermal_state(&[1.0, 1.0]).unwrap()).is_err());
    }

    #[test]
    fn compose_examples() {
        let shift = |v: [f64; 2]| {
            GaussianChannel::new(identity(2), zeros(2, 2), Vector::from_row_slice(&v)).unwrap()
        };
        let both = compose(&shift([1.0, 2.0]), &shift([0.5, -1.0])).unwrap();
        assert_relative_eq!(both.displacement, Vector::from_row_slice(&[1.5, 1.0]));

        let chained = compose(&attenuator(0.6, 0.0), &attenuator(0.5, 0.0)).unwrap();
        assert_relative_eq!(chained.transfer, identity(2) * 0.3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(chained.noise, identity(2) * 0.7, epsilon = 1e-15);

        let ch = attenuator(0.4, 2.0);
        assert_eq!(compose(&ch, &GaussianChannel::identity(1).unwrap()).unwrap(), ch);
        assert!(compose(&ch, &GaussianChannel::identity(2).unwrap()).is_err());
    }

    #[test]
    fn conjugate_by_identity_is_noop_and_rejects_non_symplectic() {
        let ch = attenuator(0.4, 1.0);
        assert_eq!(conjugate(&ch, &identity(2), &identity(2)).unwrap(), ch);
        assert!(matches!(
            conjugate(&ch, &(identity(2) * 2.0), &identity(2)),
            Err(Error::NotSymplectic { .. })
        ));
    }

    #[test]
    fn squeezed_attenuator_keeps_rank_invariants() {
        let ch = attenuator(0.6, 0.8);
        let squeeze = diagonal(&[2.0, 0.5]);
        let twisted = conjugate(&ch, &squeeze, &diagonal(&[0.25, 4.0])).unwrap();
        assert_ne!(twisted.noise, ch.noise);
        assert_eq!(twisted.rank_invariants().unwrap(), ch.rank_invariants().unwrap());
    }

    #[test]
    fn rank_invariant_examples() {
        let pure_loss = attenuator(0.7, 0.0).rank_invariants().unwrap();
        assert_eq!((pure_loss.defect_rank, pure_loss.extremal_rank, pure_loss.noise_rank), (2, 2, 2));
        let id = GaussianChannel::identity(1).unwrap().rank_invariants().unwrap();
        assert_eq!((id.defect_rank, id.extremal_rank, id.noise_rank), (0, 0, 0));
        let thermal = attenuator(0.7, 1.0).rank_invariants().unwrap();
        assert_eq!((thermal.defect_rank, thermal.extremal_rank, thermal.noise_rank), (2, 0, 2));
    }

    #[test]
    fn minimal_noise_examples() {
        assert!(attenuator(0.7, 0.0).is_minimal_noise(1e-9).unwrap());
        assert!(!attenuator(0.7, 0.5).is_minimal_noise(1e-9).unwrap());
        assert!(GaussianChannel::identity(1).unwrap().is_minimal_noise(1e-9).unwrap());
    }

    #[test]
    fn noise_classes() {
        assert_eq!(attenuator(0.5, 1.0).noise_class().unwrap(), NoiseClass::FullRank);
        let additive = GaussianChannel::additive_noise(identity(2)).unwrap();
        assert_eq!(additive.noise_class().unwrap(), NoiseClass::SingularDefect);
        assert_eq!(
            GaussianChannel::identity(1).unwrap().noise_class().unwrap(),
            NoiseClass::SingularNoise
        );
    }

    #[test]
    fn split_thermal_attenuator() {
        let ch = attenuator(0.5, 1.0);
        let (minimal, additive) = minimal_noise_split(&ch).unwrap();
        assert_relative_eq!(minimal.noise, identity(2) * 0.5, epsilon = 1e-12);
        assert_relative_eq!(additive.noise, identity(2), epsilon = 1e-12);
        assert_eq!(additive.transfer, identity(2));
        let rebuilt = compose(&minimal, &additive).unwrap();
        assert_relative_eq!(rebuilt.noise, ch.noise, epsilon = 1e-12);
    }

    #[test]
    fn split_of_minimal_channel_adds_nothing() {
        let (minimal, additive) = minimal_noise_split(&attenuator(0.3, 0.0)).unwrap();
        assert!(minimal.is_minimal_noise(1e-9).unwrap());
        assert!(max_abs(&additive.noise) < 1e-12);
    }

    #[test]
    fn split_requires_class_one() {
        let additive = GaussianChannel::additive_noise(identity(2)).unwrap();
        assert!(matches!(
            minimal_noise_split(&additive),
            Err(Error::NotClassOne { .. })
        ));
    }

    #[test]
    fn additive_normal_form_examples() {
        let (s2, l) =
            additive_noise_normal_form(&GaussianChannel::additive_noise(identity(4) * 2.0).unwrap())
                .unwrap();
        assert_relative_eq!(s2, identity(4), epsilon = 1e-12);
        assert_relative_eq!(l[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(l[1], 2.0, epsilon = 1e-12);
        let (_, l) =
            additive_noise_normal_form(&GaussianChannel::additive_noise(diagonal(&[4.0, 1.0])).unwrap())
                .unwrap();
        assert_relative_eq!(l[0], 2.0, epsilon = 1e-12);
        assert!(matches!(
            additive_noise_normal_form(&attenuator(0.5, 0.0)),
            Err(Error::NotAdditive)
        ));
        assert!(matches!(
            additive_noise_normal_form(
                &GaussianChannel::additive_noise(diagonal(&[1.0, 0.0])).unwrap()
            ),
            Err(Error::Singular { .. })
        ));
    }
}
