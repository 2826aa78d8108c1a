//! Unitary dilations: a symplectic `S` on system plus environment and an
//! environment covariance `gamma_E` such that tracing out the environment
//! reproduces the channel,
//! `s1 gamma s1^T + s2 gamma_E s2^T = X^T gamma X + Y`.

use crate::channel::GaussianChannel;
use crate::config::tolerances;
use crate::error::{Error, Result};
use crate::linalg::{
    block, block2x2, diagonal, direct_sum, ensure_finite, ensure_shape, ensure_square, identity,
    inverse, max_abs, pseudo_inverse, sym_inv_sqrt, sym_sqrt, symmetrize, zeros,
    Matrix,
};
use crate::state::{is_pure, validate_state};
use crate::symplectic::{
    ensure_symplectic, is_symplectic, skew_normal_form, standard_form, symplectic_complete,
    symplectic_residual, SkewNormalForm,
};

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryDilation {
    pub system_modes: usize,
    pub env_modes: usize,
    /// Square of size `2(n + l)`, symplectic for `sigma_2n ⊕ env_form`.
    pub symplectic: Matrix,
    pub env_covariance: Matrix,
    pub env_form: Matrix,
    /// Whether the environment state is pure.
    pub pure: bool,
}

impl UnitaryDilation {
    pub fn new(
        system_modes: usize,
        symplectic: Matrix,
        env_covariance: Matrix,
        env_form: Matrix,
        pure: bool,
    ) -> Result<Self> {
        ensure_finite(&symplectic)?;
        ensure_finite(&env_covariance)?;
        let env_dim = ensure_square(&env_form, "environment form")?;
        if env_dim % 2 != 0 {
            return Err(Error::DimensionMismatch {
                context: "environment form",
                expected: "even dimension".into(),
                found: env_dim.to_string(),
            });
        }
        let total = 2 * system_modes + env_dim;
        ensure_shape(&symplectic, total, total, "dilation symplectic")?;
        ensure_shape(&env_covariance, env_dim, env_dim, "environment covariance")?;
        let dilation = Self {
            system_modes,
            env_modes: env_dim / 2,
            symplectic,
            env_covariance,
            env_form,
            pure,
        };
        ensure_symplectic(&dilation.symplectic, &dilation.total_form(), "dilation")?;
        Ok(dilation)
    }

    pub fn total_form(&self) -> Matrix {
        direct_sum(&standard_form(self.system_modes), &self.env_form)
    }

    fn sys_dim(&self) -> usize {
        2 * self.system_modes
    }

    fn env_dim(&self) -> usize {
        2 * self.env_modes
    }

    /// `s1`
    pub fn sys_from_sys(&self) -> Matrix {
        block(&self.symplectic, 0, 0, self.sys_dim(), self.sys_dim())
    }

    /// `s2`
    pub fn sys_from_env(&self) -> Matrix {
        block(&self.symplectic, 0, self.sys_dim(), self.sys_dim(), self.env_dim())
    }

    /// `s3`
    pub fn env_from_sys(&self) -> Matrix {
        block(&self.symplectic, self.sys_dim(), 0, self.env_dim(), self.sys_dim())
    }

    /// `s4`
    pub fn env_from_env(&self) -> Matrix {
        block(
            &self.symplectic,
            self.sys_dim(),
            self.sys_dim(),
            self.env_dim(),
            self.env_dim(),
        )
    }

    /// The channel realized by this dilation.
    pub fn channel(&self) -> Result<GaussianChannel> {
        let s2 = self.sys_from_env();
        GaussianChannel::centered(
            self.sys_from_sys().transpose(),
            symmetrize(&(&s2 * &self.env_covariance * s2.transpose())),
        )
    }

    /// `|| s1 g s1^T + s2 gamma_E s2^T - (X^T g X + Y) ||_max / (1 + ||g||_max)`.
    pub fn round_trip_residual(&self, ch: &GaussianChannel, gamma: &Matrix) -> f64 {
        let s1 = self.sys_from_sys();
        let s2 = self.sys_from_env();
        let dilated = &s1 * gamma * s1.transpose() + &s2 * &self.env_covariance * s2.transpose();
        let direct = ch.transfer.transpose() * gamma * &ch.transfer + &ch.noise;
        max_abs(&(dilated - direct)) / (1.0 + max_abs(gamma))
    }

    pub fn env_is_valid(&self, tol: f64) -> Result<bool> {
        let normal = skew_normal_form(&self.env_form)?;
        let inv_root: Vec<f64> = normal
            .values
            .iter()
            .chain(normal.values.iter())
            .map(|v| 1.0 / v.sqrt())
            .collect();
        let to_standard = diagonal(&inv_root) * normal.orthogonal;
        let standard = symmetrize(&(&to_standard * &self.env_covariance * to_standard.transpose()));
        Ok(validate_state(&standard, tol)?.0)
    }
}

/// Data of the `l = n` construction for class-(i) channels.
pub(crate) struct CaseOneEnvironment {
    /// `s2 = K^{-1} = O^T M^{1/2}`.
    pub noise_map: Matrix,
    /// `gamma_E = K Y K^T`.
    pub covariance: Matrix,
}

fn doubled(values: &[f64]) -> Vec<f64> {
    values.iter().chain(values.iter()).copied().collect()
}

pub(crate) fn case_one_environment(ch: &GaussianChannel) -> Result<CaseOneEnvironment> {
    let n = ch.same_modes()?;
    ch.ensure_cp()?;
    let ranks = ch.rank_invariants()?;
    if ranks.noise_rank != 2 * n || ranks.defect_rank != 2 * n {
        return Err(Error::NotClassOne {
            noise_rank: ranks.noise_rank,
            defect_rank: ranks.defect_rank,
            full: 2 * n,
        });
    }
    let normal = skew_normal_form(&ch.form_defect())?;
    if normal.rank != 2 * n {
        return Err(Error::NotClassOne {
            noise_rank: ranks.noise_rank,
            defect_rank: normal.rank,
            full: 2 * n,
        });
    }
    let scale = doubled(&normal.values);
    let whitening = diagonal(&scale.iter().map(|m| 1.0 / m.sqrt()).collect::<Vec<_>>())
        * &normal.orthogonal;
    let noise_map =
        normal.orthogonal.transpose() * diagonal(&scale.iter().map(|m| m.sqrt()).collect::<Vec<_>>());
    // K = M^{-1/2} O whitens Sigma to sigma_2n.
    let covariance = symmetrize(&(&whitening * &ch.noise * whitening.transpose()));
    Ok(CaseOneEnvironment {
        noise_map,
        covariance,
    })
}

/// `l = n` dilation of a class-(i) channel (`Y` and `Sigma` invertible).
///
/// The purity flag records `det Y = det Sigma`.
pub fn dilate_case_i(ch: &GaussianChannel) -> Result<UnitaryDilation> {
    let n = ch.same_modes()?;
    let env = case_one_environment(ch)?;
    let sigma = standard_form(n);
    let s1 = ch.transfer.transpose();
    let full = symplectic_complete(&s1, &env.noise_map, &sigma, &sigma)?;
    let det_noise = ch.noise.determinant();
    let det_defect = ch.form_defect().determinant();
    let pure = (det_noise - det_defect).abs() <= 1e-8 * det_defect.abs().max(1.0);
    UnitaryDilation::new(n, full, env.covariance, sigma, pure)
}

/// Weights of a purified environment: `gamma_E = [[alpha, delta], [delta^T, beta]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvironmentRecipe {
    pub alpha: Matrix,
    pub beta: Matrix,
    pub delta: Matrix,
    pub xi: f64,
    /// Skew values of `Ybar^{-1/2} Sigma Ybar^{-1/2}`.
    pub skew_values: Vec<f64>,
}

impl EnvironmentRecipe {
    pub fn covariance(&self) -> Matrix {
        block2x2(&self.alpha, &self.delta, &self.delta.transpose(), &self.beta)
    }
}

/// `f(t) = -sqrt(t^2 - 1)` for `t >= 1`, clamped just below 1.
pub fn purification_partner(theta: f64) -> Result<f64> {
    let clamp = tolerances().purification_clamp;
    if theta >= 1.0 {
        Ok(-(theta * theta - 1.0).sqrt())
    } else if theta >= 1.0 - clamp {
        Ok(0.0)
    } else {
        Err(Error::Domain {
            name: "theta",
            value: theta,
            reason: "purification needs theta >= 1",
        })
    }
}

/// The lifted noise `Ybar = Y + (1 - Pi)` and the normal form of
/// `Sigma' = Ybar^{-1/2} Sigma Ybar^{-1/2}`.
struct LiftedNoise {
    projector: Matrix,
    root: Matrix,
    normal: SkewNormalForm,
}

fn lift_noise(ch: &GaussianChannel) -> Result<LiftedNoise> {
    let n = ch.same_modes()?;
    ch.ensure_cp()?;
    let pinv = pseudo_inverse(&ch.noise)?;
    let lifted = &ch.noise + (identity(2 * n) - &pinv.projector);
    let root = sym_sqrt(&lifted, "lifted noise")?;
    let inv_root = sym_inv_sqrt(&lifted, "lifted noise")?;
    let reduced = &inv_root * ch.form_defect() * &inv_root;
    let reduced = (&reduced - reduced.transpose()) * 0.5;
    let mut normal = skew_normal_form(&reduced)?;
    // Complete positivity bounds the skew values by 1.
    let unit = tolerances().unit_skew;
    for mu in normal.values.iter_mut() {
        if *mu > 1.0 + unit {
            return Err(Error::NotCompletelyPositive { min_eig: 1.0 - *mu });
        }
        *mu = mu.min(1.0);
    }
    Ok(LiftedNoise {
        projector: pinv.projector,
        root,
        normal,
    })
}

/// `[[0, P], [P, 0]]` with `P` an `n x m` block.
fn off_diagonal_pair(p: &Matrix) -> Matrix {
    block2x2(
        &zeros(p.nrows(), p.ncols()),
        p,
        p,
        &zeros(p.nrows(), p.ncols()),
    )
}

/// Shared tail of the lifted constructions: `s2' = [K^{-1} | O^T A]`,
/// `s2 = Pi Ybar^{1/2} s2'`, then completion.
fn assemble_lifted(
    ch: &GaussianChannel,
    lifted: &LiftedNoise,
    coupling: &Matrix,
    recipe: &EnvironmentRecipe,
    second_modes: usize,
    pure: bool,
) -> Result<UnitaryDilation> {
    let n = ch.same_modes()?;
    let half = lifted.normal.rank / 2;
    let mut scale: Vec<f64> = lifted.normal.values.clone();
    scale.extend(std::iter::repeat_n(1.0, n - half));
    let root_scale = diagonal(&doubled(&scale).iter().map(|m| m.sqrt()).collect::<Vec<_>>());
    let o_t = lifted.normal.orthogonal.transpose();
    let reduced_map = crate::linalg::hstack(&(&o_t * root_scale), &(&o_t * coupling));
    let noise_map = &lifted.projector * &lifted.root * reduced_map;
    let env_form = direct_sum(&standard_form(n), &standard_form(second_modes));
    let full = symplectic_complete(
        &ch.transfer.transpose(),
        &noise_map,
        &standard_form(n),
        &env_form,
    )?;
    UnitaryDilation::new(n, full, recipe.covariance(), env_form, pure)
}

/// Stinespring dilation with `l = 2n` and a pure environment, valid for every
/// channel.
pub fn dilate_pure(ch: &GaussianChannel) -> Result<UnitaryDilation> {
    let (dilation, _) = dilate_pure_with_recipe(ch)?;
    Ok(dilation)
}

pub fn dilate_pure_with_recipe(ch: &GaussianChannel) -> Result<(UnitaryDilation, EnvironmentRecipe)> {
    let n = ch.same_modes()?;
    let lifted = lift_noise(ch)?;
    let half = lifted.normal.rank / 2;
    let xi = tolerances().xi;
    let f_xi = purification_partner(xi)?;

    let mut selector = zeros(n, n);
    let mut partner = zeros(n, n);
    let mut weights = Vec::with_capacity(n);
    for j in 0..n {
        if j < half {
            let theta = 1.0 / lifted.normal.values[j];
            partner[(j, j)] = purification_partner(theta)?;
            weights.push(theta);
        } else {
            selector[(j, j)] = 1.0;
            partner[(j, j)] = f_xi;
            weights.push(xi);
        }
    }
    let thermal = diagonal(&doubled(&weights));
    let recipe = EnvironmentRecipe {
        alpha: thermal.clone(),
        beta: thermal,
        delta: off_diagonal_pair(&partner),
        xi,
        skew_values: lifted.normal.values.clone(),
    };
    let coupling = off_diagonal_pair(&selector);
    let dilation = assemble_lifted(ch, &lifted, &coupling, &recipe, n, true)?;
    Ok((dilation, recipe))
}

/// Pure dilation with `l = 2n - r'/2`: skew values equal to 1 already give
/// vacuum modes that need no partner.
pub fn dilate_reduced_pure(ch: &GaussianChannel) -> Result<UnitaryDilation> {
    let n = ch.same_modes()?;
    let lifted = lift_noise(ch)?;
    let half = lifted.normal.rank / 2;
    let unit_tol = tolerances().unit_skew;
    let units = lifted
        .normal
        .values
        .iter()
        .take_while(|mu| (**mu - 1.0).abs() <= unit_tol)
        .count();
    let second = n - units;
    let xi = tolerances().xi;
    let f_xi = purification_partner(xi)?;

    let mut selector = zeros(n, second);
    let mut partner = zeros(n, second);
    let mut first_weights = Vec::with_capacity(n);
    let mut second_weights = Vec::with_capacity(second);
    for j in 0..n {
        if j < units {
            first_weights.push(1.0);
        } else if j < half {
            let theta = 1.0 / lifted.normal.values[j];
            partner[(j, j - units)] = purification_partner(theta)?;
            first_weights.push(theta);
            second_weights.push(theta);
        } else {
            selector[(j, j - units)] = 1.0;
            partner[(j, j - units)] = f_xi;
            first_weights.push(xi);
            second_weights.push(xi);
        }
    }
    let recipe = EnvironmentRecipe {
        alpha: diagonal(&doubled(&first_weights)),
        beta: diagonal(&doubled(&second_weights)),
        delta: off_diagonal_pair(&partner),
        xi,
        skew_values: lifted.normal.values.clone(),
    };
    let coupling = off_diagonal_pair(&selector);
    assemble_lifted(ch, &lifted, &coupling, &recipe, second, true)
}

/// Dilation with `l = 2n - r/2`: thermal modes for the nonzero skew values and
/// entangled pairs for the rest. The environment is mixed unless every skew
/// value is 1.
pub fn dilate_reduced_mixed(ch: &GaussianChannel) -> Result<UnitaryDilation> {
    let n = ch.same_modes()?;
    let lifted = lift_noise(ch)?;
    let half = lifted.normal.rank / 2;
    let second = n - half;
    let xi = tolerances().xi;
    let f_xi = purification_partner(xi)?;

    let mut selector = zeros(n, second);
    let mut partner = zeros(n, second);
    let mut first_weights = Vec::with_capacity(n);
    for j in 0..n {
        if j < half {
            first_weights.push(1.0 / lifted.normal.values[j]);
        } else {
            selector[(j, j - half)] = 1.0;
            partner[(j, j - half)] = f_xi;
            first_weights.push(xi);
        }
    }
    let recipe = EnvironmentRecipe {
        alpha: diagonal(&doubled(&first_weights)),
        beta: identity(2 * second) * xi,
        delta: off_diagonal_pair(&partner),
        xi,
        skew_values: lifted.normal.values.clone(),
    };
    let unit_tol = tolerances().unit_skew;
    let pure = lifted.normal.values.iter().all(|mu| (mu - 1.0).abs() <= unit_tol);
    let coupling = off_diagonal_pair(&selector);
    assemble_lifted(ch, &lifted, &coupling, &recipe, second, pure)
}

fn ensure_no_unit_eigenvalue(j: &Matrix) -> Result<()> {
    let n = ensure_square(j, "J")?;
    let shifted = identity(n) - j;
    let scale = max_abs(j).max(1.0);
    let tol = 1e-9 * scale;
    let smallest = crate::linalg::singular_values(&shifted)
        .last()
        .copied()
        .unwrap_or(0.0);
    if smallest <= tol {
        return Err(Error::UnitEigenvalue);
    }
    Ok(())
}

/// The `4n x 4n` canonical symplectic
/// `[[1, 0, 1 - J^{-T}, 0], [0, J, 0, -J], [1, 0, 1, 0], [0, 1 - J, 0, J]]`
/// in `(Q_sys, P_sys, Q_env, P_env)` blocks.
pub fn canonical_dilation_s(j: &Matrix) -> Result<Matrix> {
    let n = ensure_square(j, "J")?;
    ensure_finite(j)?;
    ensure_no_unit_eigenvalue(j)?;
    let j_inv_t = inverse(j, "J")?.transpose();
    let one = identity(n);
    let z = zeros(n, n);
    let rows: [[Matrix; 4]; 4] = [
        [one.clone(), z.clone(), &one - &j_inv_t, z.clone()],
        [z.clone(), j.clone(), z.clone(), -j],
        [one.clone(), z.clone(), one.clone(), z.clone()],
        [z.clone(), &one - j, z, j.clone()],
    ];
    Ok(assemble_blocks(&rows, n))
}

/// The family
/// `[[1, 0, (1 - J^T) G^{-T}, 0], [0, J, 0, G], [-G^T J^{-T}, 0, 1, 0],
///   [0, G^{-1} J (J - 1), 0, G^{-1} J G]]`;
/// `G = -J` gives [`canonical_dilation_s`].
pub fn general_g_dilation_s(j: &Matrix, g: &Matrix) -> Result<Matrix> {
    let n = ensure_square(j, "J")?;
    ensure_shape(g, n, n, "G")?;
    ensure_finite(j)?;
    ensure_finite(g)?;
    ensure_no_unit_eigenvalue(j)?;
    let g_inv = inverse(g, "G")?;
    let j_inv_t = inverse(j, "J")?.transpose();
    let one = identity(n);
    let z = zeros(n, n);
    let rows: [[Matrix; 4]; 4] = [
        [
            one.clone(),
            z.clone(),
            (&one - j.transpose()) * g_inv.transpose(),
            z.clone(),
        ],
        [z.clone(), j.clone(), z.clone(), g.clone()],
        [-(g.transpose() * j_inv_t), z.clone(), one.clone(), z.clone()],
        [z.clone(), &g_inv * j * (j - &one), z, &g_inv * j * g],
    ];
    Ok(assemble_blocks(&rows, n))
}

fn assemble_blocks(rows: &[[Matrix; 4]; 4], n: usize) -> Matrix {
    let mut out = zeros(4 * n, 4 * n);
    for (bi, row) in rows.iter().enumerate() {
        for (bj, blk) in row.iter().enumerate() {
            out.view_mut((bi * n, bj * n), (n, n)).copy_from(blk);
        }
    }
    out
}

/// Canonical `l = n` dilation for a given `J` and environment state in the
/// standard form ordering.
pub fn canonical_dilation(j: &Matrix, env_covariance: &Matrix) -> Result<UnitaryDilation> {
    let n = ensure_square(j, "J")?;
    let s = canonical_dilation_s(j)?;
    let pure = is_pure(env_covariance, 1e-9).unwrap_or(false);
    UnitaryDilation::new(n, s, env_covariance.clone(), standard_form(n), pure)
}

/// Equivalent dilation from local environment symplectics: `V` acts on the
/// environment input, `W` on the environment output. The environment state
/// becomes `V^{-1} gamma_E V^{-T}` so the channel is unchanged.
pub fn transform_dilation(
    d: &UnitaryDilation,
    input_map: &Matrix,
    output_map: &Matrix,
) -> Result<UnitaryDilation> {
    let env_dim = 2 * d.env_modes;
    ensure_shape(input_map, env_dim, env_dim, "environment input symplectic")?;
    ensure_shape(output_map, env_dim, env_dim, "environment output symplectic")?;
    for (what, m) in [("environment input map", input_map), ("environment output map", output_map)] {
        let tol = 1e-9 * max_abs(m).powi(2).max(1.0);
        if !is_symplectic(m, &d.env_form, tol)? {
            return Err(Error::NotSymplectic {
                what,
                residual: symplectic_residual(m, &d.env_form)?,
            });
        }
    }
    let total = 2 * d.system_modes + env_dim;
    let mut left = identity(total);
    left.view_mut((2 * d.system_modes, 2 * d.system_modes), (env_dim, env_dim))
        .copy_from(output_map);
    let mut right = identity(total);
    right
        .view_mut((2 * d.system_modes, 2 * d.system_modes), (env_dim, env_dim))
        .copy_from(input_map);
    let symplectic = left * &d.symplectic * right;
    let v_inv = inverse(input_map, "environment input symplectic")?;
    let env_covariance = symmetrize(&(&v_inv * &d.env_covariance * v_inv.transpose()));
    UnitaryDilation::new(
        d.system_modes,
        symplectic,
        env_covariance,
        d.env_form.clone(),
        d.pure,
    )
}

/// Local environment maps taking [`general_g_dilation_s`] to the
/// anti-diagonal alternative form: `V = -sigma_2n` and
/// `W = [[0, G^{-1} J^{-1} G], [-G^T J^T G^{-T}, 0]]`.
pub fn anti_diagonal_maps(j: &Matrix, g: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = ensure_square(j, "J")?;
    let g_inv = inverse(g, "G")?;
    let j_inv = inverse(j, "J")?;
    let output = block2x2(
        &zeros(n, n),
        &(&g_inv * j_inv * g),
        &(-(g.transpose() * j.transpose() * g_inv.transpose())),
        &zeros(n, n),
    );
    Ok((-standard_form(n), output))
}

/// The anti-diagonal alternative canonical form
/// `[[1, 0, 0, -(1 - J^T) G^{-T}], [0, J, G, 0], [0, -G^{-1}(1 - J), 1, 0],
///   [G^T, 0, 0, G^T J^T G^{-T}]]`.
pub fn anti_diagonal_dilation_s(j: &Matrix, g: &Matrix) -> Result<Matrix> {
    let n = ensure_square(j, "J")?;
    ensure_no_unit_eigenvalue(j)?;
    let g_inv = inverse(g, "G")?;
    let one = identity(n);
    let z = zeros(n, n);
    let rows: [[Matrix; 4]; 4] = [
        [
            one.clone(),
            z.clone(),
            z.clone(),
            -((&one - j.transpose()) * g_inv.transpose()),
        ],
        [z.clone(), j.clone(), g.clone(), z.clone()],
        [z.clone(), -(&g_inv * (&one - j)), one.clone(), z.clone()],
        [g.transpose(), z.clone(), z, g.transpose() * j.transpose() * g_inv.transpose()],
    ];
    Ok(assemble_blocks(&rows, n))
}

fn ideal_like_checks(f3: &Matrix, env_covariance: &Matrix) -> Result<usize> {
    let n = ensure_square(f3, "F3")?;
    if n == 0 {
        return Err(Error::ZeroModes);
    }
    inverse(f3, "F3")?;
    ensure_shape(env_covariance, 2 * n, 2 * n, "environment covariance")?;
    Ok(n)
}

/// `s1 = s4 = 1`, `s3 = F3 ⊕ 0`, `s2 = 0 ⊕ (-F3^T)`; invertible `F3` forces
/// `G3 = 0`.
pub fn ideal_like_raw(f3: &Matrix, env_covariance: &Matrix) -> Result<UnitaryDilation> {
    let n = ideal_like_checks(f3, env_covariance)?;
    let z = zeros(n, n);
    let s2 = block2x2(&z, &z, &z, &(-f3.transpose()));
    let s3 = block2x2(f3, &z, &z, &z);
    let s = block2x2(&identity(2 * n), &s2, &s3, &identity(2 * n));
    let pure = is_pure(env_covariance, 1e-9).unwrap_or(false);
    UnitaryDilation::new(n, s, env_covariance.clone(), standard_form(n), pure)
}

/// `V = diag(-F3, -F3^{-T})`; with `W = V^{-1}` it reduces the raw ideal-like
/// dilation to `s2 = 0 ⊕ 1`, `s3 = (-1) ⊕ 0`.
pub fn ideal_like_reduction(f3: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = ensure_square(f3, "F3")?;
    let inv = inverse(f3, "F3")?;
    let v = block2x2(&(-f3), &zeros(n, n), &zeros(n, n), &(-inv.transpose()));
    let w = block2x2(&(-inv), &zeros(n, n), &zeros(n, n), &(-f3.transpose()));
    Ok((v, w))
}

/// Ideal-like channel (`X = 1`, rank-deficient `Y`) in its reduced dilation,
/// with `env_covariance` the state seen by the reduced form.
pub fn dilate_ideal_like(f3: &Matrix, env_covariance: &Matrix) -> Result<UnitaryDilation> {
    let n = ideal_like_checks(f3, env_covariance)?;
    let z = zeros(n, n);
    let s2 = block2x2(&z, &z, &z, &identity(n));
    let s3 = block2x2(&(-identity(n)), &z, &z, &z);
    let s = block2x2(&identity(2 * n), &s2, &s3, &identity(2 * n));
    let pure = is_pure(env_covariance, 1e-9).unwrap_or(false);
    UnitaryDilation::new(n, s, env_covariance.clone(), standard_form(n), pure)
}

/// Random covariance inputs helper for round-trip checks.
pub fn max_round_trip_residual(
    d: &UnitaryDilation,
    ch: &GaussianChannel,
    inputs: &[Matrix],
) -> f64 {
    inputs
        .iter()
        .map(|g| d.round_trip_residual(ch, g))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::purity_witness;
    use crate::symplectic::symplectic_form;
    use approx::assert_relative_eq;

    fn attenuator(eta: f64, n: f64) -> GaussianChannel {
        GaussianChannel::thermal_gain(1, eta, n).unwrap()
    }

    fn probes(dim: usize) -> Vec<Matrix> {
        let n = dim / 2;
        vec![
            identity(dim),
            identity(dim) * 3.0,
            crate::state::thermal_state(&vec![0.25; n]).unwrap().covariance,
            {
                let mut d: Vec<f64> = (0..n).map(|i| 2.0 + i as f64).collect();
                d.extend((0..n).map(|i| 0.5 / (1.0 + i as f64)));
                diagonal(&d)
            },
        ]
    }

    fn check(d: &UnitaryDilation, ch: &GaussianChannel) {
        assert!(is_symplectic(&d.symplectic, &d.total_form(), 1e-8).unwrap());
        assert!(d.env_is_valid(1e-9).unwrap());
        for g in probes(2 * ch.modes_in) {
            assert!(d.round_trip_residual(ch, &g) < 1e-10);
        }
    }

    #[test]
    fn case_i_pure_loss() {
        let ch = attenuator(0.7, 0.0);
        let d = dilate_case_i(&ch).unwrap();
        assert_eq!(d.env_modes, 1);
        assert!(d.pure);
        assert_relative_eq!(d.env_covariance, identity(2), epsilon = 1e-12);
        check(&d, &ch);
    }

    #[test]
    fn case_i_thermal_loss() {
        let ch = attenuator(0.7, 1.0);
        let d = dilate_case_i(&ch).unwrap();
        assert!(!d.pure);
        assert_relative_eq!(d.env_covariance, identity(2) * 3.0, epsilon = 1e-12);
        check(&d, &ch);
    }

    #[test]
    fn case_i_rejects_identity() {
        assert!(matches!(
            dilate_case_i(&GaussianChannel::identity(1).unwrap()),
            Err(Error::NotClassOne { .. })
        ));
    }

    #[test]
    fn pure_dilation_of_thermal_attenuator() {
        let ch = attenuator(0.7, 1.0);
        let (d, recipe) = dilate_pure_with_recipe(&ch).unwrap();
        assert_eq!(d.env_modes, 2);
        assert!(is_pure(&d.env_covariance, 1e-9).unwrap());
        let (_, det) = purity_witness(&d.env_covariance).unwrap();
        assert_relative_eq!(det, 1.0, epsilon = 1e-10);
        assert_relative_eq!(recipe.skew_values[0], 1.0 / 3.0, epsilon = 1e-12);
        check(&d, &ch);
    }

    #[test]
    fn pure_dilation_of_additive_noise() {
        let ch = GaussianChannel::additive_noise(identity(2)).unwrap();
        let (d, recipe) = dilate_pure_with_recipe(&ch).unwrap();
        assert!(recipe.skew_values.is_empty());
        assert!(is_pure(&d.env_covariance, 1e-9).unwrap());
        check(&d, &ch);
    }

    #[test]
    fn pure_dilation_of_class_one_matches_thermal_weights() {
        let ch = attenuator(0.6, 0.5);
        let (_, recipe) = dilate_pure_with_recipe(&ch).unwrap();
        // Case (i): every mode carries mu^{-1} on alpha, beta and the partner
        // weight on delta, so the entangled xi block is absent.
        let theta = 1.0 / recipe.skew_values[0];
        assert_relative_eq!(recipe.alpha, identity(2) * theta, epsilon = 1e-12);
        assert_relative_eq!(recipe.beta, identity(2) * theta, epsilon = 1e-12);
        let f = -(theta * theta - 1.0).sqrt();
        assert_relative_eq!(recipe.delta[(0, 1)], f, epsilon = 1e-12);
        assert_relative_eq!(recipe.delta[(1, 0)], f, epsilon = 1e-12);
    }

    #[test]
    fn reduced_pure_counts() {
        let minimal = attenuator(0.4, 0.0);
        let d = dilate_reduced_pure(&minimal).unwrap();
        assert_eq!(d.env_modes, 1);
        assert_relative_eq!(d.env_covariance, identity(2), epsilon = 1e-12);
        check(&d, &minimal);

        let thermal = attenuator(0.7, 1.0);
        let d = dilate_reduced_pure(&thermal).unwrap();
        assert_eq!(d.env_modes, 2);
        assert!(is_pure(&d.env_covariance, 1e-9).unwrap());
        check(&d, &thermal);
    }

    #[test]
    fn reduced_mixed_counts() {
        let thermal = attenuator(0.7, 1.0);
        let d = dilate_reduced_mixed(&thermal).unwrap();
        assert_eq!(d.env_modes, 1);
        assert_relative_eq!(d.env_covariance, identity(2) * 3.0, epsilon = 1e-12);
        check(&d, &thermal);

        let additive = GaussianChannel::additive_noise(identity(4) * 0.5).unwrap();
        let d = dilate_reduced_mixed(&additive).unwrap();
        assert_eq!(d.env_modes, 4);
        check(&d, &additive);
    }

    #[test]
    fn canonical_single_mode() {
        let j = diagonal(&[2.0]);
        let s = canonical_dilation_s(&j).unwrap();
        let expected = Matrix::from_row_slice(
            4,
            4,
            &[
                1.0, 0.0, 0.5, 0.0, //
                0.0, 2.0, 0.0, -2.0, //
                1.0, 0.0, 1.0, 0.0, //
                0.0, -1.0, 0.0, 2.0,
            ],
        );
        assert_relative_eq!(s, expected, epsilon = 1e-15);
        let omega = direct_sum(&symplectic_form(1).unwrap(), &symplectic_form(1).unwrap());
        assert!(is_symplectic(&s, &omega, 1e-12).unwrap());
    }

    #[test]
    fn canonical_defective_block_is_symplectic() {
        let j = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]);
        let s = canonical_dilation_s(&j).unwrap();
        let omega = direct_sum(&symplectic_form(2).unwrap(), &symplectic_form(2).unwrap());
        assert!(is_symplectic(&s, &omega, 1e-12).unwrap());
    }

    #[test]
    fn canonical_rejects_unit_eigenvalue() {
        assert_eq!(canonical_dilation_s(&identity(2)), Err(Error::UnitEigenvalue));
        let j = Matrix::from_row_slice(2, 2, &[1.0, 5.0, 0.0, 3.0]);
        assert_eq!(canonical_dilation_s(&j), Err(Error::UnitEigenvalue));
    }

    #[test]
    fn general_family_reduces_to_canonical() {
        let j = Matrix::from_row_slice(2, 2, &[0.3, 0.7, -0.2, 1.9]);
        let general = general_g_dilation_s(&j, &(-&j)).unwrap();
        let canonical = canonical_dilation_s(&j).unwrap();
        assert!(max_abs(&(general - canonical)) <= 1e-12);
        assert!(matches!(
            general_g_dilation_s(&j, &zeros(2, 2)),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn identity_transform_is_noop() {
        let d = dilate_case_i(&attenuator(0.5, 0.3)).unwrap();
        let same = transform_dilation(&d, &identity(2), &identity(2)).unwrap();
        assert_relative_eq!(same.symplectic, d.symplectic, epsilon = 1e-15);
        assert_relative_eq!(same.env_covariance, d.env_covariance, epsilon = 1e-15);
        assert!(transform_dilation(&d, &(identity(2) * 2.0), &identity(2)).is_err());
    }

    #[test]
    fn anti_diagonal_form_from_local_maps() {
        let j = Matrix::from_row_slice(2, 2, &[2.0, 0.4, -0.3, 0.6]);
        let g = Matrix::from_row_slice(2, 2, &[1.1, 0.2, -0.5, 0.9]);
        let base = UnitaryDilation::new(
            2,
            general_g_dilation_s(&j, &g).unwrap(),
            identity(4),
            standard_form(2),
            true,
        )
        .unwrap();
        let (v, w) = anti_diagonal_maps(&j, &g).unwrap();
        let moved = transform_dilation(&base, &v, &w).unwrap();
        let expected = anti_diagonal_dilation_s(&j, &g).unwrap();
        assert!(max_abs(&(moved.symplectic - expected)) < 1e-12);
    }

    #[test]
    fn ideal_like_reduction_matches_reduced_form() {
        let f3 = Matrix::from_row_slice(2, 2, &[1.5, 0.3, -0.2, 0.8]);
        let raw = ideal_like_raw(&f3, &identity(4)).unwrap();
        let (v, w) = ideal_like_reduction(&f3).unwrap();
        let reduced = transform_dilation(&raw, &v, &w).unwrap();
        let direct = dilate_ideal_like(&f3, &reduced.env_covariance).unwrap();
        assert!(max_abs(&(&reduced.symplectic - &direct.symplectic)) < 1e-12);
        let ch = direct.channel().unwrap();
        assert_eq!(ch.transfer, identity(4));
        assert_eq!(ch.rank_invariants().unwrap().noise_rank, 2);
        assert!(dilate_ideal_like(&zeros(2, 2), &identity(4)).is_err());
    }
}
