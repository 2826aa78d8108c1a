//! Seeded generators for symplectic matrices, states and channels.

use crate::channel::{compose, conjugate, tensor_product, GaussianChannel};
use crate::error::Result;
use crate::linalg::{block2x2, identity, symmetrize, zeros, Matrix};
use crate::twomode::{ClassKind, TwoModeClass};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type Rng64 = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, half_width: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-half_width..=half_width))
}

fn random_symmetric<R: Rng>(rng: &mut R, dim: usize, half_width: f64) -> Matrix {
    symmetrize(&uniform_matrix(rng, dim, dim, half_width))
}

/// `[[L, 0], [0, L^-T]] [[1, A], [0, 1]] [[1, 0], [B, 1]]` with `A`, `B`
/// symmetric and `L` a perturbation of the identity. `scale` bounds the
/// entries of the perturbations.
pub fn random_symplectic<R: Rng>(rng: &mut R, modes: usize, scale: f64) -> Matrix {
    let eye = identity(modes);
    let zero = zeros(modes, modes);
    let (stretch, inv_t) = loop {
        let l = &eye + uniform_matrix(rng, modes, modes, scale / (modes as f64).sqrt());
        if let Some(inv) = l.clone().try_inverse() {
            if l.determinant().abs() > 0.2 {
                break (l, inv.transpose());
            }
        }
    };
    let shear_a = random_symmetric(rng, modes, scale);
    let shear_b = random_symmetric(rng, modes, scale);
    block2x2(&stretch, &zero, &zero, &inv_t)
        * block2x2(&eye, &shear_a, &zero, &eye)
        * block2x2(&eye, &zero, &shear_b, &eye)
}

/// `G G^T` with `G` of size `dim x rank`.
pub fn random_psd<R: Rng>(rng: &mut R, dim: usize, rank: usize, scale: f64) -> Matrix {
    let g = uniform_matrix(rng, dim, rank, scale);
    symmetrize(&(&g * g.transpose()))
}

/// `S (D ⊕ D) S^T` with symplectic eigenvalues in `[1, 3]`.
pub fn random_covariance<R: Rng>(rng: &mut R, modes: usize) -> Matrix {
    let s = random_symplectic(rng, modes, 0.4);
    let mut d: Vec<f64> = (0..modes).map(|_| rng.gen_range(1.0..3.0)).collect();
    d.extend_from_within(..);
    symmetrize(&(&s * crate::linalg::diagonal(&d) * s.transpose()))
}

/// Permutation `P` with `P sigma_{a+b} P^T = sigma_a ⊕ sigma_b`.
pub fn split_permutation(first: usize, second: usize) -> Matrix {
    let total = first + second;
    let mut p = zeros(2 * total, 2 * total);
    let mut row = 0;
    for (offset, count) in [(0, first), (first, second)] {
        for k in 0..count {
            p[(row + k, offset + k)] = 1.0;
            p[(row + count + k, total + offset + k)] = 1.0;
        }
        row += 2 * count;
    }
    p
}

/// Minimal-noise channel obtained from a random symplectic on `n` system
/// and `env_modes` vacuum environment modes.
pub fn random_minimal_channel<R: Rng>(
    rng: &mut R,
    modes: usize,
    env_modes: usize,
) -> Result<GaussianChannel> {
    let p = split_permutation(modes, env_modes);
    let s = &p * random_symplectic(rng, modes + env_modes, 0.5) * p.transpose();
    let dim = 2 * modes;
    let s1 = crate::linalg::block(&s, 0, 0, dim, dim);
    let s2 = crate::linalg::block(&s, 0, dim, dim, 2 * env_modes);
    GaussianChannel::centered(s1.transpose(), symmetrize(&(&s2 * s2.transpose())))
}

pub fn random_additive<R: Rng>(rng: &mut R, modes: usize, rank: usize) -> Result<GaussianChannel> {
    let dim = 2 * modes;
    GaussianChannel::additive_noise(random_psd(rng, dim, rank, 0.6))
}

/// Random symplectic conjugation of a minimal-noise channel followed by
/// additive noise. The environment size and the additive rank are drawn at
/// random, so all three noise classes occur.
pub fn random_channel<R: Rng>(rng: &mut R, modes: usize) -> Result<GaussianChannel> {
    let env_modes = rng.gen_range(1..=modes);
    let additive_rank = rng.gen_range(0..=2 * modes);
    random_structured_channel(rng, modes, env_modes, additive_rank)
}

pub fn random_structured_channel<R: Rng>(
    rng: &mut R,
    modes: usize,
    env_modes: usize,
    additive_rank: usize,
) -> Result<GaussianChannel> {
    let minimal = random_minimal_channel(rng, modes, env_modes)?;
    let noisy = compose(&minimal, &random_additive(rng, modes, additive_rank)?)?;
    let before = random_symplectic(rng, modes, 0.3);
    let after = random_symplectic(rng, modes, 0.3);
    conjugate(&noisy, &before, &after)
}

/// Class-(i) channel; minimal-noise when `minimal`, otherwise with full-rank
/// additive noise on top.
pub fn random_class_one<R: Rng>(rng: &mut R, modes: usize, minimal: bool) -> Result<GaussianChannel> {
    let additive_rank = if minimal { 0 } else { 2 * modes };
    random_structured_channel(rng, modes, modes, additive_rank)
}

/// Random parameters for a Jordan class, in `[-3, 3]`.
pub fn random_class<R: Rng>(rng: &mut R, kind: ClassKind) -> TwoModeClass {
    let mut draw = || rng.gen_range(-3.0..3.0);
    match kind {
        ClassKind::A1 => {
            let a = draw();
            let mut b = draw();
            while b == a {
                b = draw();
            }
            TwoModeClass::diagonal(a, b)
        }
        ClassKind::A2 => {
            let a = draw();
            TwoModeClass::diagonal(a, a)
        }
        ClassKind::B => TwoModeClass::defective(draw()),
        ClassKind::C => {
            let a = draw();
            let mut b = draw();
            while b == 0.0 {
                b = draw();
            }
            TwoModeClass::complex(a, b)
        }
    }
}

/// Product of single-mode thermal channels with random gains.
pub fn random_thermal_product<R: Rng>(rng: &mut R, modes: usize) -> Result<GaussianChannel> {
    let factors = (0..modes)
        .map(|_| {
            let eta: f64 = rng.gen_range(0.05..2.5);
            let occupation: f64 = rng.gen_range(0.0..1.5);
            GaussianChannel::thermal_gain(1, eta, occupation)
        })
        .collect::<Result<Vec<_>>>()?;
    tensor_product(&factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::direct_sum;
    use crate::state::validate_state;
    use crate::symplectic::{is_symplectic, standard_form};

    #[test]
    fn symplectic_samples() {
        let mut rng = seeded(1);
        for n in 1..=4 {
            let s = random_symplectic(&mut rng, n, 0.5);
            assert!(is_symplectic(&s, &standard_form(n), 1e-10).unwrap());
        }
    }

    #[test]
    fn split_permutation_maps_forms() {
        let p = split_permutation(2, 3);
        let lhs = &p * standard_form(5) * p.transpose();
        let rhs = direct_sum(&standard_form(2), &standard_form(3));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn samples_are_valid() {
        let mut rng = seeded(7);
        for n in 1..=3 {
            assert!(validate_state(&random_covariance(&mut rng, n), 1e-9).unwrap().0);
            for _ in 0..5 {
                assert!(random_channel(&mut rng, n).unwrap().validate_cp(1e-9).0);
            }
            assert!(random_thermal_product(&mut rng, n).unwrap().validate_cp(1e-9).0);
        }
    }

    #[test]
    fn class_one_minimality() {
        let mut rng = seeded(3);
        let minimal = random_class_one(&mut rng, 2, true).unwrap();
        assert!(minimal.is_minimal_noise(1e-8).unwrap());
        let noisy = random_class_one(&mut rng, 2, false).unwrap();
        assert!(!noisy.is_minimal_noise(1e-8).unwrap());
    }

    #[test]
    fn reproducible() {
        let a = random_channel(&mut seeded(11), 2).unwrap();
        let b = random_channel(&mut seeded(11), 2).unwrap();
        assert_eq!(a, b);
    }
}
