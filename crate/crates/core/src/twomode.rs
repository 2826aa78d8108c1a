//! Two-mode canonical channels: Jordan classes, thermal thresholds,
//! composition rules, zero-capacity bounds and the squeezing search.

use crate::channel::GaussianChannel;
use crate::degradability::{classify, weak_complement, DegradabilityVerdict, VerdictKind};
use crate::dilation::canonical_dilation;
use crate::error::{Error, Result};
use crate::linalg::{identity, max_abs, Matrix};
use crate::state::{two_mode_squeezer, TwoModeStandardForm};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassKind {
    /// Diagonal with distinct entries.
    A1,
    /// Multiple of the identity.
    A2,
    /// Defective (single Jordan block).
    B,
    /// Complex eigenvalues `a ± i b`.
    C,
}

impl ClassKind {
    /// The coarse family letter used in the composition table.
    pub fn family(self) -> char {
        match self {
            ClassKind::A1 | ClassKind::A2 => 'A',
            ClassKind::B => 'B',
            ClassKind::C => 'C',
        }
    }
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassKind::A1 => "A1",
            ClassKind::A2 => "A2",
            ClassKind::B => "B",
            ClassKind::C => "C",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoModeClass {
    pub kind: ClassKind,
    pub a: f64,
    /// Second diagonal entry for A1/A2, the imaginary part for C, unused for B.
    pub b: f64,
}

impl TwoModeClass {
    pub fn new(kind: ClassKind, a: f64, b: f64) -> Result<Self> {
        let cls = Self { kind, a, b };
        cls.check()?;
        Ok(cls)
    }

    /// `diag(a, b)`, classified as A1 or A2.
    pub fn diagonal(a: f64, b: f64) -> Self {
        let kind = if a == b { ClassKind::A2 } else { ClassKind::A1 };
        Self { kind, a, b }
    }

    pub fn defective(a: f64) -> Self {
        Self {
            kind: ClassKind::B,
            a,
            b: 0.0,
        }
    }

    pub fn complex(a: f64, b: f64) -> Self {
        Self {
            kind: ClassKind::C,
            a,
            b,
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite()) {
            return Err(Error::NonFinite);
        }
        match self.kind {
            ClassKind::A1 if self.a == self.b => Err(Error::InvalidClass("A1 requires a != b")),
            ClassKind::A2 if self.a != self.b => Err(Error::InvalidClass("A2 requires a == b")),
            ClassKind::C if self.b == 0.0 => Err(Error::InvalidClass("C requires b != 0")),
            _ => Ok(()),
        }
    }
}

pub fn jordan_block(cls: &TwoModeClass) -> Result<Matrix> {
    cls.check()?;
    let (a, b) = (cls.a, cls.b);
    Ok(match cls.kind {
        ClassKind::A1 | ClassKind::A2 => Matrix::from_row_slice(2, 2, &[a, 0.0, 0.0, b]),
        ClassKind::B => Matrix::from_row_slice(2, 2, &[a, 1.0, 0.0, a]),
        ClassKind::C => Matrix::from_row_slice(2, 2, &[a, b, -b, a]),
    })
}

/// Real Jordan class of a 2x2 matrix.
pub fn classify_block(j: &Matrix, tol: f64) -> Result<TwoModeClass> {
    crate::linalg::ensure_shape(j, 2, 2, "two-mode J")?;
    let trace = j[(0, 0)] + j[(1, 1)];
    let det = j.determinant();
    let disc = trace * trace - 4.0 * det;
    let scale = max_abs(j).powi(2).max(1.0);
    let half = trace / 2.0;
    if disc < -tol * scale {
        return Ok(TwoModeClass::complex(half, (-disc).sqrt() / 2.0));
    }
    if disc <= tol * scale {
        let shifted = j - identity(2) * half;
        return Ok(if max_abs(&shifted) <= tol.sqrt() * scale.sqrt() {
            TwoModeClass::diagonal(half, half)
        } else {
            TwoModeClass::defective(half)
        });
    }
    let root = disc.sqrt() / 2.0;
    Ok(TwoModeClass::diagonal(half + root, half - root))
}

/// `N1(a) = (1/2) [-1 + |2a - 1| / (2 sqrt(a (a - 1)))]` for `a > 1` or `a < 0`.
pub fn n1_threshold(a: f64) -> Result<f64> {
    if !!(0.0..=1.0).contains(&a) {
        return Err(Error::Domain {
            name: "a",
            value: a,
            reason: "N1 needs a(a - 1) > 0",
        });
    }
    Ok(0.5 * (-1.0 + 0.5 * (2.0 * a - 1.0).abs() / (a * (a - 1.0)).sqrt()))
}

/// `N2(a, b) = (1/2) [-1 + sqrt(1 + 4 b^2 / (1 - 2a)^2)]` for `a != 1/2`.
pub fn n2_threshold(a: f64, b: f64) -> Result<f64> {
    let gap = 1.0 - 2.0 * a;
    if gap.abs() <= 1e-12 {
        return Err(Error::Domain {
            name: "a",
            value: a,
            reason: "N2 diverges at a = 1/2",
        });
    }
    Ok(0.5 * (-1.0 + (1.0 + 4.0 * b * b / (gap * gap)).sqrt()))
}

const BOUNDARY_TOL: f64 = 1e-9;

/// Closed-form verdict for a canonical two-mode channel whose environment is
/// the thermal state `(2N + 1) 1`.
pub fn thermal_classify(cls: &TwoModeClass, occupation: f64) -> Result<VerdictKind> {
    cls.check()?;
    if !(occupation >= 0.0 && occupation.is_finite()) {
        return Err(Error::NegativeOccupation(occupation));
    }
    let reached = |threshold: f64| occupation >= threshold - 1e-12;
    Ok(match cls.kind {
        ClassKind::A1 | ClassKind::A2 => {
            let (lo, hi) = (cls.a.min(cls.b), cls.a.max(cls.b));
            let wd = lo >= 0.5 - BOUNDARY_TOL;
            let ad = hi <= 0.5 + BOUNDARY_TOL;
            VerdictKind::from_flags(wd, ad)
        }
        ClassKind::B => {
            if (0.0..=1.0).contains(&cls.a) {
                VerdictKind::Neither
            } else {
                let above = reached(n1_threshold(cls.a)?);
                VerdictKind::from_flags(above && cls.a > 1.0, above && cls.a < 0.0)
            }
        }
        ClassKind::C => {
            let above = reached(n2_threshold(cls.a, cls.b)?);
            VerdictKind::from_flags(above && cls.a > 0.5, above && cls.a < 0.5)
        }
    })
}

/// Canonical two-mode channel and its weak complement for a given
/// environment covariance.
pub fn canonical_pair(
    j: &Matrix,
    env_covariance: &Matrix,
) -> Result<(GaussianChannel, GaussianChannel)> {
    let d = canonical_dilation(j, env_covariance)?;
    Ok((d.channel()?, weak_complement(&d)?))
}

/// Verdict built from the W matrix of the canonical dilation.
pub fn canonical_verdict(j: &Matrix, env_covariance: &Matrix, tol: f64) -> Result<DegradabilityVerdict> {
    let (ch, comp) = canonical_pair(j, env_covariance)?;
    classify(&ch, &comp, tol)
}

pub fn thermal_verdict(cls: &TwoModeClass, occupation: f64, tol: f64) -> Result<DegradabilityVerdict> {
    let env = identity(4) * (2.0 * occupation + 1.0);
    canonical_verdict(&jordan_block(cls)?, &env, tol)
}

/// Allowed outcome classes of `second ∘ first` by family.
pub fn allowed_composition(first: ClassKind, second: ClassKind) -> BTreeSet<ClassKind> {
    use ClassKind::*;
    let (x, y) = {
        let (p, q) = (first.family(), second.family());
        if p <= q {
            (p, q)
        } else {
            (q, p)
        }
    };
    let set: &[ClassKind] = match (x, y) {
        ('A', 'A') => &[A1, A2],
        ('A', 'B') => &[A1, B],
        ('A', 'C') => &[A1, B, C],
        ('B', 'B') => &[A2, B],
        ('B', 'C') => &[A1, B, C],
        ('C', 'C') => &[A1, A2, C],
        _ => unreachable!("families are A, B or C"),
    };
    set.iter().copied().collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompositionOutcome {
    pub allowed: BTreeSet<ClassKind>,
    /// `J_second J_first`.
    pub product: Matrix,
    pub concrete: TwoModeClass,
}

impl CompositionOutcome {
    pub fn conforms(&self) -> bool {
        self.allowed.contains(&self.concrete.kind)
    }
}

pub fn compose_class(first: &TwoModeClass, second: &TwoModeClass) -> Result<CompositionOutcome> {
    let product = jordan_block(second)? * jordan_block(first)?;
    let concrete = classify_block(&product, BOUNDARY_TOL)?;
    Ok(CompositionOutcome {
        allowed: allowed_composition(first.kind, second.kind),
        product,
        concrete,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundVariant {
    /// Class-C channel after an AD beam-splitter pair.
    First,
    /// AD beam-splitter pair after the class-C channel.
    Second,
}

/// Noise level above which a class-C channel factorizes through an
/// anti-degradable map and so has zero quantum capacity.
pub fn zero_capacity_bound(a: f64, b: f64, variant: BoundVariant) -> Result<f64> {
    let shift = b * b + (a - 1.0) * (a - 1.0);
    if shift == 0.0 || (variant == BoundVariant::Second && a == 0.0 && b == 0.0) {
        return Err(Error::Domain {
            name: "b",
            value: b,
            reason: "bound diverges at b = 0, a = 1",
        });
    }
    let core = 1.0 - 4.0 * a + 8.0 * a * a + 8.0 * b * b;
    let ratio = match variant {
        BoundVariant::First => 5.0 * core / shift,
        BoundVariant::Second => {
            (1.0 + 4.0 * a * a + 4.0 * b * b) * core / (4.0 * shift * (a * a + b * b))
        }
    };
    Ok(0.25 * (ratio.sqrt() - 2.0))
}

/// Occupation grid used when comparing verdicts in [`decoupling_search`].
pub fn decoupling_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 * 0.1).collect()
}

pub const DECOUPLING_R_MAX: f64 = 3.0;
const DECOUPLING_SCAN_STEP: f64 = 0.01;
const DECOUPLING_RESOLUTION: f64 = 1e-3;

fn decoupling_agrees(form: &TwoModeStandardForm, a: f64, squeeze: f64) -> Result<bool> {
    let v = two_mode_squeezer(squeeze, 0.0);
    let coupled = jordan_block(&TwoModeClass::defective(a))?;
    let decoupled = jordan_block(&TwoModeClass::diagonal(a, a))?;
    for occupation in decoupling_grid() {
        let shifted = TwoModeStandardForm {
            x: form.x + 2.0 * occupation,
            y: form.y + 2.0 * occupation,
            ..*form
        };
        let env = &v * shifted.covariance() * v.transpose();
        let lhs = canonical_verdict(&coupled, &env, BOUNDARY_TOL)?.kind;
        let rhs = canonical_verdict(&decoupled, &env, BOUNDARY_TOL)?.kind;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest squeezing `r` of the environment `V(r) gamma_E V(r)^T`,
/// `gamma_E` in symmetric standard form `(x, x, 0, z+)`, at which the
/// defective channel `J1(a)` gets the same verdict as `a 1` on every
/// occupation of [`decoupling_grid`] (added as `2N` to `x`). The agreement
/// point is bracketed on a grid of step 0.01 and bisected to `1e-3`.
/// `None` if no agreement is found up to [`DECOUPLING_R_MAX`].
pub fn decoupling_search(x: f64, z_plus: f64, a: f64) -> Result<Option<f64>> {
    let form = TwoModeStandardForm::symmetric(x, z_plus);
    form.check()?;
    if decoupling_agrees(&form, a, 0.0)? {
        return Ok(Some(0.0));
    }
    let steps = (DECOUPLING_R_MAX / DECOUPLING_SCAN_STEP).round() as usize;
    let mut below = 0.0;
    for k in 1..=steps {
        let r = k as f64 * DECOUPLING_SCAN_STEP;
        if decoupling_agrees(&form, a, r)? {
            let mut above = r;
            while above - below > DECOUPLING_RESOLUTION {
                let mid = 0.5 * (below + above);
                if decoupling_agrees(&form, a, mid)? {
                    above = mid;
                } else {
                    below = mid;
                }
            }
            return Ok(Some(above));
        }
        below = r;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn jordan_examples() {
        assert_eq!(
            jordan_block(&TwoModeClass::diagonal(0.5, 0.5)).unwrap(),
            Matrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5])
        );
        assert_eq!(
            jordan_block(&TwoModeClass::defective(2.0)).unwrap(),
            Matrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0])
        );
        assert_eq!(
            jordan_block(&TwoModeClass::complex(1.0, 1.0)).unwrap(),
            Matrix::from_row_slice(2, 2, &[1.0, 1.0, -1.0, 1.0])
        );
        assert!(TwoModeClass::new(ClassKind::C, 1.0, 0.0).is_err());
        assert!(TwoModeClass::new(ClassKind::A1, 1.0, 1.0).is_err());
    }

    #[test]
    fn block_classification() {
        let a1 = classify_block(&Matrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]), 1e-9).unwrap();
        assert_eq!(a1.kind, ClassKind::A1);
        let b = classify_block(&Matrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]), 1e-9).unwrap();
        assert_eq!(b.kind, ClassKind::B);
        let c = classify_block(&Matrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]), 1e-9).unwrap();
        assert_eq!(c.kind, ClassKind::C);
        assert_abs_diff_eq!(c.a, 0.0);
        assert_abs_diff_eq!(c.b, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn threshold_values() {
        assert_abs_diff_eq!(n1_threshold(2.0).unwrap(), 0.030330, epsilon = 1e-6);
        assert_abs_diff_eq!(n1_threshold(1.25).unwrap(), 0.170820, epsilon = 1e-6);
        assert!(n1_threshold(100.0).unwrap() < 1e-3);
        assert!(n1_threshold(0.5).is_err());
        assert_abs_diff_eq!(n2_threshold(0.0, 1.0).unwrap(), 0.618034, epsilon = 1e-6);
        assert_abs_diff_eq!(n2_threshold(1.0, 1.0).unwrap(), 0.618034, epsilon = 1e-6);
        assert_eq!(n2_threshold(0.3, 0.0).unwrap(), 0.0);
        assert!(n2_threshold(0.5, 1.0).is_err());
    }

    #[test]
    fn thermal_rules() {
        let wd = thermal_classify(&TwoModeClass::diagonal(0.8, 0.8), 5.0).unwrap();
        assert_eq!(wd, VerdictKind::WD);
        assert_eq!(
            thermal_classify(&TwoModeClass::diagonal(0.3, 0.3), 0.0).unwrap(),
            VerdictKind::AD
        );
        assert_eq!(
            thermal_classify(&TwoModeClass::defective(2.0), 0.05).unwrap(),
            VerdictKind::WD
        );
        assert_eq!(
            thermal_classify(&TwoModeClass::complex(0.0, 1.0), 0.5).unwrap(),
            VerdictKind::Neither
        );
    }

    #[test]
    fn first_principles_examples() {
        let v = thermal_verdict(&TwoModeClass::diagonal(0.8, 0.8), 1.3, 1e-9).unwrap();
        assert_eq!(v.kind, VerdictKind::WD);
        let v = thermal_verdict(&TwoModeClass::diagonal(0.3, 0.3), 0.4, 1e-9).unwrap();
        assert_eq!(v.kind, VerdictKind::AD);
        let v = thermal_verdict(&TwoModeClass::defective(2.0), 0.0, 1e-9).unwrap();
        assert_eq!(v.kind, VerdictKind::Neither);
        let v = thermal_verdict(&TwoModeClass::complex(0.0, 1.0), 1.0, 1e-9).unwrap();
        assert_eq!(v.kind, VerdictKind::AD);
    }

    #[test]
    fn composition_examples() {
        let out = compose_class(&TwoModeClass::diagonal(2.0, 3.0), &TwoModeClass::diagonal(0.5, 4.0))
            .unwrap();
        assert!(out.conforms());
        assert_eq!(out.product, Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 12.0]));
        let out = compose_class(&TwoModeClass::defective(1.0), &TwoModeClass::defective(-1.0)).unwrap();
        assert_eq!(out.concrete.kind, ClassKind::A2);
        let out = compose_class(&TwoModeClass::complex(0.7, 0.4), &TwoModeClass::complex(0.7, -0.4))
            .unwrap();
        assert_eq!(out.concrete.kind.family(), 'A');
        assert!(out.conforms());
    }

    #[test]
    fn bound_values() {
        let first = zero_capacity_bound(1.0, 1.0, BoundVariant::First).unwrap();
        let second = zero_capacity_bound(1.0, 1.0, BoundVariant::Second).unwrap();
        assert_abs_diff_eq!(first, (65f64.sqrt() - 2.0) / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(second, ((117.0f64 / 8.0).sqrt() - 2.0) / 4.0, epsilon = 1e-12);
        assert!(zero_capacity_bound(1.0, 0.0, BoundVariant::First).is_err());
    }

    #[test]
    fn decoupling_agrees_immediately_when_far_above_threshold() {
        assert_eq!(decoupling_search(2.0, 0.0, 2.0).unwrap(), Some(0.0));
    }

    #[test]
    fn decoupling_rejects_invalid_environment() {
        assert!(decoupling_search(1.0, 0.5, 2.0).is_err());
    }
}
