//! Covariance-level numerics for multi-mode bosonic Gaussian channels.
//!
//! Phase-space coordinates are ordered `(Q1..Qn; P1..Pn)` everywhere, so the
//! symplectic form is `[[0, 1], [-1, 0]]` in `n x n` blocks. A channel acts on
//! covariance matrices as `gamma -> X^T gamma X + Y`.

pub mod channel;
pub mod config;
pub mod degradability;
pub mod dilation;
pub mod error;
pub mod hermitian;
pub mod io;
pub mod linalg;
pub mod random;
pub mod state;
pub mod symplectic;
pub mod twomode;

pub use channel::{GaussianChannel, NoiseClass, RankInvariants};
pub use config::Tolerances;
pub use degradability::{DegradabilityVerdict, VerdictKind};
pub use dilation::UnitaryDilation;
pub use error::{Error, Result};
pub use hermitian::HermitianPair;
pub use linalg::{Matrix, Vector};
pub use state::{GaussianState, TwoModeStandardForm};
pub use symplectic::SkewNormalForm;
pub use twomode::{ClassKind, TwoModeClass};
