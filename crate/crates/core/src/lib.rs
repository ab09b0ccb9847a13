//! Cayley-Dickson operator algebra at desk scale.
//!
//! Levels v = 0..4 of the Cayley-Dickson ladder (reals, complexes,
//! quaternions, octonions, sedenions), finite-dimensional modules over them,
//! graded projection-valued measures, normal-operator synthesis/recovery,
//! factorization and polar identities, and multiparameter operator
//! semigroups with Stone-type generator recovery.
//!
//! `no_std`-compatible: build with `--no-default-features --features libm`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cd;
pub mod factor;
pub(crate) mod fp;
pub mod linalg;
pub mod spectral;
pub mod stone;

use core::fmt;

/// Error type shared by all modules.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Binary operation on operands from different algebra levels.
    LevelMismatch { lhs: u8, rhs: u8 },
    /// Level outside the supported range for the requested operation.
    UnsupportedLevel { v: u8 },
    /// Basis index out of range for the level's dimension.
    IndexOutOfRange { idx: usize, dim: usize },
    DivisionByZero,
    /// Argument was expected on the pure-imaginary unit sphere.
    NotPureUnit,
    /// Vector/matrix shape disagreement.
    ShapeMismatch { lhs: usize, rhs: usize },
    /// Projection-valued measure violates its invariants.
    InvalidPvm { residual: f64 },
    /// Operator is not (close to) a graded spectral synthesis.
    NotRepresentable { residual: f64 },
    /// Semigroup parameter outside the admissible cone.
    NotInOmega,
    /// Sample family is not orthogonal to tolerance.
    NotUnitary { residual: f64 },
    /// One-parameter samples hit the principal-branch boundary; the
    /// generator cannot be identified from this step size.
    Aliasing { theta_max: f64, step: f64 },
    /// Structural problem in an input specification.
    BadSpec(&'static str),
    /// Nothing to rank/evaluate.
    EmptyInput,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LevelMismatch { lhs, rhs } => {
                write!(f, "level mismatch: {lhs} vs {rhs}")
            }
            Error::UnsupportedLevel { v } => write!(f, "unsupported level v={v}"),
            Error::IndexOutOfRange { idx, dim } => {
                write!(f, "index {idx} out of range for dimension {dim}")
            }
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::NotPureUnit => write!(f, "argument must be a unit pure-imaginary number"),
            Error::ShapeMismatch { lhs, rhs } => {
                write!(f, "shape mismatch: {lhs} vs {rhs}")
            }
            Error::InvalidPvm { residual } => {
                write!(f, "projection-valued measure invalid (residual {residual:e})")
            }
            Error::NotRepresentable { residual } => {
                write!(f, "operator not in the representable class (residual {residual:e})")
            }
            Error::NotInOmega => write!(f, "parameter outside the semigroup cone"),
            Error::NotUnitary { residual } => {
                write!(f, "input not unitary (residual {residual:e})")
            }
            Error::Aliasing { theta_max, step } => write!(
                f,
                "phase {theta_max} at step {step} reaches the principal branch \
                 boundary; resample with a smaller step"
            ),
            Error::BadSpec(msg) => write!(f, "invalid specification: {msg}"),
            Error::EmptyInput => write!(f, "empty input"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
