//! Error and obstruction types shared across the crate.
//!
//! Two kinds of failure are kept apart: [`Error`] covers contract violations
//! of the algebra (center mismatch, reading past a truncation order, ...),
//! while [`Obstruction`] records a *mathematical* verdict: a coefficient that
//! no choice of the constants `C_i` can make vanish, tagged with the
//! condition it violates.

use std::fmt;

use thiserror::Error;

use crate::exactalg::affine::AffineForm;
use crate::exactalg::scalar::Scalar;
use crate::exactalg::series::Center;

/// Which condition on the potential failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationTag {
    /// Pole of order different from 4.
    Lemma3_1 { order: i64 },
    /// Leading coefficient not of the form `n(4n+1)(4n+3)(4n+4)`.
    Lemma3_2,
    /// One of `phi_{-3}, phi_{-2}, phi_{-1}` nonzero.
    Lemma3_4 { l: u32 },
    /// `phi_{4k-l}` nonzero for some `k = 1..n_i` (or `4r-1`, `4r-3` beyond).
    Theorem1_1 { k: u32, l: u32 },
    /// Pole at infinity (nonconstant polynomial tail).
    Infinity,
    /// Nonzero residue met while integrating step `step`.
    Residue { step: u32 },
    /// The linear system on the constants is inconsistent.
    Closure,
    /// Redundant self-test: principal parts vanished but the Taylor tail of
    /// `f_{g+1}` is not constant. Never expected to fire.
    TailSelfCheck,
    /// Input pole data does not satisfy the conjecture's coefficient pattern.
    ConjecturePattern,
}

impl fmt::Display for ViolationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationTag::Lemma3_1 { order } => write!(f, "Lemma3.1(pole order {order})"),
            ViolationTag::Lemma3_2 => write!(f, "Lemma3.2(quantization)"),
            ViolationTag::Lemma3_4 { l } => write!(f, "Lemma3.4(l={l})"),
            ViolationTag::Theorem1_1 { k, l } => write!(f, "Theorem1.1(k={k},l={l})"),
            ViolationTag::Infinity => write!(f, "Infinity"),
            ViolationTag::Residue { step } => write!(f, "Residue(step {step})"),
            ViolationTag::Closure => write!(f, "Closure"),
            ViolationTag::TailSelfCheck => write!(f, "TailSelfCheck"),
            ViolationTag::ConjecturePattern => write!(f, "ConjecturePattern"),
        }
    }
}

/// A coefficient that cannot be made to vanish, with its location.
#[derive(Clone, Debug, PartialEq)]
pub struct Obstruction {
    pub pole: Center,
    pub exponent: i64,
    pub value: AffineForm,
    pub tag: ViolationTag,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at {}, exponent {}: {}",
            self.tag, self.pole, self.exponent, self.value
        )
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error("series center mismatch: {left} vs {right}")]
    CenterMismatch { left: Center, right: Center },

    #[error("scalars from two different quadratic extensions cannot be combined")]
    FieldMismatch,

    #[error("product would be nonlinear in the constants C_i")]
    NonlinearInConstants,

    #[error("nonzero residue obstructs the antiderivative: {residue}")]
    ResidueNonZero { residue: AffineForm },

    #[error("cannot invert the zero series")]
    ZeroSeriesInverse,

    #[error("leading coefficient depends on the constants; cannot invert")]
    LeadingCoefficientNotScalar,

    #[error("insufficient truncation order: {0}")]
    InsufficientTruncation(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("t^2 - ({p})t - ({q}) is reducible over Q; not a field extension")]
    ReducibleExtension { p: String, q: String },

    #[error("half-period value needs sqrt(g2); no matching extension field is active")]
    UnsupportedHalfPeriod,

    #[error("unsupported potential shape: {0}")]
    UnsupportedShape(String),

    #[error("spectral-curve coefficient of z^{index} depends on x")]
    XDependence { index: usize },

    #[error("f0(sigma+{m}) vanishes; the determinant formula does not apply")]
    ResonantDenominator { m: i64 },

    #[error("logarithmic solution required at resonance m={m}: obstruction {obstruction}")]
    LogarithmRequired { m: i64, obstruction: Scalar },

    #[error("leading pole coefficient {phi4} is not of the form n(4n+1)(4n+3)(4n+4)")]
    NotQuantized { phi4: Scalar },

    #[error("coefficient still contains unresolved constants")]
    UnresolvedConstants,

    #[error("obstruction: {0}")]
    Obstruction(Box<Obstruction>),
}

impl Error {
    pub fn obstruction(o: Obstruction) -> Self {
        Error::Obstruction(Box::new(o))
    }

    /// True for errors that represent a mathematical verdict rather than a
    /// usage problem.
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::Obstruction(_) | Error::ResidueNonZero { .. } | Error::LogarithmRequired { .. }
        )
    }
}
