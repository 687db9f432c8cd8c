//! Error type shared by all modules of the crate.

use std::fmt;

/// Errors reported by the public API. Internal invariant violations
/// (engine bugs) panic instead via debug assertions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Arithmetic between coefficients of different generator families.
    FamilyMismatch,
    /// A series operation was asked for data outside its exact window.
    WindowUnderrun { degree: i64, low: i64, high: i64 },
    /// Precondition violation on a series operation (exp/log/invert).
    SeriesPrecondition(String),
    /// The (g, n) pair is outside the stable range of the recursion.
    UnstableGn { g: u32, n: u32 },
    /// An index argument was out of its documented range.
    IndexOutOfRange(String),
    /// An operation received a correlator from the wrong curve.
    WrongCurve(String),
    /// A discrete-volume class kept an odd power of a boundary variable.
    OddPowerSurvivor { class: Vec<u8>, monomial: Vec<u16> },
    /// Inverse Laplace transform met an odd pole-order offset.
    OddOrder { order: u32 },
    /// Nonzero top-degree parts of distinct parity classes disagree.
    ParityDisagreement,
    /// Numeric evaluation outside the convergence domain.
    NumericDomain(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::FamilyMismatch => write!(f, "coefficient family mismatch"),
            Error::WindowUnderrun { degree, low, high } => write!(
                f,
                "series window underrun: degree {degree} outside exact window [{low}, {high}]"
            ),
            Error::SeriesPrecondition(msg) => write!(f, "series precondition: {msg}"),
            Error::UnstableGn { g, n } => write!(f, "unstable (g,n) = ({g},{n})"),
            Error::IndexOutOfRange(msg) => write!(f, "index out of range: {msg}"),
            Error::WrongCurve(msg) => write!(f, "wrong curve: {msg}"),
            Error::OddPowerSurvivor { class, monomial } => write!(
                f,
                "odd power survived in parity class {class:?}: monomial {monomial:?}"
            ),
            Error::OddOrder { order } => {
                write!(f, "odd pole-order offset {order} in inverse Laplace transform")
            }
            Error::ParityDisagreement => {
                write!(f, "nonzero top-degree parts of parity classes disagree")
            }
            Error::NumericDomain(msg) => write!(f, "numeric domain: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
