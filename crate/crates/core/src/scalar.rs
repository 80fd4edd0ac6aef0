//! The max-plus semiring carrier: the reals extended with a bottom element.
//!
//! Addition is `max`, multiplication is `+`. The zero element epsilon stands
//! for "never happens" and is absorbing for multiplication; the unit is `0`.
//! Epsilon is a dedicated variant rather than `f64::NEG_INFINITY` so that no
//! IEEE corner case (`-inf + inf`, NaN propagation) can leak into the algebra.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used where comparisons on non-integer data are needed
/// (star-divergence prechecks, critical-node detection). All shipped golden
/// data is integer-valued and therefore tolerance-free.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Element of the max-plus semiring: a finite real or the bottom element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MpScalar {
    /// The max-plus zero, conventionally written as minus infinity.
    Epsilon,
    /// A finite real (never NaN or an infinity).
    Finite(f64),
}

pub use MpScalar::Epsilon;

impl MpScalar {
    /// The max-plus unit element (conventional 0).
    pub const ONE: MpScalar = MpScalar::Finite(0.0);

    /// Wraps a finite real. Panics on NaN or infinite input; use
    /// [`MpScalar::try_finite`] at untrusted boundaries.
    pub fn finite(value: f64) -> Self {
        assert!(value.is_finite(), "MpScalar requires a finite value, got {value}");
        MpScalar::Finite(value)
    }

    pub fn try_finite(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(MpScalar::Finite(value))
        } else {
            Err(Error::NonFiniteValue(value))
        }
    }

    /// Maps the extended real line onto the carrier: `-inf` becomes epsilon,
    /// finite values stay finite, anything else is rejected.
    pub fn from_extended(value: f64) -> Result<Self> {
        if value == f64::NEG_INFINITY {
            Ok(MpScalar::Epsilon)
        } else {
            Self::try_finite(value)
        }
    }

    pub fn is_epsilon(self) -> bool {
        matches!(self, MpScalar::Epsilon)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, MpScalar::Finite(_))
    }

    /// The finite value, if any.
    pub fn as_f64(self) -> Option<f64> {
        match self {
            MpScalar::Epsilon => None,
            MpScalar::Finite(v) => Some(v),
        }
    }

    /// Max-plus addition: the maximum. Epsilon is neutral.
    pub fn oplus(self, rhs: Self) -> Self {
        match (self, rhs) {
            (MpScalar::Epsilon, b) => b,
            (a, MpScalar::Epsilon) => a,
            (MpScalar::Finite(a), MpScalar::Finite(b)) => MpScalar::Finite(a.max(b)),
        }
    }

    /// Max-plus multiplication: conventional addition. Epsilon is absorbing.
    pub fn otimes(self, rhs: Self) -> Self {
        match (self, rhs) {
            (MpScalar::Finite(a), MpScalar::Finite(b)) => MpScalar::finite(a + b),
            _ => MpScalar::Epsilon,
        }
    }

    /// Max-plus power of a scalar: `c` copies multiplied together, i.e. `c * gamma`.
    pub fn mp_pow(self, c: u32) -> Self {
        match self {
            MpScalar::Epsilon => {
                if c == 0 {
                    MpScalar::ONE
                } else {
                    MpScalar::Epsilon
                }
            }
            MpScalar::Finite(v) => MpScalar::finite(c as f64 * v),
        }
    }
}

impl Eq for MpScalar {}

impl PartialOrd for MpScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MpScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (MpScalar::Epsilon, MpScalar::Epsilon) => Ordering::Equal,
            (MpScalar::Epsilon, MpScalar::Finite(_)) => Ordering::Less,
            (MpScalar::Finite(_), MpScalar::Epsilon) => Ordering::Greater,
            // Finite values are never NaN by construction.
            (MpScalar::Finite(a), MpScalar::Finite(b)) => a.partial_cmp(b).unwrap(),
        }
    }
}

impl fmt::Display for MpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MpScalar::Epsilon => write!(f, "-inf"),
            MpScalar::Finite(v) => write!(f, "{v}"),
        }
    }
}

// On the wire an entry is either a JSON number or the literal string "-inf".
impl Serialize for MpScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MpScalar::Epsilon => serializer.serialize_str("-inf"),
            MpScalar::Finite(v) => serializer.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for MpScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;
        impl de::Visitor<'_> for Visitor {
            type Value = MpScalar;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a finite number or the string \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<MpScalar, E> {
                MpScalar::try_finite(v).map_err(|_| E::custom(format!("non-finite entry {v}")))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<MpScalar, E> {
                self.visit_f64(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<MpScalar, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<MpScalar, E> {
                if s == "-inf" {
                    Ok(MpScalar::Epsilon)
                } else {
                    Err(E::custom(format!("unknown entry \"{s}\", expected \"-inf\" or a number")))
                }
            }
        }
        deserializer.deserialize_any(Visitor)
    }
}
