//! Extended reals used for reference points and region boundaries.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Reference point `c` of the harmonic family, allowed to be `0` or `+inf`.
///
/// `Zero` and `Infinity` select the pure power functions rather than a
/// limit of the piecewise construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefPoint {
    Zero,
    Finite(f64),
    Infinity,
}

impl RefPoint {
    /// Maps `0.0` and `+inf` onto the sentinels.
    pub fn from_f64(c: f64) -> Self {
        if c == 0.0 {
            RefPoint::Zero
        } else if c == f64::INFINITY {
            RefPoint::Infinity
        } else {
            RefPoint::Finite(c)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            RefPoint::Zero => 0.0,
            RefPoint::Finite(c) => c,
            RefPoint::Infinity => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            RefPoint::Finite(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for RefPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefPoint::Zero => write!(f, "0"),
            RefPoint::Finite(c) => write!(f, "{c}"),
            RefPoint::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for RefPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ext_f64::serialize(&self.to_f64(), s)
    }
}

impl<'de> Deserialize<'de> for RefPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        ext_f64::deserialize(d).map(RefPoint::from_f64)
    }
}

/// Serde adapter writing `+inf` / `-inf` as strings and NaN as `null`.
pub mod ext_f64 {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_nan() {
            s.serialize_none()
        } else if *x == f64::INFINITY {
            s.serialize_str("inf")
        } else if *x == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(*x)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
        Null(()),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Null(()) => Ok(f64::NAN),
            Raw::Str(s) => match s.as_str() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                other => other.parse().map_err(D::Error::custom),
            },
        }
    }
}

/// Same as [`ext_f64`] for optional values.
pub mod opt_ext_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => super::ext_f64::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super::ext_f64")] f64);
        let v = Option::<Wrap>::deserialize(d)?;
        Ok(v.map(|w| w.0).filter(|x| !x.is_nan()))
    }
}
