//! Extended reals `R ∪ {-inf, +inf}`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// An element of the extended real line.
///
/// Finite values are never NaN, so the order below is total:
/// `NegInf < Finite(_) < PosInf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedValue {
    NegInf,
    Finite(f64),
    PosInf,
}

use ExtendedValue::{Finite, NegInf, PosInf};

impl ExtendedValue {
    pub const ZERO: ExtendedValue = Finite(0.0);

    /// Maps `±inf` onto the infinite variants. Returns `None` for NaN.
    pub fn from_f64(value: f64) -> Option<Self> {
        if value.is_nan() {
            None
        } else if value == f64::INFINITY {
            Some(PosInf)
        } else if value == f64::NEG_INFINITY {
            Some(NegInf)
        } else {
            Some(Finite(value))
        }
    }

    pub fn finite(value: f64) -> Self {
        Self::from_f64(value).expect("finite extended value constructed from NaN")
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn is_pos_inf(self) -> bool {
        matches!(self, PosInf)
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, NegInf)
    }

    pub fn as_finite(self) -> Option<f64> {
        match self {
            Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Lossy view as `f64`, with infinities mapped to IEEE infinities.
    pub fn to_f64(self) -> f64 {
        match self {
            NegInf => f64::NEG_INFINITY,
            Finite(v) => v,
            PosInf => f64::INFINITY,
        }
    }

    /// Sum with the conventions `(+inf) + finite = +inf` and
    /// `(-inf) + finite = -inf`. The sum `(+inf) + (-inf)` is an error.
    pub fn checked_add(self, other: Self) -> Result<Self> {
        match (self, other) {
            (PosInf, NegInf) | (NegInf, PosInf) => Err(Error::UndefinedSum),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (Finite(a), Finite(b)) => Ok(Self::from_f64(a + b).unwrap_or(PosInf)),
        }
    }

    pub fn checked_sub(self, other: Self) -> Result<Self> {
        self.checked_add(-other)
    }

    /// Adds a finite real.
    pub fn add_finite(self, value: f64) -> Self {
        match self {
            Finite(v) => Self::from_f64(v + value).unwrap_or(PosInf),
            other => other,
        }
    }

    /// Multiplies by a nonnegative real, with `0 * (±inf) = 0`.
    pub fn scale(self, factor: f64) -> Self {
        debug_assert!(factor >= 0.0);
        match self {
            _ if factor == 0.0 => Self::ZERO,
            Finite(v) => Finite(v * factor),
            other => other,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl std::ops::Neg for ExtendedValue {
    type Output = ExtendedValue;

    fn neg(self) -> Self::Output {
        match self {
            NegInf => PosInf,
            Finite(v) => Finite(-v),
            PosInf => NegInf,
        }
    }
}

impl From<f64> for ExtendedValue {
    fn from(value: f64) -> Self {
        Self::finite(value)
    }
}

impl Eq for ExtendedValue {}

impl PartialOrd for ExtendedValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Finite(a), Finite(b)) => a.total_cmp(b),
            (a, b) => rank(a).cmp(&rank(b)),
        }
    }
}

fn rank(value: &ExtendedValue) -> u8 {
    match value {
        NegInf => 0,
        Finite(_) => 1,
        PosInf => 2,
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => f.write_str("-inf"),
            Finite(v) => write!(f, "{v}"),
            PosInf => f.write_str("+inf"),
        }
    }
}

/// Finite values serialize as numbers, infinities as the strings `"+inf"` / `"-inf"`.
impl Serialize for ExtendedValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Finite(v) => serializer.serialize_f64(*v),
            NegInf => serializer.serialize_str("-inf"),
            PosInf => serializer.serialize_str("+inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn infinite_sums_follow_conventions() {
        assert_eq!(PosInf.checked_add(Finite(3.0)), Ok(PosInf));
        assert_eq!(NegInf.checked_add(Finite(-3.0)), Ok(NegInf));
        assert_eq!(Finite(1.5).checked_add(Finite(2.0)), Ok(Finite(3.5)));
        assert_eq!(PosInf.checked_add(NegInf), Err(Error::UndefinedSum));
        assert_eq!(NegInf.checked_add(PosInf), Err(Error::UndefinedSum));
    }

    #[test]
    fn nan_is_rejected() {
        assert_eq!(ExtendedValue::from_f64(f64::NAN), None);
        assert_eq!(ExtendedValue::from_f64(f64::INFINITY), Some(PosInf));
    }

    #[test]
    fn serializes_infinities_as_strings() {
        let json = serde_json::to_string(&vec![NegInf, Finite(0.5), PosInf]).unwrap();
        assert_eq!(json, r#"["-inf",0.5,"+inf"]"#);
    }

    fn extended() -> impl Strategy<Value = ExtendedValue> {
        prop_oneof![
            Just(NegInf),
            Just(PosInf),
            (-1e6f64..1e6).prop_map(Finite),
        ]
    }

    proptest! {
        #[test]
        fn order_is_total_and_bounded(a in extended(), b in extended(), x in -1e6f64..1e6) {
            prop_assert!(NegInf < Finite(x) && Finite(x) < PosInf);
            let forward = a.cmp(&b);
            prop_assert_eq!(forward, b.cmp(&a).reverse());
        }

        #[test]
        fn addition_is_commutative_where_defined(a in extended(), b in extended()) {
            prop_assert_eq!(a.checked_add(b), b.checked_add(a));
        }
    }
}
