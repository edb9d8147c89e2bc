//! Extended integer costs: a finite value or one of the two infinities.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Integer edge weight.
pub type Weight = i64;

/// A cost in `Z ∪ {-∞, +∞}`.
///
/// Variant order gives the total order `-∞ < finite < +∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtCost {
    NegInf,
    Finite(Weight),
    PosInf,
}

/// `(+∞) + (-∞)` has no meaning for min-cost reachability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("undefined sum of +inf and -inf")]
pub struct IndeterminateSum;

impl ExtCost {
    pub const ZERO: ExtCost = ExtCost::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtCost::Finite(_))
    }

    pub fn finite(self) -> Option<Weight> {
        match self {
            ExtCost::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn checked_add(self, other: ExtCost) -> Result<ExtCost, IndeterminateSum> {
        use ExtCost::*;
        match (self, other) {
            (PosInf, NegInf) | (NegInf, PosInf) => Err(IndeterminateSum),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
        }
    }

    pub fn min(self, other: ExtCost) -> ExtCost {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: ExtCost) -> ExtCost {
        std::cmp::max(self, other)
    }

    /// Compares against a plain integer.
    pub fn cmp_weight(self, w: Weight) -> Ordering {
        self.cmp(&ExtCost::Finite(w))
    }
}

/// Adding a finite weight never hits the indeterminate case.
impl Add<Weight> for ExtCost {
    type Output = ExtCost;

    fn add(self, w: Weight) -> ExtCost {
        match self {
            ExtCost::Finite(v) => ExtCost::Finite(v + w),
            inf => inf,
        }
    }
}

impl From<Weight> for ExtCost {
    fn from(w: Weight) -> Self {
        ExtCost::Finite(w)
    }
}

impl fmt::Display for ExtCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtCost::NegInf => f.write_str("-inf"),
            ExtCost::Finite(v) => write!(f, "{v}"),
            ExtCost::PosInf => f.write_str("+inf"),
        }
    }
}

// Serialized as a JSON integer, or the strings "+inf" / "-inf".
impl Serialize for ExtCost {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtCost::Finite(v) => s.serialize_i64(*v),
            ExtCost::PosInf => s.serialize_str("+inf"),
            ExtCost::NegInf => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtCost {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Sym(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(v) => Ok(ExtCost::Finite(v)),
            Repr::Sym(s) if s == "+inf" => Ok(ExtCost::PosInf),
            Repr::Sym(s) if s == "-inf" => Ok(ExtCost::NegInf),
            Repr::Sym(s) => Err(serde::de::Error::custom(format!("invalid cost `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn order_is_total() {
        assert!(ExtCost::NegInf < ExtCost::Finite(i64::MIN));
        assert!(ExtCost::Finite(i64::MAX) < ExtCost::PosInf);
        assert!(ExtCost::Finite(-3) < ExtCost::Finite(2));
    }

    #[test]
    fn opposite_infinities_do_not_add() {
        assert_eq!(
            ExtCost::PosInf.checked_add(ExtCost::NegInf),
            Err(IndeterminateSum)
        );
        assert_eq!(ExtCost::PosInf + (-7), ExtCost::PosInf);
        assert_eq!(ExtCost::NegInf + 7, ExtCost::NegInf);
        assert_eq!(
            ExtCost::Finite(3).checked_add(ExtCost::PosInf),
            Ok(ExtCost::PosInf)
        );
    }

    #[test]
    fn serde_uses_symbols_for_infinities() {
        let v = vec![ExtCost::NegInf, ExtCost::Finite(-4), ExtCost::PosInf];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["-inf",-4,"+inf"]"#);
        let back: Vec<ExtCost> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    proptest! {
        #[test]
        fn finite_addition_matches_integers(a in -1000i64..1000, b in -1000i64..1000) {
            prop_assert_eq!(ExtCost::Finite(a).checked_add(ExtCost::Finite(b)), Ok(ExtCost::Finite(a + b)));
            prop_assert_eq!(ExtCost::Finite(a) + b, ExtCost::Finite(a + b));
        }
    }
}
