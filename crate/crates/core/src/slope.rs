//! Slopes on a torus: primitive integer pairs up to sign.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A slope `p/q` stored in canonical form (`q > 0`, or `(1, 0)`).
///
/// `(0, 0)` is the empty-slope sentinel. It only survives construction through
/// [`Slope::empty`] or [`Slope::parse_lenient`]; every metric operation rejects it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[i64; 2]")]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(Error::EmptySlope);
        }
        if p.gcd(&q) != 1 {
            return Err(Error::NotPrimitive(p, q));
        }
        Ok(Self::canonical(p, q))
    }

    /// Accepts the sentinel as well as primitive pairs.
    pub fn parse_lenient(p: i64, q: i64) -> Result<Self> {
        if p == 0 && q == 0 {
            Ok(Self::empty())
        } else {
            Self::new(p, q)
        }
    }

    pub const fn empty() -> Self {
        Slope { p: 0, q: 0 }
    }

    pub fn meridian() -> Self {
        Slope { p: 1, q: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.p == 0 && self.q == 0
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    fn canonical(p: i64, q: i64) -> Self {
        if q < 0 || (q == 0 && p < 0) {
            Slope { p: -p, q: -q }
        } else {
            Slope { p, q }
        }
    }

    fn require(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptySlope)
        } else {
            Ok(())
        }
    }
}

impl TryFrom<[i64; 2]> for Slope {
    type Error = Error;
    fn try_from(v: [i64; 2]) -> Result<Self> {
        Slope::parse_lenient(v[0], v[1])
    }
}

impl From<Slope> for [i64; 2] {
    fn from(s: Slope) -> Self {
        [s.p, s.q]
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.p, self.q) {
            (0, 0) => write!(f, "empty"),
            (1, 0) => write!(f, "inf"),
            (p, 1) => write!(f, "{p}"),
            (p, q) => write!(f, "{p}/{q}"),
        }
    }
}

/// `|p q' - q p'|`.
pub fn distance(a: Slope, b: Slope) -> Result<u64> {
    a.require()?;
    b.require()?;
    Ok((a.p as i128 * b.q as i128 - a.q as i128 * b.p as i128).unsigned_abs() as u64)
}

/// A slope at distance one from `b`.
///
/// Solves `p y - q x = 1` for the canonical `b = (p, q)` with `0 <= x < |p|`;
/// the axis `(0, 1)` maps to `(1, 0)`.
pub fn dual_slope(b: Slope) -> Result<Slope> {
    b.require()?;
    let (p, q) = (b.p, b.q);
    if p == 0 {
        return Ok(Slope::meridian());
    }
    let m = p.abs();
    // q x = -1 (mod |p|)
    let inv = q.rem_euclid(m).extended_gcd(&m).x;
    let x = (-inv).rem_euclid(m);
    let y = (1 + q * x) / p;
    debug_assert_eq!(p * y - q * x, 1);
    Slope::new(x, y)
}

/// Integer 2x2 matrix of determinant +-1 acting on slope coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[[i64; 2]; 2]", into = "[[i64; 2]; 2]")]
pub struct BasisChange {
    m: [[i64; 2]; 2],
}

impl BasisChange {
    pub fn new(m: [[i64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() != 1 {
            return Err(Error::NotUnimodular(det));
        }
        Ok(BasisChange { m })
    }

    pub fn identity() -> Self {
        BasisChange { m: [[1, 0], [0, 1]] }
    }

    pub fn det(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn entries(&self) -> [[i64; 2]; 2] {
        self.m
    }
}

impl TryFrom<[[i64; 2]; 2]> for BasisChange {
    type Error = Error;
    fn try_from(m: [[i64; 2]; 2]) -> Result<Self> {
        BasisChange::new(m)
    }
}

impl From<BasisChange> for [[i64; 2]; 2] {
    fn from(b: BasisChange) -> Self {
        b.m
    }
}

pub fn transform(s: Slope, m: &BasisChange) -> Result<Slope> {
    s.require()?;
    let p = m.m[0][0] * s.p + m.m[0][1] * s.q;
    let q = m.m[1][0] * s.p + m.m[1][1] * s.q;
    Slope::new(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn det(a: (i64, i64), b: (i64, i64)) -> i64 {
        (a.0 * b.1 - a.1 * b.0).abs()
    }

    #[test]
    fn canonical_form() {
        assert_eq!(Slope::new(-1, 0).unwrap(), Slope::new(1, 0).unwrap());
        assert_eq!(Slope::new(3, -4).unwrap(), Slope::new(-3, 4).unwrap());
        assert_eq!(Slope::new(3, -4).unwrap().q(), 4);
        assert!(matches!(Slope::new(2, 4), Err(Error::NotPrimitive(2, 4))));
        assert!(matches!(Slope::new(0, 0), Err(Error::EmptySlope)));
        assert!(Slope::parse_lenient(0, 0).unwrap().is_empty());
    }

    #[test]
    fn distances() {
        let s = |p, q| Slope::new(p, q).unwrap();
        assert_eq!(distance(s(1, 0), s(0, 1)).unwrap(), 1);
        assert_eq!(distance(s(-3, 4), s(1, 1)).unwrap(), 7);
        assert_eq!(distance(s(4, 1), s(-2, 1)).unwrap(), 6);
        assert_eq!(distance(Slope::empty(), s(1, 1)), Err(Error::EmptySlope));
    }

    #[test]
    fn duals() {
        let s = |p, q| Slope::new(p, q).unwrap();
        assert_eq!(dual_slope(s(1, 0)).unwrap(), s(0, 1));
        assert_eq!(dual_slope(s(0, 1)).unwrap(), s(1, 0));
        let d = dual_slope(s(2, 3)).unwrap();
        assert_eq!(det((2, 3), (d.p(), d.q())), 1);
        assert_eq!(d, s(1, 2));
        assert_eq!(dual_slope(s(-3, 4)).unwrap(), s(-2, 3));
    }

    #[test]
    fn transforms() {
        let s = Slope::new(5, 7).unwrap();
        assert_eq!(transform(s, &BasisChange::identity()).unwrap(), s);
        let shear = BasisChange::new([[1, 1], [0, 1]]).unwrap();
        assert_eq!(transform(Slope::meridian(), &shear).unwrap(), Slope::meridian());
        assert_eq!(transform(Slope::new(0, 1).unwrap(), &shear).unwrap(), Slope::new(1, 1).unwrap());
        assert!(matches!(BasisChange::new([[2, 0], [0, 1]]), Err(Error::NotUnimodular(2))));
    }

    #[test]
    fn json_shape() {
        let s = Slope::new(-3, 4).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), "[-3,4]");
        let e: Slope = serde_json::from_str("[0,0]").unwrap();
        assert!(e.is_empty());
        assert!(serde_json::from_str::<Slope>("[2,4]").is_err());
    }

    fn primitive() -> impl Strategy<Value = Slope> {
        (-200i64..200, -200i64..200)
            .prop_filter("primitive", |(p, q)| (*p, *q) != (0, 0) && p.gcd(q) == 1)
            .prop_map(|(p, q)| Slope::new(p, q).unwrap())
    }

    fn unimodular() -> impl Strategy<Value = BasisChange> {
        // products of elementary shears and the swap
        prop::collection::vec((0u8..3, -5i64..=5), 1..6).prop_map(|ops| {
            let mut m = [[1i64, 0], [0, 1]];
            for (kind, k) in ops {
                let e = match kind {
                    0 => [[1, k], [0, 1]],
                    1 => [[1, 0], [k, 1]],
                    _ => [[0, 1], [1, 0]],
                };
                m = [
                    [e[0][0] * m[0][0] + e[0][1] * m[1][0], e[0][0] * m[0][1] + e[0][1] * m[1][1]],
                    [e[1][0] * m[0][0] + e[1][1] * m[1][0], e[1][0] * m[0][1] + e[1][1] * m[1][1]],
                ];
            }
            BasisChange::new(m).unwrap()
        })
    }

    proptest! {
        #[test]
        fn distance_symmetric(a in primitive(), b in primitive()) {
            prop_assert_eq!(distance(a, b).unwrap(), distance(b, a).unwrap());
            prop_assert_eq!(distance(a, b).unwrap() == 0, a == b);
        }

        #[test]
        fn dual_at_distance_one(b in primitive()) {
            let d = dual_slope(b).unwrap();
            prop_assert_eq!(det((b.p(), b.q()), (d.p(), d.q())), 1);
        }

        #[test]
        fn basis_change_preserves_distance(a in primitive(), b in primitive(), m in unimodular()) {
            let ta = transform(a, &m).unwrap();
            let tb = transform(b, &m).unwrap();
            prop_assert_eq!(distance(ta, tb).unwrap(), distance(a, b).unwrap());
        }
    }
}
