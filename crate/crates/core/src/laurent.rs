//! Laurent polynomials in one variable with complex coefficients, and 2x2 matrices over them.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Serialize, Serializer};

use crate::psl2::{ProjMatrix, C64, EPS};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i32, C64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(deg: i32, c: C64) -> Self {
        let mut p = Self::zero();
        p.add_term(deg, c);
        p
    }

    fn add_term(&mut self, deg: i32, c: C64) {
        let e = self.coeffs.entry(deg).or_insert(C64::new(0.0, 0.0));
        *e += c;
        if e.norm() < EPS {
            self.coeffs.remove(&deg);
        }
    }

    pub fn coeff(&self, deg: i32) -> C64 {
        self.coeffs.get(&deg).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, C64)> + '_ {
        self.coeffs.iter().map(|(d, c)| (*d, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    /// Non-constant: some nonzero coefficient away from degree zero.
    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|d| *d == 0)
    }

    pub fn eval(&self, t: C64) -> C64 {
        self.coeffs.iter().map(|(d, c)| c * t.powi(*d)).sum()
    }

    /// Substitutes `t -> 1/t`.
    pub fn invert_variable(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(d, c)| (-d, *c)).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut p = Self::zero();
        for (d, c) in &self.coeffs {
            p.add_term(*d, c * s);
        }
        p
    }

    pub fn max_abs_diff(&self, o: &LaurentPoly) -> f64 {
        let degs: std::collections::BTreeSet<i32> = self.coeffs.keys().chain(o.coeffs.keys()).copied().collect();
        degs.iter().map(|d| (self.coeff(*d) - o.coeff(*d)).norm()).fold(0.0, f64::max)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        let mut p = self.clone();
        for (d, c) in &o.coeffs {
            p.add_term(*d, *c);
        }
        p
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        self + &(-o)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(d, c)| (*d, -c)).collect() }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (d1, c1) in &self.coeffs {
            for (d2, c2) in &o.coeffs {
                p.add_term(d1 + d2, c1 * c2);
            }
        }
        p
    }
}

/// Serialized as `{"degree": [re, im], ...}`.
impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let m: BTreeMap<String, [f64; 2]> =
            self.coeffs.iter().map(|(d, c)| (d.to_string(), [c.re, c.im])).collect();
        m.serialize(s)
    }
}

/// A 2x2 matrix over Laurent polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentMatrix {
    pub e: [[LaurentPoly; 2]; 2],
}

impl LaurentMatrix {
    pub fn constant(m: &ProjMatrix) -> Self {
        LaurentMatrix {
            e: [
                [LaurentPoly::constant(m.a), LaurentPoly::constant(m.b)],
                [LaurentPoly::constant(m.c), LaurentPoly::constant(m.d)],
            ],
        }
    }

    /// `diag(t^k, t^-k)`.
    pub fn diag_power(k: i32) -> Self {
        let one = C64::new(1.0, 0.0);
        LaurentMatrix {
            e: [
                [LaurentPoly::monomial(k, one), LaurentPoly::zero()],
                [LaurentPoly::zero(), LaurentPoly::monomial(-k, one)],
            ],
        }
    }

    pub fn identity() -> Self {
        Self::diag_power(0)
    }

    pub fn trace(&self) -> LaurentPoly {
        &self.e[0][0] + &self.e[1][1]
    }

    pub fn eval(&self, t: C64) -> [[C64; 2]; 2] {
        [
            [self.e[0][0].eval(t), self.e[0][1].eval(t)],
            [self.e[1][0].eval(t), self.e[1][1].eval(t)],
        ]
    }
}

impl Mul for &LaurentMatrix {
    type Output = LaurentMatrix;
    fn mul(self, o: &LaurentMatrix) -> LaurentMatrix {
        let m = |i: usize, j: usize| &(&self.e[i][0] * &o.e[0][j]) + &(&self.e[i][1] * &o.e[1][j]);
        LaurentMatrix { e: [[m(0, 0), m(0, 1)], [m(1, 0), m(1, 1)]] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psl2::c;

    #[test]
    fn arithmetic() {
        let t = LaurentPoly::monomial(1, c(1.0, 0.0));
        let ti = LaurentPoly::monomial(-1, c(1.0, 0.0));
        let prod = &t * &ti;
        assert!(prod.is_constant());
        assert_eq!(prod.coeff(0), c(1.0, 0.0));
        let s = &t + &ti;
        let sq = &s * &s;
        assert_eq!(sq.coeff(2), c(1.0, 0.0));
        assert_eq!(sq.coeff(0), c(2.0, 0.0));
        assert_eq!(sq.min_degree(), Some(-2));
        assert!((&sq - &sq).is_zero());
        let x = c(0.3, 1.7);
        assert!((sq.eval(x) - (x + x.inv()).powi(2)).norm() < 1e-12);
        assert_eq!(sq.invert_variable(), sq);
    }

    #[test]
    fn matrix_product() {
        let d = LaurentMatrix::diag_power(1);
        let m = ProjMatrix::new(c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(7.0, 0.0)).unwrap();
        let conj = &(&d * &LaurentMatrix::constant(&m)) * &LaurentMatrix::diag_power(-1);
        assert_eq!(conj.e[0][1].max_degree(), Some(2));
        assert_eq!(conj.e[1][0].min_degree(), Some(-2));
        assert!(conj.trace().is_constant());
        let s = serde_json::to_string(&conj.e[0][1]).unwrap();
        assert!(s.starts_with("{\"2\":"));
    }
}
