//! Projective 2x2 complex matrices, words, and representation predicates.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Equality tolerance.
pub const EPS: f64 = 1e-9;
/// Tolerance for quantities produced by longer arithmetic chains.
pub const RESIDUAL: f64 = 1e-6;
/// Default cap for finite-order detection.
pub const ORDER_CAP: u32 = 64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn ci(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `e^{i pi k / n}`.
pub fn root_of_unity(k: i64, n: i64) -> C64 {
    C64::from_polar(1.0, std::f64::consts::PI * k as f64 / n as f64)
}

/// `4 cos^2(pi k / n)`, the squared trace of an elliptic element of rotation angle `2 pi k / n`.
pub fn elliptic_tr2(k: i64, n: i64) -> f64 {
    let x = (std::f64::consts::PI * k as f64 / n as f64).cos();
    4.0 * x * x
}

/// A determinant-one complex matrix taken up to sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjMatrix {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl ProjMatrix {
    /// Builds a matrix and rescales it to determinant one.
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < EPS {
            return Err(Error::Invalid("singular matrix".into()));
        }
        let s = det.sqrt();
        Ok(ProjMatrix { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    /// Builds a matrix whose determinant is already one.
    pub fn from_entries(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let det = a * d - b * c;
        if (det - 1.0).norm() > RESIDUAL {
            return Err(Error::Invalid(format!("determinant {det} is not 1")));
        }
        Ok(ProjMatrix { a, b, c, d })
    }

    pub(crate) const fn raw(a: C64, b: C64, c: C64, d: C64) -> Self {
        ProjMatrix { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::raw(ci(1.0), ci(0.0), ci(0.0), ci(1.0))
    }

    pub fn diag(x: C64) -> Self {
        Self::raw(x, ci(0.0), ci(0.0), x.inv())
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn tr2(&self) -> C64 {
        let t = self.trace();
        t * t
    }

    pub fn inv(&self) -> Self {
        Self::raw(self.d, -self.b, -self.c, self.a)
    }

    pub fn neg(&self) -> Self {
        Self::raw(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn scale_det(&self) -> Self {
        let s = self.det().sqrt();
        Self::raw(self.a / s, self.b / s, self.c / s, self.d / s)
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inv() } else { *self };
        let mut e = k.unsigned_abs();
        let mut acc = Self::identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * sq;
            }
            sq = sq * sq;
            e >>= 1;
        }
        acc
    }

    pub fn conj_by(&self, g: &ProjMatrix) -> Self {
        *g * *self * g.inv()
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    fn max_diff(&self, o: &ProjMatrix) -> f64 {
        self.entries()
            .iter()
            .zip(o.entries().iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise distance to the nearer of `o` and `-o`.
    pub fn proj_distance(&self, o: &ProjMatrix) -> f64 {
        self.max_diff(o).min(self.max_diff(&o.neg()))
    }

    pub fn approx_eq(&self, o: &ProjMatrix, tol: f64) -> bool {
        self.proj_distance(o) < tol
    }

    /// Distance to `+-I`.
    pub fn central_residual(&self) -> f64 {
        self.proj_distance(&Self::identity())
    }

    pub fn is_central(&self) -> bool {
        self.central_residual() < RESIDUAL
    }

    pub fn is_diagonal(&self) -> bool {
        self.b.norm() < RESIDUAL && self.c.norm() < RESIDUAL
    }

    pub fn is_antidiagonal(&self) -> bool {
        self.a.norm() < RESIDUAL && self.d.norm() < RESIDUAL
    }

    /// Member of the normalizer of the diagonal subgroup.
    pub fn in_normalizer(&self) -> bool {
        self.is_diagonal() || self.is_antidiagonal()
    }

    fn eigenvalues(&self) -> (C64, C64) {
        let t = self.trace();
        let disc = (t * t - 4.0).sqrt();
        ((t + disc) / 2.0, (t - disc) / 2.0)
    }

    fn eigenvector(&self, l: C64) -> [C64; 2] {
        let v1 = [self.b, l - self.a];
        let v2 = [l - self.d, self.c];
        let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
        let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
        let v = if n1 >= n2 { v1 } else { v2 };
        normalize(v)
    }

    /// Fixed points on the projective line as unit homogeneous vectors.
    /// Empty for central elements, one point for parabolics.
    pub fn fixed_points(&self) -> Vec<[C64; 2]> {
        if self.is_central() {
            return vec![];
        }
        let (l1, l2) = self.eigenvalues();
        let p1 = self.eigenvector(l1);
        if (l1 - l2).norm() < 1e-7 {
            return vec![p1];
        }
        let p2 = self.eigenvector(l2);
        vec![p1, p2]
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    /// Whether the projective point `v` is fixed.
    pub fn fixes(&self, v: [C64; 2]) -> bool {
        same_point(normalize(self.apply(v)), v)
    }

    /// Jordan data `P J P^{-1}` with `J` upper triangular for eigenvalue `l`.
    fn normal_basis(&self, l: C64) -> Result<ProjMatrix> {
        let other = l.inv();
        if (l - other).norm() > 1e-7 {
            let v1 = self.eigenvector(l);
            let v2 = self.eigenvector(other);
            ProjMatrix::new(v1[0], v2[0], v1[1], v2[1])
        } else {
            let n = ProjMatrix::raw(self.a - l, self.b, self.c, self.d - l);
            let e = if n.a.norm() + n.c.norm() >= n.b.norm() + n.d.norm() {
                [ci(1.0), ci(0.0)]
            } else {
                [ci(0.0), ci(1.0)]
            };
            let v1 = n.apply(e);
            ProjMatrix::new(v1[0], e[0], v1[1], e[1])
        }
    }
}

fn normalize(v: [C64; 2]) -> [C64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Equality of unit homogeneous vectors as points of the projective line.
pub fn same_point(u: [C64; 2], v: [C64; 2]) -> bool {
    (u[0] * v[1] - u[1] * v[0]).norm() < 1e-8
}

impl Mul for ProjMatrix {
    type Output = ProjMatrix;
    fn mul(self, o: ProjMatrix) -> ProjMatrix {
        ProjMatrix::raw(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl fmt::Display for ProjMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "±({:.6}, {:.6}; {:.6}, {:.6})", self.a, self.b, self.c, self.d)
    }
}

impl Serialize for ProjMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[f64; 2]> = self.entries().iter().map(|z| [z.re, z.im]).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: [[f64; 2]; 4] = Deserialize::deserialize(d)?;
        let z: Vec<C64> = v.iter().map(|p| c(p[0], p[1])).collect();
        ProjMatrix::from_entries(z[0], z[1], z[2], z[3]).map_err(serde::de::Error::custom)
    }
}

/// Alternating word `g1^e1 g2^e2 ...` over named generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<(String, i64)>", into = "Vec<(String, i64)>")]
pub struct GroupWord {
    letters: Vec<(String, i64)>,
}

impl GroupWord {
    pub fn empty() -> Self {
        GroupWord { letters: vec![] }
    }

    /// Builds a word, merging adjacent equal generators and dropping zero exponents.
    pub fn new<S: Into<String>>(letters: impl IntoIterator<Item = (S, i64)>) -> Self {
        let mut w = GroupWord::empty();
        for (g, e) in letters {
            w.push(g.into(), e);
        }
        w
    }

    pub fn gen(g: &str) -> Self {
        Self::new([(g, 1)])
    }

    fn push(&mut self, g: String, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.letters.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.letters.pop();
                }
                return;
            }
        }
        self.letters.push((g, e));
    }

    pub fn letters(&self) -> &[(String, i64)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.iter().map(|(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, o: &GroupWord) -> GroupWord {
        let mut w = self.clone();
        for (g, e) in &o.letters {
            w.push(g.clone(), *e);
        }
        w
    }

    pub fn pow(&self, k: i64) -> GroupWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut w = GroupWord::empty();
        for _ in 0..k.unsigned_abs() {
            w = w.concat(&base);
        }
        w
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord::new(self.letters.iter().rev().map(|(g, e)| (g.clone(), -e)))
    }

    /// Parses `a+ b+^2 (a- b-)^-1`-style text; tokens are separated by spaces or `*`.
    pub fn parse(s: &str) -> Result<GroupWord> {
        let chars: Vec<char> = s.chars().collect();
        let mut pos = 0;
        let w = parse_seq(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::Parse(format!("unexpected `{}` in word", chars[pos])));
        }
        Ok(w)
    }
}

fn skip_sep(c: &[char], pos: &mut usize) {
    while *pos < c.len() && (c[*pos].is_whitespace() || c[*pos] == '*' || c[*pos] == '.') {
        *pos += 1;
    }
}

fn parse_exp(c: &[char], pos: &mut usize) -> Result<i64> {
    if *pos < c.len() && c[*pos] == '^' {
        *pos += 1;
        let start = *pos;
        if *pos < c.len() && (c[*pos] == '-' || c[*pos] == '+') {
            *pos += 1;
        }
        while *pos < c.len() && c[*pos].is_ascii_digit() {
            *pos += 1;
        }
        let txt: String = c[start..*pos].iter().collect();
        txt.parse().map_err(|_| Error::Parse(format!("bad exponent `{txt}`")))
    } else {
        Ok(1)
    }
}

fn parse_seq(c: &[char], pos: &mut usize) -> Result<GroupWord> {
    let mut w = GroupWord::empty();
    loop {
        skip_sep(c, pos);
        if *pos >= c.len() || c[*pos] == ')' {
            return Ok(w);
        }
        if c[*pos] == '(' {
            *pos += 1;
            let inner = parse_seq(c, pos)?;
            if *pos >= c.len() || c[*pos] != ')' {
                return Err(Error::Parse("unbalanced parenthesis".into()));
            }
            *pos += 1;
            let e = parse_exp(c, pos)?;
            w = w.concat(&inner.pow(e));
        } else if c[*pos].is_alphabetic() {
            let start = *pos;
            *pos += 1;
            while *pos < c.len() && (c[*pos].is_alphanumeric() || c[*pos] == '_') {
                *pos += 1;
            }
            if *pos < c.len() && (c[*pos] == '+' || c[*pos] == '-') {
                *pos += 1;
            }
            let name: String = c[start..*pos].iter().collect();
            let e = parse_exp(c, pos)?;
            w.push(name, e);
        } else {
            return Err(Error::Parse(format!("unexpected `{}` in word", c[*pos])));
        }
    }
}

impl From<Vec<(String, i64)>> for GroupWord {
    fn from(v: Vec<(String, i64)>) -> Self {
        GroupWord::new(v)
    }
}

impl From<GroupWord> for Vec<(String, i64)> {
    fn from(w: GroupWord) -> Self {
        w.letters
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|(g, e)| if *e == 1 { g.clone() } else { format!("{g}^{e}") })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Images of generators, together with the relators they should satisfy.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RepAssignment {
    pub images: BTreeMap<String, ProjMatrix>,
    #[serde(default)]
    pub relators: Vec<GroupWord>,
}

impl RepAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, g: &str, m: ProjMatrix) -> Self {
        self.images.insert(g.to_string(), m);
        self
    }

    pub fn with_relator(mut self, w: GroupWord) -> Self {
        self.relators.push(w);
        self
    }

    pub fn get(&self, g: &str) -> Result<ProjMatrix> {
        self.images.get(g).copied().ok_or_else(|| Error::UnknownGenerator(g.to_string()))
    }

    pub fn generators(&self) -> Vec<ProjMatrix> {
        self.images.values().copied().collect()
    }

    pub fn conjugate(&self, g: &ProjMatrix) -> RepAssignment {
        RepAssignment {
            images: self.images.iter().map(|(k, m)| (k.clone(), m.conj_by(g))).collect(),
            relators: self.relators.clone(),
        }
    }

    /// Largest distance from `+-I` over the declared relators.
    pub fn relator_residual(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for r in &self.relators {
            worst = worst.max(eval_word(self, r)?.central_residual());
        }
        Ok(worst)
    }
}

pub fn eval_word(rep: &RepAssignment, w: &GroupWord) -> Result<ProjMatrix> {
    let mut acc = ProjMatrix::identity();
    for (g, e) in w.letters() {
        acc = acc * rep.get(g)?.pow(*e);
    }
    Ok(acc.scale_det())
}

/// `trace^2 - 4` of the image of `w`.
pub fn f_gamma(rep: &RepAssignment, w: &GroupWord) -> Result<C64> {
    Ok(eval_word(rep, w)?.tr2() - 4.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn finite(&self) -> Option<u32> {
        match self {
            Order::Finite(n) => Some(*n),
            Order::Infinite => None,
        }
    }
}

pub fn element_order(m: &ProjMatrix) -> Order {
    element_order_capped(m, ORDER_CAP)
}

/// Least `n <= cap` with `m^n = +-I`, read off from `tr^2 = 4 cos^2(pi k / n)`.
pub fn element_order_capped(m: &ProjMatrix, cap: u32) -> Order {
    if m.is_central() {
        return Order::Finite(1);
    }
    let t2 = m.tr2();
    if t2.im.abs() > RESIDUAL || t2.re < -RESIDUAL || t2.re > 4.0 - 1e-12 {
        return Order::Infinite;
    }
    for n in 2..=cap as i64 {
        for k in 1..=n / 2 {
            if k.gcd(&n) != 1 {
                continue;
            }
            if (t2.re - elliptic_tr2(k, n)).abs() < RESIDUAL {
                return Order::Finite(n as u32);
            }
        }
    }
    Order::Infinite
}

fn non_central(rep: &RepAssignment) -> Vec<ProjMatrix> {
    rep.generators().into_iter().filter(|m| !m.is_central()).collect()
}

/// No common fixed point on the projective line. All-central reps count as reducible.
pub fn is_irreducible(rep: &RepAssignment) -> bool {
    let gens = non_central(rep);
    let Some(first) = gens.first() else {
        return false;
    };
    !first.fixed_points().into_iter().any(|p| gens.iter().all(|g| g.fixes(p)))
}

fn pair_candidates(gens: &[ProjMatrix]) -> Vec<[[C64; 2]; 2]> {
    let mut elems: Vec<ProjMatrix> = gens.to_vec();
    for i in 0..gens.len() {
        for j in 0..gens.len() {
            if i != j {
                elems.push(gens[i] * gens[j]);
            }
        }
    }
    elems
        .iter()
        .filter_map(|m| {
            let fp = m.fixed_points();
            (fp.len() == 2).then(|| [fp[0], fp[1]])
        })
        .collect()
}

fn preserves_pair(g: &ProjMatrix, pair: &[[C64; 2]; 2]) -> bool {
    let u = normalize(g.apply(pair[0]));
    let v = normalize(g.apply(pair[1]));
    (same_point(u, pair[0]) && same_point(v, pair[1]))
        || (same_point(u, pair[1]) && same_point(v, pair[0]))
}

/// An unordered pair of points preserved by every generator, if one exists among the candidates.
pub fn invariant_pair(rep: &RepAssignment) -> Option<[[C64; 2]; 2]> {
    let gens = non_central(rep);
    pair_candidates(&gens).into_iter().find(|pair| gens.iter().all(|g| preserves_pair(g, pair)))
}

pub fn is_strictly_irreducible(rep: &RepAssignment) -> bool {
    is_irreducible(rep) && invariant_pair(rep).is_none()
}

/// Whether the image conjugates into the normalizer of the diagonal subgroup.
pub fn conjugates_into_n(rep: &RepAssignment) -> bool {
    let gens = non_central(rep);
    if gens.is_empty() {
        return true;
    }
    invariant_pair(rep).is_some()
}

/// `C` with `C X C^{-1} = Y` (up to sign).
pub fn align(x: &ProjMatrix, y: &ProjMatrix) -> Result<ProjMatrix> {
    if (x.tr2() - y.tr2()).norm() > RESIDUAL {
        return Err(Error::NotConjugate(format!("{:.6}", x.tr2()), format!("{:.6}", y.tr2())));
    }
    if x.is_central() || y.is_central() {
        if x.is_central() && y.is_central() {
            return Ok(ProjMatrix::identity());
        }
        return Err(Error::NotConjugate("central".into(), "non-central".into()));
    }
    let y = if (x.trace() - y.trace()).norm() <= (x.trace() + y.trace()).norm() { *y } else { y.neg() };
    let (l, _) = x.eigenvalues();
    let p = x.normal_basis(l)?;
    let q = y.normal_basis(l)?;
    let cm = q * p.inv();
    let resid = x.conj_by(&cm).proj_distance(&y);
    if resid > RESIDUAL {
        return Err(Error::Inconsistent(format!("alignment residual {resid:e}")));
    }
    Ok(cm)
}

/// Elements of the group generated by `gens` modulo sign, by breadth-first closure.
/// `None` once more than `cap` elements appear.
pub fn finite_closure(gens: &[ProjMatrix], cap: usize) -> Option<Vec<ProjMatrix>> {
    let mut elems = vec![ProjMatrix::identity()];
    let mut frontier = elems.clone();
    while !frontier.is_empty() {
        let mut next = vec![];
        for x in &frontier {
            for g in gens {
                let y = *x * *g;
                if !elems.iter().any(|e| e.approx_eq(&y, RESIDUAL)) {
                    elems.push(y);
                    next.push(y);
                    if elems.len() > cap {
                        return None;
                    }
                }
            }
        }
        frontier = next;
    }
    Some(elems)
}

/// The quaternion group `{+-I, +-diag(i,-i), +-(0,1;-1,0), +-(0,i;i,0)}` as a two-generator rep.
pub fn quaternion_rep() -> RepAssignment {
    let z = ci(0.0);
    let i = c(0.0, 1.0);
    RepAssignment::new()
        .with("a", ProjMatrix::raw(i, z, z, -i))
        .with("b", ProjMatrix::raw(z, ci(1.0), ci(-1.0), z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_c(rng: &mut ChaCha8Rng) -> C64 {
        c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
    }

    fn rand_matrix(rng: &mut ChaCha8Rng) -> ProjMatrix {
        loop {
            let m = ProjMatrix::new(rand_c(rng), rand_c(rng), rand_c(rng), rand_c(rng));
            if let Ok(m) = m {
                if m.det().norm() > 0.1 {
                    return m;
                }
            }
        }
    }

    /// Binary tetrahedral generators: orders 2, 3 with product of order 3.
    fn tetrahedral() -> RepAssignment {
        let i = c(0.0, 1.0);
        let z = ci(0.0);
        let a = ProjMatrix::raw(i, z, z, -i);
        let b = ProjMatrix::new(ci(1.0) + i, ci(1.0) + i, ci(-1.0) + i, ci(1.0) - i).unwrap();
        RepAssignment::new().with("a", a).with("b", b)
    }

    #[test]
    fn word_basics() {
        let rep = RepAssignment::new().with("a", ProjMatrix::diag(c(0.0, 1.0)));
        assert!(eval_word(&rep, &GroupWord::empty()).unwrap().approx_eq(&ProjMatrix::identity(), EPS));
        assert!(eval_word(&rep, &GroupWord::gen("a")).unwrap().approx_eq(&ProjMatrix::diag(c(0.0, 1.0)), EPS));
        assert!(matches!(eval_word(&rep, &GroupWord::gen("x")), Err(Error::UnknownGenerator(_))));
        let w = GroupWord::parse("(a+ b+)^3 a-^-2 a- a-").unwrap();
        assert_eq!(w.letters().len(), 6);
        let w = GroupWord::parse("a a^-1 b").unwrap();
        assert_eq!(w, GroupWord::gen("b"));
    }

    #[test]
    fn tetrahedral_relators() {
        let rep = tetrahedral();
        let ab = GroupWord::parse("(a b)^3").unwrap();
        assert!(eval_word(&rep, &ab).unwrap().is_central());
        assert_eq!(element_order(&rep.get("a").unwrap()), Order::Finite(2));
        assert_eq!(element_order(&rep.get("b").unwrap()), Order::Finite(3));
        assert!(is_strictly_irreducible(&rep));
    }

    #[test]
    fn f_values() {
        let rep = tetrahedral();
        assert!((f_gamma(&rep, &GroupWord::parse("(a b)^3").unwrap()).unwrap()).norm() < EPS);
        assert!((f_gamma(&rep, &GroupWord::gen("a")).unwrap() + 4.0).norm() < EPS);
        let r6 = RepAssignment::new().with("x", ProjMatrix::diag(root_of_unity(1, 6)));
        assert!((f_gamma(&r6, &GroupWord::gen("x")).unwrap() + 1.0).norm() < EPS);
    }

    #[test]
    fn orders() {
        assert_eq!(element_order(&ProjMatrix::diag(c(0.0, 1.0))), Order::Finite(2));
        assert_eq!(element_order(&ProjMatrix::diag(root_of_unity(1, 5))), Order::Finite(5));
        assert_eq!(element_order(&ProjMatrix::diag(root_of_unity(2, 5))), Order::Finite(5));
        assert_eq!(element_order(&ProjMatrix::diag(ci(3.0))), Order::Infinite);
        let para = ProjMatrix::raw(ci(1.0), ci(1.0), ci(0.0), ci(1.0));
        assert_eq!(element_order(&para), Order::Infinite);
        assert_eq!(element_order(&ProjMatrix::diag(root_of_unity(1, 80))), Order::Infinite);
        assert_eq!(element_order_capped(&ProjMatrix::diag(root_of_unity(1, 80)), 100), Order::Finite(80));
    }

    #[test]
    fn quaternion_group() {
        let k = quaternion_rep();
        assert!(is_irreducible(&k));
        assert!(!is_strictly_irreducible(&k));
        assert!(conjugates_into_n(&k));
    }

    #[test]
    fn commuting_diagonals() {
        let rep = RepAssignment::new()
            .with("a", ProjMatrix::diag(ci(2.0)))
            .with("b", ProjMatrix::diag(c(0.3, 0.4)));
        assert!(!is_irreducible(&rep));
        assert!(conjugates_into_n(&rep));
        let all_central = RepAssignment::new().with("a", ProjMatrix::identity());
        assert!(!is_irreducible(&all_central));
    }

    #[test]
    fn align_cases() {
        let i = c(0.0, 1.0);
        let x = ProjMatrix::diag(i);
        let cm = align(&x, &x).unwrap();
        assert!(x.conj_by(&cm).approx_eq(&x, RESIDUAL));
        let y = ProjMatrix::raw(ci(0.0), ci(1.0), ci(-1.0), ci(0.0));
        let cm = align(&x, &y).unwrap();
        assert!(x.conj_by(&cm).approx_eq(&y, RESIDUAL));
        let o3 = ProjMatrix::diag(root_of_unity(1, 3));
        let o4 = ProjMatrix::diag(root_of_unity(1, 4));
        assert!(matches!(align(&o3, &o4), Err(Error::NotConjugate(_, _))));
        let para = ProjMatrix::raw(ci(1.0), ci(1.0), ci(0.0), ci(1.0));
        let para2 = ProjMatrix::raw(ci(-1.0), ci(0.0), ci(3.0), ci(-1.0));
        let cm = align(&para, &para2).unwrap();
        assert!(para.conj_by(&cm).approx_eq(&para2, RESIDUAL));
    }

    #[test]
    fn random_align() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x = rand_matrix(&mut rng);
            let g = rand_matrix(&mut rng);
            let y = x.conj_by(&g);
            let y = if rng.gen_bool(0.5) { y.neg() } else { y };
            let cm = align(&x, &y).unwrap();
            assert!(x.conj_by(&cm).approx_eq(&y, RESIDUAL));
        }
    }

    #[test]
    fn f_gamma_invariances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rep = RepAssignment::new().with("a", rand_matrix(&mut rng)).with("b", rand_matrix(&mut rng));
        let words = ["a", "b", "a b", "a b^-1", "a^2 b a^-1 b^3"];
        for _ in 0..100 {
            let g = rand_matrix(&mut rng);
            let conj = rep.conjugate(&g);
            let mut flipped = rep.clone();
            let a = flipped.get("a").unwrap().neg();
            flipped.images.insert("a".into(), a);
            for w in words {
                let w = GroupWord::parse(w).unwrap();
                let f0 = f_gamma(&rep, &w).unwrap();
                let f1 = f_gamma(&conj, &w).unwrap();
                let f2 = f_gamma(&flipped, &w).unwrap();
                assert!((f0 - f1).norm() < RESIDUAL * (1.0 + f0.norm()));
                assert!((f0 - f2).norm() < RESIDUAL * (1.0 + f0.norm()));
            }
        }
    }

    #[test]
    fn order_of_powers_divides() {
        for n in 2..=24i64 {
            for k in 1..n {
                if k.gcd(&n) != 1 {
                    continue;
                }
                let m = ProjMatrix::diag(root_of_unity(k, n));
                let on = element_order(&m).finite().unwrap();
                assert_eq!(on as i64, n);
                for e in 1..=2 * n {
                    let oe = element_order(&m.pow(e)).finite().unwrap();
                    assert_eq!(on % oe, 0, "n={n} k={k} e={e}");
                }
            }
        }
    }

    #[test]
    fn predicate_implications() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut reps = vec![quaternion_rep(), tetrahedral()];
        for _ in 0..50 {
            reps.push(RepAssignment::new().with("a", rand_matrix(&mut rng)).with("b", rand_matrix(&mut rng)));
        }
        for rep in reps {
            if is_strictly_irreducible(&rep) {
                assert!(is_irreducible(&rep));
                assert!(!conjugates_into_n(&rep));
            }
            if conjugates_into_n(&rep) {
                assert!(!is_strictly_irreducible(&rep));
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let m = tetrahedral().get("b").unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: ProjMatrix = serde_json::from_str(&s).unwrap();
        assert!(back.approx_eq(&m, EPS));
        let w = GroupWord::parse("a b^-2").unwrap();
        assert_eq!(serde_json::to_string(&w).unwrap(), r#"[["a",1],["b",-2]]"#);
    }
}
