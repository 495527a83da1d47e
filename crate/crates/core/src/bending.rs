//! Bending families of amalgamated products and HNN extensions of triangle groups.
//!
//! Amalgam generators are `a+`, `b+`, `a-`, `b-` with `psi(a+ b+) = (a- b-)^s`.
//! HNN generators are `a`, `b`, `t` with `t a t^-1 = (ab)^s`.
//! A family is normalized so that the amalgamated element is diagonal and the
//! centralizer is `diag(t, 1/t)`, or, when that element is an involution of a
//! dihedral image, so that it equals `(0,1;-1,0)` and the centralizer is the
//! rotation family `(x,y;-y,x)`.

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{LaurentMatrix, LaurentPoly};
use crate::prodcurves::{has_orders, triangle_geometry, triangle_relators, triangle_reps, Geometry};
use crate::psl2::{
    align, c, element_order, eval_word, invariant_pair, is_strictly_irreducible, GroupWord, Order,
    ProjMatrix, RepAssignment, C64, EPS, RESIDUAL,
};

pub type LaurentTrace = LaurentPoly;

const PLUS: [&str; 2] = ["a+", "b+"];
const MINUS: [&str; 2] = ["a-", "b-"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamSpec {
    pub plus: (u32, u32),
    pub minus: (u32, u32),
    pub d: u32,
    pub s: u32,
}

impl AmalgamSpec {
    /// Factor orders must satisfy `2 <= p <= q`.
    pub fn new(plus: (u32, u32), minus: (u32, u32), d: u32, s: u32) -> Result<Self> {
        for (p, q) in [plus, minus] {
            if p < 2 || p > q {
                return Err(Error::Invalid(format!("factor orders ({p},{q}) need 2 <= p <= q")));
            }
        }
        check_twist(d, s)?;
        Ok(AmalgamSpec { plus, minus, d, s })
    }

    pub fn plus_triple(&self) -> [u32; 3] {
        [self.plus.0, self.plus.1, self.d]
    }

    pub fn minus_triple(&self) -> [u32; 3] {
        [self.minus.0, self.minus.1, self.d]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HnnSpec {
    pub d: u32,
    pub n: u32,
    pub s: u32,
}

impl HnnSpec {
    pub fn new(d: u32, n: u32, s: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid(format!("order n = {n} must be at least 2")));
        }
        check_twist(d, s)?;
        Ok(HnnSpec { d, n, s })
    }
}

fn check_twist(d: u32, s: u32) -> Result<()> {
    if d < 2 {
        return Err(Error::Invalid(format!("order d = {d} must be at least 2")));
    }
    if s < 1 || s >= d || s.gcd(&d) != 1 {
        return Err(Error::Invalid(format!("twist s = {s} must be a unit in 1..{d}")));
    }
    Ok(())
}

/// Least positive `m` with `s m = 1 (mod d)`.
pub fn least_inverse(s: u32, d: u32) -> u32 {
    (1..=d).find(|m| (s * m) % d == 1 % d).unwrap_or(1)
}

/// One-parameter subgroup centralizing the amalgamated element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// `diag(t, 1/t)`.
    Diagonal,
    /// `(x, y; -y, x)` with `x = (t + 1/t)/2`, `y = (t - 1/t)/2i`.
    Rotation,
}

impl Axis {
    pub fn element(&self, t: C64) -> ProjMatrix {
        match self {
            Axis::Diagonal => ProjMatrix::diag(t),
            Axis::Rotation => {
                let x = (t + t.inv()) / 2.0;
                let y = (t - t.inv()) / c(0.0, 2.0);
                ProjMatrix::new(x, y, -y, x).expect("rotation has determinant one")
            }
        }
    }

    /// The axis element (or its inverse) with entries in `C[t, 1/t]`.
    fn laurent(&self, inverse: bool) -> LaurentMatrix {
        let k = if inverse { -1 } else { 1 };
        match self {
            Axis::Diagonal => LaurentMatrix::diag_power(k),
            Axis::Rotation => {
                let half = c(0.5, 0.0);
                let t = LaurentPoly::monomial(k, half);
                let ti = LaurentPoly::monomial(-k, half);
                let x = &t + &ti;
                // y = -i (t - 1/t) / 2
                let y = (&t - &ti).scale(c(0.0, -1.0));
                LaurentMatrix { e: [[x.clone(), y.clone()], [-&y, x]] }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FamilyKind {
    Amalgam(AmalgamSpec),
    Hnn(HnnSpec),
}

/// A base representation together with the direction it is bent in.
///
/// Amalgam: the `-` factor is conjugated by the axis element.
/// HNN: the stable letter is multiplied on the right by the axis element.
#[derive(Clone, Debug, Serialize)]
pub struct BentFamily {
    pub kind: FamilyKind,
    pub base: RepAssignment,
    pub axis: Axis,
}

/// Finite image used for a Euclidean factor: the order of each generator in the image.
fn euclidean_image(t: [u32; 3]) -> Result<[u32; 3]> {
    Ok(match t {
        [3, 3, 3] => [3, 3, 3],
        [2, 4, 4] => [2, 2, 4],
        [4, 4, 2] => [4, 2, 2],
        [2, 3, 6] | [2, 6, 3] => [2, 3, 3],
        [3, 6, 2] => [3, 3, 2],
        _ => return Err(Error::Invalid(format!("no finite image rule for {t:?}"))),
    })
}

fn plus_image(spec: &AmalgamSpec) -> Result<[u32; 3]> {
    let [p, q, d] = spec.plus_triple();
    let partner_236 = spec.minus_triple() == [2, 3, 6];
    if triangle_geometry(p, q, d) == Geometry::Euclidean {
        return euclidean_image([p, q, d]);
    }
    if partner_236 {
        return match triangle_geometry(p, q, 3) {
            Geometry::Euclidean => euclidean_image([p, q, 3]),
            _ => Ok([p, q, 3]),
        };
    }
    Ok([p, q, d])
}

/// `e` is the order of the image of `a+ b+`.
fn minus_image(spec: &AmalgamSpec, e: u32) -> Result<[u32; 3]> {
    let [p, q, d] = spec.minus_triple();
    if e == d {
        return match [p, q, d] {
            [2, 6, 3] | [2, 4, 4] | [3, 6, 2] | [4, 4, 2] => euclidean_image([p, q, d]),
            t => Ok(t),
        };
    }
    if spec.plus_triple() == [2, 3, 6] {
        return match triangle_geometry(p, q, 3) {
            Geometry::Euclidean => euclidean_image([p, q, 3]),
            _ => Ok([p, q, 3]),
        };
    }
    Ok([2, 3, 3])
}

fn suffixed(w: &GroupWord, suffix: &str) -> GroupWord {
    GroupWord::new(w.letters().iter().map(|(g, e)| (format!("{g}{suffix}"), *e)))
}

fn restrict(rep: &RepAssignment, gens: &[&str]) -> Result<RepAssignment> {
    let mut out = RepAssignment::new();
    for g in gens {
        out = out.with(g, rep.get(g)?);
    }
    Ok(out)
}

fn same_tr2(x: &ProjMatrix, y: &ProjMatrix) -> bool {
    (x.tr2() - y.tr2()).norm() < RESIDUAL
}

fn ab(rep: &RepAssignment) -> Result<ProjMatrix> {
    Ok(rep.get("a")? * rep.get("b")?)
}

/// Conjugates `rep` so that `key` is diagonal, or equal to `(0,1;-1,0)` when it is an
/// involution lying off the diagonal in a dihedral image of `factor`.
fn normalize(rep: RepAssignment, key: &GroupWord, factor: &[&str]) -> Result<(RepAssignment, Axis)> {
    let k = eval_word(&rep, key)?;
    if element_order(&k) == Order::Finite(2) {
        if let Some(pair) = invariant_pair(&restrict(&rep, factor)?) {
            let p = ProjMatrix::new(pair[0][0], pair[1][0], pair[0][1], pair[1][1])?;
            let moved = rep.conjugate(&p.inv());
            let k2 = eval_word(&moved, key)?;
            if k2.is_antidiagonal() {
                let u = k2.b.sqrt().inv();
                return Ok((moved.conjugate(&ProjMatrix::diag(u)), Axis::Rotation));
            }
        }
    }
    let tr = k.trace();
    let lambda = (tr + (tr * tr - 4.0).sqrt()) / 2.0;
    let cm = align(&k, &ProjMatrix::diag(lambda))?;
    Ok((rep.conjugate(&cm), Axis::Diagonal))
}

fn check_residual(rep: &RepAssignment) -> Result<()> {
    let r = rep.relator_residual()?;
    if r > RESIDUAL {
        return Err(Error::Inconsistent(format!("relator residual {r:e}")));
    }
    Ok(())
}

/// The representation of the amalgam built factor by factor, normalized for bending.
pub fn build_amalgam(spec: AmalgamSpec) -> Result<BentFamily> {
    let [pp, qp, d] = spec.plus_triple();
    let [pm, qm, _] = spec.minus_triple();
    let s = spec.s as i64;

    let [p1, q1, e] = plus_image(&spec)?;
    let plus = triangle_reps(p1, q1, e)?
        .into_iter()
        .find(|r| has_orders(r, p1, q1))
        .ok_or(Error::NoSolution(p1, q1, e))?;
    let target = ab(&plus)?;

    let [p2, q2, e2] = minus_image(&spec, e)?;
    debug_assert_eq!(e, e2);
    let mut minus = None;
    for r in triangle_reps(p2, q2, e2)? {
        if !has_orders(&r, p2, q2) {
            continue;
        }
        let glued = ab(&r)?.pow(s);
        if same_tr2(&glued, &target) {
            minus = Some(r.conjugate(&align(&glued, &target)?));
            break;
        }
    }
    let minus = minus.ok_or(Error::NoSolution(p2, q2, e2))?;

    let mut rep = RepAssignment::new();
    for (name, g) in PLUS.iter().zip(["a", "b"]) {
        rep = rep.with(name, plus.get(g)?);
    }
    for (name, g) in MINUS.iter().zip(["a", "b"]) {
        rep = rep.with(name, minus.get(g)?);
    }
    for w in triangle_relators(pp, qp, d) {
        rep = rep.with_relator(suffixed(&w, "+"));
    }
    for w in triangle_relators(pm, qm, d) {
        rep = rep.with_relator(suffixed(&w, "-"));
    }
    rep = rep.with_relator(plus_product().concat(&minus_product().pow(s).inverse()));
    check_residual(&rep)?;

    let (base, axis) = normalize(rep, &plus_product(), &PLUS)?;
    Ok(BentFamily { kind: FamilyKind::Amalgam(spec), base, axis })
}

/// `a+ b+`.
pub fn plus_product() -> GroupWord {
    GroupWord::new([("a+", 1), ("b+", 1)])
}

/// `a- b-`.
pub fn minus_product() -> GroupWord {
    GroupWord::new([("a-", 1), ("b-", 1)])
}

/// The representation `(theta, A)` of the HNN extension, normalized for bending.
///
/// `theta` is the first boundary root whose `a` and `(ab)^s` are conjugate; for hyperbolic
/// triples this is the condition that `ab` is conjugate to `a^m` with `s m = 1 (mod d)`.
pub fn build_hnn(spec: HnnSpec) -> Result<BentFamily> {
    let HnnSpec { d, n, s } = spec;
    let [p1, q1, e] = match triangle_geometry(d, n, d) {
        Geometry::Euclidean if (d, n) == (4, 2) => [2, 2, 2],
        Geometry::Euclidean => [3, 3, 3],
        _ => [d, n, d],
    };
    let mut found = None;
    for r in triangle_reps(p1, q1, e)? {
        if !has_orders(&r, p1, q1) {
            continue;
        }
        let a = r.get("a")?;
        let glued = ab(&r)?.pow(s as i64);
        if same_tr2(&a, &glued) {
            found = Some((r.clone(), align(&a, &glued)?));
            break;
        }
    }
    let (theta, a_mat) = found.ok_or(Error::NoSolution(d, n, d))?;
    let mut rep = RepAssignment::new().with("a", theta.get("a")?).with("b", theta.get("b")?).with("t", a_mat);
    for w in triangle_relators(d, n, d) {
        rep = rep.with_relator(w);
    }
    let conj = GroupWord::new([("t", 1), ("a", 1), ("t", -1)]);
    rep = rep.with_relator(conj.concat(&GroupWord::new([("a", 1), ("b", 1)]).pow(s as i64).inverse()));
    check_residual(&rep)?;

    let (base, axis) = normalize(rep, &GroupWord::gen("a"), &["a", "b"])?;
    Ok(BentFamily { kind: FamilyKind::Hnn(spec), base, axis })
}

/// The representation at parameter `t`; `t = 1` is the base.
pub fn bend(f: &BentFamily, t: C64) -> Result<RepAssignment> {
    if t.norm() < EPS {
        return Err(Error::ZeroParameter);
    }
    let s = f.axis.element(t);
    let mut rep = f.base.clone();
    match f.kind {
        FamilyKind::Amalgam(_) => {
            for g in MINUS {
                rep.images.insert(g.into(), f.base.get(g)?.conj_by(&s));
            }
        }
        FamilyKind::Hnn(_) => {
            rep.images.insert("t".into(), f.base.get("t")? * s);
        }
    }
    Ok(rep)
}

pub fn bend_amalgam(f: &BentFamily, t: C64) -> Result<RepAssignment> {
    bend(f, t)
}

pub fn bend_hnn(f: &BentFamily, r: C64) -> Result<RepAssignment> {
    bend(f, r)
}

fn letter_matrix(f: &BentFamily, g: &str, e: i64) -> Result<LaurentMatrix> {
    let m = f.base.get(g)?;
    let bent_factor = matches!(f.kind, FamilyKind::Amalgam(_)) && MINUS.contains(&g);
    let stable = matches!(f.kind, FamilyKind::Hnn(_)) && g == "t";
    if bent_factor {
        let inner = LaurentMatrix::constant(&m.pow(e));
        return Ok(&(&f.axis.laurent(false) * &inner) * &f.axis.laurent(true));
    }
    if stable {
        let step = if e > 0 {
            &LaurentMatrix::constant(&m) * &f.axis.laurent(false)
        } else {
            &f.axis.laurent(true) * &LaurentMatrix::constant(&m.inv())
        };
        let mut acc = LaurentMatrix::identity();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &step;
        }
        return Ok(acc);
    }
    Ok(LaurentMatrix::constant(&m.pow(e)))
}

/// Trace of the image of `w` as a Laurent polynomial in the bending parameter.
///
/// Sign follows the lifts of the base matrices, as in [`eval_word`].
pub fn laurent_trace(f: &BentFamily, w: &GroupWord) -> Result<LaurentTrace> {
    let mut acc = LaurentMatrix::identity();
    for (g, e) in w.letters() {
        acc = &acc * &letter_matrix(f, g, *e)?;
    }
    Ok(acc.trace())
}

pub fn laurent_trace_amalgam(f: &BentFamily, w: &GroupWord) -> Result<LaurentTrace> {
    laurent_trace(f, w)
}

pub fn laurent_trace_hnn(f: &BentFamily, w: &GroupWord) -> Result<LaurentTrace> {
    laurent_trace(f, w)
}

/// `c+ (a+ b+)^k c-`.
pub fn amalgam_beta_word(c_plus: (&str, i64), k: i64, c_minus: (&str, i64)) -> GroupWord {
    GroupWord::new([c_plus]).concat(&plus_product().pow(k)).concat(&GroupWord::new([c_minus]))
}

/// `t a^j t a^l`.
pub fn hnn_beta_word(j: i64, l: i64) -> GroupWord {
    GroupWord::new([("t", 1), ("a", j), ("t", 1), ("a", l)])
}

/// Reduced words of length at most 3 in the generators and their inverses.
pub fn probe_words(f: &BentFamily) -> Vec<GroupWord> {
    let letters: Vec<(String, i64)> =
        f.base.images.keys().flat_map(|g| [(g.clone(), 1), (g.clone(), -1)]).collect();
    let mut words: Vec<Vec<(String, i64)>> = vec![vec![]];
    let mut out = vec![];
    for _ in 0..3 {
        let mut next = vec![];
        for w in &words {
            for l in &letters {
                if w.last().is_some_and(|(g, e)| *g == l.0 && *e == -l.1) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l.clone());
                out.push(GroupWord::from(v.clone()));
                next.push(v);
            }
        }
        words = next;
    }
    out
}

fn sample_params(seed: u64, count: usize) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| C64::from_polar(rng.gen_range(0.6..1.6), rng.gen_range(0.1..3.0)))
        .collect()
}

fn close(x: C64, y: C64) -> bool {
    (x - y).norm() < RESIDUAL * (1.0 + x.norm())
}

/// Number of ideal points (1 or 2) of the bent curve.
///
/// The ends `t -> 0` and `t -> oo` go to the same ideal point exactly when some involution
/// `t -> c/t` preserves the character. Candidate constants `c^2` are read off from the extreme
/// coefficients of one non-constant squared trace; each candidate is tested by comparing
/// squared traces of [`probe_words`] at 5 sampled parameters.
pub fn ideal_points(f: &BentFamily) -> Result<u32> {
    let words = probe_words(f);
    let mut candidates = vec![];
    for w in &words {
        let tr = laurent_trace(f, w)?;
        let sq = &tr * &tr;
        if sq.is_constant() {
            continue;
        }
        let (hi, lo) = (sq.max_degree().unwrap_or(0), sq.min_degree().unwrap_or(0));
        if hi != -lo || hi % 2 != 0 {
            return Ok(2);
        }
        // p_{-K} = p_K c^K
        let ratio = sq.coeff(lo) / sq.coeff(hi);
        let m = hi / 2;
        let root = ratio.powf(1.0 / m as f64);
        for j in 0..m {
            candidates.push(root * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m as f64));
        }
        break;
    }
    if candidates.is_empty() {
        return Err(Error::ConstantTrace);
    }
    let samples = sample_params(0x1dea1, 5);
    for c2 in candidates {
        let cc = c2.sqrt();
        let mut symmetric = true;
        'outer: for t in &samples {
            let r1 = bend(f, *t)?;
            let r2 = bend(f, cc / t)?;
            for w in &words {
                if !close(eval_word(&r1, w)?.tr2(), eval_word(&r2, w)?.tr2()) {
                    symmetric = false;
                    break 'outer;
                }
            }
        }
        if symmetric {
            return Ok(1);
        }
    }
    Ok(2)
}

pub fn ideal_points_amalgam(f: &BentFamily) -> Result<u32> {
    ideal_points(f)
}

pub fn ideal_points_hnn(f: &BentFamily) -> Result<u32> {
    ideal_points(f)
}

/// The published rule: one ideal point iff some factor triple is `(2,2,2)`.
///
/// Disagrees with [`ideal_points`] when `d = 2` and exactly one factor image is dihedral
/// (or both are dihedral and neither is `(2,2,2)`); see [`amalgam_ideal_points_refined`].
pub fn amalgam_ideal_points_closed_form(spec: &AmalgamSpec) -> u32 {
    if spec.plus_triple() == [2, 2, 2] || spec.minus_triple() == [2, 2, 2] {
        1
    } else {
        2
    }
}

/// The published rule: one ideal point iff `n = 2` and `d` is 2 or 4.
///
/// Disagrees with [`ideal_points`] for `d = 2`, `n >= 3`; see [`hnn_ideal_points_refined`].
pub fn hnn_ideal_points_closed_form(spec: &HnnSpec) -> u32 {
    if spec.n == 2 && (spec.d == 2 || spec.d == 4) {
        1
    } else {
        2
    }
}

/// Factor triples with `d = 2` whose image is dihedral with `ab` a reflection.
fn dihedral_involution_factor(t: [u32; 3]) -> bool {
    matches!(t, [2, _, 2] | [4, 4, 2])
}

/// One ideal point iff `d = 2` and both factor images are dihedral.
///
/// A dihedral image has a central-type involution `R` in its centralizer that inverts the
/// bending axis; when both factors carry one, `R+ R-` lies on the axis and
/// `t -> c/t` is realized by conjugation. Otherwise the centralizer argument forces `t' = +-t`.
pub fn amalgam_ideal_points_refined(spec: &AmalgamSpec) -> u32 {
    if dihedral_involution_factor(spec.plus_triple()) && dihedral_involution_factor(spec.minus_triple()) {
        1
    } else {
        2
    }
}

/// One ideal point iff `d = 2`, or `(d, n) = (4, 2)`.
///
/// For `d = 2` the vertex image is dihedral and `diag(i,-i)` (with `theta(a)` antidiagonal and
/// `theta(b)` diagonal) centralizes it while inverting the bending axis.
pub fn hnn_ideal_points_refined(spec: &HnnSpec) -> u32 {
    if spec.d == 2 || (spec.d, spec.n) == (4, 2) {
        1
    } else {
        2
    }
}

/// Whether some of 10 sampled bent representations is strictly irreducible.
pub fn strict_nontriviality(f: &BentFamily) -> Result<bool> {
    for t in sample_params(0x5171c7, 10) {
        if is_strictly_irreducible(&bend(f, t)?) {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn strict_nontriviality_amalgam(f: &BentFamily) -> Result<bool> {
    strict_nontriviality(f)
}

/// Strict iff some factor triple lies outside `{(2,2,d), (2,4,4)}`.
pub fn amalgam_strict_closed_form(spec: &AmalgamSpec) -> bool {
    let d = spec.d;
    [spec.plus_triple(), spec.minus_triple()].iter().any(|t| *t != [2, 2, d] && *t != [2, 4, 4])
}

/// Ideal points at which the trace of `w` has a pole: the certified lower bound on the
/// multiplicity `s` of the curve.
pub fn s_lower_bound(f: &BentFamily, w: &GroupWord) -> Result<u32> {
    let tr = laurent_trace(f, w)?;
    if tr.is_constant() {
        return Err(Error::ConstantTrace);
    }
    let poles = u32::from(tr.max_degree().unwrap_or(0) > 0) + u32::from(tr.min_degree().unwrap_or(0) < 0);
    Ok(poles.min(ideal_points(f)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prodcurves::character_key;
    use crate::psl2::{ci, conjugates_into_n, finite_closure, is_irreducible};

    fn amalgam(plus: (u32, u32), minus: (u32, u32), d: u32, s: u32) -> BentFamily {
        build_amalgam(AmalgamSpec::new(plus, minus, d, s).unwrap()).unwrap()
    }

    fn hnn(d: u32, n: u32, s: u32) -> BentFamily {
        build_hnn(HnnSpec::new(d, n, s).unwrap()).unwrap()
    }

    fn order(f: &BentFamily, w: &str) -> Order {
        element_order(&eval_word(&f.base, &GroupWord::parse(w).unwrap()).unwrap())
    }

    fn closure_size(gens: &[ProjMatrix], cap: usize) -> usize {
        finite_closure(gens, cap).map_or(cap + 1, |e| e.len())
    }

    fn factor_image(f: &BentFamily, gens: [&str; 2]) -> usize {
        let g: Vec<ProjMatrix> = gens.iter().map(|n| f.base.get(n).unwrap()).collect();
        closure_size(&g, 200)
    }

    fn triples(max: u32) -> Vec<(u32, u32)> {
        let mut out = vec![];
        for p in 2..=max {
            for q in p..=max {
                out.push((p, q));
            }
        }
        out
    }

    #[test]
    fn spec_validation() {
        assert!(AmalgamSpec::new((3, 2), (2, 3), 7, 1).is_err());
        assert!(AmalgamSpec::new((2, 3), (2, 3), 6, 2).is_err());
        assert!(AmalgamSpec::new((2, 3), (2, 3), 7, 3).is_ok());
        assert!(HnnSpec::new(4, 2, 2).is_err());
        assert_eq!(least_inverse(3, 7), 5);
        assert_eq!(least_inverse(1, 2), 1);
    }

    #[test]
    fn hyperbolic_amalgam() {
        let f = amalgam((2, 3), (2, 3), 7, 1);
        assert!(f.base.relator_residual().unwrap() < RESIDUAL);
        assert_eq!(order(&f, "a+ b+"), Order::Finite(7));
        assert_eq!(order(&f, "a- b-"), Order::Finite(7));
        assert_eq!(order(&f, "a+"), Order::Finite(2));
        assert_eq!(order(&f, "b-"), Order::Finite(3));
        assert_eq!(f.axis, Axis::Diagonal);
        assert!(f.base.get("a+").unwrap().b.norm() > 0.0);
        assert!(eval_word(&f.base, &plus_product()).unwrap().is_diagonal());
    }

    #[test]
    fn gluing_relation_with_twist() {
        for s in [1, 2, 3, 4, 5, 6] {
            let f = amalgam((2, 3), (3, 4), 7, s);
            let lhs = eval_word(&f.base, &plus_product()).unwrap();
            let rhs = eval_word(&f.base, &minus_product().pow(s as i64)).unwrap();
            assert!(lhs.approx_eq(&rhs, RESIDUAL), "s = {s}");
        }
    }

    #[test]
    fn euclidean_factor_images() {
        // (3,3,3) and (2,3,6) onto the tetrahedral group, (2,4,4) onto the dihedral group of order 8
        assert_eq!(factor_image(&amalgam((3, 3), (2, 5), 3, 1), PLUS), 12);
        assert_eq!(factor_image(&amalgam((2, 3), (2, 7), 6, 1), PLUS), 12);
        assert_eq!(factor_image(&amalgam((2, 4), (3, 5), 4, 1), PLUS), 8);
        assert_eq!(factor_image(&amalgam((4, 4), (3, 5), 2, 1), PLUS), 8);
        assert_eq!(factor_image(&amalgam((3, 6), (3, 5), 2, 1), PLUS), 12);
        assert_eq!(factor_image(&amalgam((2, 5), (2, 4), 4, 1), MINUS), 8);
        assert_eq!(factor_image(&amalgam((2, 5), (2, 6), 3, 1), MINUS), 12);
    }

    #[test]
    fn partner_236_factors_through_order_three() {
        let f = amalgam((2, 4), (2, 3), 6, 1);
        assert_eq!(order(&f, "a+ b+"), Order::Finite(3));
        assert_eq!(order(&f, "a+"), Order::Finite(2));
        assert_eq!(order(&f, "b+"), Order::Finite(4));
        // (2,4,3) is spherical: the octahedral group
        assert_eq!(factor_image(&f, PLUS), 24);
        let g = amalgam((2, 3), (2, 6), 6, 5);
        assert_eq!(order(&g, "b-"), Order::Finite(3));
        assert!(g.base.relator_residual().unwrap() < RESIDUAL);
    }

    #[test]
    fn dihedral_factors_conjugate_into_n() {
        for d in 2..=6 {
            let f = amalgam((2, 2), (2, 2), d, 1);
            for side in [PLUS, MINUS] {
                let r = restrict(&f.base, &side).unwrap();
                assert!(is_irreducible(&r) && conjugates_into_n(&r), "d = {d}");
            }
        }
    }

    #[test]
    fn boundary_order_table() {
        for d in 2..=6 {
            for plus in triples(6) {
                for minus in triples(6) {
                    let spec = AmalgamSpec::new(plus, minus, d, 1).unwrap();
                    let f = build_amalgam(spec).unwrap();
                    let has_236 = spec.plus_triple() == [2, 3, 6] || spec.minus_triple() == [2, 3, 6];
                    let want = if has_236 { 3 } else { d };
                    assert_eq!(order(&f, "a+ b+"), Order::Finite(want), "{spec:?}");
                    for side in [PLUS, MINUS] {
                        assert!(is_irreducible(&restrict(&f.base, &side).unwrap()), "{spec:?}");
                    }
                    if d > 2 {
                        assert_eq!(order(&f, "a-"), Order::Finite(minus.0), "{spec:?}");
                        // (2,6,3) has no full-order rep for any partner, not only (3,3,3)
                        let exceptional = (spec.plus_triple() == [2, 3, 6] && spec.minus_triple() == [2, 6, 6])
                            || spec.minus_triple() == [2, 6, 3]
                            || spec.minus_triple() == [2, 4, 4];
                        let ob = order(&f, "b-");
                        if exceptional {
                            let want = if spec.minus_triple() == [2, 4, 4] { 2 } else { 3 };
                            assert_eq!(ob, Order::Finite(want), "{spec:?}");
                        } else if spec.plus_triple() == [2, 3, 6] {
                            // minus factor passes through (p-, q-, 3)
                            assert!(ob == Order::Finite(minus.1) || minus.1 % 3 == 0, "{spec:?}");
                        } else {
                            assert_eq!(ob, Order::Finite(minus.1), "{spec:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn bending_fixes_plus_factor() {
        let f = amalgam((2, 3), (2, 5), 7, 2);
        let base = bend_amalgam(&f, ci(1.0)).unwrap();
        for (g, m) in &f.base.images {
            assert!(base.get(g).unwrap().approx_eq(m, 1e-12));
        }
        let k0 = character_key(&restrict(&f.base, &PLUS).unwrap().renamed_pm()).unwrap();
        for t in [ci(2.0), c(3.0, 1.0)] {
            let r = bend_amalgam(&f, t).unwrap();
            let k = character_key(&restrict(&r, &PLUS).unwrap().renamed_pm()).unwrap();
            assert!(k.approx_eq(&k0));
            assert!(r.relator_residual().unwrap() < RESIDUAL);
        }
        assert!(matches!(bend_amalgam(&f, ci(0.0)), Err(Error::ZeroParameter)));
    }

    trait Renamed {
        fn renamed_pm(&self) -> RepAssignment;
    }

    impl Renamed for RepAssignment {
        fn renamed_pm(&self) -> RepAssignment {
            RepAssignment::new().with("a", self.get("a+").unwrap()).with("b", self.get("b+").unwrap())
        }
    }

    #[test]
    fn klein_factor_symmetry() {
        let f = amalgam((2, 2), (2, 2), 2, 1);
        assert_eq!(ideal_points_amalgam(&f).unwrap(), 1);
        let g = amalgam((2, 2), (2, 5), 2, 1);
        assert_eq!(ideal_points_amalgam(&g).unwrap(), 1);
        assert_eq!(ideal_points_amalgam(&amalgam((2, 3), (2, 3), 7, 1)).unwrap(), 2);
        assert_eq!(ideal_points_amalgam(&amalgam((2, 2), (2, 4), 4, 1)).unwrap(), 2);
    }

    #[test]
    fn published_rule_mismatches() {
        // Klein factor against a tetrahedral factor: the centralizer of the tetrahedral image is
        // trivial, so no conjugation swaps the ends.
        let spec = AmalgamSpec::new((2, 2), (3, 3), 2, 1).unwrap();
        assert_eq!(amalgam_ideal_points_closed_form(&spec), 1);
        assert_eq!(ideal_points(&build_amalgam(spec).unwrap()).unwrap(), 2);
        // two dihedral factors with d = 2
        let spec = AmalgamSpec::new((2, 3), (2, 3), 2, 1).unwrap();
        assert_eq!(amalgam_ideal_points_closed_form(&spec), 2);
        assert_eq!(ideal_points(&build_amalgam(spec).unwrap()).unwrap(), 1);
        let spec = HnnSpec::new(2, 3, 1).unwrap();
        assert_eq!(hnn_ideal_points_closed_form(&spec), 2);
        assert_eq!(ideal_points(&build_hnn(spec).unwrap()).unwrap(), 1);
    }

    #[test]
    fn dihedral_vertex_conjugator() {
        // diag(i,-i) centralizes the dihedral vertex image and sends r to 1/r
        for n in 3..=6 {
            let f = hnn(2, n, 1);
            assert_eq!(f.axis, Axis::Rotation);
            let b = ProjMatrix::diag(c(0.0, 1.0));
            let r = c(0.7, 0.3);
            let moved = bend(&f, r).unwrap().conjugate(&b);
            let target = bend(&f, r.inv()).unwrap();
            for g in ["a", "b", "t"] {
                assert!(moved.get(g).unwrap().approx_eq(&target.get(g).unwrap(), 1e-9), "n = {n}, {g}");
            }
        }
    }

    #[test]
    fn relators_hold_along_family() {
        let fams = [amalgam((2, 3), (3, 3), 5, 2), amalgam((2, 4), (4, 4), 2, 1), hnn(5, 3, 2), hnn(4, 2, 3)];
        for f in &fams {
            for t in sample_params(7, 20) {
                assert!(bend(f, t).unwrap().relator_residual().unwrap() < RESIDUAL);
            }
        }
    }

    #[test]
    fn laurent_trace_shapes() {
        let f = amalgam((2, 3), (3, 4), 5, 2);
        assert!(laurent_trace_amalgam(&f, &GroupWord::gen("a+")).unwrap().is_constant());
        let e = laurent_trace_amalgam(&f, &GroupWord::empty()).unwrap();
        assert!(e.is_constant() && (e.coeff(0).norm() - 2.0).abs() < 1e-12);
        for k in 0..3 {
            let w = amalgam_beta_word(("a+", 1), k, ("a-", 1));
            let tr = laurent_trace_amalgam(&f, &w).unwrap();
            assert_eq!(tr.max_degree(), Some(2));
            assert_eq!(tr.min_degree(), Some(-2));
            assert!(tr.coeff(2).norm() > 1e-6 && tr.coeff(-2).norm() > 1e-6);
        }
    }

    #[test]
    fn rotation_axis_for_dihedral_involution() {
        let f = amalgam((2, 5), (3, 4), 2, 1);
        assert_eq!(f.axis, Axis::Rotation);
        let j = ProjMatrix::new(ci(0.0), ci(1.0), ci(-1.0), ci(0.0)).unwrap();
        assert!(eval_word(&f.base, &plus_product()).unwrap().approx_eq(&j, 1e-9));
        let r = f.axis.element(c(0.7, 0.4));
        assert!((r * j).approx_eq(&(j * r), 1e-9));
        assert!(strict_nontriviality_amalgam(&f).unwrap());
    }

    #[test]
    fn strict_nontriviality_examples() {
        assert!(!strict_nontriviality_amalgam(&amalgam((2, 2), (2, 4), 4, 1)).unwrap());
        assert!(strict_nontriviality_amalgam(&amalgam((2, 3), (2, 2), 5, 1)).unwrap());
        for d in 2..=6 {
            assert!(!strict_nontriviality_amalgam(&amalgam((2, 2), (2, 2), d, 1)).unwrap());
        }
    }

    #[test]
    fn rules_match_sampling_on_small_grid() {
        for d in 2..=4 {
            for plus in triples(4) {
                for minus in triples(4) {
                    let spec = AmalgamSpec::new(plus, minus, d, 1).unwrap();
                    let f = build_amalgam(spec).unwrap();
                    assert_eq!(ideal_points(&f).unwrap(), amalgam_ideal_points_refined(&spec), "{spec:?}");
                    assert_eq!(strict_nontriviality(&f).unwrap(), amalgam_strict_closed_form(&spec), "{spec:?}");
                }
            }
        }
    }

    #[test]
    fn hnn_examples() {
        let f = hnn(3, 3, 1);
        assert_eq!(ideal_points_hnn(&f).unwrap(), 2);
        assert_eq!(s_lower_bound(&f, &hnn_beta_word(1, 1)).unwrap(), 2);
        let k = hnn(2, 2, 1);
        assert_eq!(ideal_points_hnn(&k).unwrap(), 1);
        assert_eq!(factor_image(&k, ["a", "b"]), 4);
        let k4 = hnn(4, 2, 3);
        assert_eq!(ideal_points_hnn(&k4).unwrap(), 1);
        assert_eq!(factor_image(&k4, ["a", "b"]), 4);
        for w in ["a", "b", "a b"] {
            assert_eq!(order(&k4, w), Order::Finite(2));
        }
    }

    #[test]
    fn hnn_orders_and_conjugation() {
        for d in 2..=6 {
            for n in 2..=6 {
                for s in (1..d).filter(|s| s.gcd(&d) == 1) {
                    let spec = HnnSpec::new(d, n, s).unwrap();
                    let f = build_hnn(spec).unwrap();
                    let a = f.base.get("a").unwrap();
                    let t = f.base.get("t").unwrap();
                    let abs = eval_word(&f.base, &GroupWord::new([("a", 1), ("b", 1)]).pow(s as i64)).unwrap();
                    assert!(a.conj_by(&t).approx_eq(&abs, RESIDUAL), "{spec:?}");
                    if (d, n) != (4, 2) {
                        assert_eq!(order(&f, "a"), Order::Finite(d));
                        assert_eq!(order(&f, "b"), Order::Finite(n));
                        assert_eq!(order(&f, "a b"), Order::Finite(d));
                    }
                    assert_eq!(ideal_points_hnn(&f).unwrap(), hnn_ideal_points_refined(&spec), "{spec:?}");
                    assert!(strict_nontriviality(&f).unwrap(), "{spec:?}");
                    for (j, l) in [(1, 1), (1, 2), (-1, 3), (0, 0)] {
                        let tr = laurent_trace_hnn(&f, &hnn_beta_word(j, l)).unwrap();
                        assert!(tr.coeff(2).norm() > 1e-6 && tr.coeff(-2).norm() > 1e-6, "{spec:?} {j} {l}");
                    }
                }
            }
        }
    }

    #[test]
    fn klein_stable_letter_family() {
        // theta(a) = diag(i,-i), theta(ab) = (0,1;-1,0), A_v = (1, i/2; i, 1/2) diag(v, 1/v)
        let i = c(0.0, 1.0);
        let ta = ProjMatrix::diag(i);
        let tab = ProjMatrix::new(ci(0.0), ci(1.0), ci(-1.0), ci(0.0)).unwrap();
        let a_v = |v: C64| ProjMatrix::new(v, i / (v * 2.0), i * v, (v * 2.0).inv()).unwrap();
        let b = ProjMatrix::new(ci(0.0), i, i, ci(0.0)).unwrap();
        for v in [c(0.8, 0.3), c(-1.2, 0.5), ci(2.0)] {
            assert!(ta.conj_by(&a_v(v)).approx_eq(&tab, 1e-9));
            assert!(ta.conj_by(&b).approx_eq(&ta, 1e-9));
            assert!(tab.conj_by(&b).approx_eq(&tab, 1e-9));
            assert!(a_v(v).conj_by(&b).approx_eq(&a_v((v * 2.0).inv()), 1e-9));
        }
    }

    #[test]
    fn s_bounds() {
        let w = amalgam_beta_word(("a+", 1), 1, ("a-", 1));
        assert_eq!(s_lower_bound(&amalgam((2, 2), (2, 2), 2, 1), &w).unwrap(), 1);
        assert_eq!(s_lower_bound(&amalgam((2, 2), (2, 2), 5, 1), &w).unwrap(), 2);
        let f = amalgam((2, 3), (2, 3), 7, 1);
        assert!(matches!(s_lower_bound(&f, &GroupWord::gen("b+")), Err(Error::ConstantTrace)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn word(gens: &'static [&'static str]) -> impl Strategy<Value = GroupWord> {
            prop::collection::vec((0..gens.len(), -2i64..=2), 0..=8)
                .prop_map(move |v| GroupWord::new(v.into_iter().filter(|(_, e)| *e != 0).map(|(g, e)| (gens[g], e))))
        }

        fn param() -> impl Strategy<Value = C64> {
            (0.5f64..2.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, th)| C64::from_polar(r, th))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn amalgam_laurent_matches_evaluation(
                pi in 0usize..6, mi in 0usize..6, d in 2u32..=6,
                w in word(&["a+", "b+", "a-", "b-"]), t in param()
            ) {
                let ts = triples(4);
                let f = amalgam(ts[pi], ts[mi], d, 1);
                let tr = laurent_trace(&f, &w).unwrap();
                let len: i64 = w.letters().iter().map(|(_, e)| e.abs()).sum();
                prop_assert!(tr.max_degree().unwrap_or(0) as i64 <= 2 * len);
                prop_assert!(tr.min_degree().unwrap_or(0) as i64 >= -2 * len);
                let direct = eval_word(&bend(&f, t).unwrap(), &w).unwrap().trace();
                let lv = tr.eval(t);
                prop_assert!((lv - direct).norm().min((lv + direct).norm()) < 1e-6 * (1.0 + direct.norm()));
            }

            #[test]
            fn hnn_laurent_matches_evaluation(
                d in 2u32..=6, n in 2u32..=6, w in word(&["a", "b", "t"]), t in param()
            ) {
                let s = (1..d).rev().find(|s| s.gcd(&d) == 1).unwrap();
                let f = hnn(d, n, s);
                let tr = laurent_trace(&f, &w).unwrap();
                let direct = eval_word(&bend(&f, t).unwrap(), &w).unwrap().trace();
                let lv = tr.eval(t);
                prop_assert!((lv - direct).norm().min((lv + direct).norm()) < 1e-6 * (1.0 + direct.norm()));
            }
        }
    }
}
