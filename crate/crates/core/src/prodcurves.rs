//! Character curves of the free product `Z/p * Z/q`.
//!
//! A curve is fixed by the rotation angles of the two generators:
//! `a -> diag(l, 1/l)` with `l = e^{i pi j / p}`, and `b` ranges over the
//! one-parameter family `(z, 1; z(t - z) - 1, t - z)` where `t = m + 1/m`,
//! `m = e^{i pi k / q}`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psl2::{
    element_order, is_irreducible, root_of_unity, ProjMatrix, GroupWord, Order, RepAssignment, C64,
    RESIDUAL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveId {
    pub p: u32,
    pub q: u32,
    pub j: u32,
    pub k: u32,
}

impl CurveId {
    pub fn new(p: u32, q: u32, j: u32, k: u32) -> Result<Self> {
        if p < 2 || q < 2 || p > q {
            return Err(Error::Invalid(format!("curve orders ({p},{q}) need 2 <= p <= q")));
        }
        if j < 1 || j > p / 2 || k < 1 || k > q / 2 {
            return Err(Error::Invalid(format!("rotation indices ({j},{k}) out of range")));
        }
        Ok(CurveId { p, q, j, k })
    }

    pub fn lambda(&self) -> C64 {
        root_of_unity(self.j as i64, self.p as i64)
    }

    pub fn mu(&self) -> C64 {
        root_of_unity(self.k as i64, self.q as i64)
    }

    pub fn tau(&self) -> C64 {
        let m = self.mu();
        m + m.inv()
    }

    /// Order of the image of `a`.
    pub fn order_a(&self) -> u32 {
        self.p / self.j.gcd(&self.p)
    }

    pub fn order_b(&self) -> u32 {
        self.q / self.k.gcd(&self.q)
    }

    /// Every curve of `Z/p * Z/q` for `p <= q`.
    pub fn all(p: u32, q: u32) -> Vec<CurveId> {
        let mut out = vec![];
        for j in 1..=p / 2 {
            for k in 1..=q / 2 {
                out.push(CurveId { p, q, j, k });
            }
        }
        out
    }
}

fn free_product_relators(p: u32, q: u32) -> [GroupWord; 2] {
    [GroupWord::new([("a", p as i64)]), GroupWord::new([("b", q as i64)])]
}

pub fn rho_z(c: &CurveId, z: C64) -> RepAssignment {
    let l = c.lambda();
    let t = c.tau();
    let a = ProjMatrix::diag(l);
    let b = ProjMatrix::raw(z, C64::new(1.0, 0.0), z * (t - z) - 1.0, t - z);
    let [ra, rb] = free_product_relators(c.p, c.q);
    RepAssignment::new().with("a", a).with("b", b).with_relator(ra).with_relator(rb)
}

/// Trace of `rho_z(ab)` with the fixed lifts above.
pub fn trace_ab(c: &CurveId, z: C64) -> C64 {
    let l = c.lambda();
    (l - l.inv()) * z + l.inv() * c.tau()
}

pub fn f_ab(c: &CurveId, z: C64) -> C64 {
    let t = trace_ab(c, z);
    t * t - 4.0
}

/// Degree of `f_ab` as a function on the curve.
pub fn f_ab_degree(c: &CurveId) -> u32 {
    if 2 * c.j == c.p || 2 * c.k == c.q {
        1
    } else {
        2
    }
}

/// Points where the family is reducible.
pub fn reducible_points(c: &CurveId) -> [C64; 2] {
    let m = c.mu();
    [m, m.inv()]
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryRoot {
    pub z: [f64; 2],
    pub irreducible: bool,
    pub realized_order: Order,
    #[serde(skip)]
    pub rep: RepAssignment,
}

impl BoundaryRoot {
    pub fn z(&self) -> C64 {
        C64::new(self.z[0], self.z[1])
    }
}

/// `4 cos^2(pi l / d) - 4`.
pub fn boundary_target(d: u32, l: u32) -> f64 {
    crate::psl2::elliptic_tr2(l as i64, d as i64) - 4.0
}

/// Roots of `f_ab(z) = 4 cos^2(pi l / d) - 4`, ordered by `(re, im)`.
///
/// When `2 l = d` the two roots coincide and a single root is returned.
pub fn solve_boundary_order(c: &CurveId, d: u32, l: u32) -> Result<Vec<BoundaryRoot>> {
    if d < 2 || l < 1 || l > d / 2 {
        return Err(Error::Invalid(format!("boundary order ({d},{l}) out of range")));
    }
    let lam = c.lambda();
    let slope = lam - lam.inv();
    let offset = lam.inv() * c.tau();
    let s = 2.0 * (std::f64::consts::PI * l as f64 / d as f64).cos();
    let mut zs: Vec<C64> = vec![(s - offset) / slope, (-s - offset) / slope];
    if (zs[0] - zs[1]).norm() < RESIDUAL {
        zs.truncate(1);
    }
    zs.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let target = C64::new(boundary_target(d, l), 0.0);
    let mut out = vec![];
    for z in zs {
        debug_assert!((f_ab(c, z) - target).norm() < RESIDUAL);
        let rep = rho_z(c, z)
            .with_relator(GroupWord::new([("a", 1), ("b", 1)]).pow((d / l.gcd(&d)) as i64));
        let ab = rep.get("a")? * rep.get("b")?;
        out.push(BoundaryRoot {
            z: [z.re, z.im],
            irreducible: is_irreducible(&rep),
            realized_order: element_order(&ab),
            rep,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Spherical,
    Euclidean,
    Hyperbolic,
}

/// Sign of `1/p + 1/q + 1/r - 1`.
pub fn triangle_geometry(p: u32, q: u32, r: u32) -> Geometry {
    let (p, q, r) = (p as u64, q as u64, r as u64);
    match (q * r + p * r + p * q).cmp(&(p * q * r)) {
        std::cmp::Ordering::Greater => Geometry::Spherical,
        std::cmp::Ordering::Equal => Geometry::Euclidean,
        std::cmp::Ordering::Less => Geometry::Hyperbolic,
    }
}

/// Standard triangle-group presentation relators for generators `a`, `b`.
pub fn triangle_relators(p: u32, q: u32, d: u32) -> Vec<GroupWord> {
    vec![
        GroupWord::new([("a", p as i64)]),
        GroupWord::new([("b", q as i64)]),
        GroupWord::new([("a", 1), ("b", 1)]).pow(d as i64),
    ]
}

/// Representation of `<a, b | a^p, b^q, (ab)^d>` with `ab` of order exactly `d`,
/// found on the curves above.
///
/// `require_full_orders` also asks for `a` of order `p` and `b` of order `q`.
/// Orders `p > q` are served through the swap `a -> b'^-1`, `b -> a'^-1`.
pub fn find_rep_with_product(p: u32, q: u32, d: u32, require_full_orders: bool) -> Result<RepAssignment> {
    triangle_reps(p, q, d)?
        .into_iter()
        .find(|r| !require_full_orders || has_orders(r, p, q))
        .ok_or(Error::NoSolution(p, q, d))
}

/// Whether `a` and `b` have orders exactly `p` and `q`.
pub fn has_orders(rep: &RepAssignment, p: u32, q: u32) -> bool {
    let ord = |g: &str| rep.get(g).map(|m| element_order(&m));
    ord("a").ok() == Some(Order::Finite(p)) && ord("b").ok() == Some(Order::Finite(q))
}

/// Every irreducible boundary root with `ab` of order exactly `d`, in search order:
/// curves by `(j, k)`, then rotation index `l`, then root.
pub fn triangle_reps(p: u32, q: u32, d: u32) -> Result<Vec<RepAssignment>> {
    if p < 2 || q < 2 || d < 2 {
        return Err(Error::Invalid(format!("orders ({p},{q},{d}) must be at least 2")));
    }
    if p > q {
        let mut out = vec![];
        for swapped in triangle_reps(q, p, d)? {
            let a = swapped.get("b")?.inv();
            let b = swapped.get("a")?.inv();
            let mut rep = RepAssignment::new().with("a", a).with("b", b);
            rep.relators = triangle_relators(p, q, d);
            out.push(rep);
        }
        return Ok(out);
    }
    if d == 2 && p == 2 {
        return Ok(vec![dihedral_rep(q)]);
    }
    let mut out = vec![];
    for c in CurveId::all(p, q) {
        for l in 1..=d / 2 {
            if l.gcd(&d) != 1 {
                continue;
            }
            for root in solve_boundary_order(&c, d, l)? {
                if root.irreducible && root.realized_order == Order::Finite(d) {
                    let mut rep = root.rep;
                    rep.relators = triangle_relators(p, q, d);
                    out.push(rep);
                }
            }
        }
    }
    Ok(out)
}

/// `<a, b | a^2, b^q, (ab)^2>` onto a dihedral group: `a` antidiagonal, `b` a rotation.
fn dihedral_rep(q: u32) -> RepAssignment {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let a = ProjMatrix::raw(z, one, -one, z);
    let b = ProjMatrix::diag(root_of_unity(1, q as i64));
    let mut rep = RepAssignment::new().with("a", a).with("b", b);
    rep.relators = triangle_relators(2, q, 2);
    rep
}

/// Trace data of a two-generator rep, stable under conjugation and under sign changes
/// of either generator: `(tr^2 a, tr^2 b, tr^2 ab, tr a tr b tr ab)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CharacterKey {
    #[serde(serialize_with = "ser_c4")]
    pub values: [C64; 4],
}

fn ser_c4<S: serde::Serializer>(v: &[C64; 4], s: S) -> std::result::Result<S::Ok, S::Error> {
    let out: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
    out.serialize(s)
}

impl CharacterKey {
    pub fn approx_eq(&self, o: &CharacterKey) -> bool {
        self.values
            .iter()
            .zip(o.values.iter())
            .all(|(x, y)| (x - y).norm() < RESIDUAL * (1.0 + x.norm()))
    }

    /// Keys with the roles of the generators swapped as in `a -> b'^-1`, `b -> a'^-1`.
    pub fn swapped(&self) -> CharacterKey {
        let v = self.values;
        CharacterKey { values: [v[1], v[0], v[2], v[3]] }
    }

    /// Total order used for deterministic listings.
    pub fn sort_key(&self) -> [i64; 8] {
        let r = |x: f64| (x * 1e6).round() as i64;
        let v = self.values;
        [r(v[0].re), r(v[0].im), r(v[1].re), r(v[1].im), r(v[2].re), r(v[2].im), r(v[3].re), r(v[3].im)]
    }
}

pub fn character_key(rep: &RepAssignment) -> Result<CharacterKey> {
    character_key_of(&rep.get("a")?, &rep.get("b")?)
}

pub fn character_key_of(a: &ProjMatrix, b: &ProjMatrix) -> Result<CharacterKey> {
    let ab = *a * *b;
    let (ta, tb, tab) = (a.trace(), b.trace(), ab.trace());
    Ok(CharacterKey { values: [ta * ta, tb * tb, tab * tab, ta * tb * tab] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psl2::{c, eval_word, EPS};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_z(rng: &mut ChaCha8Rng) -> C64 {
        c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))
    }

    #[test]
    fn relators_hold() {
        let cid = CurveId::new(3, 4, 1, 1).unwrap();
        let rep = rho_z(&cid, c(0.7, 0.2));
        assert!(rep.relator_residual().unwrap() < RESIDUAL);
        let a3 = eval_word(&rep, &GroupWord::new([("a", 3)])).unwrap();
        assert!(a3.is_central());
    }

    #[test]
    fn reducible_at_mu() {
        let cid = CurveId::new(3, 4, 1, 1).unwrap();
        for z in reducible_points(&cid) {
            assert!(!is_irreducible(&rho_z(&cid, z)));
        }
        assert!(is_irreducible(&rho_z(&cid, c(0.3, 0.3))));
    }

    #[test]
    fn f_ab_matches_matrix_trace() {
        let cid = CurveId::new(3, 5, 1, 2).unwrap();
        let z = c(-0.4, 1.1);
        let rep = rho_z(&cid, z);
        let via_matrix = eval_word(&rep, &GroupWord::parse("a b").unwrap()).unwrap().tr2() - 4.0;
        assert!((via_matrix - f_ab(&cid, z)).norm() < 1e-12);
    }

    #[test]
    fn degrees() {
        assert_eq!(f_ab_degree(&CurveId::new(2, 3, 1, 1).unwrap()), 1);
        assert_eq!(f_ab_degree(&CurveId::new(3, 4, 1, 1).unwrap()), 2);
        assert_eq!(f_ab_degree(&CurveId::new(4, 4, 2, 2).unwrap()), 1);
    }

    #[test]
    fn curve_id_ranges() {
        assert!(CurveId::new(4, 3, 1, 1).is_err());
        assert!(CurveId::new(3, 4, 2, 1).is_err());
        assert!(CurveId::new(3, 4, 1, 0).is_err());
    }

    #[test]
    fn boundary_roots() {
        let c236 = CurveId::new(2, 3, 1, 1).unwrap();
        let roots = solve_boundary_order(&c236, 6, 1).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| !r.irreducible));
        let roots = solve_boundary_order(&c236, 5, 1).unwrap();
        assert!(roots.iter().any(|r| r.irreducible));
        let c33 = CurveId::new(3, 3, 1, 1).unwrap();
        let roots = solve_boundary_order(&c33, 3, 1).unwrap();
        assert!(roots.iter().any(|r| r.irreducible));
        // double root at the involution target
        let roots = solve_boundary_order(&CurveId::new(3, 5, 1, 1).unwrap(), 4, 2).unwrap();
        assert_eq!(roots.len(), 1);
    }

    #[test]
    fn boundary_roots_substitute_back() {
        for p in 2..=6u32 {
            for q in p..=6 {
                for cid in CurveId::all(p, q) {
                    for d in 2..=7u32 {
                        for l in 1..=d / 2 {
                            let target = c(boundary_target(d, l), 0.0);
                            for r in solve_boundary_order(&cid, d, l).unwrap() {
                                assert!((f_ab(&cid, r.z()) - target).norm() < RESIDUAL);
                                let expect = d / l.gcd(&d);
                                let expect = if expect == 1 { Order::Finite(1) } else { Order::Finite(expect) };
                                assert_eq!(r.realized_order, expect, "{cid:?} d={d} l={l}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn exceptional_triples() {
        assert!(matches!(find_rep_with_product(2, 3, 6, false), Err(Error::NoSolution(2, 3, 6))));
        assert!(matches!(find_rep_with_product(2, 6, 3, true), Err(Error::NoSolution(..))));
        assert!(find_rep_with_product(2, 6, 3, false).is_ok());
        assert!(find_rep_with_product(2, 6, 6, true).is_ok());
        assert!(matches!(find_rep_with_product(2, 4, 4, true), Err(Error::NoSolution(..))));
        assert!(find_rep_with_product(2, 4, 4, false).is_ok());
    }

    #[test]
    fn swapped_orders() {
        let rep = find_rep_with_product(5, 3, 2, true).unwrap();
        assert!(rep.relator_residual().unwrap() < RESIDUAL);
        assert_eq!(element_order(&rep.get("a").unwrap()), Order::Finite(5));
        assert_eq!(element_order(&rep.get("b").unwrap()), Order::Finite(3));
        let rep = find_rep_with_product(2, 7, 2, true).unwrap();
        assert_eq!(element_order(&rep.get("b").unwrap()), Order::Finite(7));
        assert!(is_irreducible(&rep));
    }

    #[test]
    fn key_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cid = CurveId::new(3, 5, 1, 2).unwrap();
        let rep = rho_z(&cid, c(0.2, -0.9));
        let k0 = character_key(&rep).unwrap();
        for _ in 0..20 {
            let g = ProjMatrix::new(rand_z(&mut rng), rand_z(&mut rng), rand_z(&mut rng), rand_z(&mut rng)).unwrap();
            assert!(character_key(&rep.conjugate(&g)).unwrap().approx_eq(&k0));
        }
        let mut flipped = rep.clone();
        let b = flipped.get("b").unwrap().neg();
        flipped.images.insert("b".into(), b);
        assert!(character_key(&flipped).unwrap().approx_eq(&k0));
    }

    #[test]
    fn two_to_one_on_half_turn_curves() {
        // a is an involution: the two roots of one target give a single character
        let cid = CurveId::new(2, 5, 1, 1).unwrap();
        let roots = solve_boundary_order(&cid, 7, 1).unwrap();
        assert_eq!(roots.len(), 2);
        let k0 = character_key(&roots[0].rep).unwrap();
        let k1 = character_key(&roots[1].rep).unwrap();
        assert!(k0.approx_eq(&k1));
        let cid = CurveId::new(3, 5, 1, 1).unwrap();
        let roots = solve_boundary_order(&cid, 7, 1).unwrap();
        let k0 = character_key(&roots[0].rep).unwrap();
        let k1 = character_key(&roots[1].rep).unwrap();
        assert!(!k0.approx_eq(&k1));
    }

    #[test]
    fn distinct_curves_distinct_keys() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut curves = vec![];
        for p in 2..=7 {
            for q in p..=7 {
                curves.extend(CurveId::all(p, q));
            }
        }
        let mut keys = vec![];
        for _ in 0..20 {
            let cid = curves[rng.gen_range(0..curves.len())];
            let z = rand_z(&mut rng);
            keys.push((cid, character_key(&rho_z(&cid, z)).unwrap()));
        }
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                if keys[i].0 != keys[j].0 {
                    assert!(!keys[i].1.approx_eq(&keys[j].1));
                }
            }
        }
    }

    #[test]
    fn curve_invariants_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for p in 2..=6 {
            for q in p..=6 {
                for cid in CurveId::all(p, q) {
                    let fa = boundary_target(p, cid.j);
                    let fb = boundary_target(q, cid.k);
                    for _ in 0..50 {
                        let z = rand_z(&mut rng);
                        let rep = rho_z(&cid, z);
                        assert!(rep.relator_residual().unwrap() < RESIDUAL);
                        let a = rep.get("a").unwrap();
                        let b = rep.get("b").unwrap();
                        assert!((a.tr2() - 4.0 - fa).norm() < RESIDUAL);
                        assert!((b.tr2() - 4.0 - fb).norm() < RESIDUAL);
                    }
                }
            }
        }
    }

    #[test]
    fn reducibility_locus_dense() {
        let cid = CurveId::new(3, 7, 1, 2).unwrap();
        let [m, mi] = reducible_points(&cid);
        for base in [m, mi] {
            assert!(!is_irreducible(&rho_z(&cid, base)));
            for e in [1e-6, 1e-4, 1e-2, 0.5] {
                for dir in 0..8 {
                    let off = C64::from_polar(e, dir as f64 * std::f64::consts::FRAC_PI_4);
                    let z = base + off;
                    let near = (z - m).norm() < EPS || (z - mi).norm() < EPS;
                    assert_eq!(is_irreducible(&rho_z(&cid, z)), !near, "offset {e}");
                }
            }
        }
    }
}
