//! Irreducible characters of triangle groups, dihedral quotients, and the distance
//! bounds they feed.
//!
//! Characters are enumerated on the curves of [`crate::prodcurves`]: `a` and `b` run over
//! every rotation class of order dividing `a`, `b`, and `ab` is pinned to every trace with
//! order dividing `c`. Irreducible roots are deduplicated by [`CharacterKey`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prodcurves::{character_key, solve_boundary_order, triangle_relators, CharacterKey, CurveId};
use crate::psl2::{conjugates_into_n, element_order, finite_closure, Order, ProjMatrix, RepAssignment};

/// Cone orders of a base orbifold `S^2(a, b, c)`. An order of 1 marks the cyclic case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[u32; 3]", into = "[u32; 3]")]
pub struct TriangleTriple {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl TriangleTriple {
    pub fn new(a: u32, b: u32, c: u32) -> Result<Self> {
        if a == 0 || b == 0 || c == 0 {
            return Err(Error::Invalid(format!("cone orders ({a},{b},{c}) must be positive")));
        }
        Ok(TriangleTriple { a, b, c })
    }

    pub fn is_cyclic(&self) -> bool {
        self.a.min(self.b).min(self.c) == 1
    }

    pub fn max_order(&self) -> u32 {
        self.a.max(self.b).max(self.c)
    }
}

impl TryFrom<[u32; 3]> for TriangleTriple {
    type Error = Error;
    fn try_from(v: [u32; 3]) -> Result<Self> {
        TriangleTriple::new(v[0], v[1], v[2])
    }
}

impl From<TriangleTriple> for [u32; 3] {
    fn from(t: TriangleTriple) -> Self {
        [t.a, t.b, t.c]
    }
}

impl fmt::Display for TriangleTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// Isomorphism type of the image of an irreducible representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ImageTag {
    /// Dihedral of order `2n`.
    Dihedral(u32),
    Tetrahedral,
    Octahedral,
    Icosahedral,
    Infinite,
}

impl fmt::Display for ImageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImageTag::Dihedral(n) => write!(f, "D{n}"),
            ImageTag::Tetrahedral => write!(f, "T12"),
            ImageTag::Octahedral => write!(f, "O24"),
            ImageTag::Icosahedral => write!(f, "I60"),
            ImageTag::Infinite => write!(f, "infinite"),
        }
    }
}

impl FromStr for ImageTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T12" => Ok(ImageTag::Tetrahedral),
            "O24" => Ok(ImageTag::Octahedral),
            "I60" => Ok(ImageTag::Icosahedral),
            "infinite" => Ok(ImageTag::Infinite),
            _ => s
                .strip_prefix('D')
                .and_then(|n| n.parse::<u32>().ok())
                .filter(|n| *n >= 2)
                .map(ImageTag::Dihedral)
                .ok_or_else(|| Error::Parse(format!("unknown image tag `{s}`"))),
        }
    }
}

impl TryFrom<String> for ImageTag {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ImageTag> for String {
    fn from(t: ImageTag) -> String {
        t.to_string()
    }
}

/// Which image tags a curve may carry. Written as a tag (`"D3"`, `"T12"`, ...),
/// `"dihedral"` for any dihedral image, or `"any"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TagFilter {
    Exact(ImageTag),
    AnyDihedral,
    Any,
}

impl TagFilter {
    pub fn matches(&self, tag: ImageTag) -> bool {
        match self {
            TagFilter::Exact(t) => *t == tag,
            TagFilter::AnyDihedral => matches!(tag, ImageTag::Dihedral(_)),
            TagFilter::Any => true,
        }
    }
}

impl FromStr for TagFilter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "any" => Ok(TagFilter::Any),
            "dihedral" => Ok(TagFilter::AnyDihedral),
            _ => s.parse().map(TagFilter::Exact),
        }
    }
}

impl TryFrom<String> for TagFilter {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TagFilter> for String {
    fn from(t: TagFilter) -> String {
        match t {
            TagFilter::Exact(tag) => tag.to_string(),
            TagFilter::AnyDihedral => "dihedral".into(),
            TagFilter::Any => "any".into(),
        }
    }
}

/// Where on the curve family a character was first found: rotation indices of `a`, `b`
/// (for the triple with `a <= b`) and of `ab`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CurveOrigin {
    pub j: u32,
    pub k: u32,
    pub l: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterRecord {
    pub key: CharacterKey,
    pub image: ImageTag,
    /// Conjugates into the normalizer of the diagonal subgroup.
    pub dihedral: bool,
    /// Orders of `a`, `b`, `ab`, `ab^-1`.
    pub orders: [Order; 4],
    pub origin: CurveOrigin,
    pub witness: RepAssignment,
}

/// Largest finite subgroup of PSL2(C) that is not cyclic or dihedral.
const FINITE_CAP: usize = 60;

fn image_tag(a: &ProjMatrix, b: &ProjMatrix, orders: &[Order; 4], dihedral: bool) -> ImageTag {
    let finite: Option<Vec<u32>> = orders.iter().map(Order::finite).collect();
    let Some(finite) = finite else {
        return ImageTag::Infinite;
    };
    if dihedral {
        return ImageTag::Dihedral(finite.into_iter().max().unwrap_or(2).max(2));
    }
    // Orders alone cannot separate I60 from an infinite image generated by elements of
    // order 3 and 5, so finite candidates are confirmed by closure.
    if finite.iter().any(|o| *o > 5) {
        return ImageTag::Infinite;
    }
    match finite_closure(&[*a, *b], FINITE_CAP).map(|e| e.len()) {
        Some(12) => ImageTag::Tetrahedral,
        Some(24) => ImageTag::Octahedral,
        Some(60) => ImageTag::Icosahedral,
        _ => ImageTag::Infinite,
    }
}

fn record(witness: RepAssignment, key: CharacterKey, origin: CurveOrigin) -> Result<CharacterRecord> {
    let a = witness.get("a")?;
    let b = witness.get("b")?;
    let orders = [a, b, a * b, a * b.inv()].map(|m| element_order(&m));
    let dihedral = conjugates_into_n(&witness);
    Ok(CharacterRecord { key, image: image_tag(&a, &b, &orders, dihedral), dihedral, orders, origin, witness })
}

/// Every irreducible PSL2(C) character of `<a, b | a^A, b^B, (ab)^C>`, without duplicates,
/// in search order. Cyclic triples have none.
pub fn irreducible_characters(t: TriangleTriple) -> Result<Vec<CharacterRecord>> {
    if t.is_cyclic() {
        return Ok(vec![]);
    }
    let (p, q) = (t.a.min(t.b), t.a.max(t.b));
    let swap = t.a > t.b;
    let mut out: Vec<CharacterRecord> = vec![];
    for curve in CurveId::all(p, q) {
        for l in 1..=t.c / 2 {
            for root in solve_boundary_order(&curve, t.c, l)? {
                if !root.irreducible {
                    continue;
                }
                let mut rep = if swap {
                    // a -> b'^-1, b -> a'^-1 keeps ab conjugate to (a'b')^-1.
                    let (a, b) = (root.rep.get("b")?.inv(), root.rep.get("a")?.inv());
                    RepAssignment::new().with("a", a).with("b", b)
                } else {
                    root.rep
                };
                rep.relators = triangle_relators(t.a, t.b, t.c);
                let key = character_key(&rep)?;
                if out.iter().any(|r| r.key.approx_eq(&key)) {
                    continue;
                }
                out.push(record(rep, key, CurveOrigin { j: curve.j, k: curve.k, l })?);
            }
        }
    }
    Ok(out)
}

type CharacterCache = RwLock<BTreeMap<TriangleTriple, Arc<Vec<CharacterRecord>>>>;

/// [`irreducible_characters`], memoized per triple. Entries are never replaced.
pub fn cached_characters(t: TriangleTriple) -> Result<Arc<Vec<CharacterRecord>>> {
    static CACHE: OnceLock<CharacterCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.read().expect("census cache poisoned").get(&t) {
        return Ok(hit.clone());
    }
    let fresh = Arc::new(irreducible_characters(t)?);
    let mut w = cache.write().expect("census cache poisoned");
    Ok(w.entry(t).or_insert(fresh).clone())
}

/// `r^k s^f` in the dihedral group of order `2n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct DihedralElt {
    k: u32,
    f: bool,
}

impl DihedralElt {
    fn mul(self, o: DihedralElt, n: u32) -> DihedralElt {
        let k = if self.f { self.k + n - o.k } else { self.k + o.k };
        DihedralElt { k: k % n, f: self.f ^ o.f }
    }

    fn order(self, n: u32) -> u32 {
        match (self.f, self.k) {
            (true, _) => 2,
            (false, 0) => 1,
            (false, k) => n / k.gcd(&n),
        }
    }
}

fn generates_dihedral(x: DihedralElt, y: DihedralElt, n: u32) -> bool {
    let mut seen = vec![false; 2 * n as usize];
    let idx = |e: DihedralElt| (e.k + if e.f { n } else { 0 }) as usize;
    let id = DihedralElt { k: 0, f: false };
    seen[idx(id)] = true;
    let mut stack = vec![id];
    let mut count = 1;
    while let Some(e) = stack.pop() {
        for g in [x, y] {
            let h = e.mul(g, n);
            if !seen[idx(h)] {
                seen[idx(h)] = true;
                count += 1;
                stack.push(h);
            }
        }
    }
    count == 2 * n as usize
}

/// All `2 <= n <= n_max` such that the triangle group surjects onto the dihedral group
/// of order `2n`, by exhaustive assignment of the two generators.
pub fn dihedral_quotients(t: TriangleTriple, n_max: u32) -> Result<BTreeSet<u32>> {
    if n_max < 2 {
        return Err(Error::Invalid(format!("n_max = {n_max} must be at least 2")));
    }
    let mut out = BTreeSet::new();
    for n in 2..=n_max {
        let elts: Vec<DihedralElt> =
            (0..n).flat_map(|k| [false, true].map(|f| DihedralElt { k, f })).collect();
        let divides = |e: DihedralElt, m: u32| m.is_multiple_of(e.order(n));
        let found = elts.iter().any(|&x| {
            divides(x, t.a)
                && elts.iter().any(|&y| divides(y, t.b) && divides(x.mul(y, n), t.c) && generates_dihedral(x, y, n))
        });
        if found {
            out.insert(n);
        }
    }
    Ok(out)
}

/// Every dihedral quotient order. A generator of the rotation subgroup is one of
/// `a`, `b`, `ab`, so its order is at most the largest cone order.
pub fn all_dihedral_quotients(t: TriangleTriple) -> BTreeSet<u32> {
    dihedral_quotients(t, t.max_order().max(2)).expect("n_max >= 2")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemifibreBound {
    pub admissible: BTreeSet<u32>,
    pub max: Option<u32>,
}

fn quotient_orders(t: TriangleTriple) -> BTreeSet<u32> {
    let mut n = all_dihedral_quotients(t);
    n.insert(1);
    n
}

/// Distances `D` for which `n = m D / 2` is 1 or a dihedral quotient order.
pub fn semifibre_bound(t: TriangleTriple, m: u32) -> Result<SemifibreBound> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::Invalid(format!("m = {m} must be even and at least 2")));
    }
    let half = m / 2;
    let admissible: BTreeSet<u32> =
        quotient_orders(t).into_iter().filter(|n| n % half == 0).map(|n| n / half).collect();
    let max = admissible.iter().next_back().copied();
    Ok(SemifibreBound { admissible, max })
}

/// Every admissible `(D, m)` with `m` even, sorted.
pub fn semifibre_rows(t: TriangleTriple) -> Vec<(u32, u32)> {
    let mut rows = vec![];
    for n in quotient_orders(t) {
        for delta in 1..=2 * n {
            if (2 * n) % delta == 0 && ((2 * n) / delta) % 2 == 0 {
                rows.push((delta, 2 * n / delta));
            }
        }
    }
    rows.sort_unstable();
    rows
}

/// `1 + (2 J - N) / s`.
pub fn distance_formula(s: u32, j: u32, n: u32) -> Result<Ratio<i64>> {
    if s == 0 {
        return Err(Error::Invalid("s must be positive".into()));
    }
    if n > 2 * j {
        return Err(Error::Invalid(format!("N = {n} exceeds 2J = {}", 2 * j)));
    }
    Ok(Ratio::from_integer(1) + Ratio::new(2 * j as i64 - n as i64, s as i64))
}

/// One curve of characters: its certified `s` lower bound and the image tags its points may carry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveAllowance {
    pub s_lower: u32,
    pub allowed: Vec<TagFilter>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScenarioReport {
    pub triple: TriangleTriple,
    /// Census characters admitted by some curve.
    pub j: u32,
    /// Those among them that conjugate into the normalizer.
    pub n: u32,
    pub s: u32,
    /// `1 + (2J - N)/s` written as `p/q`.
    pub exact: String,
    pub bound: u32,
}

/// Bound for a union of disjoint curves: seminorms add, so `s` is the sum of the curve
/// bounds and each census character counts once however many curves admit it.
pub fn scenario_report(t: TriangleTriple, curves: &[CurveAllowance]) -> Result<ScenarioReport> {
    if curves.is_empty() {
        return Err(Error::Invalid("scenario needs at least one curve".into()));
    }
    let census = cached_characters(t)?;
    let admitted: Vec<&CharacterRecord> = census
        .iter()
        .filter(|r| curves.iter().any(|c| c.allowed.iter().any(|f| f.matches(r.image))))
        .collect();
    let j = admitted.len() as u32;
    let n = admitted.iter().filter(|r| r.dihedral).count() as u32;
    let s = curves.iter().map(|c| c.s_lower).sum();
    let exact = distance_formula(s, j, n)?;
    let bound = exact.floor().to_integer() as u32;
    Ok(ScenarioReport { triple: t, j, n, s, exact: exact.to_string(), bound })
}

pub fn scenario_bound(t: TriangleTriple, curves: &[CurveAllowance]) -> Result<u32> {
    Ok(scenario_report(t, curves)?.bound)
}

/// Input schema for `census bound`:
/// `{"triple": [a, b, c], "curves": [{"s_lower": 2, "allowed": ["I60", "dihedral"]}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub triple: TriangleTriple,
    pub curves: Vec<CurveAllowance>,
}

impl ScenarioSpec {
    pub fn evaluate(&self) -> Result<ScenarioReport> {
        scenario_report(self.triple, &self.curves)
    }
}
