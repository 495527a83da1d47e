//! Exhaustive search: hole skeletons (reduced structure without edge weights) expanded
//! by all weight assignments to their D-edge families.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::constraints::{default_constraints, first_violation, Constraint};
use super::model::{Case, DiskGraph, Floating, Point, HOLES};
use crate::error::{Error, Result};

pub const MAX_N: usize = 8;
pub const MAX_DELTA: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphParams {
    pub case: Case,
    pub n: usize,
    pub delta: usize,
    pub enabled: BTreeSet<Constraint>,
}

impl GraphParams {
    /// Parameters with the default constraint set for the case.
    pub fn new(case: Case, n: usize, delta: usize) -> Self {
        GraphParams { case, n, delta, enabled: default_constraints(case, n) }
    }

    pub fn without(mut self, disabled: &[Constraint]) -> Self {
        for c in disabled {
            self.enabled.remove(c);
        }
        self
    }

    pub fn size(&self) -> usize {
        self.case.occurrences(self.delta) * self.n
    }

    pub fn check_envelope(&self) -> Result<()> {
        if self.n == 0 || self.delta == 0 {
            return Err(Error::Invalid("n and delta must be at least 1".into()));
        }
        if self.n > MAX_N || self.delta > MAX_DELTA {
            return Err(Error::Envelope(format!("n = {} (max {MAX_N}), delta = {} (max {MAX_DELTA})", self.n, self.delta)));
        }
        if self.case.separating() && self.n % 2 == 1 {
            return Err(Error::Invalid(format!("{:?} needs even n, got {}", self.case, self.n)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Item {
    /// A family of parallel D-edges enclosing a region with 1 to 3 holes.
    D(Region),
    /// A chain of valency-2 holes between two endpoints, enclosing a region.
    Strand(u8, Region),
    Pendant,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Region {
    pub items: Vec<Item>,
    pub floats: Vec<Floating>,
}

impl Region {
    pub fn holes(&self) -> usize {
        self.items
            .iter()
            .map(|it| match it {
                Item::D(r) => r.holes(),
                Item::Strand(h, r) => *h as usize + r.holes(),
                Item::Pendant => 1,
            })
            .sum::<usize>()
            + self.floats.iter().map(Floating::holes).sum::<usize>()
    }

    fn valency_two(&self) -> usize {
        self.items
            .iter()
            .map(|it| match it {
                Item::D(r) => r.valency_two(),
                Item::Strand(h, r) => *h as usize + r.valency_two(),
                Item::Pendant => 0,
            })
            .sum::<usize>()
            + self.floats.iter().map(Floating::valency_two).sum::<usize>()
    }

    /// Endpoints on `d_V` that are not D-edges.
    fn fixed_points(&self) -> usize {
        self.items
            .iter()
            .map(|it| match it {
                Item::D(r) => r.fixed_points(),
                Item::Strand(_, r) => 2 + r.fixed_points(),
                Item::Pendant => 1,
            })
            .sum()
    }

}

/// Per-family data in preorder: non-D endpoints inside, and descendant families.
#[derive(Clone, Debug)]
struct FamInfo {
    fixed_inside: usize,
    desc: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Skeleton {
    pub root: Region,
    families: Vec<FamInfo>,
    fixed: usize,
}

impl Skeleton {
    fn new(root: Region) -> Self {
        let mut families = Vec::new();
        fn walk(r: &Region, fams: &mut Vec<FamInfo>) -> Vec<usize> {
            let mut ids = Vec::new();
            for it in &r.items {
                match it {
                    Item::D(child) => {
                        let id = fams.len();
                        fams.push(FamInfo { fixed_inside: child.fixed_points(), desc: Vec::new() });
                        let desc = walk(child, fams);
                        ids.push(id);
                        ids.extend(&desc);
                        fams[id].desc = desc;
                    }
                    Item::Strand(_, child) => ids.extend(walk(child, fams)),
                    Item::Pendant => {}
                }
            }
            ids
        }
        walk(&root, &mut families);
        let fixed = root.fixed_points();
        Skeleton { root, families, fixed }
    }

    pub fn family_count(&self) -> usize {
        self.families.len()
    }

    /// Graph with the given family weights (preorder). Root floats sit at corner `N - 1`.
    pub fn flatten(&self, case: Case, n: usize, delta: usize, weights: &[usize]) -> DiskGraph {
        struct Builder<'a> {
            points: Vec<Point>,
            floats: Vec<(usize, Floating)>,
            weights: &'a [usize],
            next: usize,
        }
        impl Builder<'_> {
            fn region(&mut self, r: &Region, anchor: usize) {
                for it in &r.items {
                    match it {
                        Item::D(child) => {
                            let w = self.weights[self.next];
                            self.next += 1;
                            let start = self.points.len();
                            self.points.extend(std::iter::repeat_n(Point::Pendant, w));
                            self.region(child, start + w - 1);
                            for j in (0..w).rev() {
                                let close = self.points.len();
                                self.points.push(Point::D { to: start + j });
                                self.points[start + j] = Point::D { to: close };
                            }
                        }
                        Item::Strand(h, child) => {
                            let open = self.points.len();
                            self.points.push(Point::Pendant);
                            self.region(child, open);
                            let close = self.points.len();
                            self.points.push(Point::Strand { to: open, holes: *h });
                            self.points[open] = Point::Strand { to: close, holes: *h };
                        }
                        Item::Pendant => self.points.push(Point::Pendant),
                    }
                }
                self.floats.extend(r.floats.iter().map(|f| (anchor, f.clone())));
            }
        }
        let mut b = Builder { points: Vec::new(), floats: Vec::new(), weights, next: 0 };
        b.region(&self.root, usize::MAX);
        let big_n = b.points.len();
        for (c, _) in b.floats.iter_mut() {
            if *c == usize::MAX {
                *c = big_n - 1;
            }
        }
        let mut g = DiskGraph { case, n, delta, points: b.points, floats: b.floats };
        g.normalize();
        g
    }

    /// Symmetry key of the unweighted structure.
    fn key(&self) -> Vec<u32> {
        let g = self.flatten(Case::CaseI, 1, 1, &vec![1; self.families.len()]);
        g.canonical_key()
    }
}

fn atoms(case: Case, h: usize) -> Vec<Floating> {
    match case {
        Case::CaseI => {
            if h == 2 {
                vec![Floating::Segment]
            } else {
                Vec::new()
            }
        }
        Case::CaseII | Case::Prism => {
            let mut out = Vec::new();
            if h == 1 {
                out.push(Floating::Isolated);
            }
            for len in 1..=h {
                for inner in float_sets(case, h - len) {
                    if len == 1 && inner.is_empty() {
                        continue;
                    }
                    out.push(Floating::Cycle { len: len as u8, inner });
                }
            }
            out
        }
    }
}

/// Sorted multisets of floating components with exactly `h` holes.
fn float_sets(case: Case, h: usize) -> Vec<Vec<Floating>> {
    let mut pool: Vec<Floating> = (1..=h).flat_map(|k| atoms(case, k)).collect();
    pool.sort();
    let mut out = Vec::new();
    fn rec(pool: &[Floating], from: usize, left: usize, cur: &mut Vec<Floating>, out: &mut Vec<Vec<Floating>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in from..pool.len() {
            let k = pool[i].holes();
            if k <= left {
                cur.push(pool[i].clone());
                rec(pool, i, left - k, cur, out);
                cur.pop();
            }
        }
    }
    rec(&pool, 0, h, &mut Vec::new(), &mut out);
    out
}

fn d_items(case: Case, h: usize) -> Vec<Item> {
    if !(1..HOLES).contains(&h) {
        return Vec::new();
    }
    // A child that is itself a lone D-family would be parallel to its parent.
    let mut out = Vec::new();
    for on_items in 0..=h {
        let seqs = if on_items == h {
            let mut v: Vec<Vec<Item>> = other_items(case, h).into_iter().map(|it| vec![it]).collect();
            v.extend(multi_sequences(case, h));
            v
        } else {
            sequences(case, on_items)
        };
        for s in &seqs {
            for f in float_sets(case, h - on_items) {
                out.push(Item::D(Region { items: s.clone(), floats: f }));
            }
        }
    }
    out
}

fn other_items(case: Case, h: usize) -> Vec<Item> {
    let mut out = Vec::new();
    if case != Case::CaseI {
        for s in 1..=h {
            out.extend(regions(case, h - s).into_iter().map(|r| Item::Strand(s as u8, r)));
        }
    } else if h == 1 {
        out.push(Item::Pendant);
    }
    out
}

fn items(case: Case, h: usize) -> Vec<Item> {
    let mut out = d_items(case, h);
    out.extend(other_items(case, h));
    out
}

/// Sequences of at least two items holding `h` holes in total.
fn multi_sequences(case: Case, h: usize) -> Vec<Vec<Item>> {
    let mut out = Vec::new();
    for first in 1..h {
        let heads = items(case, first);
        let tails = sequences(case, h - first);
        for a in &heads {
            for t in &tails {
                let mut v = Vec::with_capacity(t.len() + 1);
                v.push(a.clone());
                v.extend(t.iter().cloned());
                out.push(v);
            }
        }
    }
    out
}

fn sequences(case: Case, h: usize) -> Vec<Vec<Item>> {
    if h == 0 {
        return vec![Vec::new()];
    }
    let mut out: Vec<Vec<Item>> = items(case, h).into_iter().map(|it| vec![it]).collect();
    out.extend(multi_sequences(case, h));
    out
}

/// All regions holding exactly `h` holes.
fn regions(case: Case, h: usize) -> Vec<Region> {
    let mut out = Vec::new();
    for on_items in 0..=h {
        let seqs = sequences(case, on_items);
        let fls = float_sets(case, h - on_items);
        for s in &seqs {
            for f in &fls {
                out.push(Region { items: s.clone(), floats: f.clone() });
            }
        }
    }
    out
}

fn build_skeletons(case: Case) -> Vec<Skeleton> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for root in regions(case, HOLES) {
        if root.items.is_empty() || root.valency_two() < case.min_valency_two() {
            continue;
        }
        if root.floats.is_empty() && matches!(root.items.as_slice(), [Item::D(_), Item::D(_)]) {
            continue;
        }
        let sk = Skeleton::new(root);
        if seen.insert(sk.key()) {
            out.push(sk);
        }
    }
    out
}

/// Skeletons of a case, up to disk symmetry.
pub fn skeletons(case: Case) -> &'static [Skeleton] {
    static CACHE: [OnceLock<Vec<Skeleton>>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let i = case as usize;
    CACHE[i].get_or_init(|| build_skeletons(case))
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Ways to give `f` families positive weights summing to `r`.
fn completions(r: usize, f: usize) -> u64 {
    if f == 0 {
        u64::from(r == 0)
    } else if r < f {
        0
    } else {
        binomial(r as u64 - 1, f as u64 - 1)
    }
}

/// First enabled constraint violated by a family of `w` parallel D-edges whose outermost
/// edge spans `span` positions. Chord `j` joins `x + j` to `x + span - j`.
pub fn family_violation(span: usize, w: usize, n: usize, enabled: &BTreeSet<Constraint>) -> Option<Constraint> {
    let s_cycle = |j: usize| n <= 2 || (span - 2 * j - 1).is_multiple_of(n);
    enabled.iter().copied().find(|c| match c {
        Constraint::Parity => (0..w).any(|j| (span - 2 * j).is_multiple_of(n)),
        Constraint::NoSCycle => (0..w.saturating_sub(1)).any(s_cycle),
        Constraint::NoExtendedSCycle => (1..w.saturating_sub(2)).any(s_cycle),
        Constraint::ParallelFamilyBound => w > n / 2 + 1,
        _ => false,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub skeletons: usize,
    /// Weight assignments over all skeletons.
    pub candidates: u64,
    /// Assignments that survived family-level pruning and were checked in full.
    pub fully_checked: u64,
    /// Assignments rejected, keyed by the first violated constraint.
    pub rejected_by: BTreeMap<Constraint, u64>,
}

impl Stats {
    fn merge(&mut self, o: Stats) {
        self.skeletons += o.skeletons;
        self.candidates += o.candidates;
        self.fully_checked += o.fully_checked;
        for (c, v) in o.rejected_by {
            *self.rejected_by.entry(c).or_default() += v;
        }
    }
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub params: GraphParams,
    pub stats: Stats,
    /// Canonical representatives, sorted by encoding.
    pub graphs: Vec<DiskGraph>,
}

struct Expander<'a> {
    sk: &'a Skeleton,
    p: &'a GraphParams,
    prune: bool,
    weights: Vec<usize>,
    stats: Stats,
    found: BTreeMap<Vec<u32>, DiskGraph>,
}

impl Expander<'_> {
    fn dfs(&mut self, f: usize, rem: usize) {
        let id = f - 1;
        let others = id;
        let (lo, hi) = if others == 0 { (rem, rem) } else { (1, rem - others) };
        for w in lo..=hi {
            self.weights[id] = w;
            if self.prune {
                let info = &self.sk.families[id];
                let span = 2 * w - 1 + info.fixed_inside + 2 * info.desc.iter().map(|&g| self.weights[g]).sum::<usize>();
                if let Some(c) = family_violation(span, w, self.p.n, &self.p.enabled) {
                    *self.stats.rejected_by.entry(c).or_default() += completions(rem - w, others);
                    continue;
                }
            }
            if others == 0 {
                self.leaf();
            } else {
                self.dfs(id, rem - w);
            }
        }
    }

    fn leaf(&mut self) {
        self.stats.fully_checked += 1;
        let g = self.sk.flatten(self.p.case, self.p.n, self.p.delta, &self.weights);
        debug_assert!(g.validate().is_ok(), "{:?}", g.validate());
        match first_violation(&g, &self.p.enabled) {
            Some(v) => *self.stats.rejected_by.entry(v.constraint).or_default() += 1,
            None => {
                let c = g.canonical();
                self.found.entry(c.encode()).or_insert(c);
            }
        }
    }
}

fn expand(sk: &Skeleton, p: &GraphParams, prune: bool) -> (Stats, BTreeMap<Vec<u32>, DiskGraph>) {
    let big_n = p.size();
    let k = sk.family_count();
    let mut ex = Expander { sk, p, prune, weights: vec![0; k], stats: Stats { skeletons: 1, ..Stats::default() }, found: BTreeMap::new() };
    if sk.fixed > big_n || (big_n - sk.fixed) % 2 == 1 {
        return (ex.stats, ex.found);
    }
    let total = (big_n - sk.fixed) / 2;
    ex.stats.candidates = completions(total, k);
    if ex.stats.candidates == 0 {
        return (ex.stats, ex.found);
    }
    if k == 0 {
        ex.leaf();
    } else {
        ex.dfs(k, total);
    }
    (ex.stats, ex.found)
}

fn run(params: &GraphParams, prune: bool) -> Result<Enumeration> {
    params.check_envelope()?;
    let parts: Vec<_> = skeletons(params.case).par_iter().map(|sk| expand(sk, params, prune)).collect();
    let mut stats = Stats::default();
    let mut found = BTreeMap::new();
    for (s, f) in parts {
        stats.merge(s);
        for (k, g) in f {
            found.entry(k).or_insert(g);
        }
    }
    Ok(Enumeration { params: params.clone(), stats, graphs: found.into_values().collect() })
}

/// All graphs satisfying the enabled constraints, one per disk-symmetry class.
pub fn enumerate_with_stats(params: &GraphParams) -> Result<Enumeration> {
    run(params, true)
}

/// Same result without family-level pruning; every weight assignment is checked in full.
pub fn enumerate_unpruned(params: &GraphParams) -> Result<Enumeration> {
    run(params, false)
}

pub fn enumerate(params: &GraphParams) -> Result<Vec<DiskGraph>> {
    enumerate_with_stats(params).map(|e| e.graphs)
}
