//! Combinatorial prohibitions on disk graphs. Each predicate returns the first
//! violation it finds together with a human-readable witness.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::model::{is_d_bigon, Case, DiskGraph, Face, Family, Point};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// No D-edge with the same label at both ends.
    Parity,
    /// No D-bigon whose two corners carry the same label pair.
    NoSCycle,
    /// No S-cycle bigon flanked by further parallel D-edges on both sides.
    NoExtendedSCycle,
    /// At most `n/2 + 1` mutually parallel D-edges.
    ParallelFamilyBound,
    /// CD-endpoints of each label are consecutive in the dual order for some stride.
    ConsecutiveLabels,
    /// No disk faces `(a,b)`, `(c,d)` on one side with `c >= 2` and `ad - bc = ±1`.
    ForbiddenFacePairs,
    /// Scharlemann cycles of order 2 or 3 on one side share their label pair.
    SideAssignment,
    /// A side containing a valency-0 hole is not a solid torus.
    SolidTorusFaces,
    /// Face relations on each solid-torus side admit a consistent core multiplicity.
    FibreMultiplicity,
}

impl Constraint {
    pub const ALL: [Constraint; 9] = [
        Constraint::Parity,
        Constraint::NoSCycle,
        Constraint::NoExtendedSCycle,
        Constraint::ParallelFamilyBound,
        Constraint::ConsecutiveLabels,
        Constraint::ForbiddenFacePairs,
        Constraint::SideAssignment,
        Constraint::SolidTorusFaces,
        Constraint::FibreMultiplicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Constraint::Parity => "parity",
            Constraint::NoSCycle => "no_s_cycle",
            Constraint::NoExtendedSCycle => "no_extended_s_cycle",
            Constraint::ParallelFamilyBound => "parallel_family_bound",
            Constraint::ConsecutiveLabels => "consecutive_labels",
            Constraint::ForbiddenFacePairs => "forbidden_face_pairs",
            Constraint::SideAssignment => "side_assignment",
            Constraint::SolidTorusFaces => "solid_torus_faces",
            Constraint::FibreMultiplicity => "fibre_multiplicity",
        }
    }

    pub fn parse(s: &str) -> Result<Constraint> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        Constraint::ALL
            .into_iter()
            .find(|c| c.name() == key)
            .ok_or_else(|| Error::Invalid(format!("unknown constraint `{s}`")))
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Constraints in force for a case and label count.
pub fn default_constraints(case: Case, n: usize) -> BTreeSet<Constraint> {
    use Constraint::*;
    let mut s: BTreeSet<Constraint> = match case {
        Case::CaseI => [Parity, NoSCycle].into(),
        Case::CaseII => [Parity, NoSCycle, SideAssignment, SolidTorusFaces, FibreMultiplicity].into(),
        Case::Prism => [Parity, ParallelFamilyBound, ConsecutiveLabels, SideAssignment, SolidTorusFaces, FibreMultiplicity].into(),
    };
    if case == Case::CaseII && n == 2 {
        s.extend([ConsecutiveLabels, ForbiddenFacePairs]);
    }
    if case == Case::Prism && n >= 4 {
        s.insert(NoExtendedSCycle);
    }
    if case == Case::Prism && n == 2 {
        s.insert(ForbiddenFacePairs);
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub witness: String,
}

/// Labels `i` and `j` at the lower ends of two corners give the same pair `{i, i+1}`.
pub fn same_pair(c1: usize, c2: usize, n: usize) -> bool {
    n <= 2 || c1 % n == c2 % n
}

/// Faces and families computed once per graph.
pub struct Analysis<'a> {
    pub graph: &'a DiskGraph,
    pub faces: Vec<Face>,
    pub families: Vec<Family>,
    /// Chord indices (into `graph.d_edges()`) of each family in nesting order,
    /// with the corner pair of the bigon following each chord.
    chains: Vec<(Vec<(usize, usize)>, Vec<(usize, usize)>)>,
}

impl<'a> Analysis<'a> {
    pub fn new(graph: &'a DiskGraph) -> Self {
        let faces = graph.faces();
        let families = graph.families();
        let big_n = graph.size();
        let chord_at = |p: usize| -> (usize, usize) {
            match graph.points[p] {
                Point::D { to } => (p.min(to), p.max(to)),
                _ => unreachable!("bigon side is a D-edge"),
            }
        };
        let bigons: Vec<((usize, usize), (usize, usize), (usize, usize))> = faces
            .iter()
            .filter(|f| is_d_bigon(f))
            .map(|f| {
                let (c1, c2) = (f.corners[0], f.corners[1]);
                (chord_at((c1 + 1) % big_n), chord_at((c2 + 1) % big_n), (c1, c2))
            })
            .collect();
        let chains = families
            .iter()
            .map(|fam| {
                let mine: Vec<_> = bigons.iter().filter(|b| fam.chords.contains(&b.0)).collect();
                let degree = |c: &(usize, usize)| mine.iter().filter(|b| b.0 == *c || b.1 == *c).count();
                let mut cur = *fam.chords.iter().find(|c| degree(c) <= 1).expect("family is a path");
                let mut order = vec![cur];
                let mut corners = Vec::new();
                let mut used = vec![false; mine.len()];
                while let Some(i) = (0..mine.len()).find(|&i| !used[i] && (mine[i].0 == cur || mine[i].1 == cur)) {
                    used[i] = true;
                    cur = if mine[i].0 == cur { mine[i].1 } else { mine[i].0 };
                    order.push(cur);
                    corners.push(mine[i].2);
                }
                (order, corners)
            })
            .collect();
        Analysis { graph, faces, families, chains }
    }

    fn n(&self) -> usize {
        self.graph.n
    }

    /// Order-k Scharlemann cycles: D-only disk faces, all corners on one label pair.
    fn scharlemann(&self) -> impl Iterator<Item = (usize, &Face)> {
        let n = self.n();
        self.faces.iter().enumerate().filter(move |(_, f)| {
            f.depth == 0
                && f.d_only
                && f.disk
                && f.c_corners == 0
                && f.corners.len() >= 2
                && f.corners.iter().all(|&c| same_pair(c, f.corners[0], n))
        })
    }

    fn pair_of(&self, f: &Face) -> (usize, usize) {
        match self.n() {
            1 => (1, 1),
            2 => (1, 2),
            n => {
                let i = self.graph.label(f.corners[0]);
                (i, i % n + 1)
            }
        }
    }

    fn punctured_sides(&self) -> BTreeSet<usize> {
        self.faces.iter().filter(|f| f.punctured).filter_map(|f| f.side).collect()
    }

    fn sides(&self) -> Vec<usize> {
        if self.graph.case.separating() {
            vec![0, 1]
        } else {
            Vec::new()
        }
    }

    pub fn check(&self, c: Constraint) -> Option<Violation> {
        let witness = match c {
            Constraint::Parity => self.parity(),
            Constraint::NoSCycle => self.no_s_cycle(),
            Constraint::NoExtendedSCycle => self.no_extended_s_cycle(),
            Constraint::ParallelFamilyBound => self.parallel_family_bound(self.n() / 2 + 1),
            Constraint::ConsecutiveLabels => self.consecutive_labels(),
            Constraint::ForbiddenFacePairs => self.forbidden_face_pairs(),
            Constraint::SideAssignment => self.side_assignment(),
            Constraint::SolidTorusFaces => self.solid_torus_faces(),
            Constraint::FibreMultiplicity => self.fibre_multiplicity(),
        };
        witness.map(|witness| Violation { constraint: c, witness })
    }

    fn parity(&self) -> Option<String> {
        let g = self.graph;
        g.d_edges()
            .into_iter()
            .find(|&(a, b)| g.label(a) == g.label(b))
            .map(|(a, b)| format!("D-edge {a}-{b} has label {} at both ends", g.label(a)))
    }

    fn no_s_cycle(&self) -> Option<String> {
        if let Some(f) = self.faces.iter().filter(|f| is_d_bigon(f)).find(|f| same_pair(f.corners[0], f.corners[1], self.n())) {
            return Some(format!("D-bigon at corners {:?} on label pair {:?}", f.corners, self.pair_of(f)));
        }
        // Case II: an S-cycle is excluded because its side would need a multiplicity-2
        // core; face relations forcing that core are excluded for the same reason.
        if self.graph.case == Case::CaseII {
            for (s, ms) in self.case_ii_multiplicities() {
                if ms == [2] {
                    return Some(format!("faces of side {s} force a core of multiplicity 2"));
                }
            }
        }
        None
    }

    fn no_extended_s_cycle(&self) -> Option<String> {
        for (order, corners) in &self.chains {
            let w = order.len();
            for j in 1..w.saturating_sub(2) {
                let (c1, c2) = corners[j];
                if same_pair(c1, c2, self.n()) {
                    return Some(format!(
                        "S-cycle between D-edges {:?} and {:?} flanked by {:?} and {:?}",
                        order[j],
                        order[j + 1],
                        order[j - 1],
                        order[j + 2]
                    ));
                }
            }
        }
        None
    }

    fn parallel_family_bound(&self, bound: usize) -> Option<String> {
        self.families
            .iter()
            .find(|f| f.weight() > bound)
            .map(|f| format!("{} parallel D-edges {:?} exceed {bound}", f.weight(), f.chords))
    }

    fn consecutive_labels(&self) -> Option<String> {
        let g = self.graph;
        let occ = g.case.occurrences(g.delta);
        let strides: Vec<usize> = match g.case {
            Case::Prism => vec![1],
            _ => (1..occ.max(2)).filter(|d| d.gcd(&occ) == 1).collect(),
        };
        for i in 0..g.n {
            let hits: Vec<usize> = (0..occ)
                .filter(|t| matches!(g.points[i + t * g.n], Point::Strand { .. } | Point::Pendant))
                .collect();
            let ok = strides.iter().any(|&d| {
                let set: BTreeSet<usize> = hits.iter().map(|t| t * d % occ).collect();
                cyclic_interval(&set, occ)
            });
            if !ok {
                return Some(format!("CD-endpoints with label {} at occurrences {hits:?} are not consecutive", i + 1));
            }
        }
        None
    }

    fn forbidden_face_pairs(&self) -> Option<String> {
        let disks: Vec<(usize, usize, usize)> = self
            .faces
            .iter()
            .filter_map(|f| f.face_type().map(|(a, b)| (f.side.unwrap_or(0), a, b)))
            .collect();
        for (i, &(s, a, b)) in disks.iter().enumerate() {
            for (j, &(t, c, d)) in disks.iter().enumerate() {
                if i != j && s == t && c >= 2 && (a * d).abs_diff(b * c) == 1 {
                    return Some(format!("faces of type ({a},{b}) and ({c},{d}) on side {s}"));
                }
            }
        }
        None
    }

    /// (side, order, pair) for Scharlemann cycles of order 2 or 3.
    fn small_s_cycles(&self) -> Vec<(usize, usize, (usize, usize))> {
        self.scharlemann()
            .filter(|(_, f)| f.corners.len() <= 3)
            .map(|(_, f)| (f.side.unwrap_or(0), f.corners.len(), self.pair_of(f)))
            .collect()
    }

    fn side_assignment(&self) -> Option<String> {
        if !self.graph.case.separating() {
            return None;
        }
        let cycles = self.small_s_cycles();
        for (i, a) in cycles.iter().enumerate() {
            for b in &cycles[i + 1..] {
                if a.0 == b.0 && a.2 != b.2 {
                    return Some(format!(
                        "Scharlemann cycles of orders {} and {} on distinct pairs {:?}, {:?} in side {}",
                        a.1, b.1, a.2, b.2, a.0
                    ));
                }
            }
        }
        if self.graph.case == Case::Prism {
            let sides: BTreeSet<usize> = cycles.iter().filter(|c| c.1 == 2).map(|c| c.0).collect();
            if sides.len() == 2 {
                return Some("order-2 Scharlemann cycles on both sides".into());
            }
        }
        None
    }

    fn solid_torus_faces(&self) -> Option<String> {
        let punctured = self.punctured_sides();
        for (s, k, pair) in self.small_s_cycles() {
            if punctured.contains(&s) {
                return Some(format!("order-{k} Scharlemann cycle on {pair:?} in punctured side {s}"));
            }
        }
        if self.n() == 2 {
            if let Some(f) = self
                .faces
                .iter()
                .find(|f| f.disk && f.corners.len() >= 2 && f.side.is_some_and(|s| punctured.contains(&s)))
            {
                return Some(format!("disk face {:?} in punctured side {}", f.face_type(), f.side.unwrap_or(0)));
            }
        }
        None
    }

    /// Face relations `a·x + b·t = 0` on one side; they need the two-label handle structure.
    fn relations(&self, side: usize) -> Vec<(i64, i64)> {
        if self.n() != 2 {
            return Vec::new();
        }
        self.faces
            .iter()
            .filter(|f| f.side == Some(side) && !f.punctured)
            .map(|f| (f.corners.len() as i64, f.c_corners as i64))
            .collect()
    }

    fn forced_orders(&self, side: usize, orders: &[usize]) -> BTreeSet<usize> {
        self.small_s_cycles()
            .into_iter()
            .filter(|c| c.0 == side && orders.contains(&c.1))
            .map(|c| c.1)
            .collect()
    }

    /// Admissible core multiplicities of each unpunctured side; order-3 Scharlemann
    /// cycles force 3.
    fn case_ii_multiplicities(&self) -> Vec<(usize, Vec<i64>)> {
        let punctured = self.punctured_sides();
        self.sides()
            .into_iter()
            .filter(|s| !punctured.contains(s))
            .map(|s| (s, multiplicities(&self.relations(s), &self.forced_orders(s, &[3]))))
            .collect()
    }

    fn fibre_multiplicity(&self) -> Option<String> {
        if !self.graph.case.separating() {
            return None;
        }
        let punctured = self.punctured_sides();
        let open: Vec<usize> = self.sides().into_iter().filter(|s| !punctured.contains(s)).collect();
        match self.graph.case {
            Case::CaseII => {
                let sets = self.case_ii_multiplicities();
                if let Some((s, _)) = sets.iter().find(|(_, ms)| ms.is_empty()) {
                    return Some(format!("no core multiplicity fits the faces of side {s}"));
                }
                let target = self.graph.delta as i64 - 1;
                if sets.len() == 2 && !sets.iter().any(|(_, ms)| ms.contains(&target)) {
                    return Some(format!("no side admits a core of multiplicity {target}; candidates {sets:?}"));
                }
                None
            }
            Case::Prism => {
                let fits = |s: usize, pred: &dyn Fn(i64) -> bool| {
                    multiplicities(&self.relations(s), &self.forced_orders(s, &[2, 3])).into_iter().any(pred)
                };
                let ok = open.iter().any(|&s1| {
                    fits(s1, &|m| m == 2) && {
                        let other = 1 - s1;
                        punctured.contains(&other) || fits(other, &|m| m >= 3)
                    }
                });
                (!ok).then(|| "no side carries the multiplicity-2 core with the other side compatible".to_string())
            }
            Case::CaseI => None,
        }
    }
}

fn cyclic_interval(set: &BTreeSet<usize>, m: usize) -> bool {
    if set.len() == m {
        return true;
    }
    set.iter().filter(|&&x| !set.contains(&((x + m - 1) % m))).count() <= 1
}

/// Multiplicities `m >= 2` such that every relation `a·x + b ≡ 0 (mod m)` has a common
/// solution `x`, and every forced order equals `m`.
pub fn multiplicities(rel: &[(i64, i64)], forced: &BTreeSet<usize>) -> Vec<i64> {
    let mut g = 0i64;
    for (i, &(a, b)) in rel.iter().enumerate() {
        for &(c, d) in &rel[i + 1..] {
            g = g.gcd(&(a * d - b * c));
        }
    }
    let candidates: Vec<i64> = if g != 0 { (2..=g).filter(|m| g % m == 0).collect() } else { (2..=64).collect() };
    candidates
        .into_iter()
        .filter(|&m| forced.iter().all(|&k| k as i64 == m))
        .filter(|&m| (0..m).any(|x| rel.iter().all(|&(a, b)| (a * x + b).rem_euclid(m) == 0)))
        .collect()
}

pub fn check_constraint(g: &DiskGraph, c: Constraint) -> Option<Violation> {
    Analysis::new(g).check(c)
}

pub fn first_violation(g: &DiskGraph, enabled: &BTreeSet<Constraint>) -> Option<Violation> {
    let a = Analysis::new(g);
    enabled.iter().find_map(|&c| a.check(c))
}

/// Every violated constraint among `enabled`.
pub fn check(g: &DiskGraph, enabled: &BTreeSet<Constraint>) -> Vec<Violation> {
    let a = Analysis::new(g);
    enabled.iter().filter_map(|&c| a.check(c)).collect()
}

pub fn parity_rule(g: &DiskGraph) -> Option<Violation> {
    check_constraint(g, Constraint::Parity)
}

pub fn no_s_cycle(g: &DiskGraph) -> Option<Violation> {
    check_constraint(g, Constraint::NoSCycle)
}

pub fn no_extended_s_cycle(g: &DiskGraph) -> Option<Violation> {
    check_constraint(g, Constraint::NoExtendedSCycle)
}

pub fn parallel_family_bound(g: &DiskGraph, bound: usize) -> Option<Violation> {
    Analysis::new(g)
        .parallel_family_bound(bound)
        .map(|witness| Violation { constraint: Constraint::ParallelFamilyBound, witness })
}

pub fn consecutive_labels(g: &DiskGraph) -> Option<Violation> {
    check_constraint(g, Constraint::ConsecutiveLabels)
}

pub fn forbidden_face_pairs(g: &DiskGraph) -> Option<Violation> {
    check_constraint(g, Constraint::ForbiddenFacePairs)
}

pub fn side_assignment_consistency(g: &DiskGraph) -> Option<Violation> {
    check_constraint(g, Constraint::SideAssignment)
}

pub fn solid_torus_faces(g: &DiskGraph) -> Option<Violation> {
    check_constraint(g, Constraint::SolidTorusFaces)
}

pub fn fibre_multiplicity(g: &DiskGraph) -> Option<Violation> {
    check_constraint(g, Constraint::FibreMultiplicity)
}
