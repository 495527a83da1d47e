//! Graphs in a disk: outer vertex `d_V` with `N` edge-endpoints, four interior holes.
//!
//! Positions `0..N` run around `d_V`; position `p` carries label `p mod n + 1`.
//! Corner `c` is the arc of `d_V` between positions `c` and `c + 1` (mod `N`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HOLES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Case {
    /// Every hole has valency 1.
    CaseI,
    /// Holes of valency 0 or 2, at least three of valency 2; `n` even.
    CaseII,
    /// Two-sided analogue with `d_V` of valency `2Δn`; at least two holes of valency 2.
    Prism,
}

impl Case {
    /// Number of times each label occurs around `d_V`.
    pub fn occurrences(self, delta: usize) -> usize {
        match self {
            Case::CaseI | Case::CaseII => delta,
            Case::Prism => 2 * delta,
        }
    }

    /// Faces carry a side (corner parity) only when the surface separates.
    pub fn separating(self) -> bool {
        !matches!(self, Case::CaseI)
    }

    pub fn min_valency_two(self) -> usize {
        match self {
            Case::CaseI => 0,
            Case::CaseII => 3,
            Case::Prism => 2,
        }
    }

    pub fn parse(s: &str) -> Result<Case> {
        match s.to_ascii_lowercase().replace(['-', '_', ' '], "").as_str() {
            "casei" | "i" | "1" => Ok(Case::CaseI),
            "caseii" | "ii" | "2" => Ok(Case::CaseII),
            "prism" => Ok(Case::Prism),
            _ => Err(Error::Invalid(format!("unknown case `{s}`"))),
        }
    }
}

/// What sits at one edge-endpoint of `d_V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Point {
    /// D-edge to another endpoint of `d_V`.
    D { to: usize },
    /// CD-edge into a chain of `holes` valency-2 vertices that returns to `d_V` at `to`.
    Strand { to: usize, holes: u8 },
    /// CD-edge to a valency-1 hole.
    Pendant,
}

/// Hole configurations not attached to `d_V`, sitting inside a face.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Floating {
    /// Valency-0 hole.
    Isolated,
    /// C-edge joining two valency-1 holes.
    Segment,
    /// Cycle of `len` valency-2 holes enclosing `inner`. A loop needs nonempty `inner`.
    Cycle { len: u8, inner: Vec<Floating> },
}

impl Floating {
    pub fn holes(&self) -> usize {
        match self {
            Floating::Isolated => 1,
            Floating::Segment => 2,
            Floating::Cycle { len, inner } => *len as usize + inner.iter().map(Floating::holes).sum::<usize>(),
        }
    }

    pub fn valency_two(&self) -> usize {
        match self {
            Floating::Cycle { len, inner } => *len as usize + inner.iter().map(Floating::valency_two).sum::<usize>(),
            _ => 0,
        }
    }

    /// Sum of hole valencies.
    pub fn valency(&self) -> usize {
        match self {
            Floating::Isolated => 0,
            Floating::Segment => 2,
            Floating::Cycle { len, inner } => 2 * *len as usize + inner.iter().map(Floating::valency).sum::<usize>(),
        }
    }

    /// c-corners contributed to the surrounding face.
    pub fn rim(&self) -> usize {
        match self {
            Floating::Isolated => 0,
            Floating::Segment => 2,
            Floating::Cycle { len, .. } => *len as usize,
        }
    }

    pub fn encode(&self, out: &mut Vec<u32>) {
        match self {
            Floating::Isolated => out.push(1),
            Floating::Segment => out.push(2),
            Floating::Cycle { len, inner } => {
                out.extend([3, *len as u32, inner.len() as u32]);
                for f in inner {
                    f.encode(out);
                }
            }
        }
    }

    fn validate(&self, case: Case, nested: bool) -> Result<()> {
        match (self, case) {
            (Floating::Segment, Case::CaseI) if !nested => Ok(()),
            (Floating::Isolated, Case::CaseII | Case::Prism) => Ok(()),
            (Floating::Cycle { len, inner }, Case::CaseII | Case::Prism) => {
                if *len == 0 || (*len == 1 && inner.is_empty()) {
                    return Err(Error::Invalid("inessential C-cycle".into()));
                }
                if inner.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::Invalid("cycle contents not sorted".into()));
                }
                inner.iter().try_for_each(|f| f.validate(case, true))
            }
            _ => Err(Error::Invalid(format!("{self:?} not allowed in {case:?}"))),
        }
    }
}

/// One face of the graph. `corners` are `d_V`-corners in walk order; inner faces of
/// C-cycles have none.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub corners: Vec<usize>,
    pub c_corners: usize,
    /// Every bounding edge is a D-edge.
    pub d_only: bool,
    pub disk: bool,
    /// Contains a valency-0 hole.
    pub punctured: bool,
    pub depth: usize,
    pub side: Option<usize>,
}

impl Face {
    /// `(a, b)` = (`d_V`-corners, c-corners), defined for disk faces only.
    pub fn face_type(&self) -> Option<(usize, usize)> {
        self.disk.then_some((self.corners.len(), self.c_corners))
    }
}

/// Maximal set of mutually parallel D-edges, chords as `(a, b)` with `a < b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub chords: Vec<(usize, usize)>,
}

impl Family {
    pub fn weight(&self) -> usize {
        self.chords.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiskGraph {
    pub case: Case,
    pub n: usize,
    pub delta: usize,
    pub points: Vec<Point>,
    /// Floating components anchored at a corner of their face (normalized: least corner).
    pub floats: Vec<(usize, Floating)>,
}

impl DiskGraph {
    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn label(&self, p: usize) -> usize {
        p % self.n + 1
    }

    pub fn holes(&self) -> usize {
        let attached: usize = self
            .points
            .iter()
            .enumerate()
            .map(|(p, pt)| match *pt {
                Point::Pendant => 1,
                Point::Strand { to, holes } if p < to => holes as usize,
                _ => 0,
            })
            .sum();
        attached + self.floats.iter().map(|(_, f)| f.holes()).sum::<usize>()
    }

    pub fn valency_two(&self) -> usize {
        let strands: usize = self
            .points
            .iter()
            .enumerate()
            .map(|(p, pt)| match *pt {
                Point::Strand { to, holes } if p < to => holes as usize,
                _ => 0,
            })
            .sum();
        strands + self.floats.iter().map(|(_, f)| f.valency_two()).sum::<usize>()
    }

    /// All chords `(a, b)`, `a < b`, with their point kind.
    pub fn chords(&self) -> Vec<(usize, usize)> {
        self.points
            .iter()
            .enumerate()
            .filter_map(|(p, pt)| match *pt {
                Point::D { to } | Point::Strand { to, .. } if p < to => Some((p, to)),
                _ => None,
            })
            .collect()
    }

    pub fn d_edges(&self) -> Vec<(usize, usize)> {
        self.points
            .iter()
            .enumerate()
            .filter_map(|(p, pt)| match *pt {
                Point::D { to } if p < to => Some((p, to)),
                _ => None,
            })
            .collect()
    }

    /// (holes, summed valency) strictly inside chord `(a, b)`, i.e. on the side of
    /// positions `a+1..b` and corners `a..b`.
    pub fn inside(&self, a: usize, b: usize) -> (usize, usize) {
        let mut holes = 0;
        let mut val = 0;
        for p in a + 1..b {
            match self.points[p] {
                Point::Pendant => {
                    holes += 1;
                    val += 1;
                }
                Point::Strand { to, holes: h } if p < to => {
                    holes += h as usize;
                    val += 2 * h as usize;
                }
                _ => {}
            }
        }
        for (c, f) in &self.floats {
            if (a..b).contains(c) {
                holes += f.holes();
                val += f.valency();
            }
        }
        (holes, val)
    }

    pub fn total_valency(&self) -> usize {
        let (h, v) = self.inside(0, self.size());
        debug_assert_eq!(h, self.holes());
        v
    }

    pub fn validate(&self) -> Result<()> {
        let big_n = self.size();
        if self.n == 0 || self.delta == 0 {
            return Err(Error::Invalid("n and delta must be positive".into()));
        }
        if big_n != self.case.occurrences(self.delta) * self.n {
            return Err(Error::Invalid(format!("{big_n} endpoints, expected {}", self.case.occurrences(self.delta) * self.n)));
        }
        if self.case.separating() && self.n % 2 == 1 {
            return Err(Error::Invalid("n must be even in separating cases".into()));
        }
        for (p, pt) in self.points.iter().enumerate() {
            match *pt {
                Point::D { to } | Point::Strand { to, .. } => {
                    if to >= big_n || to == p || !partners(pt, &self.points[to], p) {
                        return Err(Error::Invalid(format!("endpoint {p} has no matching partner")));
                    }
                    if let Point::Strand { holes, .. } = pt {
                        if *holes == 0 || self.case == Case::CaseI {
                            return Err(Error::Invalid(format!("bad strand at {p}")));
                        }
                    }
                }
                Point::Pendant if self.case != Case::CaseI => {
                    return Err(Error::Invalid(format!("pendant at {p} outside Case I")));
                }
                Point::Pendant => {}
            }
        }
        let chords = self.chords();
        for (i, &(a, b)) in chords.iter().enumerate() {
            for &(c, d) in &chords[i + 1..] {
                if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                    return Err(Error::Invalid(format!("chords ({a},{b}) and ({c},{d}) cross")));
                }
            }
        }
        for (c, f) in &self.floats {
            if *c >= big_n {
                return Err(Error::Invalid(format!("float anchored at corner {c} out of range")));
            }
            f.validate(self.case, false)?;
        }
        if self.holes() != HOLES {
            return Err(Error::Invalid(format!("{} holes, expected {HOLES}", self.holes())));
        }
        if self.valency_two() < self.case.min_valency_two() {
            return Err(Error::Invalid(format!("only {} holes of valency 2", self.valency_two())));
        }
        for (a, b) in self.d_edges() {
            let (h, _) = self.inside(a, b);
            if h == 0 || h == HOLES {
                return Err(Error::Invalid(format!("D-edge ({a},{b}) is inessential")));
            }
        }
        Ok(())
    }

    /// Corner -> index of its depth-0 face, plus the walk order of each such face.
    fn corner_walks(&self) -> (Vec<usize>, Vec<Vec<usize>>) {
        let big_n = self.size();
        let mut face_of = vec![usize::MAX; big_n];
        let mut walks = Vec::new();
        for start in 0..big_n {
            if face_of[start] != usize::MAX {
                continue;
            }
            let id = walks.len();
            let mut walk = Vec::new();
            let mut c = start;
            loop {
                face_of[c] = id;
                walk.push(c);
                c = self.next_corner(c);
                if c == start {
                    break;
                }
            }
            walks.push(walk);
        }
        (face_of, walks)
    }

    fn next_corner(&self, c: usize) -> usize {
        let q = (c + 1) % self.size();
        match self.points[q] {
            Point::D { to } | Point::Strand { to, .. } => to,
            Point::Pendant => q,
        }
    }

    /// Re-anchor every float at the least corner of its face and sort.
    pub fn normalize(&mut self) {
        let (face_of, walks) = self.corner_walks();
        for (c, _) in self.floats.iter_mut() {
            *c = *walks[face_of[*c]].iter().min().expect("nonempty walk");
        }
        self.floats.sort();
    }

    pub fn faces(&self) -> Vec<Face> {
        let (face_of, walks) = self.corner_walks();
        let mut faces: Vec<Face> = walks
            .iter()
            .map(|walk| {
                let mut f = Face {
                    corners: walk.clone(),
                    c_corners: 0,
                    d_only: true,
                    disk: true,
                    punctured: false,
                    depth: 0,
                    side: self.case.separating().then_some(walk[0] % 2),
                };
                for &c in walk {
                    match self.points[(c + 1) % self.size()] {
                        Point::D { .. } => {}
                        Point::Strand { holes, .. } => {
                            f.c_corners += holes as usize;
                            f.d_only = false;
                        }
                        Point::Pendant => {
                            f.c_corners += 1;
                            f.d_only = false;
                        }
                    }
                }
                f
            })
            .collect();
        for (c, fl) in &self.floats {
            place_float(&mut faces, face_of[*c], fl);
        }
        faces
    }

    /// Families of parallel D-edges (chords linked through D-bigons), ordered by least endpoint.
    pub fn families(&self) -> Vec<Family> {
        let d = self.d_edges();
        let index = |p: usize| d.iter().position(|&(a, b)| a == p || b == p).expect("D-edge endpoint");
        let mut parent: Vec<usize> = (0..d.len()).collect();
        fn root(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for f in self.faces() {
            if is_d_bigon(&f) {
                let big_n = self.size();
                let x = root(&mut parent, index((f.corners[0] + 1) % big_n));
                let y = root(&mut parent, index((f.corners[1] + 1) % big_n));
                parent[x] = y;
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<(usize, usize)>> = Default::default();
        for i in 0..d.len() {
            let r = root(&mut parent, i);
            groups.entry(r).or_default().push(d[i]);
        }
        let mut fams: Vec<Family> = groups.into_values().map(|chords| Family { chords }).collect();
        fams.sort_by_key(|f| f.chords[0].0);
        fams
    }

    pub fn rotated(&self, s: usize) -> DiskGraph {
        let big_n = self.size();
        self.mapped(|p| (p + s) % big_n, |c| (c + s) % big_n)
    }

    pub fn reflected(&self) -> DiskGraph {
        let big_n = self.size();
        self.mapped(|p| big_n - 1 - p, |c| (2 * big_n - 2 - c) % big_n)
    }

    fn mapped(&self, pos: impl Fn(usize) -> usize, corner: impl Fn(usize) -> usize) -> DiskGraph {
        let mut points = vec![Point::Pendant; self.size()];
        for (p, pt) in self.points.iter().enumerate() {
            points[pos(p)] = match *pt {
                Point::D { to } => Point::D { to: pos(to) },
                Point::Strand { to, holes } => Point::Strand { to: pos(to), holes },
                Point::Pendant => Point::Pendant,
            };
        }
        let mut g = DiskGraph {
            case: self.case,
            n: self.n,
            delta: self.delta,
            points,
            floats: self.floats.iter().map(|(c, f)| (corner(*c), f.clone())).collect(),
        };
        g.normalize();
        g
    }

    /// Encoding of a normalized graph; comparable across rotations.
    pub fn encode(&self) -> Vec<u32> {
        let big_n = self.size();
        let mut out = Vec::with_capacity(3 * big_n);
        let mut fi = 0;
        for (p, pt) in self.points.iter().enumerate() {
            match *pt {
                Point::D { to } => out.extend([1, ((to + big_n - p) % big_n) as u32]),
                Point::Strand { to, holes } => out.extend([2, ((to + big_n - p) % big_n) as u32, holes as u32]),
                Point::Pendant => out.push(3),
            }
            let start = fi;
            while fi < self.floats.len() && self.floats[fi].0 == p {
                fi += 1;
            }
            if fi > start {
                out.extend([9, (fi - start) as u32]);
                for (_, f) in &self.floats[start..fi] {
                    f.encode(&mut out);
                }
            }
        }
        out
    }

    /// Least encoding over all rotations and reflections of the disk.
    pub fn canonical(&self) -> DiskGraph {
        let mut g = self.clone();
        g.normalize();
        let mut best = g.clone();
        let mut best_key = best.encode();
        let refl = g.reflected();
        for base in [&g, &refl] {
            for s in 0..self.size() {
                let h = base.rotated(s);
                let key = h.encode();
                if key < best_key {
                    best_key = key;
                    best = h;
                }
            }
        }
        best
    }

    pub fn canonical_key(&self) -> Vec<u32> {
        self.canonical().encode()
    }

    /// Rotation system around `d_V` plus floating components, as JSON.
    pub fn to_rotation_json(&self) -> serde_json::Value {
        let around: Vec<serde_json::Value> = self
            .points
            .iter()
            .enumerate()
            .map(|(p, pt)| {
                let mut v = serde_json::json!({ "position": p, "label": self.label(p) });
                match *pt {
                    Point::D { to } => {
                        v["edge"] = "D".into();
                        v["to"] = to.into();
                        v["to_label"] = self.label(to).into();
                    }
                    Point::Strand { to, holes } => {
                        v["edge"] = "CD".into();
                        v["to"] = to.into();
                        v["to_label"] = self.label(to).into();
                        v["through_holes"] = holes.into();
                    }
                    Point::Pendant => v["edge"] = "CD-pendant".into(),
                }
                v
            })
            .collect();
        let floats: Vec<serde_json::Value> = self
            .floats
            .iter()
            .map(|(c, f)| serde_json::json!({ "corner": c, "component": f }))
            .collect();
        serde_json::json!({
            "case": self.case,
            "n": self.n,
            "delta": self.delta,
            "d_v": around,
            "floating": floats,
        })
    }

    /// Graphviz rendering: `d_V` as a ring of endpoint nodes, holes as separate nodes.
    pub fn to_dot(&self) -> String {
        let big_n = self.size();
        let mut s = String::from("graph G {\n  layout=circo;\n  node [shape=point];\n");
        for p in 0..big_n {
            s += &format!("  p{p} [xlabel=\"{}\"];\n", self.label(p));
            s += &format!("  p{p} -- p{} [style=dotted];\n", (p + 1) % big_n);
        }
        let mut hole = 0;
        let mut new_hole = |s: &mut String| {
            hole += 1;
            *s += &format!("  c{hole} [shape=circle,label=\"c{hole}\",width=0.3];\n");
            hole
        };
        for (p, pt) in self.points.iter().enumerate() {
            match *pt {
                Point::D { to } if p < to => s += &format!("  p{p} -- p{to} [color=black];\n"),
                Point::Strand { to, holes } if p < to => {
                    let mut prev = format!("p{p}");
                    for _ in 0..holes {
                        let h = new_hole(&mut s);
                        s += &format!("  {prev} -- c{h} [color=blue];\n");
                        prev = format!("c{h}");
                    }
                    s += &format!("  {prev} -- p{to} [color=blue];\n");
                }
                Point::Pendant => {
                    let h = new_hole(&mut s);
                    s += &format!("  p{p} -- c{h} [color=blue];\n");
                }
                _ => {}
            }
        }
        fn float_dot(f: &Floating, s: &mut String, new_hole: &mut dyn FnMut(&mut String) -> usize) {
            match f {
                Floating::Isolated => {
                    new_hole(s);
                }
                Floating::Segment => {
                    let a = new_hole(s);
                    let b = new_hole(s);
                    *s += &format!("  c{a} -- c{b} [color=red];\n");
                }
                Floating::Cycle { len, inner } => {
                    let ids: Vec<usize> = (0..*len).map(|_| new_hole(s)).collect();
                    for i in 0..ids.len() {
                        *s += &format!("  c{} -- c{} [color=red];\n", ids[i], ids[(i + 1) % ids.len()]);
                    }
                    for g in inner {
                        float_dot(g, s, new_hole);
                    }
                }
            }
        }
        for (_, f) in &self.floats {
            float_dot(f, &mut s, &mut new_hole);
        }
        s + "}\n"
    }
}

fn partners(pt: &Point, other: &Point, p: usize) -> bool {
    match (*pt, *other) {
        (Point::D { .. }, Point::D { to }) => to == p,
        (Point::Strand { holes, .. }, Point::Strand { to, holes: h }) => to == p && h == holes,
        _ => false,
    }
}

fn place_float(faces: &mut Vec<Face>, at: usize, fl: &Floating) {
    let f = &mut faces[at];
    f.disk = false;
    f.c_corners += fl.rim();
    if let Floating::Isolated = fl {
        f.punctured = true;
    }
    if let Floating::Cycle { len, inner } = fl {
        let side = f.side.map(|s| 1 - s);
        let depth = f.depth + 1;
        faces.push(Face {
            corners: Vec::new(),
            c_corners: *len as usize,
            d_only: false,
            disk: true,
            punctured: false,
            depth,
            side,
        });
        let id = faces.len() - 1;
        for g in inner {
            place_float(faces, id, g);
        }
    }
}

/// Bigon bounded by two parallel D-edges with nothing between them.
pub fn is_d_bigon(f: &Face) -> bool {
    f.depth == 0 && f.corners.len() == 2 && f.d_only && f.disk && f.c_corners == 0
}
