//! Filling censuses of multi-cusped manifolds: compatibility groups and slope distances
//! on the distinguished torus, plus a few embedded exceptional-slope tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::slope::{distance, Slope};

/// One slope per boundary torus; the empty slope `(0,0)` leaves that torus unfilled.
/// Slot 0 is the distinguished torus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FillingRecord(pub Vec<Slope>);

impl FillingRecord {
    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Self> {
        pairs.iter().map(|&(p, q)| Slope::parse_lenient(p, q)).collect::<Result<_>>().map(FillingRecord)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn t0(&self) -> Slope {
        self.0[0]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusMetadata {
    #[serde(default)]
    pub source: String,
    #[serde(default)]
    pub notes: String,
}

/// Schema: `{"arity": 5, "metadata": {"source": "", "notes": ""}, "records": [[[p,q], ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusFile {
    pub arity: usize,
    #[serde(default)]
    pub metadata: CensusMetadata,
    pub records: Vec<FillingRecord>,
}

impl CensusFile {
    pub fn validate(&self) -> Result<()> {
        if self.arity < 2 {
            return Err(Error::Invalid(format!("arity {} must be at least 2", self.arity)));
        }
        match self.records.iter().find(|r| r.arity() != self.arity) {
            Some(r) => Err(Error::ArityMismatch(self.arity, r.arity())),
            None => Ok(()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CensusFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("census files always serialize")
    }
}

/// Slots `1..` agree wherever both are filled.
pub fn compatible(r1: &FillingRecord, r2: &FillingRecord) -> Result<bool> {
    if r1.arity() != r2.arity() {
        return Err(Error::ArityMismatch(r1.arity(), r2.arity()));
    }
    Ok(r1.0.iter().zip(&r2.0).skip(1).all(|(x, y)| x == y || x.is_empty() || y.is_empty()))
}

/// Maximal cliques of `adj` by Bron–Kerbosch with pivoting, each sorted, in sorted order.
pub fn maximal_cliques(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    fn expand(adj: &[Vec<bool>], r: &mut Vec<usize>, p: Vec<usize>, mut x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() {
            if x.is_empty() {
                let mut c = r.clone();
                c.sort_unstable();
                out.push(c);
            }
            return;
        }
        let pivot = *p
            .iter()
            .chain(&x)
            .max_by_key(|&&u| p.iter().filter(|&&v| adj[u][v]).count())
            .expect("p is nonempty");
        let mut p = p;
        let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
        for v in candidates {
            let np = p.iter().copied().filter(|&u| adj[v][u]).collect();
            let nx = x.iter().copied().filter(|&u| adj[v][u]).collect();
            r.push(v);
            expand(adj, r, np, nx, out);
            r.pop();
            p.retain(|&u| u != v);
            x.push(v);
        }
    }
    let mut out = vec![];
    expand(adj, &mut vec![], (0..adj.len()).collect(), vec![], &mut out);
    out.sort();
    out
}

/// Maximal groups of pairwise compatible records, as indices into `c.records`.
/// Records with an empty slot-0 slope are left out.
pub fn maximal_compatible_groups(c: &CensusFile) -> Result<Vec<Vec<usize>>> {
    c.validate()?;
    let keep: Vec<usize> = (0..c.records.len()).filter(|&i| !c.records[i].t0().is_empty()).collect();
    let mut adj = vec![vec![false; keep.len()]; keep.len()];
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            adj[a][b] = a != b && compatible(&c.records[i], &c.records[j])?;
        }
    }
    let mut groups: Vec<Vec<usize>> =
        maximal_cliques(&adj).into_iter().map(|g| g.into_iter().map(|a| keep[a]).collect()).collect();
    groups.sort();
    Ok(groups)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct T0Distance {
    pub distance: u64,
    pub pair: (Slope, Slope),
}

/// Largest slot-0 distance in the group, with the first pair (in record order) realizing it.
pub fn max_t0_distance(group: &[&FillingRecord]) -> Result<T0Distance> {
    let first = group.first().ok_or_else(|| Error::Invalid("empty group".into()))?;
    let mut best = T0Distance { distance: 0, pair: (first.t0(), first.t0()) };
    if first.t0().is_empty() {
        return Err(Error::EmptySlope);
    }
    for (i, r) in group.iter().enumerate() {
        for s in &group[i + 1..] {
            let d = distance(r.t0(), s.t0())?;
            if d > best.distance {
                best = T0Distance { distance: d, pair: (r.t0(), s.t0()) };
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupReport {
    pub members: Vec<usize>,
    pub distance: u64,
    pub pair: (Slope, Slope),
    /// One slope of the realizing pair is the longitude `(0,1)`.
    pub longitude_involved: bool,
}

/// Every maximal group with its slot-0 distance.
pub fn analyze(c: &CensusFile) -> Result<Vec<GroupReport>> {
    let longitude = Slope::new(0, 1)?;
    maximal_compatible_groups(c)?
        .into_iter()
        .map(|members| {
            let recs: Vec<&FillingRecord> = members.iter().map(|&i| &c.records[i]).collect();
            let d = max_t0_distance(&recs)?;
            let longitude_involved = d.distance > 0 && (d.pair.0 == longitude || d.pair.1 == longitude);
            Ok(GroupReport { members, distance: d.distance, pair: d.pair, longitude_involved })
        })
        .collect()
}

/// Groups whose slot-0 distance is at least `threshold`.
pub fn threshold_report(c: &CensusFile, threshold: u64) -> Result<Vec<GroupReport>> {
    Ok(analyze(c)?.into_iter().filter(|g| g.distance >= threshold).collect())
}

/// Exceptional slopes of a few one-cusped manifolds, meridian first.
const TABLE: &[(&str, &[(i64, i64)])] = &[
    ("figure-eight", &[(1, 0), (0, 1), (1, 1), (-1, 1), (2, 1), (-2, 1), (3, 1), (-3, 1), (4, 1), (-4, 1)]),
    ("N(1)", &[(1, 0), (-3, 1), (-2, 1), (-1, 1), (0, 1), (1, 1)]),
    ("N(-1/2)", &[(1, 0), (-4, 1), (-3, 1), (-2, 1), (-1, 1), (0, 1)]),
    ("N(-4)", &[(1, 0), (-3, 1), (-2, 1), (-1, 1), (-5, 2), (0, 1)]),
];

pub fn table_ids() -> Vec<&'static str> {
    TABLE.iter().map(|(id, _)| *id).collect()
}

pub fn table_lookup(id: &str) -> Result<Vec<Slope>> {
    let key = if id == "4_1" { "figure-eight" } else { id };
    let (_, slopes) =
        TABLE.iter().find(|(name, _)| *name == key).ok_or_else(|| Error::UnknownManifold(id.to_string()))?;
    slopes.iter().map(|&(p, q)| Slope::new(p, q)).collect()
}

/// The census fixture bundled with the crate: the records quoted for the five-cusped
/// chain-link analysis.
pub const BUNDLED_FIXTURE: &str = include_str!("../fixtures/chain_link_fillings.json");

pub fn bundled_fixture() -> CensusFile {
    CensusFile::from_json(BUNDLED_FIXTURE).expect("bundled fixture is valid")
}
