//! Impossibility certificates: exhaustive enumeration over a parameter grid.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::constraints::Constraint;
use super::counting::{case_counting_bound, CountingCase, CountingVerdict};
use super::model::Case;
use super::search::{enumerate_with_stats, GraphParams};
use crate::error::{Error, Result};

pub const LEMMAS: [&str; 4] = ["L4.12", "L4.13", "L4.19", "Prism-Claim6"];

const MAX_WITNESSES: usize = 5;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridResult {
    pub case: Case,
    pub n: usize,
    pub delta: usize,
    pub constraints: BTreeSet<Constraint>,
    pub skeletons: usize,
    pub candidates: u64,
    pub fully_checked: u64,
    pub admissible: usize,
    pub rejected_by: BTreeMap<Constraint, u64>,
    /// Up to five admissible graphs as rotation-system JSON.
    pub witnesses: Vec<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub lemma: String,
    pub grid: Vec<GridResult>,
    pub counting: Vec<(usize, usize, CountingVerdict)>,
    pub searched: u64,
    pub admissible: usize,
    pub wall_time_ms: u128,
}

/// `(case, n values, Δ values)` searched for each lemma.
pub fn lemma_grid(id: &str) -> Result<(Case, Vec<usize>, Vec<usize>)> {
    Ok(match id {
        "L4.12" => (Case::CaseI, (1..=8).collect(), (5..=10).collect()),
        "L4.13" => (Case::CaseII, vec![4, 6, 8], (5..=10).collect()),
        "L4.19" => (Case::CaseII, vec![2], (5..=10).collect()),
        "Prism-Claim6" => (Case::Prism, vec![4, 6], vec![4]),
        _ => return Err(Error::UnknownLemma(id.to_string())),
    })
}

pub fn verify_lemma(id: &str) -> Result<Certificate> {
    verify_lemma_with(id, &[])
}

/// As [`verify_lemma`] with some constraints switched off.
pub fn verify_lemma_with(id: &str, disabled: &[Constraint]) -> Result<Certificate> {
    let start = Instant::now();
    let (case, ns, deltas) = lemma_grid(id)?;
    let mut grid = Vec::new();
    let mut counting = Vec::new();
    for &n in &ns {
        for &delta in &deltas {
            let params = GraphParams::new(case, n, delta).without(disabled);
            let e = enumerate_with_stats(&params)?;
            grid.push(GridResult {
                case,
                n,
                delta,
                constraints: params.enabled.clone(),
                skeletons: e.stats.skeletons,
                candidates: e.stats.candidates,
                fully_checked: e.stats.fully_checked,
                admissible: e.graphs.len(),
                rejected_by: e.stats.rejected_by,
                witnesses: e.graphs.iter().take(MAX_WITNESSES).map(|g| g.to_rotation_json()).collect(),
            });
            let cc = match case {
                Case::CaseI => Some(CountingCase::CaseI),
                Case::CaseII => Some(CountingCase::CaseII),
                Case::Prism => None,
            };
            if let Some(cc) = cc {
                counting.push((n, delta, case_counting_bound(cc, delta, n)));
            }
        }
    }
    Ok(Certificate {
        lemma: id.to_string(),
        searched: grid.iter().map(|g| g.candidates).sum(),
        admissible: grid.iter().map(|g| g.admissible).sum(),
        grid,
        counting,
        wall_time_ms: start.elapsed().as_millis(),
    })
}
