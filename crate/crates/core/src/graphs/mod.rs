//! Intersection graphs in a disk: exhaustive enumeration under combinatorial
//! prohibitions, edge-weight counting, and vertex curvature.

mod certificate;
mod constraints;
mod counting;
mod model;
mod search;

pub use certificate::{lemma_grid, verify_lemma, verify_lemma_with, Certificate, GridResult, LEMMAS};
pub use constraints::{
    check, check_constraint, consecutive_labels, default_constraints, fibre_multiplicity, first_violation, forbidden_face_pairs,
    multiplicities, no_extended_s_cycle, no_s_cycle, parallel_family_bound, parity_rule, same_pair, side_assignment_consistency,
    solid_torus_faces, Analysis, Constraint, Violation,
};
pub use counting::{
    case_counting_bound, curvature_fixtures, edge_type, lambda_accounting, lambda_weight, vertex_curvature, zero_curvature_profiles,
    CountingCase, CountingVerdict, CurvatureFixture, EdgeType, InequalityCheck, ZERO_CURVATURE_PROFILES,
};
pub use model::{is_d_bigon, Case, DiskGraph, Face, Family, Floating, Point, HOLES};
pub use search::{
    enumerate, enumerate_unpruned, enumerate_with_stats, family_violation, skeletons, Enumeration, GraphParams, Item, Region,
    Skeleton, Stats, MAX_DELTA, MAX_N,
};

/// Structural validity plus the enabled constraints.
pub fn check_structure(g: &DiskGraph, params: &GraphParams) -> crate::Result<Vec<Violation>> {
    g.validate()?;
    if (g.case, g.n, g.delta) != (params.case, params.n, params.delta) {
        return Err(crate::Error::Invalid("graph does not match parameters".into()));
    }
    Ok(check(g, &params.enabled))
}
