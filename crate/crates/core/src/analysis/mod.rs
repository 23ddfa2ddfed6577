//! Analytic verdict engines and epigraph-topology predicates.

mod checks;
mod epigraph;
mod lines;
mod verdict;

pub use checks::{
    approach_ladder, check_boundary_blowup, check_continuity, check_domain_convex_open, check_strict_convexity,
    local_upper_bound, main_theorem_verdict, Ladder, LadderOutcome,
};
pub use epigraph::{
    epi_interior_member, strict_epi_complement_identity, strict_epi_interior_member, usc_at, EpiKind, EpigraphHandle,
};
pub use lines::{analyze_1d, line_restriction_verdict};
pub use verdict::{ConditionId, ConditionReport, Verdict, VerdictMode, Witness, WitnessKind};

pub(crate) use checks::distinct_pair;

use thiserror::Error;

use crate::model::DomainError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Domain(#[from] DomainError),
}
