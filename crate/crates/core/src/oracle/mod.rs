//! Set-level brute-force route and the built-in corpus.

mod body;
mod corpus;
mod crosscheck;
mod epigraph;

pub use body::{
    oracle_plane_slices, oracle_strict_convexity, replay_body_witness, ri_nonempty_check, slice_body, SampledBody,
};
pub use corpus::{builtin_corpus, parse_corpus, CorpusEntry, CorpusError, Source};
pub use crosscheck::{crosscheck, run_engines, Budget, CrosscheckReport, CrosscheckRow};
pub use epigraph::{oracle_epigraph_strict_convexity, GridFunction};
