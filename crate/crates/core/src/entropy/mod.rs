//! Discrete model of a regular continuum: a subdivided tree as a cell
//! complex with star-open sets, open covers with finite boundary, exact
//! minimum subcovers and sequence entropy of automorphism sequences.

mod complex;
mod cover;
mod setcover;

pub use complex::{Automorphism, CellComplex, CellSet};
pub use cover::{
    branch_swaps, entropy_fixtures, irreducible_subcover, join_refinement, lemma1_check, minimum_subcover,
    path_b_cover, pull_back, random_open_cover, sequence_entropy, AutoSeq, CellCover, EntropyFixture, EntropyRow,
    Lemma1Report, MAX_ENTROPY_N,
};
pub use setcover::{maximal_members, minimum_cover};
