//! Hyperkähler structure triples and the decomposition of horizontal vectors
//! they induce.

mod decompose;
mod structure;

pub use decompose::{
    check_mu_invariance, decompose, operators_at, DecompositionReport, MuInvarianceReport,
    ROperators, CLASSIFICATION_TOLERANCE, MU_INVARIANCE_TOLERANCE,
};
pub use structure::{
    canonical_matrices, canonical_structure, validate_structure, MatrixField, RTag,
    StructureTriple, StructureValidation, PARALLEL_TOLERANCE, STRUCTURE_TOLERANCE,
};
