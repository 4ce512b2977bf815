//! Picard presentations, canonical classes and the invariants a, b, α of a pair.

pub mod adjoint;
pub mod campana;
pub mod canonical;
pub mod pic;

pub use adjoint::{predict, predict_default, AdjointReport, Decomposition, PairInvariants};
pub use campana::{norm_form_b, norm_form_b_closed, correction_sets, CorrectionSets};
pub use canonical::{canonical_class, log_canonical_class, mu_linear, quasi_campana, CampanaData};
pub use pic::{
    pic_presentation, pic_presentation_unchecked, pullback_class, rank_formula, PicPresentation,
};

use crate::pairspec::PairError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantError {
    #[error("the pair is not proper")]
    NotProper,
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("the α integral diverges")]
    Divergent,
    #[error("no strata entry for support {0:?}")]
    MissingStratum(Vec<usize>),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Pair(#[from] PairError),
}
