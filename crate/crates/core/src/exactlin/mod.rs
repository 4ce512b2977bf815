//! Exact rational linear algebra, Smith forms, linear programs and polyhedral cones.

pub mod cone;
pub mod linalg;
pub mod lp;
pub mod snf;

pub use cone::{
    dual_cone, exponential_cone_integral, extreme_rays, is_strongly_convex, min_parameter_in_cone,
    minimal_face, slice_volume, Extended, Face, Integral, RationalCone,
};
pub use linalg::{q, qf, qvec, QVec, Q, Z};
pub use lp::{maximize, LpResult};
pub use snf::{smith_normal_form, IntMatrix, SmithForm};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("point is not in the cone")]
    NotInCone,
    #[error("slice is unbounded or empty")]
    UnboundedSlice,
}
