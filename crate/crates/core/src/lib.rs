//! Numerical machinery for radial functions in Besov and Lizorkin–Triebel spaces.
//!
//! Profiles are even functions sampled on symmetric grids. Around them sit the
//! weighted quadrature of the radial reduction, annular coverings and atoms,
//! the adapted sequence spaces, atomic decompositions with surrogate trace-space
//! norms, trace and extension, weighted BV, the named test families and the
//! decay checks.

// `!(x > 0.0)` style guards reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod atoms;
pub mod bump;
pub mod bv;
pub mod covering;
pub mod decay;
pub mod decomposition;
pub mod error;
pub mod experiments;
pub mod families;
pub mod grid;
pub mod numerics;
pub mod profile;
pub mod radial;
pub mod report;
pub mod seq;
pub mod spaces;
pub mod trace;

pub use error::{Error, Result};
pub use grid::{Grid1D, GridKind, GridSpec};
pub use profile::RadialProfile;
pub use radial::{lp_norm_rd, radial_gradient_identity_check, radial_laplacian, weighted_lp_norm, RadialField};
pub use experiments::{list_experiments, run_experiment, ExperimentConfig, ExperimentOutput, Table};
pub use report::{Assertion, Provenance, Report};
pub use spaces::{ParamRegion, Scale, SpaceParams, Verdict};
