//! Evaluation of the Tricomi confluent hypergeometric function ψ(a, c, x) by
//! several independent routes, together with the machinery to verify
//! Turán-type inequalities, weight-density moment identities, limits and
//! bound-dominance claims over parameter grids.
//!
//! Layout:
//!
//! * [`gamma`], [`quadrature`], [`kummer`] are numerical building blocks.
//! * [`kernel`] evaluates ψ (quadrature, connection formula, large-x series,
//!   rotated-contour quadrature for complex arguments).
//! * [`turanian`] computes the three Turánians, their normalized ratios and
//!   the attached limit constants.
//! * [`measure`] evaluates the weight density φ, its moments and the
//!   Stieltjes-type representations of the Turánian ratios.
//! * [`bounds`] holds the inequality catalog and the pointwise checks.
//! * [`verify`] is the batch driver behind the `tricomi-verify` binary.

pub mod bounds;
pub mod error;
pub mod gamma;
pub mod kernel;
pub mod kummer;
pub mod measure;
pub mod quadrature;
pub mod scalar;
pub mod turanian;
pub mod verify;

pub use error::{Error, Result};
pub use kernel::{psi, FunctionValue, Method, ParameterPoint};
pub use turanian::TuranianKind;
