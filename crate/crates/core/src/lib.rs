//! Construction and certification of a family of multipartite
//! bound-entangled states with W-like structure, plus the secure-key
//! machinery built on top of them: privacy squeezing, local filtering, a
//! randomized key-distillation protocol, and Devetak-Winter rate bounds.
//!
//! The crate is generic over the real scalar type (`f32`/`f64`) through
//! [`scalar::Scalar`]; the aliases below fix `f64`, which is what the CLI
//! and the acceptance checks use.

pub mod error;
pub mod family;
pub mod json;
pub mod linalg;
pub mod operator;
pub mod protocol;
pub mod rates;
pub mod scalar;
pub mod squeeze;

pub use error::{Error, Result};
pub use operator::{MultipartiteOperator, Spectrum};
pub use scalar::Scalar;

/// Double-precision operator, the production instantiation.
pub type Operator64 = MultipartiteOperator<f64>;
/// Single-precision operator.
pub type Operator32 = MultipartiteOperator<f32>;
/// Double-precision family parameters.
pub type FamilyParams64 = family::StateFamilyParams<f64>;
/// Double-precision two-qubit X-state record.
pub type XState64 = squeeze::XState<f64>;
/// Double-precision ccq data.
pub type CcqState64 = rates::CcqState<f64>;
