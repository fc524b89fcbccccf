//! Dimension theory of self-affine iterated function systems: subadditive
//! pressures, inverse lower pressures of target sequences, shrinking-target
//! and recurrence dimensions, and numerical checks of the matrix conditions
//! under which those dimension formulas hold.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod condition;
pub mod dimension;
pub mod error;
pub mod multilinear;
pub mod numerics;
pub mod pressure;
pub mod svf;
pub mod symbolic;
pub mod verify;

pub use condition::{buffer_search, certify, certify_escalating, BufferCertificate, CertifyOptions};
pub use dimension::{solve_affinity, solve_recurrence, solve_shrinking, DimensionResult, SolverOptions};
pub use error::{Error, Result};
pub use multilinear::{
    compound, find_proximal_word, flag_apply, hodge_star, irreducibility_semidecision, is_fully_proximal, top_flag,
    wedge_inner, CompoundMatrix, IrreducibilityVerdict, KVector, ProximalityWitness,
};
pub use pressure::{
    alpha_estimate, beta_estimate, pressure2_estimate, pressure_lower, pressure_upper, AlphaEstimate, PressureBracket,
    Rigor,
};
pub use svf::{gamma_bounds, phi, phi_word, singular_values, AffineIFS, GammaBounds, LogValue, Matrix, ProductCache, SingularProfile, Vector};
pub use symbolic::{common_prefix, enumerate_words, pad_target, target_cylinder, Rational, ReturnRule, TargetSequence, Word};

/// Library version recorded in every run record.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
