//! Max-plus linear algebra and stability analysis for switching max-plus
//! linear (SMPL) discrete-event systems.
//!
//! The crate provides, bottom up:
//!
//! - [`scalar`] / [`matrix`]: the max-plus semiring (`⊕ = max`, `⊗ = +`) over
//!   the reals extended with a bottom element, dense matrices and vectors,
//!   norms, and residuation;
//! - [`spectral`]: precedence-graph components, maximum cycle means (Karp),
//!   Kleene star closures, and max-plus eigenvectors;
//! - [`cones`]: finitely generated max-plus cones and slice spaces, with
//!   membership, boundedness, and image-inclusion checks;
//! - [`smpl`]: the semi-autonomous SMPL model `x(k) = A^(l(k)) ⊗ x(k-1)`,
//!   trajectory simulation, and empirical stability metrics;
//! - [`switching`]: seeded random, periodic, and automaton-constrained
//!   switching-signal generation;
//! - [`stability`]: certificate-producing checkers for uniform,
//!   path-complete, and strong bounded-buffer stability.
//!
//! Batch simulation and the inclusion-relation computation are data-parallel
//! and use rayon when the default `parallel` feature is enabled; building
//! with `--no-default-features` selects the sequential fallback with
//! identical results.

pub mod cones;
pub mod error;
pub mod matrix;
pub mod scalar;
pub mod smpl;
pub mod spectral;
pub mod stability;
pub mod switching;

pub use cones::{Cone, MapInclusion, SliceSpace};
pub use error::{Error, Result};
pub use matrix::{residual, MpMatrix, MpVector};
pub use scalar::{MpScalar, DEFAULT_TOL};
pub use smpl::{metrics, simulate_batch, simulate_batch_seq, SmplSystem, Trajectory};
pub use spectral::{
    eigenvector, is_irreducible, kleene_star, lambda_star, max_cycle_mean, precedence_scc,
    spectral_data, SpectralData,
};
pub use stability::{
    check_path_complete, check_proposition1, check_strong_bounded, check_uniform,
    inclusion_relation, inclusion_relation_seq, verify_certificate_edges, GeneratingFunction,
    Notion, StabilityCertificate, Verdict,
};
pub use switching::{
    automaton_switching, periodic_switching, random_switching, SplitMix64, SwitchingAutomaton,
};
