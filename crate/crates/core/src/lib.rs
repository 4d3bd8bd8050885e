//! Stabilizer-code discrimination of Bell-diagonal ensembles.
//!
//! Packed GF(2) linear algebra, sampling and counting of symplectic self-dual
//! codes, entropy and type-class bounds for `p^{⊗N}`, the coset-decoding
//! success probability `η`, and a dense state-vector cross-check.

pub mod discriminator;
pub mod ensemble;
pub mod error;
pub mod gf2;
pub mod quantum;
pub mod rng;
pub mod symplectic;

pub use discriminator::{
    chi_report, code_search, coset_leader, eta_exact, eta_mc, failure_bound, game_simulate, DecoderResult, GameOptions,
    GameReport, GameSimulation, Method, SearchBudget, SearchResult,
};
pub use ensemble::{Phase, PhaseLabel, ProbVec4, TailParams, TypeClass};
pub use error::{Error, Result};
pub use gf2::{symplectic_product, BitString, Gf2Matrix};
pub use quantum::DenseState;
pub use symplectic::{CodeFile, SelfDualCode};
