//! A numerical laboratory for one-parameter operator groups on discretized
//! probability spaces.
//!
//! The central objects are flows `T_t` on finite grids (circle rotations,
//! special flows under a roof function, finite permutation maps), the
//! composition groups `U_t f = f ∘ T_t` they induce, and weighted variants
//! `U_t f = psi_t (f ∘ T_t)` governed by multiplicative cocycles `psi`.
//! The crate provides:
//!
//! * [`space`] — grid measure spaces and the functions living on them, with
//!   certified band-limit tracking so products are provably alias-free;
//! * [`flows`] — measure-preserving point motions and their Koopman action;
//! * [`cocycles`] — multiplicative cocycles built from derivatives,
//!   coboundaries, or explicit rules, plus the transfer-function equation
//!   and its integer-winding obstruction;
//! * [`groups`] — the operator groups themselves, exact and finite-difference
//!   generators, product-formula studies, and dense operator norms;
//! * [`verify`] — residual checks packaged as pass/fail verdicts: Leibniz
//!   and perturbed-Leibniz rules, multiplicativity, nonsingularity of
//!   weights, norm identities, growth envelopes, and power-law fits.
//!
//! Everything is deterministic: random probes are seeded, quadrature node
//! counts are fixed by explicit convergence criteria, and all serialization
//! orders keys canonically.

pub mod cocycles;
pub mod error;
pub mod flows;
pub mod groups;
pub mod space;
mod spectral;
pub mod verify;

pub use error::{KoopError, Result};
