//! Sumcheck protocols over prime fields with divide-and-conquer folding.
//!
//! The crate provides:
//!
//! * [`field`], [`domain`], [`mpoly`] — prime-field arithmetic, summation
//!   domains with power sums, and sparse multivariate polynomials with
//!   declared degree bounds;
//! * [`oracle`] and [`transcript`] — the polynomial-IOP substrate: registered
//!   oracles (concrete and virtual) with query accounting, and a full
//!   interaction record with per-category operation counters;
//! * [`sumcheck_std`] — the classical round-by-round sumcheck baseline;
//! * [`fold_dcs`] — the divide-and-conquer protocols: the unfolded recursive
//!   variant and the folded single-track variant with logarithmic rounds,
//!   plus their soundness-bound calculators and expected-metric tables;
//! * [`univariate`] — base-case univariate sum checkers (query-all,
//!   coefficient-side, and the one-round protocol for multiplicative
//!   subgroups and cosets);
//! * [`pcs`] — the degree-constrained commitment layer: the monomial-to-
//!   multilinear and multilinear-to-univariate isomorphisms, the admissible
//!   basis, and a transparent mock scheme with batched evaluation;
//! * [`soundness`] — adversarial provers, exact exhaustive soundness on tiny
//!   fields, and Monte-Carlo estimates compared against the closed forms;
//! * [`acceptance`] — the self-check suite wired into both `cargo test` and
//!   the CLI's `selftest` subcommand.

pub mod acceptance;
pub mod domain;
pub mod error;
pub mod field;
pub mod fold_dcs;
pub mod mpoly;
pub mod ops;
pub mod oracle;
pub mod pcs;
pub mod prng;
pub mod soundness;
pub mod sumcheck_std;
pub mod transcript;
pub mod univariate;

pub use domain::{Domain, DomainStructure};
pub use error::{FieldError, LabError, OracleError, PcsError, PolyError, ProtocolError};
pub use field::{FieldElement, PrimeField};
pub use mpoly::{ExponentVector, MPoly};
pub use ops::OpCounter;
pub use prng::{ChallengeSampler, FixedSampler, SeededPrng};
