//! Numerical toolkit for the one-parameter family of
//! continued-fraction interval maps `T_alpha` on `[alpha - 1, alpha]`.
//!
//! The family interpolates between the by-excess map (`alpha = 0`), the
//! nearest-integer map (`alpha = 1/2`) and the Gauss map (`alpha = 1`).
//! This crate provides:
//!
//! - the maps, their branches, inverse branches, orbits and jump
//!   acceleration ([`maps`]);
//! - by-excess expansions, the reflection algorithm for `x -> 1 - x`,
//!   and cylinder-set machinery ([`symbolic`]);
//! - invariant densities by transfer-operator discretisation, closed
//!   forms, and the series form at `alpha = 1/r` ([`density`]);
//! - exact and Birkhoff-ensemble entropy estimation with deterministic
//!   seeding ([`entropy`]);
//! - the planar natural extension at `alpha = 1/r` with its invariance,
//!   injectivity and complementarity checks ([`natext`]).
//!
//! ```
//! use alphacf::maps::AlphaContext;
//! use alphacf::entropy::{ensemble_entropy, exact_entropy};
//!
//! let ctx = AlphaContext::new(0.5).unwrap();
//! let est = ensemble_entropy(&ctx, 2000, 500, 42).unwrap();
//! let exact = exact_entropy(0.5).unwrap();
//! assert!((est.mean - exact).abs() < 0.1);
//! ```

pub mod density;
pub mod entropy;
pub mod error;
pub mod maps;
pub mod natext;
pub mod quad;
pub mod rng;
pub mod symbolic;

pub use error::{Error, Result};
pub use maps::{AlphaContext, Digit, DigitSeq, OrbitRecord, Sign};
pub use symbolic::{ByExcessSeq, ByExcessToken, SeqClass};

pub mod guide;
