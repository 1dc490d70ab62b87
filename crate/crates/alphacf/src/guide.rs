//! The book, embedded.
//!
//! The narrative guide lives in `book/` at the repository root and is
//! built with mdBook. Each chapter is also included here as a module
//! doc, so every code snippet in the book runs under `cargo test --doc`
//! and can never drift from the crate's actual API.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/maps.md")]
pub mod maps {}

#[doc = include_str!("../../../book/src/symbolic.md")]
pub mod symbolic {}

#[doc = include_str!("../../../book/src/densities.md")]
pub mod densities {}

#[doc = include_str!("../../../book/src/entropy.md")]
pub mod entropy {}

#[doc = include_str!("../../../book/src/natural_extension.md")]
pub mod natural_extension {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
