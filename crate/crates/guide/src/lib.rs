//! The guide's chapters, compiled so that `cargo test --doc` runs every Rust
//! snippet in `book/src`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/maps.md")]
pub mod maps {}

#[doc = include_str!("../../../book/src/visibility.md")]
pub mod visibility {}

#[doc = include_str!("../../../book/src/clusters.md")]
pub mod clusters {}

#[doc = include_str!("../../../book/src/focal-search.md")]
pub mod focal_search {}

#[doc = include_str!("../../../book/src/baselines.md")]
pub mod baselines {}

#[doc = include_str!("../../../book/src/benchmarks.md")]
pub mod benchmarks {}

#[doc = include_str!("../../../README.md")]
pub mod readme {}
